"""Distribution functions backing the test statistics.

Normal, chi-square, F, and studentized-range tail probabilities are computed
here from first principles (incomplete gamma/beta via series and continued
fractions, studentized range via double numerical integration) so the test
suite can check them against an independent high-precision oracle.
"""

from __future__ import annotations

import math
from functools import lru_cache
from statistics import NormalDist

import numpy as np

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)
_EPS = 1e-15
_ITMAX = 500
_FPMIN = 1e-300

_erfc_ufunc = np.frompyfunc(math.erfc, 1, 1)


def norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT2)


def norm_sf(x: float) -> float:
    return 0.5 * math.erfc(x / _SQRT2)


def norm_ppf(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    return NormalDist().inv_cdf(p)


def _norm_cdf_array(x: np.ndarray) -> np.ndarray:
    return 0.5 * _erfc_ufunc(-x / _SQRT2).astype(np.float64)


def _lower_gamma_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by series, for x < a + 1."""
    term = 1.0 / a
    total = term
    n = a
    for _ in range(_ITMAX):
        n += 1.0
        term *= x / n
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_gamma_cf(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction."""
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _ITMAX + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def reg_gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    if a <= 0.0 or x < 0.0:
        raise ValueError("require a > 0 and x >= 0")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _lower_gamma_series(a, x)
    return 1.0 - _upper_gamma_cf(a, x)


def reg_gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    if a <= 0.0 or x < 0.0:
        raise ValueError("require a > 0 and x >= 0")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _lower_gamma_series(a, x)
    return _upper_gamma_cf(a, x)


def chi2_sf(x: float, df: float) -> float:
    """Survival function of the chi-square distribution."""
    if df <= 0:
        raise ValueError("df must be positive")
    if x <= 0.0:
        return 1.0
    return reg_gamma_q(df / 2.0, x / 2.0)


def chi2_cdf(x: float, df: float) -> float:
    if df <= 0:
        raise ValueError("df must be positive")
    if x <= 0.0:
        return 0.0
    return reg_gamma_p(df / 2.0, x / 2.0)


def _betacf(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _ITMAX + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("require a, b > 0")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_bt = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def f_sf(f: float, df_num: float, df_den: float) -> float:
    """Survival function of the F distribution."""
    if df_num <= 0 or df_den <= 0:
        raise ValueError("degrees of freedom must be positive")
    if f <= 0.0:
        return 1.0
    if math.isinf(f):
        return 0.0
    x = df_den / (df_den + df_num * f)
    return reg_inc_beta(df_den / 2.0, df_num / 2.0, x)


def _gauss_legendre(lo: float, hi: float, panels: int, order: int):
    """Composite Gauss-Legendre nodes and weights over [lo, hi]."""
    base_x, base_w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    nodes = (mid[:, None] + half[:, None] * base_x[None, :]).ravel()
    weights = (half[:, None] * base_w[None, :]).ravel()
    return nodes, weights


@lru_cache(maxsize=64)
def _range_grid(k: int):
    # Inner integration over the conditional-maximum variable; the normal
    # density kills the integrand outside +-8.5.
    z, wz = _gauss_legendre(-8.5, 8.5, 12, 20)
    phi = np.exp(-0.5 * z * z) / _SQRT2PI
    big_phi = _norm_cdf_array(z)
    return z, wz * phi, big_phi


def _normal_range_cdf(r: np.ndarray, k: int) -> np.ndarray:
    """P(range of k independent standard normals <= r), vectorized over r."""
    z, w_phi, big_phi = _range_grid(k)
    shifted = _norm_cdf_array(z[None, :] - r[:, None])
    core = np.clip(big_phi[None, :] - shifted, 0.0, 1.0)
    return k * (core ** (k - 1) @ w_phi)


@lru_cache(maxsize=64)
def _scale_grid(df: int):
    # Outer integration over s = sqrt(chi2_df / df); cut where both tails of
    # the scale density fall below 1e-12.
    s_hi = 2.0
    while chi2_sf(df * s_hi * s_hi, df) > 1e-12 and s_hi < 64.0:
        s_hi *= 1.25
    s_lo = 0.0
    step = s_hi / 512.0
    while chi2_cdf(df * (s_lo + step) ** 2, df) < 1e-12:
        s_lo += step
    s, ws = _gauss_legendre(s_lo, s_hi, 16, 24)
    log_norm = (
        math.log(2.0)
        + (df / 2.0) * math.log(df / 2.0)
        - math.lgamma(df / 2.0)
    )
    density = np.exp(log_norm + (df - 1) * np.log(s) - df * s * s / 2.0)
    return s, ws * density


def studentized_range_cdf(q: float, k: int, df: float) -> float:
    """CDF of the studentized range with k groups and df error degrees of freedom."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if df < 1:
        raise ValueError("df must be >= 1")
    if q <= 0.0:
        return 0.0
    s, w_density = _scale_grid(int(df))
    inner = _normal_range_cdf(q * s, k)
    return float(min(max(inner @ w_density, 0.0), 1.0))


def studentized_range_sf(q: float, k: int, df: float) -> float:
    return 1.0 - studentized_range_cdf(q, k, df)


def studentized_range_crit(alpha: float, k: int, df: float) -> float:
    """Critical value q with SF(q) = alpha, by bisection."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    lo, hi = 0.0, 2.0
    while studentized_range_sf(hi, k, df) > alpha:
        lo = hi
        hi *= 2.0
        if hi > 1e4:
            raise ArithmeticError("failed to bracket studentized-range critical value")
    for _ in range(80):
        mid = (lo + hi) / 2.0
        if studentized_range_sf(mid, k, df) > alpha:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-10:
            break
    return (lo + hi) / 2.0
