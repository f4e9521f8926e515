"""Shapiro-Wilk W test, after Royston's AS R94 algorithm (uncensored samples)."""

from __future__ import annotations

import math

import numpy as np

from .core import ConstantSample, SampleTooSmall, StatTestResult, StatMethod
from .distributions import norm_ppf, norm_sf

# Polynomial coefficients from AS R94, highest power first.
_C1 = (-2.706056, 4.434685, -2.07119, -0.147981, 0.221157, 0.0)
_C2 = (-3.582633, 5.682633, -1.752461, -0.293762, 0.042981, 0.0)
_C3 = (-0.0006714, 0.025054, -0.39978, 0.544)
_C4 = (-0.0020322, 0.062767, -0.77857, 1.3822)
_C5 = (0.0038915, -0.083751, -0.31082, -1.5861)
_C6 = (0.0030302, -0.082676, -0.4803)
_G = (0.459, -2.273)

_SQRT_HALF = math.sqrt(0.5)
_PI6 = 6.0 / math.pi
_STQR = math.asin(math.sqrt(0.75))
_TINY_P = 1e-19


def _weights(n: int) -> np.ndarray:
    """Coefficient vector a (antisymmetric, full length n) for sample size n."""
    if n == 3:
        return np.array([-_SQRT_HALF, 0.0, _SQRT_HALF])
    half = n // 2
    i = np.arange(1, half + 1)
    # Lower-half Blom scores (negative); the weight of the largest order
    # statistic gets the polynomial correction, the rest are renormalized.
    m = np.array([norm_ppf(v) for v in (i - 0.375) / (n + 0.25)])
    summ2 = 2.0 * float(m @ m)
    ssumm2 = math.sqrt(summ2)
    rsn = 1.0 / math.sqrt(n)
    a1 = np.polyval(_C1, rsn) - m[0] / ssumm2
    if n > 5:
        a2 = np.polyval(_C2, rsn) - m[1] / ssumm2
        fac = math.sqrt(
            (summ2 - 2.0 * m[0] ** 2 - 2.0 * m[1] ** 2)
            / (1.0 - 2.0 * a1 ** 2 - 2.0 * a2 ** 2)
        )
        upper = np.concatenate(([a1, a2], -m[2:] / fac))
    else:
        fac = math.sqrt((summ2 - 2.0 * m[0] ** 2) / (1.0 - 2.0 * a1 ** 2))
        upper = np.concatenate(([a1], -m[1:] / fac))
    a = np.zeros(n)
    a[:half] = -upper
    a[n - half:] = upper[::-1]
    return a


def shapiro_wilk(sample, alpha: float = 0.05) -> StatTestResult:
    """W statistic and p-value for the null hypothesis of normality.

    Valid for 3 <= n <= 5000.  A zero-variance sample has no defined W and is
    reported as ConstantSample.
    """
    x = np.sort(np.asarray(sample, dtype=np.float64))
    n = len(x)
    if n < 3:
        raise SampleTooSmall(f"Shapiro-Wilk requires n >= 3, got {n}")
    if n > 5000:
        raise ValueError(f"Shapiro-Wilk approximation is unreliable for n > 5000, got {n}")
    if x[-1] - x[0] < 1e-19:
        raise ConstantSample("sample has zero range; W is undefined")

    a = _weights(n)
    centered = x - x.mean()
    w = float((a @ x) ** 2 / (centered @ centered))
    w = min(w, 1.0)
    w1 = 1.0 - w

    if n == 3:
        pw = _PI6 * (math.asin(math.sqrt(w)) - _STQR)
        pw = min(max(pw, 0.0), 1.0)
    elif n <= 11:
        gamma = np.polyval(_G, n)
        y = math.log(w1)
        if y >= gamma:
            pw = _TINY_P
        else:
            y = -math.log(gamma - y)
            mu = np.polyval(_C3, n)
            sigma = math.exp(np.polyval(_C4, n))
            pw = norm_sf((y - mu) / sigma)
    else:
        log_n = math.log(n)
        y = math.log(w1)
        mu = np.polyval(_C5, log_n)
        sigma = math.exp(np.polyval(_C6, log_n))
        pw = norm_sf((y - mu) / sigma)

    return StatTestResult(
        method=StatMethod.SHAPIRO_WILK,
        statistic=w,
        p_value=pw,
        df=f"n={n}",
        alpha=alpha,
        significant=pw < alpha,
    )
