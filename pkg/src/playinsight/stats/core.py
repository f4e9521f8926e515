"""Descriptive statistics and omnibus tests (one-way ANOVA, Kruskal-Wallis)."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .distributions import chi2_sf, f_sf


class EmptySample(ValueError):
    pass


class SampleTooSmall(ValueError):
    pass


class ConstantSample(ValueError):
    pass


class AllValuesTied(ValueError):
    pass


class StatMethod(enum.Enum):
    SHAPIRO_WILK = "shapiro_wilk"
    ANOVA = "anova"
    KRUSKAL_WALLIS = "kruskal_wallis"

    @property
    def display_name(self) -> str:
        return {
            StatMethod.SHAPIRO_WILK: "Shapiro-Wilk",
            StatMethod.ANOVA: "ANOVA",
            StatMethod.KRUSKAL_WALLIS: "Kruskal-Wallis H test",
        }[self]


@dataclass(frozen=True)
class DescriptiveStats:
    n: int
    mean: float
    sd: float | None  # sample sd (n-1); absent when n == 1
    min: float
    max: float


@dataclass(frozen=True)
class StatTestResult:
    method: StatMethod
    statistic: float
    p_value: float
    df: str
    alpha: float
    significant: bool
    note: str | None = None


@dataclass(frozen=True)
class PostHocComparison:
    group_a: str
    group_b: str
    mean_difference: float
    statistic: float  # q for Tukey, z for Dunn
    unadjusted_p: float
    adjusted_p: float
    significant: bool
    ci_low: float | None = None
    ci_high: float | None = None


def descriptive(sample) -> DescriptiveStats:
    """n, mean, sample standard deviation, min, and max of one sample."""
    x = np.asarray(sample, dtype=np.float64)
    if x.size == 0:
        raise EmptySample("descriptive statistics require n >= 1")
    sd = float(x.std(ddof=1)) if x.size > 1 else None
    return DescriptiveStats(
        n=int(x.size),
        mean=float(x.mean()),
        sd=sd,
        min=float(x.min()),
        max=float(x.max()),
    )


def _as_groups(groups) -> list[np.ndarray]:
    return [np.asarray(g, dtype=np.float64) for g in groups]


def anova_oneway(groups, alpha: float = 0.05) -> StatTestResult:
    """One-way fixed-effects ANOVA: F = MS_between / MS_within.

    A zero within-group variance with non-zero between-group variance is a
    degenerate configuration; it is reported with p = 0 and a note rather
    than raised.
    """
    gs = _as_groups(groups)
    if len(gs) < 2:
        raise SampleTooSmall("ANOVA requires at least 2 groups")
    if any(len(g) < 2 for g in gs):
        raise SampleTooSmall("ANOVA requires every group to have n >= 2")

    k = len(gs)
    n_total = sum(len(g) for g in gs)
    grand = sum(float(g.sum()) for g in gs) / n_total
    ss_between = sum(len(g) * (float(g.mean()) - grand) ** 2 for g in gs)
    ss_within = sum(float(((g - g.mean()) ** 2).sum()) for g in gs)
    df_between = k - 1
    df_within = n_total - k
    ms_between = ss_between / df_between
    ms_within = ss_within / df_within

    note = None
    if ms_within == 0.0:
        if ms_between > 0.0:
            f_stat, p = math.inf, 0.0
            note = "zero within-group variance; F degenerate"
        else:
            f_stat, p = 0.0, 1.0
    else:
        f_stat = ms_between / ms_within
        p = f_sf(f_stat, df_between, df_within)

    return StatTestResult(
        method=StatMethod.ANOVA,
        statistic=f_stat,
        p_value=p,
        df=f"({df_between}, {df_within})",
        alpha=alpha,
        significant=p < alpha,
        note=note,
    )


def rank_midranks(values: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Mid-ranks (1-based) of values with the sizes of each tie group."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values), dtype=np.float64)
    ties: list[int] = []
    i = 0
    sorted_vals = values[order]
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        midrank = (i + j) / 2.0 + 1.0
        ranks[order[i : j + 1]] = midrank
        ties.append(j - i + 1)
        i = j + 1
    return ranks, ties


def tie_sum(ties) -> float:
    """Sum of t^3 - t over tie groups."""
    return float(sum(t ** 3 - t for t in ties))


def kruskal_wallis(groups, alpha: float = 0.05) -> StatTestResult:
    """Kruskal-Wallis H with mid-rank tie correction; p from chi-square (k-1 df)."""
    gs = _as_groups(groups)
    if len(gs) < 2:
        raise SampleTooSmall("Kruskal-Wallis requires at least 2 groups")
    if any(len(g) < 1 for g in gs):
        raise SampleTooSmall("Kruskal-Wallis requires every group to be non-empty")
    n_total = sum(len(g) for g in gs)
    if n_total < 3:
        raise SampleTooSmall("Kruskal-Wallis requires total N >= 3")

    pooled = np.concatenate(gs)
    ranks, ties = rank_midranks(pooled)
    correction = 1.0 - tie_sum(ties) / (n_total ** 3 - n_total)
    if correction <= 0.0:
        raise AllValuesTied("all pooled values are identical; H is undefined")

    h = 0.0
    offset = 0
    for g in gs:
        r = ranks[offset : offset + len(g)]
        h += float(r.sum()) ** 2 / len(g)
        offset += len(g)
    h = 12.0 / (n_total * (n_total + 1)) * h - 3.0 * (n_total + 1)
    h /= correction

    k = len(gs)
    p = chi2_sf(h, k - 1)
    return StatTestResult(
        method=StatMethod.KRUSKAL_WALLIS,
        statistic=h,
        p_value=p,
        df=str(k - 1),
        alpha=alpha,
        significant=p < alpha,
    )
