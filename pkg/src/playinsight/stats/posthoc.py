"""Pairwise post-hoc comparisons: Tukey HSD and Dunn's test."""

from __future__ import annotations

import enum
import itertools
import math

import numpy as np

from .core import (
    AllValuesTied,
    PostHocComparison,
    SampleTooSmall,
    rank_midranks,
    tie_sum,
)
from .distributions import (
    norm_sf,
    studentized_range_crit,
    studentized_range_sf,
)


class PAdjust(enum.Enum):
    NONE = "none"
    BONFERRONI = "bonferroni"
    HOLM = "holm"


def adjust_pvalues(p_values, method: PAdjust) -> list[float]:
    """Family-wise adjustment of two-sided p-values."""
    m = len(p_values)
    if method is PAdjust.NONE or m == 0:
        return [min(p, 1.0) for p in p_values]
    if method is PAdjust.BONFERRONI:
        return [min(p * m, 1.0) for p in p_values]
    # Holm step-down: enforce monotonicity over ascending raw p-values.
    order = sorted(range(m), key=lambda i: p_values[i])
    adjusted = [0.0] * m
    running = 0.0
    for rank, idx in enumerate(order):
        running = max(running, (m - rank) * p_values[idx])
        adjusted[idx] = min(running, 1.0)
    return adjusted


def _labels_for(groups, labels) -> list[str]:
    if labels is None:
        return [f"group{i + 1}" for i in range(len(groups))]
    labels = list(labels)
    if len(labels) != len(groups):
        raise ValueError("labels must match the number of groups")
    return [str(lab) for lab in labels]


def tukey_hsd(groups, alpha: float = 0.05, labels=None) -> list[PostHocComparison]:
    """All-pairs Tukey HSD (Tukey-Kramer for unequal group sizes).

    Adjusted p-values come from the studentized-range survival function; the
    confidence interval uses the critical q at the requested alpha.
    """
    gs = [np.asarray(g, dtype=np.float64) for g in groups]
    if len(gs) < 2:
        raise SampleTooSmall("Tukey HSD requires at least 2 groups")
    if any(len(g) < 2 for g in gs):
        raise SampleTooSmall("Tukey HSD requires every group to have n >= 2")

    names = _labels_for(gs, labels)
    k = len(gs)
    n_total = sum(len(g) for g in gs)
    df_within = n_total - k
    ss_within = sum(float(((g - g.mean()) ** 2).sum()) for g in gs)
    ms_within = ss_within / df_within
    if ms_within == 0.0:
        raise AllValuesTied("zero within-group variance; q is undefined")

    q_crit = studentized_range_crit(alpha, k, df_within)
    out = []
    for ia, ib in itertools.combinations(range(k), 2):
        a, b = gs[ia], gs[ib]
        diff = float(a.mean() - b.mean())
        se = math.sqrt(ms_within / 2.0 * (1.0 / len(a) + 1.0 / len(b)))
        q = abs(diff) / se
        p = studentized_range_sf(q, k, df_within)
        half_width = q_crit * se
        out.append(
            PostHocComparison(
                group_a=names[ia],
                group_b=names[ib],
                mean_difference=diff,
                statistic=q,
                unadjusted_p=p,
                adjusted_p=p,
                significant=p < alpha,
                ci_low=diff - half_width,
                ci_high=diff + half_width,
            )
        )
    return out


def dunn_test(
    groups,
    adjustment: PAdjust = PAdjust.HOLM,
    alpha: float = 0.05,
    labels=None,
    bootstrap_ci: bool = False,
    bootstrap_resamples: int = 10_000,
    seed: int | None = None,
) -> list[PostHocComparison]:
    """All-pairs Dunn rank-sum comparisons after a Kruskal-Wallis test.

    The z statistic uses pooled mid-ranks with the tie-corrected standard
    error; mean_difference reports the raw difference of group means for
    report parity.  Dunn's statistic has no canonical mean-difference CI, so
    intervals are attached only when the seeded percentile bootstrap is
    enabled.
    """
    gs = [np.asarray(g, dtype=np.float64) for g in groups]
    if len(gs) < 2:
        raise SampleTooSmall("Dunn's test requires at least 2 groups")
    if any(len(g) < 1 for g in gs):
        raise SampleTooSmall("Dunn's test requires every group to be non-empty")
    if bootstrap_ci and seed is None:
        raise ValueError("bootstrap_ci requires a seed for reproducibility")

    names = _labels_for(gs, labels)
    n_total = sum(len(g) for g in gs)
    pooled = np.concatenate(gs)
    ranks, ties = rank_midranks(pooled)
    tie_term = tie_sum(ties) / (12.0 * (n_total - 1))
    base_var = n_total * (n_total + 1) / 12.0 - tie_term
    if base_var <= 0.0:
        raise AllValuesTied("all pooled values are identical; z is undefined")

    mean_ranks = []
    offset = 0
    for g in gs:
        mean_ranks.append(float(ranks[offset : offset + len(g)].mean()))
        offset += len(g)

    pairs = list(itertools.combinations(range(len(gs)), 2))
    z_values = []
    raw_p = []
    for ia, ib in pairs:
        se = math.sqrt(base_var * (1.0 / len(gs[ia]) + 1.0 / len(gs[ib])))
        z = (mean_ranks[ia] - mean_ranks[ib]) / se
        z_values.append(z)
        raw_p.append(min(2.0 * norm_sf(abs(z)), 1.0))
    adjusted = adjust_pvalues(raw_p, adjustment)

    rng = np.random.default_rng(seed) if bootstrap_ci else None
    out = []
    for (ia, ib), z, p, p_adj in zip(pairs, z_values, raw_p, adjusted):
        a, b = gs[ia], gs[ib]
        diff = float(a.mean() - b.mean())
        ci_low = ci_high = None
        if rng is not None:
            res_a = rng.choice(a, size=(bootstrap_resamples, len(a))).mean(axis=1)
            res_b = rng.choice(b, size=(bootstrap_resamples, len(b))).mean(axis=1)
            deltas = res_a - res_b
            ci_low = float(np.percentile(deltas, 2.5))
            ci_high = float(np.percentile(deltas, 97.5))
        out.append(
            PostHocComparison(
                group_a=names[ia],
                group_b=names[ib],
                mean_difference=diff,
                statistic=z,
                unadjusted_p=p,
                adjusted_p=p_adj,
                significant=p_adj < alpha,
                ci_low=ci_low,
                ci_high=ci_high,
            )
        )
    return out
