"""Normality-gated analysis chain: Shapiro-Wilk per group, then ANOVA/Tukey
or Kruskal-Wallis/Dunn."""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import PostHocComparison, StatTestResult, anova_oneway, kruskal_wallis
from .normality import shapiro_wilk
from .posthoc import PAdjust, dunn_test, tukey_hsd


@dataclass(frozen=True)
class AnalysisOutcome:
    normality: dict[str, StatTestResult]
    omnibus: StatTestResult
    posthoc: list[PostHocComparison] = field(default_factory=list)


def select_and_run(
    groups_by_area,
    alpha: float = 0.05,
    dunn_adjustment: PAdjust = PAdjust.HOLM,
) -> AnalysisOutcome:
    """Run the full comparison chain over per-area samples.

    ANOVA is used only when every area's sample passes Shapiro-Wilk at alpha;
    otherwise Kruskal-Wallis.  Post-hoc comparisons (Tukey after ANOVA, Dunn
    after Kruskal-Wallis) run only when the omnibus test is significant.
    """
    if len(groups_by_area) < 2:
        raise ValueError("need at least 2 areas to compare")

    labels = list(groups_by_area.keys())
    groups = [groups_by_area[label] for label in labels]

    normality: dict[str, StatTestResult] = {}
    for label, sample in zip(labels, groups):
        try:
            normality[label] = shapiro_wilk(sample, alpha=alpha)
        except ValueError as exc:
            raise type(exc)(f"area {label!r}: {exc}") from exc

    all_normal = all(not res.significant for res in normality.values())
    if all_normal:
        omnibus = anova_oneway(groups, alpha=alpha)
        posthoc = tukey_hsd(groups, alpha=alpha, labels=labels) if omnibus.significant else []
    else:
        omnibus = kruskal_wallis(groups, alpha=alpha)
        posthoc = (
            dunn_test(groups, adjustment=dunn_adjustment, alpha=alpha, labels=labels)
            if omnibus.significant
            else []
        )
    return AnalysisOutcome(normality=normality, omnibus=omnibus, posthoc=posthoc)
