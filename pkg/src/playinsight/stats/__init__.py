"""Statistical engine: descriptives, normality, omnibus tests, post-hoc comparisons."""

from .core import (
    AllValuesTied,
    ConstantSample,
    DescriptiveStats,
    EmptySample,
    PostHocComparison,
    SampleTooSmall,
    StatTestResult,
    StatMethod,
    anova_oneway,
    descriptive,
    kruskal_wallis,
    rank_midranks,
)
from .distributions import (
    chi2_cdf,
    chi2_sf,
    f_sf,
    norm_cdf,
    norm_ppf,
    norm_sf,
    studentized_range_cdf,
    studentized_range_crit,
    studentized_range_sf,
)
from .normality import shapiro_wilk
from .pipeline import AnalysisOutcome, select_and_run
from .posthoc import PAdjust, adjust_pvalues, dunn_test, tukey_hsd

__all__ = [
    "AllValuesTied",
    "AnalysisOutcome",
    "ConstantSample",
    "DescriptiveStats",
    "EmptySample",
    "PAdjust",
    "PostHocComparison",
    "SampleTooSmall",
    "StatTestResult",
    "StatMethod",
    "adjust_pvalues",
    "anova_oneway",
    "chi2_cdf",
    "chi2_sf",
    "descriptive",
    "dunn_test",
    "f_sf",
    "kruskal_wallis",
    "norm_cdf",
    "norm_ppf",
    "norm_sf",
    "rank_midranks",
    "select_and_run",
    "shapiro_wilk",
    "studentized_range_cdf",
    "studentized_range_crit",
    "studentized_range_sf",
    "tukey_hsd",
]
