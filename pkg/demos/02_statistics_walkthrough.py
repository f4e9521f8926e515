"""
Statistical comparison walkthrough
==================================

Given per-child ability scores in each play area, runs the full decision
chain: Shapiro-Wilk normality per area, then ANOVA + Tukey HSD when every
area is normal, otherwise Kruskal-Wallis + Dunn.

Run: python demos/02_statistics_walkthrough.py
"""

import numpy as np

from playinsight.stats import (
    StatMethod,
    descriptive,
    select_and_run,
    shapiro_wilk,
)

rng = np.random.default_rng(11)

# Synthetic per-area samples for two abilities (n = 29 children each).
# "fine_motor" scores are normal everywhere; "communication" is skewed in one
# area, which flips the chain onto the rank-based route.
datasets = {
    "fine_motor": {
        "sand_water": rng.normal(0.82, 0.10, 29).clip(0, 1),
        "hillside_zipline": rng.normal(0.46, 0.12, 29).clip(0, 1),
        "building_blocks": rng.normal(0.79, 0.08, 29).clip(0, 1),
        "playground": rng.normal(0.71, 0.11, 29).clip(0, 1),
    },
    "communication": {
        "sand_water": 1.0 - rng.uniform(0, 1, 29) ** 4,      # pushed against 1.0
        "hillside_zipline": 1.0 - rng.uniform(0, 1, 29) ** 4,
        "building_blocks": rng.normal(0.21, 0.15, 29).clip(0, 1),
        "playground": 1.0 - rng.uniform(0, 1, 29) ** 4,
    },
}

for ability, groups in datasets.items():
    print(f"=== {ability} ===")
    for area, sample in groups.items():
        d = descriptive(sample)
        sw = shapiro_wilk(sample)
        flag = "non-normal" if sw.significant else "normal"
        print(f"  {area:18} mean={d.mean:.3f} sd={d.sd:.3f} "
              f"W={sw.statistic:.3f} p={sw.p_value:.3f} ({flag})")

    outcome = select_and_run(groups)
    omnibus = outcome.omnibus
    print(f"  -> omnibus: {omnibus.method.display_name} "
          f"statistic={omnibus.statistic:.3f} p={omnibus.p_value:.4g} "
          f"significant={omnibus.significant}")

    if not outcome.posthoc:
        print("  -> post-hoc skipped (omnibus non-significant)")
    else:
        name = "Tukey HSD" if omnibus.method is StatMethod.ANOVA else "Dunn (Holm)"
        print(f"  -> post-hoc ({name}):")
        for c in outcome.posthoc:
            ci = (f" CI=[{c.ci_low:+.3f}, {c.ci_high:+.3f}]"
                  if c.ci_low is not None else "")
            marker = "*" if c.significant else " "
            print(f"   {marker} {c.group_a} vs {c.group_b}: "
                  f"diff={c.mean_difference:+.3f} adj_p={c.adjusted_p:.4f}{ci}")
    print()
