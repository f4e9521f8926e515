"""
Chart generation
================

Renders the two report visualizations as deterministic SVG text: a radar
chart of per-ability mean scores for one area, and a box plot of one
ability's score distribution across areas.

Run: python demos/04_charts.py
"""

from pathlib import Path

import numpy as np

from playinsight.report import box_stats, render_boxplot, render_radar

out = Path("demo_out")
out.mkdir(exist_ok=True)

# Radar: mean scores for the building-blocks area, canonical ability order.
means = [0.493, 0.990, 0.791, 0.298, 0.311, 0.162, 0.209, 0.903]
svg = render_radar("building_blocks", means, level_bands=True)
(out / "radar_building_blocks.svg").write_text(svg)
print(f"radar -> {out / 'radar_building_blocks.svg'} ({len(svg)} bytes)")

# Box plot: one ability across the four areas, with an outlier on show.
rng = np.random.default_rng(5)
groups = {
    "sand_water": list(rng.normal(0.82, 0.10, 29).clip(0, 1)),
    "hillside_zipline": list(rng.normal(0.46, 0.12, 29).clip(0, 1)) + [0.02],
    "building_blocks": list(rng.normal(0.79, 0.08, 29).clip(0, 1)),
    "playground": list(rng.normal(0.71, 0.11, 29).clip(0, 1)),
}
svg = render_boxplot("fine_motor", groups)
(out / "box_fine_motor.svg").write_text(svg)
print(f"box plot -> {out / 'box_fine_motor.svg'} ({len(svg)} bytes)")

for area, values in groups.items():
    s = box_stats(values)
    print(f"  {area:18} Q1={s.q1:.3f} median={s.median:.3f} Q3={s.q3:.3f} "
          f"whiskers=[{s.whisker_low:.3f}, {s.whisker_high:.3f}] "
          f"outliers={len(s.outliers)}")
