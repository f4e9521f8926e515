"""Report outputs: radar charts, box plots (deterministic SVG text), and
delimited exports of the descriptive/omnibus/post-hoc tables."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .model import ABILITY_ORDER, AbilityDimension, AbilityScore, play_area
from .scoring import LEVEL_LOW_MAX, LEVEL_MODERATE_MAX
from .stats import AnalysisOutcome, DescriptiveStats


class WrongAxisCount(ValueError):
    pass


class ValueOutOfRange(ValueError):
    pass


class EmptyGroup(ValueError):
    pass


@dataclass(frozen=True)
class ChartSpec:
    title: str
    width: int = 520
    height: int = 520
    axis_labels: tuple[str, ...] = ()
    series: tuple[tuple[str, tuple[float, ...]], ...] = ()
    level_bands: bool = False

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("width and height must be positive")
        for _, values in self.series:
            if self.axis_labels and len(values) != len(self.axis_labels):
                raise WrongAxisCount(
                    f"series length {len(values)} != axis count {len(self.axis_labels)}"
                )


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _svg_document(width: int, height: int, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


def radar_vertex(
    index: int, value: float, cx: float, cy: float, radius: float
) -> tuple[float, float]:
    """Vertex position for axis `index` (0 at the top, clockwise)."""
    angle = math.radians(-90.0 + 45.0 * index)
    return cx + radius * value * math.cos(angle), cy + radius * value * math.sin(angle)


def render_radar(
    area_id: str,
    means: Sequence[float],
    width: int = 520,
    height: int = 520,
    level_bands: bool = False,
) -> str:
    """Eight-axis radar chart of per-ability mean scores for one play area."""
    if len(means) != 8:
        raise WrongAxisCount(f"radar needs exactly 8 values, got {len(means)}")
    for value in means:
        if not 0.0 <= value <= 1.0:
            raise ValueOutOfRange(f"mean {value} outside [0, 1]")
    spec = ChartSpec(
        title=area_id,
        width=width,
        height=height,
        axis_labels=tuple(a.display_name for a in ABILITY_ORDER),
        series=((area_id, tuple(means)),),
        level_bands=level_bands,
    )
    width, height = spec.width, spec.height

    cx, cy = width / 2.0, height / 2.0 + 10.0
    radius = min(width, height) / 2.0 - 70.0
    body: list[str] = []
    title = play_area(area_id).name if _area_known(area_id) else area_id
    body.append(
        f'<text x="{_fmt(width / 2)}" y="24" text-anchor="middle" '
        f'font-size="16" font-family="sans-serif">{_esc(title)}</text>'
    )

    ring_values = [0.25, 0.5, 0.75, 1.0]
    if level_bands:
        ring_values = sorted(set(ring_values + [LEVEL_LOW_MAX, LEVEL_MODERATE_MAX]))
    for ring in ring_values:
        points = " ".join(
            f"{_fmt(x)},{_fmt(y)}"
            for x, y in (radar_vertex(i, ring, cx, cy, radius) for i in range(8))
        )
        is_band = level_bands and ring in (LEVEL_LOW_MAX, LEVEL_MODERATE_MAX)
        stroke = "#c08080" if is_band else "#cccccc"
        dash = ' stroke-dasharray="4 3"' if is_band else ""
        body.append(
            f'<polygon points="{points}" fill="none" stroke="{stroke}"{dash}/>'
        )

    for i, ability in enumerate(ABILITY_ORDER):
        x, y = radar_vertex(i, 1.0, cx, cy, radius)
        body.append(
            f'<line x1="{_fmt(cx)}" y1="{_fmt(cy)}" x2="{_fmt(x)}" y2="{_fmt(y)}" '
            f'stroke="#dddddd"/>'
        )
        lx, ly = radar_vertex(i, 1.14, cx, cy, radius)
        anchor = "middle"
        if lx > cx + 1:
            anchor = "start"
        elif lx < cx - 1:
            anchor = "end"
        body.append(
            f'<text x="{_fmt(lx)}" y="{_fmt(ly + 4)}" text-anchor="{anchor}" '
            f'font-size="11" font-family="sans-serif">{_esc(ability.display_name)}</text>'
        )

    points = " ".join(
        f"{_fmt(x)},{_fmt(y)}"
        for x, y in (
            radar_vertex(i, value, cx, cy, radius) for i, value in enumerate(means)
        )
    )
    body.append(
        f'<polygon class="series" points="{points}" fill="#4477aa" '
        f'fill-opacity="0.35" stroke="#4477aa" stroke-width="2"/>'
    )
    return _svg_document(width, height, body)


def _area_known(area_id: str) -> bool:
    try:
        play_area(area_id)
        return True
    except KeyError:
        return False


@dataclass(frozen=True)
class BoxStats:
    q1: float
    median: float
    q3: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...]


def box_stats(values: Sequence[float]) -> BoxStats:
    """Five-number box summary: inclusive linear-interpolation quartiles and
    Tukey whiskers at 1.5 IQR fences."""
    if len(values) == 0:
        raise EmptyGroup("box plot group must be non-empty")
    x = np.sort(np.asarray(values, dtype=np.float64))
    q1, median, q3 = (float(v) for v in np.quantile(x, [0.25, 0.5, 0.75]))
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = x[(x >= lo_fence) & (x <= hi_fence)]
    outliers = x[(x < lo_fence) | (x > hi_fence)]
    return BoxStats(
        q1=q1,
        median=median,
        q3=q3,
        whisker_low=float(inside.min()),
        whisker_high=float(inside.max()),
        outliers=tuple(float(v) for v in outliers),
    )


def render_boxplot(
    ability: AbilityDimension | str,
    groups: Mapping[str, Sequence[float]],
    width: int = 560,
    height: int = 420,
) -> str:
    """One box per area for a single ability's score distribution."""
    if not groups:
        raise EmptyGroup("box plot needs at least one group")
    stats = {label: box_stats(values) for label, values in groups.items()}

    all_values = [v for values in groups.values() for v in values]
    lo = min(0.0, min(all_values))
    hi = max(1.0, max(all_values))
    pad = 0.05 * (hi - lo)
    lo -= pad
    hi += pad

    left, right, top, bottom = 58.0, 16.0, 44.0, 52.0
    plot_w = width - left - right
    plot_h = height - top - bottom

    def y_of(value: float) -> float:
        return top + (hi - value) / (hi - lo) * plot_h

    title = ability.display_name if isinstance(ability, AbilityDimension) else str(ability)
    body = [
        f'<text x="{_fmt(width / 2)}" y="24" text-anchor="middle" font-size="16" '
        f'font-family="sans-serif">{_esc(title)}</text>',
        f'<line x1="{_fmt(left)}" y1="{_fmt(top)}" x2="{_fmt(left)}" '
        f'y2="{_fmt(top + plot_h)}" stroke="#333333"/>',
    ]
    for i in range(5):
        tick = lo + (hi - lo) * i / 4.0
        ty = y_of(tick)
        body.append(
            f'<line x1="{_fmt(left - 4)}" y1="{_fmt(ty)}" x2="{_fmt(left)}" '
            f'y2="{_fmt(ty)}" stroke="#333333"/>'
        )
        body.append(
            f'<text x="{_fmt(left - 8)}" y="{_fmt(ty + 4)}" text-anchor="end" '
            f'font-size="10" font-family="sans-serif">{tick:.2f}</text>'
        )

    labels = list(groups.keys())
    slot_w = plot_w / len(labels)
    box_w = min(64.0, slot_w * 0.5)
    for i, label in enumerate(labels):
        s = stats[label]
        cx = left + slot_w * (i + 0.5)
        half = box_w / 2.0
        # whiskers with caps
        for w_end, box_edge in ((s.whisker_low, s.q1), (s.whisker_high, s.q3)):
            body.append(
                f'<line x1="{_fmt(cx)}" y1="{_fmt(y_of(box_edge))}" x2="{_fmt(cx)}" '
                f'y2="{_fmt(y_of(w_end))}" stroke="#333333"/>'
            )
            body.append(
                f'<line x1="{_fmt(cx - half / 2)}" y1="{_fmt(y_of(w_end))}" '
                f'x2="{_fmt(cx + half / 2)}" y2="{_fmt(y_of(w_end))}" stroke="#333333"/>'
            )
        body.append(
            f'<rect class="box" x="{_fmt(cx - half)}" y="{_fmt(y_of(s.q3))}" '
            f'width="{_fmt(box_w)}" height="{_fmt(y_of(s.q1) - y_of(s.q3))}" '
            f'fill="#88bbdd" fill-opacity="0.6" stroke="#336699"/>'
        )
        body.append(
            f'<line class="median" x1="{_fmt(cx - half)}" y1="{_fmt(y_of(s.median))}" '
            f'x2="{_fmt(cx + half)}" y2="{_fmt(y_of(s.median))}" '
            f'stroke="#113355" stroke-width="2"/>'
        )
        for outlier in s.outliers:
            body.append(
                f'<circle class="outlier" cx="{_fmt(cx)}" cy="{_fmt(y_of(outlier))}" '
                f'r="3" fill="none" stroke="#aa3333"/>'
            )
        display = play_area(label).name if _area_known(label) else label
        body.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(top + plot_h + 18)}" text-anchor="middle" '
            f'font-size="10" font-family="sans-serif">{_esc(display)}</text>'
        )
    return _svg_document(width, height, body)


def fmt_p(p: float) -> str:
    """Report convention for p-values: three decimals, "<.001" below that."""
    if p < 0.001:
        return "<.001"
    return f"{p:.3f}"


@dataclass(frozen=True)
class AbilityAnalysis:
    """One ability's stats bundle as exported to the report tables."""

    ability: AbilityDimension
    outcome: AnalysisOutcome
    descriptives: dict[str, DescriptiveStats] = field(default_factory=dict)


def export_scores(scores: Sequence[AbilityScore], path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "child_id", "area", "ability", "score", "numerator",
                "denominator", "period_start", "period_end",
            ]
        )
        for s in scores:
            writer.writerow(
                [
                    s.child_id, s.area, s.ability.value, f"{s.score:.6f}",
                    s.numerator, s.denominator, s.period_start.isoformat(),
                    s.period_end.isoformat(),
                ]
            )
    return path


def export_tables(
    analyses: Sequence[AbilityAnalysis], out_dir: str | Path
) -> dict[str, Path]:
    """Write descriptive, omnibus, and post-hoc CSV tables."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "descriptives": out_dir / "descriptives.csv",
        "omnibus": out_dir / "omnibus.csv",
        "posthoc": out_dir / "posthoc.csv",
    }

    with open(paths["descriptives"], "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["area", "ability", "n", "mean", "sd", "w", "p_value", "min", "max"])
        areas: list[str] = []
        for analysis in analyses:
            for area in analysis.descriptives:
                if area not in areas:
                    areas.append(area)
        for area in areas:
            for analysis in analyses:
                d = analysis.descriptives.get(area)
                if d is None:
                    continue
                normality = analysis.outcome.normality.get(area)
                writer.writerow(
                    [
                        area,
                        analysis.ability.value,
                        d.n,
                        f"{d.mean:.3f}",
                        "" if d.sd is None else f"{d.sd:.3f}",
                        "" if normality is None else f"{normality.statistic:.3f}",
                        "" if normality is None else fmt_p(normality.p_value),
                        f"{d.min:.3f}",
                        f"{d.max:.3f}",
                    ]
                )

    with open(paths["omnibus"], "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ability", "method", "statistic", "p_value", "significant"])
        for analysis in analyses:
            omnibus = analysis.outcome.omnibus
            writer.writerow(
                [
                    analysis.ability.value,
                    omnibus.method.display_name,
                    f"{omnibus.statistic:.3f}",
                    fmt_p(omnibus.p_value),
                    "Yes" if omnibus.significant else "No",
                ]
            )

    with open(paths["posthoc"], "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "ability", "comparison", "mean_difference", "adjusted_p",
                "ci_95", "significant",
            ]
        )
        for analysis in analyses:
            comparisons = analysis.outcome.posthoc
            if not comparisons:
                writer.writerow(
                    [
                        analysis.ability.value,
                        "(omnibus non-significant, post-hoc skipped)",
                        "", "", "", "",
                    ]
                )
                continue
            for c in comparisons:
                ci = (
                    f"[{c.ci_low:.3f}, {c.ci_high:.3f}]"
                    if c.ci_low is not None and c.ci_high is not None
                    else ""
                )
                writer.writerow(
                    [
                        analysis.ability.value,
                        f"{c.group_a} vs {c.group_b}",
                        f"{c.mean_difference:.3f}",
                        fmt_p(c.adjusted_p),
                        ci,
                        "Yes" if c.significant else "No",
                    ]
                )
    return paths
