"""League charts: movement scatter and multi-occurrence overlap."""

from __future__ import annotations

from html import escape
from pathlib import Path
from typing import Iterable, Sequence

from pass_patterns.analytics import PatternCluster
from pass_patterns.errors import EmptyInput
from pass_patterns.style import blend, team_color

PLOT = 400.0
LEFT, TOP, RIGHT, BOTTOM = 56.0, 36.0, 150.0, 48.0
WIDTH = LEFT + PLOT + RIGHT
HEIGHT = TOP + PLOT + BOTTOM
GRID = "#dddddd"
INK = "#222222"


def _f(v: float) -> str:
    return f"{v:.2f}"


def _axes(title: str, x_label: str, y_label: str, x_max: float, y_max: float, ticks: int = 5) -> str:
    parts = [
        f'<rect x="{_f(LEFT)}" y="{_f(TOP)}" width="{_f(PLOT)}" height="{_f(PLOT)}" fill="#ffffff" stroke="{INK}"/>',
        f'<text x="{_f(LEFT)}" y="22.00" font-family="sans-serif" font-size="14" fill="{INK}">{escape(title)}</text>',
    ]
    for k in range(ticks + 1):
        frac = k / ticks
        gx = LEFT + frac * PLOT
        gy = TOP + PLOT - frac * PLOT
        parts.append(f'<line x1="{_f(gx)}" y1="{_f(TOP)}" x2="{_f(gx)}" y2="{_f(TOP + PLOT)}" stroke="{GRID}"/>')
        parts.append(f'<line x1="{_f(LEFT)}" y1="{_f(gy)}" x2="{_f(LEFT + PLOT)}" y2="{_f(gy)}" stroke="{GRID}"/>')
        parts.append(
            f'<text x="{_f(gx)}" y="{_f(TOP + PLOT + 16)}" font-family="sans-serif" font-size="10" '
            f'text-anchor="middle" fill="{INK}">{x_max * frac:g}</text>'
        )
        parts.append(
            f'<text x="{_f(LEFT - 6)}" y="{_f(gy + 3)}" font-family="sans-serif" font-size="10" '
            f'text-anchor="end" fill="{INK}">{y_max * frac:g}</text>'
        )
    parts.append(
        f'<text x="{_f(LEFT + PLOT / 2)}" y="{_f(HEIGHT - 12)}" font-family="sans-serif" font-size="12" '
        f'text-anchor="middle" fill="{INK}">{escape(x_label)}</text>'
    )
    parts.append(
        f'<text x="14.00" y="{_f(TOP + PLOT / 2)}" font-family="sans-serif" font-size="12" text-anchor="middle" '
        f'fill="{INK}" transform="rotate(-90 14.00 {_f(TOP + PLOT / 2)})">{escape(y_label)}</text>'
    )
    return "\n".join(parts)


def _legend(teams: Sequence[str]) -> str:
    parts = []
    for k, team in enumerate(teams):
        y = TOP + 10 + 16 * k
        parts.append(f'<circle cx="{_f(LEFT + PLOT + 16)}" cy="{_f(y)}" r="4.00" fill="{team_color(team)}"/>')
        parts.append(
            f'<text x="{_f(LEFT + PLOT + 26)}" y="{_f(y + 4)}" font-family="sans-serif" font-size="11" '
            f'fill="{INK}">{escape(team)}</text>'
        )
    return "\n".join(parts)


def _marker(x: float, y: float, x_max: float, y_max: float, color: str, label: str) -> str:
    cx = min(x_max, max(0.0, x))
    cy = min(y_max, max(0.0, y))
    cls = "marker" if (cx, cy) == (x, y) else "marker clipped"
    px = LEFT + cx / x_max * PLOT
    py = TOP + PLOT - cy / y_max * PLOT
    return (
        f'<circle class="{cls}" data-x="{_f(x)}" data-y="{_f(y)}" cx="{_f(px)}" cy="{_f(py)}" r="3.50" '
        f'fill="{color}" fill-opacity="0.75" stroke="{blend(color, INK, 0.5)}"><title>{escape(label)}</title></circle>'
    )


def _document(body: str) -> str:
    return f"""<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{_f(WIDTH)}" height="{_f(HEIGHT)}" viewBox="0 0 {_f(WIDTH)} {_f(HEIGHT)}">
<rect width="100%" height="100%" fill="#fafafa"/>
{body}
</svg>
"""


def render_spread_scatter(rows: Iterable[tuple[str, float, float]]) -> str:
    """One marker per (team, dx, dy); values outside [0, 100] sit on the border as "clipped"."""
    rows = list(rows)
    if not rows:
        raise EmptyInput("no pattern movements to plot")
    teams = sorted({team for team, _, _ in rows})
    markers = [_marker(dx, dy, 100.0, 100.0, team_color(team), team) for team, dx, dy in rows]
    body = "\n".join(
        [
            _axes("Movements during the patterns", "dx (forward progress)", "|dy| (lateral change)", 100.0, 100.0),
            *markers,
            _legend(teams),
        ]
    )
    return _document(body)


def render_overlap_chart(clusters: Iterable[PatternCluster]) -> str:
    """One marker per cluster at (occurrences, share of positions linked to all occurrences in %)."""
    clusters = list(clusters)
    if not clusters:
        raise EmptyInput("no occurrence clusters to plot")
    x_max = float(max(10, max(c.occurrences for c in clusters) + 1))
    teams = sorted({c.team_id for c in clusters})
    markers = [
        _marker(c.occurrences, 100.0 * c.overlap_fraction, x_max, 100.0, team_color(c.team_id), c.cluster_id)
        for c in clusters
    ]
    body = "\n".join(
        [
            _axes("Patterns with multiple occurrences", "occurrences", "overlap (%)", x_max, 100.0),
            *markers,
            _legend(teams),
        ]
    )
    return _document(body)


def write_chart_files(output_dir: Path, spreads: Iterable[tuple[str, float, float]], clusters: Iterable[PatternCluster]) -> list[str]:
    """Write spreads.svg and overlaps.svg; returns step log lines."""
    output_dir.mkdir(parents=True, exist_ok=True)
    log = []
    for name, render, data in (
        ("spreads.svg", render_spread_scatter, spreads),
        ("overlaps.svg", render_overlap_chart, clusters),
    ):
        try:
            (output_dir / name).write_text(render(data), encoding="utf-8")
            log.append(f"[OK] {name}")
        except EmptyInput as exc:
            log.append(f"[SKIP] {name}: {exc}")
    return log
