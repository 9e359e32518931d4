"""Pitch drawings of single matches: reference and found possession side by side."""

from __future__ import annotations

from html import escape
from pathlib import Path
from typing import Mapping

from PIL import Image, ImageDraw

from pass_patterns.discovery.model import DiscoveryResult, PatternMatch, Segment, team_dir
from pass_patterns.errors import MissingArtifact
from pass_patterns.preprocess import DensifiedSequence
from pass_patterns.style import PitchStyle, darken, hex_to_rgb

YARD = 0.9144
PANEL_GAP = 20.0
TITLE_H = 28.0


def _f(v: float) -> str:
    return f"{v:.2f}"


def point_roles(seq: DensifiedSequence, seg: Segment) -> list[str]:
    """Role of every point: pattern inside the segment, pre/post out to the nearest original endpoint."""
    roles = ["background"] * len(seq)
    for idx in range(seg.start_idx, seg.end_idx + 1):
        roles[idx] = "pattern"
    idx = seg.start_idx - 1
    while idx >= 0:
        roles[idx] = "pre"
        if seq.points[idx].is_original:
            break
        idx -= 1
    idx = seg.end_idx + 1
    while idx < len(seq):
        roles[idx] = "post"
        if seq.points[idx].is_original:
            break
        idx += 1
    return roles


def _resolve(seqs: Mapping[str, DensifiedSequence], seg: Segment) -> DensifiedSequence:
    try:
        seq = seqs[seg.seq_id]
    except KeyError:
        raise MissingArtifact(f"sequence {seg.seq_id} is not in the prepared sequences") from None
    if seg.end_idx >= len(seq):
        raise MissingArtifact(f"sequence {seg.seq_id} has {len(seq)} points, segment ends at {seg.end_idx}")
    return seq


# ── SVG ───────────────────────────────────────────────────────────────────────


def generate_pitch_lines(style: PitchStyle, ox: float, oy: float) -> str:
    """Touchlines, halfway line, centre circle, penalty and goal areas in meters."""
    s, m = style.scale, style.margin_m
    length, width = style.field.length_m, style.field.width_m
    x0, y0 = ox + m * s, oy + m * s
    mid_y = y0 + width / 2 * s
    area_w, area_l = 44 * YARD, 18 * YARD
    box_w, box_l = 20 * YARD, 6 * YARD
    circle_r = 10 * YARD

    parts = [
        f'<rect x="{_f(ox)}" y="{_f(oy)}" width="{_f(style.panel_width)}" height="{_f(style.panel_height)}" fill="{style.grass}"/>',
        f'<g fill="none" stroke="{style.lines}" stroke-width="1.50">',
        f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(length * s)}" height="{_f(width * s)}"/>',
        f'<line x1="{_f(x0 + length / 2 * s)}" y1="{_f(y0)}" x2="{_f(x0 + length / 2 * s)}" y2="{_f(y0 + width * s)}"/>',
        f'<circle cx="{_f(x0 + length / 2 * s)}" cy="{_f(mid_y)}" r="{_f(circle_r * s)}"/>',
    ]
    for left in (True, False):
        for depth, span in ((area_l, area_w), (box_l, box_w)):
            bx = x0 if left else x0 + (length - depth) * s
            parts.append(
                f'<rect x="{_f(bx)}" y="{_f(mid_y - span / 2 * s)}" width="{_f(depth * s)}" height="{_f(span * s)}"/>'
            )
    parts.append("</g>")
    return "\n".join(parts)


def _marker(style: PitchStyle, px: float, py: float, role: str, original: bool) -> str:
    color = style.color_for(role)
    r = style.marker_r * style.scale
    if original:
        pts = f"{_f(px)},{_f(py - r * 1.3)} {_f(px - r * 1.15)},{_f(py + r * 0.7)} {_f(px + r * 1.15)},{_f(py + r * 0.7)}"
        return f'<polygon class="{role}" points="{pts}" fill="{color}" stroke="{darken(color, 20)}"/>'
    return f'<circle class="{role}" cx="{_f(px)}" cy="{_f(py)}" r="{_f(r)}" fill="{color}" stroke="{darken(color, 20)}"/>'


def generate_panel(seq: DensifiedSequence, seg: Segment, style: PitchStyle, ox: float, oy: float, label: str) -> str:
    roles = point_roles(seq, seg)
    pixels = [style.to_px(p.x, p.y) for p in seq.points]
    track = " ".join(f"{_f(px + ox)},{_f(py + oy)}" for px, py in pixels)
    parts = [
        generate_pitch_lines(style, ox, oy),
        f'<polyline class="track" points="{track}" fill="none" stroke="{style.background}" stroke-width="1.00"/>',
    ]
    # background first so the pattern is drawn on top
    for wanted in ("background", "pre", "post", "pattern"):
        for (px, py), role, p in zip(pixels, roles, seq.points):
            if role == wanted:
                parts.append(_marker(style, px + ox, py + oy, role, p.is_original))
    parts.append(
        f'<text x="{_f(ox + 4)}" y="{_f(oy + style.panel_height + 16)}" font-family="sans-serif" '
        f'font-size="12" fill="#222222">{label} {escape(seg.seq_id)} [{seg.start_idx}, {seg.end_idx}]</text>'
    )
    return "\n".join(parts)


def render_match(match: PatternMatch, seqs: Mapping[str, DensifiedSequence], style: PitchStyle | None = None) -> str:
    """SVG document with the reference panel on the left and the found panel on the right."""
    style = style or PitchStyle()
    ref_seq = _resolve(seqs, match.reference)
    found_seq = _resolve(seqs, match.found)
    width = 2 * style.panel_width + PANEL_GAP
    height = TITLE_H + style.panel_height + 24
    title = (
        f"{escape(match.team_id)}: {len(match.reference)} + {len(match.found)} positions, "
        f"mean distance {match.mean_distance:.3f}, {match.n_outliers} skipped"
    )
    return f"""<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" height="{_f(height)}" viewBox="0 0 {_f(width)} {_f(height)}">
<title>{match.match_id}</title>
<rect width="100%" height="100%" fill="#ffffff"/>
<text x="4.00" y="18.00" font-family="sans-serif" font-size="14" fill="#222222">{title}</text>
{generate_panel(ref_seq, match.reference, style, 0.0, TITLE_H, "reference")}
{generate_panel(found_seq, match.found, style, style.panel_width + PANEL_GAP, TITLE_H, "found")}
</svg>
"""


# ── Raster preview ────────────────────────────────────────────────────────────


def render_match_png(
    match: PatternMatch, seqs: Mapping[str, DensifiedSequence], style: PitchStyle | None = None
) -> Image.Image:
    style = style or PitchStyle()
    width = int(round(2 * style.panel_width + PANEL_GAP))
    height = int(round(style.panel_height))
    img = Image.new("RGB", (width, height), "#ffffff")
    draw = ImageDraw.Draw(img)
    r = style.marker_r * style.scale

    for seg, ox in ((match.reference, 0.0), (match.found, style.panel_width + PANEL_GAP)):
        seq = _resolve(seqs, seg)
        s, m = style.scale, style.margin_m
        draw.rectangle((ox, 0, ox + style.panel_width, style.panel_height), fill=hex_to_rgb(style.grass))
        draw.rectangle(
            (ox + m * s, m * s, ox + (m + style.field.length_m) * s, (m + style.field.width_m) * s),
            outline=hex_to_rgb(style.lines),
            width=2,
        )
        pixels = [style.to_px(p.x, p.y) for p in seq.points]
        draw.line([(px + ox, py) for px, py in pixels], fill=hex_to_rgb(style.background), width=1)
        roles = point_roles(seq, seg)
        for wanted in ("background", "pre", "post", "pattern"):
            for (px, py), role, p in zip(pixels, roles, seq.points):
                if role != wanted:
                    continue
                fill = hex_to_rgb(style.color_for(role))
                cx = px + ox
                if p.is_original:
                    draw.polygon([(cx, py - r * 1.3), (cx - r * 1.15, py + r * 0.7), (cx + r * 1.15, py + r * 0.7)], fill=fill)
                else:
                    draw.ellipse((cx - r, py - r, cx + r, py + r), fill=fill)
    return img


def write_match_files(
    output_dir: Path,
    result: DiscoveryResult,
    seqs: Mapping[str, DensifiedSequence],
    style: PitchStyle | None = None,
    png: bool = False,
) -> list[Path]:
    """One SVG per match under <output_dir>/teams/<team>/matches/, replacing earlier drawings; returns the written paths."""
    style = style or PitchStyle()
    match_dir = team_dir(output_dir, result.team_id) / "matches"
    match_dir.mkdir(parents=True, exist_ok=True)
    for old in sorted([*match_dir.glob("*.svg"), *match_dir.glob("*.png")]):
        old.unlink()
    written = []
    for match in result.matches:
        path = match_dir / f"{match.match_id}.svg"
        path.write_text(render_match(match, seqs, style), encoding="utf-8")
        written.append(path)
        if png:
            render_match_png(match, seqs, style).save(match_dir / f"{match.match_id}.png")
    return written
