"""Colors for pitch drawings and charts."""

from __future__ import annotations

import colorsys
import hashlib
from dataclasses import dataclass

from pass_patterns.preprocess import FieldSpec


def hex_to_rgb(h: str) -> tuple[int, int, int]:
    h = h.lstrip("#")
    return (int(h[0:2], 16), int(h[2:4], 16), int(h[4:6], 16))


def rgb_to_hex(r: float, g: float, b: float) -> str:
    return f"#{max(0, min(255, int(r))):02x}{max(0, min(255, int(g))):02x}{max(0, min(255, int(b))):02x}"


def rgb_to_hsl(r: int, g: int, b: int) -> tuple[float, float, float]:
    h, l, s = colorsys.rgb_to_hls(r / 255, g / 255, b / 255)
    return (h * 360, s * 100, l * 100)


def hsl_to_hex(h: float, s: float, l: float) -> str:
    r, g, b = colorsys.hls_to_rgb(h / 360, l / 100, s / 100)
    return rgb_to_hex(r * 255, g * 255, b * 255)


def hex_to_hsl(hexc: str) -> tuple[float, float, float]:
    return rgb_to_hsl(*hex_to_rgb(hexc))


def darken(hexc: str, amount: float) -> str:
    h, s, l = hex_to_hsl(hexc)
    return hsl_to_hex(h, s, max(0, l - amount))


def blend(hex1: str, hex2: str, factor: float) -> str:
    r1, g1, b1 = hex_to_rgb(hex1)
    r2, g2, b2 = hex_to_rgb(hex2)
    return rgb_to_hex(r1 + (r2 - r1) * factor, g1 + (g2 - g1) * factor, b1 + (b2 - b1) * factor)


def team_color(team_id: str) -> str:
    """Stable per-team marker color; the hue comes from a hash of the team id."""
    digest = hashlib.sha256(team_id.encode()).digest()
    hue = int.from_bytes(digest[:2], "big") % 360
    return hsl_to_hex(hue, 60, 45)


@dataclass(frozen=True)
class PitchStyle:
    field: FieldSpec = FieldSpec()
    # pixels per meter
    scale: float = 6.0
    margin_m: float = 3.0
    grass: str = "#2e7d4f"
    lines: str = "#f2f2f2"
    background: str = "#9e9e9e"
    pattern: str = "#1e88e5"
    pre: str = "#43a047"
    post: str = "#e53935"
    original_marker: str = "triangle"
    virtual_marker: str = "circle"
    marker_r: float = 0.9

    def __post_init__(self) -> None:
        roles = {"background": self.background, "pattern": self.pattern, "pre": self.pre, "post": self.post}
        if len({c.lower() for c in roles.values()}) != len(roles):
            raise ValueError(f"pitch colors must be distinct, got {roles}")
        if self.original_marker == self.virtual_marker:
            raise ValueError("original and virtual points need different marker shapes")

    @property
    def panel_width(self) -> float:
        return (self.field.length_m + 2 * self.margin_m) * self.scale

    @property
    def panel_height(self) -> float:
        return (self.field.width_m + 2 * self.margin_m) * self.scale

    def to_px(self, x: float, y: float) -> tuple[float, float]:
        """Normalized (x, y) to panel pixels; y grows upward on the pitch."""
        px = (self.margin_m + x * self.field.length_m / 100.0) * self.scale
        py = (self.margin_m + (100.0 - y) * self.field.width_m / 100.0) * self.scale
        return px, py

    def color_for(self, role: str) -> str:
        return {"background": self.background, "pattern": self.pattern, "pre": self.pre, "post": self.post}[role]
