"""Cell coloring and plot rendering (PNG and SVG).

Layout: the 256x256 cell matrix is drawn at `scale` pixels per cell with a
left and bottom margin for axis ticks and hex labels, so the image is
(margin + 256*scale + legend) wide and (256*scale + margin) tall.  y grows
upward: cell (x, y) sits at column x, row 255 - y of the plot area.  An
optional title adds a strip above the plot.  Axis ticks sit at multiples of
16 with 0x00..0xF0 labels.

Coloring is deterministic by construction: categorical palette indices come
from a fixed scan order, responder hues hash the responder key with
FNV-1a-64, and the PNG bytes come from the fixed encoder in pngio.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple
from xml.sax.saxutils import escape

import numpy as np

from .font5x7 import ADVANCE, FONT_H, glyph, text_width
from .grid import GRID_SIDE, ByteAxisGrid
from .pngio import write_png

RGB = tuple[int, int, int]

MONOCHROME = "monochrome"
CATEGORICAL = "categorical"
RESPONDER = "responder"

# 17 evenly spaced hues (360*i/17 degrees) at s=0.80, v=0.90; enough for the
# busiest model breakdowns seen in practice while staying far from black.
DEFAULT_PALETTE: tuple[RGB, ...] = (
    (230, 46, 46), (230, 111, 46), (230, 176, 46), (219, 230, 46),
    (154, 230, 46), (89, 230, 46), (46, 230, 67), (46, 230, 132),
    (46, 230, 197), (46, 197, 230), (46, 132, 230), (46, 67, 230),
    (89, 46, 230), (154, 46, 230), (219, 46, 230), (230, 46, 176),
    (230, 46, 111),
)

_MASK64 = 0xFFFFFFFFFFFFFFFF
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

_TITLE_H = 16


def fnv1a_64(data: bytes) -> int:
    """FNV-1a 64-bit hash with the published offset/prime constants."""
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


def hsv_to_rgb(h: float, s: float, v: float) -> RGB:
    """Standard sector HSV->RGB conversion, channels rounded to 0..255."""
    c = v * s
    hp = h / 60.0
    x = c * (1.0 - abs(hp % 2.0 - 1.0))
    r1, g1, b1 = (
        (c, x, 0.0), (x, c, 0.0), (0.0, c, x),
        (0.0, x, c), (x, 0.0, c), (c, 0.0, x),
    )[int(hp) % 6]
    m = v - c
    return (round((r1 + m) * 255), round((g1 + m) * 255), round((b1 + m) * 255))


def responder_color(key: str, hue_seed: int = 0) -> RGB:
    """Deterministic hue for a responder key; never close to black.

    hue = (FNV-1a-64(key) XOR hue_seed) mod 360, rendered at s=0.80 v=0.90,
    so the largest channel is always 230.
    """
    if not key:
        raise ValueError("responder key must be non-empty")
    hue = (fnv1a_64(key.encode("utf-8")) ^ (hue_seed & _MASK64)) % 360
    return hsv_to_rgb(float(hue), 0.80, 0.90)


@dataclass(frozen=True, slots=True)
class ColorMode:
    """How occupied cells get their colors.

    monochrome paints every occupied cell `foreground`; categorical colors
    by majority label through `palette`; responder hashes the cell's
    representative responder key (smallest, lexicographically) with
    `hue_seed`.  Cells lacking the data a mode needs (no label, no
    responder) fall back to `foreground`.
    """

    kind: str
    foreground: RGB = (255, 0, 0)
    palette: tuple[RGB, ...] = DEFAULT_PALETTE
    hue_seed: int = 0

    def __post_init__(self):
        if self.kind not in (MONOCHROME, CATEGORICAL, RESPONDER):
            raise ValueError(f"unknown color mode {self.kind!r}")
        object.__setattr__(self, "palette", tuple(tuple(c) for c in self.palette))
        if self.kind == CATEGORICAL and not self.palette:
            raise ValueError("categorical mode needs a non-empty palette")

    @classmethod
    def monochrome(cls, foreground: RGB = (255, 0, 0)) -> "ColorMode":
        return cls(MONOCHROME, foreground=foreground)

    @classmethod
    def categorical(cls, palette: tuple[RGB, ...] = DEFAULT_PALETTE) -> "ColorMode":
        return cls(CATEGORICAL, palette=palette)

    @classmethod
    def responder(cls, hue_seed: int = 0) -> "ColorMode":
        return cls(RESPONDER, hue_seed=hue_seed)


@dataclass(frozen=True, slots=True)
class RenderConfig:
    """Geometry and style knobs shared by the PNG and SVG renderers."""

    background: RGB = (0, 0, 0)
    scale: int = 3
    tick_every: int = 16
    margin: int = 48
    legend: bool = False
    title: str | None = None
    y_orientation: str = "up"

    def __post_init__(self):
        if self.scale < 1:
            raise ValueError(f"scale must be >= 1, got {self.scale}")
        if self.tick_every < 1 or GRID_SIDE % self.tick_every:
            raise ValueError(f"tick spacing must divide 256, got {self.tick_every}")
        if self.margin < 0:
            raise ValueError(f"margin must be >= 0, got {self.margin}")
        if self.y_orientation != "up":
            raise ValueError("y_orientation must be 'up'")
        object.__setattr__(self, "background", tuple(self.background))


@dataclass(slots=True)
class ColorAssignment:
    """Per-cell colors for occupied cells plus legend entries.

    colors is keyed (y, x); legend is (key text, RGB) in palette-index
    order and is non-empty only for categorical mode.
    """

    colors: dict[tuple[int, int], RGB] = field(default_factory=dict)
    legend: list[tuple[str, RGB]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def assign_colors(grid: ByteAxisGrid, mode: ColorMode) -> ColorAssignment:
    """Color every occupied cell of grid according to mode.

    Categorical palette indices follow first appearance in a row-major cell
    scan (labels within a cell visited in sorted order), so the result does
    not depend on observation order.  A cell's color is its majority
    label's, ties broken by the lexicographically smallest label.  More
    labels than palette entries cycle the palette and record a warning.
    """
    occupied = grid.occupied()
    out = ColorAssignment()
    if mode.kind == MONOCHROME:
        for yx in occupied:
            out.colors[yx] = mode.foreground
        return out
    if mode.kind == CATEGORICAL:
        index: dict[str, int] = {}
        for yx in occupied:
            for label in sorted(grid.labels.get(yx, ())):
                if label not in index:
                    index[label] = len(index)
        palette = mode.palette
        if len(index) > len(palette):
            out.warnings.append(
                f"{len(index)} labels exceed the {len(palette)}-color palette; colors cycle"
            )
        out.legend = [(label, palette[i % len(palette)]) for label, i in index.items()]
        for yx in occupied:
            labels = grid.labels.get(yx)
            if not labels:
                out.colors[yx] = mode.foreground
                continue
            top = max(labels.values())
            winner = min(lab for lab, n in labels.items() if n == top)
            out.colors[yx] = palette[index[winner] % len(palette)]
        return out
    for yx in occupied:
        responders = grid.responders.get(yx)
        if responders:
            out.colors[yx] = responder_color(min(responders), mode.hue_seed)
        else:
            out.colors[yx] = mode.foreground
    return out


class _Layout(NamedTuple):
    width: int
    height: int
    x0: int  # plot area left
    y0: int  # plot area top
    plot: int  # plot area side in px
    axis: RGB
    entries: list[tuple[str, RGB]]
    legend_x: int


def _plan(grid: ByteAxisGrid, colors: ColorAssignment, cfg: RenderConfig) -> _Layout:
    occupied = set(grid.occupied())
    assigned = set(colors.colors)
    if assigned != occupied:
        raise ValueError("color assignment does not cover exactly the occupied cells")
    for yx, rgb in colors.colors.items():
        if tuple(rgb) == cfg.background:
            raise ValueError(f"cell {yx} is assigned the background color {rgb}")
    plot = GRID_SIDE * cfg.scale
    title_h = _TITLE_H if cfg.title else 0
    entries = list(colors.legend) if (cfg.legend and colors.legend) else []
    legend_w = 0
    if entries:
        legend_w = 8 + 10 + 4 + max(text_width(k) for k, _ in entries) + 8
    width = cfg.margin + plot + legend_w
    height = title_h + plot + cfg.margin
    lum = 0.299 * cfg.background[0] + 0.587 * cfg.background[1] + 0.114 * cfg.background[2]
    axis = (255, 255, 255) if lum < 128 else (0, 0, 0)
    return _Layout(width, height, cfg.margin, title_h, plot, axis, entries, cfg.margin + plot + 8)


def _fill(canvas: np.ndarray, x: int, y: int, w: int, h: int, color: RGB) -> None:
    height, width = canvas.shape[:2]
    x1, y1 = max(x, 0), max(y, 0)
    x2, y2 = min(x + w, width), min(y + h, height)
    if x1 < x2 and y1 < y2:
        canvas[y1:y2, x1:x2] = color


def _text(canvas: np.ndarray, x: int, y: int, text: str, color: RGB) -> None:
    height, width = canvas.shape[:2]
    for ch in text:
        rows = glyph(ch)
        for dy, row in enumerate(rows):
            py = y + dy
            if not 0 <= py < height:
                continue
            for dx, bit in enumerate(row):
                px = x + dx
                if bit == "#" and 0 <= px < width:
                    canvas[py, px] = color
        x += ADVANCE


def _tick_label(value: int) -> str:
    return f"0x{value:02X}"


def render_png(grid: ByteAxisGrid, colors: ColorAssignment, cfg: RenderConfig) -> bytes:
    """Render the plot as deterministic PNG bytes."""
    lay = _plan(grid, colors, cfg)
    s = cfg.scale
    canvas = np.empty((lay.height, lay.width, 3), dtype=np.uint8)
    canvas[:] = cfg.background

    cells = np.empty((GRID_SIDE, GRID_SIDE, 3), dtype=np.uint8)
    cells[:] = cfg.background
    for (y, x), rgb in colors.colors.items():
        cells[255 - y, x] = rgb
    plot_img = cells.repeat(s, axis=0).repeat(s, axis=1)
    canvas[lay.y0 : lay.y0 + lay.plot, lay.x0 : lay.x0 + lay.plot] = plot_img

    if cfg.margin >= 1:
        _fill(canvas, lay.x0 - 1, lay.y0, 1, lay.plot + 1, lay.axis)  # y axis
        _fill(canvas, lay.x0 - 1, lay.y0 + lay.plot, lay.plot + 1, 1, lay.axis)  # x axis
        for v in range(0, GRID_SIDE, cfg.tick_every):
            tx = lay.x0 + v * s
            _fill(canvas, tx, lay.y0 + lay.plot + 1, 1, 3, lay.axis)
            label = _tick_label(v)
            _text(canvas, tx - text_width(label) // 2, lay.y0 + lay.plot + 6, label, lay.axis)
            ty = lay.y0 + (GRID_SIDE - v) * s - 1
            _fill(canvas, lay.x0 - 4, ty, 3, 1, lay.axis)
            _text(canvas, lay.x0 - 6 - text_width(label), ty - FONT_H // 2, label, lay.axis)

    for i, (key, rgb) in enumerate(lay.entries):
        ey = lay.y0 + 8 + i * 16
        if ey + 10 > lay.y0 + lay.plot:
            break
        _fill(canvas, lay.legend_x, ey, 10, 10, rgb)
        _text(canvas, lay.legend_x + 14, ey + 1, key, lay.axis)

    if cfg.title:
        _text(canvas, lay.x0, 4, cfg.title, lay.axis)

    return write_png(canvas)


def _hex(color: RGB) -> str:
    return "#{:02x}{:02x}{:02x}".format(*color)


def render_svg(grid: ByteAxisGrid, colors: ColorAssignment, cfg: RenderConfig) -> str:
    """Render the plot as SVG 1.1 text with the same geometry as the PNG."""
    lay = _plan(grid, colors, cfg)
    s = cfg.scale
    axis = _hex(lay.axis)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{lay.width}" height="{lay.height}">',
        f'<rect class="background" x="0" y="0" width="{lay.width}" '
        f'height="{lay.height}" fill="{_hex(cfg.background)}"/>',
    ]
    for (y, x) in sorted(colors.colors):
        rgb = colors.colors[(y, x)]
        px = lay.x0 + x * s
        py = lay.y0 + (255 - y) * s
        parts.append(
            f'<rect class="cell" x="{px}" y="{py}" width="{s}" height="{s}" '
            f'fill="{_hex(rgb)}"/>'
        )
    if cfg.margin >= 1:
        bottom = lay.y0 + lay.plot
        parts.append(
            f'<line x1="{lay.x0 - 1}" y1="{lay.y0}" x2="{lay.x0 - 1}" '
            f'y2="{bottom}" stroke="{axis}" stroke-width="1"/>'
        )
        parts.append(
            f'<line x1="{lay.x0 - 1}" y1="{bottom}" x2="{lay.x0 + lay.plot - 1}" '
            f'y2="{bottom}" stroke="{axis}" stroke-width="1"/>'
        )
        for v in range(0, GRID_SIDE, cfg.tick_every):
            label = _tick_label(v)
            tx = lay.x0 + v * s
            parts.append(
                f'<line x1="{tx}" y1="{bottom + 1}" x2="{tx}" y2="{bottom + 4}" '
                f'stroke="{axis}" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{tx}" y="{bottom + 13}" fill="{axis}" '
                f'font-family="monospace" font-size="10" text-anchor="middle">{label}</text>'
            )
            ty = lay.y0 + (GRID_SIDE - v) * s - 1
            parts.append(
                f'<line x1="{lay.x0 - 4}" y1="{ty}" x2="{lay.x0 - 2}" y2="{ty}" '
                f'stroke="{axis}" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{lay.x0 - 6}" y="{ty + 4}" fill="{axis}" '
                f'font-family="monospace" font-size="10" text-anchor="end">{label}</text>'
            )
    for i, (key, rgb) in enumerate(lay.entries):
        ey = lay.y0 + 8 + i * 16
        if ey + 10 > lay.y0 + lay.plot:
            break
        parts.append(
            f'<rect class="swatch" x="{lay.legend_x}" y="{ey}" width="10" height="10" '
            f'fill="{_hex(rgb)}"/>'
        )
        parts.append(
            f'<text x="{lay.legend_x + 14}" y="{ey + 9}" fill="{axis}" '
            f'font-family="monospace" font-size="10">{escape(key)}</text>'
        )
    if cfg.title:
        parts.append(
            f'<text x="{lay.x0}" y="12" fill="{axis}" font-family="monospace" '
            f'font-size="12">{escape(cfg.title)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
