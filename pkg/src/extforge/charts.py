"""Chart renderers: plain-text grids, TSV tables, and deterministic SVG.

A chart is anything with ``dims`` (bidegree -> dimension), optional
``labels`` (bidegree -> class names) and optional ``products`` (name ->
bidegree -> GF(2) matrix); the engine's ExtChart qualifies, and so does
the tiny holder :func:`parse_tsv` returns.

Glyphs follow the cell-based marker scheme: solid dots for classes the
0-cell carries, open circles for the 1-cell, solid and open triangles
for the 17- and 18-cells of the larger cone object, boxes for classes
that support towers, crosses for the classes a tower inherits above its
root.  Cell membership is read from the ``[cell]`` tag the engine puts
in class labels; tower roots and members are extra inputs on the style,
since towers are a statement about products rather than about a single
bidegree.

The SVG renderer is hand-rolled string assembly on purpose: golden-file
tests require byte-identical output across runs and platforms, so there
are no timestamps, no dict-order dependence, and all coordinates are
formatted with a fixed number of decimals.  A PNG renderer through
matplotlib is provided for report output; it is a convenience view and
carries no byte-stability promise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .resolution import NAMED_CLASS_BIDEGREES

_DEFAULT_CELL_GLYPHS: tuple[tuple[str, str], ...] = (
    ("0", "solid-dot"),
    ("1", "open-circle"),
    ("17", "solid-triangle"),
    ("18", "open-triangle"),
)


@dataclass(frozen=True)
class ChartStyle:
    """Marker rules, axis ranges, and product-line toggles."""

    unit: int = 18
    margin: int = 36
    cell_glyphs: tuple[tuple[str, str], ...] = _DEFAULT_CELL_GLYPHS
    default_glyph: str = "solid-dot"
    tower_roots: frozenset = frozenset()
    tower_classes: frozenset = frozenset()
    product_lines: tuple[str, ...] = ("h0", "h1", "h2")
    stem_range: Optional[tuple[int, int]] = None
    max_filt: Optional[int] = None

    def glyph_for(self, spot: tuple[int, int], label: str) -> str:
        """The unique glyph of one class: tower rules first, then cell tag."""
        s, t = spot
        if (s, t) in self.tower_roots:
            return "tower-box"
        if (s, t) in self.tower_classes:
            return "tower-cross"
        m = re.search(r"\[([^\]]+)\]$", label)
        if m:
            for cell, glyph in self.cell_glyphs:
                if m.group(1) == cell:
                    return glyph
            return self.default_glyph
        return self.default_glyph


@dataclass
class TsvChart:
    """Minimal chart holder produced by parse_tsv; enough to re-render."""

    dims: dict[tuple[int, int], int] = field(default_factory=dict)
    labels: dict[tuple[int, int], tuple[str, ...]] = field(default_factory=dict)
    products: dict = field(default_factory=dict)


TSV_HEADER = "stem\tfiltration\tdim\tlabels"


def render_tsv(chart) -> str:
    """Tab-separated rows (stem, filtration, dim, labels), sorted, lossless."""
    labels = getattr(chart, "labels", {}) or {}
    rows = [TSV_HEADER]
    spots = sorted(((t - s, s, (s, t)) for (s, t) in chart.dims), key=lambda r: (r[0], r[1]))
    for stem, s, key in spots:
        dim = chart.dims[key]
        if not dim:
            continue
        names = ";".join(labels.get(key, ()))
        rows.append(f"{stem}\t{s}\t{dim}\t{names}")
    return "\n".join(rows) + "\n"


def parse_tsv(text: str) -> TsvChart:
    """Inverse of render_tsv on the dims (and labels) it wrote."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != TSV_HEADER:
        raise ValueError("not a chart TSV: missing header")
    out = TsvChart()
    for ln in lines[1:]:
        parts = ln.split("\t")
        if len(parts) != 4:
            raise ValueError(f"malformed TSV row: {ln!r}")
        stem, s, dim = int(parts[0]), int(parts[1]), int(parts[2])
        key = (s, stem + s)
        out.dims[key] = dim
        if parts[3]:
            out.labels[key] = tuple(parts[3].split(";"))
    return out


def render_text(chart, max_stem: Optional[int] = None, max_filt: Optional[int] = None) -> str:
    """ASCII grid, filtration upward, one digit per bidegree ('+' past 9)."""
    if not chart.dims:
        return "(empty chart)\n"
    stems = [t - s for (s, t) in chart.dims]
    filts = [s for (s, t) in chart.dims]
    hi_stem = min(max(stems), max_stem) if max_stem is not None else max(stems)
    hi_filt = min(max(filts), max_filt) if max_filt is not None else max(filts)
    lo_stem = min(0, min(stems))
    grid = {}
    for (s, t), d in chart.dims.items():
        if lo_stem <= t - s <= hi_stem and s <= hi_filt:
            grid[(t - s, s)] = d
    lines = []
    for s in range(hi_filt, -1, -1):
        row = [f"{s:3d} |"]
        for stem in range(lo_stem, hi_stem + 1):
            d = grid.get((stem, s), 0)
            row.append("." if d == 0 else (str(d) if d < 10 else "+"))
        lines.append(" ".join(row))
    axis = ["    +" + "-" * (2 * (hi_stem - lo_stem + 1))]
    tick = ["     "]
    for stem in range(lo_stem, hi_stem + 1):
        tick.append(f"{stem:2d}"[-2:] if stem % 5 == 0 else "  ")
    lines.extend(axis + ["".join(tick)])
    return "\n".join(lines) + "\n"


_SVG_STYLE = (
    "<style>\n"
    "  .axis { stroke: #222; stroke-width: 1; }\n"
    "  .tick { font: 10px sans-serif; fill: #222; }\n"
    "  .solid-dot { fill: #000; stroke: none; }\n"
    "  .open-circle { fill: #fff; stroke: #000; stroke-width: 1.2; }\n"
    "  .solid-triangle { fill: #000; stroke: none; }\n"
    "  .open-triangle { fill: #fff; stroke: #000; stroke-width: 1.2; }\n"
    "  .tower-box { fill: #fff; stroke: #000; stroke-width: 1.2; }\n"
    "  .tower-cross { fill: none; stroke: #000; stroke-width: 1.2; }\n"
    "  .h0-line { stroke: #000; stroke-width: 0.8; }\n"
    "  .h1-line { stroke: #555; stroke-width: 0.8; }\n"
    "  .h2-line { stroke: #999; stroke-width: 0.8; }\n"
    "</style>\n"
)


def _offsets(k: int, unit: int) -> list[float]:
    if k <= 1:
        return [0.0]
    step = min(6.0, 0.8 * unit / (k - 1))
    return [(i - (k - 1) / 2) * step for i in range(k)]


def _glyph_element(glyph: str, x: float, y: float, r: float, title: str) -> str:
    inner = f"<title>{title}</title>"
    if glyph == "solid-dot":
        return f'<circle class="solid-dot" cx="{x:.1f}" cy="{y:.1f}" r="{r:.1f}">{inner}</circle>'
    if glyph == "open-circle":
        return f'<circle class="open-circle" cx="{x:.1f}" cy="{y:.1f}" r="{r:.1f}">{inner}</circle>'
    if glyph in ("solid-triangle", "open-triangle"):
        pts = f"{x:.1f},{y - r:.1f} {x - r:.1f},{y + r:.1f} {x + r:.1f},{y + r:.1f}"
        return f'<polygon class="{glyph}" points="{pts}">{inner}</polygon>'
    if glyph == "tower-box":
        side = 2 * r
        return (
            f'<rect class="tower-box" x="{x - r:.1f}" y="{y - r:.1f}" '
            f'width="{side:.1f}" height="{side:.1f}">{inner}</rect>'
        )
    if glyph == "tower-cross":
        return (
            f'<path class="tower-cross" d="M {x - r:.1f} {y - r:.1f} L {x + r:.1f} {y + r:.1f} '
            f'M {x - r:.1f} {y + r:.1f} L {x + r:.1f} {y - r:.1f}">{inner}</path>'
        )
    raise ValueError(f"unknown glyph {glyph!r}")


def render_svg(chart, style: Optional[ChartStyle] = None) -> str:
    """Deterministic SVG document: one group per bidegree, product lines under glyphs."""
    style = style or ChartStyle()
    labels = getattr(chart, "labels", {}) or {}
    products = getattr(chart, "products", {}) or {}
    spots = {
        (s, t): d
        for (s, t), d in chart.dims.items()
        if d
        and (style.stem_range is None or style.stem_range[0] <= t - s <= style.stem_range[1])
        and (style.max_filt is None or s <= style.max_filt)
    }
    if spots:
        lo_stem = min(t - s for (s, t) in spots)
        hi_stem = max(t - s for (s, t) in spots)
        hi_filt = max(s for (s, t) in spots)
    else:
        lo_stem, hi_stem, hi_filt = 0, 0, 0
    if style.stem_range is not None:
        lo_stem, hi_stem = style.stem_range
    lo_stem = min(lo_stem, 0)
    unit, margin = style.unit, style.margin
    width = 2 * margin + (hi_stem - lo_stem) * unit
    height = 2 * margin + hi_filt * unit

    def x_of(stem: int) -> float:
        return margin + (stem - lo_stem) * unit

    def y_of(s: int) -> float:
        return height - margin - s * unit

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>\n',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n',
        _SVG_STYLE,
        f'<line class="axis" x1="{margin}" y1="{height - margin}" x2="{width - margin + 10}" '
        f'y2="{height - margin}"/>\n',
        f'<line class="axis" x1="{margin}" y1="{height - margin}" x2="{margin}" y2="{margin - 10}"/>\n',
    ]
    for stem in range(lo_stem, hi_stem + 1):
        if stem % 5 == 0:
            out.append(
                f'<text class="tick" x="{x_of(stem):.1f}" y="{height - margin + 14:.1f}" '
                f'text-anchor="middle">{stem}</text>\n'
            )
    for s in range(0, hi_filt + 1):
        if s % 5 == 0:
            out.append(
                f'<text class="tick" x="{margin - 8:.1f}" y="{y_of(s) + 3:.1f}" '
                f'text-anchor="end">{s}</text>\n'
            )

    # product lines go under the glyphs
    offset_of: dict[tuple[int, int], list[float]] = {
        key: _offsets(d, unit) for key, d in spots.items()
    }
    for name in style.product_lines:
        table = products.get(name)
        if not table:
            continue
        bidegree = NAMED_CLASS_BIDEGREES.get(name)
        if bidegree is None:
            continue
        ds, dt = bidegree
        for (s, t) in sorted(table):
            src = (s, t)
            tgt = (s + ds, t + dt)
            if src not in spots or tgt not in spots:
                continue
            mat = table[(s, t)]
            for i in range(mat.cols):
                for j in range(mat.rows):
                    if mat.get(j, i):
                        x1 = x_of(t - s) + offset_of[src][min(i, len(offset_of[src]) - 1)]
                        x2 = x_of(tgt[1] - tgt[0]) + offset_of[tgt][min(j, len(offset_of[tgt]) - 1)]
                        out.append(
                            f'<line class="{name}-line" x1="{x1:.1f}" y1="{y_of(s):.1f}" '
                            f'x2="{x2:.1f}" y2="{y_of(tgt[0]):.1f}"/>\n'
                        )

    r = max(2.5, unit * 0.16)
    for (s, t) in sorted(spots, key=lambda k: (k[1] - k[0], k[0])):
        d = spots[(s, t)]
        names = labels.get((s, t), tuple(f"x_{{{t - s},{s}}}({i + 1})" for i in range(d)))
        out.append(f'<g id="b{t - s}.{s}" class="bidegree">\n')
        for i, off in enumerate(_offsets(d, unit)):
            label = names[i] if i < len(names) else f"x_{{{t - s},{s}}}({i + 1})"
            glyph = style.glyph_for((s, t), label)
            out.append(
                "  " + _glyph_element(glyph, x_of(t - s) + off, y_of(s), r, label) + "\n"
            )
        out.append("</g>\n")
    out.append("</svg>\n")
    return "".join(out)


_MPL_MARKERS = {
    "solid-dot": dict(marker="o", mfc="black", mec="black"),
    "open-circle": dict(marker="o", mfc="white", mec="black"),
    "solid-triangle": dict(marker="^", mfc="black", mec="black"),
    "open-triangle": dict(marker="^", mfc="white", mec="black"),
    "tower-box": dict(marker="s", mfc="white", mec="black"),
    "tower-cross": dict(marker="x", mfc="black", mec="black"),
}


def render_png(chart, path, style: Optional[ChartStyle] = None, dpi: int = 150) -> str:
    """Render the chart to a PNG file through matplotlib (report output).

    Raises ChartRenderError when matplotlib is unavailable; the SVG and
    TSV paths never depend on it.
    """
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:  # pragma: no cover - environment-dependent
        raise ChartRenderError("matplotlib is not installed") from exc

    style = style or ChartStyle()
    labels = getattr(chart, "labels", {}) or {}
    products = getattr(chart, "products", {}) or {}
    spots = {
        (s, t): d
        for (s, t), d in chart.dims.items()
        if d
        and (style.stem_range is None or style.stem_range[0] <= t - s <= style.stem_range[1])
        and (style.max_filt is None or s <= style.max_filt)
    }
    fig, ax = plt.subplots(figsize=(10, 6))
    off: dict[tuple[int, int], list[float]] = {}
    for (s, t), d in spots.items():
        off[(s, t)] = [o / style.unit for o in _offsets(d, style.unit)]
    for name in style.product_lines:
        table = products.get(name)
        bidegree = NAMED_CLASS_BIDEGREES.get(name)
        if not table or bidegree is None:
            continue
        ds, dt = bidegree
        for (s, t) in sorted(table):
            tgt = (s + ds, t + dt)
            if (s, t) not in spots or tgt not in spots:
                continue
            mat = table[(s, t)]
            for i in range(mat.cols):
                for j in range(mat.rows):
                    if mat.get(j, i):
                        x1 = (t - s) + off[(s, t)][min(i, len(off[(s, t)]) - 1)]
                        x2 = (tgt[1] - tgt[0]) + off[tgt][min(j, len(off[tgt]) - 1)]
                        ax.plot([x1, x2], [s, tgt[0]], color="#666", lw=0.7, zorder=1)
    for (s, t), d in sorted(spots.items(), key=lambda kv: (kv[0][1] - kv[0][0], kv[0][0])):
        names = labels.get((s, t), ())
        for i, o in enumerate(off[(s, t)]):
            label = names[i] if i < len(names) else ""
            glyph = style.glyph_for((s, t), label)
            kw = _MPL_MARKERS[glyph]
            ax.plot([(t - s) + o], [s], ms=5, ls="", zorder=2, **kw)
    ax.set_xlabel("stem (t - s)")
    ax.set_ylabel("filtration s")
    ax.set_title(f"{getattr(chart, 'coefficients', 'chart')} over {getattr(chart, 'algebra', '?')}")
    ax.grid(True, alpha=0.2)
    ax.set_axisbelow(True)
    fig.savefig(path, dpi=dpi, bbox_inches="tight")
    plt.close(fig)
    return str(path)


class ChartRenderError(RuntimeError):
    pass
