"""SVG drawings and JSON dumps of tilings.

Output is deterministic: elements follow face and dart order, numbers are
printed with six decimals, and nothing depends on the clock or on hash
order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from xml.sax.saxutils import quoteattr

from .engine import OUTER, Tiling
from .layout import Layout
from .planar_map import CombinatorialMap
from .rules import TERMINAL

TILING_SCHEMA = "tiling-v1"

_PALETTE = ("#f4f1de", "#cfe3f2", "#f6d7c3", "#d9ead3", "#e6d5ee", "#fde9a9",
            "#d5e8e4", "#f2d0d9")


@dataclass(frozen=True)
class StyleSpec:
    """Drawing options; the defaults give the usual look
    (white-ish tiles, grey truncation squares, dashed loaded edges)."""

    size: int = 800
    margin: int = 20
    stroke: str = "#000000"
    stroke_width: float = 1.0
    trunc_fill: str = "#9e9e9e"
    loaded_dash: str = "4 3"
    fills: dict = field(default_factory=dict)
    draw_merged: bool = True


def _fill(style: StyleSpec, label, order: dict) -> str:
    if label == TERMINAL:
        return style.trunc_fill
    if label in style.fills:
        return style.fills[label]
    return _PALETTE[order.setdefault(label, len(order)) % len(_PALETTE)]


def _fmt(v: float) -> str:
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def emit_svg(t: Tiling, layout: Layout, style: StyleSpec | None = None) -> str:
    """One polygon per tile; loaded edges (and the hidden loaded edge of
    every pair tile) as dashed lines."""
    st = style or StyleSpec()
    m = t.map
    half = st.size / 2
    scale = half - st.margin

    def pt(d: int) -> str:
        x, y = layout.point(d)
        return f"{_fmt(half + scale * x)},{_fmt(half - scale * y)}"

    def line(d: int, e: int, cls: str) -> str:
        (x0, y0), (x1, y1) = layout.point(d), layout.point(e)
        return (f'<line class="{cls}" x1="{_fmt(half + scale * x0)}" '
                f'y1="{_fmt(half - scale * y0)}" x2="{_fmt(half + scale * x1)}" '
                f'y2="{_fmt(half - scale * y1)}" stroke="{st.stroke}" '
                f'stroke-width="{_fmt(st.stroke_width)}" '
                f'stroke-dasharray="{st.loaded_dash}"/>')

    order: dict = {}
    for lab in sorted({lab for lab in m.face_labels if lab not in (OUTER, TERMINAL)}, key=str):
        order.setdefault(lab, len(order))
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
           f'width="{st.size}" height="{st.size}" viewBox="0 0 {st.size} {st.size}">',
           f'<g id="stage-{t.stage}">']
    for f, face in enumerate(m.faces):
        if f == layout.outer:
            continue
        lab = m.face_labels[f]
        cls = "tile-trunc" if lab == TERMINAL else f"tile-{lab}"
        pts = " ".join(pt(d) for d in face)
        out.append(f'<polygon id="f{f}" class={quoteattr("tile " + cls)} points="{pts}" '
                   f'fill="{_fill(st, lab, order)}" stroke="{st.stroke}" '
                   f'stroke-width="{_fmt(st.stroke_width)}"/>')
    for d, e in m.edges():
        if m.loaded[d]:
            out.append(line(d, e, "edge-loaded"))
    if st.draw_merged and len(t.merged) == m.num_faces:
        for f, cut in enumerate(t.merged):
            if cut >= 0 and f != layout.outer:
                darts = t.face_darts(f)
                out.append(line(darts[cut], darts[0], "edge-loaded"))
    out += ["</g>", "</svg>", ""]
    return "\n".join(out)


def emit_tiling_json(t: Tiling) -> str:
    """Lossless dump of a tiling (schema ``tiling-v1``)."""
    m = t.map
    doc = {
        "schema": TILING_SCHEMA,
        "stage": t.stage,
        "seed": t.seed,
        "darts": m.num_darts,
        "twin": list(m.twin),
        "next": [m.rot(d) for d in range(m.num_darts)],
        "succ": list(m.succ),
        "edge_kind": list(m.edge_kind),
        "loaded": [bool(x) for x in m.loaded],
        "faces": [list(f) for f in m.faces],
        "tile_types": [str(lab) for lab in m.face_labels],
        "parents": list(t.parent),
        "roots": list(t.root),
        "merged": list(t.merged),
        "corners": list(t.corners),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def load_tiling_json(text: str) -> Tiling:
    doc = json.loads(text)
    if doc.get("schema") != TILING_SCHEMA:
        raise ValueError(f"expected schema {TILING_SCHEMA!r}, got {doc.get('schema')!r}")
    for key in ("darts", "twin", "next", "tile_types", "stage", "parents"):
        if key not in doc:
            raise ValueError(f"tiling document lacks {key!r}")
    twin = doc["twin"]
    nxt = doc["next"]
    # succ(d) = rot^-1(twin(d)) when next is the counterclockwise rotation
    inv = [0] * len(nxt)
    for d, r in enumerate(nxt):
        inv[r] = d
    succ = [inv[twin[d]] for d in range(len(twin))]
    if "succ" in doc and doc["succ"] != succ:
        raise ValueError("succ and next disagree")
    faces = doc.get("faces")
    m = CombinatorialMap(twin, succ, doc.get("edge_kind"), doc.get("loaded"),
                         doc["tile_types"], faces)
    n = m.num_faces
    roots = doc.get("roots") or [f[0] for f in m.faces]
    return Tiling(doc["stage"], m, tuple(doc["parents"]), tuple(roots),
                  doc.get("seed", "sphere"), tuple(doc.get("merged") or (-1,) * n),
                  tuple(doc.get("corners", ())))


__all__ = ["StyleSpec", "TILING_SCHEMA", "emit_svg", "emit_tiling_json", "load_tiling_json"]
