"""Tutte barycentric drawings of tilings.

The vertices of one face are pinned to a convex polygon and every other
vertex is placed at the average of its neighbours, found with a sparse
direct solve.  For 3-connected maps the result is a straight-line drawing
with convex faces; :func:`crossing_free` certifies this after the fact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .engine import OUTER, Tiling
from .rules import TERMINAL

RESIDUAL_TOL = 1e-9
ITERATIVE_ABOVE = 50_000      # free vertices; larger systems use conjugate gradients


class LayoutError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Layout:
    """Coordinates per vertex of a tiling.

    ``vertex_of[d]`` is the vertex index at the origin of dart ``d``;
    ``outer`` is the face drawn as the unbounded region and ``boundary``
    lists its vertices counterclockwise as seen from inside the disk.
    """

    xy: np.ndarray
    vertex_of: tuple[int, ...]
    outer: int
    boundary: tuple[int, ...]
    residual: float

    def point(self, d: int) -> tuple[float, float]:
        x, y = self.xy[self.vertex_of[d]]
        return float(x), float(y)


def _default_outer(t: Tiling) -> int:
    if t.is_disk:
        return t.outer_face()
    labels = t.map.face_labels
    squares = [f for f, lab in enumerate(labels) if lab == TERMINAL]
    return squares[0] if squares else 0


def polygon_boundary(t: Tiling, outer: int, corners: list[int]) -> dict[int, tuple[float, float]]:
    """Positions of the outer-face vertices.

    Corner darts go to the vertices of a regular polygon; the darts between
    two corners are spaced evenly along the side joining them.
    """
    m = t.map
    face = list(m.faces[outer])
    # walk the outer face backwards so the polygon comes out counterclockwise;
    # walk dart twin(d) starts where d ends, at the origin of succ(d)
    walk = [m.twin[d] for d in reversed(face)]
    cset = set(corners)
    starts = [i for i, w in enumerate(walk) if m.succ[m.twin[w]] in cset]
    if len(starts) < 3:
        starts = list(range(len(walk)))
    k = len(starts)
    pos = {}
    for s in range(k):
        a, b = starts[s], starts[(s + 1) % k]
        seg = (b - a) % len(walk) or len(walk)
        ang0 = math.pi / 2 + 2 * math.pi * s / k
        ang1 = math.pi / 2 + 2 * math.pi * (s + 1) / k
        p0 = (math.cos(ang0), math.sin(ang0))
        p1 = (math.cos(ang1), math.sin(ang1))
        for i in range(seg):
            lam = i / seg
            d = walk[(a + i) % len(walk)]
            pos[d] = (p0[0] + lam * (p1[0] - p0[0]), p0[1] + lam * (p1[1] - p0[1]))
    return pos


def tutte_layout(t: Tiling, outer: int | None = None) -> Layout:
    """Barycentric embedding with face ``outer`` as the unbounded face.

    Disk tilings default to their outer face, with the seed corners on a
    regular polygon; sphere tilings default to the first truncation square.
    """
    m = t.map
    if outer is None:
        outer = _default_outer(t)
    corners = list(t.corners) if (t.is_disk and outer == t.outer_face()) else []
    vert = m.vertex_of()
    nv = max(vert) + 1
    fixed_by_dart = polygon_boundary(t, outer, corners)
    fixed: dict[int, tuple[float, float]] = {}
    for d, p in fixed_by_dart.items():
        fixed[vert[d]] = p
    boundary = tuple(vert[d] for d in fixed_by_dart)
    free = [v for v in range(nv) if v not in fixed]
    idx = {v: i for i, v in enumerate(free)}
    xy = np.zeros((nv, 2))
    for v, p in fixed.items():
        xy[v] = p
    if free:
        rows, cols, vals = [], [], []
        rhs = np.zeros((len(free), 2))
        deg = np.zeros(len(free))
        for d in range(m.num_darts):
            v, w = vert[d], vert[m.twin[d]]
            if v not in idx:
                continue
            i = idx[v]
            deg[i] += 1
            if w in idx:
                rows.append(i)
                cols.append(idx[w])
                vals.append(-1.0)
            else:
                rhs[i] += fixed[w]
        rows += list(range(len(free)))
        cols += list(range(len(free)))
        vals += list(deg)
        lap = sp.csc_matrix((vals, (rows, cols)), shape=(len(free), len(free)))
        sol = _solve_laplacian(lap, rhs, deg)
        for v, i in idx.items():
            xy[v] = sol[i]
    layout = Layout(xy, tuple(vert), outer, boundary, 0.0)
    r = barycentric_residual(t, layout)
    return Layout(xy, tuple(vert), outer, boundary, r)


def _solve_laplacian(lap, rhs: np.ndarray, deg: np.ndarray) -> np.ndarray:
    """Solve ``lap @ x = rhs`` column by column.

    The matrix is a graph Laplacian with the boundary rows removed, hence
    symmetric positive definite: a sparse LU at desk scale, Jacobi-
    preconditioned conjugate gradients above :data:`ITERATIVE_ABOVE`.
    """
    n = lap.shape[0]
    if n > ITERATIVE_ABOVE:
        pre = sp.diags(1.0 / deg)
        cols = []
        for k in range(rhs.shape[1]):
            # a relative tolerance far below the residual contract
            x, info = spla.cg(lap, rhs[:, k], rtol=1e-14, atol=0.0, maxiter=20 * n, M=pre)
            if info != 0:
                raise LayoutError(f"conjugate gradients did not converge ({info})")
            cols.append(x)
        return np.column_stack(cols)
    try:
        lu = spla.splu(lap)
    except RuntimeError as exc:
        raise LayoutError(f"singular barycentric system: {exc}") from exc
    sol = np.column_stack([lu.solve(rhs[:, k]) for k in range(rhs.shape[1])])
    # one step of iterative refinement keeps the residual at round-off
    res = rhs - lap @ sol
    return sol + np.column_stack([lu.solve(res[:, k]) for k in range(rhs.shape[1])])


def barycentric_residual(t: Tiling, layout: Layout) -> float:
    """Max-norm distance of each free vertex from its neighbours' mean."""
    m = t.map
    vert = layout.vertex_of
    fixed = set(layout.boundary)
    acc: dict[int, list] = {}
    for d in range(m.num_darts):
        v = vert[d]
        if v in fixed:
            continue
        a = acc.setdefault(v, [0.0, 0.0, 0])
        w = layout.xy[vert[m.twin[d]]]
        a[0] += w[0]
        a[1] += w[1]
        a[2] += 1
    worst = 0.0
    for v, (sx, sy, k) in acc.items():
        x, y = layout.xy[v]
        worst = max(worst, abs(x - sx / k), abs(y - sy / k))
    return worst


def _signed_area(pts: list[tuple[float, float]]) -> float:
    s = 0.0
    for (x0, y0), (x1, y1) in zip(pts, pts[1:] + pts[:1]):
        s += x0 * y1 - x1 * y0
    return s / 2


@dataclass(frozen=True)
class CrossingReport:
    ok: bool
    bad_faces: tuple[int, ...]
    area_gap: float


def crossing_free(t: Tiling, layout: Layout, tol: float = 1e-12) -> CrossingReport:
    """Certify a drawing as an embedding.

    Every bounded face must be weakly convex with positive (counter-
    clockwise) area, and the face areas must add up to the area of the
    boundary polygon.  Faces that are all positively oriented and cover the
    polygon exactly once cannot overlap, so no two edges cross.
    """
    m = t.map
    bad = []
    total = 0.0
    for f, face in enumerate(m.faces):
        if f == layout.outer:
            continue
        pts = [layout.point(d) for d in face]
        area = _signed_area(pts)
        if area <= tol:
            bad.append(f)
            continue
        n = len(pts)
        for i in range(n):
            (ax, ay), (bx, by), (cx, cy) = pts[i - 1], pts[i], pts[(i + 1) % n]
            turn = (bx - ax) * (cy - by) - (by - ay) * (cx - bx)
            if turn < -tol:
                bad.append(f)
                break
        total += area
    outer_pts = [layout.point(d) for d in m.faces[layout.outer]]
    hull = -_signed_area(outer_pts)
    gap = abs(total - hull)
    return CrossingReport(not bad and gap <= 1e-9 * max(1.0, hull), tuple(bad), gap)


__all__ = ["ITERATIVE_ABOVE", "Layout", "LayoutError", "OUTER", "RESIDUAL_TOL",
           "barycentric_residual", "crossing_free", "polygon_boundary", "tutte_layout"]
