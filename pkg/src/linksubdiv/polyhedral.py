"""Checkerboard orientation, truncated polyhedron and face gluing.

The link complement is two truncated polyhedra ``P`` and ``P'`` whose
boundaries are the truncated projection and its mirror image.  Both are
represented by one :class:`TruncatedComplex`: copy ``0`` is ``P`` and copy
``1`` is ``P'``, which shares dart ids with ``P`` (see
:meth:`CombinatorialMap.mirror`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

from .planar_map import LINK, TRUNC, CombinatorialMap, MapError

CW = "cw"
CCW = "ccw"
REGION = "region"
SQUARE = "trunc"


@dataclass(frozen=True)
class FaceInfo:
    role: str            # REGION or SQUARE
    origin: int          # diagram face index (regions) or crossing index (squares)
    orient: str | None = None


@dataclass(frozen=True)
class OrientationAssignment:
    orient: tuple[str, ...]   # indexed by diagram face

    def __getitem__(self, face: int) -> str:
        return self.orient[face]

    def counts(self) -> dict[str, int]:
        return {CW: self.orient.count(CW), CCW: self.orient.count(CCW)}


def flip(orient: str) -> str:
    return CCW if orient == CW else CW


def checkerboard(cmap: CombinatorialMap, diagram=None,
                 flip_orientation: bool = False) -> OrientationAssignment:
    """Proper 2-colouring of the faces of a 4-valent projection.

    The face to the left of the lowest-labelled arc, leaving the first
    crossing that carries it, is clockwise (with a diagram; otherwise the
    face of dart 0).  The choice depends on the labels, so relabeling a
    diagram may swap the two classes; ``flip_orientation`` swaps them
    explicitly.
    """
    if diagram is not None:
        low = min(diagram.arcs())
        root_dart = next(4 * x + i for x, tup in enumerate(diagram.crossings)
                         for i, a in enumerate(tup) if a == low)
    else:
        root_dart = 0
    root = cmap.face_of[root_dart]
    colour = {root: 0}
    stack = [root]
    while stack:
        f = stack.pop()
        for d in cmap.faces[f]:
            g = cmap.face_of[cmap.twin[d]]
            if g not in colour:
                colour[g] = 1 - colour[f]
                stack.append(g)
            elif colour[g] == colour[f]:
                raise MapError(f"faces {f} and {g} share an edge and a colour")
    if len(colour) != cmap.num_faces:
        raise MapError("face adjacency graph is disconnected")
    names = (CCW, CW) if flip_orientation else (CW, CCW)
    return OrientationAssignment(tuple(names[colour[f]] for f in range(cmap.num_faces)))


@dataclass(frozen=True, eq=False)
class TruncatedComplex:
    """Boundary sphere of the truncated polyhedron, with gluing data."""

    map: CombinatorialMap
    diagram_map: CombinatorialMap
    orientation: OrientationAssignment
    crossing_count: int

    @cached_property
    def info(self) -> tuple[FaceInfo, ...]:
        return self.map.face_labels

    @cached_property
    def regions(self) -> tuple[int, ...]:
        return tuple(f for f, i in enumerate(self.info) if i.role == REGION)

    @cached_property
    def squares(self) -> tuple[int, ...]:
        return tuple(f for f, i in enumerate(self.info) if i.role == SQUARE)

    def region_of_diagram_face(self, face: int) -> int:
        return next(f for f in self.regions if self.info[f].origin == face)

    # -- the two copies ---------------------------------------------------
    # A dart x of copy 1 lies in the face of copy 0 containing twin(x).

    def face_in_copy(self, copy: int, d: int) -> int:
        return self.map.face_of[d] if copy == 0 else self.map.face_of[self.map.twin[d]]

    @cached_property
    def copy_succ(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        m = self.map
        succ1 = tuple(m.twin[m.pred[m.twin[x]]] for x in range(m.num_darts))
        return m.succ, succ1

    @cached_property
    def copy_faces(self) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
        mirrored = self.map.mirror()
        return self.map.faces, mirrored.faces

    @cached_property
    def glue_table(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """``glue_table[t][d]``: the dart of copy ``1-t`` glued against dart
        ``d`` of copy ``t`` (same edge, opposite direction); ``-1`` on
        truncation squares."""
        m = self.map
        n = m.num_darts
        g0 = [-1] * n
        g1 = [-1] * n
        for f in self.regions:
            face = m.faces[f]
            k = len(face)
            shift = -2 if self.info[f].orient == CW else 2
            for i, d in enumerate(face):
                x = m.twin[face[(i + shift) % k]]
                g0[d] = x
                g1[x] = d
        return tuple(g0), tuple(g1)

    def glue(self, copy: int, d: int) -> int:
        return self.glue_table[copy][d]

    def edge_cycle(self, d: int) -> list[tuple[int, int]]:
        """Polyhedra met walking around the edge of dart ``d`` of copy 0,
        as (copy, dart) pairs, until the walk closes or reaches a square."""
        m = self.map
        out = [(0, d)]
        copy, x = 0, d
        for _ in range(64):
            if self.info[self.face_in_copy(copy, x)].role != REGION:
                break
            y = self.glue(copy, x)
            copy, x = 1 - copy, m.twin[y]
            if (copy, x) == (0, d):
                return out
            out.append((copy, x))
        return out


def truncate(cmap: CombinatorialMap, orient: OrientationAssignment) -> TruncatedComplex:
    """Blow every crossing up into a truncation square.

    Region faces keep the diagram face order and start at a link edge;
    squares follow, one per crossing, in crossing order.
    """
    faces = []
    labels = []
    for fi, f in enumerate(cmap.faces):
        face = []
        for j, d in enumerate(f):
            nxt = f[(j + 1) % len(f)]
            e = min(d, cmap.twin[d])
            face.append((("l", e), 1 if d == e else -1))
            face.append((("t", nxt), -1))
        faces.append(face)
        labels.append(FaceInfo(REGION, fi, orient[fi]))
    for vi, v in enumerate(sorted(cmap.vertices(), key=min)):
        faces.append([(("t", e), 1) for e in v])
        labels.append(FaceInfo(SQUARE, min(v) // 4))
    kinds = {key: (LINK if key[0] == "l" else TRUNC) for f in faces for key, _ in f}
    tmap = CombinatorialMap.from_faces(faces, labels, kinds)
    tmap.check()
    crossings = cmap.num_vertices
    return TruncatedComplex(tmap, cmap, orient, crossings)


@dataclass(frozen=True)
class GluingDatum:
    """Dart correspondence between a region of ``P`` and its copy in ``P'``.

    ``pairs[i] = (d, x)``: dart ``d`` of ``P`` is glued against dart ``x``
    of ``P'``.  ``steps`` link edges of rotation in direction ``direction``.
    """

    region: int
    direction: str
    steps: int
    pairs: tuple[tuple[int, int], ...]

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def inverse(self) -> "GluingDatum":
        return GluingDatum(self.region, self.direction, self.steps,
                           tuple(sorted((x, d) for d, x in self.pairs)))

    def offset(self) -> int:
        """Rotation in boundary positions, counterclockwise positive."""
        return 2 * self.steps if self.direction == CCW else -2 * self.steps


def gluing_twist(cx: TruncatedComplex, region: int, copy: int = 0) -> GluingDatum:
    info = cx.info[region]
    if info.role != REGION:
        raise ValueError(f"face {region} is a truncation square and is never glued")
    pairs = tuple((d, cx.glue(copy, d)) for d in cx.copy_faces[copy][region])
    return GluingDatum(region, info.orient, 1, pairs)


def emit_complex_json(cx: TruncatedComplex) -> str:
    m = cx.map
    doc = {
        "schema": "complex-v1",
        "crossings": cx.crossing_count,
        "darts": m.num_darts,
        "twin": list(m.twin),
        "next": [m.rot(d) for d in range(m.num_darts)],
        "succ": list(m.succ),
        "edge_kind": list(m.edge_kind),
        "faces": [{"darts": list(f), "role": i.role, "origin": i.origin,
                   "orientation": i.orient} for f, i in zip(m.faces, cx.info)],
        "glue": list(cx.glue_table[0]),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
