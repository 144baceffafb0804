"""Half-edge (dart) representation of planar maps.

Every object in the package (link projections, truncated polyhedra,
replacement patterns, tilings) is stored as a :class:`CombinatorialMap`.

Darts are integers ``0..n-1``.  ``twin`` is a fixed-point-free involution
pairing the two darts of an edge; ``succ`` is the face permutation, so the
face to the left of a dart is its ``succ`` orbit (faces are traversed
counterclockwise).  The counterclockwise rotation of darts around their
origin vertex is derived: ``rot(d) = twin(pred(d))``.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Sequence
from typing import Any

LINK = "link"
TRUNC = "trunc"


class MapError(ValueError):
    """Raised when face data does not describe a closed orientable surface."""


class CombinatorialMap:
    """Immutable planar map with per-edge and per-face labels.

    Parameters
    ----------
    twin, succ : sequence of int
        Edge involution and face permutation.
    edge_kind : sequence of str, optional
        One entry per dart; both darts of an edge carry the same kind.
    loaded : sequence of bool, optional
        Per-dart loaded flag (symmetric under ``twin``).
    face_labels : sequence, optional
        One label per face, in the order of :attr:`faces`.
    """

    __slots__ = ("twin", "succ", "pred", "edge_kind", "loaded", "face_of",
                 "faces", "face_labels")

    def __init__(self, twin: Sequence[int], succ: Sequence[int],
                 edge_kind: Sequence[str] | None = None,
                 loaded: Sequence[bool] | None = None,
                 face_labels: Sequence[Any] | None = None,
                 faces: Sequence[Sequence[int]] | None = None):
        n = len(twin)
        if len(succ) != n:
            raise MapError("twin and succ differ in length")
        self.twin = tuple(twin)
        self.succ = tuple(succ)
        pred = [0] * n
        for d, s in enumerate(self.succ):
            pred[s] = d
        self.pred = tuple(pred)
        self.edge_kind = tuple(edge_kind) if edge_kind is not None else (LINK,) * n
        self.loaded = tuple(loaded) if loaded is not None else (False,) * n
        if faces is None:
            faces = _orbits(self.succ)
        self.faces = tuple(tuple(f) for f in faces)
        face_of = [0] * n
        for i, f in enumerate(self.faces):
            for d in f:
                face_of[d] = i
        self.face_of = tuple(face_of)
        if face_labels is None:
            face_labels = [None] * len(self.faces)
        if len(face_labels) != len(self.faces):
            raise MapError("one label per face required")
        self.face_labels = tuple(face_labels)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_faces(cls, faces: Iterable[Sequence[tuple[Hashable, int]]],
                   face_labels: Sequence[Any] | None = None,
                   edge_kind: dict[Hashable, str] | None = None,
                   loaded: Iterable[Hashable] = ()) -> "CombinatorialMap":
        """Build a map from faces given as cyclic lists of half-edge keys.

        A half-edge key is ``(edge, sign)`` with ``sign`` in ``{+1, -1}``;
        the twin of ``(e, s)`` is ``(e, -s)``.  Faces are listed
        counterclockwise.  Every key must occur exactly once.
        """
        faces = [list(f) for f in faces]
        index: dict[tuple[Hashable, int], int] = {}
        keys: list[tuple[Hashable, int]] = []
        dart_faces = []
        for f in faces:
            ids = []
            for key in f:
                if key in index:
                    raise MapError(f"half-edge {key!r} used twice")
                index[key] = len(keys)
                ids.append(len(keys))
                keys.append(key)
            dart_faces.append(ids)
        n = len(keys)
        twin = [0] * n
        succ = [0] * n
        for d, (e, s) in enumerate(keys):
            t = index.get((e, -s))
            if t is None:
                raise MapError(f"half-edge {(e, s)!r} has no twin")
            twin[d] = t
        for ids in dart_faces:
            for i, d in enumerate(ids):
                succ[d] = ids[(i + 1) % len(ids)]
        kinds = None
        if edge_kind is not None:
            kinds = [edge_kind.get(e, LINK) for e, _ in keys]
        loaded_set = set(loaded)
        flags = [e in loaded_set for e, _ in keys]
        return cls(twin, succ, kinds, flags, face_labels, dart_faces)

    # -- basic structure --------------------------------------------------

    @property
    def num_darts(self) -> int:
        return len(self.twin)

    @property
    def num_edges(self) -> int:
        return len(self.twin) // 2

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    def rot(self, d: int) -> int:
        """Next dart counterclockwise around the origin of ``d``."""
        return self.twin[self.pred[d]]

    def rot_inv(self, d: int) -> int:
        return self.succ[self.twin[d]]

    def vertices(self) -> list[tuple[int, ...]]:
        """Vertex orbits (darts leaving each vertex, counterclockwise)."""
        rot = [self.twin[self.pred[d]] for d in range(self.num_darts)]
        return _orbits(rot)

    def vertex_of(self) -> list[int]:
        out = [0] * self.num_darts
        for i, orbit in enumerate(self.vertices()):
            for d in orbit:
                out[d] = i
        return out

    @property
    def num_vertices(self) -> int:
        return len(self.vertices())

    def euler_characteristic(self) -> int:
        return self.num_vertices - self.num_edges + self.num_faces

    def edges(self) -> list[tuple[int, int]]:
        return [(d, t) for d, t in enumerate(self.twin) if d < t]

    def face_degree(self, f: int) -> int:
        return len(self.faces[f])

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def components(self) -> list[list[int]]:
        """Dart sets of the connected components (union of all orbits)."""
        n = self.num_darts
        seen = [False] * n
        comps = []
        for start in range(n):
            if seen[start]:
                continue
            stack = [start]
            seen[start] = True
            comp = []
            while stack:
                d = stack.pop()
                comp.append(d)
                for e in (self.twin[d], self.succ[d], self.pred[d]):
                    if not seen[e]:
                        seen[e] = True
                        stack.append(e)
            comps.append(sorted(comp))
        return comps

    def check(self) -> None:
        """Assert the structural invariants of a map on the sphere."""
        for d, t in enumerate(self.twin):
            if t == d or self.twin[t] != d:
                raise MapError(f"twin is not a fixed-point-free involution at {d}")
            if self.edge_kind[d] != self.edge_kind[t] or self.loaded[d] != self.loaded[t]:
                raise MapError(f"edge labels differ on the two darts of edge {d}")
        if sorted(self.succ) != list(range(self.num_darts)):
            raise MapError("succ is not a permutation")
        if self.is_connected() and self.euler_characteristic() != 2:
            raise MapError(f"Euler characteristic {self.euler_characteristic()} != 2")

    # -- transformations --------------------------------------------------

    def mirror(self) -> "CombinatorialMap":
        """Orientation-reversed copy keeping dart ids.

        Face ``i`` of the mirror is bounded by the twins of the darts of
        face ``i`` of ``self``, traversed backwards.
        """
        faces = [[self.twin[d] for d in reversed(f)] for f in self.faces]
        succ = [0] * self.num_darts
        for f in faces:
            for i, d in enumerate(f):
                succ[d] = f[(i + 1) % len(f)]
        return CombinatorialMap(self.twin, succ, self.edge_kind, self.loaded,
                                self.face_labels, faces)

    def relabeled(self, perm: Sequence[int]) -> "CombinatorialMap":
        """Copy with dart ``d`` renamed ``perm[d]``."""
        n = self.num_darts
        inv = [0] * n
        for d, p in enumerate(perm):
            inv[p] = d
        twin = [perm[self.twin[inv[p]]] for p in range(n)]
        succ = [perm[self.succ[inv[p]]] for p in range(n)]
        kinds = [self.edge_kind[inv[p]] for p in range(n)]
        loaded = [self.loaded[inv[p]] for p in range(n)]
        faces = [[perm[d] for d in f] for f in self.faces]
        return CombinatorialMap(twin, succ, kinds, loaded, self.face_labels, faces)

    def with_face_labels(self, labels: Sequence[Any]) -> "CombinatorialMap":
        return CombinatorialMap(self.twin, self.succ, self.edge_kind, self.loaded,
                                labels, self.faces)

    def __repr__(self) -> str:
        return (f"CombinatorialMap(V={self.num_vertices}, E={self.num_edges}, "
                f"F={self.num_faces})")


def _orbits(perm: Sequence[int]) -> list[tuple[int, ...]]:
    n = len(perm)
    seen = [False] * n
    out = []
    for start in range(n):
        if seen[start]:
            continue
        orbit = []
        d = start
        while not seen[d]:
            seen[d] = True
            orbit.append(d)
            d = perm[d]
        out.append(tuple(orbit))
    return out
