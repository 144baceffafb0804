"""Tilings, the subdivision engine and the replacement (universal cover) oracle.

A :class:`Tiling` is a planar map whose faces are tiles.  Its face labels
are tile type ids, ``"trunc"`` for truncation squares and ``"outer"`` for
the complementary face of a disk seed.  Tilings grown by
:func:`replacement_evolve` use the labels ``"region"`` and ``"trunc"``.
"""

from __future__ import annotations

import csv
import io
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field

from .planar_map import LINK, TRUNC, CombinatorialMap
from .polyhedral import REGION, TruncatedComplex
from .rules import TERMINAL, SubdivisionRule

OUTER = "outer"
SPHERE = "sphere"


class EngineError(RuntimeError):
    """Invariant breach while growing a tiling."""


@dataclass(frozen=True, eq=False)
class Tiling:
    """One stage of a subdivision or replacement process.

    Attributes
    ----------
    stage : int
        Number of subdivision (or gluing) rounds applied to the seed.
    map : CombinatorialMap
        The complex; ``map.face_labels`` holds the tile labels.
    parent : tuple of int
        Face index of the parent tile at the previous stage (``-1`` at
        stage 0).
    root : tuple of int
        Per face, the dart at position 0 of its type signature.
    seed : str
        ``"sphere"`` or the id of the seed tile type.
    merged : tuple of int
        Per face, the position of the first homotoped dart of a loaded
        pair tile, ``-1`` for every other tile.
    corners : tuple of int
        Darts of the outer face that start at a corner of the seed.
    """

    stage: int
    map: CombinatorialMap
    parent: tuple[int, ...]
    root: tuple[int, ...]
    seed: str
    merged: tuple[int, ...] = ()
    corners: tuple[int, ...] = ()
    pdart: tuple[tuple[int, int], ...] | None = None
    edge_count: tuple[int, ...] | None = None

    @property
    def labels(self) -> tuple:
        return self.map.face_labels

    @property
    def is_disk(self) -> bool:
        return OUTER in self.map.face_labels

    def outer_face(self) -> int | None:
        return self.labels.index(OUTER) if self.is_disk else None

    def tile_faces(self) -> list[int]:
        return [f for f, lab in enumerate(self.labels) if lab != OUTER]

    def face_darts(self, f: int) -> list[int]:
        """Darts of face ``f`` starting at its root."""
        face = list(self.map.faces[f])
        i = face.index(self.root[f])
        return face[i:] + face[:i]


def _role(label) -> str:
    if label == TERMINAL or label == OUTER:
        return label
    return REGION


# -- seeds --------------------------------------------------------------------

def initial_tiling(rule: SubdivisionRule, seed: str = SPHERE) -> Tiling:
    """Stage-0 tiling: the polyhedron boundary or a single tile of type ``seed``."""
    if seed == SPHERE:
        cx = rule.complex
        labels, roots, merged = [], [], []
        for f, entry in enumerate(rule.sphere_seed()):
            face = cx.map.faces[f]
            if entry is None:
                labels.append(TERMINAL)
                roots.append(face[0])
            else:
                tid, off = entry
                labels.append(tid)
                roots.append(face[off])
            merged.append(-1)
        m = cx.map.with_face_labels(labels)
        return Tiling(0, m, (-1,) * m.num_faces, tuple(roots), SPHERE, tuple(merged))
    if seed not in rule.types:
        raise KeyError(f"unknown seed type {seed!r}; rule has {rule.type_ids()}")
    tt = rule.types[seed]
    n = tt.boundary_length
    tile = [(("s", j), 1) for j in range(n)]
    outer = [(("s", j), -1) for j in reversed(range(n))]
    kinds = {("s", j): e.kind for j, e in enumerate(tt.signature)}
    m = CombinatorialMap.from_faces([tile, outer], [seed, OUTER], kinds)
    m.check()
    moved = [j for j, e in enumerate(tt.signature) if e.moved]
    merged = (moved[0] if moved else -1, -1)
    return Tiling(0, m, (-1, -1), (m.faces[0][0], m.faces[1][0]), seed, merged,
                  corners=tuple(m.faces[1]))


# -- subdivision ----------------------------------------------------------------

def _edge_splits(rule: SubdivisionRule, t: Tiling) -> list[int]:
    m = t.map
    split = [0] * m.num_darts
    for f, lab in enumerate(m.face_labels):
        if lab in rule.types:
            for j, d in enumerate(t.face_darts(f)):
                split[d] = rule.types[lab].signature[j].split
    out = [1] * m.num_darts
    for d, e in m.edges():
        a, b = split[d], split[e]
        if a and b and a != b:
            raise EngineError(f"edge {d}/{e} split {a} times on one side and "
                              f"{b} times on the other")
        out[d] = out[e] = max(a, b, 1)
    return out


def subdivide(rule: SubdivisionRule, t: Tiling) -> Tiling:
    """Replace every non-terminal tile by its child pattern."""
    m = t.map
    split = _edge_splits(rule, t)

    def piece(d: int, p: int) -> tuple:
        e = min(d, m.twin[d])
        if d == e:
            return (("o", e, p), 1)
        return (("o", e, split[d] - 1 - p), -1)

    faces, labels, parents, merged = [], [], [], []
    kinds: dict[tuple, str] = {}

    def set_kind(key: tuple, kind: str) -> None:
        old = kinds.setdefault(key, kind)
        if old != kind:
            raise EngineError(f"edge {key} is {old} on one side and {kind} on the other")

    for f, lab in enumerate(m.face_labels):
        if lab in rule.types:
            darts = t.face_darts(f)
            for ctype, refs in rule.types[lab].children:
                keys = [piece(darts[r[1]], r[2]) if r[0] == "b" else (("n", f, r[1]), r[2])
                        for r in refs]
                if ctype == TERMINAL:
                    for key in keys:
                        set_kind(key[0], TRUNC)
                    merged.append(-1)
                else:
                    sig = rule.types[ctype].signature
                    for key, e in zip(keys, sig):
                        set_kind(key[0], e.kind)
                    moved = [j for j, e in enumerate(sig) if e.moved]
                    merged.append(moved[0] if moved else -1)
                faces.append(keys)
                labels.append(ctype)
                parents.append(f)
        else:
            faces.append([piece(d, p) for d in m.faces[f] for p in range(split[d])])
            labels.append(lab)
            parents.append(f)
            merged.append(-1)
    for d in range(m.num_darts):
        for p in range(split[d]):
            key = piece(d, p)[0]
            if key not in kinds:
                kinds[key] = m.edge_kind[d]
    new = CombinatorialMap.from_faces(faces, labels, kinds)
    index = {}
    for keys, ids in zip(faces, new.faces):
        for key, x in zip(keys, ids):
            index[key] = x
    # stored faces start at position 0 of each child's signature
    roots = []
    for f, (lab, ids) in enumerate(zip(labels, new.faces)):
        if lab in rule.types or lab == TERMINAL:
            roots.append(ids[0])
        else:
            old = t.root[parents[f]]
            roots.append(index[piece(old, 0)])
    corners = tuple(index[piece(d, 0)] for d in t.corners)
    return Tiling(t.stage + 1, new, tuple(parents), tuple(roots), t.seed,
                  tuple(merged), corners)


def subdivide_n(rule: SubdivisionRule, t: Tiling, depth: int) -> list[Tiling]:
    """Stages ``t, subdivide(t), ...`` up to ``depth`` further rounds."""
    out = [t]
    for _ in range(depth):
        out.append(subdivide(rule, out[-1]))
    return out


def collapse_merged_edges(t: Tiling) -> Tiling:
    """Split every loaded pair tile back into its two regions.

    The homotoped chain of a pair tile and the rest of its boundary meet at
    two vertices; a loaded edge between them restores the replacement
    picture.  Labels become ``"region"``, ``"trunc"`` and ``"outer"``.
    """
    if len(t.merged) != t.map.num_faces:
        raise EngineError("tiling carries no homotopy bookkeeping")
    m = t.map

    def key(d: int) -> tuple:
        e = min(d, m.twin[d])
        return (("d", e), 1 if d == e else -1)

    faces, labels, parents = [], [], []
    kinds = {("d", d): m.edge_kind[d] for d, _ in m.edges()}
    loaded = {("d", d) for d, _ in m.edges() if m.loaded[d]}
    for f, lab in enumerate(m.face_labels):
        cut = t.merged[f]
        if cut < 0:
            faces.append([key(d) for d in m.faces[f]])
            labels.append(_role(lab))
            parents.append(f)
            continue
        darts = t.face_darts(f)
        chord = ("c", f)
        kinds[chord] = LINK
        loaded.add(chord)
        faces.append([key(d) for d in darts[:cut]] + [(chord, 1)])
        faces.append([key(d) for d in darts[cut:]] + [(chord, -1)])
        labels += [REGION, REGION]
        parents += [f, f]
    new = CombinatorialMap.from_faces(faces, labels, kinds, loaded)
    return Tiling(t.stage, new, tuple(parents), tuple(fc[0] for fc in new.faces),
                  t.seed, (-1,) * new.num_faces)


# -- replacement oracle ---------------------------------------------------------

@dataclass
class EvolveReport:
    """Violations met while gluing polyhedra (all lists empty when sound)."""

    two_loaded: list = field(default_factory=list)
    over_saturated: list = field(default_factory=list)
    not_closing: list = field(default_factory=list)
    saturated_edges: int = 0
    saturation_counts: Counter = field(default_factory=Counter)
    faces_per_stage: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not (self.two_loaded or self.over_saturated or self.not_closing)


def replacement_evolve(cx: TruncatedComplex, depth: int,
                       report: EvolveReport | None = None) -> Tiling:
    """Glue polyhedra onto every open face, ``depth`` times.

    Open faces are single regions, or pairs of regions joined by a loaded
    edge (an edge already met by three polyhedra).  Works directly on the
    two copies of the polyhedron and never consults a subdivision rule.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    rep = report if report is not None else EvolveReport()
    m0 = cx.map
    labels = [REGION if i.role == REGION else TERMINAL for i in cx.info]
    cur = m0.with_face_labels(labels)
    pdart = [(0, d) for d in range(m0.num_darts)]
    count = [1] * m0.num_darts
    rep.faces_per_stage.append(cur.num_faces)
    for stage in range(1, depth + 1):
        cur, pdart, count = _glue_round(cx, cur, pdart, count, stage, rep)
        rep.faces_per_stage.append(cur.num_faces)
    roots = tuple(f[0] for f in cur.faces)
    return Tiling(depth, cur, (-1,) * cur.num_faces, roots, SPHERE,
                  (-1,) * cur.num_faces, pdart=tuple(pdart), edge_count=tuple(count))


def _glue_round(cx, cur, pdart, count, stage, rep):
    m0 = cx.map
    loaded_in: dict[int, list[int]] = defaultdict(list)
    for d in range(cur.num_darts):
        if cur.loaded[d]:
            loaded_in[cur.face_of[d]].append(d)
    units = []          # (faces, loaded dart or None)
    done = set()
    for f, lab in enumerate(cur.face_labels):
        if lab != REGION or f in done:
            continue
        ls = loaded_in.get(f, [])
        if len(ls) > 1:
            rep.two_loaded.append((stage, f, len(ls)))
            raise EngineError(f"stage {stage}: region {f} carries {len(ls)} loaded edges")
        if ls:
            g = cur.face_of[cur.twin[ls[0]]]
            units.append(((f, g), ls[0]))
            done.update((f, g))
        else:
            units.append(((f,), None))
            done.add(f)

    def old_key(d: int) -> tuple:
        e = min(d, cur.twin[d])
        return (("e", e), 1 if d == e else -1)

    faces, labels, new_pd, new_kind = [], [], [], {}
    covered = Counter()
    erased = set()
    glued_faces = set()
    for ui, (ufaces, a) in enumerate(units):
        glued_faces.update(ufaces)
        copies = {pdart[d][0] for f in ufaces for d in cur.faces[f]}
        if len(copies) != 1:
            raise EngineError(f"stage {stage}: open face mixes polyhedron copies")
        t = copies.pop()
        u = 1 - t
        qmap = {}
        for f in ufaces:
            for d in cur.faces[f]:
                if a is not None and d in (a, cur.twin[a]):
                    continue
                q = cx.glue(t, pdart[d][1])
                if q < 0:
                    raise EngineError(f"stage {stage}: region dart {d} maps to a square")
                qmap[m0.twin[q]] = d
                covered[min(d, cur.twin[d])] += 1
        if a is not None:
            x, y = pdart[a][1], pdart[cur.twin[a]][1]
            if m0.twin[cx.glue(t, x)] != cx.glue(t, y):
                rep.not_closing.append((stage, a))
                raise EngineError(f"stage {stage}: loaded edge {a} does not close "
                                  "around four polyhedra")
            e = min(a, cur.twin[a])
            erased.add(e)
            if count[a] + 1 != 4:
                rep.over_saturated.append((stage, a, count[a] + 1))
            rep.saturation_counts[count[a] + 1] += 1
            rep.saturated_edges += 1
            glued = {cx.face_in_copy(u, cx.glue(t, x)), cx.face_in_copy(u, cx.glue(t, y))}
        else:
            glued = {cx.face_in_copy(u, cx.glue(t, pdart[d][1])) for d in cur.faces[ufaces[0]]}
        if len(glued) != len(ufaces):
            raise EngineError(f"stage {stage}: open face glues onto {len(glued)} faces")
        for g in range(m0.num_faces):
            if g in glued:
                continue
            keys = []
            for x in cx.copy_faces[u][g]:
                b = qmap.get(x)
                if b is not None:
                    keys.append(old_key(b))
                else:
                    e = min(x, m0.twin[x])
                    key = ("n", ui, e)
                    new_kind[key] = m0.edge_kind[x]
                    keys.append((key, 1 if x == e else -1))
                new_pd.append((u, x))
            faces.append(keys)
            labels.append(REGION if cx.info[g].role == REGION else TERMINAL)
    for f, lab in enumerate(cur.face_labels):
        if f in glued_faces:
            continue
        faces.append([old_key(d) for d in cur.faces[f]])
        labels.append(lab)
        new_pd.extend(pdart[d] for d in cur.faces[f])
    for d, e in cur.edges():
        if d not in erased:
            new_kind[("e", d)] = cur.edge_kind[d]
    # edge counts and the loaded flag
    edge_count = {}
    for d, e in cur.edges():
        if d in erased:
            continue
        c = count[d] + covered[d]
        if c > 3:
            rep.over_saturated.append((stage, d, c))
        edge_count[("e", d)] = c
    loaded = {k for k, c in edge_count.items() if c == 3 and new_kind[k] == LINK}
    new = CombinatorialMap.from_faces(faces, labels, new_kind, loaded)
    cnt = [0] * new.num_darts
    pd = [None] * new.num_darts
    flat = [k for keys in faces for k in keys]
    for x, (key, _), p in zip(range(new.num_darts), flat, new_pd):
        cnt[x] = edge_count.get(key, 1)
        pd[x] = p
    if new.euler_characteristic() != 2:
        raise EngineError(f"stage {stage}: boundary is no longer a sphere")
    return new, pd, cnt


def local_homeomorphism_ok(cx: TruncatedComplex) -> bool:
    """Every link edge of the complex closes up after exactly 4 polyhedra."""
    return all(len(cx.edge_cycle(d)) == 4
               for d in range(cx.map.num_darts) if cx.map.edge_kind[d] == LINK)


# -- isomorphism ------------------------------------------------------------------

def _vertex_degrees(m: CombinatorialMap) -> list[int]:
    deg = [0] * m.num_darts
    for orbit in m.vertices():
        for d in orbit:
            deg[d] = len(orbit)
    return deg


def _dart_labels(t: Tiling | CombinatorialMap, face_key) -> list[tuple]:
    m = t.map if isinstance(t, Tiling) else t
    vdeg = _vertex_degrees(m)
    return [(face_key(m.face_labels[m.face_of[d]]), len(m.faces[m.face_of[d]]),
             vdeg[d], m.edge_kind[d], m.loaded[d]) for d in range(m.num_darts)]


def maps_isomorphic(a: Tiling | CombinatorialMap, b: Tiling | CombinatorialMap,
                    face_key=_role) -> tuple[bool, list[int] | None]:
    """Orientation-preserving isomorphism respecting face roles and edge labels.

    Returns ``(True, phi)`` with ``phi[d]`` the image of dart ``d`` of ``a``,
    or ``(False, None)``.  The anchor dart is drawn from the rarest label
    class; every candidate image is tried by propagation along ``succ`` and
    ``twin``.
    """
    ma = a.map if isinstance(a, Tiling) else a
    mb = b.map if isinstance(b, Tiling) else b
    if (ma.num_darts, ma.num_faces) != (mb.num_darts, mb.num_faces):
        return False, None
    la, lb = _dart_labels(ma, face_key), _dart_labels(mb, face_key)
    ca, cb = Counter(la), Counter(lb)
    if ca != cb:
        return False, None
    if ma.num_darts == 0:
        return True, []
    if len(ma.components()) != 1 or len(mb.components()) != 1:
        raise ValueError("isomorphism test needs connected maps")
    rare = min(ca, key=lambda k: (ca[k], k))
    anchor = la.index(rare)
    for cand in (d for d in range(mb.num_darts) if lb[d] == rare):
        phi = _propagate(ma, mb, la, lb, anchor, cand)
        if phi is not None:
            return True, phi
    return False, None


def _propagate(ma, mb, la, lb, x, y) -> list[int] | None:
    phi = [-1] * ma.num_darts
    used = [False] * mb.num_darts
    phi[x] = y
    used[y] = True
    queue = deque([x])
    while queue:
        d = queue.popleft()
        e = phi[d]
        for d2, e2 in ((ma.succ[d], mb.succ[e]), (ma.twin[d], mb.twin[e])):
            if phi[d2] < 0:
                if used[e2] or la[d2] != lb[e2]:
                    return None
                phi[d2] = e2
                used[e2] = True
                queue.append(d2)
            elif phi[d2] != e2:
                return None
    return phi


# -- censuses -----------------------------------------------------------------------

def tile_census(t: Tiling) -> dict[str, int]:
    """Tiles by label (outer face excluded); loaded pairs count once."""
    counts = Counter(lab for lab in t.labels if lab != OUTER)
    return dict(sorted(counts.items(), key=lambda kv: (kv[0] == TERMINAL, kv[0])))


def census_series(tilings: list[Tiling]) -> list[dict[str, int]]:
    return [tile_census(t) for t in tilings]


def total_series(tilings: list[Tiling]) -> list[int]:
    return [sum(tile_census(t).values()) for t in tilings]


def emit_census_csv(series: list[dict[str, int]], types: list[str] | None = None) -> str:
    if types is None:
        types = sorted({k for row in series for k in row},
                       key=lambda k: (k == TERMINAL, k))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["stage", "type", "count"])
    for stage, row in enumerate(series):
        for k in types:
            w.writerow([stage, k, row.get(k, 0)])
    return buf.getvalue()


def _smoothed(m: CombinatorialMap, keep: list[bool], face_label: list) -> CombinatorialMap | None:
    """The map formed by the kept darts with degree-2 vertices smoothed out.

    ``face_label[d]`` names the face to the left of kept dart ``d``.
    Returns ``None`` when every vertex has degree 2 (a single circle).
    """
    def csucc(d: int) -> int:
        x = m.succ[d]
        while not keep[x]:
            x = m.succ[m.twin[x]]
        return x

    vert = m.vertex_of()
    deg = Counter(vert[d] for d in range(m.num_darts) if keep[d])
    starts = [d for d in range(m.num_darts) if keep[d] and deg[vert[d]] != 2]
    if not starts:
        return None
    last = {}
    for s in starts:
        d = s
        while deg[vert[m.twin[d]]] == 2:
            d = csucc(d)
        last[s] = d
    rev = {s: m.twin[last[s]] for s in starts}
    nxt = {s: csucc(last[s]) for s in starts}
    faces, labels, seen = [], [], set()
    for s in starts:
        if s in seen:
            continue
        face, c = [], s
        while c not in seen:
            seen.add(c)
            e = min(c, rev[c])
            face.append((e, 1 if c == e else -1))
            c = nxt[c]
        faces.append(face)
        labels.append(face_label[s])
    return CombinatorialMap.from_faces(faces, labels)


def check_refinement(prev: Tiling, nxt: Tiling) -> list[str]:
    """Problems with ``nxt`` as a refinement of ``prev`` (empty when sound).

    The edges of ``nxt`` separating tiles with different parents are
    followed as chains; after smoothing degree-2 vertices they must rebuild
    ``prev`` exactly, each old face reappearing as the union of its
    children.  This relies only on the parent pointers, not on how the
    rule split the edges.
    """
    problems = []
    pm, nm = prev.map, nxt.map
    if nm.euler_characteristic() != pm.euler_characteristic():
        problems.append("Euler characteristic changed")
    for f, p in enumerate(nxt.parent):
        if not 0 <= p < pm.num_faces:
            problems.append(f"face {f} has no parent")
            return problems
        if _role(pm.face_labels[p]) in (TERMINAL, OUTER) and nm.face_labels[f] != pm.face_labels[p]:
            problems.append(f"tile {p} labelled {pm.face_labels[p]!r} was subdivided")
    if set(nxt.parent) != set(range(pm.num_faces)):
        problems.append("some parent tile has no children")
        return problems
    par = [nxt.parent[nm.face_of[d]] for d in range(nm.num_darts)]
    keep = [par[d] != par[nm.twin[d]] for d in range(nm.num_darts)]
    coarse = _smoothed(nm, keep, par)
    old = _smoothed(pm, [True] * pm.num_darts, list(pm.face_of))
    if old is None or coarse is None:
        if (old is None) != (coarse is None):
            problems.append("old edges do not persist as chains")
        return problems
    ok, _ = maps_isomorphic(old, coarse, face_key=lambda lab: lab)
    if not ok:
        problems.append("old edges do not persist as chains")
    return problems


def two_loaded_regions(t: Tiling) -> list[int]:
    """Region faces carrying two or more loaded edges."""
    m = t.map
    per_face = Counter(m.face_of[d] for d in range(m.num_darts) if m.loaded[d])
    return sorted(f for f, c in per_face.items() if c > 1)


__all__ = [
    "EngineError", "EvolveReport", "OUTER", "SPHERE", "Tiling", "census_series",
    "check_refinement", "collapse_merged_edges", "emit_census_csv", "initial_tiling",
    "local_homeomorphism_ok", "maps_isomorphic", "replacement_evolve", "subdivide",
    "subdivide_n", "two_loaded_regions", "tile_census", "total_series",
]
