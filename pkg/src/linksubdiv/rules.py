"""Replacement rules and the subdivision rule with boundary derived from them.

A *tile state* is the fine-grained description of an open tile on the
boundary sphere of the growing universal cover:

* ``("region", t, f)``: face ``f`` of a polyhedron copy ``t`` with no loaded
  edge;
* ``("pair", t, a)``: two faces of two different copies of type ``t``
  sharing a loaded edge.  ``a`` is the dart of the loaded edge in the owner
  face; the partner dart is determined by the gluing.

Expanding a state glues the next polyhedron (copy ``1 - t``) onto it.  Tile
*types* are classes of states whose expansions agree forever, found by
partition refinement over boundary-rooted patterns.

Child patterns refer to the parent boundary with ``("b", j, p)`` (piece
``p`` of parent boundary edge ``j``, pieces ordered along the parent's
counterclockwise boundary) and to interior edges with ``("i", e, sign)``.
The first reference of a child is its root.
"""

from __future__ import annotations

import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Callable

from .planar_map import LINK, TRUNC
from .polyhedral import CW, REGION, TruncatedComplex, flip

TERMINAL = "trunc"


class RuleError(RuntimeError):
    """An invariant the construction guarantees was violated."""


@dataclass(frozen=True)
class TileState:
    key: tuple
    copy: int
    boundary: tuple[int, ...]
    moved: tuple[bool, ...]
    orient: str

    @property
    def kind(self) -> str:
        return self.key[0]


def partner(cx: TruncatedComplex, t: int, a: int) -> int:
    """The dart facing ``a`` across a loaded edge (in a different copy of
    the same polyhedron type)."""
    return cx.glue(1 - t, cx.map.twin[cx.glue(t, a)])


def region_state(cx: TruncatedComplex, t: int, f: int) -> TileState:
    boundary = cx.copy_faces[t][f]
    return TileState(("region", t, f), t, boundary, (False,) * len(boundary),
                     cx.info[f].orient)


def _face_after(cx: TruncatedComplex, t: int, a: int) -> list[int]:
    succ = cx.copy_succ[t]
    out = []
    d = succ[a]
    while d != a:
        out.append(d)
        d = succ[d]
    return out


def pair_state(cx: TruncatedComplex, t: int, a: int) -> TileState:
    """Loaded pair owned by the face of ``a``; the partner's edges come last
    and are flagged as moved."""
    b = partner(cx, t, a)
    own, other = _face_after(cx, t, a), _face_after(cx, t, b)
    orient = cx.info[cx.face_in_copy(t, a)].orient
    return TileState(("pair", t, a), t, tuple(own + other),
                     (False,) * len(own) + (True,) * len(other), orient)


def state_from_key(cx: TruncatedComplex, key: tuple) -> TileState:
    if key[0] == "region":
        return region_state(cx, key[1], key[2])
    return pair_state(cx, key[1], key[2])


@dataclass(frozen=True)
class Child:
    """One subtile of a pattern.  ``state`` is ``None`` for truncation
    squares."""

    state: tuple | None
    refs: tuple[tuple, ...]
    role: str                 # "interior" | "edge" | "square" | "pair"
    face: int                 # polyhedron face of the glued copy it came from


@dataclass(frozen=True)
class ReplacementPattern:
    parent: tuple
    children: tuple[Child, ...]
    loaded: tuple[tuple[int, int], ...]      # (child index, position) on the old boundary
    pairs_formed: tuple[tuple, ...]           # pair-state keys seeded across old edges

    @property
    def face_count(self) -> int:
        return len(self.children)


@dataclass
class _Expansion:
    """Everything about gluing the next polyhedron onto one state."""

    state: TileState
    u: int
    qb: list[int]
    glued: set[int]
    pos_of_q: dict[int, int]
    kinds: list[str]


def _expand(cx: TruncatedComplex, st: TileState) -> _Expansion:
    m = cx.map
    t, u = st.copy, 1 - st.copy
    qb = [cx.glue(t, b) for b in st.boundary]
    if any(q < 0 for q in qb):
        raise RuleError(f"state {st.key} borders a truncation square")
    glued = {cx.face_in_copy(u, q) for q in qb}
    expected = 1 if st.kind == "region" else 2
    if len(glued) != expected:
        raise RuleError(f"state {st.key} glues onto {len(glued)} faces")
    if st.kind == "pair":
        a = st.key[2]
        b = partner(cx, t, a)
        if m.twin[cx.glue(t, a)] != cx.glue(t, b):
            raise RuleError(f"loaded edge of {st.key} does not close up "
                            "around four polyhedra")
    kinds = [m.edge_kind[b] for b in st.boundary]
    return _Expansion(st, u, qb, glued, {q: j for j, q in enumerate(qb)}, kinds)


def _ordered_face(cx: TruncatedComplex, u: int, g: int, start: int | None) -> list[int]:
    face = list(cx.copy_faces[u][g])
    if start is not None:
        i = face.index(start)
        face = face[i:] + face[:i]
    return face


def _internal(q: int, tq: int) -> tuple:
    return ("i", min(q, tq), 1 if q < tq else -1)


def replacement_pattern(cx: TruncatedComplex, st: TileState) -> ReplacementPattern:
    ex = _expand(cx, st)
    m = cx.map
    u = ex.u
    children = []
    loaded = []
    pairs = []
    for g in range(m.num_faces):
        if g in ex.glued:
            continue
        is_region = cx.info[g].role == REGION
        face = _ordered_face(cx, u, g, None)
        refs = []
        touches = 0
        for i, q in enumerate(face):
            tq = m.twin[q]
            j = ex.pos_of_q.get(tq)
            if j is not None:
                refs.append(("b", j, 0))
                if ex.kinds[j] == LINK:
                    touches += 1
                    loaded.append((len(children), i))
                    pairs.append(_pair_key(cx, u, q))
            else:
                refs.append(_internal(q, tq))
        if not is_region:
            role = "square"
        else:
            role = "edge" if touches else "interior"
        children.append(Child(("region", u, g) if is_region else None,
                              tuple(refs), role, g))
    return ReplacementPattern(st.key, tuple(children), tuple(loaded), tuple(pairs))


def single_region_pattern(cx: TruncatedComplex, region: int, copy: int = 0) -> ReplacementPattern:
    """Pattern of one polyhedron glued onto ``region`` of copy ``copy``."""
    if cx.info[region].role != REGION:
        raise ValueError(f"face {region} is a truncation square")
    return replacement_pattern(cx, region_state(cx, copy, region))


def loaded_pair_pattern(cx: TruncatedComplex, r1: int, r2: int,
                        copy: int = 0) -> ReplacementPattern:
    """Pattern of one polyhedron glued onto the loaded pair ``r1 | r2``.

    ``r2`` is the face of copy ``copy`` met across a loaded edge of ``r1``
    (the two regions belong to different polyhedra of the same copy).
    """
    for f in (r1, r2):
        if cx.info[f].role != REGION:
            raise ValueError(f"face {f} is a truncation square")
    if cx.info[r1].orient == cx.info[r2].orient:
        raise ValueError(f"regions {r1} and {r2} have the same orientation")
    m = cx.map
    for a in cx.copy_faces[copy][r1]:
        if m.edge_kind[a] != LINK:
            continue
        if cx.face_in_copy(copy, partner(cx, copy, a)) == r2:
            return replacement_pattern(cx, pair_state(cx, copy, a))
    raise ValueError(f"regions {r1} and {r2} are not adjacent across a loaded edge")


def _pair_key(cx: TruncatedComplex, t: int, a: int) -> tuple:
    return ("pair", t, min(a, partner(cx, t, a)))


@dataclass
class HazardReport:
    two_loaded: list = field(default_factory=list)
    movers_share_edge: list = field(default_factory=list)
    movers_share_vertex: list = field(default_factory=list)
    bad_valence: list = field(default_factory=list)
    same_orientation: list = field(default_factory=list)
    moved_truncation_edges: int = 0
    checked_patterns: int = 0

    @property
    def clean(self) -> bool:
        return not (self.two_loaded or self.movers_share_edge or self.movers_share_vertex
                    or self.bad_valence or self.same_orientation)

    def summary(self) -> dict:
        return {"patterns": self.checked_patterns,
                "two_loaded_edges": len(self.two_loaded),
                "movers_sharing_edge": len(self.movers_share_edge),
                "movers_sharing_interior_vertex": len(self.movers_share_vertex),
                "interior_vertex_valence_not_3": len(self.bad_valence),
                "loaded_edge_orientation_clash": len(self.same_orientation),
                "moved_truncation_edges": self.moved_truncation_edges}


@dataclass(frozen=True)
class SubdivisionPattern:
    parent: tuple
    splits: tuple[int, ...]
    children: tuple[Child, ...]
    movers: tuple[int, ...]        # glued-copy faces pushed onto the parent boundary


def subdivision_pattern(cx: TruncatedComplex, st: TileState,
                        hazards: HazardReport | None = None) -> SubdivisionPattern:
    """Child pattern in which every parent edge persists.

    Clockwise edge subregions are homotoped onto the loaded edge they touch;
    their remaining boundary becomes that edge's subdivision.  Counter-
    clockwise edge subregions become loaded-pair tiles.
    """
    ex = _expand(cx, st)
    m = cx.map
    u, t = ex.u, st.copy
    succ_u = cx.copy_succ[u]
    hz = hazards if hazards is not None else HazardReport()
    hz.checked_patterns += 1
    n_bd = len(st.boundary)

    splits = [1] * n_bd
    mover_at: dict[int, int] = {}
    piece_of: dict[int, tuple[int, int]] = {}
    for j in range(n_bd):
        if ex.kinds[j] != LINK:
            continue
        inner = m.twin[ex.qb[j]]
        g = cx.face_in_copy(u, inner)
        if cx.info[g].orient == CW:
            chain = []
            d = succ_u[inner]
            while d != inner:
                chain.append(d)
                d = succ_u[d]
            k = len(chain)
            splits[j] = k
            mover_at[j] = g
            for i, x in enumerate(chain, start=1):
                piece_of[x] = (j, k - i)
                if m.edge_kind[x] == TRUNC:
                    hz.moved_truncation_edges += 1
        else:
            nb = m.twin[st.boundary[j]]
            g2 = cx.face_in_copy(u, m.twin[cx.glue(t, nb)])
            if cx.info[g2].orient != CW:
                hz.same_orientation.append((st.key, j))
            splits[j] = len(cx.copy_faces[u][g2]) - 1

    movers = set(mover_at.values())
    if len(movers) != len(mover_at):
        hz.two_loaded.append((st.key, "mover on two boundary edges"))

    # hazard checks on the glued polyhedron
    for g in range(m.num_faces):
        if g in ex.glued or cx.info[g].role != REGION:
            continue
        contacts = [q for q in cx.copy_faces[u][g] if m.twin[q] in ex.pos_of_q]
        if len(contacts) > 1:
            hz.two_loaded.append((st.key, g))
    for g in movers:
        for q in cx.copy_faces[u][g]:
            if cx.face_in_copy(u, m.twin[q]) in movers - {g}:
                hz.movers_share_edge.append((st.key, g))
    vert = _copy_vertices(cx, u)
    boundary_verts = {vert[q] for g in ex.glued for q in cx.copy_faces[u][g]}
    seen_by: dict[int, int] = {}
    for g in sorted(movers):
        for q in cx.copy_faces[u][g]:
            v = vert[q]
            if v in boundary_verts:
                continue
            if v in seen_by and seen_by[v] != g:
                hz.movers_share_vertex.append((st.key, v))
            seen_by[v] = g
    for v, size in _vertex_sizes(cx, u).items():
        if v not in boundary_verts and size != 3:
            hz.bad_valence.append((st.key, v))

    children = []
    for g in range(m.num_faces):
        if g in ex.glued or g in movers:
            continue
        is_region = cx.info[g].role == REGION
        face = list(cx.copy_faces[u][g])
        link_contacts = [q for q in face
                         if m.twin[q] in ex.pos_of_q and ex.kinds[ex.pos_of_q[m.twin[q]]] == LINK]
        if is_region and link_contacts:
            a = link_contacts[0]
            face = _ordered_face(cx, u, g, succ_u[a])
            key = ("pair", u, a)
            role = "pair"
        else:
            key = ("region", u, g) if is_region else None
            role = "interior" if is_region else "square"
        refs = []
        for q in face:
            tq = m.twin[q]
            j = ex.pos_of_q.get(tq)
            if j is not None:
                if ex.kinds[j] == LINK:
                    refs.extend(("b", j, p) for p in range(splits[j]))
                else:
                    refs.append(("b", j, 0))
            elif tq in piece_of:
                jj, p = piece_of[tq]
                refs.append(("b", jj, p))
            else:
                refs.append(_internal(q, tq))
        children.append(Child(key, tuple(refs), role, g))
    return SubdivisionPattern(st.key, tuple(splits), tuple(children), tuple(sorted(movers)))


def _copy_vertices(cx: TruncatedComplex, u: int) -> list[int]:
    cache = cx.__dict__.setdefault("_vertex_cache", {})
    if u not in cache:
        m = cx.map
        succ = cx.copy_succ[u]
        pred = [0] * len(succ)
        for d, s in enumerate(succ):
            pred[s] = d
        rot = [m.twin[pred[d]] for d in range(m.num_darts)]
        out = [-1] * m.num_darts
        nv = 0
        for d in range(m.num_darts):
            if out[d] >= 0:
                continue
            x = d
            while out[x] < 0:
                out[x] = nv
                x = rot[x]
            nv += 1
        cache[u] = out
    return cache[u]


def _vertex_sizes(cx: TruncatedComplex, u: int) -> dict[int, int]:
    counts: dict[int, int] = defaultdict(int)
    for v in _copy_vertices(cx, u):
        counts[v] += 1
    return counts


# -- type classification ------------------------------------------------------

Describe = Callable[[tuple], tuple[list[tuple], tuple[Child, ...]]]


def _rooted_code(labels: list[tuple], children: tuple[Child, ...], r: int,
                 tag: Callable[[Child], tuple[object, frozenset]]) -> tuple:
    """Canonical code of a pattern rooted at boundary position ``r``."""
    n = len(labels)
    index: dict[tuple, int] = {}
    face_of: list[int] = []
    succ: list[int] = []
    lab: list[tuple] = []
    faces: list[list[tuple]] = []
    for ci, ch in enumerate(children):
        keys = []
        for ref in ch.refs:
            if ref[0] == "b":
                keys.append((("b", (ref[1] - r) % n, ref[2]), 1))
            else:
                keys.append((("i", ref[1]), ref[2]))
        faces.append(keys)
    pieces = defaultdict(int)
    for ch in children:
        for ref in ch.refs:
            if ref[0] == "b":
                pieces[(ref[1] - r) % n] = max(pieces[(ref[1] - r) % n], ref[2] + 1)
    outer = [(("b", j, p), -1) for j in reversed(range(n)) for p in reversed(range(pieces[j]))]
    faces.append(outer)
    tagged = [tag(ch) for ch in children] + [(("outer",), frozenset())]
    for fi, keys in enumerate(faces):
        start = len(face_of)
        for i, key in enumerate(keys):
            index[key] = len(face_of)
            face_of.append(fi)
            succ.append(start + (i + 1) % len(keys))
            e = key[0]
            if e[0] == "b":
                edge_label = ("b",) + tuple(labels[(e[1] + r) % n]) + (e[2],)
            else:
                edge_label = ("i",)
            lab.append((tagged[fi][0], i in tagged[fi][1], edge_label))
    twin = [index[(key[0], -key[1])] for keys in faces for key in keys]
    root = index[(("b", 0, 0), 1)]
    num = {root: 0}
    order = [root]
    queue = deque([root])
    while queue:
        d = queue.popleft()
        for e in (succ[d], twin[d]):
            if e not in num:
                num[e] = len(order)
                order.append(e)
                queue.append(e)
    return tuple((num[succ[d]], num[twin[d]], lab[d]) for d in order)


def classify(keys: list[tuple], describe: Describe) -> tuple[dict[tuple, int], dict[tuple, int]]:
    """Partition states into types.

    Returns ``(type_of, root_of)``: a type index per state and the boundary
    position that aligns the state with its type's representative.
    """
    desc = {k: describe(k) for k in keys}
    rooted = [(k, r) for k in keys for r in range(len(desc[k][0]))]
    cls = {kr: 0 for kr in rooted}
    count = 1
    while True:
        best = {}
        for k in keys:
            vals = [cls[(k, r)] for r in range(len(desc[k][0]))]
            low = min(vals)
            best[k] = (low, frozenset(r for r, v in enumerate(vals) if v == low))

        def tag(ch: Child) -> tuple[object, frozenset]:
            if ch.state is None:
                # squares and unstated subregions look the same from every corner
                return (("sq",) if ch.role == "square" else (ch.role,)), \
                    frozenset(range(len(ch.refs)))
            low, roots = best[ch.state]
            return ("t", low), roots

        codes: dict[tuple, int] = {}
        new = {}
        for k, r in rooted:
            labels, children = desc[k]
            code = (cls[(k, r)], _rooted_code(labels, children, r, tag))
            new[(k, r)] = codes.setdefault(code, len(codes))
        cls = new
        if len(codes) == count:
            break
        count = len(codes)
    type_of: dict[tuple, int] = {}
    root_of: dict[tuple, int] = {}
    orbit_ids: dict[int, int] = {}
    for k in keys:
        n = len(desc[k][0])
        best = min(range(n), key=lambda r: cls[(k, r)])
        c = cls[(k, best)]
        type_of[k] = orbit_ids.setdefault(c, len(orbit_ids))
        root_of[k] = best
    return type_of, root_of


# -- rules --------------------------------------------------------------------

@dataclass
class ReplacementRule:
    complex: TruncatedComplex
    states: dict[tuple, TileState]
    patterns: dict[tuple, ReplacementPattern]
    type_of: dict[tuple, str]

    def type_ids(self) -> list[str]:
        return sorted(set(self.type_of.values()), key=_type_sort_key)

    def census(self) -> dict[str, int]:
        return {"non_terminal": len(self.type_ids()), "terminal": 1}


def derive_replacement_rule(cx: TruncatedComplex, type_budget: int = 10_000) -> ReplacementRule:
    """Enumerate every state reachable from the initial polyhedron."""
    seeds = [("region", 0, f) for f in cx.regions]
    states: dict[tuple, TileState] = {}
    patterns: dict[tuple, ReplacementPattern] = {}
    queue = deque(seeds)
    while queue:
        key = queue.popleft()
        if key in states:
            continue
        if len(states) >= type_budget:
            raise RuleError(f"replacement rule not closed within {type_budget} states")
        st = state_from_key(cx, key)
        states[key] = st
        pat = replacement_pattern(cx, st)
        patterns[key] = pat
        for ch in pat.children:
            if ch.state is not None and ch.role == "interior":
                queue.append(ch.state)
        queue.extend(pat.pairs_formed)
    for key, pat in patterns.items():
        touched = defaultdict(int)
        for ci, _ in pat.loaded:
            touched[ci] += 1
        if any(v > 1 for v in touched.values()):
            raise RuleError(f"pattern of {key} has a subregion with two loaded edges")

    def describe(key: tuple):
        st = states[key]
        # a pair's own and partner halves carry opposite orientations
        labels = [(cx.map.edge_kind[b], st.kind, flip(st.orient) if mv else st.orient)
                  for b, mv in zip(st.boundary, st.moved)]
        # edge subregions are covered as part of a loaded pair, so only the
        # interior ones carry their own state into the next stage
        kids = tuple(ch if ch.role == "interior" else Child(None, ch.refs, ch.role, ch.face)
                     for ch in patterns[key].children)
        return labels, kids

    keys = list(states)
    type_idx, _ = classify(keys, describe)
    names = _name_types(keys, type_idx, states)
    return ReplacementRule(cx, states, patterns, {k: names[type_idx[k]] for k in keys})


def _name_types(keys: list[tuple], type_idx: dict[tuple, int],
                states: dict[tuple, TileState]) -> dict[int, str]:
    rank = {}
    for k in keys:
        st = states[k]
        order = (0 if st.kind == "region" else 1, 0 if st.orient == CW else 1, type_idx[k])
        rank[type_idx[k]] = min(rank.get(type_idx[k], order), order)
    ordered = sorted(rank, key=lambda i: rank[i])
    return {idx: _letter(i) for i, idx in enumerate(ordered)}


def _letter(i: int) -> str:
    if i < 26:
        return chr(ord("A") + i)
    return chr(ord("A") + i % 26) + str(i // 26)


def _type_sort_key(name: str) -> tuple:
    return (len(name) > 1, int(name[1:]) if len(name) > 1 else 0, name[0])


@dataclass(frozen=True)
class EdgeDesc:
    kind: str
    split: int
    moved: bool = False


@dataclass(frozen=True)
class TileType:
    id: str
    kind: str                      # "region" | "pair"
    orient: str
    signature: tuple[EdgeDesc, ...]
    children: tuple[tuple[str, tuple[tuple, ...]], ...]   # (child type id or "trunc", refs)
    representative: tuple

    @property
    def boundary_length(self) -> int:
        return len(self.signature)


@dataclass
class SubdivisionRule:
    complex: TruncatedComplex
    types: dict[str, TileType]
    state_type: dict[tuple, tuple[str, int]]      # state -> (type id, root offset)
    hazards: HazardReport
    replacement: ReplacementRule | None = None

    def type_ids(self) -> list[str]:
        return sorted(self.types, key=_type_sort_key)

    def sphere_seed(self) -> list[tuple[str, int] | None]:
        """(type, root offset) per face of the initial polyhedron."""
        cx = self.complex
        return [self.state_type[("region", 0, f)] if cx.info[f].role == REGION else None
                for f in range(cx.map.num_faces)]


def to_subdivision_rule(replacement: ReplacementRule, type_budget: int = 10_000) -> SubdivisionRule:
    cx = replacement.complex
    hazards = HazardReport()
    states: dict[tuple, TileState] = {}
    patterns: dict[tuple, SubdivisionPattern] = {}
    queue = deque(("region", 0, f) for f in cx.regions)
    while queue:
        key = queue.popleft()
        if key in states:
            continue
        if len(states) >= type_budget:
            raise RuleError(f"subdivision rule not closed within {type_budget} states")
        st = state_from_key(cx, key)
        states[key] = st
        pat = subdivision_pattern(cx, st, hazards)
        patterns[key] = pat
        for ch in pat.children:
            if ch.state is not None:
                queue.append(ch.state)
    if not hazards.clean:
        raise RuleError(f"subdivision hazards detected: {hazards.summary()}")

    def labels_of(key: tuple) -> list[tuple]:
        st, pat = states[key], patterns[key]
        return [(cx.map.edge_kind[b], pat.splits[j], st.moved[j])
                for j, b in enumerate(st.boundary)]

    def describe(key: tuple):
        return labels_of(key), patterns[key].children

    keys = list(states)
    type_idx, root_of = classify(keys, describe)
    names = _name_types(keys, type_idx, states)

    types: dict[str, TileType] = {}
    state_type = {k: (names[type_idx[k]], root_of[k]) for k in keys}
    for k in keys:
        name = names[type_idx[k]]
        if name in types:
            continue
        st, pat = states[k], patterns[k]
        r = root_of[k]
        n = len(st.boundary)
        labels = labels_of(k)
        sig = tuple(EdgeDesc(*labels[(j + r) % n]) for j in range(n))
        kids = []
        for ch in pat.children:
            refs = [(("b", (ref[1] - r) % n, ref[2]) if ref[0] == "b" else ref)
                    for ref in ch.refs]
            if ch.state is None:
                kids.append((TERMINAL, tuple(refs)))
                continue
            ctype, croot = state_type[ch.state]
            refs = refs[croot:] + refs[:croot]
            kids.append((ctype, tuple(refs)))
        types[name] = TileType(name, st.kind, st.orient, sig, tuple(kids), k)
    rule = SubdivisionRule(cx, types, state_type, hazards, replacement)
    _check_refinement(rule)
    return rule


def _check_refinement(rule: SubdivisionRule) -> None:
    """Every parent edge appears, split per its signature, exactly once."""
    for tt in rule.types.values():
        seen = defaultdict(int)
        for ctype, refs in tt.children:
            if ctype != TERMINAL and rule.types[ctype].boundary_length != len(refs):
                raise RuleError(f"child of {tt.id} has wrong boundary length")
            for ref in refs:
                if ref[0] == "b":
                    seen[ref[1], ref[2]] += 1
        want = {(j, p) for j, e in enumerate(tt.signature) for p in range(e.split)}
        if set(seen) != want or any(v != 1 for v in seen.values()):
            raise RuleError(f"type {tt.id} is not a refinement of its boundary")


# -- compatibility --------------------------------------------------------------

@dataclass
class CompatibilityReport:
    checked: list[tuple] = field(default_factory=list)
    mismatches: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _split(rule: SubdivisionRule, tid: str, pos: int) -> int:
    if tid == TERMINAL:
        return 1
    return rule.types[tid].signature[pos].split


def verify_edge_compatibility(rule: SubdivisionRule) -> CompatibilityReport:
    """Closure of all realizable adjacencies ``(type, position | type,
    position)``; shared edges must split into the same number of pieces."""
    report = CompatibilityReport()
    cx = rule.complex
    seed = rule.sphere_seed()
    start = set()
    m = cx.map
    for d in range(m.num_darts):
        e = m.twin[d]
        start.add(_norm(_side(rule, seed, cx, d), _side(rule, seed, cx, e)))
    # adjacencies inside every child pattern
    for tt in rule.types.values():
        start |= _internal_adjacencies(tt)
    seen = set()
    queue = deque(sorted(start))
    while queue:
        adj = queue.popleft()
        if adj in seen:
            continue
        seen.add(adj)
        (t1, p1), (t2, p2) = adj
        k1, k2 = _split(rule, t1, p1), _split(rule, t2, p2)
        report.checked.append(adj)
        if k1 != k2:
            report.mismatches.append((adj, k1, k2))
            continue
        if t1 == TERMINAL and t2 == TERMINAL:
            continue
        for p in range(k1):
            a = _child_at(rule, t1, p1, p)
            b = _child_at(rule, t2, p2, k1 - 1 - p)
            queue.append(_norm(a, b))
    return report


def _side(rule, seed, cx, d) -> tuple[str, int]:
    f = cx.map.face_of[d]
    entry = seed[f]
    if entry is None:
        return (TERMINAL, cx.map.faces[f].index(d))
    tid, root = entry
    face = cx.map.faces[f]
    return (tid, (face.index(d) - root) % len(face))


def _norm(a, b):
    return (a, b) if a <= b else (b, a)


def _child_at(rule: SubdivisionRule, tid: str, pos: int, piece: int) -> tuple[str, int]:
    if tid == TERMINAL:
        return (TERMINAL, pos)
    for ctype, refs in rule.types[tid].children:
        for i, ref in enumerate(refs):
            if ref[0] == "b" and ref[1] == pos and ref[2] == piece:
                return (ctype, i)
    raise RuleError(f"type {tid} has no child on piece {piece} of edge {pos}")


def _internal_adjacencies(tt: TileType) -> set:
    where = {}
    out = set()
    for ctype, refs in tt.children:
        for i, ref in enumerate(refs):
            if ref[0] == "i":
                key = (ref[1], -ref[2])
                if key in where:
                    out.add(_norm(where.pop(key), (ctype, i)))
                else:
                    where[(ref[1], ref[2])] = (ctype, i)
    return out


# -- serialisation --------------------------------------------------------------

def emit_rule_json(rule: SubdivisionRule) -> str:
    compat = verify_edge_compatibility(rule)
    doc = {
        "schema": "rule-v1",
        "types": [
            {"id": tt.id, "kind": tt.kind, "orientation": tt.orient,
             "boundary": [{"kind": e.kind, "split": e.split, "moved": e.moved}
                          for e in tt.signature],
             "children": [{"type": c, "refs": [list(r) for r in refs]}
                          for c, refs in tt.children]}
            for tt in (rule.types[i] for i in rule.type_ids())],
        "terminal": TERMINAL,
        "hazards": rule.hazards.summary(),
        "compatibility": {
            "checked": [[list(a), list(b)] for a, b in sorted(compat.checked)],
            "mismatches": len(compat.mismatches)},
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"
