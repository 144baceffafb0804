import json

import pytest

from conftest import ADMISSIBLE, load, rules
from linksubdiv.planar_map import LINK, TRUNC
from linksubdiv.polyhedral import CCW, CW, checkerboard, truncate
from linksubdiv.rules import (TERMINAL, derive_replacement_rule, emit_rule_json,
                              loaded_pair_pattern, partner, single_region_pattern,
                              to_subdivision_rule, verify_edge_compatibility)


def regions(cx, orient=None, degree=None):
    m = cx.map
    return [f for f in cx.regions
            if (orient is None or cx.info[f].orient == orient)
            and (degree is None or len(m.faces[f]) == 2 * degree)]


def adjacent_pair(cx):
    """A cw region and the ccw region met across one of its loaded edges."""
    m = cx.map
    f = regions(cx, CW)[0]
    a = next(x for x in cx.copy_faces[0][f] if m.edge_kind[x] == LINK)
    return f, cx.face_in_copy(0, partner(cx, 0, a))


# -- censuses -------------------------------------------------------------------

@pytest.mark.parametrize("name,count", [("hopf", 3), ("trefoil", 3), ("borromean", 3)])
def test_type_census(name, count):
    rep, sub = rules(name)
    assert rep.census() == {"non_terminal": count, "terminal": 1}
    assert len(sub.type_ids()) == count


def test_replacement_and_subdivision_censuses_agree(admissible):
    rep, sub = rules(admissible)
    assert len(rep.type_ids()) == len(sub.type_ids())


def test_hopf_types_are_two_regions_and_a_pair():
    _, sub = rules("hopf")
    kinds = {(tt.kind, tt.orient) for tt in sub.types.values()}
    assert kinds == {("region", CW), ("region", CCW), ("pair", CCW)}


def test_trefoil_type_a_is_the_clockwise_bigon():
    _, sub = rules("trefoil")
    a = sub.types["A"]
    assert (a.kind, a.orient, a.boundary_length) == ("region", CW, 4)
    assert sub.types["B"].boundary_length == 6


# -- edge splits ----------------------------------------------------------------

def test_hopf_b_splits_side_edges_in_three():
    _, sub = rules("hopf")
    b = sub.types["B"]
    assert [(e.kind, e.split) for e in b.signature] == [(LINK, 3), (TRUNC, 1)] * 2


def test_hopf_a_carries_matching_split():
    _, sub = rules("hopf")
    a = sub.types["A"]
    assert [(e.kind, e.split) for e in a.signature] == [(LINK, 3), (TRUNC, 1)] * 2


def test_link_split_is_mover_boundary_minus_one(admissible):
    # a loaded edge is replaced by the rest of the clockwise mover's boundary
    cx = load(admissible)[2]
    _, sub = rules(admissible)
    lengths = {len(cx.map.faces[f]) - 1 for f in regions(cx, CW)}
    for tt in sub.types.values():
        for e in tt.signature:
            if e.kind == LINK:
                assert e.split in lengths
            else:
                assert e.split == 1


def test_refinement_every_boundary_piece_used_once(admissible):
    _, sub = rules(admissible)
    for tt in sub.types.values():
        used = [r[1:] for _, refs in tt.children for r in refs if r[0] == "b"]
        want = [(j, p) for j, e in enumerate(tt.signature) for p in range(e.split)]
        assert sorted(used) == sorted(want)


def test_children_boundary_lengths_match_types(admissible):
    _, sub = rules(admissible)
    for tt in sub.types.values():
        for ctype, refs in tt.children:
            n = 4 if ctype == TERMINAL else sub.types[ctype].boundary_length
            assert len(refs) == n


# -- replacement patterns --------------------------------------------------------

def test_hopf_clockwise_pattern():
    cx = load("hopf")[2]
    pat = single_region_pattern(cx, regions(cx, CW)[0])
    roles = sorted(ch.role for ch in pat.children)
    assert roles == ["edge", "edge", "interior", "square", "square"]
    assert len(pat.loaded) == 2


def test_trefoil_triangle_pattern_has_seven_subtiles():
    cx = load("trefoil")[2]
    tri = regions(cx, CCW, degree=3)[0]
    assert single_region_pattern(cx, tri).face_count == 7


def test_pattern_sizes(admissible):
    # one glued polyhedron has 2c + 2 faces; one (or two) of them is glued on
    d, _, cx = load(admissible)
    c = d.crossing_count
    for f in cx.regions:
        assert single_region_pattern(cx, f).face_count == 2 * c + 1
    r1, r2 = adjacent_pair(cx)
    assert loaded_pair_pattern(cx, r1, r2).face_count == 2 * c


def test_each_subregion_meets_at_most_one_loaded_edge(admissible):
    rep, _ = rules(admissible)
    for pat in rep.patterns.values():
        touched = [ci for ci, _ in pat.loaded]
        assert len(touched) == len(set(touched))


def test_pair_pattern_errors():
    cx = load("hopf")[2]
    cw, ccw = regions(cx, CW), regions(cx, CCW)
    with pytest.raises(ValueError):
        loaded_pair_pattern(cx, cx.squares[0], ccw[0])
    with pytest.raises(ValueError):
        loaded_pair_pattern(cx, cw[0], cw[1])
    with pytest.raises(ValueError):
        single_region_pattern(cx, cx.squares[0])


def test_pair_pattern_rejects_non_adjacent_regions():
    cx = load("borromean")[2]
    m = cx.map
    f = regions(cx, CW)[0]
    near = {cx.face_in_copy(0, partner(cx, 0, a))
            for a in cx.copy_faces[0][f] if m.edge_kind[a] == LINK}
    far = [g for g in regions(cx, CCW) if g not in near]
    assert far
    with pytest.raises(ValueError):
        loaded_pair_pattern(cx, f, far[0])


# -- hazards and compatibility ---------------------------------------------------

def test_no_hazards(admissible):
    _, sub = rules(admissible)
    s = sub.hazards.summary()
    assert sub.hazards.clean and s["patterns"] > 0
    assert s["interior_vertex_valence_not_3"] == 0


def test_compatibility_zero_mismatches(admissible):
    _, sub = rules(admissible)
    rep = verify_edge_compatibility(sub)
    assert rep.ok and rep.checked


def test_flipped_orientation_also_clean():
    d, m, _ = load("figure_eight")
    cx = truncate(m, checkerboard(m, d, flip_orientation=True))
    sub = to_subdivision_rule(derive_replacement_rule(cx))
    assert sub.hazards.clean and verify_edge_compatibility(sub).ok


# -- determinism and serialisation -----------------------------------------------

@pytest.mark.parametrize("name", ADMISSIBLE[:5])
def test_rule_json_deterministic(name):
    _, sub = rules(name)
    cx = load(name)[2]
    again = to_subdivision_rule(derive_replacement_rule(truncate(cx.diagram_map, cx.orientation)))
    assert emit_rule_json(sub) == emit_rule_json(again)


def test_rule_json_content():
    doc = json.loads(emit_rule_json(rules("hopf")[1]))
    assert doc["schema"] == "rule-v1" and doc["terminal"] == TERMINAL
    assert [t["id"] for t in doc["types"]] == ["A", "B", "C"]
    assert all(v == 0 for k, v in doc["hazards"].items()
               if k not in ("patterns", "moved_truncation_edges"))
