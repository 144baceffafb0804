import pytest

from conftest import (load, reference_cube, reference_hexagonal_prism,
                      reference_truncated_octahedron)
from linksubdiv.engine import maps_isomorphic
from linksubdiv.planar_map import LINK, TRUNC, CombinatorialMap, MapError
from linksubdiv.polyhedral import (CCW, CW, REGION, SQUARE, checkerboard, emit_complex_json,
                                   gluing_twist, truncate)


def roles(cx):
    return cx.map.with_face_labels([i.role for i in cx.info])


# -- planar maps ----------------------------------------------------------------

def test_from_faces_rejects_unpaired_half_edge():
    with pytest.raises(MapError):
        CombinatorialMap.from_faces([[("a", 1), ("b", 1)], [("a", -1)]])


def test_mirror_is_involution_on_faces():
    m = load("trefoil")[2].map
    mm = m.mirror().mirror()
    assert sorted(map(sorted, mm.faces)) == sorted(map(sorted, m.faces))
    assert mm.succ == m.succ


def test_relabeled_map_is_isomorphic():
    m = load("figure_eight")[2].map
    perm = list(reversed(range(m.num_darts)))
    ok, phi = maps_isomorphic(m, m.relabeled(perm), face_key=lambda lab: lab.role)
    assert ok and len(set(phi)) == m.num_darts


# -- checkerboard ---------------------------------------------------------------

def test_hopf_checkerboard_two_and_two():
    _, m, cx = load("hopf")
    assert cx.orientation.counts() == {CW: 2, CCW: 2}


def test_trefoil_bigons_clockwise():
    _, m, cx = load("trefoil")
    for f, face in enumerate(m.faces):
        assert cx.orientation[f] == (CW if len(face) == 2 else CCW)


def test_borromean_four_and_four():
    assert load("borromean")[2].orientation.counts() == {CW: 4, CCW: 4}


def test_checkerboard_is_proper(admissible):
    _, m, cx = load(admissible)
    for d in range(m.num_darts):
        assert cx.orientation[m.face_of[d]] != cx.orientation[m.face_of[m.twin[d]]]


def test_flip_swaps_classes():
    d, m, _ = load("trefoil")
    a, b = checkerboard(m, d), checkerboard(m, d, flip_orientation=True)
    assert all(x != y for x, y in zip(a.orient, b.orient))


# -- truncation -----------------------------------------------------------------

@pytest.mark.parametrize("name,ref", [("hopf", reference_cube),
                                      ("trefoil", reference_hexagonal_prism),
                                      ("borromean", reference_truncated_octahedron)])
def test_truncated_polyhedra_match_references(name, ref):
    cx = load(name)[2]
    ok, _ = maps_isomorphic(roles(cx), ref(), face_key=lambda lab: lab)
    assert ok


def test_count_formulas(admissible):
    d, _, cx = load(admissible)
    c = d.crossing_count
    m = cx.map
    assert (m.num_vertices, m.num_edges, m.num_faces) == (4 * c, 6 * c, 2 * c + 2)
    assert len(cx.squares) == c


def test_region_degrees_and_alternation(admissible):
    _, dm, cx = load(admissible)
    m = cx.map
    for f in cx.regions:
        face = m.faces[f]
        assert len(face) == 2 * len(dm.faces[cx.info[f].origin])
        kinds = [m.edge_kind[x] for x in face]
        assert all(kinds[i] != kinds[i - 1] for i in range(len(kinds)))
    for f in cx.squares:
        assert [m.edge_kind[x] for x in m.faces[f]] == [TRUNC] * 4
        around = [cx.info[m.face_of[m.twin[x]]].orient for x in m.faces[f]]
        assert all(around[i] != around[i - 1] for i in range(4))


def test_link_edges_separate_orientations(admissible):
    cx = load(admissible)[2]
    m = cx.map
    for d in range(m.num_darts):
        if m.edge_kind[d] == LINK:
            a, b = cx.info[m.face_of[d]], cx.info[m.face_of[m.twin[d]]]
            assert a.role == b.role == REGION and {a.orient, b.orient} == {CW, CCW}


# -- gluing ---------------------------------------------------------------------

def test_hopf_twist_is_one_step_with_orientation():
    cx = load("hopf")[2]
    f = next(f for f in cx.regions if cx.info[f].orient == CW)
    g = gluing_twist(cx, f)
    assert (g.direction, g.steps) == (CW, 1)
    assert g == gluing_twist(cx, f)


def test_twist_rotates_by_one_link_step(admissible):
    # the partner of a boundary dart sits two positions (one link edge) away
    # in the mirror face, in the region's own rotation sense
    cx = load(admissible)[2]
    m = cx.map
    for f in cx.regions:
        face = cx.copy_faces[0][f]
        k = len(face)
        mirror = [m.twin[x] for x in face]          # same edges, as seen from copy 1
        shift = -2 if cx.info[f].orient == CW else 2
        for i, d in enumerate(face):
            assert cx.glue(0, d) == mirror[(i + shift) % k]


def test_twist_composed_with_mirror_is_identity(admissible):
    cx = load(admissible)[2]
    for f in cx.regions:
        there = gluing_twist(cx, f, copy=0).as_dict()
        back = gluing_twist(cx, f, copy=1).as_dict()
        assert all(back[x] == d for d, x in there.items())


def test_truncation_squares_are_not_glued():
    cx = load("hopf")[2]
    with pytest.raises(ValueError):
        gluing_twist(cx, cx.squares[0])
    assert cx.info[cx.squares[0]].role == SQUARE


def test_every_link_edge_meets_four_polyhedra(admissible):
    cx = load(admissible)[2]
    m = cx.map
    for d in range(m.num_darts):
        if m.edge_kind[d] == LINK:
            assert len(cx.edge_cycle(d)) == 4


def test_complex_json_is_stable():
    cx = load("trefoil")[2]
    a, b = emit_complex_json(cx), emit_complex_json(truncate(cx.diagram_map, cx.orientation))
    assert a == b and '"schema":"complex-v1"' in a
