"""Invariants over random alternating braid closures and random relabelings."""

import random

from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from linksubdiv.engine import (EvolveReport, collapse_merged_edges, initial_tiling,
                               maps_isomorphic, replacement_evolve, subdivide_n,
                               two_loaded_regions, tile_census)
from linksubdiv.link_diagram import (LinkDiagram, braid_closure_pd, build_planar_map,
                                     diagrams_isomorphic, emit_pd, parse_pd_code, validate)
from linksubdiv.polyhedral import checkerboard, truncate
from linksubdiv.rules import (derive_replacement_rule, to_subdivision_rule,
                              verify_edge_compatibility)

SETTINGS = settings(max_examples=25, deadline=None,
                    suppress_health_check=[HealthCheck.filter_too_much, HealthCheck.too_slow])

# sigma_1 positive and sigma_2 negative keep a 3-strand closure alternating
words = st.lists(st.sampled_from([1, -2]), min_size=4, max_size=8)


def admissible_complex(word):
    d = braid_closure_pd(word, 3)
    m = build_planar_map(d)
    assume(validate(d, m).admissible)
    return d, m, truncate(m, checkerboard(m, d))


def relabel(d: LinkDiagram, seed: int) -> LinkDiagram:
    rng = random.Random(seed)
    arcs = sorted(d.arcs())
    perm = dict(zip(arcs, rng.sample(range(1, len(arcs) + 1), len(arcs))))
    crossings = [tuple(perm[a] for a in x) for x in d.crossings]
    rng.shuffle(crossings)
    return LinkDiagram(tuple(crossings))


@SETTINGS
@given(words)
def test_truncated_counts_and_gluing(word):
    d, _, cx = admissible_complex(word)
    c = d.crossing_count
    assert (cx.map.num_vertices, cx.map.num_edges, cx.map.num_faces) == (4 * c, 6 * c, 2 * c + 2)
    assert cx.map.euler_characteristic() == 2
    assert all(len(cx.edge_cycle(x)) == 4 for x in range(cx.map.num_darts)
               if cx.map.edge_kind[x] == "link")


@SETTINGS
@given(words)
def test_rule_is_hazard_free_and_compatible(word):
    _, _, cx = admissible_complex(word)
    rep = derive_replacement_rule(cx)
    sub = to_subdivision_rule(rep)
    assert sub.hazards.clean
    assert verify_edge_compatibility(sub).ok
    assert len(rep.type_ids()) == len(sub.type_ids())


@SETTINGS
@given(words)
def test_subdivision_matches_replacement(word):
    _, _, cx = admissible_complex(word)
    sub = to_subdivision_rule(derive_replacement_rule(cx))
    t = subdivide_n(sub, initial_tiling(sub), 2)[-1]
    report = EvolveReport()
    oracle = replacement_evolve(cx, 2, report)
    assert report.clean and two_loaded_regions(oracle) == []
    assert maps_isomorphic(collapse_merged_edges(t), oracle)[0]


def oriented(cx):
    return cx.map.with_face_labels([(i.role, i.orient) for i in cx.info])


def signature_multiset(sub):
    out = []
    for tt in sub.types.values():
        sig = [(e.kind, e.split, e.moved) for e in tt.signature]
        out.append((tt.kind, tt.orient, min(tuple(sig[k:] + sig[:k]) for k in range(len(sig)))))
    return sorted(out)


@SETTINGS
@given(words, st.integers(0, 10 ** 6))
def test_relabeling_changes_nothing(word, seed):
    # the clockwise class follows the labels, so the relabeled diagram
    # reproduces the original complex either as is or with classes swapped
    d, _, cx = admissible_complex(word)
    d2 = relabel(d, seed)
    assert diagrams_isomorphic(d, d2)
    assert diagrams_isomorphic(parse_pd_code(emit_pd(d2)), d)
    m2 = build_planar_map(d2)
    same = [truncate(m2, checkerboard(m2, d2, flip)) for flip in (False, True)]
    same = [c for c in same
            if maps_isomorphic(oriented(cx), oriented(c), face_key=lambda lab: lab)[0]]
    assert same
    s1 = to_subdivision_rule(derive_replacement_rule(cx))
    s2 = to_subdivision_rule(derive_replacement_rule(same[0]))
    assert signature_multiset(s1) == signature_multiset(s2)
    c1 = sorted(tile_census(subdivide_n(s1, initial_tiling(s1), 2)[-1]).values())
    c2 = sorted(tile_census(subdivide_n(s2, initial_tiling(s2), 2)[-1]).values())
    assert c1 == c2


@SETTINGS
@given(st.integers(2, 9))
def test_torus_knots_two_strands(n):
    d = braid_closure_pd([1] * n, 2)
    m = build_planar_map(d)
    assert validate(d, m).admissible
    sub = to_subdivision_rule(derive_replacement_rule(truncate(m, checkerboard(m, d))))
    assert len(sub.type_ids()) == 3 and sub.hazards.clean
