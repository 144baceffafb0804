from __future__ import annotations

import functools
import math
from pathlib import Path

import pytest

from linksubdiv.link_diagram import build_planar_map, parse_pd_code
from linksubdiv.planar_map import LINK, TRUNC, CombinatorialMap
from linksubdiv.polyhedral import checkerboard, truncate
from linksubdiv.rules import derive_replacement_rule, to_subdivision_rule

FIXTURES = Path(__file__).parent / "fixtures"

ADMISSIBLE = ["hopf", "trefoil", "figure_eight", "cinquefoil", "borromean", "knot6",
              "torus7", "knot7", "knot8_18"]
REJECTED = ["unknot1", "two_hopf", "granny"]
SMALL = ["hopf", "trefoil", "figure_eight", "borromean"]


def fixture_text(name: str) -> str:
    return (FIXTURES / f"{name}.pd").read_text()


@functools.lru_cache(maxsize=None)
def load(name: str):
    """(diagram, map, complex) for a fixture."""
    d = parse_pd_code(fixture_text(name))
    m = build_planar_map(d)
    cx = truncate(m, checkerboard(m, d))
    return d, m, cx


@functools.lru_cache(maxsize=None)
def rules(name: str):
    """(replacement rule, subdivision rule) for a fixture."""
    cx = load(name)[2]
    rep = derive_replacement_rule(cx)
    return rep, to_subdivision_rule(rep)


@pytest.fixture(params=ADMISSIBLE)
def admissible(request):
    return request.param


# -- hand-built convex polyhedra ---------------------------------------------

def convex_polyhedron(points, normals, square_normals=()):
    """Boundary map of a convex polyhedron from its vertices and face normals.

    Each face is the set of vertices maximising the dot product with its
    normal, ordered counterclockwise seen from outside.  Faces whose normal is
    listed in ``square_normals`` are labelled ``"trunc"`` and their edges get
    kind ``trunc``.
    """
    sq = {tuple(n) for n in square_normals}
    faces, labels = [], []
    trunc_edges = set()
    for n in normals:
        dots = [sum(a * b for a, b in zip(p, n)) for p in points]
        top = max(dots)
        idx = [i for i, v in enumerate(dots) if abs(v - top) < 1e-9]
        cx = [sum(points[i][k] for i in idx) / len(idx) for k in range(3)]
        # orthonormal frame (u, v) with u x v = n
        nn = math.sqrt(sum(a * a for a in n))
        nz = [a / nn for a in n]
        ref = [1.0, 0.0, 0.0] if abs(nz[0]) < 0.9 else [0.0, 1.0, 0.0]
        u = [ref[1] * nz[2] - ref[2] * nz[1], ref[2] * nz[0] - ref[0] * nz[2],
             ref[0] * nz[1] - ref[1] * nz[0]]
        v = [nz[1] * u[2] - nz[2] * u[1], nz[2] * u[0] - nz[0] * u[2],
             nz[0] * u[1] - nz[1] * u[0]]
        ang = {i: math.atan2(sum((points[i][k] - cx[k]) * v[k] for k in range(3)),
                             sum((points[i][k] - cx[k]) * u[k] for k in range(3)))
               for i in idx}
        cyc = sorted(idx, key=lambda i: ang[i])
        face = []
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            face.append(((min(a, b), max(a, b)), 1 if a < b else -1))
            if tuple(n) in sq:
                trunc_edges.add((min(a, b), max(a, b)))
        faces.append(face)
        labels.append("trunc" if tuple(n) in sq else "region")
    kinds = {e: (TRUNC if e in trunc_edges else LINK) for f in faces for e, _ in f}
    m = CombinatorialMap.from_faces(faces, labels, kinds)
    m.check()
    return m


def reference_cube():
    pts = [(x, y, z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]
    normals = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    return convex_polyhedron(pts, normals, [(0, 0, 1), (0, 0, -1)])


def reference_hexagonal_prism():
    pts = [(math.cos(k * math.pi / 3), math.sin(k * math.pi / 3), z)
           for z in (-1, 1) for k in range(6)]
    sides = [(math.cos((k + 0.5) * math.pi / 3), math.sin((k + 0.5) * math.pi / 3), 0)
             for k in range(6)]
    normals = [(0, 0, 1), (0, 0, -1)] + sides
    return convex_polyhedron(pts, normals, sides[::2])


def reference_truncated_octahedron():
    import itertools
    pts = set()
    for perm in itertools.permutations((0, 1, 2)):
        for s1 in (-1, 1):
            for s2 in (-1, 1):
                p = list(perm)
                p[p.index(1)] *= s1
                p[p.index(2) if 2 in p else p.index(-2)] *= s2
                pts.add(tuple(p))
    pts = sorted(pts)
    squares = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    hexes = [(a, b, c) for a in (-1, 1) for b in (-1, 1) for c in (-1, 1)]
    return convex_polyhedron(pts, squares + hexes, squares)
