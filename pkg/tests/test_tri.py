import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from mdcensus.decomp import Decomposition, InvalidDecomposition, fatgraph_from_walks
from mdcensus.fatgraph import fatten
from mdcensus.multigraph import MultiGraph, generate
from mdcensus.oracle import ONE_VERTEX_3MFLD, enumerate_gluings
from mdcensus.tri import (
    Triangulation,
    decomposition_to_triangulation,
    edge_classes,
    euler_characteristic,
    inverse,
    is_3manifold,
    is_orientable,
    isomorphic,
    perm_sign,
    triangulation_to_decomposition,
    vertex_classes,
    vertex_links,
)

T_TEXT = "(1) (1,2,4,-2,3,-4,-3,-1,3,-2) (4)"
SPHERE_GRAPH = MultiGraph.from_text("2; 0-0,0-1,0-1,1-1")
LETTERS = "abcdefgh"  # a-d are the vertices of tet 0, e-h those of tet 1


def from_face_notation(n, gluings):
    """Build a triangulation from identifications written like ``abc=hfe``."""
    pairs = []
    for text in gluings:
        src, dst = text.split("=")
        ti, tj = LETTERS.index(src[0]) // 4, LETTERS.index(dst[0]) // 4
        sv = [LETTERS.index(c) % 4 for c in src]
        dv = [LETTERS.index(c) % 4 for c in dst]
        f = ({0, 1, 2, 3} - set(sv)).pop()
        g = ({0, 1, 2, 3} - set(dv)).pop()
        p = [0] * 4
        p[f] = g
        for a, b in zip(sv, dv):
            p[a] = b
        pairs.append((ti, f, tj, g, p))
    return Triangulation.from_pairs(n, pairs)


SPHERE_TABLE = from_face_notation(2, ["abc=hfe", "abd=gfe", "acd=bcd", "egh=fgh"])


def all_gluings(max_n=2):
    return [t for n in range(1, max_n + 1) for g in generate(n) for t in enumerate_gluings(g)]


ALL_SMALL = all_gluings()


def test_sphere_table_is_a_one_vertex_sphere():
    t = SPHERE_TABLE
    assert t.is_closed()
    assert is_3manifold(t)
    assert len(vertex_classes(t)) == 1
    assert len(edge_classes(t)) == 3
    assert euler_characteristic(t) == 0
    links = vertex_links(t)
    assert len(links) == 1 and links[0].is_sphere()
    assert is_orientable(t)


def test_decomposition_to_triangulation_matches_table():
    d = Decomposition.from_text(T_TEXT)
    fg = fatgraph_from_walks(d)
    t = decomposition_to_triangulation(d, fg)
    assert t.tet_count == 2
    assert isomorphic(t, SPHERE_TABLE)
    assert len(vertex_classes(t)) == 1 and len(edge_classes(t)) == 3
    assert euler_characteristic(t) == 0
    assert all(link.is_sphere() for link in vertex_links(t))


def test_triangulation_to_decomposition_on_table():
    d = triangulation_to_decomposition(SPHERE_TABLE)
    assert sorted(len(w) for w in d.walks) == [1, 1, 10]
    assert sorted(len(w) for w in d.walks) == sorted(e.degree for e in edge_classes(SPHERE_TABLE))


def test_invalid_decomposition_is_refused():
    fg = fatgraph_from_walks(Decomposition.from_text(T_TEXT))
    with pytest.raises(InvalidDecomposition):
        decomposition_to_triangulation(Decomposition(((1,), (4,))), fg)


def test_single_unglued_tetrahedron():
    t = Triangulation(1, ((None, None, None, None),))
    classes = edge_classes(t)
    assert len(classes) == 6 and all(e.degree == 1 and not e.reversed for e in classes)
    assert len(vertex_classes(t)) == 4
    links = vertex_links(t)
    assert len(links) == 4 and all(link.is_disc() for link in links)
    assert euler_characteristic(t) == 4 - 6 + 4 - 1
    assert not is_3manifold(t)
    assert is_3manifold(t, allow_boundary=True)


def test_reversed_edge_gluing_is_not_a_manifold():
    one = generate(1)[0]
    reversed_ones = [t for t in enumerate_gluings(one) if any(e.reversed for e in edge_classes(t))]
    assert reversed_ones  # found by the brute-force oracle
    assert not any(is_3manifold(t) for t in reversed_ones)


def test_disjoint_union_is_not_a_manifold():
    t = enumerate_gluings(generate(1)[0], ONE_VERTEX_3MFLD)[0]
    (row,) = t.gluings
    shifted = tuple((j + 1, h, p) for j, h, p in row)
    both = Triangulation(2, (row, shifted))
    assert is_3manifold(t)
    assert not is_3manifold(both)


def test_one_vertex_manifolds_have_euler_zero():
    for n in (1, 2):
        for g in generate(n):
            for t in enumerate_gluings(g, ONE_VERTEX_3MFLD):
                assert euler_characteristic(t) == 0
                assert len(edge_classes(t)) == n + 1


def test_links_spheres_iff_edge_count():
    """Closed, no reversed edge: all links spheres exactly when edges = n + vertices."""
    seen = {True: 0, False: 0}
    for t in ALL_SMALL:
        if any(e.reversed for e in edge_classes(t)):
            continue
        spheres = all(link.is_sphere() for link in vertex_links(t))
        assert spheres == (len(edge_classes(t)) == t.tet_count + len(vertex_classes(t)))
        seen[spheres] += 1
    assert seen[True] and seen[False]


def test_class_partitions():
    for t in ALL_SMALL[::7]:
        assert sum(e.degree for e in edge_classes(t)) == 6 * t.tet_count
        assert sum(len(v.members) for v in vertex_classes(t)) == 4 * t.tet_count


def brute_orientable(t):
    for signs in itertools.product((1, -1), repeat=t.tet_count):
        if all(
            signs[i] * signs[j] * perm_sign(p) == -1
            for i, row in enumerate(t.gluings)
            for (j, _, p) in row
        ):
            return True
    return False


def test_orientability_matches_brute_force():
    counts = {True: 0, False: 0}
    for t in ALL_SMALL:
        assert is_orientable(t) == brute_orientable(t)
        counts[is_orientable(t)] += 1
    assert counts[True] and counts[False]


def relabel(t, tet_perm, vertex_perms):
    """Image of ``t`` under tet i -> tet_perm[i] with vertex maps vertex_perms[i]."""
    n = t.tet_count
    rows = [[None] * 4 for _ in range(n)]
    for i, row in enumerate(t.gluings):
        s = vertex_perms[i]
        for f, g in enumerate(row):
            if g is None:
                continue
            j, h, p = g
            sj = vertex_perms[j]
            sinv = inverse(s)
            q = tuple(sj[p[sinv[x]]] for x in range(4))
            rows[tet_perm[i]][s[f]] = (tet_perm[j], sj[h], q)
    return Triangulation(n, tuple(tuple(r) for r in rows))


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=len(ALL_SMALL) - 1), st.integers(min_value=0, max_value=10**6))
def test_isomorphism_under_random_relabelling(idx, seed):
    t = ALL_SMALL[idx]
    rng = random.Random(seed)
    tets = list(range(t.tet_count))
    rng.shuffle(tets)
    verts = []
    for _ in range(t.tet_count):
        v = list(range(4))
        rng.shuffle(v)
        verts.append(tuple(v))
    u = relabel(t, tets, verts)
    assert isomorphic(t, u)
    assert len(edge_classes(u)) == len(edge_classes(t))


def test_non_isomorphic():
    sphere, *others = enumerate_gluings(generate(1)[0], ONE_VERTEX_3MFLD)
    degrees = lambda t: sorted(e.degree for e in edge_classes(t))  # noqa: E731
    compared = 0
    for t in others:
        if degrees(t) != degrees(sphere):
            assert not isomorphic(t, sphere)
            compared += 1
    assert compared


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(ALL_SMALL))
def test_gluing_table_round_trip(t):
    text = t.to_text()
    assert Triangulation.from_text(text) == t
    assert Triangulation.from_text(text).to_text() == text


def test_gluing_table_format():
    t = Triangulation(1, ((None, None, None, None),))
    assert t.to_text() == "- - - -"
    assert SPHERE_TABLE.to_text() == (
        "(0, 1, 023) (0, 0, 123) (1, 3, 210) (1, 2, 310)\n"
        "(1, 1, 023) (1, 0, 123) (0, 3, 210) (0, 2, 310)"
    )
    with pytest.raises(ValueError):
        Triangulation.from_text("(0, 1, 023) -")


def test_gluings_must_be_involutive():
    with pytest.raises(ValueError):
        Triangulation(1, (((0, 1, (1, 0, 2, 3)), None, None, None),))
    with pytest.raises(ValueError):
        Triangulation.from_pairs(1, [(0, 0, 0, 0, (0, 1, 2, 3))])


@pytest.mark.parametrize("g", generate(1) + generate(2), ids=str)
def test_round_trip_through_decomposition(g):
    fg = fatten(g)
    for t in enumerate_gluings(g, ONE_VERTEX_3MFLD):
        d = triangulation_to_decomposition(t, fg)
        assert len(d.walks) == len(edge_classes(t))
        back = decomposition_to_triangulation(d, fg)
        assert back == t
        assert triangulation_to_decomposition(back, fg) == d
