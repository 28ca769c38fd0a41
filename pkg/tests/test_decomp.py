import pytest
from hypothesis import given, settings, strategies as st

import oracles
from mdcensus.decomp import (
    Decomposition,
    InvalidDecomposition,
    arrival,
    canonicalize_walk,
    check,
    decomposition_less,
    departure,
    fatgraph_from_walks,
    is_canonical_walk,
    is_non_reversing,
    mark,
    reverse_walk,
    survives_automorphisms,
    validate,
    walk_key,
)
from mdcensus.fatgraph import fatten, lift_automorphisms
from mdcensus.multigraph import MultiGraph, automorphisms, generate
from mdcensus.oracle import enumerate_gluings
from mdcensus.tri import edge_classes, triangulation_to_decomposition

T_TEXT = "(1) (1,2,4,-2,3,-4,-3,-1,3,-2) (4)"
SPHERE_GRAPH = MultiGraph.from_text("2; 0-0,0-1,0-1,1-1")

walks = st.lists(st.integers(min_value=1, max_value=9).flatmap(lambda l: st.sampled_from([l, -l])), min_size=1, max_size=12)


def test_canonical_walk_examples():
    assert canonicalize_walk((2, -1, 3)) == (1, -2, -3)
    a, b, c = 4, 2, 7
    assert canonicalize_walk((a, b, c)) == canonicalize_walk((-b, -a, -c))


@given(walks)
def test_canonical_walk_matches_brute_force(w):
    assert canonicalize_walk(w) == oracles.brute_canonical_walk(w)


@given(walks, st.integers(min_value=0, max_value=20), st.booleans())
def test_canonical_walk_invariant_under_rotation_and_reversal(w, r, rev):
    r %= len(w)
    v = tuple(w[r:] + w[:r])
    if rev:
        v = reverse_walk(v)
    c = canonicalize_walk(w)
    assert canonicalize_walk(v) == c
    assert is_canonical_walk(c)
    assert c[0] > 0 and all(abs(x) >= c[0] for x in c)


def test_walk_order():
    assert walk_key((1, 2)) < walk_key((1, -2))
    assert walk_key((1, -2)) < walk_key((1, 3))
    assert walk_key((1, 2)) < walk_key((1, 2, 1))  # a proper prefix is smaller
    d1 = Decomposition(((1,), (1, 2)))
    d2 = Decomposition(((1,), (1, 3)))
    assert decomposition_less(d1, d2) and not decomposition_less(d2, d1)


def test_text_round_trip_and_unicode_minus():
    d = Decomposition.from_text("{(1), (1,2,4,−2,3,−4,−3,−1,3,−2), (4)}")
    assert d.to_text() == T_TEXT
    assert Decomposition.from_text(d.to_text()) == d
    with pytest.raises(ValueError):
        Decomposition.from_text("(1) junk (2)")


@settings(max_examples=50)
@given(st.lists(walks, min_size=1, max_size=4))
def test_text_round_trip_property(ws):
    d = Decomposition(tuple(tuple(w) for w in ws))
    assert Decomposition.from_text(d.to_text()) == d


def test_sphere_decomposition_is_valid():
    d = Decomposition.from_text(T_TEXT)
    fg = fatgraph_from_walks(d)
    assert fg.multigraph().normalized() == SPHERE_GRAPH
    assert validate(d, fg)
    assert all(is_non_reversing(d, i, fg) for i in range(len(d)))
    # every entry arrives and leaves inside one tetrahedron
    for w in d.walks:
        for p, x in enumerate(w):
            assert arrival(fg, x) >> 2 == departure(fg, w[(p + 1) % len(w)]) >> 2


def test_check_names_the_failure():
    fg = fatgraph_from_walks(Decomposition.from_text(T_TEXT))
    with pytest.raises(InvalidDecomposition, match="partition"):
        check(Decomposition.from_text("(1) (1,2,4,-2,3,-4,-3,-1,3,-2)"), fg)
    with pytest.raises(InvalidDecomposition, match="alternation"):
        check(Decomposition.from_text("(1) (1,2,4,-2,3,-4,-3,-1,-2,3) (4)"), fg)
    assert not validate(Decomposition.from_text("(1,1,1)"), fg)


def test_marking_on_sphere_walk():
    d = Decomposition.from_text(T_TEXT)
    fg = fatgraph_from_walks(d)
    m = mark(d, 1, fg)
    assert sorted(m.above) == list(range(10))
    assert m.is_non_reversing()


def _walk_tet_edges(fg, w):
    out = set()
    for p, x in enumerate(w):
        a, b = arrival(fg, x), departure(fg, w[(p + 1) % len(w)])
        u, v = (f for f in range(4) if f not in (a & 3, b & 3))
        out.add((a >> 2, u, v))
    return out


@pytest.mark.parametrize("g", generate(1) + generate(2), ids=str)
def test_marking_agrees_with_reversed_edges(g):
    """Every closed gluing, manifold or not: marking finds exactly the reversed edges."""
    fg = fatten(g)
    checked = 0
    for t in enumerate_gluings(g):
        d = triangulation_to_decomposition(t, fg)
        classes = {frozenset(e.members): e.reversed for e in edge_classes(t)}
        for i, w in enumerate(d.walks):
            reversed_edge = classes[frozenset(_walk_tet_edges(fg, w))]
            assert is_non_reversing(d, i, fg) == (not reversed_edge), (t.to_text(), d, i)
            checked += 1
    assert checked > 0


def test_survives_automorphisms_identity_and_prefix():
    fg = fatten(SPHERE_GRAPH)
    relabellings = lift_automorphisms(fg, automorphisms(SPHERE_GRAPH))
    d = Decomposition.from_text(T_TEXT).canonical()
    assert survives_automorphisms(d, relabellings[:1])  # identity only
    # a decomposition beaten by a relabelling is rejected, and so is any prefix that is beaten
    images = {d.relabel(phi) for phi in relabellings}
    best = min(images, key=lambda x: tuple(map(walk_key, x.walks)))
    for img in images:
        assert survives_automorphisms(img, relabellings) == (img == best)
    worst = max(images, key=lambda x: tuple(map(walk_key, x.walks)))
    assert len(images) > 1
    assert not survives_automorphisms(worst, relabellings)
