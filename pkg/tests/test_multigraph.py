import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from mdcensus.multigraph import (
    ArcAutomorphism,
    MultiGraph,
    automorphisms,
    canonical_form,
    canonical_relabelling,
    generate,
    is_connected,
    node_automorphisms,
    read_graphs,
    write_graphs,
)

# connected counts 1..5 and all counts 1..5, from the numpy brute force in oracles.py
CONNECTED = {1: 1, 2: 2, 3: 4, 4: 10, 5: 28}
ALL = {1: 1, 2: 3, 3: 7, 4: 20, 5: 56}


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_generate_counts(n):
    assert len(generate(n)) == CONNECTED[n]
    assert len(generate(n, connected=False)) == ALL[n]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_generate_matches_brute_force(n):
    assert len(generate(n)) == oracles.count_graphs(n)
    keys = {oracles.graph_key(g) for g in generate(n)}
    assert len(keys) == CONNECTED[n]  # no two outputs isomorphic


def test_generated_graphs_are_valid_connected_and_canonical():
    for n in (1, 2, 3, 4):
        for g in generate(n):
            assert g.is_valid() and is_connected(g)
            assert canonical_relabelling(g) == g


def test_small_graphs_by_hand():
    assert [g.to_text() for g in generate(1)] == ["1; 0-0,0-0"]
    assert {g.to_text() for g in generate(2)} == {"2; 0-0,0-1,0-1,1-1", "2; 0-1,0-1,0-1,0-1"}


def test_text_round_trip(tmp_path):
    graphs = generate(4)
    path = tmp_path / "g.txt"
    write_graphs(graphs, path)
    assert [g for _, g in read_graphs(path)] == graphs


def test_read_graphs_reports_line(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1; 0-0,0-0\n\n2; 0-1,banana\n")
    with pytest.raises(ValueError, match=":3:"):
        list(read_graphs(path))


def test_from_text_rejects_garbage():
    with pytest.raises(ValueError):
        MultiGraph.from_text("no semicolon")


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**6), st.sampled_from(generate(4) + generate(5)))
def test_canonical_form_invariant_under_relabelling(seed, g):
    perm = list(range(g.order))
    random.Random(seed).shuffle(perm)
    h = g.relabel(perm)
    assert canonical_form(h) == canonical_form(g)
    assert canonical_relabelling(h) == g


@pytest.mark.parametrize("g", generate(3) + generate(4), ids=str)
def test_automorphisms_are_automorphisms(g):
    autos = automorphisms(g)
    assert autos[0] == ArcAutomorphism.identity(g)
    assert len(set(autos)) == len(autos)
    for a in autos:
        assert a.is_automorphism_of(g)
        assert a.then(a.inverse()) == ArcAutomorphism.identity(g)


def test_automorphism_group_sizes():
    # one node with two loops: swap the loops, flip each: 2 * 2 * 2
    assert len(automorphisms(MultiGraph.from_text("1; 0-0,0-0"))) == 8
    # four parallel arcs between two nodes: 4! arc orders times the node swap
    assert len(automorphisms(MultiGraph.from_text("2; 0-1,0-1,0-1,0-1"))) == 48
    assert len(node_automorphisms(MultiGraph.from_text("2; 0-1,0-1,0-1,0-1"))) == 2


def test_automorphisms_closed_under_composition():
    g = MultiGraph.from_text("2; 0-0,0-1,0-1,1-1")
    autos = set(automorphisms(g))
    for a in autos:
        for b in autos:
            assert a.then(b) in autos
