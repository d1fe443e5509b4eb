"""
Tests for digraph construction: edge lists, graph files, lifts and Cayley digraphs.
"""

import logging
import math

import networkx as nx
import numpy as np
import pytest
from sympy.combinatorics import Permutation

from src.arith import group_order
from src.errors import CapExceededError, DomainError, GraphFormatError
from src.graphs import (
    Digraph,
    cayley_digraph,
    complete_digraph_with_loops,
    directed_cycle,
    from_edge_list,
    girth,
    linear_action_generators,
    nonbacktracking_lift,
    parse_cayley_spec,
    random_regular_lift,
    read_graph_file,
    read_undirected_graph,
    write_graph_file,
)


def test_three_cycle_from_edges():
    g = from_edge_list(["0 1", "1 2", "2 0"], label="c3")
    assert (g.n, g.d) == (3, 1)
    assert g.out_neighbors.tolist() == [[1], [2], [0]]
    assert g.transition.toarray().sum(axis=1).tolist() == [1.0, 1.0, 1.0]


def test_comments_and_blank_lines_are_skipped():
    g = from_edge_list(["# header", "", "0 1", "1 0  "])
    assert (g.n, g.d) == (2, 1)


def test_multi_edges_are_counted():
    g = from_edge_list(["0 1", "0 1", "1 0", "1 0"])
    assert g.d == 2
    assert g.adjacency[0, 1] == 2
    assert g.transition[0, 1] == pytest.approx(1.0)


def test_ragged_out_degree_rejected():
    with pytest.raises(GraphFormatError, match="vertex 1"):
        from_edge_list(["0 1", "0 2", "1 0", "2 0", "2 1"])


def test_bad_lines_rejected():
    with pytest.raises(GraphFormatError):
        from_edge_list(["0 1 2"])
    with pytest.raises(GraphFormatError):
        from_edge_list(["0 x"])
    with pytest.raises(GraphFormatError):
        from_edge_list([])
    with pytest.raises(GraphFormatError):
        from_edge_list(["0 5"], n=3)


def test_table_is_read_only():
    g = directed_cycle(4)
    with pytest.raises(ValueError):
        g.out_neighbors[0, 0] = 2
    with pytest.raises(GraphFormatError):
        Digraph([[1], [3]])


def test_k4_lift():
    g = nonbacktracking_lift(nx.complete_graph(4), arc_transitive=True, label="nb-k4")
    assert (g.n, g.d) == (12, 2)
    assert g.is_vertex_transitive
    assert g.in_degrees.tolist() == [2] * 12


def test_lift_respects_non_backtracking():
    base = nx.petersen_graph()
    g = nonbacktracking_lift(base)
    arcs = sorted((u, v) for a, b in base.edges() for u, v in ((a, b), (b, a)))
    assert (g.n, g.d) == (30, 2)
    for i, (u, v) in enumerate(arcs):
        targets = [arcs[j] for j in g.out_neighbors[i]]
        assert all(start == v and end != u for start, end in targets)
        assert sorted(end for _, end in targets) == sorted(w for w in base.neighbors(v) if w != u)


def test_cycle_lift_warns(caplog):
    with caplog.at_level(logging.WARNING, logger="src.graphs"):
        g = nonbacktracking_lift(nx.cycle_graph(5))
    assert (g.n, g.d) == (10, 1)
    assert "k = 2" in caplog.text


def test_lift_rejects_bad_inputs():
    with pytest.raises(GraphFormatError):
        nonbacktracking_lift(nx.path_graph(4))
    with pytest.raises(DomainError):
        nonbacktracking_lift(nx.Graph([(0, 1)]))
    with pytest.raises(GraphFormatError):
        nonbacktracking_lift(nx.MultiGraph([(0, 1), (0, 1)]))


def test_random_regular_lift_is_reproducible():
    a = random_regular_lift(10, 3, seed=1)
    b = random_regular_lift(10, 3, seed=1)
    assert a.label == "rr-n10-k3-s1"
    assert (a.n, a.d) == (30, 2)
    assert np.array_equal(a.out_neighbors, b.out_neighbors)
    with pytest.raises(DomainError):
        random_regular_lift(5, 3, seed=1)


def test_girth():
    assert girth(nx.petersen_graph()) == 5
    assert girth(nx.complete_graph(4)) == 3
    assert girth(nx.cycle_graph(6)) == 6
    assert girth(nx.path_graph(5)) == math.inf


def test_cyclic_cayley():
    g = parse_cayley_spec("cyclic:5")
    assert (g.n, g.d) == (5, 1)
    assert g.is_vertex_transitive


def test_symmetric_cayley():
    g = parse_cayley_spec("symmetric:3")
    assert (g.n, g.d) == (6, 2)
    assert g.in_degrees.tolist() == [2] * 6


def test_sl2_cayley_matches_group_order():
    g = parse_cayley_spec("sl2:3")
    assert g.n == 24 == group_order("Sp", 1, 3)
    assert g.d == 2


def test_cayley_from_sympy_permutations():
    g = cayley_digraph([Permutation([1, 2, 0])], label="z3")
    assert (g.n, g.d) == (3, 1)
    assert g.out_neighbors.tolist() == [[1], [2], [0]]


def test_cayley_cap():
    with pytest.raises(CapExceededError):
        parse_cayley_spec("symmetric:5", cap=10)


def test_bad_cayley_specs():
    for text in ("cyclic:x", "dihedral:4", "sl2:4", "cyclic:1"):
        with pytest.raises(DomainError):
            parse_cayley_spec(text)
    with pytest.raises(DomainError):
        cayley_digraph([(0, 0, 1)])
    with pytest.raises(DomainError):
        linear_action_generators([((1, 1), (1, 1))], 3)


def test_small_builders():
    k = complete_digraph_with_loops(4)
    assert (k.n, k.d) == (4, 4)
    assert np.allclose(k.transition.toarray(), 0.25)
    assert directed_cycle(5).out_neighbors[4, 0] == 0


def test_graph_file_round_trip(tmp_path):
    g = nonbacktracking_lift(nx.complete_graph(4), label="nb-k4")
    path = tmp_path / "k4.txt"
    write_graph_file(g, path)
    back = read_graph_file(path)
    assert back.label == "k4"
    assert np.array_equal(back.out_neighbors, g.out_neighbors)


def test_graph_file_header_mismatch(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3 2\n0 1\n1 2\n2 0\n")
    with pytest.raises(GraphFormatError, match="header"):
        read_graph_file(path)
    with pytest.raises(GraphFormatError):
        read_graph_file(tmp_path / "missing.txt")


def test_read_undirected_graph(tmp_path):
    path = tmp_path / "petersen.edges"
    nx.write_edgelist(nx.petersen_graph(), path, data=False)
    base = read_undirected_graph(path)
    assert base.name == "petersen"
    lift = nonbacktracking_lift(base)
    assert lift.label == "nb-petersen"
    assert lift.n == 30


def test_to_networkx_keeps_multi_edges():
    g = from_edge_list(["0 1", "0 1", "1 0", "1 0"])
    assert g.to_networkx().number_of_edges() == 4


def test_read_logs_with_lazy_arguments(tmp_path, caplog):
    path = tmp_path / "triangle.txt"
    path.write_text("3 1\n0 1\n1 2\n2 0\n")
    with caplog.at_level(logging.INFO, logger="src.graphs"):
        read_graph_file(path)
    (record,) = [r for r in caplog.records if r.getMessage().startswith("Read")]
    assert record.msg == "Read %s from %s"
    assert record.args[1] == path


def test_closure_logs_with_lazy_arguments(caplog):
    with caplog.at_level(logging.INFO, logger="src.graphs"):
        parse_cayley_spec("symmetric:3")
    (record,) = [r for r in caplog.records if "closure" in r.getMessage()]
    assert record.msg == "%s: closure has %d elements"
    assert record.getMessage() == "symmetric:3: closure has 6 elements"
