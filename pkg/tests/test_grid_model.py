import networkx as nx
import pytest

from backend.app.errors import InvalidArgumentError
from backend.app.services.grid_model import (
    SmallGraph,
    SpanningTree,
    balanced_cut_edges,
    balanced_cut_edges_by_deletion,
    balanced_split,
    build_grid,
    is_balanced,
    is_connected,
    make_spanning_tree,
    parse_tree,
)
from backend.app.services.spanning_enumeration import enumerate_spanning_trees


def test_grid_edge_order_n3():
    g = build_grid(3)
    assert g.vertex_count == 6
    assert g.edges == ((0, 1), (2, 3), (4, 5), (0, 2), (1, 3), (2, 4), (3, 5))


@pytest.mark.parametrize("n", [1, 2, 5, 19, 100])
def test_grid_counts(n):
    g = build_grid(n)
    assert g.vertex_count == 2 * n
    assert g.edge_count == 3 * n - 2
    assert is_connected(g)


def test_grid_matches_networkx_ladder():
    g = build_grid(7)
    ours = nx.Graph(list(g.edges))
    ladder = nx.ladder_graph(7)
    assert nx.is_isomorphic(ours, ladder)


@pytest.mark.parametrize("bad", [0, -3, 2.5, "4", True])
def test_build_grid_rejects(bad):
    with pytest.raises(InvalidArgumentError):
        build_grid(bad)


def test_single_column_tree_is_balanced():
    g = build_grid(1)
    tree = make_spanning_tree(g, [0])
    assert balanced_cut_edges(tree) == [0]
    assert is_balanced(tree)


def test_top_row_plus_vertical_n3():
    g = build_grid(3)
    # top row 0-2-4, bottom row 1-3-5, joined by the middle vertical
    tree = make_spanning_tree(g, [1, 3, 4, 5, 6])
    assert balanced_cut_edges(tree) == [1]
    assert balanced_split(tree) == frozenset({0, 2, 4})


def test_unbalanced_tree_n3():
    g = build_grid(3)
    # comb: all three verticals plus the top row
    tree = make_spanning_tree(g, [0, 1, 2, 3, 5])
    assert balanced_cut_edges(tree) == []
    assert not is_balanced(tree)
    assert balanced_split(tree) is None


@pytest.mark.parametrize("n", [2, 3, 4])
def test_cut_edges_agree_with_deletion(n):
    for tree in enumerate_spanning_trees(build_grid(n)):
        assert balanced_cut_edges(tree) == balanced_cut_edges_by_deletion(tree)
        # a tree never has two balanced cut edges
        assert len(balanced_cut_edges(tree)) <= 1


def test_make_spanning_tree_rejects_wrong_size():
    g = build_grid(2)
    with pytest.raises(InvalidArgumentError):
        make_spanning_tree(g, [0, 1])


def test_make_spanning_tree_rejects_non_trees():
    g = build_grid(2)
    g3 = build_grid(3)
    with pytest.raises(InvalidArgumentError):
        make_spanning_tree(g3, [0, 1, 3, 4, 2])  # 4-cycle on columns 0,1 plus an isolated vertical
    with pytest.raises(InvalidArgumentError):
        make_spanning_tree(g, [0, 1, 7])


def test_odd_vertex_count_rejected():
    g = SmallGraph(vertex_count=3, edges=((0, 1), (1, 2)))
    tree = make_spanning_tree(g, [0, 1])
    with pytest.raises(InvalidArgumentError):
        balanced_cut_edges(tree)


@pytest.mark.parametrize("edges", [((0, 0),), ((0, 1), (1, 0)), ((0, 5),)])
def test_small_graph_validation(edges):
    with pytest.raises(InvalidArgumentError):
        SmallGraph(vertex_count=4, edges=edges)


def test_parse_tree_and_serialize():
    g = build_grid(3)
    tree = parse_tree(g, "6,5,4,3,1")
    assert tree.serialize() == "1,3,4,5,6"
    assert isinstance(tree, SpanningTree)
    with pytest.raises(InvalidArgumentError):
        parse_tree(g, "1,x,3")


def test_is_connected_with_subset():
    g = build_grid(2)
    assert is_connected(g, [0, 2, 3])
    assert not is_connected(g, [0, 1])
