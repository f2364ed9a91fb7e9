# grid_model.py
# the 2-by-n grid, small oracle graphs, spanning trees and balanced cut edges
from collections import deque
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Tuple

import networkx as nx

from ..errors import InvalidArgumentError

"""
vertices -> ids 0..V-1
edges -> (u, v) pairs, the position in graph.edges is the edge id

for the grid, vertex (row r, column c) gets id 2c + r, so column c is the
pair {2c, 2c+1}. canonical edge order is all verticals first, then for each
column c < n-1 the top horizontal (2c, 2c+2) and bottom horizontal (2c+1, 2c+3):

    n = 3
    0 --- 2 --- 4        edge ids: 0:(0,1) 1:(2,3) 2:(4,5)
    |     |     |                  3:(0,2) 4:(1,3)
    1 --- 3 --- 5                  5:(2,4) 6:(3,5)
"""

SMALL_GRAPH_MAX_VERTICES = 24
SMALL_GRAPH_MAX_EDGES = 32


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: Tuple[Tuple[int, int], ...]
    # adjacency[v] = [(neighbor, edge_id), ...], built once
    adjacency: Tuple[Tuple[Tuple[int, int], ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # callers may hand in lists; keep the stored form hashable
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        adj = [[] for _ in range(self.vertex_count)]
        for eid, (u, v) in enumerate(self.edges):
            adj[u].append((v, eid))
            adj[v].append((u, eid))
        object.__setattr__(self, "adjacency", tuple(tuple(a) for a in adj))

    @property
    def edge_count(self):
        return len(self.edges)

    def degree(self, v):
        return len(self.adjacency[v])


@dataclass(frozen=True)
class SmallGraph(Graph):
    """arbitrary little graph used as oracle input (<= 24 vertices, <= 32 edges)"""

    def __post_init__(self):
        if not 1 <= self.vertex_count <= SMALL_GRAPH_MAX_VERTICES:
            raise InvalidArgumentError(
                f"vertex_count must be between 1 and {SMALL_GRAPH_MAX_VERTICES}, got {self.vertex_count}"
            )
        if len(self.edges) > SMALL_GRAPH_MAX_EDGES:
            raise InvalidArgumentError(f"at most {SMALL_GRAPH_MAX_EDGES} edges allowed, got {len(self.edges)}")
        seen = set()
        for u, v in (tuple(e) for e in self.edges):
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise InvalidArgumentError(f"edge ({u}, {v}) has an endpoint out of range")
            if u == v:
                raise InvalidArgumentError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InvalidArgumentError(f"parallel edge {key}")
            seen.add(key)
        super().__post_init__()


@dataclass(frozen=True)
class GridGraph(Graph):
    n: int = 0


@dataclass(frozen=True)
class SpanningTree:
    graph: Graph
    edge_ids: FrozenSet[int]

    def sorted_ids(self) -> List[int]:
        return sorted(self.edge_ids)

    def serialize(self) -> str:
        # golden-file form: "0,1,3,5"
        return ",".join(str(e) for e in self.sorted_ids())


def build_grid(n: int) -> GridGraph:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidArgumentError(f"n must be a positive integer, got {n!r}")

    edges = [(2 * c, 2 * c + 1) for c in range(n)]
    for c in range(n - 1):
        edges.append((2 * c, 2 * c + 2))
        edges.append((2 * c + 1, 2 * c + 3))
    return GridGraph(vertex_count=2 * n, edges=tuple(edges), n=n)


def is_connected(graph: Graph, edge_ids: Iterable[int] = None) -> bool:
    """BFS from vertex 0 over the given edges (all edges if None)"""
    allowed = None if edge_ids is None else set(edge_ids)
    seen = [False] * graph.vertex_count
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for v, eid in graph.adjacency[u]:
            if allowed is not None and eid not in allowed:
                continue
            if not seen[v]:
                seen[v] = True
                count += 1
                queue.append(v)
    return count == graph.vertex_count


def make_spanning_tree(graph: Graph, edge_ids: Iterable[int]) -> SpanningTree:
    ids = frozenset(edge_ids)
    for e in ids:
        if not 0 <= e < graph.edge_count:
            raise InvalidArgumentError(f"edge id {e} out of range for a graph with {graph.edge_count} edges")
    if len(ids) != graph.vertex_count - 1:
        raise InvalidArgumentError(
            f"a spanning tree needs {graph.vertex_count - 1} edges, got {len(ids)}"
        )
    # V-1 edges + connected => acyclic
    if not is_connected(graph, ids):
        raise InvalidArgumentError("edge set is not connected, so it is not a spanning tree")
    return SpanningTree(graph=graph, edge_ids=ids)


def parse_tree(graph: Graph, text: str) -> SpanningTree:
    """inverse of SpanningTree.serialize"""
    try:
        ids = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise InvalidArgumentError(f"tree must be comma-separated edge ids, got {text!r}")
    return make_spanning_tree(graph, ids)


def _require_even(graph: Graph):
    if graph.vertex_count % 2:
        raise InvalidArgumentError(
            f"balance needs an even vertex count, graph has {graph.vertex_count}"
        )


def subtree_sizes(tree: SpanningTree):
    """
    root the tree at vertex 0.
    returns (parent_edge, size): parent_edge[v] is the tree edge joining v to
    its parent (-1 at the root), size[v] counts the vertices below and at v
    """
    graph = tree.graph
    V = graph.vertex_count
    parent_edge = [-1] * V
    order = []
    seen = [False] * V
    seen[0] = True
    stack = [0]
    while stack:
        u = stack.pop()
        order.append(u)
        for v, eid in graph.adjacency[u]:
            if eid in tree.edge_ids and not seen[v]:
                seen[v] = True
                parent_edge[v] = eid
                stack.append(v)

    size = [1] * V
    # children are always after their parent in `order`
    for u in reversed(order):
        pe = parent_edge[u]
        if pe >= 0:
            a, b = graph.edges[pe]
            parent = a if b == u else b
            size[parent] += size[u]
    return parent_edge, size


def balanced_cut_edges(tree: SpanningTree) -> List[int]:
    _require_even(tree.graph)
    half = tree.graph.vertex_count // 2
    parent_edge, size = subtree_sizes(tree)
    return sorted(parent_edge[v] for v in range(tree.graph.vertex_count) if parent_edge[v] >= 0 and size[v] == half)


def is_balanced(tree: SpanningTree) -> bool:
    return len(balanced_cut_edges(tree)) > 0


def balanced_cut_edges_by_deletion(tree: SpanningTree) -> List[int]:
    """
    independent check of balanced_cut_edges: drop each tree edge in turn and
    measure both components with networkx. O(V) per edge, oracle use only
    """
    _require_even(tree.graph)
    graph = tree.graph
    nx_tree = nx.Graph()
    nx_tree.add_nodes_from(range(graph.vertex_count))
    for eid in tree.edge_ids:
        nx_tree.add_edge(*graph.edges[eid])

    result = []
    for eid in sorted(tree.edge_ids):
        u, v = graph.edges[eid]
        nx_tree.remove_edge(u, v)
        sizes = sorted(len(c) for c in nx.connected_components(nx_tree))
        nx_tree.add_edge(u, v)
        if sizes == [graph.vertex_count // 2, graph.vertex_count // 2]:
            result.append(eid)
    return result


def balanced_split(tree: SpanningTree):
    """
    the vertex half cut off by the balanced cut edge, as the frozenset of the
    side holding vertex 0. None when the tree is not balanced.
    a tree has at most one balanced cut edge, so this is well defined
    """
    cuts = balanced_cut_edges(tree)
    if not cuts:
        return None
    cut = cuts[0]
    graph = tree.graph
    side = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v, eid in graph.adjacency[u]:
            if eid == cut or eid not in tree.edge_ids or v in side:
                continue
            side.add(v)
            stack.append(v)
    return frozenset(side)
