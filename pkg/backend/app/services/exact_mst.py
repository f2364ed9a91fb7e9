# exact_mst.py
# exact MST-distribution probabilities.
# Kruskal on a uniformly random edge order returns tree T exactly when every
# non-tree edge comes after all tree edges on its fundamental cycle, so
# P(T) = (#orders respecting those constraints) / m!  -- a linear extension count
import itertools
import logging
import math
from collections import Counter, defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from ..errors import InvalidArgumentError, ResourceLimitError
from .grid_model import Graph, SpanningTree, is_balanced, make_spanning_tree
from .random_sampling import kruskal_scan
from .spanning_enumeration import DEFAULT_ENUMERATION_CAP, enumerate_spanning_trees

logger = logging.getLogger(__name__)

DEFAULT_EXTENSION_LIMIT = 22
DEFAULT_PERMUTATION_CAP = 4_000_000
METHODS = ("extensions", "bruteforce")


@dataclass(frozen=True)
class CyclePoset:
    """
    element e = edge id e of the graph.
    predecessors[e] is a bitmask of the elements that must come before e:
    for a non-tree edge, the tree edges on its fundamental cycle; 0 otherwise
    """

    element_count: int
    predecessors: Tuple[int, ...]
    tree_edges: frozenset = frozenset()

    def predecessor_ids(self, e: int) -> List[int]:
        mask = self.predecessors[e]
        return [i for i in range(self.element_count) if mask >> i & 1]

    def to_dict(self) -> Dict:
        return {
            "element_count": self.element_count,
            "tree_edges": sorted(self.tree_edges),
            "predecessors": {
                str(e): self.predecessor_ids(e) for e in range(self.element_count) if self.predecessors[e]
            },
        }


def _root_tree(tree: SpanningTree):
    """BFS from vertex 0 over tree edges -> parent vertex, parent edge, depth"""
    graph = tree.graph
    V = graph.vertex_count
    parent = [-1] * V
    parent_edge = [-1] * V
    depth = [0] * V
    seen = [False] * V
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v, eid in graph.adjacency[u]:
            if eid in tree.edge_ids and not seen[v]:
                seen[v] = True
                parent[v] = u
                parent_edge[v] = eid
                depth[v] = depth[u] + 1
                queue.append(v)
    return parent, parent_edge, depth


def _path_mask(rooted, u: int, v: int) -> int:
    """bitmask of the tree edges on the path u..v"""
    parent, parent_edge, depth = rooted
    mask = 0
    while u != v:
        # climb from the deeper end until the two meet
        if depth[u] >= depth[v]:
            mask |= 1 << parent_edge[u]
            u = parent[u]
        else:
            mask |= 1 << parent_edge[v]
            v = parent[v]
    return mask


def fundamental_cycle_poset(graph: Graph, tree: SpanningTree) -> CyclePoset:
    # re-validate against this graph (raises InvalidArgumentError if it does not span it)
    if tree.graph != graph:
        raise InvalidArgumentError("tree belongs to a different graph")
    tree = make_spanning_tree(graph, tree.edge_ids)

    rooted = _root_tree(tree)
    preds = [0] * graph.edge_count
    for f, (u, v) in enumerate(graph.edges):
        if f not in tree.edge_ids:
            preds[f] = _path_mask(rooted, u, v)
    return CyclePoset(element_count=graph.edge_count, predecessors=tuple(preds), tree_edges=tree.edge_ids)


def count_linear_extensions(poset: CyclePoset, limit: int = DEFAULT_EXTENSION_LIMIT) -> int:
    """
    number of orders of all elements where each element follows its predecessors.

    f(D) = number of ways to order downset D. f(empty) = 1 and each downset D
    passes its count to D | {e} for every e outside D whose predecessors are all
    in D. Downsets are built one layer (popcount) at a time, so only downsets
    are ever stored and only two layers live at once
    """
    m = poset.element_count
    if m > limit:
        raise ResourceLimitError(
            f"poset has {m} elements, above the extension limit of {limit}",
            limit_name="EXTENSION_LIMIT", limit_value=limit,
        )
    preds = poset.predecessors
    full = (1 << m) - 1
    layer = {0: 1}
    for _ in range(m):
        nxt = defaultdict(int)
        for down, ways in layer.items():
            free = full & ~down
            while free:
                low = free & -free
                e = low.bit_length() - 1
                if preds[e] & ~down == 0:
                    nxt[down | low] += ways
                free ^= low
        layer = nxt
    return layer.get(full, 0)


def count_linear_extensions_bruteforce(poset: CyclePoset) -> int:
    """filter all m! orders directly, small posets only (oracle)"""
    count = 0
    for order in itertools.permutations(range(poset.element_count)):
        placed = 0
        for e in order:
            if poset.predecessors[e] & ~placed:
                break
            placed |= 1 << e
        else:
            count += 1
    return count


def mst_tree_probability(graph: Graph, tree: SpanningTree, limit: int = DEFAULT_EXTENSION_LIMIT) -> Fraction:
    poset = fundamental_cycle_poset(graph, tree)
    return Fraction(count_linear_extensions(poset, limit=limit), math.factorial(graph.edge_count))


def _check_extension_limit(graph: Graph, limit: int):
    if graph.edge_count > limit:
        raise ResourceLimitError(
            f"graph has {graph.edge_count} edges, above the extension limit of {limit}",
            limit_name="EXTENSION_LIMIT", limit_value=limit,
        )


def mst_balance_probability_exact(graph: Graph, limit: int = DEFAULT_EXTENSION_LIMIT,
                                  cap: int = DEFAULT_ENUMERATION_CAP) -> Fraction:
    _check_extension_limit(graph, limit)
    total = 0
    trees = 0
    for tree in enumerate_spanning_trees(graph, cap=cap):
        trees += 1
        if is_balanced(tree):
            total += count_linear_extensions(fundamental_cycle_poset(graph, tree), limit=limit)
    result = Fraction(total, math.factorial(graph.edge_count))
    logger.info("exact MST balance over %d trees (m=%d): %s", trees, graph.edge_count, result)
    return result


def mst_tree_distribution(graph: Graph, limit: int = DEFAULT_EXTENSION_LIMIT,
                          cap: int = DEFAULT_ENUMERATION_CAP) -> Dict[frozenset, Fraction]:
    """exact probability of every spanning tree under the MST distribution"""
    _check_extension_limit(graph, limit)
    return {
        tree.edge_ids: mst_tree_probability(graph, tree, limit=limit)
        for tree in enumerate_spanning_trees(graph, cap=cap)
    }


def _check_permutation_cap(graph: Graph, cap: int):
    if math.factorial(graph.edge_count) > cap:
        raise ResourceLimitError(
            f"{graph.edge_count}! edge orders exceed the permutation cap of {cap}; "
            f"use method 'extensions' instead",
            limit_name="PERMUTATION_CAP", limit_value=cap,
        )


def kruskal_outcomes_bruteforce(graph: Graph, cap: int = DEFAULT_PERMUTATION_CAP) -> Counter:
    """how many of the m! edge orders make Kruskal return each tree"""
    _check_permutation_cap(graph, cap)
    outcomes = Counter()
    for order in itertools.permutations(range(graph.edge_count)):
        outcomes[kruskal_scan(graph, order)] += 1
    return outcomes


def mst_balance_probability_bruteforce(graph: Graph, cap: int = DEFAULT_PERMUTATION_CAP) -> Fraction:
    outcomes = kruskal_outcomes_bruteforce(graph, cap=cap)
    balanced = sum(
        count for edge_ids, count in outcomes.items()
        if is_balanced(SpanningTree(graph=graph, edge_ids=edge_ids))
    )
    return Fraction(balanced, math.factorial(graph.edge_count))


def mst_balance_probability(graph: Graph, method: str = "extensions", limit: int = DEFAULT_EXTENSION_LIMIT,
                            permutation_cap: int = DEFAULT_PERMUTATION_CAP,
                            enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> Fraction:
    """dispatch on method; 'auto' prefers extensions and falls back to brute force past the extension limit"""
    method = str(method).strip().lower()
    if method == "auto":
        method = "extensions" if graph.edge_count <= limit else "bruteforce"
    if method == "extensions":
        return mst_balance_probability_exact(graph, limit=limit, cap=enumeration_cap)
    if method == "bruteforce":
        return mst_balance_probability_bruteforce(graph, cap=permutation_cap)
    raise InvalidArgumentError(f"method must be one of extensions, bruteforce, auto; got {method!r}")
