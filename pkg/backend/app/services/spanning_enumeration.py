# spanning_enumeration.py
# brute-force ground truth: list every spanning tree of a small graph
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

from ..errors import InvalidArgumentError, ResourceLimitError
from .grid_model import Graph, SpanningTree, balanced_split, is_balanced, is_connected

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_CAP = 1_000_000


@dataclass
class EnumerationResult:
    total_trees: int = 0
    balanced_trees: int = 0
    # sorted edge-id tuples, only kept when asked for
    trees: Optional[List[Tuple[int, ...]]] = field(default=None, repr=False)

    def to_dict(self):
        return {"total_trees": self.total_trees, "balanced_trees": self.balanced_trees}


def enumerate_spanning_trees(graph: Graph, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[SpanningTree]:
    """
    yields every spanning tree once, lexicographic by sorted edge ids.

    edges are decided in id order. "take edge k" is tried before "skip edge k",
    which is exactly lexicographic order since all trees have V-1 edges.
    take: only if it joins two different components of what we took so far.
    skip: only if the edges still available keep the graph connected (k is not
          a bridge of what's left), so every branch ends in a tree
    """
    if not is_connected(graph):
        raise InvalidArgumentError("graph is disconnected, it has no spanning tree")

    V = graph.vertex_count
    m = graph.edge_count
    yielded = 0

    def rec(k, chosen, comp, available):
        nonlocal yielded
        if len(chosen) == V - 1:
            yielded += 1
            if yielded > cap:
                raise ResourceLimitError(
                    f"enumeration cap of {cap} trees exceeded",
                    limit_name="ENUMERATION_CAP", limit_value=cap,
                )
            yield SpanningTree(graph=graph, edge_ids=frozenset(chosen))
            return
        if k == m:
            return

        u, v = graph.edges[k]
        if comp[u] != comp[v]:
            old, new = comp[v], comp[u]
            merged = [new if c == old else c for c in comp]
            chosen.append(k)
            yield from rec(k + 1, chosen, merged, available)
            chosen.pop()

        available.discard(k)
        if is_connected(graph, available):
            yield from rec(k + 1, chosen, comp, available)
        available.add(k)

    yield from rec(0, [], list(range(V)), set(range(m)))
    logger.debug("enumerated %d spanning trees (V=%d, E=%d)", yielded, V, m)


def count_balanced_brute(graph: Graph, cap: int = DEFAULT_ENUMERATION_CAP, keep_trees: bool = False) -> EnumerationResult:
    result = EnumerationResult(trees=[] if keep_trees else None)
    for tree in enumerate_spanning_trees(graph, cap=cap):
        result.total_trees += 1
        if is_balanced(tree):
            result.balanced_trees += 1
        if keep_trees:
            result.trees.append(tuple(tree.sorted_ids()))
    return result


def balanced_split_tallies(graph: Graph, cap: int = DEFAULT_ENUMERATION_CAP) -> List[int]:
    """
    group balanced trees by the vertex half their cut edge separates
    (keyed by the half holding vertex 0) and return the sorted tree counts
    """
    tally = Counter()
    for tree in enumerate_spanning_trees(graph, cap=cap):
        split = balanced_split(tree)
        if split is not None:
            tally[split] += 1
    return sorted(tally.values())


def dump_trees(graph: Graph, balanced_only: bool = False, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[str]:
    for tree in enumerate_spanning_trees(graph, cap=cap):
        if balanced_only and not is_balanced(tree):
            continue
        yield tree.serialize()
