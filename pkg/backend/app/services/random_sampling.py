# random_sampling.py
# Monte Carlo side: uniform spanning trees (Wilson), MST-distribution trees
# (Kruskal on a random edge order), the balance estimator and binomial p-values
import logging
import math
import multiprocessing as mp
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import partial
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.special import gammaln, logsumexp
from tqdm import tqdm

from ..errors import InvalidArgumentError
from .exact_sequences import format_fraction, ust_balance_probability
from .grid_model import Graph, SpanningTree, build_grid, is_connected

logger = logging.getLogger(__name__)

DISTRIBUTIONS = ("ust", "mst")
Z95 = 1.96
SEED_BITS = 64


# ---------------------------------------------------------
# random streams
# ---------------------------------------------------------
class IndexedStream:
    """
    one Philox bit generator for a whole run of indices. seek(i) puts it in
    the state Philox(counter=i << 192, key=seed) starts in, so what index i
    draws never depends on which indices this stream served before
    """

    def __init__(self, seed: int):
        self._bits = np.random.Philox(key=seed)
        self._state = self._bits.state
        self._counter = np.zeros(4, dtype=np.uint64)
        self.gen = np.random.Generator(self._bits)

    def seek(self, index: int) -> np.random.Generator:
        # sample index lives in the high counter word, the low words count draws within it
        self._counter[3] = index
        self._state["state"]["counter"] = self._counter
        self._bits.state = self._state
        return self.gen


@dataclass(frozen=True)
class RandomSource:
    """
    counter-based streams: draw number `index` of a run always comes from
    Philox keyed by the seed with the counter starting at index << 192,
    so it does not matter which worker (or in which order) computes it
    """

    seed: int

    def __post_init__(self):
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < 2 ** SEED_BITS:
            raise InvalidArgumentError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    def stream(self) -> IndexedStream:
        return IndexedStream(self.seed)

    def generator(self, index: int) -> np.random.Generator:
        return self.stream().seek(index)


class GraphTables:
    """plain-list view of a graph for the sampling loops"""

    def __init__(self, graph: Graph):
        self.vertex_count = graph.vertex_count
        self.edge_count = graph.edge_count
        self.half = graph.vertex_count // 2
        self.neighbors = [tuple(v for v, _ in graph.adjacency[u]) for u in range(graph.vertex_count)]
        self.neighbor_edges = [tuple(e for _, e in graph.adjacency[u]) for u in range(graph.vertex_count)]
        self.tails = [u for u, _ in graph.edges]
        self.heads = [v for _, v in graph.edges]


def has_balanced_edge(parent: List[int], order: List[int], half: int) -> bool:
    """
    parent[] of a tree rooted at order[0], order lists every parent before its children.
    True when some vertex has exactly `half` vertices at and below it
    """
    size = [1] * len(parent)
    for v in reversed(order):
        p = parent[v]
        if p < 0:
            continue
        s = size[v]
        if s == half:
            return True
        size[p] += s
    return False


# ---------------------------------------------------------
# UST: Wilson's algorithm
# ---------------------------------------------------------
UNIFORM_BLOCK = 256


def wilson(tables: GraphTables, gen: np.random.Generator):
    """
    loop-erased random walks, root at vertex 0, walks started from the
    remaining vertices in ascending id. Overwriting the exit pointer each
    time a vertex is revisited is what erases the loops.

    returns (parent, parent_edge, order): parent pointers toward vertex 0 and
    the vertices with every parent ahead of its children
    """
    V = tables.vertex_count
    neighbors = tables.neighbors
    neighbor_edges = tables.neighbor_edges
    in_tree = [False] * V
    in_tree[0] = True
    parent = [-1] * V
    parent_edge = [-1] * V
    order = [0]
    uniforms = gen.random(UNIFORM_BLOCK).tolist()
    pos = 0

    for start in range(1, V):
        u = start
        while not in_tree[u]:
            if pos == UNIFORM_BLOCK:
                uniforms = gen.random(UNIFORM_BLOCK).tolist()
                pos = 0
            nbrs = neighbors[u]
            k = int(uniforms[pos] * len(nbrs))
            pos += 1
            parent_edge[u] = neighbor_edges[u][k]
            parent[u] = nbrs[k]
            u = nbrs[k]
        # the branch runs start -> tree; reversed it lists parents first
        branch = []
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            branch.append(u)
            u = parent[u]
        branch.reverse()
        order.extend(branch)

    return parent, parent_edge, order


def sample_ust(graph: Graph, source: RandomSource, index: int = 0) -> SpanningTree:
    _, parent_edge, _ = wilson(GraphTables(graph), source.generator(index))
    return SpanningTree(graph=graph, edge_ids=frozenset(e for e in parent_edge if e >= 0))


def _ust_balanced(tables: GraphTables, gen: np.random.Generator) -> bool:
    parent, _, order = wilson(tables, gen)
    return has_balanced_edge(parent, order, tables.half)


# ---------------------------------------------------------
# MST: Kruskal on a uniformly random edge order
# ---------------------------------------------------------
class UnionFind:
    """
    disjoint set union used by kruskal to reject edges that close a cycle

    parent[v] = v means v is a root. find() compresses paths, union() hangs
    the lower-rank root under the higher one and returns False when both
    ends were already connected
    """

    def __init__(self, size):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, x):
        #if x is not root, recursively find root and directly attach x to root
        if self.parent[x] != x:
            self.parent[x] = self.find(self.parent[x])
        return self.parent[x]

    def union(self, x, y):
        root_x = self.find(x)
        root_y = self.find(y)
        if root_x == root_y:
            return False

        if self.rank[root_x] < self.rank[root_y]:
            self.parent[root_x] = root_y
        elif self.rank[root_x] > self.rank[root_y]:
            self.parent[root_y] = root_x
        else:
            self.parent[root_y] = root_x
            self.rank[root_x] += 1
        return True


def kruskal_scan(graph: Graph, order: Sequence[int]) -> frozenset:
    """scan edge ids in `order`, keep each edge whose ends are still in different components"""
    uf = UnionFind(graph.vertex_count)
    accepted = []
    needed = graph.vertex_count - 1
    for eid in order:
        if len(accepted) == needed:
            break
        u, v = graph.edges[eid]
        if uf.union(u, v):
            accepted.append(eid)
    return frozenset(accepted)


def sample_mst(graph: Graph, source: RandomSource, index: int = 0) -> SpanningTree:
    # numpy's permutation is an unbiased Fisher-Yates shuffle
    order = source.generator(index).permutation(graph.edge_count).tolist()
    return SpanningTree(graph=graph, edge_ids=kruskal_scan(graph, order))


def _mst_balanced(tables: GraphTables, gen: np.random.Generator) -> bool:
    """
    kruskal_scan + is_balanced in one pass over plain lists: union-find with
    path halving, then the accepted edges rooted at vertex 0 by a BFS
    """
    V = tables.vertex_count
    tails, heads = tables.tails, tables.heads
    root = list(range(V))
    adjacency = [[] for _ in range(V)]
    remaining = V - 1
    for e in gen.permutation(tables.edge_count).tolist():
        a = tails[e]
        while root[a] != a:
            root[a] = root[root[a]]
            a = root[a]
        b = heads[e]
        while root[b] != b:
            root[b] = root[root[b]]
            b = root[b]
        if a == b:
            continue
        root[a] = b
        u, v = tails[e], heads[e]
        adjacency[u].append(v)
        adjacency[v].append(u)
        remaining -= 1
        if not remaining:
            break

    parent = [-1] * V
    order = [0]
    for u in order:
        for w in adjacency[u]:
            if w != parent[u]:
                parent[w] = u
                order.append(w)
    return has_balanced_edge(parent, order, tables.half)


SAMPLERS = {"ust": sample_ust, "mst": sample_mst}
BALANCE_TESTS = {"ust": _ust_balanced, "mst": _mst_balanced}


# ---------------------------------------------------------
# estimator
# ---------------------------------------------------------
@dataclass(frozen=True)
class MonteCarloSummary:
    distribution: str
    n: Optional[int]
    samples: int
    successes: int
    estimate: float
    std_error: float
    ci95_low: float
    ci95_high: float
    seed: int

    @property
    def estimate_fraction(self) -> Fraction:
        return Fraction(self.successes, self.samples)

    def estimate_6dp(self) -> str:
        return format_fraction(self.estimate_fraction, 6)

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["estimate_6dp"] = self.estimate_6dp()
        return data

    def csv_row(self) -> List:
        # n, dist, samples, successes, estimate6dp, stderr, ci_low, ci_high, seed
        return [
            self.n, self.distribution, self.samples, self.successes, self.estimate_6dp(),
            f"{self.std_error:.6g}", f"{self.ci95_low:.6f}", f"{self.ci95_high:.6f}", self.seed,
        ]


CSV_COLUMNS = ["n", "dist", "samples", "successes", "estimate6dp", "stderr", "ci_low", "ci_high", "seed"]


def _check_distribution(distribution: str) -> str:
    dist = str(distribution).strip().lower()
    if dist not in DISTRIBUTIONS:
        raise InvalidArgumentError(f"distribution must be one of {', '.join(DISTRIBUTIONS)}, got {distribution!r}")
    return dist


def count_balanced_samples(graph: Graph, distribution: str, seed: int, start: int, stop: int) -> int:
    """
    balanced trees among sample indices [start, stop); pure in its arguments.
    Same trees as SAMPLERS[distribution](graph, RandomSource(seed), i) for each i,
    but one stream is seeked through the whole range and no tree objects are built
    """
    balanced = BALANCE_TESTS[distribution]
    tables = GraphTables(graph)
    stream = RandomSource(seed).stream()
    return sum(1 for i in range(start, stop) if balanced(tables, stream.seek(i)))


def _count_chunk(graph, distribution, seed, bounds):
    return count_balanced_samples(graph, distribution, seed, bounds[0], bounds[1])


def _chunks(samples: int, workers: int):
    # fixed-size index ranges; the split never changes what index i draws
    size = max(1, min(50_000, math.ceil(samples / (workers * 8))))
    return [(start, min(start + size, samples)) for start in range(0, samples, size)]


def summarize(distribution: str, n, samples: int, successes: int, seed: int) -> MonteCarloSummary:
    p_hat = successes / samples
    std_error = math.sqrt(p_hat * (1 - p_hat) / samples)
    return MonteCarloSummary(
        distribution=distribution,
        n=n,
        samples=samples,
        successes=successes,
        estimate=p_hat,
        std_error=std_error,
        ci95_low=max(0.0, p_hat - Z95 * std_error),
        ci95_high=min(1.0, p_hat + Z95 * std_error),
        seed=seed,
    )


def estimate_balance_probability(graph: Graph, distribution: str, samples: int, seed: int,
                                 workers: int = 1, show_progress: bool = False) -> MonteCarloSummary:
    dist = _check_distribution(distribution)
    if not isinstance(samples, int) or samples < 1:
        raise InvalidArgumentError(f"samples must be a positive integer, got {samples!r}")
    RandomSource(seed)  # validates the seed before any work starts
    if not is_connected(graph):
        raise InvalidArgumentError("graph is disconnected, it has no spanning tree")
    if graph.vertex_count % 2:
        raise InvalidArgumentError(f"balance needs an even vertex count, graph has {graph.vertex_count}")

    workers = max(1, int(workers))
    chunks = _chunks(samples, workers)
    work = partial(_count_chunk, graph, dist, seed)
    n = getattr(graph, "n", None)
    logger.info("sampling %s trees: n=%s samples=%d seed=%d workers=%d", dist, n, samples, seed, workers)

    if workers == 1:
        results = map(work, chunks)
        successes = sum(tqdm(results, total=len(chunks), disable=not show_progress, unit="chunk"))
    else:
        with mp.Pool(processes=workers) as pool:
            results = pool.imap_unordered(work, chunks)
            successes = sum(tqdm(results, total=len(chunks), disable=not show_progress, unit="chunk"))

    summary = summarize(dist, n, samples, successes, seed)
    logger.info("%s n=%s: %d/%d balanced (%s)", dist, n, successes, samples, summary.estimate_6dp())
    return summary


# ---------------------------------------------------------
# significance
# ---------------------------------------------------------
TAILS = ("greater", "less")


def binomial_log10_pvalue(successes: int, samples: int, p0, tail: str = "greater") -> float:
    """
    log10 of the exact one-sided binomial tail
      greater: P(X >= successes),  less: P(X <= successes),  X ~ Bin(samples, p0)
    every term is a log-gamma expression and the sum is a logsumexp, so tails
    far below 1e-300 are still representable
    """
    if not isinstance(samples, int) or samples < 1:
        raise InvalidArgumentError(f"samples must be a positive integer, got {samples!r}")
    if not isinstance(successes, int) or not 0 <= successes <= samples:
        raise InvalidArgumentError(f"successes must be in [0, samples], got {successes!r}")
    p0 = Fraction(p0)
    if not 0 < p0 < 1:
        raise InvalidArgumentError(f"p0 must lie strictly between 0 and 1, got {p0}")
    if tail not in TAILS:
        raise InvalidArgumentError(f"tail must be 'greater' or 'less', got {tail!r}")

    if tail == "greater":
        ks = np.arange(successes, samples + 1, dtype=np.float64)
    else:
        ks = np.arange(0, successes + 1, dtype=np.float64)

    log_p = math.log(float(p0))
    log_q = math.log(float(1 - p0))
    log_terms = (gammaln(samples + 1) - gammaln(ks + 1) - gammaln(samples - ks + 1)
                 + ks * log_p + (samples - ks) * log_q)
    log_tail = min(0.0, float(logsumexp(log_terms)))
    return log_tail / math.log(10)


def compare_mst_to_ust(n: int, samples: int, seed: int, workers: int = 1, show_progress: bool = False) -> Dict:
    """
    MST estimate for G_n tested against the exact UST probability: tail
    'greater' for even n, 'less' for odd n. Evidence only
    """
    p0 = ust_balance_probability(n)
    summary = estimate_balance_probability(build_grid(n), "mst", samples, seed,
                                           workers=workers, show_progress=show_progress)
    tail = "less" if n % 2 else "greater"
    if p0 == 1:
        # n <= 2: every tree is balanced, nothing to test
        log10_p = 0.0
    else:
        log10_p = binomial_log10_pvalue(summary.successes, samples, p0, tail)
    return {
        "n": n,
        "ust_exact": f"{p0.numerator}/{p0.denominator}",
        "ust_6dp": format_fraction(p0, 6),
        "mst": summary.to_dict(),
        "tail": tail,
        "log10_pvalue": log10_p,
    }
