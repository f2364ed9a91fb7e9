# verification.py
# cross-module invariant suites behind the `verify` command and /api/verify.
# every suite returns (passed, detail); run_verification times them and
# turns exceptions into failures instead of crashing the run
import logging
import math
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.stats import chisquare

from ..errors import InvalidArgumentError
from . import exact_mst, exact_sequences as seq, grid_model, random_sampling, spanning_enumeration
from .grid_model import SmallGraph, build_grid

logger = logging.getLogger(__name__)

DEFAULT_VERIFY_SAMPLES = 1_000_000
CHI_SQUARE_ALPHA = 1e-3
Z_9999 = 3.8906  # two-sided 99.99% normal quantile
RANDOM_GRAPH_COUNT = 20


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0


@dataclass
class VerificationReport:
    max_n: int
    samples: int
    seed: int
    suites: List[SuiteResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    @property
    def failed(self) -> List[str]:
        return [s.name for s in self.suites if not s.passed]

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "max_n": self.max_n,
            "samples": self.samples,
            "seed": self.seed,
            "failed": self.failed,
            "suites": [asdict(s) for s in self.suites],
        }


Outcome = Tuple[bool, str]


# ---------------------------------------------------------
# grid_model
# ---------------------------------------------------------
def check_grid_counts(max_n: int) -> Outcome:
    for n in range(1, 101):
        g = build_grid(n)
        if g.vertex_count != 2 * n or g.edge_count != 3 * n - 2:
            return False, f"n={n}: {g.vertex_count} vertices, {g.edge_count} edges"
        if n >= 2:
            degrees = Counter(g.degree(v) for v in range(g.vertex_count))
            if degrees[2] != 4 or degrees[2] + degrees[3] != g.vertex_count:
                return False, f"n={n}: degree profile {dict(degrees)}"
    return True, "counts 2n / 3n-2 and degrees hold for n <= 100"


def check_cut_edges_independent(max_n: int) -> Outcome:
    checked = 0
    for n in range(1, max_n + 1):
        for tree in spanning_enumeration.enumerate_spanning_trees(build_grid(n)):
            fast = grid_model.balanced_cut_edges(tree)
            slow = grid_model.balanced_cut_edges_by_deletion(tree)
            if fast != slow:
                return False, f"n={n} tree {tree.serialize()}: {fast} vs {slow}"
            checked += 1
    return True, f"{checked} trees agree"


# ---------------------------------------------------------
# exact_sequences
# ---------------------------------------------------------
def check_enumeration_matches_formulas(max_n: int) -> Outcome:
    for n in range(1, max_n + 1):
        result = spanning_enumeration.count_balanced_brute(build_grid(n))
        expected = (seq.tree_count(n), seq.balanced_count(n))
        if (result.total_trees, result.balanced_trees) != expected:
            return False, f"n={n}: enumeration {(result.total_trees, result.balanced_trees)} vs formula {expected}"
    return True, f"(T_n, S_n) match enumeration for n <= {max_n}"


def check_split_tallies(max_n: int) -> Outcome:
    for n in range(2, max_n + 1):
        expected = sorted(
            term.length * term.square
            for term in seq.balanced_terms(n)
            for _ in range(term.multiplier)
        )
        got = spanning_enumeration.balanced_split_tallies(build_grid(n))
        if got != expected:
            return False, f"n={n}: per-split tallies {got} vs terms {expected}"
        if len(got) != seq.cut_channel_count(n) or seq.cut_channel_count(n) != n:
            return False, f"n={n}: {len(got)} splits, cut_channel_count {seq.cut_channel_count(n)}"
    return True, f"per-split tree counts match the term decomposition for n <= {max_n}"


def check_recurrence_forms(max_n: int) -> Outcome:
    coeffs = seq.generating_coefficients(200)
    for n in range(1, 201):
        t = seq.tree_count(n)
        if t != seq.tree_count_closed(n) or t != coeffs[n - 1]:
            return False, f"n={n}: recurrence / closed form / series disagree"
    return True, "recurrence = closed form = series coefficients for n <= 200"


def check_super_multiplicativity(max_n: int) -> Outcome:
    T = seq.tree_count
    for a in range(1, 21):
        for b in range(1, 21):
            if T(a) * T(b) > T(a + b):
                return False, f"T_{a} T_{b} > T_{a + b}"
            for c in range(1, 21):
                if T(a) * T(b) * T(c) > T(a + b + c):
                    return False, f"T_{a} T_{b} T_{c} > T_{a + b + c}"
    return True, "T_a T_b (T_c) <= T_(a+b(+c)) for a, b, c <= 20"


def check_dominating_bound(max_n: int) -> Outcome:
    T = seq.tree_count
    for m in range(1, 21):
        for i in range(m):
            if T(m - i) ** 2 * T(2 * i + 1) > T(2 * m + 1):
                return False, f"T_{m - i}^2 T_{2 * i + 1} > T_{2 * m + 1}"
    return True, "T_(m-i)^2 T_(2i+1) <= T_(2m+1) for 0 <= i < m <= 20"


def check_balanced_terms(max_n: int) -> Outcome:
    for n in range(2, 101):
        terms = seq.balanced_terms(n)
        if sum(t.multiplier * t.length * t.square for t in terms) != seq.balanced_count(n):
            return False, f"n={n}: terms do not sum to S_n"
        if seq.cut_channel_count(n) != n:
            return False, f"n={n}: cut_channel_count {seq.cut_channel_count(n)}"
    return True, "term sums equal S_n for 2 <= n <= 100"


def check_limits(max_n: int) -> Outcome:
    if not seq.series_identity_check():
        bad = [k for k, ok in seq.series_identity_checks().items() if not ok]
        return False, f"series identities failed: {bad}"
    if str(seq.limit_constant("odd").to_decimal(6)) != "0.525783":
        return False, "odd constant does not round to 0.525783"
    if str(seq.limit_constant("even").to_decimal(6)) != "0.762892":
        return False, "even constant does not round to 0.762892"

    bound = Fraction(1, 10 ** 6)
    for n in range(1, 101):
        p = seq.ust_balance_probability(n)
        if not 0 < p <= 1 or (p == 1) != (n in (1, 2)):
            return False, f"n={n}: probability {p} out of range"
        if n >= 13 and not seq.limit_gap(n) < bound:
            return False, f"n={n}: gap {seq.limit_gap(n).to_decimal(12)} >= 1e-6"

    # odd gaps shrink from n = 7 on, even gaps from n = 10 on (n = 8 -> 10 grows)
    for start in (7, 10):
        gaps = [seq.limit_gap(n) for n in range(start, 101, 2)]
        for k in range(1, len(gaps)):
            if not gaps[k] < gaps[k - 1]:
                return False, f"gap not decreasing at n={start + 2 * k}"
    return True, "limits, gaps and series identities hold"


def check_term_limits(max_n: int) -> Outcome:
    # at n = 41 / 40 the first few term ratios already sit within 1e-12 of their limits
    for n, parity in ((41, "odd"), (40, "even")):
        m = n // 2
        for i in range(4):
            ratio = Fraction(seq.tree_count(m - i) ** 2, seq.tree_count(n))
            gap = abs(seq.Quadratic.of(ratio) - seq.term_limit(parity, i))
            if not gap < Fraction(1, 10 ** 12):
                return False, f"n={n} i={i}: T_(m-i)^2/T_n is {gap.to_decimal(15)} from its limit"
    return True, "term ratios approach a/r^(2i+1) (odd) and a x^i (even)"


# ---------------------------------------------------------
# exact_mst
# ---------------------------------------------------------
def check_mst_normalization(max_n: int) -> Outcome:
    top = min(max_n, 6)
    for n in range(1, top + 1):
        total = sum(exact_mst.mst_tree_distribution(build_grid(n)).values())
        if total != 1:
            return False, f"n={n}: MST tree probabilities sum to {total}"
    return True, f"MST tree probabilities sum to 1 for n <= {top}"


def random_small_graphs(seed: int, count: int = RANDOM_GRAPH_COUNT, max_edges: int = 8) -> List[SmallGraph]:
    """connected graphs with an even vertex count and at most max_edges edges"""
    source = random_sampling.RandomSource(seed)
    graphs = []
    for k in range(count):
        gen = source.generator(k)
        V = int(gen.choice([2, 4, 6]))
        edges = set()
        for v in range(1, V):
            u = int(gen.integers(0, v))
            edges.add((u, v))
        possible = [(u, v) for u in range(V) for v in range(u + 1, V) if (u, v) not in edges]
        target = int(gen.integers(V - 1, min(max_edges, V * (V - 1) // 2) + 1))
        gen.shuffle(possible)
        for e in possible[:target - len(edges)]:
            edges.add(e)
        graphs.append(SmallGraph(vertex_count=V, edges=tuple(sorted(edges))))
    return graphs


def check_mst_oracle(max_n: int, seed: int) -> Outcome:
    for n in range(2, min(max_n, 4) + 1):
        g = build_grid(n)
        exact = exact_mst.mst_balance_probability_exact(g)
        brute = exact_mst.mst_balance_probability_bruteforce(g)
        if exact != brute:
            return False, f"n={n}: extensions {exact} vs brute force {brute}"
    for k, g in enumerate(random_small_graphs(seed)):
        exact = exact_mst.mst_balance_probability_exact(g)
        brute = exact_mst.mst_balance_probability_bruteforce(g)
        if exact != brute:
            return False, f"random graph {k} {g.edges}: {exact} vs {brute}"
    return True, f"extensions = brute force on grids n <= {min(max_n, 4)} and {RANDOM_GRAPH_COUNT} random graphs"


def check_downset_dp(max_n: int, seed: int) -> Outcome:
    graphs = [build_grid(n) for n in range(1, min(max_n, 3) + 1)]
    graphs += [g for g in random_small_graphs(seed, max_edges=7) if g.edge_count <= 7]
    posets = 0
    for g in graphs:
        for tree in spanning_enumeration.enumerate_spanning_trees(g):
            poset = exact_mst.fundamental_cycle_poset(g, tree)
            if exact_mst.count_linear_extensions(poset) != exact_mst.count_linear_extensions_bruteforce(poset):
                return False, f"poset of tree {tree.serialize()} on {g.edges}"
            posets += 1
    return True, f"downset DP = permutation filtering on {posets} posets"


def check_kruskal_cycle_property(max_n: int, seed: int) -> Outcome:
    source = random_sampling.RandomSource(seed)
    for n in range(1, min(max_n, 4) + 1):
        g = build_grid(n)
        for k in range(200):
            order = source.generator(k).permutation(g.edge_count).tolist()
            tree = grid_model.make_spanning_tree(g, random_sampling.kruskal_scan(g, order))
            rank = {e: pos for pos, e in enumerate(order)}
            poset = exact_mst.fundamental_cycle_poset(g, tree)
            for f in range(g.edge_count):
                if any(rank[e] > rank[f] for e in poset.predecessor_ids(f)):
                    return False, f"n={n}: Kruskal tree {tree.serialize()} breaks the cycle property"
    return True, "Kruskal output is the cycle-property MST for 200 orders per n <= 4"


# ---------------------------------------------------------
# statistical (seeded, deterministic)
# ---------------------------------------------------------
def check_ust_uniformity(max_n: int, samples: int, seed: int) -> Outcome:
    for n in (2, 3):
        g = build_grid(n)
        index = {t.edge_ids: k for k, t in enumerate(spanning_enumeration.enumerate_spanning_trees(g))}
        source = random_sampling.RandomSource(seed)
        observed = np.zeros(len(index), dtype=np.int64)
        for i in range(samples):
            tree = random_sampling.sample_ust(g, source, i)
            if tree.edge_ids not in index:
                return False, f"n={n}: sample {i} is not a spanning tree"
            observed[index[tree.edge_ids]] += 1
        p_value = chisquare(observed).pvalue
        if p_value < CHI_SQUARE_ALPHA:
            return False, f"n={n}: chi-square p = {p_value:.3g}"
    return True, f"UST frequencies pass chi-square at alpha {CHI_SQUARE_ALPHA} ({samples} samples)"


def check_mst_frequencies(max_n: int, samples: int, seed: int) -> Outcome:
    for n in (3, 4):
        g = build_grid(n)
        exact = exact_mst.mst_tree_distribution(g)
        source = random_sampling.RandomSource(seed)
        counts = Counter(random_sampling.sample_mst(g, source, i).edge_ids for i in range(samples))
        for edge_ids, p in exact.items():
            p = float(p)
            se = math.sqrt(p * (1 - p) / samples)
            if abs(counts[edge_ids] / samples - p) > 4 * se:
                return False, f"n={n}: tree {sorted(edge_ids)} frequency off by more than 4 SE"
        if set(counts) - set(exact):
            return False, f"n={n}: sampler produced a non-tree"
    return True, f"MST per-tree frequencies within 4 SE ({samples} samples)"


def check_mst_sampling_consistency(max_n: int, samples: int, seed: int, workers: int = 1) -> Outcome:
    for n in range(3, min(max_n, 5) + 1):
        g = build_grid(n)
        exact = float(exact_mst.mst_balance_probability_exact(g))
        summary = random_sampling.estimate_balance_probability(g, "mst", samples, seed, workers=workers)
        half = Z_9999 * summary.std_error
        if not summary.estimate - half <= exact <= summary.estimate + half:
            return False, f"n={n}: exact {exact:.6f} outside 99.99% CI around {summary.estimate:.6f}"
    return True, "exact MST values inside the 99.99% Monte Carlo interval"


# ---------------------------------------------------------
# runner
# ---------------------------------------------------------
def suites_for(max_n: int, samples: int, seed: int, workers: int = 1) -> List[Tuple[str, Callable[[], Outcome]]]:
    suites = [
        ("grid_counts", lambda: check_grid_counts(max_n)),
        ("cut_edges_independent", lambda: check_cut_edges_independent(max_n)),
        ("enumeration_matches_formulas", lambda: check_enumeration_matches_formulas(max_n)),
        ("split_tallies_match_terms", lambda: check_split_tallies(max_n)),
        ("recurrence_closed_form_series", lambda: check_recurrence_forms(max_n)),
        ("super_multiplicativity", lambda: check_super_multiplicativity(max_n)),
        ("dominating_bound", lambda: check_dominating_bound(max_n)),
        ("balanced_terms_sum", lambda: check_balanced_terms(max_n)),
        ("limits_and_series", lambda: check_limits(max_n)),
        ("term_limits", lambda: check_term_limits(max_n)),
        ("mst_normalization", lambda: check_mst_normalization(max_n)),
        ("mst_oracle_equivalence", lambda: check_mst_oracle(max_n, seed)),
        ("downset_dp_vs_filtering", lambda: check_downset_dp(max_n, seed)),
        ("kruskal_cycle_property", lambda: check_kruskal_cycle_property(max_n, seed)),
    ]
    if samples > 0:
        suites += [
            ("ust_chi_square", lambda: check_ust_uniformity(max_n, samples, seed)),
            ("mst_tree_frequencies", lambda: check_mst_frequencies(max_n, samples, seed)),
            ("mst_sampling_consistency", lambda: check_mst_sampling_consistency(max_n, samples, seed, workers)),
        ]
    return suites


def run_verification(max_n: int = 8, samples: int = DEFAULT_VERIFY_SAMPLES, seed: int = 1,
                     workers: int = 1, only: Optional[List[str]] = None) -> VerificationReport:
    """samples = 0 skips the statistical suites"""
    if max_n < 1:
        raise InvalidArgumentError(f"max_n must be at least 1, got {max_n}")
    if samples < 0:
        raise InvalidArgumentError(f"samples must be >= 0, got {samples}")
    report = VerificationReport(max_n=max_n, samples=samples, seed=seed)
    for name, suite in suites_for(max_n, samples, seed, workers):
        if only and name not in only:
            continue
        start = time.perf_counter()
        try:
            passed, detail = suite()
        except Exception as e:  # a crashing suite is a failing suite
            logger.exception("suite %s raised", name)
            passed, detail = False, f"{type(e).__name__}: {e}"
        elapsed = time.perf_counter() - start
        report.suites.append(SuiteResult(name=name, passed=passed, detail=detail, seconds=round(elapsed, 3)))
        logger.info("verify %-30s %s (%.2fs)", name, "ok" if passed else "FAILED", elapsed)
    return report
