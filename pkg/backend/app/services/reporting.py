# reporting.py
# builds the rows behind the cli / api outputs and renders them as csv, json or aligned text
import csv
import io
import json
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Union

import numpy as np

from ..errors import InvalidArgumentError
from . import exact_mst, exact_sequences as seq, random_sampling
from .grid_model import build_grid

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json", "text")
APPROX = "∼"   # the "∼" marker on Monte Carlo cells
DEFAULT_EXACT_MST_MAX = 5


def parse_n_range(text) -> List[int]:
    """'7' -> [7], '2..5' / '2-5' / '2:5' -> [2, 3, 4, 5]"""
    if isinstance(text, int):
        text = str(text)
    match = re.fullmatch(r"\s*(\d+)\s*(?:(?:\.\.|-|:)\s*(\d+)\s*)?", str(text or ""))
    if not match:
        raise InvalidArgumentError(f"n must be an integer or a range like 2..19, got {text!r}")
    lo = int(match.group(1))
    hi = int(match.group(2)) if match.group(2) else lo
    if lo < 1 or hi < lo:
        raise InvalidArgumentError(f"bad n range {text!r}: need 1 <= start <= end")
    return list(range(lo, hi + 1))


def fraction_text(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def cell_seed(seed: int, n: int) -> int:
    # one independent 64-bit seed per table cell, reproducible from (seed, n)
    return int(np.random.SeedSequence([seed, n]).generate_state(1, np.uint64)[0])


# ---------------------------------------------------------
# UST
# ---------------------------------------------------------
def ust_exact_rows(ns: List[int]) -> List[Dict]:
    rows = []
    for n in ns:
        row = seq.exact_values(n)
        ratio = Fraction(int(row["ratio_num"]), int(row["ratio_den"]))
        row["ratio"] = fraction_text(ratio)
        # the unreduced pair the counting formulas produce
        row["unreduced"] = f"{row['S']}/{row['T']}"
        rows.append(row)
    return rows


def limits_report(max_n: int = 19) -> Dict:
    if max_n < 1:
        raise InvalidArgumentError(f"max_n must be at least 1, got {max_n}")
    constants = {}
    for parity, original in (("odd", "(3+sqrt(3))/9"), ("even", "(1+4*sqrt(3))/(6*sqrt(3))")):
        c = seq.limit_constant(parity)
        constants[parity] = {
            "form": original,
            "exact": c.exact_text(),
            "decimal_6dp": str(c.to_decimal(6)),
            "decimal_12dp": str(c.to_decimal(12)),
        }
    gaps = []
    for n in range(1, max_n + 1):
        gap = seq.limit_gap(n).to_decimal(30)
        gaps.append({
            "n": n,
            "parity": "odd" if n % 2 else "even",
            "ratio_6dp": seq.format_fraction(seq.ust_balance_probability(n), 6),
            "gap": f"{gap:.3e}",
        })
    return {
        "constants": constants,
        "series_identity_check": seq.series_identity_check(),
        "gaps": gaps,
    }


def terms_report(n: int) -> Dict:
    terms = seq.balanced_terms(n)
    return {
        "n": n,
        "terms": [
            {"multiplier": t.multiplier, "length": t.length, "square": str(t.square),
             "product": str(t.multiplier * t.length * t.square)}
            for t in terms
        ],
        "sum": str(sum(t.multiplier * t.length * t.square for t in terms)),
        "S": str(seq.balanced_count(n)),
        "cut_channels": seq.cut_channel_count(n),
    }


# ---------------------------------------------------------
# MST
# ---------------------------------------------------------
def mst_exact_row(n: int, method: str = "auto", limit: int = exact_mst.DEFAULT_EXTENSION_LIMIT,
                  permutation_cap: int = exact_mst.DEFAULT_PERMUTATION_CAP,
                  enumeration_cap: int = exact_mst.DEFAULT_ENUMERATION_CAP) -> Dict:
    graph = build_grid(n)
    method = str(method).strip().lower()
    if method not in exact_mst.METHODS + ("auto",):
        raise InvalidArgumentError(f"method must be one of extensions, bruteforce, auto; got {method!r}")
    used = method if method != "auto" else ("extensions" if graph.edge_count <= limit else "bruteforce")
    value = exact_mst.mst_balance_probability(graph, method=used, limit=limit,
                                              permutation_cap=permutation_cap, enumeration_cap=enumeration_cap)
    return {
        "n": n,
        "method": used,
        # same keys as the exact UST rows, plus the method
        "ratio": fraction_text(value),
        "ratio_num": str(value.numerator),
        "ratio_den": str(value.denominator),
        "ratio_6dp": seq.format_fraction(value, 6),
    }


# ---------------------------------------------------------
# Table
# ---------------------------------------------------------
@dataclass
class TableRow:
    n: int
    ust_exact: Fraction
    ust_6dp: str
    mst_value: Union[Fraction, float]
    mst_6dp: str
    mst_method: str                 # "exact" | "montecarlo"
    samples: Optional[int] = None
    seed: Optional[int] = None
    show_fraction: bool = False

    @property
    def approx_marker(self) -> bool:
        return self.mst_method == "montecarlo"

    def ust_cell(self) -> str:
        return _exact_cell(self.ust_exact, self.ust_6dp, self.show_fraction)

    def mst_cell(self) -> str:
        if self.approx_marker:
            return f"{APPROX}{self.mst_6dp}"
        return _exact_cell(self.mst_value, self.mst_6dp, True)

    def to_dict(self) -> Dict:
        data = {
            "n": self.n,
            "ust_exact": fraction_text(self.ust_exact),
            "ust_6dp": self.ust_6dp,
            "mst_value": fraction_text(self.mst_value) if not self.approx_marker else self.mst_6dp,
            "mst_6dp": self.mst_6dp,
            "mst_method": self.mst_method,
            "approx": self.approx_marker,
        }
        if self.approx_marker:
            data["samples"] = self.samples
            data["seed"] = self.seed
        return data


def _exact_cell(value: Fraction, six: str, show_fraction: bool) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    if not show_fraction:
        return six
    # "=" only when six decimals are the whole story
    sign = "=" if Fraction(six) == value else "≈"
    shown = six.rstrip("0") if sign == "=" else six
    return f"{fraction_text(value)} {sign} {shown}"


def table_row(n: int, samples: int, seed: int, exact_mst_max: int = DEFAULT_EXACT_MST_MAX,
              workers: int = 1, extension_limit: int = exact_mst.DEFAULT_EXTENSION_LIMIT,
              show_progress: bool = False) -> TableRow:
    ust = seq.ust_balance_probability(n)
    graph = build_grid(n)
    if n <= exact_mst_max:
        mst = exact_mst.mst_balance_probability_exact(graph, limit=extension_limit)
        return TableRow(n=n, ust_exact=ust, ust_6dp=seq.format_fraction(ust), mst_value=mst,
                        mst_6dp=seq.format_fraction(mst), mst_method="exact", show_fraction=True)
    s = cell_seed(seed, n)
    summary = random_sampling.estimate_balance_probability(graph, "mst", samples, s, workers=workers,
                                                           show_progress=show_progress)
    return TableRow(n=n, ust_exact=ust, ust_6dp=seq.format_fraction(ust), mst_value=summary.estimate,
                    mst_6dp=summary.estimate_6dp(), mst_method="montecarlo", samples=samples, seed=s)


def build_table(max_n: int = 19, samples: int = 1_000_000, seed: int = 1,
                exact_mst_max: int = DEFAULT_EXACT_MST_MAX, workers: int = 1,
                extension_limit: int = exact_mst.DEFAULT_EXTENSION_LIMIT,
                show_progress: bool = False) -> Dict[str, List[TableRow]]:
    if max_n < 2:
        raise InvalidArgumentError(f"max_n must be at least 2, got {max_n}")
    if exact_mst_max > max_n or exact_mst_max < 1:
        exact_mst_max = min(max(exact_mst_max, 1), max_n)
    if samples < 1 and max_n > exact_mst_max:
        raise InvalidArgumentError("samples must be positive when the table has Monte Carlo cells")
    table = {"even": [], "odd": []}
    for n in range(2, max_n + 1):
        row = table_row(n, samples, seed, exact_mst_max=exact_mst_max, workers=workers,
                        extension_limit=extension_limit, show_progress=show_progress)
        table["even" if n % 2 == 0 else "odd"].append(row)
        logger.info("table row n=%d: UST %s MST %s", n, row.ust_cell(), row.mst_cell())
    return table


# ---------------------------------------------------------
# rendering
# ---------------------------------------------------------
TABLE_CSV_COLUMNS = ["parity", "n", "ust_exact", "ust_6dp", "mst_value", "mst_6dp", "mst_method",
                     "approx", "samples", "seed"]


def _aligned(headers: List[str], rows: List[List]) -> str:
    cells = [[str(h) for h in headers]] + [["" if c is None else str(c) for c in r] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _csv(headers: List[str], rows: List[List]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    return out.getvalue()


def render_table(table: Dict[str, List[TableRow]], fmt: str = "text") -> str:
    fmt = check_format(fmt)
    if fmt == "json":
        return json.dumps({k: [r.to_dict() for r in rows] for k, rows in table.items()}, indent=2)
    if fmt == "csv":
        rows = []
        for parity in ("even", "odd"):
            for r in table[parity]:
                d = r.to_dict()
                rows.append([parity, r.n, d["ust_exact"], r.ust_6dp, d["mst_value"], r.mst_6dp,
                             r.mst_method, int(r.approx_marker), r.samples, r.seed])
        return _csv(TABLE_CSV_COLUMNS, rows)
    parts = []
    for parity in ("even", "odd"):
        parts.append(f"{parity} n")
        parts.append(_aligned(["n", "UST", "MST"], [[r.n, r.ust_cell(), r.mst_cell()] for r in table[parity]]))
        parts.append("")
    return "\n".join(parts).rstrip() + "\n"


def render_rows(rows: List[Dict], fmt: str = "text", columns: Optional[List[str]] = None) -> str:
    """generic list-of-dicts rendering (ust-exact, mst-exact, compare, gaps)"""
    fmt = check_format(fmt)
    if fmt == "json":
        return json.dumps(rows, indent=2)
    columns = columns or (list(rows[0].keys()) if rows else [])
    data = [[r.get(c) for c in columns] for r in rows]
    if fmt == "csv":
        return _csv(columns, data)
    return _aligned(columns, data) + "\n"


def render_summary(summary: random_sampling.MonteCarloSummary, fmt: str = "text") -> str:
    fmt = check_format(fmt)
    if fmt == "json":
        return json.dumps(summary.to_dict(), indent=2)
    if fmt == "csv":
        return _csv(random_sampling.CSV_COLUMNS, [summary.csv_row()])
    return _aligned(random_sampling.CSV_COLUMNS, [summary.csv_row()]) + "\n"


def render_limits(report: Dict, fmt: str = "text") -> str:
    fmt = check_format(fmt)
    if fmt == "json":
        return json.dumps(report, indent=2)
    if fmt == "csv":
        return render_rows(report["gaps"], "csv")
    lines = []
    for parity, c in report["constants"].items():
        lines.append(f"{parity:<5} limit {c['form']} = {c['exact']} = {c['decimal_12dp']} ({c['decimal_6dp']})")
    lines.append(f"series identities: {'ok' if report['series_identity_check'] else 'FAILED'}")
    lines.append("")
    lines.append(render_rows(report["gaps"], "text").rstrip())
    return "\n".join(lines) + "\n"


def render_verification(report, fmt: str = "text") -> str:
    fmt = check_format(fmt)
    data = report.to_dict()
    if fmt == "json":
        return json.dumps(data, indent=2)
    rows = [{"suite": s["name"], "result": "ok" if s["passed"] else "FAILED",
             "seconds": s["seconds"], "detail": s["detail"]} for s in data["suites"]]
    body = render_rows(rows, fmt, columns=["suite", "result", "seconds", "detail"])
    if fmt == "csv":
        return body
    verdict = "PASS" if data["passed"] else "FAIL: " + ", ".join(data["failed"])
    return body + verdict + "\n"


def check_format(fmt: str) -> str:
    fmt = str(fmt).strip().lower()
    if fmt not in FORMATS:
        raise InvalidArgumentError(f"format must be one of {', '.join(FORMATS)}, got {fmt!r}")
    return fmt
