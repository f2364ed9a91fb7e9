import csv
import io
import json
import os
import time
from fractions import Fraction

import pytest

from backend.app.errors import InvalidArgumentError
from backend.app.services import reporting
from backend.app.services.verification import SuiteResult, VerificationReport


@pytest.mark.parametrize("text,expected", [
    ("5", [5]),
    ("2..5", [2, 3, 4, 5]),
    ("2-4", [2, 3, 4]),
    ("3:3", [3]),
    (7, [7]),
])
def test_parse_n_range(text, expected):
    assert reporting.parse_n_range(text) == expected


@pytest.mark.parametrize("text", ["", "0", "5..2", "a..b", "1..2..3"])
def test_parse_n_range_rejects(text):
    with pytest.raises(InvalidArgumentError):
        reporting.parse_n_range(text)


def test_ust_rows():
    rows = reporting.ust_exact_rows([1, 2, 3, 4, 5])
    assert [r["ratio"] for r in rows] == ["1", "1", "3/5", "11/14", "111/209"]
    assert [r["unreduced"] for r in rows[2:]] == ["9/15", "44/56", "111/209"]
    assert rows[3]["ratio_6dp"] == "0.785714"


def test_ust_row_n18():
    assert reporting.ust_exact_rows([18])[0]["ratio_6dp"] == "0.762892"


def test_mst_row_methods_agree():
    extensions = reporting.mst_exact_row(3, method="extensions")
    brute = reporting.mst_exact_row(3, method="bruteforce")
    assert extensions["ratio"] == brute["ratio"] == "4/7"
    assert extensions["method"] == "extensions"
    assert brute["method"] == "bruteforce"
    assert reporting.mst_exact_row(3)["method"] == "extensions"
    assert reporting.mst_exact_row(5)["ratio"] == "70052/135135"
    assert reporting.mst_exact_row(2)["ratio"] == "1"


def test_cell_seed_is_stable_and_distinct():
    assert reporting.cell_seed(1, 6) == reporting.cell_seed(1, 6)
    assert reporting.cell_seed(1, 6) != reporting.cell_seed(1, 7)
    assert 0 <= reporting.cell_seed(1, 6) < 2 ** 64


def test_table_max_n_2():
    table = reporting.build_table(max_n=2, samples=10, seed=1)
    assert table["odd"] == []
    (row,) = table["even"]
    assert (row.n, row.ust_cell(), row.mst_cell()) == (2, "1", "1")
    assert not row.approx_marker


def test_table_all_exact_to_5():
    table = reporting.build_table(max_n=5, samples=10, seed=1)
    rows = table["even"] + table["odd"]
    assert all(not r.approx_marker for r in rows)
    text = reporting.render_table(table, "text")
    assert reporting.APPROX not in text
    assert "3/5 = 0.6" in text
    assert "11/14 ≈ 0.785714" in text
    assert "248/315 ≈ 0.787302" in text
    assert "111/209 ≈ 0.531100" in text
    assert "70052/135135 ≈ 0.518385" in text
    assert "4/7 ≈ 0.571429" in text


def test_table_monte_carlo_cells_marked():
    table = reporting.build_table(max_n=7, samples=300, seed=5, exact_mst_max=3)
    by_n = {r.n: r for r in table["even"] + table["odd"]}
    assert not by_n[3].approx_marker
    for n in (4, 5, 6, 7):
        assert by_n[n].approx_marker
        assert by_n[n].mst_method == "montecarlo"
        assert by_n[n].mst_cell().startswith(reporting.APPROX)
        assert by_n[n].seed == reporting.cell_seed(5, n)
    # UST stays exact everywhere
    assert by_n[6].ust_cell() == "0.764103"


def test_table_deterministic():
    first = reporting.render_table(reporting.build_table(max_n=6, samples=200, seed=9), "csv")
    second = reporting.render_table(reporting.build_table(max_n=6, samples=200, seed=9), "csv")
    assert first == second


def test_table_csv_and_json():
    table = reporting.build_table(max_n=4, samples=10, seed=1)
    rows = list(csv.DictReader(io.StringIO(reporting.render_table(table, "csv"))))
    assert [r["n"] for r in rows] == ["2", "4", "3"]
    assert rows[1]["mst_value"] == "248/315"
    assert rows[1]["approx"] == "0"
    data = json.loads(reporting.render_table(table, "json"))
    assert data["odd"][0]["ust_exact"] == "3/5"


def test_table_rejects_small_max_n():
    with pytest.raises(InvalidArgumentError):
        reporting.build_table(max_n=1, samples=10, seed=1)


def test_table_row_marker_tracks_method():
    row = reporting.TableRow(n=6, ust_exact=Fraction(1, 2), ust_6dp="0.500000",
                             mst_value=0.7, mst_6dp="0.700000", mst_method="montecarlo", samples=5, seed=1)
    assert row.approx_marker
    assert row.to_dict()["approx"] is True


def test_limits_report():
    report = reporting.limits_report(19)
    assert report["constants"]["odd"]["decimal_6dp"] == "0.525783"
    assert report["constants"]["even"]["decimal_6dp"] == "0.762892"
    assert len(report["constants"]["odd"]["decimal_12dp"].split(".")[1]) == 12
    assert report["series_identity_check"] is True
    gap9 = next(g for g in report["gaps"] if g["n"] == 9)
    assert 2.1e-5 < float(gap9["gap"]) < 2.3e-5
    text = reporting.render_limits(report, "text")
    assert "0.525783" in text and "series identities: ok" in text


def test_terms_report():
    report = reporting.terms_report(10)
    assert report["sum"] == report["S"] == "115436"
    assert report["cut_channels"] == 10


def test_render_rows_formats():
    rows = [{"n": 3, "value": "4/7"}]
    assert json.loads(reporting.render_rows(rows, "json")) == rows
    assert reporting.render_rows(rows, "csv") == "n,value\n3,4/7\n"
    assert "4/7" in reporting.render_rows(rows, "text")
    with pytest.raises(InvalidArgumentError):
        reporting.render_rows(rows, "xml")


def test_render_verification():
    report = VerificationReport(max_n=3, samples=0, seed=1, suites=[
        SuiteResult(name="grid_counts", passed=True, detail="ok"),
        SuiteResult(name="balanced_terms_sum", passed=False, detail="n=4"),
    ])
    text = reporting.render_verification(report, "text")
    assert "FAIL: balanced_terms_sum" in text
    assert json.loads(reporting.render_verification(report, "json"))["failed"] == ["balanced_terms_sum"]


@pytest.mark.slow
@pytest.mark.skipif((os.cpu_count() or 1) < 4, reason="needs at least 4 cores")
def test_full_table_runtime():
    started = time.perf_counter()
    table = reporting.build_table(max_n=19, samples=1_000_000, seed=20240601, workers=os.cpu_count())
    elapsed = time.perf_counter() - started
    assert sum(row.approx_marker for row in table["even"] + table["odd"]) == 14
    assert elapsed < 300
