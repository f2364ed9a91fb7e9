import json

import pytest

from backend.app import cli as gridcli
from backend.app.services import exact_sequences


def invoke(runner, *args):
    return runner.invoke(gridcli.cli, list(args))


def test_ust_exact_text(runner):
    result = invoke(runner, "ust-exact", "--n", "2..5")
    assert result.exit_code == 0
    assert "111/209" in result.output
    assert "0.531100" in result.output


def test_ust_exact_csv(runner):
    result = invoke(runner, "ust-exact", "--n", "3", "--format", "csv")
    assert result.output.splitlines() == ["n,T,S,ratio,unreduced,ratio_6dp", "3,15,9,3/5,9/15,0.600000"]


def test_mst_exact_json(runner):
    result = invoke(runner, "mst-exact", "--n", "3", "--format", "json")
    assert json.loads(result.output)[0]["ratio"] == "4/7"


def test_sample(runner):
    result = invoke(runner, "sample", "--n", "2", "--dist", "ust", "--samples", "10", "--seed", "1", "--format", "json")
    assert json.loads(result.output)["estimate"] == 1.0


def test_table_writes_file(runner, tmp_path):
    out = tmp_path / "table.csv"
    result = invoke(runner, "table", "--max-n", "4", "--format", "csv", "--out", str(out))
    assert result.exit_code == 0
    assert "248/315" in out.read_text()


def test_limits(runner):
    result = invoke(runner, "limits", "--max-n", "9")
    assert "0.762892" in result.output


def test_trees(runner):
    result = invoke(runner, "trees", "--n", "2")
    assert result.output.splitlines() == ["0,1,2", "0,1,3", "0,2,3", "1,2,3"]


# exit codes go through main(), which builds its own app from the environment
@pytest.fixture
def quiet_env(monkeypatch):
    monkeypatch.setenv("GRIDBALANCE_LOG_LEVEL", '"WARNING"')
    monkeypatch.setenv("GRIDBALANCE_VERIFY_SAMPLES", "0")


def test_main_ok(quiet_env, capsys):
    assert gridcli.main(["ust-exact", "--n", "1"]) == gridcli.EXIT_OK
    assert "1" in capsys.readouterr().out


def test_main_usage_errors(quiet_env):
    assert gridcli.main(["ust-exact", "--n", "5..2"]) == gridcli.EXIT_USAGE
    assert gridcli.main(["sample", "--n", "3", "--dist", "lerw"]) == gridcli.EXIT_USAGE
    assert gridcli.main(["no-such-command"]) == gridcli.EXIT_USAGE


def test_main_resource_limit(quiet_env):
    assert gridcli.main(["mst-exact", "--n", "5", "--method", "bruteforce"]) == gridcli.EXIT_LIMIT


def test_main_verify(quiet_env, monkeypatch):
    assert gridcli.main(["verify", "--max-n", "2", "--only", "grid_counts"]) == gridcli.EXIT_OK
    real = exact_sequences.balanced_count
    monkeypatch.setattr(exact_sequences, "balanced_count", lambda n: real(n) + 1)
    assert gridcli.main(["verify", "--max-n", "3", "--only", "balanced_terms_sum"]) == gridcli.EXIT_VERIFY
