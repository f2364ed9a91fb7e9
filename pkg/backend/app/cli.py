# cli.py
# command line surface. Commands run inside an app context, so they read the
# same config (defaults + GRIDBALANCE_* env vars) as the http api
import sys

import click
from flask import current_app
from flask.cli import FlaskGroup

from . import create_app
from .errors import InvalidArgumentError, ResourceLimitError, VerificationFailure
from .services import exact_mst, random_sampling, reporting, spanning_enumeration, verification
from .services.grid_model import build_grid

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_LIMIT = 2
EXIT_VERIFY = 3

FORMAT_OPTION = click.option("--format", "fmt", type=click.Choice(reporting.FORMATS), default="text",
                             show_default=True, help="output format")
OUT_OPTION = click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
                          help="write to this file instead of stdout")


cli = FlaskGroup(
    create_app=create_app,
    add_default_commands=False,
    add_version_option=False,
    help="Balanced spanning trees of the 2xn grid: exact values, sampling and Table reproduction.",
)


def _config(name, value):
    return current_app.config[name] if value is None else value


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
        current_app.logger.info("wrote %s", out)
    else:
        click.echo(text.rstrip("\n"))


# ---------------------------------------------------------
# UST
# ---------------------------------------------------------
@cli.command("ust-exact")
@click.option("--n", "n_range", default="2..19", show_default=True, help="n or a range like 2..19")
@FORMAT_OPTION
@OUT_OPTION
def ust_exact_command(n_range, fmt, out):
    """exact T_n, S_n and the balance ratio for each n"""
    rows = reporting.ust_exact_rows(reporting.parse_n_range(n_range))
    columns = ["n", "T", "S", "ratio", "unreduced", "ratio_6dp"]
    _emit(reporting.render_rows(rows, fmt, columns=columns if fmt != "json" else None), out)


@cli.command("limits")
@click.option("--max-n", type=int, default=19, show_default=True, help="largest n in the gap listing")
@FORMAT_OPTION
@OUT_OPTION
def limits_command(max_n, fmt, out):
    """both limit constants (exact and 12 decimals) and |ratio(n) - limit|"""
    _emit(reporting.render_limits(reporting.limits_report(max_n), fmt), out)


# ---------------------------------------------------------
# MST
# ---------------------------------------------------------
@cli.command("mst-exact")
@click.option("--n", "n", type=int, required=True)
@click.option("--method", type=click.Choice(exact_mst.METHODS + ("auto",)), default="auto", show_default=True)
@FORMAT_OPTION
@OUT_OPTION
def mst_exact_command(n, method, fmt, out):
    """exact probability that the MST of a random edge order is balanced"""
    row = reporting.mst_exact_row(
        n, method=method,
        limit=current_app.config["EXTENSION_LIMIT"],
        permutation_cap=current_app.config["PERMUTATION_CAP"],
        enumeration_cap=current_app.config["ENUMERATION_CAP"],
    )
    _emit(reporting.render_rows([row], fmt), out)


@cli.command("trees")
@click.option("--n", "n", type=int, required=True)
@click.option("--balanced-only", is_flag=True, help="only trees with a balanced cut edge")
@OUT_OPTION
def trees_command(n, balanced_only, out):
    """one line per spanning tree of G_n: its sorted edge ids"""
    lines = spanning_enumeration.dump_trees(build_grid(n), balanced_only=balanced_only,
                                            cap=current_app.config["ENUMERATION_CAP"])
    _emit("\n".join(lines), out)


# ---------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------
@cli.command("sample")
@click.option("--n", "n", type=int, required=True)
@click.option("--dist", type=click.Choice(random_sampling.DISTRIBUTIONS), default="mst", show_default=True)
@click.option("--samples", type=int, default=None, help="default: DEFAULT_SAMPLES")
@click.option("--seed", type=int, default=None, help="default: DEFAULT_SEED")
@click.option("--workers", type=int, default=None)
@FORMAT_OPTION
@OUT_OPTION
def sample_command(n, dist, samples, seed, workers, fmt, out):
    """Monte Carlo estimate of the balance probability"""
    summary = random_sampling.estimate_balance_probability(
        build_grid(n), dist,
        samples=_config("DEFAULT_SAMPLES", samples),
        seed=_config("DEFAULT_SEED", seed),
        workers=_config("WORKERS", workers),
        show_progress=current_app.config["SHOW_PROGRESS"],
    )
    _emit(reporting.render_summary(summary, fmt), out)


@cli.command("compare")
@click.option("--n", "n_range", default="6..16", show_default=True)
@click.option("--samples", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=None)
@FORMAT_OPTION
@OUT_OPTION
def compare_command(n_range, samples, seed, workers, fmt, out):
    """MST estimate against the exact UST value, one-sided binomial log10 p"""
    seed = _config("DEFAULT_SEED", seed)
    rows = []
    for n in reporting.parse_n_range(n_range):
        result = random_sampling.compare_mst_to_ust(
            n, _config("DEFAULT_SAMPLES", samples), reporting.cell_seed(seed, n),
            workers=_config("WORKERS", workers), show_progress=current_app.config["SHOW_PROGRESS"],
        )
        rows.append({
            "n": n,
            "ust_6dp": result["ust_6dp"],
            "mst_6dp": result["mst"]["estimate_6dp"],
            "samples": result["mst"]["samples"],
            "tail": result["tail"],
            "log10_pvalue": f"{result['log10_pvalue']:.2f}",
        })
    _emit(reporting.render_rows(rows, fmt), out)


@cli.command("table")
@click.option("--max-n", type=int, default=19, show_default=True)
@click.option("--samples", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--exact-mst-max", type=int, default=None, help="largest n with an exact MST cell")
@click.option("--workers", type=int, default=None)
@FORMAT_OPTION
@OUT_OPTION
def table_command(max_n, samples, seed, exact_mst_max, workers, fmt, out):
    """UST and MST balance probabilities for n = 2..max_n, split by parity"""
    table = reporting.build_table(
        max_n=max_n,
        samples=_config("DEFAULT_SAMPLES", samples),
        seed=_config("DEFAULT_SEED", seed),
        exact_mst_max=_config("EXACT_MST_MAX", exact_mst_max),
        workers=_config("WORKERS", workers),
        extension_limit=current_app.config["EXTENSION_LIMIT"],
        show_progress=current_app.config["SHOW_PROGRESS"],
    )
    _emit(reporting.render_table(table, fmt), out)


# ---------------------------------------------------------
# verification
# ---------------------------------------------------------
@cli.command("verify")
@click.option("--max-n", type=int, default=8, show_default=True)
@click.option("--samples", type=int, default=None, help="0 skips the statistical suites")
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=None)
@click.option("--only", multiple=True, help="run just these suites (repeatable)")
@FORMAT_OPTION
@OUT_OPTION
def verify_command(max_n, samples, seed, workers, only, fmt, out):
    """run every cross-check; exit code 3 when any of them fails"""
    report = verification.run_verification(
        max_n=max_n,
        samples=_config("VERIFY_SAMPLES", samples),
        seed=_config("DEFAULT_SEED", seed),
        workers=_config("WORKERS", workers),
        only=list(only) or None,
    )
    _emit(reporting.render_verification(report, fmt), out)
    if not report.passed:
        raise VerificationFailure(report.failed)


def main(argv=None) -> int:
    """run the cli and turn the outcome into an exit code"""
    try:
        result = cli.main(args=argv, prog_name="gridbalance", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except InvalidArgumentError as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_USAGE
    except ResourceLimitError as e:
        click.echo(f"resource limit: {e}", err=True)
        return EXIT_LIMIT
    except VerificationFailure as e:
        click.echo(str(e), err=True)
        return EXIT_VERIFY
    # --help and friends come back as their exit code
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
