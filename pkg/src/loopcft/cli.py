"""Command-line entry point.

Every verification subcommand prints a JSON report (schema_version 1) to
stdout or ``--output`` and exits 0 when all checks pass, 1 when any check
fails, and 2 on usage or configuration errors.  A flat JSON config file can
seed any knob; explicit flags always win over the file.
"""

from __future__ import annotations

import json
from pathlib import Path

import click

from . import __version__, cache as cache_store, loewner
from .reports import (
    Report,
    RunConfig,
    report_all,
    suite_bubble,
    suite_commutators,
    suite_gram,
    suite_kac,
    suite_loewner,
    suite_operators,
    suite_reflection,
    suite_singular,
)

_CONFIG_HELP = "JSON config file with flat keys; explicit flags override it."


def _config(ctx: click.Context, **overrides) -> RunConfig:
    try:
        return RunConfig.from_sources(ctx.obj.get("config_path"), overrides)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


def _emit(ctx: click.Context, report: Report, output: str | None) -> None:
    destination = output if output is not None else report.params.get("output", "-")
    text = report.to_json()
    if destination in (None, "-"):
        click.echo(text)
    else:
        Path(destination).write_text(text + "\n")
        click.echo(f"report written to {destination}", err=True)
    ctx.exit(0 if report.overall == "pass" else 1)


def _run_suite(ctx: click.Context, suite, cfg: RunConfig, output: str | None, **kw):
    try:
        report = suite(cfg, **kw)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    _emit(ctx, report, output)


def _resolve_cache_dir(cfg: RunConfig) -> Path:
    if cfg.cache_dir is not None:
        return Path(cfg.cache_dir)
    return cache_store.default_cache_dir()


_output_option = click.option(
    "--output", "-o", default=None, help="Write the report here instead of stdout."
)
_kappa_option = click.option(
    "--kappa", default=None, help="Curve parameter as an exact rational, e.g. 8/3."
)
_lambda_option = click.option(
    "--lambda", "weight", default=None, help="Conformal weight as an exact rational."
)


@click.group()
@click.version_option(version=__version__, prog_name="loopcft")
@click.option("--config", "config_path", default=None, help=_CONFIG_HELP)
@click.pass_context
def main(ctx: click.Context, config_path: str | None) -> None:
    """Exact Virasoro-on-coefficients checks, spectra, and Loewner demos."""
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path


@main.command("verify-commutators")
@click.option("--max-mode", type=int, default=None, help="Largest |n| to bracket.")
@click.option("--max-degree", type=int, default=None, help="State degree to certify.")
@_output_option
@click.pass_context
def verify_commutators(ctx, max_mode, max_degree, output):
    """Check every bracket relation on a shared operator window."""
    cfg = _config(ctx, max_mode=max_mode, max_degree=max_degree)
    _run_suite(ctx, suite_commutators, cfg, output)


@main.command("gram")
@click.option("--level", type=int, default=None, help="Highest level to compare.")
@_kappa_option
@_lambda_option
@_output_option
@click.pass_context
def gram(ctx, level, kappa, weight, output):
    """Geometric pairings against the abstract Gram form, plus an inverse."""
    cfg = _config(ctx, level=level, kappa=kappa, weight=weight)
    _run_suite(ctx, suite_gram, cfg, output)


@main.command("kac")
@click.option("--level", type=int, default=None, help="Level of the determinant.")
@_kappa_option
@_output_option
@click.pass_context
def kac(ctx, level, kappa, output):
    """Determinant of the Gram form and its degenerate-weight roots."""
    cfg = _config(ctx, level=level, kappa=kappa)
    _run_suite(ctx, suite_kac, cfg, output)


@main.command("singular")
@click.option("--level", type=int, default=None, help="Cap on the levels examined.")
@_kappa_option
@_output_option
@click.pass_context
def singular(ctx, level, kappa, output):
    """Null states along the degenerate families and their rank drops."""
    cfg = _config(ctx, level=level, kappa=kappa)
    _run_suite(ctx, suite_singular, cfg, output)


@main.command("operators")
@click.option("--max-mode", type=int, default=None, help="Largest |n| to inspect.")
@click.option("--max-degree", type=int, default=None, help="Index window margin.")
@_output_option
@click.pass_context
def operators(ctx, max_mode, max_degree, output):
    """Degree structure, scalar anchors, and duality of the mode operators."""
    cfg = _config(ctx, max_mode=max_mode, max_degree=max_degree)
    _run_suite(ctx, suite_operators, cfg, output)


@main.command("reflection")
@_kappa_option
@_lambda_option
@_output_option
@click.pass_context
def reflection(ctx, kappa, weight, output):
    """Reflection coefficient: normalization, first pole, spot values."""
    cfg = _config(ctx, kappa=kappa, weight=weight)
    _run_suite(ctx, suite_reflection, cfg, output)


@main.command("bubble-limit")
@click.option("--csv", "csv_path", default=None, help="Write a convergence scan CSV.")
@_output_option
@click.pass_context
def bubble_limit(ctx, csv_path, output):
    """Bubble masses: kernel-difference limits against the closed forms."""
    cfg = _config(ctx)
    _run_suite(ctx, suite_bubble, cfg, output, csv_path=csv_path)


@main.command("loewner-demo")
@_kappa_option
@click.option("--dt", type=float, default=None, help="Solver and sampler time step.")
@click.option("--seeds", type=int, default=None, help="Sample size for the variance check.")
@click.option("--seed", type=int, default=None, help="Base seed.")
@click.option("--trace-csv", default=None, help="Also write one sampled trace here.")
@_output_option
@click.pass_context
def loewner_demo(ctx, kappa, dt, seeds, seed, trace_csv, output):
    """Forward map, trace, and driver statistics for the random driver."""
    cfg = _config(ctx, kappa=kappa, loewner_dt=dt, loewner_seeds=seeds, seed=seed)
    if trace_csv is not None:
        driver = loewner.sample_sle_driving(
            float(cfg.kappa), 1.0, cfg.loewner_dt, seed=cfg.seed
        )
        rows = loewner.write_trace_csv(trace_csv, loewner.trace(driver))
        click.echo(f"trace with {rows} points written to {trace_csv}", err=True)
    _run_suite(ctx, suite_loewner, cfg, output)


@main.command("report-all")
@click.option("--level", type=int, default=None, help="Cap for the algebraic suites.")
@click.option("--max-mode", type=int, default=None, help="Largest |n| to bracket.")
@click.option("--seeds", type=int, default=None, help="Loewner variance sample size.")
@click.option("--seed", type=int, default=None, help="Base seed.")
@_kappa_option
@_output_option
@click.pass_context
def report_all_cmd(ctx, level, max_mode, seeds, seed, kappa, output):
    """Every suite back to back, merged into one report."""
    cfg = _config(
        ctx, level=level, max_mode=max_mode, loewner_seeds=seeds, seed=seed, kappa=kappa
    )
    _run_suite(ctx, report_all, cfg, output)


@main.group("cache")
def cache_group():
    """Manage the persistent operator-table store."""


@cache_group.command("warm")
@click.option("--max-mode", type=int, default=4, show_default=True)
@click.option("--max-index", type=int, default=8, show_default=True)
@click.option("--cache-dir", default=None, help="Store location (else env or default).")
@click.pass_context
def cache_warm(ctx, max_mode, max_index, cache_dir):
    """Build both operator families and persist them, cross-checking old files."""
    cfg = _config(ctx, cache_dir=cache_dir)
    directory = _resolve_cache_dir(cfg)
    report = Report("cache-warm", {**cfg.params(), "max_index": max_index})

    def warm() -> tuple[bool, str]:
        try:
            _, info = cache_store.warm(directory, max_mode, max_index)
        except cache_store.CacheConsistencyError as exc:
            return False, str(exc)
        checked = ", ".join(info["checked_against"]) or "nothing"
        return True, (
            f"modes {info['modes'][0]}..{info['modes'][-1]} at max_index "
            f"{max_index} -> {info['path']}; cross-checked against {checked}"
        )

    report.run(f"warm modes |n| <= {max_mode}", warm)
    _emit(ctx, report, None)


@cache_group.command("clear")
@click.option("--cache-dir", default=None, help="Store location (else env or default).")
@click.pass_context
def cache_clear(ctx, cache_dir):
    """Delete every cache file."""
    cfg = _config(ctx, cache_dir=cache_dir)
    directory = _resolve_cache_dir(cfg)
    report = Report("cache-clear", cfg.params())
    report.run(
        "clear", lambda: (True, f"removed {cache_store.clear(directory)} files")
    )
    _emit(ctx, report, None)


@cache_group.command("stat")
@click.option("--cache-dir", default=None, help="Store location (else env or default).")
@click.pass_context
def cache_stat(ctx, cache_dir):
    """Summarize each cache file: modes, window, size."""
    cfg = _config(ctx, cache_dir=cache_dir)
    directory = _resolve_cache_dir(cfg)
    report = Report("cache-stat", cfg.params())

    def stat() -> tuple[bool, str]:
        entries = cache_store.stat(directory)
        return True, json.dumps(entries, sort_keys=True)

    report.run(f"stat {directory}", stat)
    _emit(ctx, report, None)


if __name__ == "__main__":
    main()
