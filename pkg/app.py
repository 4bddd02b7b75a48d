import logging
from pathlib import Path
from typing import Any, Dict, Optional

import click
from rich.console import Console

from config.settings import ConfigError, RunConfig, build_config, setting
from engine.operators import default_cache, set_backend
from lattice.cosets import mv_module, vpp_module
from lattice.fock import WlogError
from models.kernels import COSET_LABELS, coset_of, kernel_dims
from models.logarithmic import NotFound, find_subsingular
from models.vpp import graded_dims
from reports.render import render_dims, render_kernel_dims, render_report, render_subsingular
from reports.store import DiskMatrixStore
from reports.suites import run_verification

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2

console = Console()


def _load(ctx: click.Context, overrides: Dict[str, Any], config_file: Optional[str]) -> RunConfig:
    try:
        cfg = build_config(overrides, config_file)
    except (ConfigError, WlogError) as e:
        click.echo(f"configuration error: {e}", err=True)
        ctx.exit(EXIT_CONFIG)
    if cfg.cache_dir:
        set_backend(DiskMatrixStore(cfg.cache_dir))
        logger.info(f"Matrix cache directory: {cfg.cache_dir}")
    return cfg


def params_options(fn):
    fn = click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False),
                      help="JSON or YAML run configuration; flags override it.")(fn)
    fn = click.option("--cache-dir", default=None, help="Directory of the persistent matrix cache.")(fn)
    fn = click.option("--pprime", type=int, default=None, help="p′, coprime to p.")(fn)
    fn = click.option("--p", "p", type=int, default=None, help="p >= 2.")(fn)
    return fn


@click.group()
@click.option("--verbose", is_flag=True, help="Log at DEBUG level.")
def cli(verbose: bool):
    """Exact verification of the logarithmic extensions of W(p,p′)."""
    level = logging.DEBUG if verbose else getattr(logging, str(setting("WLOG_LOG_LEVEL")).upper(), logging.INFO)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


@cli.command()
@params_options
@click.option("--max-weight", default=None, help="Largest conformal weight examined (rational).")
@click.option("--module", default=None, type=click.Choice(["V", "MV", "VL", "M", "fields", "all"]))
@click.option("--out", default=None, help="Path of the JSON report.")
@click.option("--jobs", type=int, default=None, help="Worker threads.")
@click.option("--field-window", type=int, default=None, help="Weight window for field identities.")
@click.option("--stretch", is_flag=True, default=None, help="Also run the weight-(2p-1)(2p′-1) primaries check.")
@click.option("--timings", is_flag=True, default=None, help="Write per-check timings into the report.")
@click.pass_context
def verify(ctx, p, pprime, cache_dir, config_file, max_weight, module, out, jobs, field_window, stretch, timings):
    """Run the verification suites selected by --module."""
    cfg = _load(ctx, {
        "p": p, "pprime": pprime, "max_weight": max_weight, "module": module, "cache_dir": cache_dir,
        "out": out, "jobs": jobs, "field_window": field_window, "stretch": stretch or None,
        "timings": timings or None,
    }, config_file)
    try:
        report = run_verification(cfg)
    except ConfigError as e:
        click.echo(f"configuration error: {e}", err=True)
        ctx.exit(EXIT_CONFIG)
    out_path = Path(cfg.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(report.to_json(timings=cfg.timings), encoding="utf-8")
    logger.info(f"Report written to {out_path}")
    cache = default_cache()
    logger.debug(f"matrix cache: {cache.hits} hits, {cache.misses} misses")
    render_report(report, console)
    ctx.exit(EXIT_OK if report.passed else EXIT_FAILED)


@cli.command()
@params_options
@click.option("--module", default="V", type=click.Choice(["V", "MV"]))
@click.option("--max-weight", default=None)
@click.pass_context
def basis(ctx, p, pprime, cache_dir, config_file, module, max_weight):
    """Graded dimensions of V(p,p′) or MV(p,p′)."""
    cfg = _load(ctx, {"p": p, "pprime": pprime, "max_weight": max_weight, "cache_dir": cache_dir}, config_file)
    target = vpp_module(cfg.params) if module == "V" else mv_module(cfg.params)
    render_dims(f"{target.name}{cfg.params.label()} up to weight {cfg.max_weight}",
                graded_dims(target, cfg.weight_limit), console)


@cli.command("kernel-dims")
@params_options
@click.option("--coset", default="VL", type=click.Choice(sorted(COSET_LABELS)))
@click.option("--max-weight", default=None)
@click.pass_context
def kernel_dims_cmd(ctx, p, pprime, cache_dir, config_file, coset, max_weight):
    """Dimensions of Ker Q ∩ Ker Q~ per weight, checked against the elimination oracle."""
    cfg = _load(ctx, {"p": p, "pprime": pprime, "max_weight": max_weight, "cache_dir": cache_dir}, config_file)
    rows = kernel_dims(coset_of(coset, cfg.params), cfg.weight_limit, cfg.params)
    render_kernel_dims(f"Ker Q ∩ Ker Q~ in {COSET_LABELS[coset]}{cfg.params.label()}", rows, console)
    ctx.exit(EXIT_OK if all(r.bases_agree for r in rows) else EXIT_FAILED)


@cli.command()
@params_options
@click.pass_context
def subsingular(ctx, p, pprime, cache_dir, config_file):
    """Solve for the subsingular vector of V_{L+α/2} and print it exactly."""
    cfg = _load(ctx, {"p": p, "pprime": pprime, "cache_dir": cache_dir}, config_file)
    try:
        record = find_subsingular(cfg.params)
    except NotFound as e:
        click.echo(f"no subsingular vector: {e}", err=True)
        ctx.exit(EXIT_FAILED)
    render_subsingular(record, cfg.params, console)


if __name__ == "__main__":
    cli()
