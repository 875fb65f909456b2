"""Commands for the two heterogeneity examples."""

import click

from replirate.cli.options import FLOAT_LIST, output_options
from replirate.cli.output import run_config, write_table
from replirate.config import get_settings
from replirate.core.exceptions import DomainError
from replirate.core.hetero import (
    PANEL_THRESHOLDS,
    EX1_SIGMAS,
    EX1_THETAS,
    EX2_BIASES,
    EX2_NOISES,
    critical_count,
    ex1_se_from_n,
    ex1_table,
    ex2_table,
)
from replirate.core.specfun import binomial_tail


def _joined(values) -> str:
    return ",".join(str(v) for v in values)


@click.command("example1")
@click.option("--theta", "theta_list", type=FLOAT_LIST, default=_joined(EX1_THETAS), show_default=True, help="Common effects theta.")
@click.option("--sigma", "sigma_list", type=FLOAT_LIST, default=_joined(EX1_SIGMAS), show_default=True, help="Between-experiment SDs.")
@click.option("--se", type=click.FloatRange(0.0, min_open=True), default=None, help="Within-experiment SE (default 1).")
@click.option("--n", type=click.IntRange(min=1), default=None, help="Sample size; SE = sigma_s / sqrt(n).")
@click.option("--sigma-s", type=click.FloatRange(0.0, min_open=True), default=None, help="Per-subject SD, used with --n.")
@output_options
@click.pass_context
def example1(ctx, theta_list, sigma_list, se, n, sigma_s, out, fmt):
    """mu and rho under population heterogeneity of the effect."""
    config = run_config(ctx)
    if (n is None) != (sigma_s is None):
        raise DomainError("--n and --sigma-s must be given together")
    if n is not None:
        if se is not None:
            raise DomainError("give either --se or --n with --sigma-s, not both")
        se = ex1_se_from_n(sigma_s, n)
    se = 1.0 if se is None else se

    frame = ex1_table(theta_list, sigma_list, se)
    write_table(frame, config, {"panel_thresholds": _joined(PANEL_THRESHOLDS)})


@click.command("example2")
@click.option("--u", type=float, default=1.0, show_default=True, help="Standardised stimulus level.")
@click.option("--bias", "bias_list", type=FLOAT_LIST, default=_joined(EX2_BIASES), show_default=True, help="Delivery biases b/tau.")
@click.option("--noise", "noise_list", type=FLOAT_LIST, default=_joined(EX2_NOISES), show_default=True, help="Delivery noise sigma/tau.")
@click.option("--n", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--critical", type=click.FloatRange(0.0, 1.0, min_open=True, max_open=True), default=0.59, show_default=True)
@click.option("--nodes", type=click.IntRange(min=1), default=None, help="Starting Gauss-Hermite nodes (default 256).")
@output_options
@click.pass_context
def example2(ctx, u, bias_list, noise_list, n, critical, nodes, out, fmt):
    """mu and rho under bias and noise in stimulus delivery."""
    config = run_config(ctx)
    if any(noise < 0.0 for noise in noise_list):
        raise DomainError("--noise values must be non-negative")
    settings = get_settings()
    frame = ex2_table(u, bias_list, noise_list, n, critical, nodes)

    c = critical_count(n, critical)
    decisions = {
        "critical_count": c,
        "alpha": float(binomial_tail(n, c, 0.5)),
        "quadrature": f"Gauss-Hermite from {nodes or settings.gh_nodes} nodes, doubled to tolerance {settings.gh_tolerance}",
        "undefined_rho": f"rho left empty when min(mu, 1 - mu) < {settings.undefined_rho_tolerance}",
    }
    write_table(frame, config, decisions)
