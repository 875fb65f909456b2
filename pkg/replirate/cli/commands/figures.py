"""Commands emitting the HDI, effective-size, overlap and conditional datasets."""

import math

import click
import numpy as np
import pandas as pd

from replirate.cli.options import FLOAT_LIST, INT_LIST, grid_options, level_option, output_options
from replirate.cli.output import HDI_TIE_RULE, run_config, write_table
from replirate.config import get_settings
from replirate.core.discrim import hdi_grid, minimal_separable_pair
from replirate.core.posterior2d import (
    OVERLAP_MU_VALUES,
    GridSpec,
    PriorSpec,
    conditional_density,
    joint_posterior,
    overlap_counts,
    overlap_frame,
    overlap_matrix,
)
from replirate.core.seqmodels import effective_sample_size
from replirate.utils.logger import get_logger

logger = get_logger(__name__)

PANEL_RHOS = (0.0, 0.05, 0.10, 0.15, 0.20, 0.25)


def _grid(grid_mu: int | None, grid_rho: int | None) -> GridSpec:
    base = GridSpec.from_settings()
    return base.model_copy(
        update={"n_mu": grid_mu or base.n_mu, "n_rho": grid_rho or base.n_rho}
    )


def _grid_decisions(grid: GridSpec) -> dict[str, str]:
    return {
        "grid": f"{grid.n_mu} x {grid.n_rho} cell midpoints on (0, 1)",
        "fisher_step": str(grid.fisher_step),
    }


@click.command("figure1")
@click.option("--rho", "rho_list", type=FLOAT_LIST, default=",".join(map(str, PANEL_RHOS)), show_default=True, help="rho per panel.")
@click.option("--m", "m_list", type=INT_LIST, default="5,50,500", show_default=True, help="Replication counts.")
@click.option("--mu-step", type=click.FloatRange(0.0, 0.5, min_open=True), default=0.01, show_default=True, help="Spacing of the mu axis.")
@level_option
@output_options
@click.pass_context
def figure1(ctx, rho_list, m_list, mu_step, level, out, fmt):
    """HDI of mu_hat = X/m across mu, per (rho, m)."""
    config = run_config(ctx)
    steps = int(round(1.0 / mu_step))
    mu_grid = np.round(np.linspace(0.0, 1.0, steps + 1), 10)
    frame = pd.concat(
        [hdi_grid(mu_grid, rho, m_list, config.level) for rho in rho_list], ignore_index=True
    )
    write_table(frame, config, {"hdi_tie_rule": HDI_TIE_RULE})


@click.command("effective-size")
@click.option("--m", "m_list", type=INT_LIST, default=None, help="Replication counts (default 1..300).")
@click.option("--rho", "rho_list", type=FLOAT_LIST, default=",".join(map(str, PANEL_RHOS)), show_default=True)
@output_options
@click.pass_context
def effective_size(ctx, m_list, rho_list, out, fmt):
    """Effective number of independent replications m/(1+(m-1)rho)."""
    config = run_config(ctx)
    m_list = m_list or tuple(range(1, 301))
    rows = []
    for rho in rho_list:
        for m in m_list:
            m_e = effective_sample_size(m, rho)
            rows.append(
                {
                    "m": m,
                    "rho": rho,
                    "m_e": m_e,
                    "m_e_rounded": int(math.floor(m_e + 0.5)),
                    "asymptote": 1.0 / rho if rho > 0 else None,
                }
            )
    write_table(pd.DataFrame(rows), config)


@click.command("overlap")
@click.option("--prior", default="uniform", show_default=True, help="uniform | jeffreys | fixed:<rho>")
@click.option("--m", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--mu", "mu_values", type=FLOAT_LIST, default=None, help="mu values (default 0.01, 0.12, ..., 0.89, 0.99).")
@grid_options
@output_options
@click.pass_context
def overlap(ctx, prior, m, mu_values, grid_mu, grid_rho, out, fmt):
    """Pairwise overlap of mu-marginal posteriors at x = round(m mu)."""
    config = run_config(ctx)
    prior_spec = PriorSpec.parse(prior)
    grid = _grid(grid_mu, grid_rho)
    mu_values = mu_values or OVERLAP_MU_VALUES

    matrix = overlap_matrix(mu_values, m, prior_spec, grid)
    frame = overlap_frame(mu_values, matrix)
    counts = dict(zip(mu_values, overlap_counts(mu_values, m)))
    frame.insert(2, "x_i", frame["mu_i"].map(counts))
    frame.insert(3, "x_j", frame["mu_j"].map(counts))

    decisions = {
        "prior": prior_spec.label,
        "mu_grid_reading": "0.01 in steps of 0.11 through 0.89, then 0.99",
        "count_rule": "x = round(m mu)",
        "lower_bound": (
            "entries are not always below the overlap expected under Binomial counts; "
            "at m = 100 the pairs (0.01, 0.99) and (0.45, 0.56) exceed it"
        ),
        **_grid_decisions(grid),
    }
    write_table(frame, config, decisions)


@click.command("conditional")
@click.option("--rho", "rho_list", type=FLOAT_LIST, default="0.05,0.15,0.25", show_default=True)
@click.option("--mu-true", "mu_true_list", type=FLOAT_LIST, default="0.2,0.4,0.6,0.8", show_default=True)
@click.option("--m", type=click.IntRange(min=1), default=100, show_default=True)
@grid_options
@output_options
@click.pass_context
def conditional(ctx, rho_list, mu_true_list, m, grid_mu, grid_rho, out, fmt):
    """Posterior densities of mu at fixed rho, for x = round(m mu_true)."""
    config = run_config(ctx)
    grid = _grid(grid_mu, grid_rho)
    frames = []
    for rho in rho_list:
        prior = PriorSpec(kind="fixed_rho", value=rho)
        for mu_true in mu_true_list:
            x = int(np.rint(m * mu_true))
            post = joint_posterior(x, m, prior, grid)
            frames.append(
                pd.DataFrame(
                    {
                        "rho": rho,
                        "mu_true": mu_true,
                        "x": x,
                        "mu": post.mu_nodes,
                        "density": conditional_density(post),
                    }
                )
            )
    write_table(pd.concat(frames, ignore_index=True), config, {"mu_nodes": grid.n_mu})


@click.command("separable-pair")
@click.option("--m", type=click.IntRange(min=1), default=17, show_default=True)
@click.option("--rho", type=click.FloatRange(0.0, 1.0), default=0.175, show_default=True)
@click.option("--tolerance", type=click.FloatRange(0.0, 0.5, min_open=True, max_open=True), default=None, help="mu search step (default 0.001).")
@click.option("--mu-max", type=click.FloatRange(0.5, 1.0, min_open=True), default=None, help="Largest mu tried (default 1 - tolerance).")
@level_option
@output_options
@click.pass_context
def separable_pair(ctx, m, rho, tolerance, mu_max, level, out, fmt):
    """Closest symmetric pair (1 - mu, mu) whose HDIs separate at (m, rho)."""
    config = run_config(ctx)
    tolerance = tolerance or get_settings().separation_tolerance
    pair = minimal_separable_pair(m, rho, config.level, tolerance, mu_max)
    row = {"m": m, "rho": rho, "separated": pair is not None}
    if pair is not None:
        row.update(
            {
                "mu_low": pair.mu_low,
                "mu_high": pair.mu_high,
                "low_lower": pair.low_interval.lower,
                "low_upper": pair.low_interval.upper,
                "high_lower": pair.high_interval.lower,
                "high_upper": pair.high_interval.upper,
                "gap": pair.gap,
            }
        )
    write_table(
        pd.DataFrame([row]),
        config,
        {"hdi_tie_rule": HDI_TIE_RULE, "search": f"upward scan from 0.5 in steps of {tolerance}"},
    )
