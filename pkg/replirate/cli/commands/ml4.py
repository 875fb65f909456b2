"""Many Labs 4 reanalysis commands."""

from pathlib import Path

import click
import pandas as pd

from replirate.cli.options import level_option, output_options, seed_options
from replirate.cli.output import run_config, write_table
from replirate.config import get_settings
from replirate.core.exceptions import DataFileError, DomainError
from replirate.core.ml4 import (
    GROUPS,
    NIG_PRIORS,
    EffectSizeRecord,
    Ml4Pipeline,
    Protocol,
    bundled_path,
    expand_groups,
    group_contrast,
    load_records,
    load_summary,
    se_hedges,
)
from replirate.utils.logger import get_logger

logger = get_logger(__name__)

REFERENCE_FILE = "ml4_reference.csv"
SUMMARY_FILE = "ml4_summary.csv"


def _priors(prior: str) -> list[str]:
    return list(NIG_PRIORS) if prior == "both" else [prior]


def with_reference(records: list[EffectSizeRecord]) -> list[EffectSizeRecord]:
    """Append the bundled reference study unless the input already has one."""
    if any(rec.protocol is Protocol.REFERENCE for rec in records):
        return records
    logger.info("No REFERENCE row in input; appending bundled reference study")
    return records + load_records(bundled_path(REFERENCE_FILE))


def _reference_se(records: list[EffectSizeRecord]) -> str:
    ses = [se_hedges(rec) for rec in records if rec.protocol is Protocol.REFERENCE]
    return ", ".join(f"{se:.6g}" for se in ses)


def _decisions(pipeline: Ml4Pipeline, source: str) -> dict[str, str]:
    settings = get_settings()
    return {
        "source": source,
        "draws": str(pipeline.S),
        "mapping": pipeline.mapping,
        "site_variance_ddof": str(settings.rho_ddof),
        "chunk_size": str(settings.mc_chunk_size),
        "rho_clamp": "[0, 1]",
    }


@click.command("ml4")
@click.option("--input", "input_path", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Site records CSV (site_id, g or d, n1, n2, protocol).")
@click.option("--summary", "summary_path", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Group summaries CSV (default: bundled).")
@click.option("--prior", type=click.Choice(["jeffreys", "weak", "both"]), default="both", show_default=True)
@click.option("--groups", default="all", show_default=True, help="all | " + " | ".join(GROUPS))
@click.option("--mapping", type=click.Choice(["simulate", "delta"]), default="simulate", show_default=True)
@click.option("--se", type=click.FloatRange(0.0, min_open=True), default=1.0, show_default=True, help="Per-site SE when only summaries are available.")
@seed_options
@level_option
@output_options
@click.pass_context
def ml4(ctx, input_path, summary_path, prior, groups, mapping, se, seed, draws, level, out, fmt):
    """Posterior means and HDIs of (mu, rho) per group and prior."""
    settings = get_settings()
    seed = settings.mc_seed if seed is None else seed
    config = run_config(ctx, seed=seed)
    pipeline = Ml4Pipeline(draws=draws, seed=seed, level=config.level, mapping=mapping)
    names = expand_groups(groups)

    summaries = []
    if input_path is not None:
        records = with_reference(load_records(input_path))
        source = f"site records from {input_path.name}"
        for name in names:
            for p in _priors(prior):
                summaries.append(pipeline.run_records(records, name, p)[0])
    else:
        summary_path = summary_path or bundled_path(SUMMARY_FILE)
        available = load_summary(summary_path)
        if groups.strip().lower() == "all":
            names = [name for name in names if name in available]
        missing = [name for name in names if name not in available]
        if missing or not names:
            raise DataFileError(
                f"{Path(summary_path).name} has no summary for {missing or names}; "
                f"available: {sorted(available)}. Pass site records with --input"
            )
        source = f"group summaries from {Path(summary_path).name}, SE={se}"
        for name in names:
            for p in _priors(prior):
                summaries.append(pipeline.run_summary(available[name], name, p, se)[0])

    frame = pd.DataFrame([s.model_dump() for s in summaries])
    decisions = _decisions(pipeline, source)
    if input_path is not None:
        decisions["reference_se"] = _reference_se(records)
    write_table(frame, config, decisions)


@click.command("ml4-contrast")
@click.option("--input", "input_path", type=click.Path(dir_okay=False, path_type=Path), required=True, help="Site records CSV.")
@click.option("--group-a", default="aa", show_default=True)
@click.option("--group-b", default="ih", show_default=True)
@click.option("--prior", type=click.Choice(list(NIG_PRIORS)), default="jeffreys", show_default=True)
@click.option("--mapping", type=click.Choice(["simulate", "delta"]), default="simulate", show_default=True)
@seed_options
@level_option
@output_options
@click.pass_context
def ml4_contrast(ctx, input_path, group_a, group_b, prior, mapping, seed, draws, level, out, fmt):
    """Posterior of rho_b - rho_a from independent draws of two groups."""
    settings = get_settings()
    seed = settings.mc_seed if seed is None else seed
    config = run_config(ctx, seed=seed)
    for name in (group_a, group_b):
        if name not in GROUPS:
            raise DomainError(f"unknown group '{name}'; expected one of {list(GROUPS)}")

    records = with_reference(load_records(input_path))
    first = Ml4Pipeline(draws=draws, seed=seed, level=config.level, mapping=mapping)
    second = Ml4Pipeline(draws=draws, seed=seed + 1, level=config.level, mapping=mapping)
    _, draws_a = first.run_records(records, group_a, prior)
    _, draws_b = second.run_records(records, group_b, prior)
    contrast = group_contrast(draws_a, draws_b, config.level)

    row = {
        "group_a": group_a,
        "group_b": group_b,
        "prior": prior,
        "mean_diff": contrast.mean_diff,
        "hdi_lo": contrast.interval.lower,
        "hdi_hi": contrast.interval.upper,
        "exceedance": contrast.exceedance,
        "pairs": contrast.pairs,
    }
    decisions = _decisions(first, f"site records from {input_path.name}")
    decisions["group_seeds"] = f"{group_a}={seed}, {group_b}={seed + 1}"
    decisions["ties"] = "counted one half in the exceedance"
    decisions["reference_se"] = _reference_se(records)
    write_table(pd.DataFrame([row]), config, decisions)
