"""Table writers: CSV with a commented metadata header, or JSON."""

import json
from typing import Any

import click
import pandas as pd

from replirate import __version__
from replirate.cli.schemas import OutputMetadata, RunConfig
from replirate.config import get_settings
from replirate.core.exceptions import DataFileError
from replirate.utils.logger import get_logger

logger = get_logger(__name__)

# Numerical choices shared by several commands.
HDI_TIE_RULE = "shortest contiguous run; then higher mass; then lower start"


def command_line(ctx: click.Context) -> str:
    """Deterministic rendering of the invoked command and its parsed options."""
    parts = [ctx.command_path]
    for name in sorted(ctx.params):
        value = ctx.params[name]
        if value is None:
            continue
        if isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        parts.append(f"--{name.replace('_', '-')}={value}")
    return " ".join(parts)


def run_config(ctx: click.Context, **overrides: Any) -> RunConfig:
    """RunConfig from the click context's common options."""
    settings = get_settings()
    params = ctx.params
    values = {
        "command": ctx.info_name,
        "command_line": command_line(ctx),
        "out": params.get("out"),
        "format": params.get("fmt") or settings.output_format,
        "seed": params.get("seed"),
        "level": params.get("level") or settings.hdi_level,
        "float_digits": settings.float_digits,
    }
    values.update(overrides)
    return RunConfig(**values)


def _metadata(config: RunConfig, decisions: dict[str, Any]) -> OutputMetadata:
    return OutputMetadata(
        tool=get_settings().app_name,
        version=__version__,
        command_line=config.command_line,
        seed=config.seed,
        level=config.level,
        decisions=decisions,
    )


def render(frame: pd.DataFrame, config: RunConfig, decisions: dict[str, Any] | None = None) -> str:
    """Serialise a table with its metadata header."""
    metadata = _metadata(config, decisions or {})
    if config.format == "json":
        rows = frame.astype(object).where(frame.notna(), None).to_dict(orient="records")
        return json.dumps({"metadata": metadata.model_dump(), "rows": rows}, indent=2) + "\n"

    header = [
        f"# tool: {metadata.tool}",
        f"# version: {metadata.version}",
        f"# command: {metadata.command_line}",
        f"# seed: {'' if metadata.seed is None else metadata.seed}",
        f"# level: {metadata.level}",
    ]
    header += [f"# {key}: {value}" for key, value in metadata.decisions.items()]
    body = frame.to_csv(index=False, float_format=f"%.{config.float_digits}g", lineterminator="\n")
    return "\n".join(header) + "\n" + body


def write_table(frame: pd.DataFrame, config: RunConfig, decisions: dict[str, Any] | None = None) -> None:
    """Write to `config.out` or stdout.

    Raises:
        DataFileError: if the output path cannot be written
    """
    text = render(frame, config, decisions)
    if config.out is None:
        click.echo(text, nl=False)
        return
    try:
        config.out.parent.mkdir(parents=True, exist_ok=True)
        config.out.write_text(text, encoding="utf-8")
    except OSError as e:
        raise DataFileError(f"cannot write {config.out}: {e}") from e
    logger.info(f"Wrote {len(frame)} rows to {config.out}")
