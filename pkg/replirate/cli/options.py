"""Shared click options and list parameter types."""

from pathlib import Path
from typing import Callable

import click


class NumberList(click.ParamType):
    """Comma-separated numbers, e.g. ``0,0.05,0.10``."""

    name = "list"

    def __init__(self, cast: type = float) -> None:
        self.cast = cast

    def convert(self, value, param, ctx):
        if isinstance(value, (list, tuple)):
            return tuple(value)
        items = [item.strip() for item in str(value).split(",") if item.strip()]
        if not items:
            self.fail("expected at least one value", param, ctx)
        try:
            return tuple(self.cast(item) for item in items)
        except ValueError:
            self.fail(f"'{value}' is not a comma-separated list of {self.cast.__name__}s", param, ctx)


FLOAT_LIST = NumberList(float)
INT_LIST = NumberList(int)


def output_options(func: Callable) -> Callable:
    """--out and --format."""
    func = click.option(
        "--format",
        "fmt",
        type=click.Choice(["csv", "json"]),
        default=None,
        help="Output format (default from settings: csv).",
    )(func)
    func = click.option(
        "--out",
        type=click.Path(dir_okay=False, path_type=Path),
        default=None,
        help="Output file; stdout when omitted.",
    )(func)
    return func


def level_option(func: Callable) -> Callable:
    return click.option(
        "--level",
        type=click.FloatRange(0.0, 1.0, min_open=True, max_open=True),
        default=None,
        help="HDI probability level (default 0.95).",
    )(func)


def grid_options(func: Callable) -> Callable:
    """--grid-mu and --grid-rho."""
    func = click.option("--grid-rho", type=click.IntRange(min=2), default=None, help="rho grid nodes.")(func)
    func = click.option("--grid-mu", type=click.IntRange(min=2), default=None, help="mu grid nodes.")(func)
    return func


def seed_options(func: Callable) -> Callable:
    """--seed and --draws."""
    func = click.option("--draws", type=click.IntRange(min=1), default=None, help="Monte Carlo draws S.")(func)
    func = click.option("--seed", type=click.IntRange(min=0), default=None, help="Base seed.")(func)
    return func
