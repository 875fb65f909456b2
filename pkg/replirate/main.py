"""Command-line entry point"""

# Load .env file first, before settings are read
from dotenv import load_dotenv

load_dotenv()

import click
from pydantic import ValidationError

from replirate import __version__
from replirate.cli.commands import examples, figures, ml4
from replirate.cli.schemas import ErrorResponse
from replirate.config import get_settings
from replirate.core.exceptions import DomainError, ReplirateError
from replirate.utils.logger import get_logger, setup_logging

settings = get_settings()


class ReplirateGroup(click.Group):
    """Click group that turns package errors into one stderr line and an exit code."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except ValidationError as e:
            self._fail(ctx, DomainError(_validation_message(e)))
        except ReplirateError as e:
            self._fail(ctx, e)

    @staticmethod
    def _fail(ctx: click.Context, error: ReplirateError) -> None:
        logger = get_logger("replirate.main")
        logger.debug(f"{type(error).__name__}: {error.message}", exc_info=True)
        response = ErrorResponse.from_error(error)
        click.echo(response.line(), err=True)
        ctx.exit(response.exit_code)


def _validation_message(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        where = ".".join(str(loc) for loc in item["loc"]) or error.title
        parts.append(f"{where}: {item['msg']}")
    return "; ".join(parts)


@click.group(cls=ReplirateGroup, context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name=settings.app_name)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], case_sensitive=False),
    default=settings.log_level,
    show_default=True,
)
def cli(log_level: str) -> None:
    """Replication-sequence models, discriminability diagnostics and the ML4 reanalysis.

    Every command writes one table (CSV by default) to --out or stdout.
    """
    setup_logging(log_level)
    get_logger("replirate.main").debug(f"{settings.app_name} {__version__}")


cli.add_command(figures.figure1)
cli.add_command(figures.effective_size)
cli.add_command(figures.overlap)
cli.add_command(figures.conditional)
cli.add_command(figures.separable_pair)
cli.add_command(examples.example1)
cli.add_command(examples.example2)
cli.add_command(ml4.ml4)
cli.add_command(ml4.ml4_contrast)


def main() -> None:
    cli(prog_name=settings.app_name)


if __name__ == "__main__":
    main()
