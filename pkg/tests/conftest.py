from pathlib import Path

import pandas as pd
import pytest
from click.testing import CliRunner

from replirate.config import get_settings
from replirate.core.posterior2d import GridSpec


@pytest.fixture(autouse=True)
def fresh_settings():
    """Settings are cached per process; drop the cache around each test."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def invoke(runner):
    from replirate.main import cli

    def _invoke(*args: str):
        return runner.invoke(cli, ["--log-level", "WARNING", *args])

    return _invoke


@pytest.fixture
def small_grid() -> GridSpec:
    return GridSpec(n_mu=40, n_rho=40)


def _read_table(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def _header_lines(path: Path) -> dict[str, str]:
    header = {}
    for line in path.read_text().splitlines():
        if not line.startswith("# "):
            break
        key, _, value = line[2:].partition(": ")
        header[key] = value
    return header


@pytest.fixture
def read_table():
    """Data rows of a written table."""
    return _read_table


@pytest.fixture
def header_lines():
    """Metadata header of a written table as a dict."""
    return _header_lines


@pytest.fixture
def site_records(tmp_path) -> Path:
    """Synthetic site-level effect sizes for two protocols."""
    path = tmp_path / "sites.csv"
    rows = [
        ("aa01", 0.31, 40, 42, "AA"),
        ("aa02", -0.12, 55, 51, "AA"),
        ("aa03", 0.05, 38, 40, "AA"),
        ("aa04", 0.22, 60, 58, "AA"),
        ("aa05", -0.28, 45, 47, "AA"),
        ("aa06", 0.10, 50, 50, "AA"),
        ("ih01", 0.45, 30, 33, "IH"),
        ("ih02", -0.40, 36, 35, "IH"),
        ("ih03", 0.02, 41, 39, "IH"),
        ("ih04", 0.61, 28, 30, "IH"),
        ("ih05", -0.35, 44, 46, "IH"),
        ("ih06", 0.18, 33, 31, "IH"),
    ]
    frame = pd.DataFrame(rows, columns=["site_id", "g", "n1", "n2", "protocol"])
    frame.to_csv(path, index=False)
    return path
