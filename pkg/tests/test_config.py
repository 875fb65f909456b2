import pytest
from pydantic import ValidationError

from replirate.config import Settings, get_settings


def test_defaults():
    settings = get_settings()
    assert settings.hdi_level == 0.95
    assert (settings.grid_mu, settings.grid_rho) == (200, 200)
    assert settings.mc_draws == 300_000
    assert settings.rho_ddof == 1
    assert settings.output_format == "csv"


def test_cached():
    assert get_settings() is get_settings()


def test_environment_override(monkeypatch):
    monkeypatch.setenv("REPLIRATE_MC_DRAWS", "5000")
    monkeypatch.setenv("REPLIRATE_HDI_LEVEL", "0.9")
    settings = get_settings()
    assert settings.mc_draws == 5000
    assert settings.hdi_level == 0.9


def test_dotenv_file(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / ".env").write_text("REPLIRATE_GH_NODES=512\n")
    assert Settings().gh_nodes == 512


@pytest.mark.parametrize("name, value", [("REPLIRATE_HDI_LEVEL", "1.5"), ("REPLIRATE_GRID_MU", "1")])
def test_invalid_values(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ValidationError):
        Settings()
