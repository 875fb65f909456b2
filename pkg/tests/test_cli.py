import json

import pytest

from replirate import __version__


def test_help(invoke):
    result = invoke("--help")
    assert result.exit_code == 0
    for command in ("figure1", "effective-size", "overlap", "conditional", "separable-pair", "example1", "example2", "ml4", "ml4-contrast"):
        assert command in result.output


def test_version(runner):
    from replirate.main import cli

    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


class TestEffectSize:
    def test_values_and_header(self, invoke, tmp_path, read_table, header_lines):
        out = tmp_path / "me.csv"
        result = invoke("effective-size", "--m", "100,274", "--rho", "0.1", "--out", str(out))
        assert result.exit_code == 0, result.output

        header = header_lines(out)
        assert header["tool"] == "replirate"
        assert header["version"] == __version__
        assert "effective-size" in header["command"]
        assert "seed" in header

        frame = read_table(out)
        assert frame["m_e"].tolist() == pytest.approx([9.17, 9.68], abs=0.01)
        assert frame["m_e_rounded"].tolist() == [9, 10]
        assert frame["asymptote"].tolist() == pytest.approx([10.0, 10.0])

    def test_byte_identical_reruns(self, invoke, tmp_path):
        out = tmp_path / "me.csv"
        invoke("effective-size", "--m", "17", "--rho", "0.175,0.373", "--out", str(out))
        first = out.read_bytes()
        invoke("effective-size", "--m", "17", "--rho", "0.175,0.373", "--out", str(out))
        assert out.read_bytes() == first

    def test_json(self, invoke, tmp_path):
        out = tmp_path / "me.json"
        result = invoke("effective-size", "--m", "10", "--rho", "0", "--format", "json", "--out", str(out))
        assert result.exit_code == 0, result.output
        payload = json.loads(out.read_text())
        assert payload["metadata"]["tool"] == "replirate"
        assert payload["rows"][0]["m_e"] == 10.0
        assert payload["rows"][0]["asymptote"] is None


class TestFigure1:
    def test_exact_replication_panel(self, invoke, tmp_path, read_table, header_lines):
        out = tmp_path / "fig1.csv"
        result = invoke("figure1", "--rho", "0", "--m", "50", "--mu-step", "0.1", "--out", str(out))
        assert result.exit_code == 0, result.output
        frame = read_table(out)
        assert len(frame) == 11
        row = frame[frame["mu"] == 0.8].iloc[0]
        assert row["lower"] == pytest.approx(0.70, abs=0.02)
        assert row["upper"] == pytest.approx(0.90, abs=0.02)
        assert "hdi_tie_rule" in header_lines(out)

    def test_stdout(self, runner):
        from replirate.main import cli

        result = runner.invoke(cli, ["--log-level", "ERROR", "figure1", "--rho", "0.15", "--m", "5", "--mu-step", "0.5"])
        assert result.exit_code == 0
        assert "mu,rho,m,level,lower,upper,attained_mass" in result.output

    def test_empty_list_is_usage_error(self, invoke):
        result = invoke("figure1", "--m", "")
        assert result.exit_code == 2


class TestPosteriorCommands:
    def test_overlap(self, invoke, tmp_path, read_table, header_lines):
        out = tmp_path / "overlap.csv"
        result = invoke(
            "overlap", "--m", "100", "--mu", "0.01,0.5,0.99", "--grid-mu", "40", "--grid-rho", "40", "--out", str(out)
        )
        assert result.exit_code == 0, result.output
        frame = read_table(out)
        assert len(frame) == 9
        assert frame["x_i"].tolist()[:3] == [1, 1, 1]
        diagonal = frame[frame["mu_i"] == frame["mu_j"]]
        assert diagonal["overlap"].tolist() == [1.0, 1.0, 1.0]
        header = header_lines(out)
        assert header["prior"] == "uniform"
        assert header["grid"].startswith("40 x 40")
        assert "(0.01, 0.99)" in header["lower_bound"]

    def test_unknown_prior(self, invoke):
        result = invoke("overlap", "--prior", "flat", "--grid-mu", "10", "--grid-rho", "10")
        assert result.exit_code == 2
        assert "error code=DOMAIN exit=2" in result.output

    def test_invalid_fixed_rho(self, invoke):
        result = invoke("overlap", "--prior", "fixed:1.5")
        assert result.exit_code == 2
        assert "error code=DOMAIN" in result.output

    def test_conditional(self, invoke, tmp_path, read_table):
        out = tmp_path / "cond.csv"
        result = invoke(
            "conditional", "--rho", "0.05,0.25", "--mu-true", "0.8", "--grid-mu", "50", "--out", str(out)
        )
        assert result.exit_code == 0, result.output
        frame = read_table(out)
        assert len(frame) == 100
        assert set(frame["x"]) == {80}
        for _, group in frame.groupby("rho"):
            assert group["density"].sum() / 50 == pytest.approx(1.0)

    def test_separable_pair(self, invoke, tmp_path, read_table):
        out = tmp_path / "pair.csv"
        result = invoke("separable-pair", "--m", "17", "--rho", "0.373", "--mu-max", "0.852", "--out", str(out))
        assert result.exit_code == 0, result.output
        frame = read_table(out)
        assert not frame["separated"].item()


class TestExamples:
    def test_example1_defaults(self, invoke, tmp_path, read_table):
        out = tmp_path / "ex1.csv"
        result = invoke("example1", "--out", str(out))
        assert result.exit_code == 0, result.output
        frame = read_table(out)
        assert len(frame) == 16
        cell = frame[(frame["theta"] == 1.0) & (frame["sigma"] == 0.5)].iloc[0]
        assert cell["mu"] == pytest.approx(0.814, abs=1e-3)
        assert cell["panel"] == "C"

    def test_example1_sample_size(self, invoke, tmp_path, read_table):
        out = tmp_path / "ex1n.csv"
        result = invoke(
            "example1", "--theta", "1", "--sigma", "0.5", "--n", "100", "--sigma-s", "1", "--out", str(out)
        )
        assert result.exit_code == 0, result.output
        assert read_table(out)["rho"].item() == pytest.approx(0.737, abs=5e-3)

    def test_example1_incomplete_sample_size(self, invoke):
        result = invoke("example1", "--n", "100")
        assert result.exit_code == 2
        assert "error code=DOMAIN exit=2" in result.output

    def test_example2(self, invoke, tmp_path, read_table, header_lines):
        out = tmp_path / "ex2.csv"
        result = invoke("example2", "--bias", "0", "--noise", "0.5", "--out", str(out))
        assert result.exit_code == 0, result.output
        frame = read_table(out)
        assert frame["mode"].tolist() == ["large_n", "n=100"]
        assert frame["mu"].tolist() == pytest.approx([0.814, 0.936], abs=5e-3)
        assert frame["rho"].tolist() == pytest.approx([0.102, 0.713], abs=1e-2)
        header = header_lines(out)
        assert header["critical_count"] == "59"
        assert float(header["alpha"]) == pytest.approx(0.0443, abs=1e-4)

    def test_example2_undefined_rho(self, invoke, tmp_path, read_table):
        out = tmp_path / "ex2u.csv"
        result = invoke("example2", "--bias", "1.5", "--noise", "0.25", "--out", str(out))
        assert result.exit_code == 0, result.output
        finite = read_table(out).iloc[1]
        assert finite["panel"] == "---"
        assert finite["rho"] != finite["rho"]


class TestMl4:
    def test_bundled_summary(self, invoke, tmp_path, read_table, header_lines):
        out = tmp_path / "ml4.csv"
        result = invoke("ml4", "--prior", "jeffreys", "--draws", "4000", "--seed", "5", "--out", str(out))
        assert result.exit_code == 0, result.output
        frame = read_table(out)
        assert frame["group"].tolist() == ["ml4", "ml4+ref"]
        assert (frame["seed"] == 5).all()
        assert frame["rho_mean"].iloc[1] > frame["rho_mean"].iloc[0]
        assert header_lines(out)["seed"] == "5"

    def test_default_seed_recorded(self, invoke, tmp_path, header_lines):
        out = tmp_path / "ml4.csv"
        result = invoke("ml4", "--prior", "weak", "--groups", "ml4", "--draws", "2000", "--out", str(out))
        assert result.exit_code == 0, result.output
        assert header_lines(out)["seed"] == "20260101"

    def test_site_records(self, invoke, site_records, tmp_path, read_table):
        out = tmp_path / "posterior.csv"
        result = invoke(
            "ml4", "--input", str(site_records), "--groups", "aa,ih+ref", "--draws", "3000", "--out", str(out)
        )
        assert result.exit_code == 0, result.output
        frame = read_table(out)
        assert len(frame) == 4
        assert frame.loc[frame["group"] == "ih+ref", "m"].tolist() == [7, 7]

    def test_missing_summary_group(self, invoke):
        result = invoke("ml4", "--groups", "aa", "--draws", "2000")
        assert result.exit_code == 3
        assert "error code=IO exit=3" in result.output

    def test_missing_input(self, invoke, tmp_path):
        result = invoke("ml4", "--input", str(tmp_path / "absent.csv"))
        assert result.exit_code == 3
        assert "error code=IO" in result.output

    def test_contrast(self, invoke, site_records, tmp_path, read_table, header_lines):
        out = tmp_path / "contrast.csv"
        result = invoke("ml4-contrast", "--input", str(site_records), "--draws", "3000", "--seed", "2", "--out", str(out))
        assert result.exit_code == 0, result.output
        row = read_table(out).iloc[0]
        assert (row["group_a"], row["group_b"]) == ("aa", "ih")
        assert 0.0 <= row["exceedance"] <= 1.0
        assert row["hdi_lo"] <= row["mean_diff"] <= row["hdi_hi"]
        header = header_lines(out)
        assert header["group_seeds"] == "aa=2, ih=3"
        assert float(header["reference_se"]) > 0.0


def test_unwritable_output(invoke, tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    result = invoke("effective-size", "--m", "5", "--out", str(blocker / "me.csv"))
    assert result.exit_code == 3
    assert "error code=IO" in result.output
