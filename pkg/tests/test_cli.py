"""CLI and configuration: round-trips, exit codes, artifacts, determinism."""
import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fmgt.cli import main
from fmgt.config import ConfigError, RunConfig

PRESETS = Path(__file__).resolve().parents[1] / "presets"


def run_cli(args):
    return main([str(a) for a in args])


class TestConfig:
    def test_round_trip_lossless(self):
        text = (PRESETS / "mgt-classical.cfg").read_text()
        cfg = RunConfig.from_text(text)
        again = RunConfig.from_text(cfg.to_text())
        assert cfg.entries == again.entries

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            RunConfig.from_text("schema = 1\nmodel.bogus = 2\n")

    def test_schema_version_required(self):
        with pytest.raises(ConfigError, match="schema"):
            RunConfig.from_text("schema = 99\n")

    def test_alpha_range_cited(self):
        with pytest.raises(ConfigError, match=r"\(0.5, 1\]"):
            RunConfig.from_text("schema = 1\nmodel.family = base\nmodel.alpha = 0.4\n")

    def test_family_ii_nonlinear_routed_to_error(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(
            "schema = 1\nmodel.family = ii\nmodel.nonlinearity = westervelt\n"
            "model.alpha = 0.7\nmodel.k = 0.1\n"
        )
        assert run_cli(["--out", tmp_path / "o", "run", "--config", cfg]) == 2

    @given(
        alpha=st.floats(min_value=0.51, max_value=1.0),
        n=st.integers(min_value=4, max_value=64),
        t_final=st.floats(min_value=0.1, max_value=4.0),
    )
    @settings(max_examples=25, deadline=None)
    def test_round_trip_randomized(self, alpha, n, t_final):
        cfg = RunConfig.from_text(
            f"schema = 1\nmodel.alpha = {alpha!r}\ntime.N = {n}\ntime.T = {t_final!r}\n"
        )
        again = RunConfig.from_text(cfg.to_text())
        assert again.entries == cfg.entries


class TestExitCodes:
    def test_config_error_is_2(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("schema = 1\nmodel.alpha = 1.2\n")
        assert run_cli(["run", "--config", bad]) == 2

    def test_blowup_is_3(self, tmp_path):
        blow = tmp_path / "blow.cfg"
        blow.write_text(
            "schema = 1\nmodel.family = iii\nmodel.nonlinearity = westervelt\n"
            "model.alpha = 0.7\nmodel.k = 1.0\ndomain.cutoff = 4\ntime.N = 64\n"
            "data.preset = bump\ndata.amplitude = 1e150\n"
        )
        assert run_cli(["--out", tmp_path / "o", "run", "--config", blow]) == 3

    def test_success_is_0(self, tmp_path):
        assert (
            run_cli(["--out", tmp_path / "o", "run", "--config", PRESETS / "mgt-classical.cfg"])
            == 0
        )


class TestArtifacts:
    def test_run_writes_expected_files(self, tmp_path):
        out = tmp_path / "o"
        assert run_cli(["--out", out, "run", "--config", PRESETS / "mgt-classical.cfg"]) == 0
        assert (out / "trajectory.csv").exists()
        assert (out / "energy.csv").exists()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["ode_crosscheck_max_error"] < 1e-8
        assert summary["model"]["backend"] == "volterra"

    def test_trajectory_csv_floats_round_trip(self, tmp_path):
        # 17 significant digits: parsing the text recovers the exact double
        out = tmp_path / "o"
        run_cli(["--out", out, "run", "--config", PRESETS / "mgt-classical.cfg"])
        lines = (out / "trajectory.csv").read_text().splitlines()
        val = lines[2].split(",")[2]  # h1_psi at the second node
        assert float(val) == np.pi * float(lines[2].split(",")[1]) or len(val) >= 15

    def test_limit_preset_strictly_decreasing(self, tmp_path):
        out = tmp_path / "o"
        assert run_cli(["--out", out, "limit-study", "--config", PRESETS / "limit-iii.cfg"]) == 0
        s = json.loads((out / "summary.json").read_text())
        col = s["limit_study"]["columns"]["W1inf_H1"]
        assert all(a > b for a, b in zip(col, col[1:]))
        assert (out / "limit_study.csv").exists()

    def test_kernels_subcommand(self, tmp_path):
        out = tmp_path / "k"
        assert run_cli(["--out", out, "kernels", "--alphas", "0.5,1.0", "--tau", "1.0"]) == 0
        payload = json.loads((out / "kernels.json").read_text())
        assert payload["all_pass"] is True

    def test_convergence_subcommand(self, tmp_path):
        out = tmp_path / "c"
        assert (
            run_cli(["--out", out, "convergence", "--config", PRESETS / "convergence-iii.cfg"])
            == 0
        )
        s = json.loads((out / "summary.json").read_text())
        assert s["convergence"]["order"] >= 1.4

    def test_rectangle_domain_run(self, tmp_path):
        cfg = tmp_path / "rect.cfg"
        cfg.write_text(
            "schema = 1\nmodel.family = iii\nmodel.nonlinearity = linear\n"
            "model.alpha = 0.7\ndomain.kind = rectangle\ndomain.lengths = 1.0,1.5\n"
            "domain.cutoff = 3\ntime.T = 0.5\ntime.N = 64\ndata.preset = bump\n"
        )
        out = tmp_path / "o"
        assert run_cli(["--out", out, "run", "--config", cfg]) == 0
        s = json.loads((out / "summary.json").read_text())
        assert s["energy_low"]["fitted_constant"] > 0

    def test_source_presets_run(self, tmp_path):
        for preset in ("mode-cos", "pulse"):
            cfg = tmp_path / f"{preset}.cfg"
            cfg.write_text(
                "schema = 1\nmodel.family = iii\nmodel.alpha = 0.8\n"
                "domain.cutoff = 4\ntime.N = 64\ndata.preset = zero\n"
                f"source.preset = {preset}\nsource.amplitude = 0.5\n"
            )
            out = tmp_path / f"o-{preset}"
            assert run_cli(["--out", out, "run", "--config", cfg]) == 0
            rows = (out / "trajectory.csv").read_text().splitlines()
            last = float(rows[-1].split(",")[1])
            assert last != 0.0  # the source actually drove the field

    def test_memory_backend_route(self, tmp_path):
        cfg = tmp_path / "ii.cfg"
        cfg.write_text(
            "schema = 1\nmodel.family = ii\nmodel.nonlinearity = linear\n"
            "model.alpha = 0.7\ndomain.cutoff = 4\ntime.N = 128\ndata.preset = bump\n"
        )
        out = tmp_path / "o"
        assert run_cli(["--out", out, "run", "--config", cfg]) == 0
        s = json.loads((out / "summary.json").read_text())
        assert s["model"]["backend"] == "memory"
        assert s["recovery_discrepancy"] < 1e-2

    def test_jobs_flag_preserves_results(self, tmp_path):
        out1, out2 = tmp_path / "j1", tmp_path / "j2"
        run_cli(["--out", out1, "run", "--config", PRESETS / "limit-ii.cfg"])
        run_cli(["--jobs", "3", "--out", out2, "run", "--config", PRESETS / "limit-ii.cfg"])
        assert (out1 / "limit_study.csv").read_text() == (out2 / "limit_study.csv").read_text()


class TestDeterminism:
    @pytest.mark.parametrize(
        "preset",
        ["mgt-classical", "limit-iii", "limit-ii", "convergence-iii", "picard-w3", "selfcheck"],
    )
    def test_repeated_runs_byte_identical(self, tmp_path, preset):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run_cli(["--out", out1, "run", "--config", PRESETS / f"{preset}.cfg"]) == 0
        assert run_cli(["--out", out2, "run", "--config", PRESETS / f"{preset}.cfg"]) == 0
        for f1 in sorted(out1.iterdir()):
            f2 = out2 / f1.name
            assert f2.exists()
            assert f1.read_bytes() == f2.read_bytes(), f"{f1.name} differs"
