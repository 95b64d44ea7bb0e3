import os
import subprocess
import sys

import pytest

from dyadsim.cli import main, parse_context

SMALL = ["--runs", "2", "--turns", "60"]


def run_cli(args, cwd, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "dyadsim.cli", *args],
        cwd=cwd,
        env=env,
        capture_output=True,
        text=True,
    )


class TestParseContext:
    def test_inhibited_listener_example(self):
        ctx = parse_context("1,0;1,-1")
        assert ctx.as_tuple() == (1, 0, 1, -1)

    def test_zero_matrix(self):
        assert parse_context("0,0;0,0").as_tuple() == (0, 0, 0, 0)

    def test_whitespace_tolerated(self):
        assert parse_context(" -1 , 1 ; 0 , 1 ").as_tuple() == (-1, 1, 0, 1)

    def test_out_of_range_names_token(self):
        with pytest.raises(ValueError, match=r"token 1 \(s1\).*outside"):
            parse_context("2,0;0,0")

    def test_non_integer_names_token(self):
        with pytest.raises(ValueError, match=r"token 4 \(s2\).*not an integer"):
            parse_context("0,0;0,x")

    def test_shape_errors(self):
        with pytest.raises(ValueError, match="two"):
            parse_context("1,0,1,-1")
        with pytest.raises(ValueError, match="four"):
            parse_context("1;0")


class TestSweepCommand:
    def test_writes_expected_rows(self, tmp_path):
        code = main(["sweep", *SMALL, "--seed", "9", "--out", str(tmp_path / "s.csv")])
        assert code == 0
        lines = (tmp_path / "s.csv").read_text().strip().split("\n")
        assert len(lines) == 1 + 81 * 2

    def test_byte_identical_across_invocations_and_workers(self, tmp_path):
        a, b, c = (tmp_path / name for name in ("a.csv", "b.csv", "c.csv"))
        assert main(["sweep", *SMALL, "--seed", "4", "--out", str(a)]) == 0
        assert main(["sweep", *SMALL, "--seed", "4", "--out", str(b)]) == 0
        assert main(["sweep", *SMALL, "--seed", "4", "--workers", "3", "--out", str(c)]) == 0
        assert a.read_bytes() == b.read_bytes() == c.read_bytes()


class TestSimulateCommand:
    def test_deterministic_files(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["simulate", "--context", "1,1;1,1", "--turns", "500", "--seed", "7"]
        assert main([*args, "--out", str(a)]) == 0
        assert main([*args, "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert len(a.read_text().strip().split("\n")) == 502

    def test_bad_context_is_usage_error(self, tmp_path):
        result = run_cli(["simulate", "--context", "2,0;0,0"], cwd=tmp_path)
        assert result.returncode == 2
        assert "outside {-1, 0, 1}" in result.stderr


class TestAnalyzeCommand:
    def test_analyze_writes_report(self, tmp_path):
        csv = tmp_path / "s.csv"
        assert main(["sweep", *SMALL, "--seed", "9", "--out", str(csv)]) == 0
        code = main(["analyze", *SMALL, "--seed", "9", "--input", str(csv), "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "report.json").exists()
        assert (tmp_path / "table1.csv").exists()
        assert (tmp_path / "coefficients.csv").exists()

    def test_truncated_csv_single_line_error(self, tmp_path):
        csv = tmp_path / "s.csv"
        assert main(["sweep", *SMALL, "--seed", "9", "--out", str(csv)]) == 0
        truncated = tmp_path / "t.csv"
        truncated.write_text("\n".join(csv.read_text().split("\n")[:50]) + "\n")
        result = run_cli(
            ["analyze", *SMALL, "--seed", "9", "--input", str(truncated)], cwd=tmp_path
        )
        assert result.returncode == 3
        error_lines = [line for line in result.stderr.strip().split("\n") if line]
        assert len(error_lines) == 1
        assert error_lines[0].startswith("dyadsim: error: input:")


class TestPanelCommands:
    def test_xcorr_and_lags_write_per_context_files(self, tmp_path):
        code = main(
            ["xcorr", *SMALL, "--context", "1,0;0,1", "--context", "1,1;1,1",
             "--out", str(tmp_path / "xc")]
        )
        assert code == 0
        assert (tmp_path / "xc" / "ccf_+100+1.csv").exists()
        assert (tmp_path / "xc" / "ccf_+1+1+1+1.csv").exists()
        code = main(["lags", *SMALL, "--context", "1,1;1,1", "--out", str(tmp_path / "lg")])
        assert code == 0
        text = (tmp_path / "lg" / "lags_+1+1+1+1.csv").read_text()
        assert text.startswith("lag,count,rel_freq\n")

    def test_figures_writes_all_panels(self, tmp_path):
        code = main(
            ["figures", *SMALL, "--seed", "3", "--context", "0,0;0,0",
             "--out", str(tmp_path / "figs")]
        )
        assert code == 0
        names = sorted(p.name for p in (tmp_path / "figs").iterdir())
        assert names == [
            "fig2_traj_0000.csv",
            "fig3_hist.csv",
            "fig6_ccf_0000.csv",
            "fig7_lags_0000.csv",
        ]


class TestFlagHandling:
    def test_unknown_flag_rejected(self, tmp_path):
        result = run_cli(["sweep", "--bogus", "1"], cwd=tmp_path)
        assert result.returncode == 2

    def test_invalid_range_is_usage_error(self, tmp_path):
        result = run_cli(["sweep", "--alpha", "1.5"], cwd=tmp_path)
        assert result.returncode == 2
        assert "alpha" in result.stderr

    def test_config_file_mirrors_flags_and_flags_override(self, tmp_path):
        config = tmp_path / "run.conf"
        config.write_text("seed = 5\nruns = 2\nturns = 60\nthreshold = 0.25\n")
        a = tmp_path / "a.csv"
        assert main(["sweep", "--config", str(config), "--out", str(a)]) == 0
        b = tmp_path / "b.csv"
        assert main(["sweep", *SMALL, "--seed", "5", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        # flag overrides the file value
        c = tmp_path / "c.csv"
        assert main(["sweep", "--config", str(config), "--seed", "6", "--out", str(c)]) == 0
        assert c.read_bytes() != a.read_bytes()

    def test_unknown_config_key_rejected(self, tmp_path):
        config = tmp_path / "run.conf"
        config.write_text("sed = 5\n")
        result = run_cli(["sweep", "--config", str(config)], cwd=tmp_path)
        assert result.returncode == 3
        assert "unknown key" in result.stderr

    def test_env_var_sets_default_out_dir(self, tmp_path):
        out_dir = tmp_path / "from_env"
        result = run_cli(
            ["sweep", *SMALL, "--seed", "2"],
            cwd=tmp_path,
            env_extra={"DYADSIM_OUT_DIR": str(out_dir)},
        )
        assert result.returncode == 0
        assert (out_dir / "sweep.csv").exists()

    def test_version_flag(self, tmp_path):
        result = run_cli(["--version"], cwd=tmp_path)
        assert result.returncode == 0
        assert "dyadsim" in result.stdout
