"""End-to-end command line runs via subprocess: artifacts and exit codes."""

import json
import math
import os
import re
import subprocess
import sys

import pytest

ENTRY = [sys.executable, "-c", "from varadhan_lab.cli import main; raise SystemExit(main())"]


def run_cli(args, cwd, env_extra=None, timeout=180):
    env = os.environ.copy()
    env.setdefault("MPLBACKEND", "Agg")
    if env_extra:
        env.update(env_extra)
    argv = ENTRY[:2] + [ENTRY[2].replace("main()", "main(%r)" % (list(args),))]
    return subprocess.run(
        argv, cwd=cwd, env=env, capture_output=True, text=True, timeout=timeout
    )


class TestSuccessPath:
    def test_geometry_artifacts(self, tmp_path):
        res = run_cli(
            ["geometry", "--domain", "ball", "--no-figures", "--outdir", "out"],
            tmp_path,
        )
        assert res.returncode == 0, res.stderr
        out = tmp_path / "out"
        for name in ("manifest.json", "data.csv", "report.json"):
            assert (out / name).exists()
        manifest = json.loads((out / "manifest.json").read_text())
        for key in ("command", "config", "outputs", "package", "threads"):
            assert key in manifest
        assert manifest["command"] == "geometry"
        # the config block echoes resolved defaults, not just given flags
        cfg = manifest["config"]
        for key in ("rho", "p", "q", "N", "seed", "figures"):
            assert key in cfg

    def test_no_wall_clock_in_manifest(self, tmp_path):
        res = run_cli(
            ["geometry", "--domain", "ball", "--no-figures", "--outdir", "out"],
            tmp_path,
        )
        assert res.returncode == 0
        text = (tmp_path / "out" / "manifest.json").read_text()
        for word in ("time", "date", "duration"):
            assert word not in text.lower()

    def test_csv_carries_full_precision(self, tmp_path):
        res = run_cli(
            ["geometry", "--domain", "ball", "--no-figures", "--outdir", "out"],
            tmp_path,
        )
        assert res.returncode == 0
        lines = (tmp_path / "out" / "data.csv").read_text().strip().split("\n")
        assert "," in lines[0] and not lines[0][0].isdigit()
        tokens = lines[1].split(",")
        assert any(len(re.sub(r"[-+.e]", "", tok)) >= 16 for tok in tokens)

    def test_figures_rendered_by_default(self, tmp_path):
        res = run_cli(["geometry", "--domain", "ball", "--outdir", "out"], tmp_path)
        assert res.returncode == 0, res.stderr
        out = tmp_path / "out"
        manifest = json.loads((out / "manifest.json").read_text())
        pngs = [name for name in manifest["outputs"] if name.endswith(".png")]
        assert pngs
        for name in pngs:
            assert (out / name).stat().st_size > 0

    def test_infinite_exponent_accepted(self, tmp_path):
        res = run_cli(
            [
                "varadhan",
                "--domain",
                "half_space",
                "--p",
                "inf",
                "--x",
                "0.3,0",
                "--no-figures",
                "--outdir",
                "out",
            ],
            tmp_path,
        )
        assert res.returncode == 0, res.stderr
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert math.isinf(float(manifest["config"]["p"]))


class TestDeterminism:
    def test_repeat_runs_are_byte_identical(self, tmp_path):
        args = ["geometry", "--domain", "ball", "--seed", "3", "--no-figures"]
        r1 = run_cli(args + ["--outdir", "one"], tmp_path)
        r2 = run_cli(args + ["--outdir", "two"], tmp_path)
        assert r1.returncode == 0 and r2.returncode == 0
        for name in ("data.csv", "report.json"):
            a = (tmp_path / "one" / name).read_bytes()
            b = (tmp_path / "two" / name).read_bytes()
            assert a == b
        m1 = json.loads((tmp_path / "one" / "manifest.json").read_text())
        m2 = json.loads((tmp_path / "two" / "manifest.json").read_text())
        diff = {k for k in m1["config"] if m1["config"][k] != m2["config"].get(k)}
        assert diff <= {"outdir"}


class TestConfigFile:
    def test_config_overrides_flags(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps({"p": "inf", "ladder": [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]})
        )
        res = run_cli(
            [
                "varadhan",
                "--domain",
                "half_space",
                "--p",
                "2.0",
                "--x",
                "0.3,0",
                "--config",
                str(cfg),
                "--no-figures",
                "--outdir",
                "out",
            ],
            tmp_path,
        )
        assert res.returncode == 0, res.stderr
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert math.isinf(float(manifest["config"]["p"]))
        assert len(manifest["config"]["ladder"]) == 5

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        res = run_cli(
            ["geometry", "--config", str(cfg), "--no-figures", "--outdir", "out"],
            tmp_path,
        )
        assert res.returncode == 1
        assert "unknown config key" in res.stderr

    def test_command_cannot_be_overridden(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"command": "solve"}))
        res = run_cli(
            ["geometry", "--config", str(cfg), "--no-figures", "--outdir", "out"],
            tmp_path,
        )
        assert res.returncode == 1


class TestExitCodes:
    def test_bad_exponent_is_configuration_error(self, tmp_path):
        res = run_cli(
            ["geometry", "--p", "1", "--no-figures", "--outdir", "out"], tmp_path
        )
        assert res.returncode == 1
        assert "configuration error" in res.stderr
        assert "(1, inf]" in res.stderr

    def test_hypothesis_violation_is_numerical_failure(self, tmp_path):
        res = run_cli(
            [
                "qmean",
                "--x",
                "0.1,0",
                "--R",
                "0.5",
                "--no-figures",
                "--outdir",
                "out",
            ],
            tmp_path,
        )
        assert res.returncode == 2
        assert "numerical failure" in res.stderr
        assert "empirical_q_mean_limit" in res.stderr


class TestThreadBudget:
    def test_env_var_recorded(self, tmp_path):
        res = run_cli(
            ["geometry", "--domain", "ball", "--no-figures", "--outdir", "out"],
            tmp_path,
            env_extra={"VARADHAN_LAB_THREADS": "2"},
        )
        assert res.returncode == 0, res.stderr
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["threads"] == 2

    def test_invalid_env_var_rejected(self, tmp_path):
        res = run_cli(
            ["geometry", "--domain", "ball", "--no-figures", "--outdir", "out"],
            tmp_path,
            env_extra={"VARADHAN_LAB_THREADS": "zebra"},
        )
        assert res.returncode == 1
        assert "positive integer" in res.stderr
