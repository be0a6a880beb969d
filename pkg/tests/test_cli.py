import json
import os
import stat
import subprocess
import sys
from pathlib import Path

import jsonschema
import numpy as np
import pytest

import swinfer as sw
from swinfer import sampleio
from swinfer.cli import main

SCHEMA_DIR = Path(sw.__file__).parent / "schemas"


def schema(name):
    return json.loads((SCHEMA_DIR / f"{name}.schema.json").read_text())


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def strip_runtime(csv_text: str) -> str:
    """Drop the wall-clock column; everything else must be byte-identical."""
    lines = csv_text.splitlines()
    header = lines[0].split(",")
    idx = header.index("runtime_s")
    return "\n".join(
        ",".join(tok for i, tok in enumerate(line.split(",")) if i != idx)
        for line in lines
    )


@pytest.fixture()
def fixture_files(tmp_path):
    zeros = tmp_path / "zeros.csv"
    tens = tmp_path / "tens.csv"
    sampleio.write_sample(sw.Sample(np.zeros(400)), zeros)
    sampleio.write_sample(sw.Sample(np.full(400, 10.0)), tens)
    return zeros, tens


class TestDist:
    def test_identical_files(self, capsys, fixture_files):
        zeros, _ = fixture_files
        code, out, _ = run_cli(
            capsys, "dist", "--x", str(zeros), "--y", str(zeros), "--r", "2",
            "--delta", "0.1",
        )
        assert code == 0
        payload = json.loads(out)
        jsonschema.validate(payload, schema("dist"))
        assert payload["estimate"] == 0.0

    def test_point_mass_fixture(self, capsys, fixture_files):
        zeros, tens = fixture_files
        code, out, _ = run_cli(
            capsys, "dist", "--x", str(zeros), "--y", str(tens), "--r", "2",
            "--delta", "0.1",
        )
        assert code == 0
        assert json.loads(out)["estimate"] == pytest.approx(10.0, abs=1e-12)

    def test_missing_y_exits_2(self, fixture_files):
        zeros, _ = fixture_files
        with pytest.raises(SystemExit) as err:
            main(["dist", "--x", str(zeros)])
        assert err.value.code == 2

    def test_malformed_csv_exits_2(self, capsys, tmp_path, fixture_files):
        zeros, _ = fixture_files
        bad = tmp_path / "bad.csv"
        bad.write_text("1,2\n3\n")
        code, _, err = run_cli(
            capsys, "dist", "--x", str(zeros), "--y", str(bad)
        )
        assert code == 2 and "error" in err

    def test_dimension_mismatch_exits_3(self, capsys, tmp_path, fixture_files):
        zeros, _ = fixture_files
        twod = tmp_path / "twod.csv"
        sampleio.write_sample(sw.Sample(np.zeros((5, 2))), twod)
        code, _, _ = run_cli(capsys, "dist", "--x", str(zeros), "--y", str(twod))
        assert code == 3

    def test_sliced_required_for_multivariate(self, capsys, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        rng = np.random.default_rng(0)
        sampleio.write_sample(sw.Sample(rng.normal(size=(50, 2))), a)
        sampleio.write_sample(sw.Sample(rng.normal(size=(50, 2))), b)
        code, _, _ = run_cli(capsys, "dist", "--x", str(a), "--y", str(b))
        assert code == 3
        code, out, _ = run_cli(
            capsys, "dist", "--x", str(a), "--y", str(b), "--sliced",
            "--num-dirs", "32", "--seed", "1", "--delta", "0.1",
        )
        assert code == 0
        payload = json.loads(out)
        jsonschema.validate(payload, schema("dist"))
        assert payload["N"] == 32


class TestCi:
    def test_finite_identical(self, capsys, fixture_files):
        zeros, _ = fixture_files
        code, out, _ = run_cli(
            capsys, "ci", "--x", str(zeros), "--y", str(zeros),
            "--alpha", "0.05", "--method", "finite",
        )
        assert code == 0
        payload = json.loads(out)
        jsonschema.validate(payload, schema("ci"))
        assert payload["lower"] == 0.0
        assert payload["a1_ok"] is True

    def test_hybrid_duplicates_branch_finite(self, capsys, fixture_files):
        zeros, tens = fixture_files
        code, out, _ = run_cli(
            capsys, "ci", "--x", str(zeros), "--y", str(tens),
            "--method", "hybrid", "--boot-reps", "50",
        )
        assert code == 0
        payload = json.loads(out)
        jsonschema.validate(payload, schema("ci"))
        assert payload["branch"] == "finite"

    def test_a1_violation_exits_4_with_min_delta(self, capsys, tmp_path):
        rng = np.random.default_rng(1)
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        sampleio.write_sample(sw.Sample(rng.normal(size=100)), a)
        sampleio.write_sample(sw.Sample(rng.normal(size=100)), b)
        code, _, err = run_cli(
            capsys, "ci", "--x", str(a), "--y", str(b), "--delta", "0.01",
            "--alpha", "0.05",
        )
        assert code == 4
        assert "0.148" in err  # beta_100 ~ 0.14804 is the minimal passing delta

    def test_boot_method(self, capsys, tmp_path):
        rng = np.random.default_rng(2)
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        sampleio.write_sample(sw.Sample(rng.uniform(0, 1, 200)), a)
        sampleio.write_sample(sw.Sample(rng.uniform(3, 4, 200)), b)
        code, out, _ = run_cli(
            capsys, "ci", "--x", str(a), "--y", str(b), "--method", "boot",
            "--boot-reps", "100", "--seed", "7",
        )
        assert code == 0
        payload = json.loads(out)
        assert 0.0 <= payload["lower"] <= payload["upper"]


class TestSim:
    def test_reps_zero_header_only(self, capsys, tmp_path):
        out_csv = tmp_path / "sim.csv"
        code, out, _ = run_cli(
            capsys, "sim", "--models", "m6i", "--methods", "finite",
            "--sizes", "600", "--reps", "0", "--out", str(out_csv), "--no-plot",
        )
        assert code == 0
        lines = out_csv.read_text().splitlines()
        assert len(lines) == 1
        assert lines[0].startswith("model,method,n,m,rep,covered,length")
        jsonschema.validate(json.loads(out), schema("sim"))

    def test_small_run_deterministic_and_figures(self, capsys, tmp_path):
        args = [
            "sim", "--models", "m6i,m6ii", "--methods", "finite", "--sizes",
            "300,600", "--reps", "3", "--seed", "5",
        ]
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        code1, js1, _ = run_cli(capsys, *args, "--out", str(out1))
        code2, js2, _ = run_cli(capsys, *args, "--out", str(out2))
        assert code1 == code2 == 0
        assert strip_runtime(out1.read_text()) == strip_runtime(out2.read_text())
        payload = json.loads(js1)
        jsonschema.validate(payload, schema("sim"))
        for fig in payload["figures"]:
            assert Path(fig).exists()

    def test_thread_count_invariance(self, capsys, tmp_path):
        args = [
            "sim", "--models", "m6ii", "--methods", "finite,hybrid", "--sizes",
            "300", "--reps", "4", "--seed", "9", "--boot-reps", "20",
            "--num-dirs", "4", "--no-plot",
        ]
        out1 = tmp_path / "t1.csv"
        out2 = tmp_path / "t2.csv"
        code1, _, _ = run_cli(capsys, *args, "--out", str(out1), "--threads", "1")
        code2, _, _ = run_cli(capsys, *args, "--out", str(out2), "--threads", "2")
        assert code1 == code2 == 0
        assert strip_runtime(out1.read_text()) == strip_runtime(out2.read_text())

    def test_unknown_model_exits_2(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "sim", "--models", "m99", "--methods", "finite",
            "--sizes", "100", "--reps", "1", "--out", str(tmp_path / "x.csv"),
        )
        assert code == 2


class TestScaling:
    def test_single_size_exits_2(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "scaling", "--model", "m6i", "--sizes", "600", "--reps", "2",
            "--out", str(tmp_path / "s.csv"),
        )
        assert code == 2
        assert "slope" in err

    def test_small_scaling_run(self, capsys, tmp_path):
        out_csv = tmp_path / "s.csv"
        code, out, _ = run_cli(
            capsys, "scaling", "--model", "m6ii", "--r", "2", "--Delta", "0",
            "--sizes", "250:2000:3", "--reps", "3", "--out", str(out_csv),
        )
        assert code == 0
        payload = json.loads(out)
        jsonschema.validate(payload, schema("scaling"))
        assert len(payload["slopes"]) == 1
        assert Path(payload["figure"]).exists()
        assert out_csv.exists()


class TestLfiCommand:
    def _write_obs(self, tmp_path):
        obs = tmp_path / "obs.csv"
        X, _ = sw.sample_pair(sw.ModelId("m6ii", {"Delta": 0.0}), 400, 10, 3)
        sampleio.write_sample(X, obs)
        return obs

    def _exec_script(self, tmp_path):
        # external simulator contract: CMD theta_csv m seed -> CSV on stdout
        script = tmp_path / "sim.py"
        script.write_text(
            "import sys\n"
            "import numpy as np\n"
            "theta = [float(t) for t in sys.argv[1].split(',')]\n"
            "m, seed = int(sys.argv[2]), int(sys.argv[3])\n"
            "rng = np.random.default_rng(seed)\n"
            "low = rng.random(m) < 0.5 + theta[0]\n"
            "vals = np.where(low, -5 + 5*rng.random(m), 5*rng.random(m))\n"
            "print('\\n'.join('%.17g' % v for v in vals))\n"
        )
        return f"exec:{sys.executable} {script}"

    def test_eps_inf_accepts_all(self, capsys, tmp_path):
        obs = self._write_obs(tmp_path)
        grid = tmp_path / "grid.csv"
        grid.write_text("0\n0.2\n0.4\n")
        out_csv = tmp_path / "lfi.csv"
        code, out, _ = run_cli(
            capsys, "lfi", "--obs", str(obs), "--simulator", self._exec_script(tmp_path),
            "--grid", str(grid), "--m", "400", "--eps", "inf", "--out", str(out_csv),
        )
        assert code == 0
        payload = json.loads(out)
        jsonschema.validate(payload, schema("lfi"))
        assert payload["accepted_indices"] == [0, 1, 2]
        assert len(out_csv.read_text().splitlines()) == 4

    def test_empty_grid_exits_2(self, capsys, tmp_path):
        obs = self._write_obs(tmp_path)
        grid = tmp_path / "grid.csv"
        grid.write_text("")
        code, _, _ = run_cli(
            capsys, "lfi", "--obs", str(obs), "--simulator", "toggle",
            "--grid", str(grid), "--m", "10",
        )
        assert code == 2

    def test_failing_simulator_exits_6(self, capsys, tmp_path):
        obs = self._write_obs(tmp_path)
        grid = tmp_path / "grid.csv"
        grid.write_text("0.0\n")
        code, _, _ = run_cli(
            capsys, "lfi", "--obs", str(obs),
            "--simulator", f"exec:{sys.executable} -c 'import sys; sys.exit(3)'",
            "--grid", str(grid), "--m", "10",
        )
        assert code == 6


class TestRoundTrip:
    def test_sample_round_trip_bitwise(self, tmp_path):
        rng = np.random.default_rng(0)
        s = sw.Sample(rng.normal(size=(200, 3)) * 1e-7)
        path = tmp_path / "s.csv"
        sampleio.write_sample(s, path)
        back = sampleio.read_sample(path)
        assert np.array_equal(s.points, back.points)

    def test_header_flag(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("a,b\n1,2\n3,4\n")
        s = sampleio.read_sample(path, header=True)
        assert s.n == 2 and s.d == 2

    def test_console_script_installed(self):
        proc = subprocess.run(
            [sys.executable, "-m", "swinfer.cli", "--help"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "dist" in proc.stdout
