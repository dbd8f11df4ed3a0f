"""End-to-end runs of the ``student-levy`` command."""
import hashlib
import json
import math

import pytest

from student_levy.cli import EXIT_INVALID, EXIT_NONCONVERGENCE, EXIT_OK, main


def manifest(out, command):
    return json.loads((out / f"{command}_manifest.json").read_text())


class TestMixture:
    def test_two_equal_steps(self, tmp_path, capsys):
        code = main(["mixture", "--degrees", "1,1", "--weights", "1/2,1/2", "--out", str(tmp_path)])
        assert code == EXIT_OK
        stdout = capsys.readouterr().out
        assert "beta_1 = 1/4" in stdout and "beta_2 = 3/4" in stdout
        rows = (tmp_path / "mixture.csv").read_text().splitlines()
        assert rows[1:] == ["1,1,4,0.25", "2,3,4,0.75"]
        data = json.loads((tmp_path / "mixture.json").read_text())
        assert data["weights"] == {"1": "1/4", "2": "3/4"}
        m = manifest(tmp_path, "mixture")
        assert m["seed"] is None and m["exit_code"] == 0 and len(m["config_hash"]) == 64

    def test_invalid_weights(self, tmp_path, capsys):
        code = main(["mixture", "--degrees", "1,1", "--weights", "1/2,1/3", "--out", str(tmp_path)])
        assert code == EXIT_INVALID
        assert "weights must sum to 1" in capsys.readouterr().err

    def test_unparseable(self, tmp_path):
        assert main(["mixture", "--degrees", "1,x", "--weights", "1", "--out", str(tmp_path)]) == EXIT_INVALID


class TestDensity:
    def test_cauchy_values(self, tmp_path):
        code = main(["density", "--nu", "0.5", "--c", "1", "--x", "0,1,3", "--out", str(tmp_path)])
        assert code == EXIT_OK
        rows = (tmp_path / "density_fourier.csv").read_text().splitlines()[1:]
        for row in rows:
            x, v = map(float, row.split(","))
            assert v == pytest.approx(1 / (math.pi * (1 + x * x)), rel=1e-9)

    def test_compare_methods(self, tmp_path):
        code = main(["density", "--nu", "3/2", "--c", "2", "--x", "0:6:7", "--method", "mixture",
                     "--compare", "fourier", "--out", str(tmp_path)])
        assert code == EXIT_OK
        assert manifest(tmp_path, "density")["summary"]["max_abs_difference"] < 1e-9

    def test_mixture_needs_half_integer(self, tmp_path):
        code = main(["density", "--nu", "1", "--c", "2", "--x", "0", "--method", "mixture", "--out", str(tmp_path)])
        assert code == EXIT_INVALID

    def test_truncation_too_small(self, tmp_path):
        code = main(["density", "--nu", "1.5", "--c", "1", "--x", "0,1", "--fourier-truncation", "1",
                     "--out", str(tmp_path)])
        assert code == EXIT_NONCONVERGENCE


class TestTailcheck:
    def test_cauchy(self, tmp_path):
        code = main(["tailcheck", "--nu", "1/2", "--c", "2", "--x", "5,10,50", "--out", str(tmp_path)])
        assert code == EXIT_OK
        lines = (tmp_path / "tailcheck.csv").read_text().splitlines()
        assert lines[0] == "x,ratio,reference"
        x, r, ref = map(float, lines[-1].split(","))
        assert r == pytest.approx(ref, abs=1e-6)


class TestSample:
    def test_reproducible_and_replay(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        argv = ["sample", "--kind", "walk", "--n", "5000", "--seed", "11", "--oracle", "mixture"]
        assert main(argv + ["--out", str(a)]) == EXIT_OK
        assert main(argv + ["--out", str(b)]) == EXIT_OK
        ha = hashlib.sha256((a / "sample_walk.csv").read_bytes()).hexdigest()
        assert ha == hashlib.sha256((b / "sample_walk.csv").read_bytes()).hexdigest()
        m = manifest(a, "sample")
        assert m["seed"] == 11 and m["summary"]["sha256"] == ha
        (a / "sample_walk.csv").unlink()
        assert main(["--replay", str(a / "sample_manifest.json")]) == EXIT_OK
        assert hashlib.sha256((a / "sample_walk.csv").read_bytes()).hexdigest() == ha

    def test_sidecar(self, tmp_path):
        assert main(["sample", "--nu", "2", "--d", "2", "--n", "10", "--out", str(tmp_path)]) == EXIT_OK
        meta = json.loads((tmp_path / "sample_student.json").read_text())
        assert meta["seed"] == 0 and meta["n"] == 10

    def test_bad_walk(self, tmp_path):
        code = main(["sample", "--kind", "walk", "--weights", "0.5,0.6", "--out", str(tmp_path)])
        assert code == EXIT_INVALID


class TestVerifyCommand:
    def test_corollary_suite(self, tmp_path, capsys):
        assert main(["verify", "--suite", "corollary", "--out", str(tmp_path)]) == EXIT_OK
        assert "[PASS] criterion 2" in capsys.readouterr().out
        data = json.loads((tmp_path / "verify_corollary.json").read_text())
        assert data[0]["passed"] is True


class TestConfig:
    def test_config_file_changes_hash(self, tmp_path):
        cfg = tmp_path / "q.json"
        cfg.write_text(json.dumps({"fourier_nodes": 20}))
        argv = ["mixture", "--degrees", "1", "--weights", "1"]
        main(argv + ["--out", str(tmp_path / "x")])
        main(argv + ["--out", str(tmp_path / "y"), "--config", str(cfg)])
        hx = manifest(tmp_path / "x", "mixture")["config_hash"]
        hy = manifest(tmp_path / "y", "mixture")["config_hash"]
        assert hx != hy

    def test_environment_variable(self, tmp_path, monkeypatch):
        cfg = tmp_path / "q.json"
        cfg.write_text(json.dumps({"laplace_order": 40}))
        monkeypatch.setenv("STUDENT_LEVY_CONFIG", str(cfg))
        main(["mixture", "--degrees", "1", "--weights", "1", "--out", str(tmp_path)])
        assert manifest(tmp_path, "mixture")["parameters"]["config"]["laplace_order"] == 40

    def test_unknown_key(self, tmp_path):
        cfg = tmp_path / "q.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        code = main(["mixture", "--degrees", "1", "--weights", "1", "--config", str(cfg), "--out", str(tmp_path)])
        assert code == EXIT_INVALID

    def test_no_command(self, capsys):
        assert main([]) == EXIT_INVALID

