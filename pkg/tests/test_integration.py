"""
Integration tests for the complete fkqc command line.
"""

import csv
import json
import os
import shutil
import tempfile

import pytest

from fkqc.cli import main
from fkqc.errors import ValidationError
from fkqc.golden import TAU_FLOAT
from fkqc.verify import SUITES, Check, VerificationRunner


class TestIntegration:
    """Integration tests for the complete system."""

    def setup_method(self):
        """Set up test fixtures."""
        self.temp_dir = tempfile.mkdtemp()

    def teardown_method(self):
        """Clean up temp files."""
        shutil.rmtree(self.temp_dir)

    def create_temp_file(self, filename, content):
        """Create a temporary file with given content."""
        filepath = os.path.join(self.temp_dir, filename)
        with open(filepath, 'w') as f:
            f.write(content)
        return filepath

    def run_cli(self, *argv):
        """Run the CLI and return its exit code."""
        with pytest.raises(SystemExit) as exc:
            main(list(argv))
        return exc.value.code

    def read_manifest(self, out):
        with open(os.path.join(out, "manifest.json")) as f:
            return json.load(f)

    def read_rows(self, path):
        with open(path, newline="") as f:
            return list(csv.reader(f))

    def test_word_level(self, capsys):
        """Test printing u^(5)."""
        assert self.run_cli("word", "--level", "5") == 0
        assert capsys.readouterr().out.strip() == "abaababa"

    def test_word_two_sided(self, capsys):
        """Test printing w_-5 .. w_4 with the bar."""
        assert self.run_cli("word", "--two-sided", "--from", "-5", "--to", "4") == 0
        assert capsys.readouterr().out.strip() == "ababa|abaab"

    def test_word_json(self, capsys):
        """Test JSON output of a word."""
        assert self.run_cli("word", "--level", "4", "--json") == 0
        data = json.loads(capsys.readouterr().out)
        assert data["letters"] == "abaab"
        assert data["length"]["approx"] == pytest.approx(TAU_FLOAT ** 4)

    def test_word_invalid_level(self, capsys):
        """Test that level 0 exits with status 1."""
        assert self.run_cli("word", "--level", "0") == 1
        assert "Error:" in capsys.readouterr().out

    def test_usage_error(self):
        """Test that an unknown option exits with status 1."""
        assert self.run_cli("word", "--bogus") == 1

    def test_equilibrium_default(self):
        """Test the default-theta equilibrium and its manifest."""
        out = os.path.join(self.temp_dir, "run")
        code = self.run_cli("equilibrium", "--theta", "default", "--n", "100",
                            "--method", "tridiagonal", "--out", out)
        assert code == 0

        rows = self.read_rows(os.path.join(out, "equilibrium.csv"))
        assert rows[0] == ["i", "x_i", "g_i", "h_i", "residual_i"]
        assert len(rows) == 202
        assert rows[1][0] == "-100" and rows[-1][0] == "100"
        assert max(abs(float(r[4])) for r in rows[1:]) <= 1e-9

        manifest = self.read_manifest(out)
        assert manifest["command"] == "equilibrium"
        assert manifest["outputs"] == ["equilibrium.csv"]
        rotation = manifest["results"]["rotation"]
        assert rotation["estimate"] == pytest.approx(2.9271, abs=1e-2)
        assert rotation["no_rotation_number"] is False

    def test_equilibrium_signed_square(self):
        """Test that the h1 anchor is flagged as having no rotation number."""
        out = os.path.join(self.temp_dir, "h1")
        assert self.run_cli("equilibrium", "--anchor", "h1", "--n", "100", "--out", out) == 0
        manifest = self.read_manifest(out)
        assert manifest["results"]["rotation"]["no_rotation_number"] is True
        assert manifest["results"]["anchor"]["name"] == "h1"

    def test_equilibrium_small_lambda(self, capsys):
        """Test that lambda below the threshold exits with status 1."""
        out = os.path.join(self.temp_dir, "weak")
        assert self.run_cli("equilibrium", "--lambda", "0.01", "--out", out) == 1
        assert "threshold" in capsys.readouterr().out

    def test_equilibrium_no_convergence(self, capsys):
        """Test that an iteration cap exits with status 2."""
        out = os.path.join(self.temp_dir, "cap")
        assert self.run_cli("equilibrium", "--n", "20", "--max-iter", "1", "--out", out) == 2
        assert "last sup-changes" in capsys.readouterr().out

    def test_equilibrium_anchor_file(self):
        """Test an anchor read from a table file."""
        rows = "\n".join(f"{i}, {3 * i}" for i in range(-12, 13))
        table = self.create_temp_file("ramp.txt", "i,h\n" + rows + "\n")
        out = os.path.join(self.temp_dir, "table")
        assert self.run_cli("equilibrium", "--anchor-file", table, "--n", "10", "--out", out) == 0
        manifest = self.read_manifest(out)
        assert manifest["results"]["anchor"]["kind"] == "table"
        assert len(self.read_rows(os.path.join(out, "equilibrium.csv"))) == 22

    def test_missing_anchor_file(self):
        """Test that a missing anchor file exits with status 1."""
        out = os.path.join(self.temp_dir, "none")
        missing = os.path.join(self.temp_dir, "missing.txt")
        assert self.run_cli("equilibrium", "--anchor-file", missing, "--out", out) == 1

    def test_equilibrium_json(self):
        """Test the column-oriented JSON table."""
        out = os.path.join(self.temp_dir, "json")
        assert self.run_cli("equilibrium", "--n", "20", "--format", "json", "--out", out) == 0
        with open(os.path.join(out, "equilibrium.json")) as f:
            data = json.load(f)
        assert sorted(data) == ["g_i", "h_i", "i", "residual_i", "x_i"]
        assert data["i"][0] == -20
        assert len(data["x_i"]) == 41

    def test_lambda_sweep(self):
        """Test one table per lambda."""
        out = os.path.join(self.temp_dir, "sweep")
        assert self.run_cli("equilibrium", "--n", "20", "--lambdas", "1", "2", "--out", out) == 0
        manifest = self.read_manifest(out)
        assert manifest["outputs"] == ["equilibrium_000.csv", "equilibrium_001.csv"]
        assert [s["lambda"] for s in manifest["results"]["sweep"]] == [1.0, 2.0]

    def test_reproducible_output(self):
        """Test byte-identical tables and manifests for identical runs."""
        contents = []
        manifests = []
        out = os.path.join(self.temp_dir, "repeat")
        for _ in range(2):
            assert self.run_cli("equilibrium", "--n", "30", "--out", out) == 0
            with open(os.path.join(out, "equilibrium.csv"), "rb") as f:
                contents.append(f.read())
            with open(os.path.join(out, "manifest.json"), "rb") as f:
                manifests.append(f.read())
        assert contents[0] == contents[1]
        assert manifests[0] == manifests[1]
        assert "elapsed" not in self.read_manifest(out)

    def test_floats_round_trip(self):
        """Test that CSV values read back to the values in the JSON table."""
        csv_out = os.path.join(self.temp_dir, "c")
        json_out = os.path.join(self.temp_dir, "j")
        assert self.run_cli("equilibrium", "--n", "15", "--out", csv_out) == 0
        assert self.run_cli("equilibrium", "--n", "15", "--format", "json", "--out", json_out) == 0
        rows = self.read_rows(os.path.join(csv_out, "equilibrium.csv"))[1:]
        with open(os.path.join(json_out, "equilibrium.json")) as f:
            data = json.load(f)
        assert [float(r[1]) for r in rows] == data["x_i"]

    def test_minimal_level_one(self):
        """Test the level-1 minimal configuration end to end."""
        out = os.path.join(self.temp_dir, "minimal")
        code = self.run_cli("minimal", "--level", "1", "--window", "20", "--restarts", "3",
                            "--out", out)
        assert code == 0

        rows = self.read_rows(os.path.join(out, "minimal.csv"))
        assert rows[0] == ["n", "theta_n"]
        assert len(rows) == 42
        assert float(rows[21][1]) == 0.0

        results = self.read_manifest(out)["results"]
        free = results["free_points"]
        assert free[0][0] == pytest.approx(TAU_FLOAT ** 3 / 2, abs=1e-6)
        assert free[1][0] == pytest.approx(TAU_FLOAT ** 4 / 2, abs=1e-6)
        assert results["rotation_number"]["approx"] == pytest.approx(2.9270509831)
        sandwich = results["sandwich"]
        assert sandwich["lower"] <= sandwich["upper"]

    def test_minimal_level_five(self):
        """Test the level-5 run on [-50, 50] against the line y = rho x."""
        out = os.path.join(self.temp_dir, "level5")
        code = self.run_cli("minimal", "--level", "5", "--window", "50", "--restarts", "2",
                            "--out", out)
        assert code == 0

        rows = self.read_rows(os.path.join(out, "minimal.csv"))[1:]
        assert len(rows) == 101
        rho = (3 * TAU_FLOAT + 1) / 2
        band = TAU_FLOAT / 2 + TAU_FLOAT / 62
        assert max(abs(float(t) - rho * int(n)) for n, t in rows) <= band

        results = self.read_manifest(out)["results"]
        sandwich = results["sandwich"]
        assert sandwich["lower"] - 1e-9 <= sandwich["estimate"] <= sandwich["upper"] + 1e-9
        assert abs(sandwich["estimate"] - sandwich["rotation"]) <= sandwich["width"] + 1e-12
        assert sandwich["width"] <= 0.4
        assert results["certificate"]["skipped"]

    def test_minimal_invalid_level(self):
        """Test that level 0 exits with status 1."""
        out = os.path.join(self.temp_dir, "bad")
        assert self.run_cli("minimal", "--level", "0", "--out", out) == 1

    def test_verify_suite(self, capsys):
        """Test the fibword invariant suite."""
        assert self.run_cli("verify", "--suite", "fibword", "--samples", "50") == 0
        output = capsys.readouterr().out
        assert "Verifying fibword suite" in output
        assert "All checks passed!" in output


class TestVerificationRunner:
    """Test cases for the invariant runner."""

    def setup_method(self):
        """Set up test fixtures."""
        self.runner = VerificationRunner(samples=20, seed=1)

    def test_unknown_suite(self):
        """Test that an unknown suite name raises."""
        with pytest.raises(ValueError):
            self.runner.checks("nonsense")

    def test_suite_names(self):
        """Test that every suite builds its checks."""
        for suite in SUITES:
            assert self.runner.checks(suite)

    def test_failing_check_is_reported(self):
        """Test that a raising check is recorded as a failure."""
        def broken():
            raise ValidationError("bad input")

        check = Check("broken", broken)
        assert not check.run()
        assert "bad input" in check.detail

    def test_chain_suite(self, capsys):
        """Test the chain suite end to end."""
        passed, total = self.runner.run("chain")
        assert passed == total == 4
        assert "Summary: 4/4 checks passed" in capsys.readouterr().out
