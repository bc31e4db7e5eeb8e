import io
import json
import math
import unittest
from contextlib import redirect_stderr
from pathlib import Path
from shutil import copy
from tempfile import mkdtemp

import pandas as pd
import pytest

from birational_dynamics_tools.projcore import henon_pair, pair_to_dict
from birational_dynamics_tools.tools import load_run_manifest, run

SPECIFICATIONS = Path(__file__).parent / "map_specifications"


class TestCommandLine(unittest.TestCase):
    def setUp(self):
        self.test_dir = Path(mkdtemp())
        self.henon = str(SPECIFICATIONS / "henon.yml")

    def run_command(self, *arguments):
        stderr = io.StringIO()
        with redirect_stderr(stderr):
            code = run(list(arguments) + ["--out", str(self.test_dir)])
        return code, stderr.getvalue()

    def write_specification(self, name: str, content) -> str:
        file_path = self.test_dir / name
        file_path.write_text(content if isinstance(content, str) else json.dumps(content))
        return str(file_path)

    def test_degrees_csv(self):
        code, _ = self.run_command("degrees", "--map", self.henon, "--max-n", "4")
        assert code == 0
        assert (self.test_dir / "degrees.csv").read_text() == "n,degree\n1,2\n2,4\n3,8\n4,16\n"

    def test_manifest_replays_run(self):
        map_path = copy(self.henon, self.test_dir / "henon.yml")
        arguments = ["degrees", "--map", str(map_path), "--max-n", "3", "--seed", "5", "--out", str(self.test_dir)]
        assert run(arguments) == 0
        manifest = load_run_manifest(self.test_dir / "degrees_manifest.json")
        assert manifest.subcommand == "degrees"
        assert manifest.argv == arguments
        assert manifest.seed == 5
        assert manifest.workers == 1
        assert manifest.parameters["max_n"] == 3
        assert manifest.parameters["common_factor_trials"] == 3
        assert manifest.summary["degrees"] == [2, 4, 8]
        assert manifest.outputs["degrees"].endswith("degrees.csv")
        assert manifest.inputs_unchanged()

        with open(map_path, "a") as stream:
            stream.write("# edited\n")
        assert not manifest.inputs_unchanged()

        replay_dir = Path(mkdtemp())
        replay = [replay_dir.as_posix() if value == str(self.test_dir) else value for value in manifest.argv]
        assert run(replay) == 0
        assert (replay_dir / "degrees.csv").read_text() == (self.test_dir / "degrees.csv").read_text()

    def test_missing_map_file(self):
        code, stderr = self.run_command("degrees", "--map", str(self.test_dir / "missing.json"))
        assert code == 1
        assert "does not exist" in stderr

    def test_missing_map_option(self):
        code, stderr = self.run_command("degrees")
        assert code == 1
        assert "--map" in stderr

    def test_malformed_specification(self):
        map_path = self.write_specification("broken.json", '{\n  "family": "henon",\n  "a": \n}\n')
        code, stderr = self.run_command("validate", "--map", map_path)
        assert code == 2
        assert "line 4" in stderr

    def test_schema_violation(self):
        map_path = self.write_specification("lorenz.json", dict(family="lorenz"))
        code, stderr = self.run_command("validate", "--map", map_path)
        assert code == 2
        assert "field 'family'" in stderr

    def test_validate(self):
        code, _ = self.run_command("validate", "--map", self.henon, "--stability-n", "5")
        assert code == 0
        report = json.loads((self.test_dir / "validation.json").read_text())
        assert report["passed"]
        assert report["stability_evidence"]["holds"]

    def test_validate_reports_wrong_inverse(self):
        specification = pair_to_dict(henon_pair())
        specification["backward"] = pair_to_dict(henon_pair(a=2))["backward"]
        map_path = self.write_specification("wrong_inverse.json", specification)
        code, _ = self.run_command("validate", "--map", map_path, "--witnesses", "5")
        assert code == 2
        report = json.loads((self.test_dir / "validation.json").read_text())
        assert not report["passed"]
        assert not report["birational"]

    def test_certify_map(self):
        map_path = str(SPECIFICATIONS / "twisted_henon.yml")
        code, _ = self.run_command("certify", "--map", map_path, "--prime", "3", "--sanity-n", "10")
        assert code == 0
        certificate = json.loads((self.test_dir / "certificate.json").read_text())
        assert certificate["verdict"] == "certified"
        assert certificate["proof_kind"] == "inductive"

    def test_certify_needs_a_twist(self):
        code, stderr = self.run_command("certify", "--map", self.henon, "--prime", "3")
        assert code == 2
        assert "twist" in stderr

    def test_certify_needs_one_input(self):
        code, _ = self.run_command("certify", "--prime", "3")
        assert code == 1

    def test_certify_rejects_composite_prime(self):
        map_path = str(SPECIFICATIONS / "twisted_henon.yml")
        code, stderr = self.run_command("certify", "--map", map_path, "--prime", "9")
        assert code == 2
        assert "NotPrime" in stderr

    def test_certify_sweep(self):
        code, _ = self.run_command("certify", "--sweep", str(SPECIFICATIONS / "sweep.yml"))
        assert code == 0
        certificates = json.loads((self.test_dir / "certificates.json").read_text())
        assert [certificate["label"] for certificate in certificates] == ["dominant", "balanced"]
        assert [certificate["verdict"] for certificate in certificates] == ["certified", "inconclusive"]
        manifest = load_run_manifest(self.test_dir / "certify_manifest.json")
        assert manifest.summary["verdicts"] == dict(dominant="certified", balanced="inconclusive")

    def test_density(self):
        map_path = str(SPECIFICATIONS / "zariski_henon.json")
        polynomial = '[["1", [1, 0, 0]]]'
        code, _ = self.run_command("density", "--map", map_path, "--prime", "5", "--n", "6", "--polynomial", polynomial)
        assert code == 0
        report = json.loads((self.test_dir / "density.json").read_text())
        assert report["first_failure"] == 4
        assert report["escape_step"] == 0
        assert not report["all_hold"]

    def test_height_without_map(self):
        code, _ = self.run_command("height", "--point", "2,4,6")
        assert code == 0
        content = json.loads((self.test_dir / "height.json").read_text())
        assert content["point"] == ["1", "2", "3"]
        assert content["height"] == pytest.approx(math.log(3))

    def test_height_bad_point(self):
        code, _ = self.run_command("height", "--point", "1,a,2")
        assert code == 1

    def test_hcanonical(self):
        code, _ = self.run_command("hcanonical", "--map", self.henon, "--point", "0,0,1", "--cutoff", "12")
        assert code == 0
        estimate = json.loads((self.test_dir / "hcanonical.json").read_text())
        assert abs(estimate["value"] - 0.229116) <= 2 * estimate["tail_bound"]

    def test_lee(self):
        code, _ = self.run_command("lee", "--map", self.henon, "--count", "20", "--bound", "10")
        assert code == 0
        table = pd.read_csv(self.test_dir / "lee_scan.csv")
        assert list(table.columns) == ["point", "h", "h_f", "h_finv", "defect"]
        assert len(table) <= 20
        report = json.loads((self.test_dir / "lee.json").read_text())
        assert report["estimated_C"] >= 0

    def test_hprime_single_point(self):
        arguments = ["hprime", "--map", self.henon, "--point", "1,2,1", "--n", "3", "--lee-constant", "0"]
        code, _ = self.run_command(*arguments)
        assert code == 0
        content = json.loads((self.test_dir / "hprime.json").read_text())
        assert content["lee_constant"] == 0
        assert len(content["reports"]) == 1
        assert content["reports"][0]["required_ratios"][0] == "5/4"

    def test_green(self):
        code, _ = self.run_command("green", "--map", self.henon, "--point", "0,0,1", "--n", "3")
        assert code == 0
        table = pd.read_csv(self.test_dir / "green.csv")
        assert table["n"].tolist() == [0, 1, 2, 3]
        assert table["partial_sum"][1] == pytest.approx(math.log(2) / 4)

    def test_energy(self):
        code, _ = self.run_command("energy", "--map", self.henon, "--n", "5")
        assert code == 0
        report = json.loads((self.test_dir / "energy_forward.json").read_text())
        assert report["terms"] == [0.0] * 6
        assert report["is_cauchy"]
        assert (self.test_dir / "energy_forward.csv").is_file()

    def test_mugrid_cell_cap(self):
        code, stderr = self.run_command("mugrid", "--map", self.henon, "--resolution", "10", "--max-cells", "100")
        assert code == 3
        assert "ResourceLimit" in stderr

    def test_mugrid(self):
        code, _ = self.run_command("mugrid", "--map", self.henon, "--n", "1", "--resolution", "5")
        assert code == 0
        assert (self.test_dir / "mu_grid_1.bin").stat().st_size == 8 * 5**4
        sidecar = json.loads((self.test_dir / "mu_grid_1.json").read_text())
        assert sidecar["box"] == [[-3.0, 3.0]] * 4

    def test_periodic(self):
        code, _ = self.run_command("periodic", "--map", self.henon, "--n", "1")
        assert code == 0
        content = json.loads((self.test_dir / "periodic_1.json").read_text())
        assert len(content["points"]) == 2
        assert len(content["exact_points"]) == 2
        manifest = load_run_manifest(self.test_dir / "periodic_manifest.json")
        assert manifest.parameters["damping"] == 0.5
        assert manifest.summary["starts"] == 100

    def test_periodic_without_starts(self):
        with pytest.warns(UserWarning):
            code, stderr = self.run_command("periodic", "--map", self.henon, "--starts", "0")
        assert code == 4
        assert "NoConvergence" in stderr
        assert (self.test_dir / "periodic_1.json").is_file()

    def test_equidist(self):
        code, _ = self.run_command("equidist", "--map", self.henon, "--periods", "1,2")
        assert code == 0
        report = json.loads((self.test_dir / "equidist.json").read_text())
        assert report["measures"] == ["period 1", "period 2"]
        assert report["line_mass"] == {"1": 0.0, "2": 0.0}
        table = pd.read_csv(self.test_dir / "equidist.csv")
        assert table.columns.tolist() == ["function", "period 1", "period 2"]

    def test_version(self):
        assert run(["--version"]) == 0
