import json
import subprocess
import sys
from pathlib import Path

import pytest

from dr2k.cli import main

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def write_model(tmp_path, payload, name="model.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


class TestSamples:
    def test_swap_sample_k0(self, capsys):
        code, out, _ = run_cli(["k0", str(SAMPLES / "swap_model.json")], capsys)
        assert code == 0
        assert "K0 = Z^2" in out

    def test_one_vertex_graph_k0(self, capsys):
        code, out, _ = run_cli(["k0", str(SAMPLES / "one_vertex_two_graph.json")], capsys)
        assert code == 0
        assert "K0 = Z/2" in out

    def test_identity_sample_ideal(self, capsys):
        code, out, _ = run_cli(["ideal", str(SAMPLES / "identity_model.json")], capsys)
        assert code == 0
        assert "passed" in out and "FAILED" not in out

    def test_swap_coboundary(self, capsys):
        code, out, _ = run_cli(["coboundary", str(SAMPLES / "swap_model.json")], capsys)
        assert code == 0
        assert "equality verified" in out
        assert "condition (C) holds" in out

    def test_swap_verdict_minimal_route(self, capsys):
        code, out, _ = run_cli(["verdict", str(SAMPLES / "swap_model.json")], capsys)
        assert code == 0
        assert "conclusion: StablyFinite" in out

    def test_swap_invariants(self, capsys):
        code, out, _ = run_cli(["invariants", str(SAMPLES / "swap_model.json")], capsys)
        assert code == 0
        assert "2 invariant subsets" in out


class TestConditionM:
    def test_two_three_fails_with_witness(self, tmp_path, capsys):
        path = write_model(tmp_path, {"model_type": "two_graph",
                                      "a1": [[2]], "a2": [[3]]})
        code, out, _ = run_cli(["condition-m", path], capsys)
        assert code == 0  # a negative finding is still a completed analysis
        assert "fails" in out and "f = [-1]" in out

    def test_brute_force_flag(self, tmp_path, capsys):
        path = write_model(tmp_path, {"model_type": "two_graph",
                                      "a1": [[2]], "a2": [[3]]})
        code, out, _ = run_cli(["condition-m", path, "--brute-force", "--bound", "3"], capsys)
        assert code == 0
        assert "consistent with the LP route" in out

    def test_machine_format_structure(self, tmp_path, capsys):
        path = write_model(tmp_path, {"model_type": "two_graph",
                                      "a1": [[2]], "a2": [[3]]})
        code, out, _ = run_cli(["condition-m", path, "--format", "machine"], capsys)
        doc = json.loads(out)
        assert doc["command"] == "condition-m"
        assert doc["result"]["condition_m"]["holds"] is False
        assert doc["result"]["condition_m"]["witness"]["vector"] == [1]
        assert doc["input_digest"].startswith("sha256:")


class TestVerdictCommand:
    def test_assume_flags(self, tmp_path, capsys):
        a = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]
        path = write_model(tmp_path, {
            "model_type": "two_graph", "labels": ["u0", "u1", "w0", "w1"],
            "a1": a, "a2": a, "invariant_subset": ["u0", "u1"],
            "assumptions": {"ideal_sf": "assume", "quotient_sf": "assume"}})
        code, out, _ = run_cli(["verdict", path, "--assume", "P"], capsys)
        assert code == 0
        assert "conclusion: StablyFinite" in out
        assert "assumed: " in out

    def test_machine_verdict_roundtrip(self, tmp_path, capsys):
        path = write_model(tmp_path, {"model_type": "finite_map",
                                      "t1": [1, 0], "t2": [0, 1]})
        code, out, _ = run_cli(["verdict", path, "--format", "machine"], capsys)
        doc = json.loads(out)
        assert doc["result"]["verdict"]["conclusion"] == "StablyFinite"
        statuses = {c["condition"]: c["status"] for c in doc["result"]["verdict"]["checked"]}
        assert statuses["M(system)"] == "Proven"


class TestErrors:
    def test_missing_file(self, capsys):
        code, _, err = run_cli(["k0", "/nonexistent/path.json"], capsys)
        assert code == 2 and "error" in err

    def test_invalid_json_locates_problem(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = run_cli(["k0", str(path)], capsys)
        assert code == 2 and "not valid JSON" in err

    def test_unknown_model_type(self, tmp_path, capsys):
        path = write_model(tmp_path, {"model_type": "mystery"})
        code, _, err = run_cli(["k0", path], capsys)
        assert code == 2 and "model_type" in err

    def test_non_commuting_model_names_point(self, tmp_path, capsys):
        path = write_model(tmp_path, {"model_type": "finite_map",
                                      "t1": [1, 0, 2], "t2": [0, 2, 1]})
        code, _, err = run_cli(["k0", path], capsys)
        assert code == 2 and "commute" in err

    def test_non_invariant_subset(self, tmp_path, capsys):
        path = write_model(tmp_path, {"model_type": "finite_map",
                                      "t1": [1, 0], "t2": [0, 1],
                                      "invariant_subset": ["p0"]})
        code, _, err = run_cli(["ideal", path], capsys)
        assert code == 2 and "invariant" in err

    def test_ideal_requires_subset(self, capsys):
        code, _, err = run_cli(["ideal", str(SAMPLES / "swap_model.json")], capsys)
        assert code == 2 and "invariant_subset" in err

    def test_coboundary_needs_finite_map(self, capsys):
        code, _, err = run_cli(["coboundary", str(SAMPLES / "one_vertex_two_graph.json")], capsys)
        assert code == 2 and "finite_map" in err

    def test_unknown_field_rejected(self, tmp_path, capsys):
        path = write_model(tmp_path, {"model_type": "finite_map",
                                      "t1": [0], "t2": [0], "bogus": 1})
        code, _, err = run_cli(["k0", path], capsys)
        assert code == 2 and "bogus" in err

    def test_bad_label_in_subset(self, tmp_path, capsys):
        path = write_model(tmp_path, {"model_type": "finite_map",
                                      "t1": [0], "t2": [0],
                                      "invariant_subset": ["nope"]})
        code, _, err = run_cli(["ideal", path], capsys)
        assert code == 2 and "nope" in err


class TestDeterminism:
    COMMANDS = (["k0"], ["condition-m", "--brute-force"], ["verdict"], ["invariants"])

    def test_byte_identical_across_processes_and_hash_seeds(self):
        # run each command twice in separate interpreters with different
        # PYTHONHASHSEED values: the machine output must be byte-identical
        sample = str(SAMPLES / "swap_model.json")
        for extra in self.COMMANDS:
            outputs = []
            for seed in ("0", "90210"):
                proc = subprocess.run(
                    [sys.executable, "-m", "dr2k.cli", *extra, sample, "--format", "machine"],
                    capture_output=True, text=True,
                    env={"PYTHONHASHSEED": seed, "PATH": "/usr/bin:/bin"},
                    cwd=str(SAMPLES.parent))
                assert proc.returncode == 0, proc.stderr
                outputs.append(proc.stdout)
            assert outputs[0] == outputs[1]

    def test_machine_output_reparses_to_same_content(self, tmp_path, capsys):
        path = write_model(tmp_path, {"model_type": "two_graph", "a1": [[3]], "a2": [[5]]})
        code, out, _ = run_cli(["k0", path, "--format", "machine"], capsys)
        doc = json.loads(out)
        assert json.dumps(doc, sort_keys=True, indent=2) + "\n" == out
