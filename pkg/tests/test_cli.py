"""Command-line interface: envelopes, exit codes, exports."""

from __future__ import annotations

import json

import jsonschema
import pytest

from multislice.cli import main
from multislice.report import ENVELOPE_SCHEMA


def run(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv) -> tuple[int, dict]:
    code, out = run(capsys, *argv)
    return code, json.loads(out)


class TestInfo:
    def test_text(self, capsys):
        code, out = run(capsys, "info", "-k", "2,1,1")
        assert code == 0
        assert "12 vertices" in out and "degree 5" in out

    def test_json(self, capsys):
        code, doc = run_json(capsys, "info", "-k", "2,1,1", "--format", "json")
        assert code == 0
        jsonschema.validate(doc, ENVELOPE_SCHEMA)
        assert doc["results"]["cardinality"] == 12
        assert doc["results"]["degree"] == 5

    def test_trivial(self, capsys):
        code, doc = run_json(capsys, "info", "-k", "4", "--format", "json")
        assert code == 0
        assert doc["results"]["trivial"] is True
        assert doc["results"]["cardinality"] == 1

    def test_two_levels(self, capsys):
        code, doc = run_json(capsys, "info", "-k", "1,1", "--format", "json")
        assert code == 0
        assert doc["results"]["cardinality"] == 2
        assert doc["results"]["degree"] == 1

    def test_bad_composition(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["info", "-k", "2,x"])
        assert err.value.code == 2


class TestSpectrum:
    def test_json_multiset(self, capsys):
        code, doc = run_json(capsys, "spectrum", "-k", "2,2", "--format", "json")
        assert code == 0
        jsonschema.validate(doc, ENVELOPE_SCHEMA)
        pairs = [tuple(p) for p in doc["results"]["spectrum"]["eigenvalues"]]
        assert pairs == [(0.0, 1), (4.0, 3), (6.0, 2)]

    def test_csv(self, capsys):
        code, out = run(capsys, "spectrum", "-k", "1,1", "--format", "csv")
        assert code == 0
        assert out.splitlines()[0] == "eigenvalue,multiplicity"

    def test_exact_mode_certifies_multiplicities(self, capsys):
        code, doc = run_json(capsys, "spectrum", "-k", "2,2", "--exact", "--format", "json")
        assert code == 0
        certs = {c["name"]: c for c in doc["certificates"]}
        assert certs["multiplicity[4]"]["passed"] is True
        assert certs["multiplicity[4]"]["details"]["exact_multiplicity"] == 3
        assert certs["multiplicity[0]"]["passed"] is True
        assert certs["multiplicity[6]"]["passed"] is True


class TestVerify:
    def test_single_composition(self, capsys):
        code, doc = run_json(capsys, "verify", "-k", "1,1,1")
        assert code == 0
        jsonschema.validate(doc, ENVELOPE_SCHEMA)
        (instance,) = doc["results"]["instances"]
        assert instance["status"] == "pass"
        assert instance["delta"] == 3.0

    def test_trivial_skipped(self, capsys):
        code, doc = run_json(capsys, "verify", "-k", "3")
        assert code == 0
        (instance,) = doc["results"]["instances"]
        assert instance["status"] == "trivial-skipped"

    def test_sweep(self, capsys):
        code, doc = run_json(capsys, "verify", "--sweep", "N=2..4", "--functions", "5")
        assert code == 0
        summary = doc["results"]["summary"]
        assert summary["instances"] == 1 + 3 + 7
        assert summary["failed"] == 0
        assert summary["passed"] == summary["instances"]

    def test_budget_exceeded_does_not_abort_sweep(self, capsys):
        code, doc = run_json(
            capsys, "verify", "--sweep", "N=4..4", "--functions", "2", "--budget", "5"
        )
        assert code == 0  # nothing failed; oversized instances are reported
        statuses = {d["composition"]: d["status"] for d in doc["results"]["instances"]}
        assert statuses["2,2"] == "budget-exceeded"
        assert statuses["3,1"] == "pass"

    def test_bad_sweep_spec(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["verify", "--sweep", "2..4"])
        assert err.value.code == 2

    def test_deterministic_results(self, capsys):
        code1, doc1 = run_json(capsys, "verify", "-k", "2,1", "--functions", "3")
        code2, doc2 = run_json(capsys, "verify", "-k", "2,1", "--functions", "3")
        assert code1 == code2 == 0
        assert doc1["results"] == doc2["results"]
        assert doc1["certificates"] == doc2["certificates"]


class TestCoarsen:
    def test_pass(self, capsys):
        code, doc = run_json(capsys, "coarsen", "--from", "1,1,1", "--to", "2,1")
        assert code == 0
        jsonschema.validate(doc, ENVELOPE_SCHEMA)
        assert all(c["passed"] for c in doc["certificates"])
        assert doc["results"]["witness"]["table"] is not None

    def test_no_witness(self, capsys):
        code, doc = run_json(capsys, "coarsen", "--from", "2,2", "--to", "3,1")
        assert code == 1
        assert doc["results"]["witness"] is None


class TestWalk:
    def test_json_summary(self, capsys):
        code, doc = run_json(
            capsys, "walk", "-k", "2,2,2", "--steps", "2e4", "--seed", "7", "--format", "json"
        )
        assert code == 0
        jsonschema.validate(doc, ENVELOPE_SCHEMA)
        relax = doc["results"]["relaxation"]
        assert relax["target"] == pytest.approx(0.6)
        assert abs(relax["ratio"] - 0.6) < 0.05

    def test_csv(self, capsys):
        code, out = run(capsys, "walk", "-k", "2,1", "--steps", "1000", "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "lag,autocorrelation,stderr"
        assert len(lines) == 13


class TestExport:
    def test_edgelist_default(self, capsys):
        code, out = run(capsys, "export", "-k", "1,1")
        assert code == 0
        assert out.strip() == "0 1"

    def test_dot(self, capsys):
        code, out = run(capsys, "export", "-k", "1,1", "--format", "dot")
        assert code == 0
        assert out.startswith("graph") and "0 -- 1;" in out

    def test_coo(self, capsys):
        code, out = run(capsys, "export", "-k", "1,1", "--format", "coo")
        assert code == 0
        assert out.splitlines() == ["0 0 1", "0 1 -1", "1 0 -1", "1 1 1"]

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "edges.txt"
        code = main(["export", "-k", "2,1", "-o", str(target)])
        assert code == 0
        lines = target.read_text().strip().splitlines()
        assert len(lines) == 3  # triangle
