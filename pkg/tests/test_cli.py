import json
import logging

import pytest

from tritforge.main import build_parser, main, parse_args
from tritforge.models.pydantic_models import FidelityReport, VerifyRecord
from tritforge.utils.circuit_serialization import circuit_from_text
from tritforge.utils.decomposition_catalog import CATALOG_IDS, INCOMPLETE_IDS


@pytest.fixture(autouse=True)
def _reset_logging():
    yield
    logging.getLogger().handlers.clear()


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


class TestParser:
    def test_global_flags_on_either_side(self):
        before = parse_args(["--format", "json", "list"])
        after = parse_args(["list", "--format", "json"])
        assert before.format == after.format == "json"

    def test_defaults_are_filled(self):
        args = parse_args(["timing"])
        assert args.format == "table"
        assert args.out is None
        assert args.tolerance is None
        assert args.seed == 0

    def test_seed_from_environment(self, monkeypatch):
        monkeypatch.setenv("TRITFORGE_SEED", "5")
        assert parse_args(["qec"]).seed == 5
        assert parse_args(["qec", "--seed", "9"]).seed == 9

    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestList:
    def test_json(self, capsys):
        code, out = run_cli(capsys, "list", "--format", "json")
        assert code == 0
        assert [item["id"] for item in json.loads(out)] == sorted(CATALOG_IDS)

    def test_table(self, capsys):
        code, out = run_cli(capsys, "list")
        assert code == 0
        assert "REF10CX" in out
        assert "needs_exclusive_cnot" in out


class TestVerify:
    def test_whole_catalog_passes(self, capsys):
        code, out = run_cli(capsys, "verify", "--all", "--format", "json")
        assert code == 0
        records = [VerifyRecord.model_validate(r) for r in json.loads(out)]
        assert [r.id for r in records] == list(CATALOG_IDS)
        assert all(r.status == "PASS" for r in records)
        assert not next(r for r in records if r.id == "D1S").toffoli_equivalent

    def test_incomplete_variants(self, capsys):
        code, out = run_cli(capsys, "verify", "--incomplete", "--all", "--format", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("id,check,toffoli_equivalent")
        assert len(lines) == 1 + len(INCOMPLETE_IDS)
        assert all(",incomplete," in line and ",PASS," in line for line in lines[1:])

    def test_table_output(self, capsys):
        code, out = run_cli(capsys, "verify", "B1", "B3")
        assert code == 0
        assert out.count("PASS") >= 2

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "verify.json"
        code, out = run_cli(capsys, "verify", "A1", "--format", "json", "--out", str(path))
        assert code == 0
        assert out == ""
        assert json.loads(path.read_text())[0]["id"] == "A1"

    def test_unknown_id(self, capsys):
        code, _ = run_cli(capsys, "verify", "Z9")
        assert code == 2

    def test_no_ids(self, capsys):
        code, _ = run_cli(capsys, "verify")
        assert code == 2

    def test_bad_tolerance(self, capsys):
        code, out = run_cli(capsys, "verify", "B1", "--tolerance", "2", "--format", "json")
        assert code == 2
        assert json.loads(out)["exit_code"] == 2


class TestTau:
    def test_csv_rows(self, capsys):
        code, out = run_cli(capsys, "tau", "B1", "--format", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "id,input,tau,tau_max"
        assert "B1,11,2.0,2.0" in lines
        assert "B1,00,0.0,2.0" in lines

    def test_hybrid_minimization_visible(self, capsys):
        code, out = run_cli(capsys, "tau", "B2", "B3", "--format", "json")
        assert code == 0
        rows = json.loads(out)
        tau_max = {row["id"]: row["tau_max"] for row in rows}
        assert tau_max["B3"] <= tau_max["B2"]

    def test_all_covers_every_qutrit_entry(self, capsys):
        code, out = run_cli(capsys, "tau", "--all", "--format", "json")
        assert code == 0
        ids = {row["id"] for row in json.loads(out)}
        assert ids == set(INCOMPLETE_IDS) | {"D1S"}

    def test_not_applicable(self, capsys):
        code, out = run_cli(capsys, "tau", "ISWAP", "--format", "json")
        assert code == 2
        assert json.loads(out)["details"]["type"] == "TauNotApplicableError"


class TestTiming:
    def test_default_table(self, capsys):
        code, out = run_cli(capsys, "timing")
        assert code == 0
        assert "525 ns" in out
        assert "1.4 us" in out

    def test_json_with_faster_reset(self, capsys):
        code, out = run_cli(capsys, "timing", "--reset-ns", "80", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["mf"]["total_ns"] == 325
        assert payload["mb"]["total_ns"] == 1400
        assert payload["speedup"] == pytest.approx(1400 / 325)

    def test_csv(self, capsys):
        code, out = run_cli(capsys, "timing", "--format", "csv")
        assert code == 0
        assert out.splitlines()[0] == "budget,component,duration_ns,relevant"

    def test_negative_duration(self, capsys):
        code, _ = run_cli(capsys, "timing", "--reset-ns", "-5")
        assert code == 2


class TestQec:
    def test_single_errors_are_corrected(self, capsys):
        code, out = run_cli(capsys, "qec", "--cycles", "10", "--theta", "0.3", "--rotate-site",
                            "--seed", "7", "--format", "json")
        assert code == 0
        report = FidelityReport.model_validate(json.loads(out))
        assert report.cycles == 10
        assert report.min_fidelity == pytest.approx(1.0, abs=1e-9)

    def test_no_errors(self, capsys):
        code, out = run_cli(capsys, "qec", "--cycles", "5", "--p-error", "0", "--format", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "cycle,basis,error_sites,theta,fidelity,leakage_flag"
        assert len(lines) == 6
        assert all(float(line.split(",")[4]) == pytest.approx(1.0) for line in lines[1:])

    def test_same_seed_same_bytes(self, capsys):
        argv = ["qec", "--cycles", "4", "--p-error", "0.5", "--mode", "random_independent",
                "--eps-reset", "0.01", "--seed", "3", "--format", "json"]
        _, first = run_cli(capsys, *argv)
        _, second = run_cli(capsys, *argv)
        assert first == second

    def test_out_writes_json_and_csv(self, capsys, tmp_path):
        code, out = run_cli(capsys, "qec", "--cycles", "3", "--theta", "0.2", "--out", str(tmp_path / "run.json"))
        assert code == 0
        assert out.startswith("cycles=3 mean_fidelity=")
        report = FidelityReport.model_validate(json.loads((tmp_path / "run.json").read_text()))
        assert len(report.records) == 3
        assert (tmp_path / "run.csv").read_text().count("\n") == 4

    def test_config_file_and_flag_precedence(self, capsys, tmp_path):
        config_file = tmp_path / "qec.env"
        config_file.write_text("QEC_CYCLES=3\nTHETA=0.0,0.4,0.0\nAXIS=bit\n")
        code, out = run_cli(capsys, "qec", "--config", str(config_file), "--format", "json")
        assert code == 0
        report = json.loads(out)
        assert report["cycles"] == 3
        assert report["records"][0]["error_sites"] == [1]

        code, out = run_cli(capsys, "qec", "--config", str(config_file), "--cycles", "2", "--format", "json")
        assert json.loads(out)["cycles"] == 2

    def test_unknown_config_key(self, capsys, tmp_path):
        config_file = tmp_path / "qec.env"
        config_file.write_text("COFFEE=1\n")
        code, _ = run_cli(capsys, "qec", "--config", str(config_file))
        assert code == 2

    def test_two_angles_rejected(self, capsys):
        code, _ = run_cli(capsys, "qec", "--theta", "0.1", "0.2")
        assert code == 2

    def test_rounded_psi_is_accepted(self, capsys):
        code, out = run_cli(capsys, "qec", "--cycles", "2", "--theta", "0.4", "--psi", "0.70710678", "0.70710678",
                            "--format", "json")
        assert code == 0
        assert FidelityReport.model_validate(json.loads(out)).min_fidelity == pytest.approx(1.0, abs=1e-9)

    def test_zero_psi_rejected(self, capsys):
        code, _ = run_cli(capsys, "qec", "--psi", "0", "0")
        assert code == 2

    def test_channel_mode(self, capsys):
        code, out = run_cli(capsys, "qec", "--cycles", "2", "--theta", "0.5", "--channel",
                            "--eps-reset", "0.01", "--format", "json")
        assert code == 0
        assert json.loads(out)["final_fidelity"] <= 1.0


class TestDump:
    def test_incomplete_dump_parses(self, capsys):
        code, out = run_cli(capsys, "dump", "B3", "--incomplete")
        assert code == 0
        assert out.startswith("# B3*")
        assert circuit_from_text(out).two_site_count() == 2

    def test_dump_to_file(self, capsys, tmp_path):
        path = tmp_path / "ref.txt"
        code, _ = run_cli(capsys, "dump", "REF10CX", "--out", str(path))
        assert code == 0
        assert circuit_from_text(path.read_text()).count("CNOT") == 10

    def test_dump_unknown(self, capsys):
        code, _ = run_cli(capsys, "dump", "Z9")
        assert code == 2
