import json
import os
import subprocess
import sys

import numpy as np
import pytest

from grushin.cli import main
from grushin.errors import ConfigError, DataError, FormatError, TruncationError
from grushin.gridio import (
    MAGIC,
    GridFileHeader,
    RunConfig,
    load_grid_function,
    save_grid_function,
    validate_report_dict,
    write_report,
)
from grushin.normlab import make_test_function, operator_norm_probe
from grushin.normlab import TestFunctionSpec as FnSpec
from grushin.transform import GridFunction, GridSpec


@pytest.fixture
def sample_function(small_grid):
    return make_test_function(FnSpec("hermite-random", 5, 2, 17, 1.0), small_grid, 8)


class TestGridFormat:
    def test_round_trip_bit_identical(self, sample_function, tmp_path):
        path = str(tmp_path / "f.grid")
        save_grid_function(sample_function, path)
        back = load_grid_function(path)
        assert back.spec == sample_function.spec
        np.testing.assert_array_equal(back.values, sample_function.values)
        save_grid_function(back, str(tmp_path / "g.grid"))
        assert (tmp_path / "f.grid").read_bytes() == (tmp_path / "g.grid").read_bytes()

    def test_wrong_magic_rejected(self, sample_function, tmp_path):
        path = tmp_path / "f.grid"
        save_grid_function(sample_function, str(path))
        blob = bytearray(path.read_bytes())
        blob[:8] = b"GRUSHIN0"
        path.write_bytes(bytes(blob))
        with pytest.raises(FormatError):
            load_grid_function(str(path))

    def test_truncated_payload_rejected(self, sample_function, tmp_path):
        path = tmp_path / "f.grid"
        save_grid_function(sample_function, str(path))
        blob = path.read_bytes()
        path.write_bytes(blob[: len(blob) - 16])
        with pytest.raises(TruncationError):
            load_grid_function(str(path))

    def test_nonfinite_payload_rejected(self, small_grid, tmp_path):
        header = GridFileHeader(1, small_grid.Nx, small_grid.Nt,
                                small_grid.x_extent, small_grid.t_extent)
        payload = np.full(small_grid.shape(), np.nan, dtype="<c16").tobytes()
        path = tmp_path / "bad.grid"
        path.write_bytes(header.pack() + payload)
        with pytest.raises(DataError):
            load_grid_function(str(path))

    def test_header_invariants_enforced(self, tmp_path):
        header = GridFileHeader(1, 48, 64, 1.0, 1.0)  # Nx not a power of two
        path = tmp_path / "h.grid"
        path.write_bytes(header.pack())
        with pytest.raises(FormatError):
            load_grid_function(str(path))

    def test_magic_constant(self):
        assert MAGIC == b"GRUSHIN1"


class TestReports:
    def test_json_reparses_and_validates(self, tmp_path):
        rep = operator_norm_probe("identity", p=2.0, trials=4, seed=0, refine=True)
        path = str(tmp_path / "r.json")
        write_report(rep, path)
        doc = json.loads(open(path).read())
        validate_report_dict(doc)
        assert doc["operator"] == "identity"

    def test_csv_rows_match_ratio_count(self, tmp_path):
        rep = operator_norm_probe("identity", p=2.0, trials=5, seed=0, refine=False)
        write_report(rep, str(tmp_path / "r.json"))
        rows = (tmp_path / "r.csv").read_text().strip().splitlines()
        assert rows[0] == "trial,ratio"
        assert len(rows) - 1 == rep.trials - rep.skipped

    def test_deterministic_bytes(self, tmp_path):
        rep = operator_norm_probe("riesz:1", p=2.0, trials=4, seed=2, refine=False)
        write_report(rep, str(tmp_path / "a.json"))
        write_report(rep, str(tmp_path / "b.json"))
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
        # timestamps live in the sidecar, not the comparable document
        assert (tmp_path / "a.meta.json").exists()

    def test_validation_catches_broken_stable_flag(self, tmp_path):
        rep = operator_norm_probe("identity", p=2.0, trials=4, seed=0, refine=True)
        doc = rep.to_dict()
        doc["stable"] = not doc["stable"]
        with pytest.raises(FormatError):
            validate_report_dict(doc)


class TestRunConfig:
    def test_unknown_top_key_rejected_with_path(self):
        with pytest.raises(ConfigError, match="unknown keys.*extra"):
            RunConfig.from_dict({"extra": 1})

    def test_unknown_probe_key_rejected(self):
        with pytest.raises(ConfigError, match="probe"):
            RunConfig.from_dict({"probe": {"trails": 3}})

    def test_bad_grid_values_rejected(self):
        with pytest.raises(ConfigError, match="grid"):
            RunConfig.from_dict({"grid": {"n": 1, "Nx": 48, "x_extent": 1.0,
                                          "Nt": 64, "t_extent": 1.0}})

    def test_bad_exponent_rejected(self):
        with pytest.raises(ConfigError, match="probe.p"):
            RunConfig.from_dict({"probe": {"p": 1.0}})

    def test_valid_config_parses(self):
        cfg = RunConfig.from_dict({
            "grid": {"n": 1, "Nx": 64, "x_extent": 6.0, "Nt": 64,
                     "t_extent": 6.283185307179586},
            "K": 8,
            "probe": {"kind": "norm", "operator": "riesz:1", "p": 2.0,
                      "trials": 4, "seed": 1},
        })
        assert cfg.K == 8 and cfg.probe["kind"] == "norm"


class TestCli:
    def _write_config(self, tmp_path, doc, name="cfg.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)

    def test_config_error_exit_code_and_no_outputs(self, tmp_path, capsys):
        cfg = self._write_config(tmp_path, {"bogus": True})
        code = main(["probe", "--config", cfg, "--output", str(tmp_path / "out")])
        assert code == 2
        out_dir = tmp_path / "out"
        assert not any(out_dir.glob("*.json"))

    def test_apply_identity_round_trip(self, tmp_path, sample_function):
        inp = str(tmp_path / "in.grid")
        outp = str(tmp_path / "out.grid")
        save_grid_function(sample_function, inp)
        cfg = self._write_config(tmp_path, {
            "input": inp, "output": outp, "K": 8, "pipeline": ["one"],
            "figures": False,
        })
        assert main(["apply", "--config", cfg]) == 0
        result = load_grid_function(outp)
        assert np.abs(result.values - sample_function.values).max() < 1e-8

    def test_transform_reports_spectrum(self, tmp_path, sample_function):
        inp = str(tmp_path / "in.grid")
        save_grid_function(sample_function, inp)
        cfg = self._write_config(tmp_path, {
            "input": inp, "K": 8, "report": "spec.json", "figures": False,
            "roundtrip_output": str(tmp_path / "back.grid"),
        })
        assert main(["transform", "--config", cfg, "--output", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / "spec.json").read_text())
        assert doc["schema"] == "grushin.transform-report/1"
        assert "dropped_dc_energy" in doc
        assert doc["roundtrip_max_err"] < 1e-8
        assert (tmp_path / "back.grid").exists()

    def test_probe_norm_writes_report_csv_and_figure(self, tmp_path):
        cfg = self._write_config(tmp_path, {
            "K": 6,
            "probe": {"kind": "norm", "operator": "riesz:1", "p": 2.0,
                      "trials": 3, "seed": 1},
            "report": "probe.json",
        })
        assert main(["probe", "--config", cfg, "--output", str(tmp_path)]) == 0
        assert (tmp_path / "probe.json").exists()
        assert (tmp_path / "probe.csv").exists()
        assert (tmp_path / "probe.png").exists()
        validate_report_dict(json.loads((tmp_path / "probe.json").read_text()))

    def test_probe_rbound_default_stable(self, tmp_path):
        cfg = self._write_config(tmp_path, {
            "probe": {"kind": "rbound", "operator": "rational", "p": 4.0,
                      "trials": 8, "seed": 3, "Nx": 256, "x_extent": 14.0},
            "report": "rb.json", "figures": False,
        })
        assert main(["probe", "--config", cfg, "--output", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / "rb.json").read_text())
        assert doc["kind"] == "rbound"
        assert doc["stable"] is True

    def test_probe_hormander(self, tmp_path):
        cfg = self._write_config(tmp_path, {
            "probe": {"kind": "hormander", "operator": "rational", "N": 2,
                      "mu_range": [1.0, 1e4], "samples": 65},
            "figures": False,
        })
        assert main(["probe", "--config", cfg, "--output", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / "hormander-report.json").read_text())
        assert doc["bounded"] is True

    def test_probe_equivalence(self, tmp_path):
        cfg = self._write_config(tmp_path, {
            "K": 6,
            "probe": {"kind": "equivalence", "p": 4.0, "trials": 3, "seed": 2,
                      "lambdas": [0.5, 1.0, 2.0]},
            "figures": False,
        })
        assert main(["probe", "--config", cfg, "--output", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / "equivalence-report.json").read_text())
        assert doc["lambda_stable"] is True

    def test_missing_input_is_data_error_exit(self, tmp_path):
        cfg = self._write_config(tmp_path, {"input": str(tmp_path / "no.grid"), "K": 4})
        code = main(["transform", "--config", cfg])
        assert code in (1, 3)

    def test_thread_env_reproducibility(self, tmp_path, monkeypatch):
        rep_serial = operator_norm_probe("riesz:1", p=2.0, trials=6, seed=4, refine=False)
        monkeypatch.setenv("GRUSHIN_THREADS", "4")
        rep_parallel = operator_norm_probe("riesz:1", p=2.0, trials=6, seed=4, refine=False)
        assert rep_serial.ratios == rep_parallel.ratios


class TestCliProcess:
    def test_version_flag(self):
        out = subprocess.run(
            [sys.executable, "-m", "grushin", "--version"],
            capture_output=True, text=True,
        )
        assert out.returncode == 0
        assert "grushin" in out.stdout
