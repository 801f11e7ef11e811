import json
import subprocess
import sys
from pathlib import Path

import pytest

from kinq import cli

CONFIGS = Path(__file__).parent.parent / "configs"


def run_cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "kinq.cli"] + args,
                          cwd=cwd, capture_output=True, text=True)


class TestConductivityCommand:
    def test_csv_schema(self, tmp_path):
        rc = cli.main(["conductivity",
                       "--material", str(CONFIGS / "two_qubit_film.json"),
                       "--freq-ghz", "4:8:3", "--temp-k", "0.01",
                       "--out", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "conductivity.csv").read_text().splitlines()
        assert lines[0] == ("omega_GHz,T_K,sigma1,sigma2,"
                            "Rs_ohm_per_sq,Xs_ohm_per_sq")
        assert len(lines) == 4
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["tool"] == "kinq"
        assert manifest["inputs_sha256"]

    def test_zs_alias(self, tmp_path):
        rc = cli.main(["zs",
                       "--material", str(CONFIGS / "two_qubit_film.json"),
                       "--freq-ghz", "7", "--temp-k", "0.01",
                       "--out", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "zs.csv").exists()


class TestResonatorCommands:
    def test_resonator_json(self, tmp_path):
        rc = cli.main(["resonator",
                       "--geometry", str(CONFIGS / "fig1e_resonator.json"),
                       "--length-um", "8504.9221", "--mode", "half",
                       "--model", "pec", "--out", str(tmp_path)])
        assert rc == 0
        doc = json.loads((tmp_path / "resonator.json").read_text())
        assert abs(doc["frequency_GHz"] - 7.064) < 1e-3

    def test_temp_sweep_outputs(self, tmp_path):
        rc = cli.main(["temp-sweep",
                       "--geometry", str(CONFIGS / "fig1e_resonator.json"),
                       "--length-um", "8504.9221", "--mode", "half",
                       "--model", "ibc", "--temp-k", "1:6:3",
                       "--figures", "--out", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "temp_sweep.csv").exists()
        assert (tmp_path / "temp_sweep.dat").exists()
        assert (tmp_path / "temp_sweep.png").exists()


class TestErrorHandling:
    def test_missing_file_exit_1(self, tmp_path):
        rc = cli.main(["conductivity", "--material", "nope.json",
                       "--out", str(tmp_path)])
        assert rc == 1
        err = json.loads((tmp_path / "error.json").read_text())
        assert err["exit_code"] == 1

    def test_bad_grid_exit_1(self, tmp_path):
        rc = cli.main(["conductivity",
                       "--material", str(CONFIGS / "two_qubit_film.json"),
                       "--freq-ghz", "8:4:9", "--out", str(tmp_path)])
        assert rc == 1

    def test_model_error_exit_3(self, tmp_path):
        # junction fit with a positive anharmonicity target is unphysical
        rc = cli.main(["fit-junction", "--target-freq-ghz", "5.0",
                       "--target-alpha-mhz", "300.0",
                       "--out", str(tmp_path)])
        assert rc == 3
        err = json.loads((tmp_path / "error.json").read_text())
        assert err["error"] == "InvalidRegime"


class TestRunConfig:
    def test_config_dispatch(self, tmp_path):
        cfg = {"command": "conductivity",
               "material": str(CONFIGS / "two_qubit_film.json"),
               "freq_ghz": "5:7:3", "temp_k": "0.01",
               "out": str(tmp_path / "job")}
        cfg_path = tmp_path / "job.json"
        cfg_path.write_text(json.dumps(cfg))
        rc = cli.main(["run", "--config", str(cfg_path)])
        assert rc == 0
        assert (tmp_path / "job" / "conductivity.csv").exists()


class TestDeterminism:
    def test_repeated_runs_and_worker_counts(self, tmp_path):
        outs = []
        for tag, workers in (("a", "1"), ("b", "1"), ("c", "4")):
            out = tmp_path / tag
            rc = cli.main(["temp-sweep",
                           "--geometry",
                           str(CONFIGS / "fig1e_resonator.json"),
                           "--length-um", "8504.9221",
                           "--model", "ibc", "--temp-k", "1:6:4",
                           "--workers", workers, "--out", str(out)])
            assert rc == 0
            outs.append((out / "temp_sweep.csv").read_bytes())
        assert outs[0] == outs[1] == outs[2]


@pytest.mark.slow
class TestQuantizeCommand:
    def test_device_report_with_measurement(self, tmp_path):
        rc = cli.main(["quantize",
                       "--netlist", str(CONFIGS / "two_qubit_device.json"),
                       "--measurement",
                       str(CONFIGS / "two_qubit_measurement.json"),
                       "--method", "epr", "--model", "ibc",
                       "--out", str(tmp_path)])
        assert rc == 0
        doc = json.loads((tmp_path / "report.json").read_text())
        assert {p["junction"] for p in doc["pairs"]} == {"j1", "j2"}
        header = (tmp_path / "report.csv").read_text().splitlines()[0]
        assert header == "parameter,units,predicted,measured,rel_error_percent"
        assert "inputs_sha256" in doc

    def test_report_bundle_renders_figures(self, tmp_path):
        rc = cli.main(["report",
                       "--netlist", str(CONFIGS / "two_qubit_device.json"),
                       "--measurement",
                       str(CONFIGS / "two_qubit_measurement.json"),
                       "--band-ghz", "6:7", "--points", "241",
                       "--out", str(tmp_path)])
        assert rc == 0
        for f in ("zs.png", "spectrum.png", "spectrum_pec.csv",
                  "spectrum_ibc.csv", "spectrum_ibc.dat",
                  "report_pec.json", "report_ibc.json", "report_ibc.csv",
                  "manifest.json"):
            assert (tmp_path / f).exists(), f
