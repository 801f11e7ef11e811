import json

import numpy as np
import pytest
from scipy.constants import e as qe

from kinq import io
from kinq.errors import ConfigError


class TestMaterialSchema:
    def test_round_trip(self, tmp_path):
        doc = {"tc_K": 9.2, "delta0_meV": 1.395, "lambda_L_nm": 33.3,
               "xi_nm": 39.0, "sigma_n_S_per_m": 5.5e7,
               "thickness_nm": 100.0}
        path = tmp_path / "mat.json"
        path.write_text(json.dumps(doc))
        spec = io.load_material(path)
        assert abs(spec.Delta0 / (1.395e-3 * qe) - 1.0) < 1e-12
        assert abs(spec.thickness / 100e-9 - 1.0) < 1e-15
        back = io.material_to_dict(spec)
        for key, val in doc.items():
            assert abs(back[key] / val - 1.0) < 1e-12

    def test_optional_keys(self):
        spec = io.material_from_dict({
            "tc_K": 7.47, "lambda_L_nm": 33.3, "xi_nm": 39.0,
            "sigma_n_S_per_m": 1.15e7})
        assert spec.thickness is None
        assert spec.Delta0 > 0  # defaulted from the gap ratio

    def test_missing_key(self):
        with pytest.raises(ConfigError):
            io.material_from_dict({"tc_K": 9.2})

    def test_non_numeric_value(self):
        with pytest.raises(ConfigError):
            io.material_from_dict({
                "tc_K": "hot", "lambda_L_nm": 33.3, "xi_nm": 39.0,
                "sigma_n_S_per_m": 5.5e7})


class TestNetlistSchema:
    def test_device_file_loads(self, configs_dir):
        net = io.load_netlist(configs_dir / "two_qubit_device.json")
        assert net.name == "two_qubit_device"
        assert len(net.ports) == 2
        assert {el.junction for el in net.junction_elements} == {"j1", "j2"}
        assert net.geometries["cpw"].center_width == 8e-6

    def test_unknown_element_type(self):
        with pytest.raises(ConfigError):
            io.netlist_from_dict({"elements": [
                {"type": "memristor", "nodes": ["a", "gnd"]}]})

    def test_geometry_needs_material(self):
        with pytest.raises(ConfigError):
            io.netlist_from_dict({
                "geometries": {"g": {"center_width_um": 10.0, "gap_um": 6.0,
                                     "material": "missing",
                                     "substrate_eps_r": 11.45}},
                "elements": [{"type": "capacitor", "nodes": ["a", "gnd"],
                              "C_fF": 1.0}]})

    def test_measurement_loads(self, configs_dir):
        m = io.load_measurement(configs_dir / "two_qubit_measurement.json")
        assert m["j1"]["omega_R_GHz"] == 6.6571
        assert m["j2"]["chi_MHz"] == -3.7


class TestWriters:
    def test_conductivity_header(self, tmp_path):
        path = tmp_path / "t.csv"
        io.write_conductivity_csv(path, [(2 * np.pi * 7e9, 0.01, 0.0,
                                          1e9, 0.0, 0.02)])
        lines = path.read_text().splitlines()
        assert lines[0] == ("omega_GHz,T_K,sigma1,sigma2,"
                            "Rs_ohm_per_sq,Xs_ohm_per_sq")
        assert lines[1].startswith("7,0.01,0,1000000000,0,0.02")

    def test_plot_data_two_columns(self, tmp_path):
        path = tmp_path / "d.dat"
        io.write_plot_data(path, [1.0, 2.0], [3.5, -1.25])
        assert path.read_text() == "1 3.5\n2 -1.25\n"

    def test_manifest_hashes(self, tmp_path):
        f = tmp_path / "input.json"
        f.write_text("{}")
        man = io.write_manifest(tmp_path / "manifest.json", "zs", [f],
                                0.5, "0.1.0")
        assert man["inputs"][str(f)] == io.sha256_of(f)
        assert man["inputs_sha256"] == io.combined_hash(man["inputs"])
