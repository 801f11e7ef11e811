"""File formats: JSON configs in boundary units, CSV tables, manifests.

Boundary units follow the config conventions (GHz, K, nm, um, fF, nH,
meV); everything becomes SI the moment it is loaded.  CSV cells are
written with a fixed 12-significant-digit format so that repeated runs
produce byte-identical bodies.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math

from scipy.constants import e as E_CHARGE

from . import network, quantize, tline
from .errors import ConfigError
from .materials import SuperconductorSpec

GHZ = 2.0 * math.pi * 1e9
CONDUCTIVITY_HEADER = ("omega_GHz", "T_K", "sigma1", "sigma2",
                       "Rs_ohm_per_sq", "Xs_ohm_per_sq")


def _num(d, key, scale=1.0, optional=False):
    if key not in d:
        if optional:
            return None
        raise ConfigError(f"missing required key {key!r}")
    v = d[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigError(f"key {key!r} must be a number, got {v!r}")
    return float(v) * scale


def material_from_dict(d):
    """SuperconductorSpec from the material JSON schema.

    Keys: tc_K, lambda_L_nm, xi_nm, sigma_n_S_per_m, and optionally
    delta0_meV, mean_free_path_nm, thickness_nm.
    """
    return SuperconductorSpec.create(
        T_c=_num(d, "tc_K"),
        lambda_L=_num(d, "lambda_L_nm", 1e-9),
        xi=_num(d, "xi_nm", 1e-9),
        sigma_n=_num(d, "sigma_n_S_per_m"),
        Delta0=_num(d, "delta0_meV", 1e-3 * E_CHARGE, optional=True),
        mean_free_path=_num(d, "mean_free_path_nm", 1e-9, optional=True),
        thickness=_num(d, "thickness_nm", 1e-9, optional=True),
    )


def material_to_dict(spec):
    d = {
        "tc_K": spec.T_c,
        "delta0_meV": spec.Delta0 / (1e-3 * E_CHARGE),
        "lambda_L_nm": spec.lambda_L * 1e9,
        "xi_nm": spec.xi * 1e9,
        "sigma_n_S_per_m": spec.sigma_n,
        "mean_free_path_nm": spec.mean_free_path * 1e9,
    }
    if spec.thickness is not None:
        d["thickness_nm"] = spec.thickness * 1e9
    return d


def load_material(path):
    with open(path) as f:
        return material_from_dict(json.load(f))


def geometry_from_dict(d, materials):
    mat = d.get("material")
    if mat not in materials:
        raise ConfigError(f"geometry references unknown material {mat!r}")
    return tline.CpwGeometry(
        center_width=_num(d, "center_width_um", 1e-6),
        gap=_num(d, "gap_um", 1e-6),
        film=materials[mat],
        substrate_eps_r=_num(d, "substrate_eps_r"),
        substrate_thickness=_num(d, "substrate_thickness_um", 1e-6,
                                 optional=True) or 500e-6,
    )


def load_geometry(path):
    """Standalone geometry file: {"material": {...}, "geometry": {...}}."""
    with open(path) as f:
        d = json.load(f)
    if "material" not in d or "geometry" not in d:
        raise ConfigError("geometry file needs 'material' and 'geometry'")
    film = material_from_dict(d["material"])
    return geometry_from_dict(dict(d["geometry"], material="film"),
                              {"film": film})


def _element_from_dict(d):
    kind = d.get("type")
    nodes = d.get("nodes")
    if not (isinstance(nodes, list) and len(nodes) == 2):
        raise ConfigError(f"element {d} needs a two-entry 'nodes' list")
    nodes = tuple(nodes)
    name = d.get("name", "")
    if kind == "capacitor" or kind == "coupling_capacitor":
        return network.Capacitor(nodes=nodes, C=_num(d, "C_fF", 1e-15),
                                 name=name,
                                 coupling=kind == "coupling_capacitor")
    if kind == "inductor":
        return network.Inductor(nodes=nodes, L=_num(d, "L_nH", 1e-9),
                                name=name,
                                kinetic=bool(d.get("kinetic", False)))
    if kind == "junction":
        ref = d.get("junction")
        if not ref:
            raise ConfigError("junction element needs a 'junction' ref")
        return network.JunctionElement(nodes=nodes, junction=ref, name=name)
    if kind == "tline":
        return network.TLineSegment(
            nodes=nodes, geometry=d.get("geometry", ""),
            length=_num(d, "length_um", 1e-6),
            mode=d.get("mode", "through"), name=name)
    if kind == "port":
        return network.Port(nodes=nodes,
                            z0=_num(d, "z0_ohm", optional=True) or 50.0,
                            name=name)
    raise ConfigError(f"unknown element type {kind!r}")


def netlist_from_dict(d):
    materials = {k: material_from_dict(v)
                 for k, v in d.get("materials", {}).items()}
    geometries = {k: geometry_from_dict(v, materials)
                  for k, v in d.get("geometries", {}).items()}
    junctions = {
        k: quantize.JunctionSpec(L_J=_num(v, "L_J_nH", 1e-9),
                                 C_J=_num(v, "C_J_fF", 1e-15))
        for k, v in d.get("junctions", {}).items()
    }
    elements = tuple(_element_from_dict(e) for e in d.get("elements", []))
    if not elements:
        raise ConfigError("netlist has no elements")
    return network.Netlist(elements=elements, geometries=geometries,
                           junctions=junctions, name=d.get("name", ""))


def load_netlist(path):
    with open(path) as f:
        return netlist_from_dict(json.load(f))


def load_measurement(path):
    """Measured device parameters keyed by junction name.

    Schema: {"pairs": [{"qubit": "j1", "resonator": "R1",
    "omega_Q_GHz": ..., "alpha_MHz": ..., "omega_R_GHz": ...,
    "chi_MHz": ...}, ...]} (all value keys optional per pair).
    """
    with open(path) as f:
        d = json.load(f)
    out = {}
    for row in d.get("pairs", []):
        if "qubit" not in row:
            raise ConfigError("measurement pair missing 'qubit'")
        out[row["qubit"]] = row
    return out


# --- writers ---

def _fmt(x):
    return format(float(x), ".12g")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else _fmt(c) for c in row])


def write_plot_data(path, xs, ys):
    """Two-column whitespace-separated data file (gnuplot-compatible)."""
    with open(path, "w") as f:
        for x, y in zip(xs, ys):
            f.write(f"{_fmt(x)} {_fmt(y)}\n")


def write_conductivity_csv(path, rows):
    """rows: (omega, T, sigma1, sigma2, Rs, Xs) in SI; omega converted."""
    write_csv(path, CONDUCTIVITY_HEADER,
              [(w / GHZ, T, s1, s2, rs, xs) for w, T, s1, s2, rs, xs in rows])


def device_report_to_dict(report, inputs_sha256=None):
    d = {
        "method": report.method,
        "model": report.model,
        "modes_GHz": [w / GHZ for w in report.mode_set.modes],
        "junctions": list(report.mode_set.junction_names),
        "phi_zpf": report.mode_set.phi_zpf.tolist(),
        "pairs": [
            {
                "junction": p.junction,
                "omega_Q_GHz": p.omega_q / GHZ,
                "alpha_MHz": p.alpha_q / (2 * math.pi * 1e6),
                "omega_R_GHz": p.omega_r / GHZ,
                "chi_MHz": p.chi_qr / (2 * math.pi * 1e6),
                "dispersive_shift_MHz":
                    p.dispersive_shift / (2 * math.pi * 1e6),
            }
            for p in report.pairs
        ],
    }
    if inputs_sha256:
        d["inputs_sha256"] = inputs_sha256
    return d


def write_device_report_csv(path, report, measurement=None):
    """Table-style CSV; adds measured and relative-error columns when a
    measurement dict (from load_measurement) is supplied."""
    header = ["parameter", "units", "predicted"]
    if measurement is not None:
        header += ["measured", "rel_error_percent"]
    rows = []

    def row(label, units, value, measured):
        r = [label, units, value]
        if measurement is not None:
            if measured is None:
                r += ["", ""]
            else:
                r += [measured, abs(value / measured - 1.0) * 100.0]
        rows.append(r)

    for p in report.pairs:
        m = (measurement or {}).get(p.junction, {})
        row(f"{p.junction} qubit frequency", "GHz", p.omega_q / GHZ,
            m.get("omega_Q_GHz"))
        row(f"{p.junction} qubit anharmonicity", "MHz",
            p.alpha_q / (2 * math.pi * 1e6), m.get("alpha_MHz"))
        row(f"{p.junction} resonator frequency", "GHz", p.omega_r / GHZ,
            m.get("omega_R_GHz"))
        row(f"{p.junction} dispersive shift", "MHz",
            p.chi_qr / (2 * math.pi * 1e6), m.get("chi_MHz"))
    write_csv(path, header, rows)


def sha256_of(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def combined_hash(hashes):
    h = hashlib.sha256()
    for k in sorted(hashes):
        h.update(k.encode())
        h.update(hashes[k].encode())
    return h.hexdigest()


def write_manifest(path, command, input_paths, wall_time_s, version):
    hashes = {str(p): sha256_of(p) for p in input_paths}
    manifest = {
        "tool": "kinq",
        "version": version,
        "command": command,
        "inputs": hashes,
        "inputs_sha256": combined_hash(hashes),
        "wall_time_s": wall_time_s,
    }
    with open(path, "w") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    return manifest


def write_error_json(path, exc, exit_code):
    with open(path, "w") as f:
        json.dump({"error": type(exc).__name__, "message": str(exc),
                   "exit_code": exit_code}, f, indent=2)
        f.write("\n")
