"""Command-line front end.

Subcommands: conductivity, zs, resonator, temp-sweep, spectrum, quantize,
fit-junction, report, and run (same jobs driven by a JSON config).  Every
run writes its artifacts plus a manifest.json (input hashes, tool version,
wall time) into --out; failures leave a machine-readable error.json.

Exit codes: 1 config error, 2 numerical non-convergence, 3 model error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, io, materials, network, pipeline, plots, tline
from .errors import ConfigError, KinqError, ModelError, NumericalError
from .fock import fit_junction_to_measurement

GHZ = 2.0 * math.pi * 1e9


def _parse_grid(text, what):
    """'4:8:21' -> linspace, '7.0' -> single-point grid."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
            if not (hi > lo and n >= 2):
                raise ValueError
            return np.linspace(lo, hi, n)
    except ValueError:
        pass
    raise ConfigError(f"bad {what} grid {text!r}; use VALUE or LO:HI:N")


def _parse_band(text):
    try:
        lo, hi = (float(x) for x in text.split(":"))
        if 0 < lo < hi:
            return lo * GHZ, hi * GHZ
    except ValueError:
        pass
    raise ConfigError(f"bad band {text!r}; use LO:HI in GHz")


def _require(path, what):
    if path is None:
        raise ConfigError(f"missing required --{what}")
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"{what} file {path!r} does not exist")
    return p


def _outdir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _conductivity_rows(spec, f_grid_ghz, t_grid, lossless=None):
    rows = []
    for f in f_grid_ghz:
        w = f * GHZ
        for T in t_grid:
            c = materials.complex_conductivity(spec, w, T)
            zs = materials.surface_impedance(spec, w, T, lossless=lossless)
            rows.append((w, T, c.sigma1, c.sigma2, zs.Rs, zs.Xs))
    return rows


def cmd_conductivity(args):
    spec = io.load_material(_require(args.material, "material"))
    f_grid = _parse_grid(args.freq_ghz, "frequency")
    t_grid = _parse_grid(args.temp_k, "temperature")
    out = _outdir(args)
    name = "conductivity.csv" if args.command == "conductivity" else "zs.csv"
    io.write_conductivity_csv(out / name,
                              _conductivity_rows(spec, f_grid, t_grid))
    return [args.material]


def cmd_resonator(args):
    geom = io.load_geometry(_require(args.geometry, "geometry"))
    w = tline.resonator_frequency(geom, args.length_um * 1e-6, args.mode,
                                  args.temp_k, args.model)
    out = _outdir(args)
    result = {"frequency_GHz": w / GHZ, "mode": args.mode,
              "model": args.model, "temperature_K": args.temp_k,
              "length_um": args.length_um}
    (out / "resonator.json").write_text(json.dumps(result, indent=2) + "\n")
    print(f"{args.model} {args.mode}-wave resonance: {w / GHZ:.6f} GHz")
    return [args.geometry]


def cmd_temp_sweep(args):
    geom = io.load_geometry(_require(args.geometry, "geometry"))
    t_grid = _parse_grid(args.temp_k, "temperature")
    points = tline.temperature_sweep(geom, args.length_um * 1e-6, args.mode,
                                     t_grid, args.model,
                                     workers=args.workers)
    out = _outdir(args)
    io.write_csv(out / "temp_sweep.csv",
                 ("T_K", "T_over_Tc", "f_GHz", "shift_MHz"),
                 [(p.T, p.T_over_Tc, p.frequency / GHZ,
                   p.shift / (2 * math.pi * 1e6)) for p in points])
    io.write_plot_data(out / "temp_sweep.dat",
                       [p.T_over_Tc for p in points],
                       [p.shift / (2 * math.pi * 1e6) for p in points])
    if args.figures:
        f0 = points[0].frequency - points[0].shift
        plots.plot_temperature_sweep(out / "temp_sweep.png", points, f0)
    return [args.geometry]


def cmd_spectrum(args):
    net = io.load_netlist(_require(args.netlist, "netlist"))
    f_grid = _parse_grid(args.freq_ghz, "frequency")
    if len(f_grid) < 2:
        raise ConfigError("spectrum needs a LO:HI:N frequency grid")
    omegas = f_grid * GHZ
    resp = network.transmission_spectrum(net, omegas, args.temp_k,
                                         args.model, workers=args.workers)
    out = _outdir(args)
    io.write_csv(out / "spectrum.csv",
                 ("f_GHz", "S21_re", "S21_im", "S21_abs"),
                 [(w / GHZ, s.real, s.imag, abs(s))
                  for w, s in zip(resp.omegas, resp.s21)])
    io.write_plot_data(out / "spectrum.dat",
                       [w / GHZ for w in resp.omegas],
                       [20 * math.log10(max(abs(s), 1e-12))
                        for s in resp.s21])
    if args.figures:
        plots.plot_transmission(out / "spectrum.png", {args.model: resp})
    return [args.netlist]


def cmd_quantize(args):
    net = io.load_netlist(_require(args.netlist, "netlist"))
    measurement = None
    inputs = [args.netlist]
    if args.measurement:
        measurement = io.load_measurement(_require(args.measurement,
                                                   "measurement"))
        inputs.append(args.measurement)
    report = pipeline.quantize_device(
        net, method=args.method, model=args.model, T=args.temp_k,
        band=_parse_band(args.band_ghz), expansion_order=args.order)
    out = _outdir(args)
    hashes = {str(p): io.sha256_of(p) for p in inputs}
    doc = io.device_report_to_dict(report, io.combined_hash(hashes))
    (out / "report.json").write_text(json.dumps(doc, indent=2) + "\n")
    io.write_device_report_csv(out / "report.csv", report, measurement)
    for p in report.pairs:
        print(f"{p.junction}: omega_Q/2pi = {p.omega_q / GHZ:.4f} GHz, "
              f"alpha/2pi = {p.alpha_q / (2 * math.pi * 1e6):.1f} MHz, "
              f"omega_R/2pi = {p.omega_r / GHZ:.4f} GHz, "
              f"chi/2pi = {p.chi_qr / (2 * math.pi * 1e6):.3f} MHz")
    return inputs


def cmd_fit_junction(args):
    j = fit_junction_to_measurement(
        args.target_freq_ghz * GHZ,
        args.target_alpha_mhz * 2 * math.pi * 1e6,
        coupling_capacitance=args.context_ff * 1e-15)
    out = _outdir(args)
    doc = {"L_J_nH": j.L_J * 1e9, "C_J_fF": j.C_J * 1e15,
           "E_J_GHz": j.E_J / (6.62607015e-34 * 1e9)}
    (out / "junction.json").write_text(json.dumps(doc, indent=2) + "\n")
    print(f"L_J = {j.L_J * 1e9:.4f} nH, C_J = {j.C_J * 1e15:.3f} fF")
    return []


def cmd_report(args):
    """Full bundle: surface impedance, spectra, quantization, figures."""
    net = io.load_netlist(_require(args.netlist, "netlist"))
    inputs = [args.netlist]
    measurement = None
    if args.measurement:
        measurement = io.load_measurement(_require(args.measurement,
                                                   "measurement"))
        inputs.append(args.measurement)
    out = _outdir(args)
    band = _parse_band(args.band_ghz)
    f_grid = np.linspace(band[0], band[1], args.points)

    # film response tables and figures
    film_curves = {}
    for mname, spec in sorted(_netlist_materials(net).items()):
        rows = _conductivity_rows(spec, f_grid / GHZ, [args.temp_k])
        io.write_conductivity_csv(out / f"zs_{mname}.csv", rows)
        film_curves[mname] = [r[5] for r in rows]
        sigma_grid = np.logspace(math.log10(spec.sigma_n) - 2,
                                 math.log10(spec.sigma_n) + 2, 17)
        sweep = materials.impedance_vs_purity(
            spec, math.sqrt(band[0] * band[1]), args.temp_k, sigma_grid)
        good = [(p.sigma_n, p.Xs) for p in sweep if p.Xs is not None]
        io.write_csv(out / f"purity_{mname}.csv",
                     ("sigma_n_S_per_m", "Xs_ohm_per_sq"), good)
        plots.plot_purity_sweep(out / f"purity_{mname}.png",
                                [g[0] for g in good], [g[1] for g in good])
    if film_curves:
        plots.plot_surface_reactance(out / "zs.png", f_grid, film_curves)

    # driven spectra under both conductor models
    responses = {}
    for model in (tline.PEC, tline.IBC):
        responses[model] = network.transmission_spectrum(
            net, f_grid, args.temp_k, model, workers=args.workers)
        io.write_csv(out / f"spectrum_{model}.csv",
                     ("f_GHz", "S21_re", "S21_im", "S21_abs"),
                     [(w / GHZ, s.real, s.imag, abs(s))
                      for w, s in zip(f_grid, responses[model].s21)])
        io.write_plot_data(out / f"spectrum_{model}.dat",
                           [w / GHZ for w in f_grid],
                           [20 * math.log10(max(abs(s), 1e-12))
                            for s in responses[model].s21])
    plots.plot_transmission(out / "spectrum.png", responses)

    # quantization under both models (its own band: the spectrum window
    # usually excludes the qubit modes)
    qband = _parse_band(args.quantize_band_ghz)
    for model in (tline.PEC, tline.IBC):
        report = pipeline.quantize_device(net, method=args.method,
                                          model=model, T=args.temp_k,
                                          band=qband,
                                          expansion_order=args.order)
        hashes = {str(p): io.sha256_of(p) for p in inputs}
        doc = io.device_report_to_dict(report, io.combined_hash(hashes))
        (out / f"report_{model}.json").write_text(
            json.dumps(doc, indent=2) + "\n")
        io.write_device_report_csv(out / f"report_{model}.csv", report,
                                   measurement)
    return inputs


def _netlist_materials(net):
    mats = {}
    for gname, geom in net.geometries.items():
        mats.setdefault(gname, geom.film)
    return mats


def _add_common(p):
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--temp-k", type=float, default=0.010,
                   help="operating temperature (K)")
    p.add_argument("--workers", type=int, default=None,
                   help="worker threads for sweeps")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="kinq",
        description="superconducting-circuit response and Hamiltonian "
                    "prediction with film kinetic inductance")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    for name, helptext in (("conductivity", "complex conductivity table"),
                           ("zs", "surface impedance table")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--material", required=True)
        p.add_argument("--freq-ghz", default="4:8:41")
        p.add_argument("--temp-k", default="0.01", dest="temp_k")
        p.add_argument("--out", default="out")
        p.add_argument("--workers", type=int, default=None)
        p.set_defaults(func=cmd_conductivity)

    p = sub.add_parser("resonator", help="single resonator frequency")
    p.add_argument("--geometry", required=True)
    p.add_argument("--length-um", type=float, required=True)
    p.add_argument("--mode", choices=("half", "quarter"), default="half")
    p.add_argument("--model", choices=(tline.PEC, tline.IBC),
                   default=tline.IBC)
    _add_common(p)
    p.set_defaults(func=cmd_resonator)

    p = sub.add_parser("temp-sweep", help="resonator frequency vs T")
    p.add_argument("--geometry", required=True)
    p.add_argument("--length-um", type=float, required=True)
    p.add_argument("--mode", choices=("half", "quarter"), default="half")
    p.add_argument("--model", choices=(tline.PEC, tline.IBC),
                   default=tline.IBC)
    p.add_argument("--temp-k", default="0.1:6.5:14", dest="temp_k")
    p.add_argument("--figures", action="store_true")
    p.add_argument("--out", default="out")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_temp_sweep)

    p = sub.add_parser("spectrum", help="feedline transmission S21")
    p.add_argument("--netlist", required=True)
    p.add_argument("--freq-ghz", default="4:8:2001")
    p.add_argument("--model", choices=(tline.PEC, tline.IBC),
                   default=tline.IBC)
    p.add_argument("--figures", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("quantize", help="device Hamiltonian report")
    p.add_argument("--netlist", required=True)
    p.add_argument("--measurement")
    p.add_argument("--method", choices=("epr", "bbq"), default="epr")
    p.add_argument("--model", choices=(tline.PEC, tline.IBC),
                   default=tline.IBC)
    p.add_argument("--band-ghz", default="3:9")
    p.add_argument("--order", type=int, default=6,
                   help="cosine expansion order (even)")
    _add_common(p)
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("fit-junction", help="junction from measured targets")
    p.add_argument("--target-freq-ghz", type=float, required=True)
    p.add_argument("--target-alpha-mhz", type=float, required=True)
    p.add_argument("--context-ff", type=float, default=0.0,
                   help="coupling capacitance the junction sees in situ")
    _add_common(p)
    p.set_defaults(func=cmd_fit_junction)

    p = sub.add_parser("report", help="full bundle with figures")
    p.add_argument("--netlist", required=True)
    p.add_argument("--measurement")
    p.add_argument("--method", choices=("epr", "bbq"), default="epr")
    p.add_argument("--band-ghz", default="4:8",
                   help="spectrum and impedance plotting window")
    p.add_argument("--quantize-band-ghz", default="3:9",
                   help="mode-search window for the Hamiltonian report")
    p.add_argument("--points", type=int, default=1201)
    p.add_argument("--order", type=int, default=6)
    _add_common(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("run", help="run a job described by a JSON config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=None)
    return ap


def _run_config(path):
    with open(path) as f:
        cfg = json.load(f)
    command = cfg.pop("command", None)
    if not command:
        raise ConfigError("config needs a 'command' key")
    argv = [command]
    for key, value in cfg.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        else:
            argv += [flag, str(value)]
    return argv


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        try:
            args = parser.parse_args(argv)
            if args.command == "run":
                args = parser.parse_args(_run_config(
                    _require(args.config, "config")))
        except SystemExit as exc:  # argparse usage errors are config errors
            if exc.code in (0, None):
                return 0
            raise ConfigError("invalid command line (see usage)") from exc
        t0 = time.perf_counter()
        inputs = args.func(args)
        out = _outdir(args)
        io.write_manifest(out / "manifest.json", args.command, inputs,
                          time.perf_counter() - t0, __version__)
        return 0
    except ConfigError as exc:
        _report_error(argv, exc, 1)
        return 1
    except NumericalError as exc:
        _report_error(argv, exc, 2)
        return 2
    except ModelError as exc:
        _report_error(argv, exc, 3)
        return 3
    except KinqError as exc:
        _report_error(argv, exc, 3)
        return 3


def _report_error(argv, exc, code):
    print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
    out = None
    for i, a in enumerate(argv):
        if a == "--out" and i + 1 < len(argv):
            out = Path(argv[i + 1])
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        io.write_error_json(out / "error.json", exc, code)


if __name__ == "__main__":
    sys.exit(main())
