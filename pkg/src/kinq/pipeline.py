"""Device-level orchestration: netlist -> modes -> pairwise Hamiltonians.

Each junction is paired with the passive mode it participates in most
strongly (its readout resonator), and every (qubit, resonator) pair is
quantized on its own two-mode Fock space, mirroring how multi-qubit
devices are reported.  Junction parameters can be fitted beforehand from
measured qubit frequency and anharmonicity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock, network, quantize
from .errors import InvalidRegime
from .tline import IBC

GHZ = 2.0 * math.pi * 1e9
DEFAULT_BAND = (2.0 * GHZ, 12.0 * GHZ)


@dataclass(frozen=True)
class PairReport:
    """Quantization results for one (qubit, readout resonator) pair."""

    junction: str
    qubit_mode: int
    resonator_mode: int
    omega_q: float       # rad/s, renormalized
    alpha_q: float
    omega_r: float
    alpha_r: float
    chi_qr: float
    dispersive_shift: float


@dataclass(frozen=True)
class DeviceReport:
    """Mode set plus per-pair reports for one netlist run."""

    method: str
    model: str
    mode_set: quantize.ModeSet
    pairs: tuple


def extract_mode_set(netlist, method="epr", model=IBC, T=0.0,
                     band=DEFAULT_BAND, n_scan=4001, cells_per_segment=40):
    """ModeSet for a netlist via the chosen quantization route."""
    if method == "bbq":
        names, zfn = network.junction_impedance_function(netlist, T, model)
        return quantize.bbq_extract(zfn, names, band, n_scan)
    if method == "epr":
        return quantize.epr_extract(netlist, band, T, model,
                                    cells_per_segment)
    raise InvalidRegime(f"unknown quantization method {method!r}")


def pair_modes(mode_set):
    """((junction_idx, qubit_mode, resonator_mode), ...) by participation.

    A junction's qubit mode carries its largest phi_zpf; its readout
    partner is the strongest remaining mode not claimed as a qubit mode.
    """
    phi = mode_set.phi_zpf
    qubit_modes = {j: int(np.argmax(phi[j])) for j in range(phi.shape[0])}
    claimed = set(qubit_modes.values())
    pairs = []
    for j, q in qubit_modes.items():
        order = np.argsort(phi[j])[::-1]
        partner = next((int(m) for m in order if int(m) not in claimed), None)
        if partner is None:
            raise InvalidRegime(
                f"junction {mode_set.junction_names[j]} has no resonator "
                "partner in the band")
        pairs.append((j, q, partner))
    return tuple(pairs)


def quantize_device(netlist, method="epr", model=IBC, T=0.0,
                    band=DEFAULT_BAND, expansion_order=6,
                    start_dims=(12, 8), tol=2 * math.pi * 10e3,
                    n_scan=4001, cells_per_segment=40):
    """Full quantization of a netlist, pairwise per junction.

    Each pair Hamiltonian keeps that junction's phi_zpf on its two modes
    and is diagonalized with converged truncation.  The default expansion
    order is 6: the positive phi^6 term keeps the truncated potential
    bounded through the convergence sweep, where a bare quartic develops
    runaway high-occupation states at transmon-like E_J/E_C.
    """
    ms = extract_mode_set(netlist, method, model, T, band, n_scan,
                          cells_per_segment)
    reports = []
    for j, q, r in pair_modes(ms):
        sub = quantize.ModeSet(
            modes=tuple(ms.modes[i] for i in sorted((q, r))),
            phi_zpf=ms.phi_zpf[[j]][:, sorted((q, r))],
            junction_names=(ms.junction_names[j],),
        )
        q_loc = 0 if q < r else 1
        r_loc = 1 - q_loc
        dims = [0, 0]
        dims[q_loc], dims[r_loc] = start_dims
        junction = netlist.junctions[ms.junction_names[j]]
        h = quantize.assemble_hamiltonian(sub, (junction,), expansion_order,
                                          tuple(dims))
        _, rep = fock.converge_truncation(h, tol=tol, qubit_modes=[q_loc])
        reports.append(PairReport(
            junction=ms.junction_names[j],
            qubit_mode=q, resonator_mode=r,
            omega_q=rep.omega_tilde[q_loc], alpha_q=rep.alpha[q_loc],
            omega_r=rep.omega_tilde[r_loc], alpha_r=rep.alpha[r_loc],
            chi_qr=rep.chi[q_loc, r_loc],
            dispersive_shift=rep.dispersive_shifts[0][2],
        ))
    return DeviceReport(method=method, model=model, mode_set=ms,
                        pairs=tuple(reports))
