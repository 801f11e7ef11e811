"""From linear circuit analysis to quantization inputs and the Hamiltonian.

Two routes produce the same ModeSet (mode frequencies plus zero-point
phase fluctuations per junction):

* impedance route: mode frequencies are the zeros of Im[1/Z_jj(omega)]
  (poles of the junction-port impedance); each mode's effective impedance
  follows from the slope, Z_eff = 2 / (omega_n * d Im[Y_jj]/d omega), and
  phi_zpf^2 = (2 e^2 / hbar) * Z_eff;
* eigenmode route: the discretized netlist's normal modes give each
  junction's share of the inductive energy, p_jn, and
  phi_zpf^2 = p_jn * hbar * omega_n / (2 E_J).  Kinetic-inductance cells
  count toward the mode's total inductive energy.

The assembled Hamiltonian is
H = sum_n omega_n a_n^dag a_n - sum_j sum_k E_j (-1)^k / (2k)! phi_j^{2k}
with phi_j = sum_n phi_zpf(j,n) (a_n^dag + a_n), truncated at the chosen
expansion order (units of rad/s throughout, hbar = 1).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.constants import e as E_CHARGE, hbar

from . import network
from .errors import (
    DegenerateModes,
    InvalidRegime,
    NegativeEffectiveImpedance,
    NoConvergence,
    PoleNotBracketed,
    TruncationTooSmall,
)
from .numerics import find_root_bracketed
from .tline import IBC

# phi_zpf^2 of a resonant mode with effective impedance Z: (2 e^2/hbar) Z
PHI2_PER_OHM = 2.0 * E_CHARGE**2 / hbar
REDUCED_FLUX_QUANTUM = hbar / (2.0 * E_CHARGE)


@dataclass(frozen=True)
class JunctionSpec:
    """Josephson junction linearized as L_J parallel C_J."""

    L_J: float
    C_J: float

    def __post_init__(self):
        if not (self.L_J > 0 and self.C_J > 0):
            raise InvalidRegime("L_J and C_J must be positive")

    @property
    def E_J(self):
        """Josephson energy (hbar/2e)^2 / L_J in joules."""
        return REDUCED_FLUX_QUANTUM**2 / self.L_J

    @property
    def plasma_omega(self):
        return 1.0 / math.sqrt(self.L_J * self.C_J)


@dataclass(frozen=True)
class ModeSet:
    """Linear mode frequencies and zero-point phase fluctuations.

    ``phi_zpf[j, n]`` is the (non-negative) fluctuation of junction j in
    mode n; relative signs are irrelevant for the even-order expansion.
    """

    modes: tuple          # omega_n in rad/s, ascending
    phi_zpf: np.ndarray   # shape (n_junctions, n_modes)
    junction_names: tuple

    def __post_init__(self):
        phi = np.asarray(self.phi_zpf, dtype=float)
        object.__setattr__(self, "phi_zpf", phi)
        if phi.shape != (len(self.junction_names), len(self.modes)):
            raise InvalidRegime(
                f"phi_zpf shape {phi.shape} does not match "
                f"{len(self.junction_names)} junctions x {len(self.modes)} modes")
        if any(w <= 0 for w in self.modes):
            raise InvalidRegime("mode frequencies must be positive")
        if list(self.modes) != sorted(self.modes):
            raise InvalidRegime("mode frequencies must be ascending")
        if np.any(phi < 0):
            raise InvalidRegime("phi_zpf entries must be non-negative")

    def subset(self, mode_indices):
        """ModeSet restricted to a subset of modes (order preserved)."""
        idx = list(mode_indices)
        return ModeSet(modes=tuple(self.modes[i] for i in idx),
                       phi_zpf=self.phi_zpf[:, idx],
                       junction_names=self.junction_names)

    def to_json(self):
        return json.dumps({
            "modes_GHz": [w / (2 * math.pi * 1e9) for w in self.modes],
            "phi_zpf": self.phi_zpf.tolist(),  # row-major, one row per junction
            "junctions": list(self.junction_names),
        }, indent=2)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        modes = tuple(2 * math.pi * 1e9 * f for f in d["modes_GHz"])
        return cls(modes=modes, phi_zpf=np.asarray(d["phi_zpf"], dtype=float),
                   junction_names=tuple(d["junctions"]))


@dataclass(frozen=True)
class HamiltonianSpec:
    """Numeric recipe for the truncated-cosine Hamiltonian."""

    mode_set: ModeSet
    junctions: tuple          # JunctionSpec per junction, same order
    expansion_order: int = 4  # highest power of phi kept (even)
    truncation: tuple = ()    # Fock levels per mode

    def __post_init__(self):
        if self.expansion_order % 2 or self.expansion_order < 2:
            raise InvalidRegime("expansion_order must be even and >= 2")
        if len(self.junctions) != len(self.mode_set.junction_names):
            raise InvalidRegime("junction list does not match the mode set")
        if self.truncation and any(t < 3 for t in self.truncation):
            raise InvalidRegime("truncation must be >= 3 levels per mode")

    @property
    def ej_rad(self):
        """Josephson energies as angular frequencies (rad/s)."""
        return tuple(j.E_J / hbar for j in self.junctions)


def assemble_hamiltonian(mode_set, junctions, expansion_order=4,
                         truncation=None):
    """Bundle a ModeSet and junctions into a HamiltonianSpec.

    ``truncation`` may be an int (applied to every mode) or a per-mode
    sequence; it must leave room for the expansion order (a phi^{2k} term
    reaches 2k levels above the ground state).
    """
    n_modes = len(mode_set.modes)
    if truncation is None:
        truncation = (10,) * n_modes
    elif isinstance(truncation, int):
        truncation = (truncation,) * n_modes
    else:
        truncation = tuple(truncation)
    if len(truncation) != n_modes:
        raise InvalidRegime("need one truncation per mode")
    if expansion_order >= 2 and min(truncation) <= expansion_order // 2:
        raise TruncationTooSmall(
            f"truncation {truncation} cannot host phi^{expansion_order} "
            "matrix elements")
    junctions = tuple(junctions)
    return HamiltonianSpec(mode_set=mode_set, junctions=junctions,
                           expansion_order=expansion_order,
                           truncation=truncation)


# --- impedance (driven) route ---

def _im_admittance(z):
    return np.imag(1.0 / z)


def bbq_extract(z_of_omega, junction_names, band, n_scan=4001,
                cluster_rtol=1e-6):
    """ModeSet from the junction-port impedance response.

    ``z_of_omega`` maps omega to the array of per-junction diagonal
    impedances Z_jj (use network.junction_impedance_function for netlists,
    or table_to_function for sampled data).  The scan must be dense enough
    to bracket every upward zero crossing of Im[Y_jj]; modes seen from
    several junctions are merged when they agree to ``cluster_rtol``.
    """
    lo, hi = band
    if not 0 < lo < hi:
        raise InvalidRegime("need 0 < band[0] < band[1]")
    junction_names = tuple(junction_names)
    M = len(junction_names)
    grid = np.linspace(lo, hi, n_scan)
    imy = np.empty((n_scan, M))
    for i, w in enumerate(grid):
        z = np.asarray(z_of_omega(w))
        if z.shape != (M,):
            raise InvalidRegime(
                f"z_of_omega returned shape {z.shape}, expected ({M},)")
        imy[i] = _im_admittance(z)

    # per-junction upward crossings of Im[Y] (poles of Z, not poles of Y)
    crossings = [[] for _ in range(M)]
    for j in range(M):
        y = imy[:, j]
        for i in range(n_scan - 1):
            if y[i] < 0.0 <= y[i + 1]:
                w_root = find_root_bracketed(
                    lambda w, j=j: _im_admittance(z_of_omega(w)[j]),
                    grid[i], grid[i + 1], tol=1e-14)
                crossings[j].append(w_root)

    merged = sorted(w for per_j in crossings for w in per_j)
    if not merged:
        raise PoleNotBracketed(
            f"no impedance poles found in band "
            f"[{lo / (2 * np.pi * 1e9):.3f}, {hi / (2 * np.pi * 1e9):.3f}] GHz")
    modes = [merged[0]]
    for w in merged[1:]:
        if abs(w - modes[-1]) > cluster_rtol * modes[-1]:
            modes.append(w)

    phi = np.zeros((M, len(modes)))
    for j in range(M):
        for n, w_n in enumerate(modes):
            w_j = [w for w in crossings[j]
                   if abs(w - w_n) <= cluster_rtol * w_n]
            if not w_j:
                continue  # this junction is decoupled from the mode
            phi[j, n] = math.sqrt(
                PHI2_PER_OHM * _effective_impedance(z_of_omega, j, w_j[0]))
    return ModeSet(modes=tuple(modes), phi_zpf=phi,
                   junction_names=junction_names)


def _effective_impedance(z_of_omega, j, w_n):
    """Z_eff = 2 / (omega_n * dIm[Y_jj]/domega) via Richardson-refined
    central differences at 1e-6 relative step."""
    h = 1e-6 * w_n

    def d(hh):
        return (_im_admittance(z_of_omega(w_n + hh)[j])
                - _im_admittance(z_of_omega(w_n - hh)[j])) / (2.0 * hh)

    d1, d2 = d(h), d(0.5 * h)
    slope = (4.0 * d2 - d1) / 3.0
    if slope <= 0:
        raise NegativeEffectiveImpedance(
            f"Im[Y] slope {slope:.3e} at omega = {w_n:.6e} rad/s; "
            "sampling or model error")
    return 2.0 / (w_n * slope)


def table_to_function(omegas, z_table):
    """Cubic-spline wrapper turning sampled Z_jj columns into a callable.

    ``z_table`` has shape (n_freq, M).  The spline runs over the
    admittance 1/Z_jj, which crosses its zeros linearly and stays smooth
    through the impedance poles that make Z itself uninterpolable at any
    realistic sampling; the callable hands back 1/Y.  Prefer a live
    impedance callable when one is available.
    """
    from scipy.interpolate import CubicSpline

    omegas = np.asarray(omegas, dtype=float)
    z_table = np.atleast_2d(np.asarray(z_table))
    if z_table.shape[0] != omegas.shape[0]:
        z_table = z_table.T
    y_table = 1.0 / z_table
    sp_re = CubicSpline(omegas, y_table.real)
    sp_im = CubicSpline(omegas, y_table.imag)

    def z(w):
        return 1.0 / (sp_re(w) + 1j * sp_im(w))

    return z


# --- eigenmode route ---

def epr_extract(netlist, band, T=0.0, model=IBC, cells_per_segment=40,
                degeneracy_rtol=1e-8, max_iter=8):
    """ModeSet from the normal modes of the discretized netlist.

    Solves the generalized eigenproblem Gamma v = omega^2 C v on the
    LC-ladder equivalent.  Under the IBC model the cell inductances depend
    on frequency, so each in-band mode is converged by fixed-point
    iteration on its own evaluation frequency.  Kinetic-inductance energy
    counts in the mode total; junction participation is the junction
    branch's share, and phi_zpf^2 = p * hbar * omega / (2 E_J).
    """
    lo, hi = band
    names = tuple(el.junction for el in netlist.junction_elements)
    if not names:
        raise InvalidRegime("netlist has no junction elements")

    def solve(omega_eval):
        lm = network.lumped_model(netlist, omega_eval, T, model,
                                  cells_per_segment)
        try:
            vals, vecs = scipy.linalg.eigh(lm.Gamma, lm.C)
        except scipy.linalg.LinAlgError as exc:
            raise NoConvergence(f"generalized eigensolve failed: {exc}") from exc
        omegas = np.sqrt(np.clip(vals, 0.0, None))
        return lm, omegas, vecs

    lm0, omegas0, vecs0 = solve(math.sqrt(lo * hi))
    in_band = [i for i, w in enumerate(omegas0) if lo <= w <= hi]
    if not in_band:
        raise InvalidRegime("no eigenmodes inside the requested band")

    mode_freqs, mode_vecs, mode_models = [], [], []
    for i in in_band:
        w, lm, vecs, col = omegas0[i], lm0, vecs0, i
        if model == IBC:
            for _ in range(max_iter):
                lm, omegas, vecs = solve(w)
                col = int(np.argmin(np.abs(omegas - w)))
                w_new = omegas[col]
                if abs(w_new - w) <= 1e-12 * w:
                    w = w_new
                    break
                w = w_new
        mode_freqs.append(w)
        mode_vecs.append(vecs[:, col])
        mode_models.append(lm)

    order = np.argsort(mode_freqs)
    mode_freqs = [mode_freqs[i] for i in order]
    mode_vecs = [mode_vecs[i] for i in order]
    mode_models = [mode_models[i] for i in order]

    for w1, w2 in zip(mode_freqs, mode_freqs[1:]):
        if abs(w2 - w1) < degeneracy_rtol * w1:
            raise DegenerateModes(
                f"modes at {w1:.6e} and {w2:.6e} rad/s are unresolved")

    ej = {name: netlist.junctions[name].E_J for name in names}
    phi = np.zeros((len(names), len(mode_freqs)))
    for n, (w, v, lm) in enumerate(zip(mode_freqs, mode_vecs, mode_models)):
        e_total = 0.0
        e_j = dict.fromkeys(names, 0.0)
        for br in lm.branches:
            va = v[br.node_a] if br.node_a >= 0 else 0.0
            vb = v[br.node_b] if br.node_b >= 0 else 0.0
            e_br = (va - vb) ** 2 / (w * w * br.L)
            e_total += e_br
            if br.junction is not None:
                e_j[br.junction] += e_br
        for jdx, name in enumerate(names):
            p = e_j[name] / e_total
            phi[jdx, n] = math.sqrt(p * hbar * w / (2.0 * ej[name]))
    return ModeSet(modes=tuple(mode_freqs), phi_zpf=phi,
                   junction_names=names)
