"""Truncated Fock-space diagonalization and the normal-mode report.

Builds the multi-mode number-basis matrix of the assembled Hamiltonian,
diagonalizes it, labels the low-lying eigenstates by their dominant bare
occupation, and reads off renormalized frequencies, self-Kerr
(anharmonicity) and cross-Kerr (dispersive) shifts from labeled state
energies:

    omega_n = E(1_n) - E(0)
    alpha_n = E(2_n) - 2 E(1_n) + E(0)
    chi_mn  = E(1_m 1_n) - E(1_m) - E(1_n) + E(0)

The dispersive shift between a qubit mode and a resonator mode,
(omega_|11> - omega_|10>) - (omega_|01> - omega_|00>), is the same energy
combination and is reported per (qubit, resonator) pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.optimize
from scipy.constants import hbar

from .errors import (
    DimensionOverflow,
    InvalidRegime,
    LabelingAmbiguous,
    NoConvergence,
)
from .numerics import eigh
from .quantize import JunctionSpec, ModeSet, assemble_hamiltonian

MATRIX_DIM_CAP = 4096
OVERLAP_THRESHOLD = 0.5


@dataclass(frozen=True)
class FockBasis:
    """Mixed-radix index map for a multi-mode Fock space."""

    mode_dims: tuple

    def __post_init__(self):
        if any(d < 3 for d in self.mode_dims):
            raise InvalidRegime("need at least 3 levels per mode")

    @property
    def total_dim(self):
        return int(np.prod(self.mode_dims))

    def flat_index(self, occupation):
        return int(np.ravel_multi_index(tuple(occupation), self.mode_dims))

    def occupation(self, flat):
        return tuple(int(x) for x in np.unravel_index(flat, self.mode_dims))


def _lifted_quadrature(basis, mode):
    """a + a^dag of one mode, embedded in the full space (real symmetric)."""
    dims = basis.mode_dims
    x = np.zeros((dims[mode], dims[mode]))
    for n in range(dims[mode] - 1):
        x[n, n + 1] = x[n + 1, n] = math.sqrt(n + 1)
    op = np.array([[1.0]])
    for m, d in enumerate(dims):
        op = np.kron(op, x if m == mode else np.eye(d))
    return op


def build_matrix(h, basis=None, dim_cap=MATRIX_DIM_CAP):
    """Dense real-symmetric matrix of the Hamiltonian in the number basis.

    Linear part: sum_n omega_n * n_n (zero-point offsets dropped; every
    reported quantity is an energy difference).  Nonlinear part: the even
    powers of each junction phase up to the expansion order.
    """
    if basis is None:
        basis = FockBasis(mode_dims=h.truncation)
    if basis.total_dim > dim_cap:
        raise DimensionOverflow(
            f"Fock dimension {basis.total_dim} exceeds cap {dim_cap}")
    dims = basis.mode_dims
    n_modes = len(dims)
    if n_modes != len(h.mode_set.modes):
        raise InvalidRegime("basis does not match the mode set")

    H = np.zeros((basis.total_dim, basis.total_dim))
    occ = np.array([basis.occupation(i) for i in range(basis.total_dim)])
    H[np.diag_indices_from(H)] = occ @ np.asarray(h.mode_set.modes)

    quad = [_lifted_quadrature(basis, m) for m in range(n_modes)]
    for jdx, ej in enumerate(h.ej_rad):
        phi = sum(h.mode_set.phi_zpf[jdx, m] * quad[m]
                  for m in range(n_modes))
        if np.all(phi == 0.0):
            continue
        phi2 = phi @ phi
        power = phi2
        for k in range(2, h.expansion_order // 2 + 1):
            power = power @ phi2  # phi^(2k)
            H -= ej * (-1.0) ** k / math.factorial(2 * k) * power
    return 0.5 * (H + H.T)


def _label_states(eig, basis, targets):
    """Map each target occupation to its eigenstate by maximum overlap."""
    weights = np.abs(eig.eigenvectors) ** 2
    assignment = {}
    used = {}
    for occ in targets:
        row = basis.flat_index(occ)
        col = int(np.argmax(weights[row]))
        w = weights[row, col]
        if w <= OVERLAP_THRESHOLD:
            runner = int(np.argsort(weights[row])[-2])
            raise LabelingAmbiguous(
                f"state {occ}: best overlap {w:.3f} <= {OVERLAP_THRESHOLD} "
                f"(candidates: eigenstate {col} at {w:.3f}, eigenstate "
                f"{runner} at {weights[row, runner]:.3f}); "
                "modes too hybridized for bare labels")
        if col in used:
            raise LabelingAmbiguous(
                f"states {used[col]} and {occ} both map to eigenstate {col}")
        used[col] = occ
        assignment[occ] = eig.eigenvalues[col]
    return assignment


@dataclass(frozen=True)
class NormalModeReport:
    """Normal-mode quantities (rad/s) plus per-pair dispersive shifts."""

    omega_tilde: tuple
    alpha: tuple
    chi: np.ndarray
    dispersive_shifts: tuple  # ((qubit_mode, resonator_mode, value), ...)

    def chi_between(self, m, n):
        return self.chi[m, n]


def extract_report(eig, basis, h, qubit_modes=None):
    """NormalModeReport from a diagonalized Hamiltonian.

    ``qubit_modes`` marks which modes carry a junction (defaults to the
    mode of largest phi_zpf per junction); every (qubit, other) pair gets
    a dispersive-shift entry.
    """
    n_modes = len(basis.mode_dims)
    targets = [tuple([0] * n_modes)]
    for m in range(n_modes):
        for occ_m in (1, 2):
            t = [0] * n_modes
            t[m] = occ_m
            targets.append(tuple(t))
    for m, n in combinations(range(n_modes), 2):
        t = [0] * n_modes
        t[m] = t[n] = 1
        targets.append(tuple(t))

    energy = _label_states(eig, basis, targets)

    def single(m, occ=1):
        t = [0] * n_modes
        t[m] = occ
        return energy[tuple(t)]

    e0 = energy[tuple([0] * n_modes)]
    omega_tilde = tuple(single(m) - e0 for m in range(n_modes))
    alpha = tuple(single(m, 2) - 2 * single(m) + e0 for m in range(n_modes))
    chi = np.zeros((n_modes, n_modes))
    for m, n in combinations(range(n_modes), 2):
        t = [0] * n_modes
        t[m] = t[n] = 1
        chi[m, n] = chi[n, m] = (energy[tuple(t)] - single(m)
                                 - single(n) + e0)

    if qubit_modes is None:
        phi = h.mode_set.phi_zpf
        qubit_modes = sorted({int(np.argmax(phi[j]))
                              for j in range(phi.shape[0])})
    shifts = tuple((q, r, chi[q, r]) for q in qubit_modes
                   for r in range(n_modes) if r not in qubit_modes)
    return NormalModeReport(omega_tilde=omega_tilde, alpha=alpha, chi=chi,
                            dispersive_shifts=shifts)


def diagonalize(h, dims=None, dim_cap=MATRIX_DIM_CAP, qubit_modes=None):
    """Convenience: build, diagonalize, and extract in one step."""
    basis = FockBasis(mode_dims=tuple(dims) if dims else h.truncation)
    eig = eigh(build_matrix(h, basis, dim_cap))
    return extract_report(eig, basis, h, qubit_modes)


def converge_truncation(h, start_dims=None, tol=2 * math.pi * 10e3,
                        dim_cap=MATRIX_DIM_CAP, max_rounds=12,
                        qubit_modes=None):
    """Grow per-mode dimensions until the report stops moving.

    Stops when omega_tilde, alpha, and chi each change by less than
    ``tol`` (rad/s; default 10 kHz in ordinary frequency) between
    successive sizes.  Returns (dims, report).
    """
    dims = tuple(start_dims) if start_dims else h.truncation
    report = diagonalize(h, dims, dim_cap, qubit_modes)
    for _ in range(max_rounds):
        bigger = tuple(d + 3 for d in dims)
        nxt = diagonalize(h, bigger, dim_cap, qubit_modes)
        delta = max(
            max(abs(a - b) for a, b in zip(nxt.omega_tilde, report.omega_tilde)),
            max(abs(a - b) for a, b in zip(nxt.alpha, report.alpha)),
            float(np.max(np.abs(nxt.chi - report.chi))),
        )
        if delta < tol:
            return bigger, nxt
        dims, report = bigger, nxt
    raise NoConvergence(
        f"report still moving by {delta:.3e} rad/s after {max_rounds} "
        "truncation increases")


def single_transmon_report(L_J, C_total, expansion_order=6, start_dim=12,
                           tol=2 * math.pi * 1e3):
    """(omega_01, alpha) of one junction shunted by C_total, converged."""
    j = JunctionSpec(L_J=L_J, C_J=C_total)
    omega_lin = 1.0 / math.sqrt(L_J * C_total)
    phi2 = hbar * omega_lin / (2.0 * j.E_J)
    ms = ModeSet(modes=(omega_lin,), phi_zpf=np.array([[math.sqrt(phi2)]]),
                 junction_names=("j",))
    h = assemble_hamiltonian(ms, (j,), expansion_order, start_dim)
    _, report = converge_truncation(h, tol=tol)
    return report.omega_tilde[0], report.alpha[0]


def fit_junction_to_measurement(omega_q, alpha, coupling_capacitance=0.0,
                                expansion_order=6, rtol=1e-6):
    """JunctionSpec whose single-transmon pipeline hits (omega_q, alpha).

    Two-parameter root solve in (L_J, C_total); both targets in rad/s with
    alpha < 0.  ``coupling_capacitance`` is the extra shunt the junction
    sees in its device context; it is subtracted from the fitted total so
    the returned C_J plus the context reproduces the targets in situ.
    """
    if not (alpha < 0 and abs(alpha) < 0.25 * omega_q):
        raise InvalidRegime(
            "targets must satisfy alpha < 0 and |alpha| << omega_q")
    # transmon estimates seed the solve: E_C ~ -alpha, omega ~ sqrt(8EJEC)-EC
    ec0 = -alpha
    ej0 = (omega_q + ec0) ** 2 / (8.0 * ec0)
    from scipy.constants import e as qe
    c0 = qe**2 / (2.0 * ec0 * hbar)
    l0 = (hbar / (2.0 * qe)) ** 2 / (ej0 * hbar)

    def residual(x):
        lj, ct = math.exp(x[0]), math.exp(x[1])
        w, a = single_transmon_report(lj, ct, expansion_order)
        return [w / omega_q - 1.0, a / alpha - 1.0]

    sol = scipy.optimize.root(residual, [math.log(l0), math.log(c0)],
                              method="hybr", tol=1e-12)
    res = residual(sol.x)
    if not sol.success or max(abs(r) for r in res) > rtol:
        raise NoConvergence(
            f"junction fit residual {res} (solver: {sol.message})")
    lj, ct = math.exp(sol.x[0]), math.exp(sol.x[1])
    if ct <= coupling_capacitance:
        raise InvalidRegime(
            "coupling context exceeds the fitted total capacitance")
    return JunctionSpec(L_J=lj, C_J=ct - coupling_capacitance)
