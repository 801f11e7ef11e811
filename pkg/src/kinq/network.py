"""Netlist model and frequency-domain network analysis.

Lumped elements and CPW segments assemble into a complex nodal admittance
matrix at each frequency; segments enter as exact transmission-line
two-ports.  From that single kernel come the junction-port impedance
matrix (quantization input), port S-parameters (driven spectra), and the
discretized LC ladder used by the eigenmode quantization route.

A node named ``gnd`` (or ``0``) is the reference.  A tiny series
resistance on every inductive branch regularizes the solves near poles;
it is small enough (1 uOhm) that passivity checks hold to 1e-6.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import tline
from .errors import InvalidRegime, SingularNetwork
from .tline import IBC

GROUND_NAMES = ("gnd", "0")
R_REG = 1e-6  # series loss regularization on inductive branches (ohm)
TLINE_LOSS = 1e-12  # attenuation-to-phase ratio for segments


def _is_ground(node):
    return node in GROUND_NAMES


@dataclass(frozen=True)
class Capacitor:
    nodes: tuple[str, str]
    C: float
    name: str = ""
    coupling: bool = False  # semantic tag only; same stamp as a capacitor


@dataclass(frozen=True)
class Inductor:
    nodes: tuple[str, str]
    L: float
    name: str = ""
    kinetic: bool = False  # counts as supercurrent energy in EPR totals


@dataclass(frozen=True)
class JunctionElement:
    """Josephson junction placeholder; linearizes to L_J parallel C_J."""

    nodes: tuple[str, str]
    junction: str  # key into Netlist.junctions
    name: str = ""


@dataclass(frozen=True)
class TLineSegment:
    """CPW segment.

    mode 'through' is a two-port between its nodes; 'half' and 'quarter'
    are one-port stubs at nodes[0] with the far end open or shorted
    respectively (a 'through' segment whose second node is ground is
    equivalent to 'quarter').
    """

    nodes: tuple[str, str]
    geometry: str  # key into Netlist.geometries
    length: float
    mode: str = "through"
    name: str = ""


@dataclass(frozen=True)
class Port:
    nodes: tuple[str, str]
    z0: float = 50.0
    name: str = ""


@dataclass(frozen=True)
class Netlist:
    """Immutable circuit description.

    ``junctions`` maps junction names to objects with L_J and C_J
    attributes; ``geometries`` maps geometry names to CpwGeometry.
    """

    elements: tuple
    geometries: dict = field(default_factory=dict)
    junctions: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        self.validate()

    @property
    def nodes(self):
        seen = []
        for el in self.elements:
            for n in el.nodes:
                if not _is_ground(n) and n not in seen:
                    seen.append(n)
        return tuple(seen)

    @property
    def ports(self):
        return tuple(el for el in self.elements if isinstance(el, Port))

    @property
    def junction_elements(self):
        return tuple(el for el in self.elements
                     if isinstance(el, JunctionElement))

    def validate(self):
        has_ground = False
        for el in self.elements:
            if len(el.nodes) != 2 or el.nodes[0] == el.nodes[1]:
                raise InvalidRegime(f"element {el} needs two distinct nodes")
            has_ground = has_ground or any(_is_ground(n) for n in el.nodes)
            if isinstance(el, JunctionElement) and el.junction not in self.junctions:
                raise InvalidRegime(f"unknown junction ref {el.junction!r}")
            if isinstance(el, TLineSegment):
                if el.geometry not in self.geometries:
                    raise InvalidRegime(f"unknown geometry ref {el.geometry!r}")
                if el.mode not in ("through", "half", "quarter"):
                    raise InvalidRegime(f"unknown segment mode {el.mode!r}")
                if not el.length > 0:
                    raise InvalidRegime("segment length must be positive")
        if not has_ground:
            raise InvalidRegime("netlist never references the ground node")
        self._check_connected()

    def _check_connected(self):
        # union-find over element node pairs; everything must reach ground
        parent = {}

        def find(x):
            parent.setdefault(x, x)
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a, b):
            parent[find(a)] = find(b)

        for el in self.elements:
            a, b = el.nodes
            a = "gnd" if _is_ground(a) else a
            b = "gnd" if _is_ground(b) else b
            union(a, b)
        root = find("gnd")
        floating = [n for n in self.nodes if find(n) != root]
        if floating:
            raise SingularNetwork(f"floating subgraph: nodes {floating}")

    def without_junctions(self):
        """Copy with every junction element removed (punch-out model)."""
        kept = tuple(el for el in self.elements
                     if not isinstance(el, JunctionElement))
        return replace(self, elements=kept)


def _node_index(netlist):
    return {n: i for i, n in enumerate(netlist.nodes)}


def _segment_gamma_z0(netlist, seg, omega, T, model):
    geom = netlist.geometries[seg.geometry]
    lp = tline.cpw_line_params(geom, omega, T, model)
    beta = omega * math.sqrt(lp.L_total * lp.C)
    gamma = complex(TLINE_LOSS * beta, beta)
    return gamma, lp.Z0


def admittance_matrix(netlist, omega, T=0.0, model=IBC,
                      include_junctions=True, extra_shunts=()):
    """Complex nodal admittance matrix over the non-ground nodes.

    ``extra_shunts`` is a sequence of (node, admittance) pairs, used by
    the S-parameter path to terminate ports.
    """
    idx = _node_index(netlist)
    n = len(idx)
    Y = np.zeros((n, n), dtype=complex)

    def stamp2(a, b, y):
        ia = None if _is_ground(a) else idx[a]
        ib = None if _is_ground(b) else idx[b]
        if ia is not None:
            Y[ia, ia] += y
        if ib is not None:
            Y[ib, ib] += y
        if ia is not None and ib is not None:
            Y[ia, ib] -= y
            Y[ib, ia] -= y

    def stamp1(a, y):
        if not _is_ground(a):
            Y[idx[a], idx[a]] += y

    for el in netlist.elements:
        a, b = el.nodes
        if isinstance(el, Capacitor):
            stamp2(a, b, 1j * omega * el.C)
        elif isinstance(el, Inductor):
            stamp2(a, b, 1.0 / (R_REG + 1j * omega * el.L))
        elif isinstance(el, JunctionElement):
            if include_junctions:
                j = netlist.junctions[el.junction]
                stamp2(a, b, 1.0 / (R_REG + 1j * omega * j.L_J)
                       + 1j * omega * j.C_J)
        elif isinstance(el, TLineSegment):
            gamma, z0 = _segment_gamma_z0(netlist, el, omega, T, model)
            gl = gamma * el.length
            if el.mode == "through":
                y_self = 1.0 / (z0 * np.tanh(gl))
                y_mutual = -1.0 / (z0 * np.sinh(gl))
                ia = None if _is_ground(a) else idx[a]
                ib = None if _is_ground(b) else idx[b]
                if ia is not None:
                    Y[ia, ia] += y_self
                if ib is not None:
                    Y[ib, ib] += y_self
                if ia is not None and ib is not None:
                    Y[ia, ib] += y_mutual
                    Y[ib, ia] += y_mutual
            elif el.mode == "quarter":   # far end shorted
                stamp1(a, 1.0 / (z0 * np.tanh(gl)))
            else:                        # 'half': far end open
                stamp1(a, np.tanh(gl) / z0)
        elif isinstance(el, Port):
            pass  # ports stamp nothing unless terminated via extra_shunts
        else:
            raise InvalidRegime(f"unknown element type {type(el).__name__}")

    for node, y in extra_shunts:
        stamp1(node, y)
    return Y


def _solve(Y, rhs):
    try:
        sol = np.linalg.solve(Y, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularNetwork(f"admittance matrix singular: {exc}") from exc
    if not np.all(np.isfinite(sol)):
        raise SingularNetwork("admittance solve returned non-finite voltages")
    return sol


def _pair_rhs(netlist, pairs):
    idx = _node_index(netlist)
    rhs = np.zeros((len(idx), len(pairs)), dtype=complex)
    for k, (a, b) in enumerate(pairs):
        if not _is_ground(a):
            rhs[idx[a], k] += 1.0
        if not _is_ground(b):
            rhs[idx[b], k] -= 1.0
    return rhs


def junction_port_impedance_at(netlist, omega, T=0.0, model=IBC):
    """M x M impedance matrix seen at the junction ports at one omega.

    Junction linear parts stay inside the network; feedline ports are left
    open (the Hamiltonian extraction treats the circuit as closed).
    """
    jels = netlist.junction_elements
    if not jels:
        raise InvalidRegime("netlist has no junction elements")
    Y = admittance_matrix(netlist, omega, T, model)
    rhs = _pair_rhs(netlist, [el.nodes for el in jels])
    V = _solve(Y, rhs)
    return rhs.T @ V


def junction_impedance_function(netlist, T=0.0, model=IBC):
    """(names, z) where z(omega) -> per-junction diagonal impedances."""
    names = tuple(el.junction for el in netlist.junction_elements)

    def z(omega):
        return np.diag(junction_port_impedance_at(netlist, omega, T, model))

    return names, z


def port_impedance(netlist, omega_grid, T=0.0, model=IBC):
    """Junction-port impedance tables Z_jj'(omega) over a grid.

    Returns (junction_names, array of shape (n_freq, M, M)).
    """
    names = tuple(el.junction for el in netlist.junction_elements)
    out = np.empty((len(omega_grid), len(names), len(names)), dtype=complex)
    for i, w in enumerate(omega_grid):
        out[i] = junction_port_impedance_at(netlist, w, T, model)
    return names, out


@dataclass(frozen=True)
class TwoPortResponse:
    """Driven transmission over a frequency grid."""

    omegas: np.ndarray
    s21: np.ndarray
    s11: np.ndarray | None = None


def s_matrix_at(netlist, omega, T=0.0, model=IBC, ports=None):
    """Scattering matrix of the netlist's ports at one omega."""
    ports = netlist.ports if ports is None else ports
    if len(ports) < 1:
        raise InvalidRegime("driven analysis needs at least one port")
    Y = admittance_matrix(netlist, omega, T, model)
    rhs = _pair_rhs(netlist, [p.nodes for p in ports])
    V = _solve(Y, rhs)
    Zp = rhs.T @ V                      # open-circuit port impedance matrix
    Z0 = np.diag([p.z0 for p in ports])
    return np.linalg.solve((Zp + Z0).T, (Zp - Z0).T).T  # (Zp-Z0)(Zp+Z0)^-1


def transmission_spectrum(netlist, omega_grid, T=0.0, model=IBC,
                          in_port=0, out_port=1, workers=None):
    """S21 (and S11) between two ports across a frequency grid."""
    ports = netlist.ports
    if len(ports) < 2:
        raise InvalidRegime("transmission needs two ports")
    pair = (ports[in_port], ports[out_port])

    def point(w):
        S = s_matrix_at(netlist, w, T, model, ports=pair)
        return S[1, 0], S[0, 0]

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vals = list(pool.map(point, omega_grid))
    else:
        vals = [point(w) for w in omega_grid]
    s21 = np.array([v[0] for v in vals])
    s11 = np.array([v[1] for v in vals])
    return TwoPortResponse(omegas=np.asarray(omega_grid, dtype=float),
                           s21=s21, s11=s11)


def _refine_minimum(fn, x0, step, rounds=8, width=4):
    """Shrinking-grid minimum refinement with a final parabolic polish."""
    xs = ys = None
    i = 0
    for _ in range(rounds):
        xs = np.linspace(x0 - width * step, x0 + width * step, 2 * width + 1)
        ys = np.array([fn(x) for x in xs])
        i = int(np.argmin(ys))
        x0 = xs[i]
        step = step / width
    depth = ys[i]
    if 0 < i < len(xs) - 1:
        y0, y1, y2 = ys[i - 1], ys[i], ys[i + 1]
        denom = y0 - 2 * y1 + y2
        if denom > 0:
            x0 += 0.5 * (xs[1] - xs[0]) * (y0 - y2) / denom
    return x0, depth


def dip_frequencies(netlist, band, T=0.0, model=IBC, n_scan=2001,
                    min_depth=0.5, prominence=1e-6, workers=None):
    """Notch-dip frequencies of |S21| inside (omega_lo, omega_hi).

    Scans the band; local minima that stand out from their neighbors by
    more than ``prominence`` (relative to the scan maximum) are refined on
    shrinking grids, and those whose refined depth falls below
    ``min_depth`` times the scan maximum are returned.  The scan step must
    be finer than the dip linewidths or narrow dips escape detection.
    """
    lo, hi = band
    grid = np.linspace(lo, hi, n_scan)
    resp = transmission_spectrum(netlist, grid, T, model, workers=workers)
    mag = np.abs(resp.s21)
    ref = np.max(mag)
    step = grid[1] - grid[0]

    def s21_mag(w):
        S = s_matrix_at(netlist, w, T, model,
                        ports=(netlist.ports[0], netlist.ports[1]))
        return abs(S[1, 0])

    found = []
    for i in range(1, n_scan - 1):
        is_min = mag[i] <= mag[i - 1] and mag[i] < mag[i + 1]
        stands_out = (mag[i - 1] - mag[i]) + (mag[i + 1] - mag[i]) > prominence * ref
        if is_min and stands_out:
            w_min, depth = _refine_minimum(s21_mag, grid[i], step)
            if depth < min_depth * ref and lo <= w_min <= hi:
                found.append(w_min)
    return found


def bare_resonator_frequencies(netlist, band, T=0.0, model=IBC, n_scan=2001,
                               workers=None):
    """Resonator dips with every junction element removed (punch-out)."""
    return dip_frequencies(netlist.without_junctions(), band, T, model,
                           n_scan, workers=workers)


# --- discretized lumped model for the eigenmode (EPR) route ---

@dataclass(frozen=True)
class InductiveBranch:
    """One inductive branch of the discretized network."""

    node_a: int          # index into the lumped node list, -1 for ground
    node_b: int
    L: float
    junction: str | None = None
    kinetic_fraction: float = 0.0


@dataclass(frozen=True)
class LumpedModel:
    """C and inverse-inductance matrices plus the branch registry."""

    node_names: tuple
    C: np.ndarray
    Gamma: np.ndarray
    branches: tuple


def lumped_model(netlist, omega_eval, T=0.0, model=IBC,
                 cells_per_segment=40):
    """LC discretization of the netlist at an evaluation frequency.

    Each transmission-line segment becomes ``cells_per_segment`` series
    inductors (geometric plus kinetic at omega_eval) with the shunt
    capacitance split across the cell boundaries.  Junctions contribute
    their linear L_J parallel C_J.  Ports are left open.
    """
    if cells_per_segment < 2:
        raise InvalidRegime("need at least 2 cells per segment")
    names = list(netlist.nodes)
    cap_entries = []     # (ia, ib, C)
    branches = []

    def node_id(n):
        if _is_ground(n):
            return -1
        return names.index(n)

    def new_node(base):
        names.append(base)
        return len(names) - 1

    for k, el in enumerate(netlist.elements):
        a, b = el.nodes
        if isinstance(el, Capacitor):
            cap_entries.append((node_id(a), node_id(b), el.C))
        elif isinstance(el, Inductor):
            branches.append(InductiveBranch(
                node_id(a), node_id(b), el.L,
                kinetic_fraction=1.0 if el.kinetic else 0.0))
        elif isinstance(el, JunctionElement):
            j = netlist.junctions[el.junction]
            branches.append(InductiveBranch(node_id(a), node_id(b), j.L_J,
                                            junction=el.junction))
            cap_entries.append((node_id(a), node_id(b), j.C_J))
        elif isinstance(el, TLineSegment):
            geom = netlist.geometries[el.geometry]
            lp = tline.cpw_line_params(geom, omega_eval, T, model)
            n_cells = cells_per_segment
            dx = el.length / n_cells
            kin_frac = lp.L_kin / lp.L_total if lp.L_total > 0 else 0.0
            # far-end boundary per segment mode
            if el.mode == "through":
                end = node_id(b)
            elif el.mode == "quarter":
                end = -1
            else:  # 'half' stub: open far end
                end = new_node(f"__{el.name or f'seg{k}'}_end")
            chain = [node_id(a)]
            for i in range(n_cells - 1):
                chain.append(new_node(f"__{el.name or f'seg{k}'}_{i}"))
            chain.append(end)
            for i in range(n_cells):
                branches.append(InductiveBranch(
                    chain[i], chain[i + 1], lp.L_total * dx,
                    kinetic_fraction=kin_frac))
            # shunt capacitance: half-cells at the chain ends
            cap_entries.append((chain[0], -1, 0.5 * lp.C * dx))
            for node in chain[1:-1]:
                cap_entries.append((node, -1, lp.C * dx))
            cap_entries.append((chain[-1], -1, 0.5 * lp.C * dx))
        elif isinstance(el, Port):
            pass
        else:
            raise InvalidRegime(f"unknown element type {type(el).__name__}")

    n = len(names)
    C = np.zeros((n, n))
    Gamma = np.zeros((n, n))

    def stamp(Mt, ia, ib, v):
        if ia >= 0:
            Mt[ia, ia] += v
        if ib >= 0:
            Mt[ib, ib] += v
        if ia >= 0 and ib >= 0:
            Mt[ia, ib] -= v
            Mt[ib, ia] -= v

    for ia, ib, c in cap_entries:
        stamp(C, ia, ib, c)
    for br in branches:
        stamp(Gamma, br.node_a, br.node_b, 1.0 / br.L)

    # tiny capacitive ridge keeps the mass matrix positive definite when a
    # node carries no capacitance (e.g. the middle of split inductors)
    ridge = 1e-12 * max(C.max(), 1e-30)
    C[np.diag_indices(n)] += ridge
    return LumpedModel(node_names=tuple(names), C=C, Gamma=Gamma,
                       branches=tuple(branches))
