"""Coplanar-waveguide line parameters and distributed resonators.

Quasi-static conformal-mapping results for the zero-thickness CPW
(capacitance and geometric inductance per unit length) plus the
current-crowding geometry factors that convert a film's sheet inductance
into kinetic inductance per unit length (Gao thesis, ch. 3; Barends
thesis).  Resonator frequencies solve the self-consistent phase condition
with the kinetic inductance re-evaluated at the trial frequency.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

from scipy.constants import epsilon_0, mu_0

from . import materials
from .errors import InvalidRegime, NoSignChange
from .numerics import elliptic_K, find_root_bracketed

PEC = "pec"
IBC = "ibc"


@dataclass(frozen=True)
class CpwGeometry:
    """CPW cross-section on a thick substrate.

    center_width and gap in meters; ``film`` is the superconductor the
    line is patterned from (its thickness feeds the geometry factors).
    substrate_thickness is carried for bookkeeping; the line parameters
    use the thick-substrate approximation eps_eff = (eps_r + 1) / 2.
    """

    center_width: float
    gap: float
    film: materials.SuperconductorSpec
    substrate_eps_r: float
    substrate_thickness: float = 500e-6

    def __post_init__(self):
        if not (self.center_width > 0 and self.gap > 0):
            raise InvalidRegime("center_width and gap must be positive")
        if not self.substrate_eps_r >= 1:
            raise InvalidRegime("substrate_eps_r must be >= 1")

    @property
    def k(self):
        """Conformal-mapping modulus w / (w + 2s)."""
        return self.center_width / (self.center_width + 2.0 * self.gap)

    @property
    def eps_eff(self):
        return 0.5 * (self.substrate_eps_r + 1.0)


@dataclass(frozen=True)
class LineParams:
    """Per-unit-length parameters of one CPW at one (omega, T)."""

    L_geo: float
    C: float
    L_kin: float
    omega_eval: float

    @property
    def L_total(self):
        return self.L_geo + self.L_kin

    @property
    def Z0(self):
        return math.sqrt(self.L_total / self.C)

    @property
    def phase_velocity(self):
        return 1.0 / math.sqrt(self.L_total * self.C)


def geometry_factor(geom):
    """Dimensionless-per-length kinetic-inductance weight g (1/m).

    Sum of the center-strip and ground-plane current-crowding factors for
    a CPW of film thickness t; multiply by the sheet inductance X_s/omega
    to get henries per meter.  Requires a film thickness.
    """
    t = geom.film.thickness
    if t is None:
        raise InvalidRegime("geometry factor needs the film thickness")
    w, s, k = geom.center_width, geom.gap, geom.k
    Kk = elliptic_K(k)
    denom = 4.0 * w * (1.0 - k * k) * Kk * Kk
    log_ratio = math.log((1.0 + k) / (1.0 - k))
    g_center = (math.pi + math.log(4.0 * math.pi * w / t)
                - k * log_ratio) / denom
    g_ground = k * (math.pi + math.log(4.0 * math.pi * (w + 2.0 * s) / t)
                    - log_ratio / k) / denom
    return g_center + g_ground


@lru_cache(maxsize=200_000)
def _sheet_inductance(film, omega, T):
    return materials.surface_impedance_film(film, omega, T).sheet_inductance


def cpw_line_params(geom, omega, T, model=IBC, g_factor=None):
    """Line parameters at one (omega, T).

    C = 4 eps0 eps_eff K(k)/K(k'), L_geo = (mu0/4) K(k')/K(k) with
    k = w/(w+2s).  Under the IBC model L_kin = (X_s/omega) * g with the
    conformal-mapping geometry factor (overridable via ``g_factor``, e.g.
    to calibrate against a field solver); under PEC, L_kin = 0.
    """
    if not omega > 0:
        raise InvalidRegime("omega must be positive")
    k = geom.k
    kp = math.sqrt(1.0 - k * k)
    Kk, Kkp = elliptic_K(k), elliptic_K(kp)
    C = 4.0 * epsilon_0 * geom.eps_eff * Kk / Kkp
    L_geo = 0.25 * mu_0 * Kkp / Kk
    if model == PEC:
        L_kin = 0.0
    elif model == IBC:
        g = geometry_factor(geom) if g_factor is None else g_factor
        L_kin = _sheet_inductance(geom.film, omega, T) * g
    else:
        raise InvalidRegime(f"unknown conductor model {model!r}")
    return LineParams(L_geo=L_geo, C=C, L_kin=L_kin, omega_eval=float(omega))


_MODE_FACTOR = {"half": 1.0, "quarter": 0.5}


def resonator_frequency(geom, length, mode="half", T=0.0, model=IBC,
                        g_factor=None):
    """Self-consistent resonance omega = m*pi*v_p(omega)/length (rad/s).

    m = 1 for a half-wave resonator, 1/2 for a quarter-wave one.  The
    phase velocity carries L_kin(omega, T), so the IBC frequency comes
    from a bracketed root find seeded at the PEC value.
    """
    if not length > 0:
        raise InvalidRegime("length must be positive")
    try:
        m = _MODE_FACTOR[mode]
    except KeyError:
        raise InvalidRegime(f"unknown resonator mode {mode!r}") from None
    pec = cpw_line_params(geom, 1.0, T, model=PEC)
    omega_pec = m * math.pi * pec.phase_velocity / length
    if model == PEC:
        return omega_pec

    def mismatch(w):
        vp = cpw_line_params(geom, w, T, model, g_factor).phase_velocity
        return w - m * math.pi * vp / length

    hi = omega_pec * (1.0 + 1e-12)
    lo = 0.5 * omega_pec
    for _ in range(8):
        if mismatch(lo) < 0:
            break
        lo *= 0.5
    else:
        raise NoSignChange(
            "resonance bracket failed; kinetic inductance unphysically large?")
    return find_root_bracketed(mismatch, lo, hi, tol=1e-13)


@dataclass(frozen=True)
class TemperaturePoint:
    """One row of a resonator temperature sweep."""

    T: float
    T_over_Tc: float
    frequency: float       # rad/s
    shift: float           # rad/s, relative to the T -> 0 value


def temperature_sweep(geom, length, mode, T_grid, model=IBC, g_factor=None,
                      workers=None):
    """Resonator frequency shift versus temperature.

    The shift is quoted relative to the zero-temperature frequency of the
    same model.  Grid points evaluate independently (optionally across a
    worker pool); the output keeps the input order.
    """
    Tc = geom.film.T_c
    for T in T_grid:
        if not 0 < T < Tc:
            raise InvalidRegime(f"T = {T} K outside (0, T_c)")
    f0 = resonator_frequency(geom, length, mode, 0.0, model, g_factor)

    def point(T):
        w = resonator_frequency(geom, length, mode, T, model, g_factor)
        return TemperaturePoint(T=float(T), T_over_Tc=float(T) / Tc,
                                frequency=w, shift=w - f0)

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(point, T_grid))
    return [point(T) for T in T_grid]
