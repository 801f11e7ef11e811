"""Electromagnetic response of superconducting films.

Complex conductivity of an isotropic BCS superconductor at arbitrary
impurity concentration (Zimmermann et al., Physica C 183, 99 (1991)),
and the resulting bulk / thin-film surface impedance and effective
penetration depth (thin-film form after Kerr, MMA memo 245 (1999)).

Conventions
-----------
The conductivity is reported as sigma_s = sigma1 - i*sigma2 with both
components non-negative below T_c (sigma2 is the Cooper-pair, inductive
part).  Surface impedance Z_s = R_s + i*X_s with X_s > 0, so the sheet
kinetic inductance is X_s / omega.  All quantities SI; omega is angular
frequency.

The two integrals run over quasiparticle energy E with inverse-square-root
endpoint behavior from P2 = sqrt(E^2 - Delta^2) and
P4 = i*sqrt(Delta^2 - (E-omega)^2).  They are evaluated after substitutions
that cancel those zeros exactly:

* first integral, lower half  [Delta, Delta + hw/2]:  E = Delta*cosh(u),
  so that P2 = Delta*sinh(u) equals the Jacobian;
* first integral, upper half  [Delta + hw/2, Delta + hw]:
  E = hw + Delta*cos(theta), so that |P4| = Delta*sin(theta) equals the
  Jacobian;
* second integral [Delta, E_max]:  E = Delta*cosh(u) again, with E_max
  chosen from the thermal tail bound Delta + C*kB*T*ln(1/eps) and the
  algebraic ~E^-3 tail of the pair term, then verified by extending E_max
  (doubling check).

A brute-force reference built on a different substitution lives in the
test suite and pins these integrals independently.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import e as E_CHARGE, hbar, k as K_B, mu_0

from .errors import InvalidRegime, QuadratureNotConverged
from .numerics import QuadratureSpec, integrate_adaptive

logger = logging.getLogger(__name__)

# gap ratio Delta0 / (kB * Tc) of a weak-coupling BCS superconductor
WEAK_COUPLING_RATIO = 1.76

# below this temperature the loss part sigma1 is dropped before surface
# impedance use unless the caller says otherwise
LOSSLESS_BELOW_K = 0.100


@dataclass(frozen=True)
class SuperconductorSpec:
    """Material parameter set describing one superconducting film.

    Attributes
    ----------
    T_c : critical temperature (K)
    Delta0 : gap energy at zero temperature (J)
    lambda_L : London penetration depth (m)
    xi : coherence length (m)
    sigma_n : normal-state conductivity (S/m)
    mean_free_path : electron mean free path (m)
    thickness : film thickness (m), None for bulk
    notes : consistency warnings attached at construction
    """

    T_c: float
    Delta0: float
    lambda_L: float
    xi: float
    sigma_n: float
    mean_free_path: float
    thickness: float | None = None
    notes: tuple[str, ...] = ()

    @classmethod
    def create(cls, T_c, lambda_L, xi, sigma_n, Delta0=None,
               mean_free_path=None, thickness=None, consistency_rtol=0.10):
        """Build a validated spec, deriving the optional parameters.

        Missing Delta0 defaults to 1.76*kB*T_c.  Missing mean free path is
        derived from sigma_n as l = pi*mu0*Delta0*lambda_L^2*xi*sigma_n/hbar;
        when both are given they must agree within ``consistency_rtol`` or a
        warning is attached (sigma_n stays authoritative for everything else).
        """
        if Delta0 is None:
            Delta0 = WEAK_COUPLING_RATIO * K_B * T_c
        l_derived = mean_free_path_from_sigma_n(Delta0, lambda_L, xi, sigma_n)
        notes = ()
        if mean_free_path is None:
            mean_free_path = l_derived
        else:
            mismatch = abs(mean_free_path / l_derived - 1.0)
            if mismatch > consistency_rtol:
                msg = (f"mean_free_path {mean_free_path:.3e} m differs from "
                       f"the value {l_derived:.3e} m implied by sigma_n by "
                       f"{100 * mismatch:.1f}%; keeping the explicit value")
                logger.warning(msg)
                notes = (msg,)
        spec = cls(T_c=float(T_c), Delta0=float(Delta0),
                   lambda_L=float(lambda_L), xi=float(xi),
                   sigma_n=float(sigma_n),
                   mean_free_path=float(mean_free_path),
                   thickness=None if thickness is None else float(thickness),
                   notes=notes)
        spec.validate()
        return spec

    def validate(self):
        for name in ("T_c", "Delta0", "lambda_L", "xi", "sigma_n",
                     "mean_free_path"):
            if not getattr(self, name) > 0:
                raise InvalidRegime(f"{name} must be strictly positive")
        if self.thickness is not None and not self.thickness > 0:
            raise InvalidRegime("thickness must be strictly positive")

    def with_sigma_n(self, sigma_n):
        """Copy with a new sigma_n and the mean free path re-derived."""
        l_new = mean_free_path_from_sigma_n(
            self.Delta0, self.lambda_L, self.xi, sigma_n)
        return replace(self, sigma_n=float(sigma_n), mean_free_path=l_new,
                       notes=())


@dataclass(frozen=True)
class GapAtTemperature:
    """Superconducting gap at one temperature."""

    Delta: float
    temperature: float


@dataclass(frozen=True)
class ComplexConductivity:
    """sigma_s = sigma1 - i*sigma2 at one (omega, T) point."""

    sigma1: float
    sigma2: float
    omega: float
    temperature: float

    @property
    def as_complex(self):
        return self.sigma1 - 1j * self.sigma2


@dataclass(frozen=True)
class SurfaceImpedance:
    """Z_s = R_s + i*X_s at one (omega, T) point."""

    Rs: float
    Xs: float
    omega: float
    temperature: float
    regime: str

    @property
    def sheet_inductance(self):
        """Equivalent sheet kinetic inductance X_s / omega (H per square)."""
        return self.Xs / self.omega


def mean_free_path_from_sigma_n(Delta0, lambda_L, xi, sigma_n):
    """l = pi*mu0*Delta0*lambda_L^2*xi*sigma_n / hbar."""
    return math.pi * mu_0 * Delta0 * lambda_L**2 * xi * sigma_n / hbar


def fermi_velocity(spec):
    """v_F = pi*xi*Delta0 / hbar."""
    return math.pi * spec.xi * spec.Delta0 / hbar


def relaxation_time(spec):
    """Electron relaxation time tau = l / v_F."""
    return spec.mean_free_path / fermi_velocity(spec)


def gap_at_temperature(spec, T):
    """BCS gap at temperature T via the standard tanh interpolation.

    Delta(T) = Delta0 * tanh(1.74 * sqrt(T_c/T - 1)) for T < T_c, exact at
    both endpoints and within 2% of the self-consistent gap equation up to
    0.9 T_c (checked against a gap-equation solver in the tests; the
    deviation grows to ~2.5% right below T_c).
    """
    if T < 0:
        raise InvalidRegime("temperature must be >= 0")
    if T >= spec.T_c:
        return GapAtTemperature(Delta=0.0, temperature=float(T))
    if T == 0.0:
        return GapAtTemperature(Delta=spec.Delta0, temperature=0.0)
    d = spec.Delta0 * math.tanh(1.74 * math.sqrt(spec.T_c / T - 1.0))
    return GapAtTemperature(Delta=d, temperature=float(T))


def _i1_integrand(E, D, hw, gamma, kT, P2=None, p4=None):
    """First integrand (pair-breaking window Delta <= E <= Delta + hw)."""
    if P2 is None:
        P2 = np.sqrt(E * E - D * D)
    if p4 is None:
        p4 = np.sqrt(D * D - (E - hw) ** 2)
    P4 = 1j * p4
    c = (D * D + E * (E - hw)) / (P2 * P4)
    th = np.tanh(E / (2.0 * kT)) if kT > 0 else 1.0
    return th * ((1.0 - c) / (P4 + P2 + 1j * gamma)
                 - (1.0 + c) / (P4 - P2 + 1j * gamma))


def _i2_integrand(E, D, hw, gamma, kT, P2=None):
    """Second integrand (thermal quasiparticles, E >= Delta)."""
    if P2 is None:
        P2 = np.sqrt(E * E - D * D)
    P1 = np.sqrt((E + hw) ** 2 - D * D)
    c = (D * D + E * (E + hw)) / (P1 * P2)
    if kT > 0:
        th1 = np.tanh((E + hw) / (2.0 * kT))
        th2 = np.tanh(E / (2.0 * kT))
    else:
        th1 = th2 = 1.0
    return (th1 * ((1.0 + c) / (P1 - P2 + 1j * gamma)
                   - (1.0 - c) / (-P1 - P2 + 1j * gamma))
            + th2 * ((1.0 - c) / (P1 + P2 + 1j * gamma)
                     - (1.0 + c) / (P1 - P2 + 1j * gamma)))


def _drude(spec, omega):
    """Normal-state response for T >= T_c (relaxation-time model)."""
    wt = omega * relaxation_time(spec)
    s1 = spec.sigma_n / (1.0 + wt * wt)
    return ComplexConductivity(sigma1=s1, sigma2=s1 * wt, omega=omega,
                               temperature=np.nan)


def complex_conductivity(spec, omega, T, quad=QuadratureSpec()):
    """Complex conductivity sigma_s(omega, T) = sigma1 - i*sigma2.

    Evaluates sigma_s = (i*sigma_n / (2*omega*tau)) * (I1 + I2) with the
    integrands of the arbitrary-purity theory, using singularity-cancelling
    substitutions (module docstring).  Valid in the microwave regime
    hbar*omega < 2*Delta(T); above T_c falls back to the Drude form.

    The literal integrals produce the physics-convention sigma1 + i*sigma2;
    the returned object stores the component magnitudes for the
    sigma1 - i*sigma2 convention used by the surface-impedance formulas.
    """
    if not omega > 0:
        raise InvalidRegime("omega must be positive")
    if T < 0:
        raise InvalidRegime("temperature must be >= 0")

    D = gap_at_temperature(spec, T).Delta
    if D == 0.0:
        drude = _drude(spec, omega)
        return replace(drude, temperature=float(T))

    hw = hbar * omega
    if hw >= 2.0 * D:
        raise InvalidRegime(
            f"hbar*omega = {hw / E_CHARGE * 1e3:.4g} meV is not below the "
            f"pair-breaking threshold 2*Delta(T) = "
            f"{2 * D / E_CHARGE * 1e3:.4g} meV; this microwave-regime "
            "evaluation does not cover photon-assisted pair breaking"
        )
    gamma = hbar / relaxation_time(spec)
    kT = K_B * T

    # I1 over [D, D + hw], split at the midpoint; each half gets the
    # substitution that cancels its own endpoint zero.
    E_mid = D + 0.5 * hw
    u_mid = math.acosh(E_mid / D)

    def f1_lower(u):
        E = D * np.cosh(u)
        P2 = D * np.sinh(u)
        return _i1_integrand(E, D, hw, gamma, kT, P2=P2) * P2

    th_mid = math.acos((E_mid - hw) / D)

    def f1_upper(th):
        E = hw + D * np.cos(th)
        p4 = D * np.sin(th)
        return _i1_integrand(E, D, hw, gamma, kT, p4=p4) * p4

    # I2 over [D, E_max]: thermal tail needs E beyond ~kT*ln(1/eps), the
    # T-independent pair term decays ~E^-3 and needs E ~ sqrt(gamma*D/eps).
    eps = max(quad.rel_tol, 1e-12)
    E_max = D * max(
        20.0,
        1.0 + 40.0 * kT / D * math.log(10.0),
        math.sqrt(max(gamma / D, 1.0) / (4.0 * eps)),
    )
    v_max = math.acosh(E_max / D)

    def f2(u):
        E = D * np.cosh(u)
        P2 = D * np.sinh(u)
        return _i2_integrand(E, D, hw, gamma, kT, P2=P2) * P2

    J = (integrate_adaptive(f1_lower, 0.0, u_mid, quad)
         + integrate_adaptive(f1_upper, 0.0, th_mid, quad)
         + integrate_adaptive(f2, 0.0, v_max, quad))

    # doubling check on the truncated tail (E_max -> 4*E_max is +ln(4) in u)
    tail = integrate_adaptive(
        f2, v_max, v_max + math.log(4.0),
        QuadratureSpec(rel_tol=1e-3, abs_tol=abs(J) * eps,
                       max_subdivisions=quad.max_subdivisions))
    if abs(tail) > 10.0 * eps * abs(J):
        raise QuadratureNotConverged(
            f"semi-infinite tail not negligible at E_max = {E_max / D:.3g} "
            f"Delta (tail/J = {abs(tail) / abs(J):.2e})"
        )
    J += tail

    sigma = 1j * spec.sigma_n * gamma / (2.0 * hw) * J
    s1, s2 = sigma.real, sigma.imag
    # analytic zero at T = 0; clamp the quadrature residue, never real loss
    if s1 < 0:
        if abs(s1) > max(10.0 * quad.rel_tol * abs(s2), quad.abs_tol):
            raise QuadratureNotConverged(
                f"sigma1 = {s1:.3e} came out negative beyond tolerance")
        s1 = 0.0
    return ComplexConductivity(sigma1=s1, sigma2=s2, omega=float(omega),
                               temperature=float(T))


def effective_penetration_depth(sigma2, omega):
    """lambda_eff = sqrt(1 / (mu0 * omega * sigma2))."""
    if not sigma2 > 0:
        raise InvalidRegime(
            f"sigma2 = {sigma2:.3g} S/m is not inductive (normal state?)")
    if not omega > 0:
        raise InvalidRegime("omega must be positive")
    return 1.0 / math.sqrt(mu_0 * omega * sigma2)


def _sigma_for_impedance(spec, omega, T, lossless, quad):
    cond = complex_conductivity(spec, omega, T, quad)
    if lossless is None:
        lossless = T <= LOSSLESS_BELOW_K
    if lossless:
        return -1j * cond.sigma2
    return cond.as_complex


def surface_impedance_bulk(spec, omega, T, lossless=None,
                           quad=QuadratureSpec()):
    """Bulk surface impedance Z_s = sqrt(i*mu0*omega / sigma_s).

    ``lossless`` drops sigma1 before use (defaults to on at T <= 100 mK,
    where the quasiparticle loss is far below other loss channels).
    """
    sigma = _sigma_for_impedance(spec, omega, T, lossless, quad)
    Z = np.sqrt(1j * mu_0 * omega / sigma)
    return SurfaceImpedance(Rs=float(Z.real), Xs=float(Z.imag),
                            omega=float(omega), temperature=float(T),
                            regime="bulk")


def surface_impedance_film(spec, omega, T, lossless=None,
                           quad=QuadratureSpec()):
    """Thin-film surface impedance.

    Z_s = sqrt(i*mu0*omega/sigma_s) * coth(sqrt(i*mu0*omega*sigma_s) * d);
    in the lossless case this is i*mu0*omega*lambda_eff*coth(d/lambda_eff).
    """
    if spec.thickness is None:
        raise InvalidRegime("film impedance needs spec.thickness")
    d = spec.thickness
    sigma = _sigma_for_impedance(spec, omega, T, lossless, quad)
    q = np.sqrt(1j * mu_0 * omega * sigma)  # inverse complex depth
    Z = np.sqrt(1j * mu_0 * omega / sigma) / np.tanh(q * d)
    return SurfaceImpedance(Rs=float(Z.real), Xs=float(Z.imag),
                            omega=float(omega), temperature=float(T),
                            regime=f"film({d * 1e9:.6g} nm)")


def surface_impedance(spec, omega, T, lossless=None, quad=QuadratureSpec()):
    """Film impedance when the spec has a thickness, bulk otherwise."""
    if spec.thickness is None:
        return surface_impedance_bulk(spec, omega, T, lossless, quad)
    return surface_impedance_film(spec, omega, T, lossless, quad)


@dataclass(frozen=True)
class PurityPoint:
    """One row of an impedance-versus-purity sweep."""

    sigma_n: float
    Xs: float | None
    error: str | None = None


def impedance_vs_purity(spec, omega, T, sigma_n_grid, lossless=None,
                        quad=QuadratureSpec()):
    """Film X_s across a normal-state-conductivity grid.

    The mean free path is re-derived from each grid sigma_n, so the sweep
    runs from the dirty limit (X_s diverging as sigma_n -> 0) to the clean
    limit (X_s converging to a finite value).
    """
    if spec.thickness is None:
        raise InvalidRegime("purity sweep is defined for films")
    rows = []
    for s_n in sigma_n_grid:
        if not s_n > 0:
            rows.append(PurityPoint(sigma_n=float(s_n), Xs=None,
                                    error="sigma_n must be positive"))
            continue
        try:
            zs = surface_impedance_film(spec.with_sigma_n(s_n), omega, T,
                                        lossless, quad)
            rows.append(PurityPoint(sigma_n=float(s_n), Xs=zs.Xs))
        except (InvalidRegime, QuadratureNotConverged) as exc:
            rows.append(PurityPoint(sigma_n=float(s_n), Xs=None,
                                    error=str(exc)))
    return rows
