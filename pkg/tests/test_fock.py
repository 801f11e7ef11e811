import math

import numpy as np
import pytest
from scipy.constants import e as qe, hbar

from kinq import fock as F
from kinq import quantize as Q
from kinq.errors import (DimensionOverflow, InvalidRegime,
                         LabelingAmbiguous)
from kinq.numerics import eigh
from oracles import cpb_levels

GHZ = 2 * np.pi * 1e9
MHZ = 2 * np.pi * 1e6


def transmon_mode_set(EJ, EC):
    """Single linearized transmon: omega = sqrt(8 EJ EC), phi^2 = sqrt(2EC/EJ)."""
    w = math.sqrt(8.0 * EJ * EC)
    phi = (2.0 * EC / EJ) ** 0.25
    LJ = (hbar / (2 * qe)) ** 2 / (EJ * hbar)
    CT = qe**2 / (2 * EC * hbar)
    ms = Q.ModeSet(modes=(w,), phi_zpf=np.array([[phi]]),
                   junction_names=("j",))
    return ms, Q.JunctionSpec(L_J=LJ, C_J=CT)


class TestFockBasis:
    def test_index_bijection(self):
        basis = F.FockBasis(mode_dims=(4, 3, 5))
        assert basis.total_dim == 60
        for flat in range(60):
            assert basis.flat_index(basis.occupation(flat)) == flat

    def test_minimum_levels(self):
        with pytest.raises(InvalidRegime):
            F.FockBasis(mode_dims=(2, 5))


class TestBuildMatrix:
    def test_harmonic_diagonal(self):
        ms = Q.ModeSet(modes=(5 * GHZ, 7 * GHZ),
                       phi_zpf=np.zeros((0, 2)), junction_names=())
        h = Q.HamiltonianSpec(mode_set=ms, junctions=(), truncation=(3, 3))
        H = F.build_matrix(h)
        basis = F.FockBasis((3, 3))
        assert np.count_nonzero(H - np.diag(np.diagonal(H))) == 0
        for flat in range(9):
            n1, n2 = basis.occupation(flat)
            assert abs(H[flat, flat] - (n1 * 5 + n2 * 7) * GHZ) < 1e-3

    def test_quartic_vacuum_element(self):
        # <0|(a+adag)^4|0> = 3, so <0|H_nl|0> = -EJ phi^4 / 8
        ms, j = transmon_mode_set(12.5 * GHZ, 0.25 * GHZ)
        h = Q.assemble_hamiltonian(ms, (j,), 4, 8)
        H = F.build_matrix(h)
        ej = h.ej_rad[0]
        phi = ms.phi_zpf[0, 0]
        vac_nl = H[0, 0]
        assert abs(vac_nl - (-ej * phi**4 * 3.0 / 24.0)) < 1e-6 * abs(vac_nl)

    def test_hermiticity_random_instances(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            n_modes = rng.integers(1, 3)
            modes = tuple(np.sort(rng.uniform(4, 9, n_modes)) * GHZ)
            phi = rng.uniform(0.01, 0.4, (1, n_modes))
            ms = Q.ModeSet(modes=modes, phi_zpf=phi, junction_names=("j",))
            j = Q.JunctionSpec(L_J=rng.uniform(5, 20) * 1e-9,
                               C_J=rng.uniform(40, 90) * 1e-15)
            h = Q.assemble_hamiltonian(ms, (j,),
                                       int(rng.choice([4, 6])),
                                       (5,) * n_modes)
            H = F.build_matrix(h)
            scale = np.max(np.abs(H))
            assert np.max(np.abs(H - H.T)) < 1e-14 * scale

    def test_dimension_cap(self):
        ms = Q.ModeSet(modes=(5 * GHZ,), phi_zpf=np.array([[0.2]]),
                       junction_names=("j",))
        j = Q.JunctionSpec(L_J=12e-9, C_J=70e-15)
        h = Q.assemble_hamiltonian(ms, (j,), 4, 5000)
        with pytest.raises(DimensionOverflow):
            F.build_matrix(h)


class TestExtractReport:
    def test_harmonic_exact(self):
        ms = Q.ModeSet(modes=(5 * GHZ, 7 * GHZ),
                       phi_zpf=np.zeros((0, 2)), junction_names=())
        h = Q.HamiltonianSpec(mode_set=ms, junctions=(), truncation=(4, 4))
        rep = F.diagonalize(h, qubit_modes=[0])
        assert abs(rep.omega_tilde[0] - 5 * GHZ) < 1e-3
        assert abs(rep.omega_tilde[1] - 7 * GHZ) < 1e-3
        assert abs(rep.alpha[0]) < 1e-3 and abs(rep.alpha[1]) < 1e-3
        assert abs(rep.chi[0, 1]) < 1e-3

    def test_single_mode_kerr_recovery(self):
        # H = w n + (a0/2) n (n - 1) built directly as a diagonal matrix
        w, a0 = 5 * GHZ, -300 * MHZ
        n = np.arange(12)
        H = np.diag(w * n + 0.5 * a0 * n * (n - 1))
        ms = Q.ModeSet(modes=(w,), phi_zpf=np.array([[0.0]]),
                       junction_names=("j",))
        h = Q.HamiltonianSpec(mode_set=ms,
                              junctions=(Q.JunctionSpec(12e-9, 70e-15),),
                              truncation=(12,))
        rep = F.extract_report(eigh(H), F.FockBasis((12,)), h)
        assert abs(rep.omega_tilde[0] / w - 1.0) < 1e-10
        assert abs(rep.alpha[0] / a0 - 1.0) < 1e-10

    def test_transmon_against_charge_basis(self):
        EC = 0.25 * GHZ
        EJ = 50.0 * EC
        levels = cpb_levels(EJ, EC)
        w01_ref = levels[1] - levels[0]
        alpha_ref = levels[2] - 2 * levels[1] + levels[0]
        ms, j = transmon_mode_set(EJ, EC)
        h = Q.assemble_hamiltonian(ms, (j,), 6, 15)
        _, rep = F.converge_truncation(h, tol=2 * np.pi * 1e3)
        assert abs(rep.omega_tilde[0] / w01_ref - 1.0) < 0.01
        assert abs(rep.alpha[0] / alpha_ref - 1.0) < 0.05

    def test_chi_symmetric(self):
        ms = Q.ModeSet(modes=(5 * GHZ, 7 * GHZ),
                       phi_zpf=np.array([[0.35, 0.04]]),
                       junction_names=("j",))
        j = Q.JunctionSpec(L_J=12e-9, C_J=70e-15)
        h = Q.assemble_hamiltonian(ms, (j,), 6, (10, 6))
        rep = F.diagonalize(h)
        assert np.array_equal(rep.chi, rep.chi.T)
        # the dispersive shift is the same labeled-energy combination
        assert rep.dispersive_shifts[0][2] == rep.chi[0, 1]

    def test_labeling_ambiguous_on_resonance(self):
        # degenerate modes hybridize completely; labels must refuse
        ms = Q.ModeSet(modes=(5 * GHZ, 5.001 * GHZ),
                       phi_zpf=np.array([[0.3, 0.3]]),
                       junction_names=("j",))
        j = Q.JunctionSpec(L_J=12e-9, C_J=70e-15)
        h = Q.assemble_hamiltonian(ms, (j,), 4, (8, 8))
        with pytest.raises(LabelingAmbiguous):
            F.diagonalize(h)


class TestDispersive:
    @staticmethod
    def dressed_two_mode(wq, wr, g, EJ, EC):
        """Linear-dressing oracle: rotate the coupled quadratic problem,
        distribute the junction phase over the normal modes."""
        theta = 0.5 * math.atan2(2 * g, wq - wr)
        lam_p = wq * math.cos(theta) ** 2 + wr * math.sin(theta) ** 2 \
            + g * math.sin(2 * theta)
        lam_m = wq * math.sin(theta) ** 2 + wr * math.cos(theta) ** 2 \
            - g * math.sin(2 * theta)
        phi_q = (2.0 * EC / EJ) ** 0.25
        # the qubit-like mode keeps cos(theta) of the junction phase
        lo, hi = sorted((lam_p, lam_m))
        if lam_p <= lam_m:
            phis = (abs(phi_q * math.cos(theta)),
                    abs(phi_q * math.sin(theta)))
        else:
            phis = (abs(phi_q * math.sin(theta)),
                    abs(phi_q * math.cos(theta)))
        return (lo, hi), phis

    def test_perturbative_dispersive_shift(self):
        EC = 0.30 * GHZ
        EJ = 40.0 * EC
        wq = math.sqrt(8 * EJ * EC)
        wr = wq + 2.2 * GHZ
        g = 0.12 * GHZ
        (w1, w2), (p1, p2) = self.dressed_two_mode(wq, wr, g, EJ, EC)
        ms = Q.ModeSet(modes=(w1, w2), phi_zpf=np.array([[p1, p2]]),
                       junction_names=("j",))
        LJ = (hbar / (2 * qe)) ** 2 / (EJ * hbar)
        CT = qe**2 / (2 * EC * hbar)
        h = Q.assemble_hamiltonian(ms, (Q.JunctionSpec(LJ, CT),), 6,
                                   (12, 8))
        _, rep = F.converge_truncation(h, tol=2 * np.pi * 1e3)
        alpha = rep.alpha[0]
        delta = rep.omega_tilde[0] - rep.omega_tilde[1]
        chi_pert = 2 * g * g * alpha / (delta * (delta + alpha))
        assert abs(rep.chi[0, 1] / chi_pert - 1.0) < 0.10

    def test_chi_grows_as_detuning_shrinks(self):
        EC = 0.30 * GHZ
        EJ = 40.0 * EC
        wq = math.sqrt(8 * EJ * EC)
        g = 0.12 * GHZ
        chis = []
        for det in (3.0, 2.4, 1.8):
            wr = wq + det * GHZ
            (w1, w2), (p1, p2) = self.dressed_two_mode(wq, wr, g, EJ, EC)
            ms = Q.ModeSet(modes=(w1, w2), phi_zpf=np.array([[p1, p2]]),
                           junction_names=("j",))
            LJ = (hbar / (2 * qe)) ** 2 / (EJ * hbar)
            CT = qe**2 / (2 * EC * hbar)
            h = Q.assemble_hamiltonian(ms, (Q.JunctionSpec(LJ, CT),), 6,
                                       (12, 8))
            rep = F.diagonalize(h)
            chis.append(abs(rep.chi[0, 1]))
        assert chis[0] < chis[1] < chis[2]


class TestConvergeTruncation:
    def test_harmonic_converges_immediately(self):
        ms = Q.ModeSet(modes=(5 * GHZ,), phi_zpf=np.zeros((0, 1)),
                       junction_names=())
        h = Q.HamiltonianSpec(mode_set=ms, junctions=(), truncation=(4,))
        dims, rep = F.converge_truncation(h, qubit_modes=[0])
        assert dims == (7,)
        assert abs(rep.omega_tilde[0] - 5 * GHZ) < 1e-3

    def test_transmon_converges_at_moderate_dims(self):
        ms, j = transmon_mode_set(12.5 * GHZ, 0.25 * GHZ)
        h = Q.assemble_hamiltonian(ms, (j,), 6, 8)
        dims, _ = F.converge_truncation(h, tol=2 * np.pi * 10e3)
        assert dims[0] <= 20

    def test_monotone_settling(self):
        ms, j = transmon_mode_set(12.5 * GHZ, 0.25 * GHZ)
        h = Q.assemble_hamiltonian(ms, (j,), 6, 8)
        values = [F.diagonalize(h, (d,)).alpha[0]
                  for d in (8, 11, 14, 17, 20)]
        deltas = [abs(b - a) for a, b in zip(values, values[1:])]
        assert all(b <= a for a, b in zip(deltas, deltas[1:]))


class TestJunctionFit:
    def test_round_trip_both_targets(self):
        for fq, fa in ((4.7595e9, -342.3e6), (4.8342e9, -344.0e6)):
            wq, al = 2 * np.pi * fq, 2 * np.pi * fa
            j = F.fit_junction_to_measurement(wq, al)
            w, a = F.single_transmon_report(j.L_J, j.C_J, 6)
            assert abs(w / wq - 1.0) < 1e-4
            assert abs(a / al - 1.0) < 1e-4

    def test_context_subtraction(self):
        wq, al = 2 * np.pi * 4.7595e9, -2 * np.pi * 342.3e6
        cg = 6e-15
        j_bare = F.fit_junction_to_measurement(wq, al)
        j_ctx = F.fit_junction_to_measurement(wq, al,
                                              coupling_capacitance=cg)
        assert abs(j_ctx.L_J / j_bare.L_J - 1.0) < 1e-9
        assert abs((j_bare.C_J - j_ctx.C_J) / cg - 1.0) < 1e-9

    def test_inductance_scaling(self):
        wq, al = 2 * np.pi * 4.7595e9, -2 * np.pi * 342.3e6
        j = F.fit_junction_to_measurement(wq, al)
        w1, _ = F.single_transmon_report(j.L_J, j.C_J, 6)
        w2, _ = F.single_transmon_report(1.01 * j.L_J, j.C_J, 6)
        drop = (w1 - w2) / w1
        assert 0.004 < drop < 0.006

    def test_rejects_unphysical_targets(self):
        with pytest.raises(InvalidRegime):
            F.fit_junction_to_measurement(2 * np.pi * 5e9,
                                          +2 * np.pi * 300e6)


class TestKineticRouting:
    def test_end_to_end_chi_contrast(self):
        """Series kinetic inductance that drags the resonator down ~12%
        barely moves the qubit but shifts chi by a large factor."""
        from kinq import network as NW
        from kinq import pipeline as P

        def device(lkin):
            elements = [
                NW.JunctionElement(nodes=("q", "gnd"), junction="j"),
                NW.Capacitor(nodes=("q", "r"), C=6e-15, coupling=True),
                NW.Capacitor(nodes=("r", "gnd"), C=250e-15),
            ]
            if lkin > 0:
                elements += [
                    NW.Inductor(nodes=("r", "m"), L=2e-9),
                    NW.Inductor(nodes=("m", "gnd"), L=lkin, kinetic=True)]
            else:
                elements += [NW.Inductor(nodes=("r", "gnd"), L=2e-9)]
            return NW.Netlist(
                elements=tuple(elements),
                junctions={"j": Q.JunctionSpec(L_J=14e-9, C_J=62e-15)})

        band = (2 * GHZ, 12 * GHZ)
        base = P.quantize_device(device(0.0), "epr", "pec", band=band)
        # L_kin/L = 0.27 lowers the resonator mode by ~12%
        kin = P.quantize_device(device(0.54e-9), "epr", "pec", band=band)
        pb, pk = base.pairs[0], kin.pairs[0]
        drop = (pb.omega_r - pk.omega_r) / pb.omega_r
        assert 0.10 < drop < 0.14
        assert abs(pk.omega_q / pb.omega_q - 1.0) < 0.01
        assert abs(pk.chi_qr) > 1.2 * abs(pb.chi_qr)
        assert pk.chi_qr < 0 and pb.chi_qr < 0
