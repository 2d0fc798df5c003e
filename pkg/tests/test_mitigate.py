"""Mitigation math tests.

The recurring oracle is explicit dense projector algebra: build
M = (1 + sS)/2 as a matrix, project, renormalize, and take traces, then
compare against the trace-ratio and eigenproblem routes.
"""

import math
import random

import numpy as np
import pytest

from symverify.circuitlib import ancilla_verification, inline_verification, ucc_2q
from symverify.densim import (
    DensityMatrix,
    apply_unitary,
    expectation,
    initial_state,
    measure_pauli,
    relabel_wires,
    run_circuit,
    trace_out,
)
from symverify.errors import (
    DegenerateOverlapError,
    DomainError,
    RejectionError,
)
from symverify.mitigate import (
    AnticommutingQse,
    OrderingDiagnostic,
    QseSolution,
    VerifiedExpectation,
    anticommuting_qse,
    coherent_chi,
    energy_ordering_check,
    postselected_energy,
    postselected_expectation,
    project_symmetry,
    sqse_energy,
)
from symverify.pauli import PauliString, PauliSum, SymmetrySpec, commutes


def random_density(rng, n):
    a = rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n))
    rho = a @ a.conj().T
    return DensityMatrix(n, rho / np.trace(rho))


def random_string(pyrng, n, avoid_identity=True):
    while True:
        letters = "".join(pyrng.choice("IXYZ") for _ in range(n))
        if not avoid_identity or set(letters) != {"I"}:
            return PauliString.from_letters(letters)


def dense_projected(rho, spec):
    proj = spec.projector()
    chunk = proj @ rho.matrix @ proj
    return chunk, float(np.real(np.trace(chunk)))


class TestProjectSymmetry:
    def test_state_already_in_sector(self):
        dm = initial_state("01")
        spec = SymmetrySpec(PauliString.from_letters("ZZ"), -1)
        out, p = project_symmetry(dm, spec)
        assert p == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(out.matrix, dm.matrix)

    def test_maximally_mixed_splits_in_half(self):
        dm = DensityMatrix(2, np.eye(4, dtype=complex) / 4)
        spec = SymmetrySpec(PauliString.from_letters("ZZ"), -1)
        out, p = project_symmetry(dm, spec)
        assert p == pytest.approx(0.5, abs=1e-12)
        assert np.allclose(out.matrix, np.diag([0.0, 0.5, 0.5, 0.0]))

    def test_matches_dense_oracle_and_is_idempotent(self):
        rng = np.random.default_rng(101)
        pyrng = random.Random(7)
        for _ in range(40):
            n = pyrng.randint(1, 3)
            dm = random_density(rng, n)
            spec = SymmetrySpec(random_string(pyrng, n), pyrng.choice([1, -1]))
            chunk, p = dense_projected(dm, spec)
            if p <= 1e-12:
                continue
            out, prob = project_symmetry(dm, spec)
            assert prob == pytest.approx(p, abs=1e-12)
            assert np.allclose(out.matrix, chunk / p, atol=1e-12)
            again, p2 = project_symmetry(out, spec)
            assert p2 == pytest.approx(1.0, abs=1e-10)
            assert np.allclose(again.matrix, out.matrix, atol=1e-12)
            assert expectation(out, spec.operator) == pytest.approx(spec.sector, abs=1e-10)

    def test_rejection(self):
        dm = initial_state("00")
        with pytest.raises(RejectionError):
            project_symmetry(dm, SymmetrySpec(PauliString.from_letters("ZZ"), -1))


class TestPostselectedExpectation:
    def test_direct_arithmetic(self):
        assert postselected_expectation(0.5, 0.3, -0.6, -1) == pytest.approx(0.125, abs=1e-15)

    def test_already_verified_state(self):
        assert postselected_expectation(0.7, 0.7, 1.0, 1) == pytest.approx(0.7, abs=1e-12)

    def test_matches_projection_oracle(self):
        rng = np.random.default_rng(333)
        pyrng = random.Random(13)
        done = 0
        while done < 200:
            n = pyrng.randint(2, 4)
            dm = random_density(rng, n)
            s = random_string(pyrng, n)
            p = random_string(pyrng, n, avoid_identity=False)
            if not commutes(p, s):
                continue
            sector = pyrng.choice([1, -1])
            spec = SymmetrySpec(s, sector)
            _, weight = dense_projected(dm, spec)
            if weight <= 1e-9:
                continue
            exp_p = expectation(dm, p)
            exp_s = expectation(dm, s)
            ps = PauliSum.from_terms(n, [(p, 1.0)]) * s
            exp_ps = expectation(dm, ps)
            got = postselected_expectation(exp_p, exp_ps, exp_s, sector)
            projected, _ = project_symmetry(dm, spec)
            assert got == pytest.approx(expectation(projected, p), abs=1e-12)
            done += 1

    def test_input_validation(self):
        with pytest.raises(DomainError):
            postselected_expectation(1.5, 0.0, 0.0, 1)
        with pytest.raises(DomainError):
            postselected_expectation(0.0, 0.0, 0.0, 2)
        with pytest.raises(RejectionError):
            postselected_expectation(0.3, 0.3, -1.0, 1)


class TestSqseEnergy:
    def test_direct_arithmetic(self):
        sol = sqse_energy(-1.0, 0.4, -0.5)
        assert sol.sector_energy(1) == pytest.approx(-1.2, abs=1e-12)
        assert sol.sector_energy(-1) == pytest.approx(-14.0 / 15.0, abs=1e-12)
        assert sol.chosen == pytest.approx(-1.2, abs=1e-12)
        assert sol.b_condition == pytest.approx(0.75, abs=1e-12)

    def test_uncorrelated_symmetry_changes_nothing(self):
        sol = sqse_energy(-0.8, 0.0, 0.0)
        assert sol.eigenvalues == (pytest.approx(-0.8), pytest.approx(-0.8))

    def test_matches_projection_oracle(self):
        rng = np.random.default_rng(555)
        pyrng = random.Random(17)
        done = 0
        while done < 100:
            n = pyrng.randint(2, 3)
            dm = random_density(rng, n)
            s = random_string(pyrng, n)
            terms = []
            for _ in range(4):
                cand = random_string(pyrng, n, avoid_identity=False)
                if commutes(cand, s):
                    terms.append((cand, pyrng.uniform(-1, 1)))
            if not terms:
                continue
            h = PauliSum.from_terms(n, terms)
            s_exp = expectation(dm, s)
            if abs(s_exp) > 0.999:
                continue
            h_exp = expectation(dm, h)
            hs_exp = expectation(dm, h * s)
            sol = sqse_energy(h_exp, hs_exp, s_exp)
            for sector in (1, -1):
                spec = SymmetrySpec(s, sector)
                chunk, w = dense_projected(dm, spec)
                if w <= 1e-9:
                    continue
                oracle = float(np.real(np.trace(h.dense() @ chunk))) / w
                assert sol.sector_energy(sector) == pytest.approx(oracle, abs=1e-10)
            assert sol.chosen == pytest.approx(min(sol.eigenvalues), abs=1e-15)
            done += 1

    def test_degenerate_overlap(self):
        with pytest.raises(DegenerateOverlapError):
            sqse_energy(0.0, 0.0, 1.0)
        with pytest.raises(DegenerateOverlapError):
            sqse_energy(0.0, 0.0, -1.0 + 1e-14)


class TestPostselectedEnergy:
    def test_single_symmetry_reduces_to_ratio(self):
        rng = np.random.default_rng(777)
        dm = random_density(rng, 2)
        h = PauliSum.from_dict({"ZZ": 0.3, "XX": -0.7, "II": 0.1})
        spec = SymmetrySpec(PauliString.from_letters("ZZ"), -1)
        got = postselected_energy(dm, h, [spec])
        projected, p = project_symmetry(dm, spec)
        assert got.value == pytest.approx(expectation(projected, h), abs=1e-10)
        assert got.acceptance_probability == pytest.approx(p, abs=1e-10)

    def test_joint_projection_oracle(self):
        rng = np.random.default_rng(888)
        dm = random_density(rng, 4)
        specs = [
            SymmetrySpec(PauliString.from_letters("ZZII"), 1),
            SymmetrySpec(PauliString.from_letters("ZIZI"), -1),
            SymmetrySpec(PauliString.from_letters("ZZZZ"), 1),
        ]
        h = PauliSum.from_dict({"ZIII": 0.4, "ZZII": -0.2, "XXXX": 0.9, "IIZZ": 0.35})
        got = postselected_energy(dm, h, specs)
        proj = np.eye(16, dtype=complex)
        for spec in specs:
            proj = proj @ spec.projector()
        chunk = proj @ dm.matrix @ proj.conj().T
        w = float(np.real(np.trace(chunk)))
        oracle = float(np.real(np.trace(h.dense() @ chunk))) / w
        assert got.value == pytest.approx(oracle, abs=1e-10)
        assert got.acceptance_probability == pytest.approx(w, abs=1e-10)

    def test_noncommuting_rejected(self):
        dm = initial_state("00")
        h = PauliSum.from_dict({"XI": 1.0})
        with pytest.raises(DomainError):
            postselected_energy(dm, h, [SymmetrySpec(PauliString.from_letters("ZZ"), 1)])


class TestEnergyOrdering:
    H2Q = PauliSum.from_dict({"ZI": 0.4, "IZ": 0.4, "ZZ": 0.2, "XX": -0.3})

    def test_pure_sector_state(self):
        dm = initial_state("01")
        spec = SymmetrySpec(PauliString.from_letters("ZZ"), -1)
        report = energy_ordering_check(dm, self.H2Q, spec)
        assert report.e_rejected is None
        assert report.verification_trustworthy is True
        assert report.e_total == pytest.approx(report.e_selected, abs=1e-12)

    def test_warning_case_fails_flag(self):
        # Equal mixture of each sector's lowest eigenstate, arranged so the
        # rejected sector is the lower one: post-selection raises the energy.
        h = self.H2Q
        spec = SymmetrySpec(PauliString.from_letters("ZZ"), -1)
        vals, vecs = np.linalg.eigh(h.dense())
        sector_of = lambda v: float(np.real(v.conj() @ PauliString.from_letters("ZZ").dense() @ v))
        lows = {}
        for val, vec in zip(vals, vecs.T):
            sec = round(sector_of(vec))
            if sec not in lows:
                lows[sec] = (val, vec)
        (e_minus, v_minus), (e_plus, v_plus) = lows[-1], lows[1]
        assert e_plus < e_minus  # the +1 sector is rejected yet lies lower
        rho = 0.5 * np.outer(v_minus, v_minus.conj()) + 0.5 * np.outer(v_plus, v_plus.conj())
        report = energy_ordering_check(DensityMatrix(2, rho), h, spec)
        assert report.verification_trustworthy is False
        assert report.e_selected > report.e_total

    def test_decomposition_identity(self):
        rng = np.random.default_rng(999)
        pyrng = random.Random(23)
        for _ in range(30):
            n = pyrng.randint(2, 3)
            dm = random_density(rng, n)
            s = random_string(pyrng, n)
            terms = [
                (cand, pyrng.uniform(-1, 1))
                for cand in (random_string(pyrng, n, avoid_identity=False) for _ in range(5))
                if commutes(cand, s)
            ]
            if not terms:
                continue
            h = PauliSum.from_terms(n, terms)
            report = energy_ordering_check(dm, h, SymmetrySpec(s, pyrng.choice([1, -1])))
            if report.e_selected is None or report.e_rejected is None:
                continue
            recomposed = (
                report.weight_selected * report.e_selected
                + report.weight_rejected * report.e_rejected
            )
            assert recomposed == pytest.approx(report.e_total, abs=1e-10)

    def test_requires_commuting_hamiltonian(self):
        dm = initial_state("00")
        h = PauliSum.from_dict({"XI": 1.0})
        with pytest.raises(DomainError):
            energy_ordering_check(dm, h, SymmetrySpec(PauliString.from_letters("ZZ"), 1))


def chirality_hamiltonian(pyrng, n, a):
    """Random Hamiltonian whose every term anticommutes with a."""
    terms = []
    while len(terms) < 4:
        cand = random_string(pyrng, n, avoid_identity=False)
        if not commutes(cand, a):
            terms.append((cand, pyrng.uniform(-1, 1)))
    return PauliSum.from_terms(n, terms)


class TestAnticommutingQse:
    def test_spectrum_pairs_up(self):
        pyrng = random.Random(29)
        for _ in range(10):
            n = pyrng.randint(2, 3)
            a = random_string(pyrng, n)
            h = chirality_hamiltonian(pyrng, n, a)
            vals = np.linalg.eigvalsh(h.dense())
            assert np.allclose(np.sort(vals), np.sort(-vals), atol=1e-10)

    def test_closed_form_matches_eigenproblem_on_mixed_states(self):
        rng = np.random.default_rng(1234)
        pyrng = random.Random(31)
        for _ in range(40):
            n = pyrng.randint(2, 3)
            a = random_string(pyrng, n)
            h = chirality_hamiltonian(pyrng, n, a)
            dm = random_density(rng, n)
            if abs(expectation(dm, a)) > 0.99:
                continue
            sol = anticommuting_qse(dm, h, a)
            # The internal eigenproblem check ran; confirm the invariants too.
            assert sol.e_squared >= 0
            assert sol.roots[1] == pytest.approx(math.sqrt(sol.e_squared), abs=1e-12)
            assert abs(sol.ha_exp.real) < 1e-10  # Trace[HA rho] is purely imaginary

    def test_incoherent_mixture_gains_nothing(self):
        # rho mixing |psi> and A|psi> without coherence keeps E_qse² = <H>².
        pyrng = random.Random(37)
        a = PauliString.from_letters("XX")
        h = chirality_hamiltonian(pyrng, 2, a)
        vals, vecs = np.linalg.eigh(h.dense())
        psi = vecs[:, 0]
        apsi = a.dense() @ psi
        for w in (0.0, 0.3, 0.7):
            rho = (1 - w) * np.outer(psi, psi.conj()) + w * np.outer(apsi, apsi.conj())
            sol = anticommuting_qse(DensityMatrix(2, rho), h, a)
            assert abs(sol.a_exp) < 1e-10
            assert abs(sol.ha_exp) < 1e-10
            assert sol.e_squared == pytest.approx(sol.h_exp**2, abs=1e-10)

    def test_quarter_phase_coherent_error_fully_corrected(self):
        # |chi> = cos t |psi> + i sin t A|psi>: the expansion restores E².
        pyrng = random.Random(41)
        a = PauliString.from_letters("ZI")
        h = chirality_hamiltonian(pyrng, 2, a)
        vals, vecs = np.linalg.eigh(h.dense())
        psi = vecs[:, 0]
        energy = vals[0]
        apsi = a.dense() @ psi
        for theta in (0.1, 0.4, 1.0):
            chi = math.cos(theta) * psi + 1j * math.sin(theta) * apsi
            dm = DensityMatrix(2, np.outer(chi, chi.conj()))
            sol = anticommuting_qse(dm, h, a)
            assert sol.e_squared == pytest.approx(energy**2, abs=1e-10)

    def test_generic_pure_coherent_error_recovers_energy(self):
        # A pure coherent superposition spans the whole chirality pair, so
        # the two-element expansion is exact at any (theta, phi) away from
        # the singular points where <A> -> 1.
        pyrng = random.Random(43)
        a = PauliString.from_letters("YI")
        h = chirality_hamiltonian(pyrng, 2, a)
        vals, vecs = np.linalg.eigh(h.dense())
        psi = vecs[:, 0]
        energy = vals[0]
        apsi = a.dense() @ psi
        for theta, phi in ((0.3, 0.7), (0.8, 2.1), (0.2, -1.3)):
            chi = math.cos(theta) * psi + math.sin(theta) * np.exp(1j * phi) * apsi
            dm = DensityMatrix(2, np.outer(chi, chi.conj()))
            sol = anticommuting_qse(dm, h, a)
            assert sol.e_squared == pytest.approx(energy**2, abs=1e-8)

    def test_rejects_commuting_term(self):
        dm = initial_state("00")
        h = PauliSum.from_dict({"ZZ": 1.0})
        with pytest.raises(DomainError):
            anticommuting_qse(dm, h, PauliString.from_letters("XX"))

    def test_degenerate_overlap(self):
        plus = np.full((2, 2), 0.5, dtype=complex)
        h = PauliSum.from_dict({"Z": 1.0})
        with pytest.raises(DegenerateOverlapError):
            anticommuting_qse(DensityMatrix(1, plus), h, PauliString.from_letters("X"))


class TestCoherentChi:
    def test_known_values(self):
        assert coherent_chi(0.3, 0.0, 1.0) == (pytest.approx(4.0), pytest.approx(0.0))
        assert coherent_chi(0.0, math.pi / 2, 1.0) == (pytest.approx(2.0), pytest.approx(2.0))
        assert coherent_chi(1.1, math.pi / 3, 0.5) == (pytest.approx(1.75), pytest.approx(0.75))

    def test_grid_matches_complex_product(self):
        for a in np.linspace(0, 1, 6):
            for phi in np.linspace(-math.pi, math.pi, 9):
                plus, minus = coherent_chi(0.0, phi, float(a))
                zp = (1 + a * np.exp(1j * phi)) * (1 + a * np.exp(-1j * phi))
                zm = (1 - a * np.exp(1j * phi)) * (1 - a * np.exp(-1j * phi))
                assert abs(zp.imag) < 1e-12 and abs(zm.imag) < 1e-12
                assert plus == pytest.approx(zp.real, abs=1e-12)
                assert minus == pytest.approx(zm.real, abs=1e-12)

    def test_amplitude_bound(self):
        with pytest.raises(DomainError):
            coherent_chi(0.0, 0.0, 1.5)


class TestCircuitVerificationTiesToProjection:
    """Noiseless circuit post-selection must equal projector application."""

    @pytest.mark.parametrize(
        "letters,sector", [("ZZ", -1), ("ZZII", 1), ("ZIZI", -1), ("XXXX", 1)]
    )
    def test_ancilla_circuit(self, letters, sector):
        spec = SymmetrySpec(PauliString.from_letters(letters), sector)
        n = spec.n
        rng = np.random.default_rng(abs(hash((letters, sector))) % 2**32)
        dm_sys = random_density(rng, n)
        full = DensityMatrix(n + 1, np.kron(dm_sys.matrix, np.diag([1.0, 0.0])).astype(complex))
        circ = ancilla_verification(spec)
        out = run_circuit(circ, initial=full)
        bit_spec = SymmetrySpec(
            PauliString.from_letters(
                "".join("Z" if q == circ.measured_wire else "I" for q in range(n + 1))
            ),
            1 if sector == 1 else -1,
        )
        kept, _ = measure_pauli(out, bit_spec)
        reduced = trace_out(kept.state, circ.measured_wire)
        projected, p = project_symmetry(dm_sys, spec)
        assert kept.probability == pytest.approx(p, abs=1e-10)
        assert np.max(np.abs(reduced.matrix - projected.matrix)) < 1e-10

    @pytest.mark.parametrize("topology", ["tree", "linear"])
    def test_inline_circuit(self, topology):
        spec = SymmetrySpec(PauliString.from_letters("XXXX"), 1)
        rng = np.random.default_rng(2024)
        dm_sys = random_density(rng, 4)
        circ = inline_verification(spec, topology=topology)
        out = run_circuit(circ, initial=dm_sys)
        bit_spec = SymmetrySpec(PauliString.from_letters("IIIZ"), 1)
        kept, _ = measure_pauli(out, bit_spec)
        # Undo the verification unitary to compare in the logical frame.
        u = circ.unitary()
        undone = apply_unitary(kept.state, u.conj().T, tuple(range(4)))
        projected, p = project_symmetry(dm_sys, spec)
        assert kept.probability == pytest.approx(p, abs=1e-10)
        assert np.max(np.abs(undone.matrix - projected.matrix)) < 1e-10
