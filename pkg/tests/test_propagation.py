import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from rydfloq.hamiltonians import lab_hamiltonian
from rydfloq.model import DriveParams, basis_for, state_from_token
from rydfloq.propagation import (
    ADAPTIVE,
    FIXED_STEP,
    IntegratorConfig,
    monodromy,
    monodromy_grid,
    propagate,
    propagate_amplitudes,
    sample_times,
)

FULL = basis_for(2)
ATOM = basis_for(1)


class TestIntegratorConfig:
    def test_rejects_unknown_method(self):
        with pytest.raises(ValueError):
            IntegratorConfig(method="leapfrog")

    def test_rejects_oversized_max_step(self):
        p = DriveParams(omega=8.0)
        cfg = IntegratorConfig(max_step=p.period / 50.0)
        with pytest.raises(ValueError):
            cfg.resolved_max_step(p.period)

    def test_default_max_step_resolves_drive(self):
        p = DriveParams(omega=8.0)
        assert IntegratorConfig().resolved_max_step(p.period) == pytest.approx(
            p.period / 200.0
        )


class TestSampleTimes:
    def test_exact_cadence(self):
        t = sample_times(1.0, 0.25)
        np.testing.assert_allclose(t, [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_endpoint_always_present(self):
        t = sample_times(1.0, 0.3)
        assert t[-1] == 1.0
        assert np.all(np.diff(t) > 0)


class TestPropagate:
    def test_resonant_rabi_closed_form(self):
        # Single atom, no modulation, zero detuning: P_e = sin^2(t/2).
        p = DriveParams(rabi=1.0, delta0=0.0, delta_mod=0.0, omega=8.0)
        ts = propagate(state_from_token("g", ATOM), p, t_final=4 * math.pi,
                       sample_every=0.05)
        expected = np.sin(0.5 * ts.times) ** 2
        np.testing.assert_allclose(ts.population("e"), expected, atol=1e-9)

    def test_blockade_oscillation_against_static_oracle(self):
        # Strong interaction, no modulation: compare against direct
        # diagonalization of the static Hamiltonian.
        p = DriveParams(rabi=1.0, delta0=0.0, delta_mod=0.0, omega=8.0, v0=100.0)
        psi0 = state_from_token("gg", FULL).amplitudes
        times = np.linspace(0.0, 10.0, 401)
        states = propagate_amplitudes(psi0, p, FULL, times, "lab")
        h = lab_hamiltonian(p, 2, 0.0).matrix
        w, v = np.linalg.eigh(h)
        oracle = (np.exp(-1j * np.outer(times, w)) * (v.conj().T @ psi0)) @ v.T
        np.testing.assert_allclose(states, oracle, atol=1e-8)
        pops = np.abs(states) ** 2
        assert pops[:, 3].max() <= 0.01  # double excitation blocked
        # enhanced oscillation: first return of P_gg at 2*pi/(sqrt(2) rabi)
        period = 2.0 * math.pi / math.sqrt(2.0)
        k = np.argmin(np.abs(times - period))
        assert pops[k, 0] >= 0.99

    def test_interaction_shifted_trapping(self):
        # Both atoms excited at the first-harmonic working point: the
        # stroboscopic envelope stays trapped.  The exact 0.95 bound is
        # exercised (and documented as red) in the acceptance suite.
        p = DriveParams(delta0=8.0, delta_mod=15.0, omega=8.0, v0=10.0)
        ts = propagate(state_from_token("ee", FULL), p, t_final=25 * p.period,
                       sample_every=p.period)
        assert ts.population("ee").min() > 0.9

    def test_norm_conservation_over_50_periods(self):
        p = DriveParams(delta0=8.0, delta_mod=15.0, omega=8.0, v0=10.0)
        ts = propagate(state_from_token("gg", FULL), p, t_final=50 * p.period,
                       sample_every=p.period)
        assert np.max(np.abs(ts.norm - 1.0)) <= 1e-9

    def test_tolerance_monotonicity(self):
        p = DriveParams(delta0=2.0, delta_mod=15.0, omega=8.0, v0=10.0)
        psi0 = state_from_token("gg", FULL).amplitudes
        times = np.array([0.0, 5 * p.period])
        loose = propagate_amplitudes(psi0, p, FULL, times, "lab",
                                     IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10))
        tight = propagate_amplitudes(psi0, p, FULL, times, "lab",
                                     IntegratorConfig(rel_tol=1e-9, abs_tol=1e-11))
        assert np.max(np.abs(loose[-1] - tight[-1])) < 1e-8

    def test_effective_frame_runs(self):
        p = DriveParams(delta_mod=8.0, omega=8.0, v0=0.2)
        ts = propagate(state_from_token("gg", FULL), p, frame="effective",
                       t_final=5.0, sample_every=0.1)
        assert np.max(np.abs(ts.norm - 1.0)) <= 1e-12

    def test_entropy_column(self):
        p = DriveParams(delta_mod=8.0, omega=8.0, v0=5.0)
        ts = propagate(state_from_token("plus", FULL), p, t_final=2.0,
                       sample_every=0.1, with_entropy=True)
        assert ts.entropy is not None
        assert ts.entropy[0] == pytest.approx(1.0, abs=1e-9)

    def test_unit_rescaling_invariance(self):
        # Doubling every energy and halving time leaves populations unchanged.
        p = DriveParams(rabi=1.0, delta0=2.0, delta_mod=15.0, omega=8.0, v0=10.0)
        q = DriveParams(rabi=2.0, delta0=4.0, delta_mod=30.0, omega=16.0, v0=20.0)
        psi0 = state_from_token("gg", FULL).amplitudes
        times = np.linspace(0.0, 4.0, 11)
        a = propagate_amplitudes(psi0, p, FULL, times, "lab")
        b = propagate_amplitudes(psi0, q, FULL, times / 2.0, "lab")
        np.testing.assert_allclose(np.abs(a) ** 2, np.abs(b) ** 2, atol=1e-9)


class TestMonodromy:
    def test_unmodulated_equals_matrix_exponential(self):
        p = DriveParams(delta0=3.0, delta_mod=0.0, omega=8.0, v0=10.0)
        u = monodromy(p, 2).matrix
        h = lab_hamiltonian(p, 2, 0.0).matrix
        np.testing.assert_allclose(u, expm(-1j * h * p.period), atol=1e-9)

    def test_zero_coupling_phase(self):
        # Without coupling the propagator is diagonal and the excited phase
        # integrates the detuning: the modulated part averages out exactly.
        p = DriveParams(rabi=0.0, delta0=3.0, delta_mod=15.0, omega=8.0)
        u = monodromy(p, 1).matrix
        assert abs(u[0, 1]) + abs(u[1, 0]) < 1e-12
        assert np.angle(u[1, 1]) == pytest.approx(
            (p.delta0 * p.period + math.pi) % (2 * math.pi) - math.pi, abs=1e-9
        )

    def test_unitarity(self):
        p = DriveParams(delta0=8.0, delta_mod=15.0, omega=8.0, v0=10.0)
        assert monodromy(p, 2).unitarity_defect() <= 1e-9

    def test_half_period_composition(self):
        # Integrating the two half-periods separately and composing
        # reproduces the one-period propagator.
        p = DriveParams(delta0=2.0, delta_mod=15.0, omega=8.0, v0=10.0)
        T = p.period
        d = 4

        def segment(t0, t1):
            def rhs(t, y):
                u = (y[: d * d] + 1j * y[d * d:]).reshape(d, d)
                du = (-1j * lab_hamiltonian(p, 2, t).matrix @ u).reshape(-1)
                return np.concatenate([du.real, du.imag])

            eye = np.eye(d, dtype=complex).reshape(-1)
            sol = solve_ivp(rhs, (t0, t1), np.concatenate([eye.real, eye.imag]),
                            method="DOP853", rtol=1e-11, atol=1e-13,
                            max_step=T / 200)
            y = sol.y[:, -1]
            return (y[: d * d] + 1j * y[d * d:]).reshape(d, d)

        u_full = monodromy(p, 2).matrix
        u_composed = segment(T / 2, T) @ segment(0.0, T / 2)
        assert np.max(np.abs(u_composed - u_full)) <= 1e-8

    def test_stroboscopic_consistency(self):
        p = DriveParams(delta0=8.0, delta_mod=15.0, omega=8.0, v0=10.0)
        psi0 = state_from_token("gg", FULL).amplitudes
        times = np.arange(0, 51) * p.period
        states = propagate_amplitudes(psi0, p, FULL, times, "lab")
        u = monodromy(p, 2).matrix
        psi = psi0.copy()
        for n in range(1, 51):
            psi = u @ psi
            assert np.max(np.abs(psi - states[n])) <= 1e-7

    def test_symmetric_block(self):
        p = DriveParams(delta_mod=15.0, omega=8.0, v0=8.0)
        u = monodromy(p, 2, symmetric=True)
        assert u.matrix.shape == (3, 3)
        assert u.unitarity_defect() <= 1e-9


class TestFixedStepIntegrator:
    def test_matches_adaptive_reference(self):
        p = DriveParams(delta0=20.0, delta_mod=15.0, omega=8.0, v0=20.0)
        ref = monodromy(p, 2, IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)).matrix
        u = monodromy_grid(p.rabi, p.delta0, p.delta_mod, p.v0, p.omega, 2, False, 384)
        assert np.max(np.abs(u - ref)) < 1e-9

    def test_fourth_order_convergence(self):
        p = DriveParams(delta0=20.0, delta_mod=15.0, omega=8.0, v0=20.0)
        ref = monodromy(p, 2, IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)).matrix
        errors = []
        for steps in (96, 192, 384):
            u = monodromy_grid(p.rabi, p.delta0, p.delta_mod, p.v0, p.omega, 2,
                               False, steps)
            errors.append(np.max(np.abs(u - ref)))
        assert errors[0] / errors[1] == pytest.approx(16.0, rel=0.3)
        assert errors[1] / errors[2] == pytest.approx(16.0, rel=0.3)

    def test_exactly_unitary(self):
        u = monodromy_grid(1.0, 8.0, 15.0, 10.0, 8.0, 2, False, 128)
        defect = np.max(np.abs(u.conj().T @ u - np.eye(4)))
        assert defect < 1e-12

    def test_batch_matches_pointwise(self):
        delta0 = np.array([0.0, 4.0, 8.0])
        batch = monodromy_grid(1.0, delta0, 15.0, 10.0, 8.0, 2, False, 192)
        for i, d0 in enumerate(delta0):
            single = monodromy_grid(1.0, d0, 15.0, 10.0, 8.0, 2, False, 192)
            np.testing.assert_array_equal(batch[i], single)

    def test_monodromy_api_fixed_step(self):
        p = DriveParams(delta0=8.0, delta_mod=15.0, omega=8.0, v0=10.0)
        u_fixed = monodromy(p, 2, IntegratorConfig(method=FIXED_STEP)).matrix
        u_ref = monodromy(p, 2).matrix
        assert np.max(np.abs(u_fixed - u_ref)) < 1e-8
