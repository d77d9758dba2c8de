"""Acceptance gate: end-to-end checks at their stated tolerances.

Each check prints one `ACCEPTANCE <id>: PASS|FAIL` line (run with -s to see
them all).  Three checks (2c, 3c, 6b) assert literature-level expectations
that the exact reference integrator refutes; they are implemented as stated
and fail honestly.  The measured values are in the assertion messages.
"""

import math

import numpy as np
import pytest

from kerrosc.driven import DriveSpec, FrequencySpec
from kerrosc.evolution import ModelParams, evolved_state, integrate_wei_norman
from kerrosc.fock import (
    FockState,
    coherent_state,
    default_truncation,
    momentum_operator,
    position_operator,
)
from kerrosc.kerr_states import KerrStateParams, mandel_q, quadrature_variance_ratios
from kerrosc.observables import (
    autocorrelation,
    autocorrelation_series,
    detect_revivals,
    find_grid_peaks,
    husimi_snapshot,
)
from kerrosc.oracle import fidelity, integrate_exact, integrate_schrodinger
from kerrosc.timemap import MassSpec, evolve_via_timemap, heisenberg_coefficients, physical_time

from test_kerr_states import fock_variance_ratios


def report(label, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {label}: {status}{' — ' + detail if detail else ''}")
    return ok


def fig2_params(chi, alpha=3.0):
    return ModelParams(omega0=1.0, chi=chi,
                       drive=DriveSpec.cosine(1.0, 1.0), alpha=alpha)


@pytest.fixture(scope="module")
def fig2_solution():
    return integrate_wei_norman(fig2_params(0.25), 8 * math.pi, tol=1e-10)


@pytest.fixture(scope="module")
def kerr_free_solution():
    return integrate_wei_norman(fig2_params(0.0), 8 * math.pi, tol=1e-10)


class TestCriterion1MandelQ:
    def test_mandel_q_vanishes_for_50_random_kerr_states(self):
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(50):
            beta = rng.uniform(0.05, 2.0) * np.exp(2j * math.pi * rng.uniform())
            xi = rng.uniform(0.0, 2 * math.pi)
            q = mandel_q(KerrStateParams(beta, xi), 60).q
            worst = max(worst, abs(q))
        assert report("1", worst < 1e-9, f"max |Q| = {worst:.2e}")


class TestCriterion2Variances:
    def test_2a_closed_form_agrees_with_fock_moments(self):
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(50):
            beta = rng.uniform(0.1, 2.0) * np.exp(2j * math.pi * rng.uniform())
            xi = rng.uniform(0.0, 2 * math.pi)
            closed = quadrature_variance_ratios(KerrStateParams(beta, xi))
            direct = fock_variance_ratios(beta, xi)
            worst = max(worst, abs(closed[0] - direct[0]),
                        abs(closed[1] - direct[1]))
        assert report("2a", worst < 1e-8, f"max |closed - moments| = {worst:.2e}")

    def test_2b_position_squeezing_occurs(self):
        xis = np.linspace(1e-4, math.pi - 1e-4, 4001)
        min_q = min(quadrature_variance_ratios(KerrStateParams(0.5, x))[0]
                    for x in xis)
        assert report("2b", min_q < 1.0, f"min position ratio = {min_q:.6f}")

    def test_2c_momentum_never_squeezed_as_stated(self):
        # The exact Fock moments (which 2a pins to the closed form) show the
        # momentum ratio dipping to ~0.795 near xi = pi/2: the small-beta
        # two-component superposition formed there is momentum-squeezed.
        xis = np.linspace(1e-4, math.pi - 1e-4, 4001)
        min_p = min(quadrature_variance_ratios(KerrStateParams(0.5, x))[1]
                    for x in xis)
        ok = report("2c", min_p >= 1.0 - 1e-9,
                    f"min momentum ratio = {min_p:.6f}")
        assert ok, (f"momentum ratio drops to {min_p:.6f} < 1 near xi = pi/2 "
                    "(verified against direct Fock-space moments)")


class TestCriterion3Revivals:
    def test_3a_exact_wrap_revival_without_drive(self):
        worst = 0.0
        for omega0 in (1.0, 1.3):
            p = ModelParams(omega0=omega0, chi=0.25, drive=DriveSpec.zero(),
                            alpha=3.0)
            t = 2 * math.pi / 0.25
            sol = integrate_wei_norman(p, t, tol=1e-10)
            f = abs(autocorrelation(p, sol, t))
            expected = math.exp(-9.0 * (1 - math.cos(omega0 * t)))
            worst = max(worst, abs(f - expected))
        assert report("3a", worst < 1e-10, f"max wrap error = {worst:.2e}")

    @pytest.mark.filterwarnings("ignore:chi/omega0")
    def test_3b_revival_period_scales_inversely_with_kerr(self):
        dt = 0.01
        ok = True
        details = []
        for chi in (0.25, 0.5, 1.0):
            p = fig2_params(chi)
            t_rev = 2 * math.pi / chi
            sol = integrate_wei_norman(p, 1.1 * t_rev, tol=1e-9)
            times = np.arange(0.0, 1.1 * t_rev, dt)
            series = autocorrelation_series(p, sol, times)
            revivals = detect_revivals(series, 0.5)
            gap = np.abs(revivals - t_rev).min() if revivals.size else np.inf
            details.append(f"chi={chi}: |t - 2pi/chi| = {gap:.3f}")
            ok &= gap <= dt + 1e-9
        assert report("3b", ok, "; ".join(details))

    def test_3c_no_revival_above_half_without_kerr(self, kerr_free_solution):
        # The resonantly driven oscillator passes near its initial
        # phase-space point once more around t ~ 5.74 with |F|^2 ~ 0.68
        # (confirmed by direct integration) before drifting away for good.
        p = fig2_params(0.0)
        times = np.arange(0.0, 8 * math.pi, 0.01)
        series = autocorrelation_series(p, kerr_free_solution, times)
        window = times > 2.0
        revivals = detect_revivals(series, 0.5)
        revivals = revivals[revivals > 2.0]
        peak = series.abs_squared[window].max()
        ok = report("3c", revivals.size == 0,
                    f"max |F|^2 in (2, 8pi] = {peak:.4f}")
        assert ok, (f"|F|^2 reaches {peak:.4f} > 0.5 at t = "
                    f"{times[window][series.abs_squared[window].argmax()]:.2f} "
                    "(confirmed by the exact integrator)")


class TestCriterion4Husimi:
    def test_snapshot_peak_structure(self, fig2_solution):
        p = fig2_params(0.25)
        expected_counts = {0.0: 1, math.pi: 4, 2 * math.pi: 2, 8 * math.pi: 1}
        ok = True
        details = []
        for tau, count in expected_counts.items():
            grid = husimi_snapshot(p, fig2_solution, tau, resolution=201)
            peaks = find_grid_peaks(grid, 0.2)
            mass = grid.total_mass()
            ok &= len(peaks) == count and abs(mass - 1.0) < 1e-3
            details.append(f"tau={tau:.2f}: {len(peaks)} peaks, mass={mass:.4f}")
            if tau == 8 * math.pi:
                expected_pos = np.exp(-1j * tau) * fig2_solution.eta_at(tau)
                top = complex(peaks[0][0], peaks[0][1])
                ok &= abs(top - expected_pos) < 0.2
                details.append(f"revived peak offset = {abs(top - expected_pos):.3f}")
        assert report("4", ok, "; ".join(details))


class TestCriterion5TimeReparametrization:
    def test_exponential_mass_theorem(self):
        m0, w0, rate, n_trunc = 1.0, 1.0, 0.3, 40
        mass = MassSpec.exponential(m0, rate)
        psi0 = coherent_state(1.0, n_trunc)
        q = position_operator(n_trunc).matrix
        pm = momentum_operator(n_trunc).matrix
        q2, p2 = q @ q, pm @ pm

        def h_direct(t):
            m = m0 * math.exp(rate * t)
            return p2 / (2 * m) + 0.5 * m * w0 ** 2 * q2

        def h_star(tau):
            t = physical_time(mass, tau)
            w = m0 * math.exp(rate * t) * w0
            return 0.5 * p2 + 0.5 * w * w * q2

        def evolver_star(psi, tau):
            out = integrate_schrodinger(h_star, psi, tau, tol=1e-9)[-1]
            return FockState(out / np.linalg.norm(out), normalized=True)

        worst = 0.0
        for t_end in (2.5, 5.0):
            direct = integrate_schrodinger(h_direct, psi0, t_end, tol=1e-9)[-1]
            direct = FockState(direct / np.linalg.norm(direct),
                               normalized=True)
            mapped = evolve_via_timemap(psi0, mass, evolver_star, t_end)
            worst = max(worst, 1.0 - fidelity(mapped, direct))
        ok_fid = worst <= 1e-8

        rng = np.random.default_rng(20240817)
        worst_det = max(
            abs(heisenberg_coefficients(m0, w0, rate,
                                        float(t)).symplectic_determinant() - 1)
            for t in rng.uniform(0.0, 10.0, size=100))
        ok_det = worst_det <= 1e-10
        assert report("5", ok_fid and ok_det,
                      f"worst fidelity deficit = {worst:.2e}, "
                      f"worst |det - 1| = {worst_det:.2e}")


class TestCriterion6WeiNormanFidelity:
    def test_6a_exact_at_zero_kerr(self, kerr_free_solution):
        p = fig2_params(0.0)
        n_trunc = default_truncation(
            float(np.abs(kerr_free_solution.eta).max())) + 10
        psi0 = coherent_state(3.0, n_trunc)
        ts = np.array([math.pi, 4 * math.pi, 8 * math.pi])
        run = integrate_exact(p, psi0, 8 * math.pi, tol=1e-10,
                              sample_times=ts)
        worst = max(
            1.0 - fidelity(run.state_at(i),
                           evolved_state(p, kerr_free_solution, float(t),
                                         n_trunc))
            for i, t in enumerate(ts))
        assert report("6a", worst <= 1e-7,
                      f"worst deficit over t <= 8pi: {worst:.2e}")

    def test_6b_small_kerr_accuracy_as_stated(self):
        # Both integration routes agree that the resonant drive pumps the
        # mean occupation from 1 to ~16 by t = 10, far outside the
        # frozen-amplitude averaging regime; the overlap collapses instead
        # of staying above 0.99.
        p = ModelParams(omega0=1.0, chi=0.01,
                        drive=DriveSpec.cosine(1.0, 1.0), alpha=1.0)
        sol = integrate_wei_norman(p, 10.0, tol=1e-10)
        n_trunc = default_truncation(float(np.abs(sol.eta).max())) + 10
        psi0 = coherent_state(1.0, n_trunc)
        ts = np.linspace(0.5, 10.0, 20)
        run = integrate_exact(p, psi0, 10.0, tol=1e-10, sample_times=ts)
        min_fid = min(
            fidelity(run.state_at(i), evolved_state(p, sol, float(t), n_trunc))
            for i, t in enumerate(ts))
        ok = report("6b", min_fid >= 0.99, f"min fidelity = {min_fid:.6f}")
        assert ok, (f"fidelity drops to {min_fid:.2e} by t = 10 under the "
                    "resonant drive (mean occupation grows to ~16; both "
                    "independent integration routes agree)")

    def test_6c_figure_regime_fidelity_reported(self, fig2_solution):
        p = fig2_params(0.25)
        n_trunc = default_truncation(
            float(np.abs(fig2_solution.eta).max())) + 10
        psi0 = coherent_state(3.0, n_trunc)
        t_end = 8 * math.pi
        run = integrate_exact(p, psi0, t_end, tol=1e-10,
                              sample_times=np.array([t_end]))
        fid = fidelity(run.state_at(-1),
                       evolved_state(p, fig2_solution, t_end, n_trunc))
        # reported, not asserted: quantifies the averaging approximation
        report("6c", True, f"fidelity at tau = 8pi (chi=0.25, alpha=3): {fid:.4f}")
        assert 0.0 <= fid <= 1.0 + 1e-12


class TestCriterion7Eigenstructure:
    def test_residuals_and_norms(self):
        from kerrosc.driven import (
            displacement_amplitude,
            displaced_number_state,
            eigenfunction,
            energy_level,
            hamiltonian_matrix,
        )
        drive, freq = DriveSpec.constant(0.7), FrequencySpec(1.3, 0.1)
        t, n_trunc = 0.4, 60
        h = hamiltonian_matrix(drive, freq, t, n_trunc).matrix
        lam = displacement_amplitude(drive, freq, t)
        worst_resid = 0.0
        for n in range(6):
            state = displaced_number_state(n, lam, n_trunc)
            e_n = energy_level(n, drive, freq, t)
            worst_resid = max(worst_resid, float(np.linalg.norm(
                h @ state.amplitudes - e_n * state.amplitudes)))
        q = np.linspace(-14, 14, 4001)
        worst_norm = max(
            abs(np.trapezoid(
                eigenfunction(n, q, drive, freq, t) ** 2, q) - 1.0)
            for n in range(6))
        ok = worst_resid <= 1e-6 and worst_norm <= 1e-8
        assert report("7", ok, f"worst residual = {worst_resid:.2e}, "
                               f"worst norm error = {worst_norm:.2e}")


class TestCriterion8ConvergenceOrder:
    def test_halving_tolerance_quarters_the_deficit(self):
        p = fig2_params(0.2, alpha=1.0)
        t_end = 6.0
        psi0 = coherent_state(1.0, 60)
        ref = FockState(integrate_exact(
            p, psi0, t_end, tol=1e-8,
            sample_times=np.array([t_end])).states[-1])
        deficits = []
        for tol in (4e-4, 2e-4):
            run = integrate_exact(p, psi0, t_end, tol=tol,
                                  sample_times=np.array([t_end]))
            deficits.append(1.0 - fidelity(ref, FockState(run.states[-1])))
        ratio = deficits[0] / deficits[1]
        assert report("8", ratio >= 4.0,
                      f"deficit improvement factor = {ratio:.2f}")
