"""Tests for the collapse-point analysis: classification, the effective
inverse-square well, the geometric bound-state ladder, and the positivity
certificate at delta = U."""

import math

import numpy as np
import pytest
from scipy.linalg import eigvalsh_tridiagonal

from tpstark import collapse, ed
from tpstark.model import ModelParams, Q_EVEN, SectorLabel, g_critical, threshold_energy


class TestClassification:
    def test_equal_detuning_is_full_collapse(self):
        c = collapse.classify(0.2, 0.2)
        assert c.kind is collapse.CollapseKind.FULL_COLLAPSE
        assert c.collapse_energy_if_full == -0.5
        # at delta = U the threshold itself sits at -1/2
        assert c.threshold_energy == pytest.approx(-0.5, abs=1e-15)

    def test_generic_detuning_gives_ladder(self):
        c = collapse.classify(5.0, 0.25)
        assert c.kind is collapse.CollapseKind.INFINITE_BOUND_STATES
        assert c.collapse_energy_if_full is None
        assert c.threshold_energy == pytest.approx(-1.09375, abs=1e-15)

    def test_free_point_counts_as_full_collapse(self):
        assert collapse.classify(0.0, 0.0).kind is collapse.CollapseKind.FULL_COLLAPSE

    def test_tolerance_boundary(self):
        assert collapse.classify(0.3 + 5e-13, 0.3).kind is collapse.CollapseKind.FULL_COLLAPSE
        assert collapse.classify(0.3 + 5e-12, 0.3).kind is collapse.CollapseKind.INFINITE_BOUND_STATES

    def test_dichotomy_is_exhaustive(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            delta = rng.uniform(0.0, 6.0)
            u = rng.uniform(-0.95, 0.95)
            c = collapse.classify(delta, u)
            assert (c.kind is collapse.CollapseKind.FULL_COLLAPSE) == (abs(delta - u) < 1e-12)
            assert c.threshold_energy == pytest.approx(threshold_energy(delta, u), abs=1e-15)


class TestNuSquared:
    def test_reference_value_is_exact(self):
        # depth (19/8)^2 is binary-exact, so the comparison can be, too
        assert collapse.nu_squared(5.0, 0.25, 0.0) == -5.390625

    def test_reference_decay_numbers(self):
        nu = math.sqrt(-collapse.nu_squared(5.0, 0.25))
        assert nu == pytest.approx(2.321772, abs=1e-6)
        assert math.pi / nu == pytest.approx(1.3531, abs=2e-4)
        assert math.exp(-math.pi / nu) == pytest.approx(0.25844, abs=1e-5)

    def test_equal_detuning_quarter(self):
        assert collapse.nu_squared(0.4, 0.4, 0.0) == pytest.approx(0.25, abs=1e-15)

    def test_equal_detuning_finite_kappa(self):
        u, k2 = 0.4, 0.9
        expect = 0.25 - u**2 * k2**2
        assert collapse.nu_squared(u, u, k2) == pytest.approx(expect, rel=1e-15)

    def test_small_kappa_limit(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            delta = rng.uniform(0.0, 4.0)
            u = rng.uniform(-0.9, 0.9)
            if u == 0.0:
                continue
            expect = (1.0 - (delta - u) ** 2) / 4.0
            assert collapse.nu_squared(delta, u, 0.0) == pytest.approx(expect, rel=1e-12)

    def test_undefined_at_zero_stark(self):
        with pytest.raises(ValueError):
            collapse.nu_squared(0.7, 0.0)
        # the free point is fine: the well is absent and nu^2 = 1/4
        assert collapse.nu_squared(0.0, 0.0) == 0.25


class TestEffectivePotential:
    def test_shape(self):
        v = collapse.effective_potential(5.0, 0.25, kappa_sq=0.3)
        x = np.linspace(0.0, 50.0, 2001)
        vals = v(x)
        assert np.all(vals <= 0.0)
        assert np.all(np.diff(vals) > 0.0)  # monotone increasing on [0, inf)
        assert v(-3.0) == v(3.0)
        assert v(0.0) == pytest.approx(-v.depth, rel=1e-15)
        assert abs(v(1e6)) < 1e-11

    def test_depth_vanishes_only_at_equal_detuning(self):
        assert collapse.depth_coefficient(0.3, 0.3, 0.0) == 0.0
        assert collapse.depth_coefficient(0.31, 0.3, 0.0) > 0.0
        # finite kappa^2 restores a well even at delta = U
        assert collapse.depth_coefficient(0.3, 0.3, 1.0) > 0.0


class TestLadderRatios:
    def test_reference_ladder(self):
        ladder = collapse.ladder_ratios(5.0, 0.25, n_max=6)
        assert ladder.ratios[0] == 1.0
        assert ladder.ratios[1] == pytest.approx(0.25844, abs=1e-5)
        assert np.all(np.diff(ladder.ratios) < 0.0)
        steps = np.diff(np.log(ladder.ratios))
        assert steps == pytest.approx(-ladder.decay_rate, rel=1e-12)

    def test_no_ladder_at_equal_detuning(self):
        with pytest.raises(ValueError, match="no exponential ladder"):
            collapse.ladder_ratios(0.25, 0.25, n_max=4)

    def test_no_ladder_for_weak_detuning(self):
        # (delta-U)^2 < 1 keeps nu^2 positive: outside the geometric regime
        with pytest.raises(ValueError):
            collapse.ladder_ratios(0.5, 0.25, n_max=4)


class TestFiniteDifferenceLadder:
    def test_equal_detuning_returns_empty(self):
        r = collapse.fd_bound_levels(0.3, 0.3, count=4)
        assert len(r.kappa_sq) == 0

    def test_half_line_operator_matches_free_box(self):
        # depth 0: even modes of the box, lambda_k = ((k+1/2) pi / L)^2
        diag, off, x, h = collapse.half_line_operator(lambda x: 0.0 * x, 10.0, 4000)
        lam = eigvalsh_tridiagonal(diag, off, select="i", select_range=(0, 2))
        expect = ((np.arange(3) + 0.5) * np.pi / 10.0) ** 2
        assert lam == pytest.approx(expect, rel=1e-5)

    def test_no_negative_modes_at_full_collapse(self):
        # -d^2/dx^2 + kappa^4 (1 - U^2/(x^2+1)) stays nonnegative: the
        # self-consistent problem at delta = U has no bound state at all
        for u, k2 in [(0.3, 0.7), (0.8, 1.3), (0.5, 0.2)]:
            k4 = k2 * k2

            def w(x, k4=k4, u=u):
                return k4 * (1.0 - u * u / (x * x + 1.0))

            diag, off, _, _ = collapse.half_line_operator(w, 120.0, 6000)
            low = eigvalsh_tridiagonal(diag, off, select="i", select_range=(0, 0))[0]
            assert low >= -1e-10

    def test_reference_ladder_slope(self):
        r = collapse.fd_bound_levels(5.0, 0.25, count=5, auto_domain=True,
                                     check_grid=False, node_budget=600_000)
        assert len(r.kappa_sq) == 5
        assert np.all(r.kappa_sq > 0.0)
        assert np.all(np.diff(r.kappa_sq) < 0.0)
        # residual of the self-consistency on the reporting grid
        for k, (k2, l_k, n_k) in enumerate(zip(r.kappa_sq, r.domain_half_width, r.grid_nodes)):
            depth = collapse.depth_coefficient(5.0, 0.25, k2)
            lam = collapse._even_level(depth, k, l_k, int(n_k))
            assert abs(lam + k2 * k2) < 1e-9
        # the ln-spacing approaches -pi/|nu| from above as n grows
        steps = np.diff(np.log(r.kappa_sq))
        rate = collapse.ladder_ratios(5.0, 0.25, 1).decay_rate
        assert steps[-1] == pytest.approx(-rate, rel=0.12)
        assert steps[-2] == pytest.approx(-rate, rel=0.25)
        assert np.all(np.diff(steps) < 0.0)

    def test_grid_flags_are_honest(self):
        # deliberately coarse grid: every level must be flagged
        coarse = collapse.fd_bound_levels(5.0, 0.25, l_x=60.0, n_x=1501, count=2)
        assert not coarse.grid_converged.any()
        # reference grid: the ground level meets the 1e-6 doubling criterion
        fine = collapse.fd_bound_levels(5.0, 0.25, count=1)
        assert fine.grid_converged[0]
        assert fine.kappa_sq[0] == pytest.approx(1.5784655, abs=2e-6)


class TestPositivity:
    def test_random_state_witness(self):
        cert = collapse.positivity_witness(0.25, n_states=300, truncation=120, seed=1)
        assert cert.min_expectation >= -1e-10
        assert cert.excludes_below >= -0.5 - 1e-10

    def test_witness_at_strong_stark(self):
        cert = collapse.positivity_witness(0.5, n_states=300, truncation=120, seed=2)
        assert cert.min_expectation >= -1e-10

    def test_ground_state_touches_zero(self):
        # the certificate is sharp: the lowest level of H0 at delta = U sinks
        # toward 0 from above as the truncation grows (like 1/truncation)
        lows = [np.linalg.eigvalsh(collapse.critical_h0_matrix(0.25, truncation=n))[0]
                for n in (80, 160, 320)]
        assert all(low >= -1e-10 for low in lows)
        assert lows[2] < lows[1] < lows[0]
        assert lows[2] < 0.004

    def test_quadrature_form_identity(self):
        # <Psi|H(g_c)+1/2|Psi> = <phi1|(a+a')^2/2|phi1> + <phi2|-(a-a')^2/2|phi2>
        # with phi1 = alpha psi1 - beta psi2, phi2 = alpha psi2 - beta psi1
        n = 60
        u = 0.4
        h0 = collapse.critical_h0_matrix(u, truncation=n)
        xf = collapse.position_quadratic_form(n)
        pf = collapse.momentum_quadratic_form(n)
        alpha, mix = collapse.spinor_mixing(u)
        gamma = 1.0 / math.sqrt(1.0 - u * u)
        assert alpha**2 - mix**2 == pytest.approx(1.0 / gamma, rel=1e-14)
        assert alpha**2 + mix**2 == pytest.approx(1.0, rel=1e-14)
        rng = np.random.default_rng(11)
        for _ in range(25):
            psi1 = rng.standard_normal(n)
            psi2 = rng.standard_normal(n)
            full = np.concatenate([psi1, psi2])
            full /= np.linalg.norm(full)
            psi1, psi2 = full[:n], full[n:]
            lhs = full @ h0 @ full
            phi1 = alpha * psi1 - mix * psi2
            phi2 = alpha * psi2 - mix * psi1
            rhs = phi1 @ xf @ phi1 + phi2 @ pf @ phi2
            assert lhs == pytest.approx(rhs, abs=1e-12 * max(1.0, abs(lhs)))
            assert lhs >= -1e-12

    def test_quadrature_forms_are_positive(self):
        xf = collapse.position_quadratic_form(80)
        pf = collapse.momentum_quadratic_form(80)
        assert np.linalg.eigvalsh(xf)[0] >= -1e-12
        assert np.linalg.eigvalsh(pf)[0] >= -1e-12


class TestLadderAgainstDiagonalization:
    def test_near_critical_spectrum_matches_ratio(self):
        # levels below threshold at g just under g_c follow the geometric law;
        # successive ladder levels alternate between the two q = 1/4 parities,
        # so the comparison needs the union of both
        delta, u = 5.0, 0.25
        g = g_critical(u) * (1.0 - 1e-6)
        params = ModelParams(delta=delta, stark=u, coupling=g)
        spec = ed.converge(params,
                           sectors=[SectorLabel(Q_EVEN, 1), SectorLabel(Q_EVEN, -1)],
                           count=16, tol=1e-10, k_start=2**15, k_max=2**19)
        assert spec.converged
        e_thr = threshold_energy(delta, u)
        below = spec.energies[spec.energies < e_thr]
        assert len(below) >= 6
        k2 = (e_thr - below) / (1.0 - u * u)
        ratios = k2[1:] / k2[:-1]
        expect = math.exp(-collapse.ladder_ratios(delta, u, 1).decay_rate)
        # mid-ladder ratios sit in the asymptotic window; the last level is
        # visibly bent by the 1e-6 coupling detuning, so check it loosely and
        # check the overall decay rate through the fitted mean gap
        assert ratios[2] == pytest.approx(expect, rel=0.15)
        assert ratios[3] == pytest.approx(expect, rel=0.15)
        assert ratios[4] == pytest.approx(expect, rel=0.35)
        mean_gap = (math.log(k2[5]) - math.log(k2[0])) / 5.0
        assert mean_gap == pytest.approx(-collapse.ladder_ratios(delta, u, 1).decay_rate, rel=0.15)

    def test_ladder_alternates_parity(self):
        # the even-q ladder interleaves: consecutive below-threshold levels
        # carry opposite reflection parity
        delta, u = 5.0, 0.25
        g = g_critical(u) * (1.0 - 1e-6)
        params = ModelParams(delta=delta, stark=u, coupling=g)
        spec = ed.converge(params,
                           sectors=[SectorLabel(Q_EVEN, 1), SectorLabel(Q_EVEN, -1)],
                           count=12, tol=1e-10, k_start=2**15, k_max=2**19)
        e_thr = threshold_energy(delta, u)
        pars = [lab.parity for lab, e in zip(spec.labels, spec.energies) if e < e_thr]
        assert len(pars) >= 5
        assert all(a != b for a, b in zip(pars, pars[1:]))


class TestFaddeev:
    def test_quadrature_matches_closed_form(self):
        for delta, u, x in [(5.0, 0.25, 1e3), (1.0, 0.4, 1e5), (0.7, -0.3, 50.0)]:
            depth = collapse.depth_coefficient(delta, u, 0.0)
            expect = depth * (2.0 * math.atan(x) + math.log1p(x * x))
            got = collapse.faddeev_integral(delta, u, x)
            assert got == pytest.approx(expect, rel=1e-9)

    def test_log_divergence_iff_detuned(self):
        # the integral grows like 2*depth*ln(x): finite-bound-state test fails
        slope = collapse.faddeev_log_slope(5.0, 0.25)
        assert slope == pytest.approx(2.0 * collapse.depth_coefficient(5.0, 0.25), rel=2e-3)
        assert slope > 0.1
        assert collapse.faddeev_log_slope(0.3, 0.3) == 0.0

    def test_slope_positive_on_random_detunings(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            delta = rng.uniform(0.0, 5.0)
            u = rng.uniform(-0.9, 0.9)
            if abs(delta - u) < 1e-3:
                continue
            assert collapse.faddeev_log_slope(delta, u) > 0.0
