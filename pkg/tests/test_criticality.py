"""Tests for gap scaling: the 3/4 coupling exponent, the quadratic detuning
closure, and the system-size diagnostic."""

import math

import numpy as np
import pytest

from tpstark import criticality
from tpstark.model import ModelParams, coupling_from_x


class TestGap:
    def test_zero_coupling_closed_form(self):
        # g = 0 levels are n(1 -+ U) -+ delta/2; with delta < 1 - U the two
        # lowest are -+delta/2, so the gap is exactly delta
        r = criticality.gap(ModelParams(delta=0.5, stark=0.1, coupling=0.0))
        assert r.converged
        assert r.value == pytest.approx(0.50, abs=1e-12)

    def test_free_point_gap_is_zero(self):
        # U = delta = 0 decouples the qubit: every level is doubly degenerate
        for g in (0.1, 0.3, 0.45):
            r = criticality.gap(ModelParams(delta=0.0, stark=0.0, coupling=g))
            assert r.converged
            assert abs(r.value) < 1e-10

    def test_gap_decreases_toward_collapse(self):
        vals = []
        for x in (2.0, 3.0, 4.0):
            p = ModelParams(delta=0.2, stark=0.2, coupling=coupling_from_x(x, 0.2))
            r = criticality.gap(p)
            assert r.converged
            assert r.value > 0.0
            vals.append(r.value)
        assert vals[0] > vals[1] > vals[2]

    def test_gap_curve_validates_ordering(self):
        with pytest.raises(ValueError):
            criticality.GapCurve(x=np.array([1.0, 1.0]), gaps=np.array([0.1, 0.1]),
                                 converged=np.array([True, True]), delta=0.2, stark=0.2)


class TestGapExponent:
    @pytest.mark.parametrize("stark", [0.20, 0.50])
    def test_three_quarters(self, stark):
        fit = criticality.gap_exponent(stark)
        assert fit.n_excluded == 0
        assert fit.exponent == pytest.approx(0.75, abs=0.02)
        assert fit.r_squared >= 0.999
        assert 0.0 <= fit.r_squared <= 1.0

    def test_fit_is_stable(self):
        base = criticality.gap_exponent(0.2)
        halved = criticality.gap_exponent(0.2, n_points=6)
        shifted = criticality.gap_exponent(0.2, x_min=2.0, x_max=4.5)
        assert abs(halved.exponent - base.exponent) < 0.02
        assert abs(shifted.exponent - base.exponent) < 0.02

    def test_window_validation(self):
        with pytest.raises(ValueError):
            criticality.gap_exponent(0.2, x_min=3.0, x_max=2.0)
        with pytest.raises(ValueError):
            criticality.gap_exponent(0.2, n_points=2)


class TestGapVsDelta:
    def test_minimum_sits_at_stark_value(self):
        grid = np.round(np.arange(0.247, 0.2535, 1e-3), 6)
        scan = criticality.gap_vs_delta(0.25, grid, fit_side=False)
        assert scan.converged.all()
        assert np.all(scan.gaps > 0.0)
        assert grid[np.argmin(scan.gaps)] == pytest.approx(0.25, abs=1e-12)

    def test_quadratic_fit_at_cutoff_regulator(self):
        # evaluated exactly at g_c, the Fock cutoff regularizes the collapse
        # and the gap is proportional to (delta - U)^2 to high quality
        grid = np.round(np.arange(0.15, 0.2499, 0.01), 6)
        scan = criticality.gap_vs_delta(0.25, grid, detuning=0.0,
                                        fixed_truncation=16384)
        assert scan.fit is not None
        assert scan.fit.r_squared >= 0.999
        assert scan.fit.slope > 0.0
        assert scan.method == "ed-fixed-k16384"

    def test_quadratic_fit_at_coupling_regulator(self):
        # backing the coupling off to g_c(1 - 1e-6) leaves a residual gap
        # ~ detuning^(3/4) that visibly bends the same fit; the law is still
        # approximately quadratic but the fit quality drops below 0.999
        grid = np.round(np.arange(0.15, 0.2499, 0.01), 6)
        scan = criticality.gap_vs_delta(0.25, grid)
        assert scan.fit is not None
        assert 0.97 <= scan.fit.r_squared < 0.9995
        assert scan.coupling < 0.5 * math.sqrt(1.0 - 0.25**2)

    def test_gap_grows_away_from_minimum(self):
        grid = np.array([0.21, 0.23, 0.25, 0.27, 0.29])
        scan = criticality.gap_vs_delta(0.25, grid, fit_side=False)
        mid = 2
        assert np.all(np.diff(scan.gaps[:mid + 1]) < 0.0)
        assert np.all(np.diff(scan.gaps[mid:]) > 0.0)


class TestSystemSize:
    def test_reference_value(self):
        assert criticality.system_size(0.20, 0.25) == pytest.approx(5.0, rel=1e-12)
        assert criticality.system_size(0.30, 0.25) == pytest.approx(5.0, rel=1e-12)

    def test_diverges_only_at_collapse_condition(self):
        assert criticality.system_size(0.25, 0.25) == math.inf
        rng = np.random.default_rng(9)
        for _ in range(30):
            delta = rng.uniform(0.0, 2.0)
            u = rng.uniform(-0.9, 0.9)
            if delta == u:
                continue
            assert math.isfinite(criticality.system_size(delta, u))

    def test_zero_stark_limit(self):
        assert criticality.system_size(0.4, 0.0) == 0.0
