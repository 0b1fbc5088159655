"""Exact diagonalization: sector construction, convergence, completeness."""

import math

import numpy as np
import pytest
from scipy.linalg import eigh, eigvalsh_tridiagonal

from tpstark.ed import (
    ConvergedSpectrum,
    build_sector,
    converge,
    full_hamiltonian_matrix,
    sector_eigenvalues,
)
from tpstark.model import (
    ModelParams,
    Q_EVEN,
    Q_ODD,
    SectorLabel,
    all_sectors,
    g_critical,
)


def closed_form_g0_levels(delta, u, sector, count):
    """g = 0 sector spectrum: E = n_k - s_k (delta/2 + U n_k)."""
    k = np.arange(count)
    n = 2 * k + sector.photon_offset
    s = np.where(k % 2 == 0, sector.parity, -sector.parity)
    return np.sort(n - s * (delta / 2.0 + u * n))[:count]


class TestBuildSector:
    def test_reference_matrix_elements(self):
        p = ModelParams(delta=0.5, stark=0.1, coupling=0.4)
        even = build_sector(p, SectorLabel(Q_EVEN, 1), 8)
        # k = 0: n = 0, s = +1
        assert even.diag[0] == pytest.approx(-0.25, abs=1e-15)
        assert even.offdiag[0] == pytest.approx(0.4 * math.sqrt(2.0), abs=1e-15)
        odd = build_sector(p, SectorLabel(Q_ODD, 1), 8)
        # k = 0: n = 1, s = +1
        assert odd.diag[0] == pytest.approx(0.65, abs=1e-15)
        assert odd.offdiag[0] == pytest.approx(0.4 * math.sqrt(6.0), abs=1e-15)

    def test_spin_signs_alternate(self):
        p = ModelParams(delta=0.3, stark=0.2, coupling=0.1)
        m = build_sector(p, SectorLabel(Q_EVEN, -1), 6)
        n = 2 * np.arange(6)
        s = -np.array([1, -1, 1, -1, 1, -1], dtype=float)
        assert np.allclose(m.diag, n - s * (0.15 + 0.2 * n), atol=1e-15)

    def test_offdiag_positive(self):
        p = ModelParams(delta=0.3, stark=0.2, coupling=0.1)
        for sector in all_sectors():
            m = build_sector(p, sector, 50)
            assert np.all(m.offdiag > 0)

    def test_rejects_tiny_truncation(self):
        p = ModelParams(delta=0.3, stark=0.2, coupling=0.1)
        with pytest.raises(ValueError):
            build_sector(p, SectorLabel(Q_EVEN, 1), 1)


class TestEigenvalues:
    def test_g0_diagonal_sorted(self):
        p = ModelParams(delta=0.5, stark=0.1, coupling=0.0)
        m = build_sector(p, SectorLabel(Q_EVEN, 1), 64)
        got = sector_eigenvalues(m, 3)
        assert np.allclose(got, [-0.25, 2.45, 3.35], atol=1e-12)

    def test_matches_dense_solver(self):
        p = ModelParams(delta=0.7, stark=0.3, coupling=0.3)
        m = build_sector(p, SectorLabel(Q_ODD, -1), 200)
        got = sector_eigenvalues(m, 12)
        dense = np.diag(m.diag) + np.diag(m.offdiag, 1) + np.diag(m.offdiag, -1)
        ref = np.sort(eigh(dense, eigvals_only=True))[:12]
        assert np.allclose(got, ref, atol=1e-10)


class TestConvergence:
    def test_variational_monotonicity(self):
        # doubling the truncation never raises any level
        rng = np.random.default_rng(3)
        for _ in range(20):
            u = rng.uniform(-0.6, 0.6)
            p = ModelParams(
                delta=rng.uniform(0.0, 2.0),
                stark=u,
                coupling=rng.uniform(0.1, 0.9) * g_critical(u),
            )
            sector = SectorLabel(rng.choice([Q_EVEN, Q_ODD]), rng.choice([1, -1]))
            lo = sector_eigenvalues(build_sector(p, sector, 64), 6)
            hi = sector_eigenvalues(build_sector(p, sector, 128), 6)
            assert np.all(hi <= lo + 1e-12)

    def test_sector_completeness(self):
        # the four sector matrices exhaust the full truncated spectrum
        p = ModelParams(delta=0.5, stark=0.1, coupling=0.4)
        n_photon = 40
        ref = np.sort(eigh(full_hamiltonian_matrix(p, n_photon), eigvals_only=True))
        pieces = []
        for sector in all_sectors():
            k_rows = (n_photon - sector.photon_offset) // 2 + 1
            m = build_sector(p, sector, k_rows)
            pieces.append(eigvalsh_tridiagonal(m.diag, m.offdiag))
        union = np.sort(np.concatenate(pieces))
        assert union.shape == ref.shape
        assert np.allclose(union, ref, atol=1e-10)

    def test_sector_completeness_sigma_z_basis(self):
        p = ModelParams(delta=0.5, stark=0.1, coupling=0.4)
        a = np.sort(eigh(full_hamiltonian_matrix(p, 30, basis="sigma_x"), eigvals_only=True))
        b = np.sort(eigh(full_hamiltonian_matrix(p, 30, basis="sigma_z"), eigvals_only=True))
        assert np.allclose(a, b, atol=1e-10)

    def test_converges_quickly_at_g0(self):
        p = ModelParams(delta=0.5, stark=0.1, coupling=0.0)
        out = converge(p, SectorLabel(Q_EVEN, 1), count=5, tol=1e-12)
        assert out.converged
        assert out.k_used == 512  # first doubling suffices: diagonal matrix
        assert np.allclose(out.energies, closed_form_g0_levels(0.5, 0.1, SectorLabel(Q_EVEN, 1), 5), atol=1e-12)

    def test_all_sector_union_and_labels(self):
        p = ModelParams(delta=0.5, stark=0.1, coupling=0.0)
        out = converge(p, count=4, tol=1e-12)
        assert np.allclose(out.energies, [-0.25, 0.25, 0.65, 1.35], atol=1e-13)
        assert out.labels[0] == SectorLabel(Q_EVEN, 1)
        assert out.labels[1] == SectorLabel(Q_EVEN, -1)
        assert out.labels[2] == SectorLabel(Q_ODD, 1)
        assert out.labels[3] == SectorLabel(Q_ODD, -1)

    def test_unconverged_flagged(self):
        u = 0.2
        p = ModelParams(delta=0.2, stark=u, coupling=g_critical(u) * (1.0 - 1e-8))
        out = converge(p, SectorLabel(Q_EVEN, 1), count=2, tol=1e-12, k_start=16, k_max=64)
        assert not out.converged
        assert out.k_used == 64
        assert out.residual > 1e-12

    def test_double_degeneracy_at_free_point(self):
        # U = delta = 0: every level is doubly degenerate, 2(n+q)beta0 - 1/2
        g = 0.3
        p = ModelParams(delta=0.0, stark=0.0, coupling=g)
        beta0 = math.sqrt(1.0 - 4.0 * g * g)
        for q in (Q_EVEN, Q_ODD):
            pair = [
                converge(p, SectorLabel(q, par), count=6, tol=1e-12).energies
                for par in (1, -1)
            ]
            assert np.allclose(pair[0], pair[1], atol=1e-10)
            expect = 2.0 * (np.arange(6) + q) * beta0 - 0.5
            assert np.allclose(pair[0], expect, atol=1e-10)

    def test_lower_bound_at_balanced_point(self):
        # delta = U: the spectrum stays above -1/2 all the way to collapse
        u = 0.2
        for frac in (0.5, 1.0 - 1e-2, 1.0 - 1e-4):
            p = ModelParams(delta=u, stark=u, coupling=g_critical(u) * frac)
            out = converge(p, count=8, tol=1e-9)
            assert np.all(out.energies >= -0.5 - 1e-6)

    def test_richardson_not_worse(self):
        u = 0.2
        p = ModelParams(delta=0.2, stark=u, coupling=g_critical(u) * (1 - 1e-3))
        plain = converge(p, SectorLabel(Q_EVEN, 1), count=2, tol=1e-11)
        extra = converge(p, SectorLabel(Q_EVEN, 1), count=2, tol=1e-11, richardson=True)
        assert extra.method == "ed+richardson"
        assert np.allclose(plain.energies, extra.energies, atol=1e-8)
