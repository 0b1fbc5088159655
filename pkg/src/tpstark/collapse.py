"""Spectral structure exactly at the collapse coupling.

At g = g_c the discrete spectrum reorganizes around the threshold energy
E_thr = -1/(2 gamma^2) - U delta / 2.  Two regimes exist:

* delta = U (including the free point delta = U = 0): every level collapses
  onto -1/2 and nothing survives below it; the shifted critical Hamiltonian
  H0 = H(g_c) + 1/2 is positive semidefinite.
* delta != U: an infinite ladder of bound states accumulates at E_thr from
  below, governed by a one-dimensional Schroedinger problem with an
  attractive well V(x) = -depth / (x^2 + 1), depth = [U kappa^2 + (U-delta)/2]^2,
  whose inverse-square tail makes the near-threshold levels geometric:
  kappa_n^2 / kappa_0^2 = exp(-pi n / |nu|), nu^2 = 1/4 - depth|_{kappa^2->0}.

kappa^2 = gamma^2 (E_thr - E) > 0 parameterizes how far a bound level sits
below threshold.  The self-consistency (kappa^2 enters both the eigenvalue
-kappa^4 and the potential) is resolved by outer root finding on
F(kappa^2) = lambda_k(kappa^2) + kappa^4 for each level index k, with the
eigenvalue lambda_k taken from a finite-difference discretization restricted
to even parity (the q = 1/4 sector carries the ladder).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.linalg import eigvalsh_tridiagonal
from scipy.optimize import brentq

from . import ed
from .model import ModelParams, g_critical, threshold_energy

__all__ = [
    "CollapseKind",
    "CollapseClassification",
    "classify",
    "depth_coefficient",
    "EffectivePotential",
    "effective_potential",
    "nu_squared",
    "BoundLadder",
    "ladder_ratios",
    "FDLevels",
    "fd_bound_levels",
    "half_line_operator",
    "PositivityCertificate",
    "critical_h0_matrix",
    "positivity_witness",
    "position_quadratic_form",
    "momentum_quadratic_form",
    "spinor_mixing",
    "faddeev_integral",
    "faddeev_log_slope",
]

CLASSIFY_TOL = 1e-12


class CollapseKind(enum.Enum):
    FULL_COLLAPSE = "full-collapse"
    INFINITE_BOUND_STATES = "infinite-bound-states"


@dataclass(frozen=True)
class CollapseClassification:
    kind: CollapseKind
    threshold_energy: float
    collapse_energy_if_full: float | None


def classify(delta: float, stark: float, tol: float = CLASSIFY_TOL) -> CollapseClassification:
    """Full collapse iff delta = U (within tol); otherwise a bound-state ladder.

    The dichotomy is structurally exact: the effective well depth vanishes
    identically at delta = U and is strictly positive otherwise.
    """
    if delta < 0.0 or not abs(stark) < 1.0:
        raise ValueError("need delta >= 0 and |U| < 1")
    full = abs(delta - stark) < tol
    return CollapseClassification(
        kind=CollapseKind.FULL_COLLAPSE if full else CollapseKind.INFINITE_BOUND_STATES,
        threshold_energy=threshold_energy(delta, stark),
        collapse_energy_if_full=-0.5 if full else None,
    )


def depth_coefficient(delta: float, stark: float, kappa_sq: float = 0.0) -> float:
    """Well depth [U kappa^2 + (U - delta)/2]^2 of V(x) = -depth/(x^2+1).

    Written in multiplied-out form so the U -> 0 limit is regular.
    """
    return (stark * kappa_sq + (stark - delta) / 2.0) ** 2


@dataclass(frozen=True)
class EffectivePotential:
    delta: float
    stark: float
    kappa_sq: float
    depth: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return -self.depth / (x * x + 1.0)


def effective_potential(delta: float, stark: float, kappa_sq: float = 0.0) -> EffectivePotential:
    if kappa_sq < 0.0:
        raise ValueError("kappa^2 must be nonnegative")
    return EffectivePotential(delta=delta, stark=stark, kappa_sq=kappa_sq,
                              depth=depth_coefficient(delta, stark, kappa_sq))


def nu_squared(delta: float, stark: float, kappa_sq: float = 0.0) -> float:
    """Squared order of the far-field Bessel equation, 1/4 - depth.

    Negative values make the order imaginary and produce the geometric
    level ladder.  The kappa^2 -> 0 default gives [1 - (delta-U)^2]/4.
    """
    if stark == 0.0 and delta != 0.0:
        raise ValueError("nu^2 involves delta/U and is undefined at U = 0")
    if kappa_sq < 0.0:
        raise ValueError("kappa^2 must be nonnegative")
    return 0.25 - depth_coefficient(delta, stark, kappa_sq)


@dataclass(frozen=True)
class BoundLadder:
    nu2: float
    ratios: np.ndarray
    levels: np.ndarray | None = None

    @property
    def decay_rate(self) -> float:
        """pi / |nu|, the ln-ratio spacing between successive levels."""
        return math.pi / math.sqrt(-self.nu2)


def ladder_ratios(delta: float, stark: float, n_max: int) -> BoundLadder:
    """Asymptotic near-threshold ratios kappa_n^2/kappa_0^2 = exp(-pi n/|nu|)."""
    nu2 = nu_squared(delta, stark, 0.0)
    if nu2 >= 0.0:
        raise ValueError(
            "no exponential ladder: nu^2 >= 0 (delta = U has zero bound "
            "states; nearby detunings fall outside the inverse-square regime)")
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    n = np.arange(n_max + 1)
    return BoundLadder(nu2=nu2, ratios=np.exp(-math.pi * n / math.sqrt(-nu2)))


# -- finite-difference eigenproblem ------------------------------------------

def half_line_operator(potential, l_x: float, n_half: int):
    """Symmetric tridiagonal for -d^2/dx^2 + V on even functions of [0, l_x].

    Nodes sit at x_j = j h, j = 0..n_half-1, with a hard wall at x = l_x.
    Even parity means phi(-h) = phi(h); folding that into row 0 gives an
    asymmetric stencil, fixed by rescaling the j = 0 component by sqrt(2),
    which turns the (0, 1) couplings into -sqrt(2)/h^2 without changing the
    spectrum.  Returns (diag, offdiag, x, h).
    """
    if n_half < 16:
        raise ValueError("need at least 16 grid nodes")
    h = l_x / n_half
    x = np.arange(n_half) * h
    diag = 2.0 / h**2 + potential(x)
    offdiag = np.full(n_half - 1, -1.0 / h**2)
    offdiag[0] = -math.sqrt(2.0) / h**2
    return diag, offdiag, x, h


def _even_level(depth: float, level: int, l_x: float, n_half: int) -> float:
    diag, offdiag, _, _ = half_line_operator(
        lambda x: -depth / (x * x + 1.0), l_x, n_half)
    return float(eigvalsh_tridiagonal(
        diag, offdiag, select="i", select_range=(level, level))[0])


@dataclass(frozen=True)
class FDLevels:
    """Self-consistent bound levels kappa_n^2 below threshold (q = 1/4)."""

    kappa_sq: np.ndarray
    grid_converged: np.ndarray
    domain_half_width: np.ndarray
    grid_nodes: np.ndarray
    delta: float
    stark: float


def _solve_level(delta, stark, level, l_x, n_half, fixed_tol):
    """Root of F(k2) = lambda_level(k2) + k2^2 on this grid, or None."""
    # tridiagonal bisection resolves eigenvalues to ~eps * ||T|| ~ eps * 2/h^2,
    # so the residual check cannot be tighter than that on fine grids
    h = l_x / n_half
    tol = max(fixed_tol, 16.0 * np.finfo(float).eps * 2.0 / h**2)

    def f_val(k2):
        return _even_level(depth_coefficient(delta, stark, k2), level, l_x, n_half) + k2 * k2

    # fixed-point preconditioning: k2 <- sqrt(-lambda(k2)) contracts quickly
    # because the depth varies slowly with k2
    k2 = 0.0
    for _ in range(12):
        lam = _even_level(depth_coefficient(delta, stark, k2), level, l_x, n_half)
        if lam >= 0.0:
            return None if k2 == 0.0 else k2
        nxt = math.sqrt(-lam)
        if abs(nxt - k2) <= 1e-9 * max(nxt, 1e-30):
            k2 = nxt
            break
        k2 = nxt
    lo, hi = 0.5 * k2, min(2.0 * k2, k2 + 1.0)
    f_lo, f_hi = f_val(lo), f_val(hi)
    for _ in range(60):
        if f_lo < 0.0 <= f_hi:
            break
        if f_lo >= 0.0:
            lo *= 0.5
            f_lo = f_val(lo)
        else:
            hi *= 2.0
            f_hi = f_val(hi)
    else:
        return None
    root = brentq(f_val, lo, hi, xtol=min(1e-11, 1e-5 * k2), rtol=8.9e-16)
    if abs(f_val(root)) > tol:
        return None
    return float(root)


def fd_bound_levels(delta: float, stark: float, l_x: float = 200.0,
                    n_x: int = 40001, count: int = 8,
                    auto_domain: bool = False, check_grid: bool = True,
                    fixed_tol: float = 1e-10,
                    node_budget: int = 3_500_000) -> FDLevels:
    """Bound levels kappa_n^2 from the discretized well, outer-solved per level.

    ``n_x`` counts grid points across [0, l_x] including both ends; the wall
    value is pinned to zero, leaving n_x - 1 unknowns.  With auto_domain each
    level gets its own half-width, scaled to the level's 1/kappa_n^2 spatial
    extent (the inverse-square tail supports states far outside any fixed
    box), at the price of a coarser step once the node budget binds.
    check_grid re-solves on a doubled grid, reports the doubled-grid value
    and flags levels that move by more than 1e-6 relative; it doubles the
    cost.

    Levels the grid cannot support (no sign change in the outer root find)
    end the scan early, so fewer than ``count`` levels can be returned.
    """
    if classify(delta, stark).kind is CollapseKind.FULL_COLLAPSE:
        empty = np.array([])
        return FDLevels(kappa_sq=empty, grid_converged=np.array([], dtype=bool),
                        domain_half_width=empty, grid_nodes=np.array([], dtype=int),
                        delta=delta, stark=stark)

    base_half = max(n_x - 1, 16)
    base_h = l_x / base_half
    depth0 = depth_coefficient(delta, stark, 0.0)
    nu2 = 0.25 - depth0
    ratio_est = math.exp(-math.pi / math.sqrt(-nu2)) if nu2 < 0.0 else 0.5

    levels: list[float] = []
    flags: list[bool] = []
    domains: list[float] = []
    nodes: list[int] = []
    for k in range(count):
        if auto_domain:
            if levels:
                k2_est = levels[-1] * ratio_est
            else:
                k2_est = max(math.sqrt(depth0), 0.1)
            l_k = max(l_x, (math.sqrt(depth0) + 12.0) / k2_est)
            n_half = int(min(max(l_k / base_h, base_half), node_budget))
        else:
            l_k = l_x
            n_half = base_half
        root = _solve_level(delta, stark, k, l_k, n_half, fixed_tol)
        if root is None:
            break
        converged = True
        if check_grid:
            again = _solve_level(delta, stark, k, l_k, 2 * n_half, fixed_tol)
            if again is None or abs(again - root) > 1e-6 * abs(again):
                converged = False
            else:
                root = again
        if len(levels) >= 2:
            ratio_est = root / levels[-1]
        levels.append(root)
        flags.append(converged)
        domains.append(l_k)
        nodes.append(n_half)
    return FDLevels(kappa_sq=np.asarray(levels),
                    grid_converged=np.asarray(flags, dtype=bool),
                    domain_half_width=np.asarray(domains),
                    grid_nodes=np.asarray(nodes, dtype=int),
                    delta=delta, stark=stark)


# -- positivity of the shifted critical Hamiltonian --------------------------

def critical_h0_matrix(stark: float, truncation: int, delta: float | None = None) -> np.ndarray:
    """Dense H(g_c) + 1/2 on the lowest photon states, spin-diagonal basis."""
    if delta is None:
        delta = stark
    params = ModelParams(delta=delta, stark=stark, coupling=g_critical(stark))
    h = ed.full_hamiltonian_matrix(params, truncation - 1, basis="sigma_z")
    return h + 0.5 * np.eye(h.shape[0])


def position_quadratic_form(truncation: int) -> np.ndarray:
    """(a + a^dag)^2 / 2 on the lowest photon states."""
    n = np.arange(truncation)
    diag = n + 0.5
    two = 0.5 * np.sqrt((n[:-2] + 1.0) * (n[:-2] + 2.0))
    m = np.diag(diag) + np.diag(two, 2) + np.diag(two, -2)
    return m


def momentum_quadratic_form(truncation: int) -> np.ndarray:
    """-(a - a^dag)^2 / 2 on the lowest photon states."""
    n = np.arange(truncation)
    diag = n + 0.5
    two = 0.5 * np.sqrt((n[:-2] + 1.0) * (n[:-2] + 2.0))
    m = np.diag(diag) - np.diag(two, 2) - np.diag(two, -2)
    return m


def spinor_mixing(stark: float) -> tuple[float, float]:
    """Coefficients (sqrt((gamma+1)/2gamma), sqrt((gamma-1)/2gamma)).

    The combinations phi_1 = a psi_1 - b psi_2, phi_2 = a psi_2 - b psi_1
    decouple H0 into a sum of the two quadrature forms.
    """
    gamma = 1.0 / math.sqrt(1.0 - stark * stark)
    return (math.sqrt((gamma + 1.0) / (2.0 * gamma)),
            math.sqrt((gamma - 1.0) / (2.0 * gamma)))


@dataclass(frozen=True)
class PositivityCertificate:
    min_expectation: float
    n_states: int
    truncation: int
    stark: float

    @property
    def excludes_below(self) -> float:
        """No eigenvalue below this energy is compatible with the witness."""
        return -0.5 + min(self.min_expectation, 0.0)


def positivity_witness(stark: float, n_states: int = 1000, truncation: int = 200,
                       seed: int = 0) -> PositivityCertificate:
    """Sample <psi|H(g_c) + 1/2|psi> over random states at delta = U.

    A nonnegative minimum certifies (within the truncation) that the full
    collapse point has no spectrum below -1/2.
    """
    h0 = critical_h0_matrix(stark, truncation)
    rng = np.random.default_rng(seed)
    dim = h0.shape[0]
    worst = math.inf
    for _ in range(n_states):
        psi = rng.standard_normal(dim)
        psi /= np.linalg.norm(psi)
        worst = min(worst, float(psi @ h0 @ psi))
    return PositivityCertificate(min_expectation=worst, n_states=n_states,
                                 truncation=truncation, stark=stark)


# -- Faddeev criterion --------------------------------------------------------

def faddeev_integral(delta: float, stark: float, x_max: float,
                     kappa_sq: float = 0.0) -> float:
    """Quadrature of |V^-|(1 + |x|) over [-x_max, x_max].

    V is everywhere attractive here, so V^- = V.  The integrand decays like
    depth/x, which makes the integral grow logarithmically in x_max whenever
    the depth is nonzero, i.e. for every delta != U: the finiteness test for
    "at most finitely many bound states" fails.
    """
    if x_max <= 0.0:
        raise ValueError("x_max must be positive")
    depth = depth_coefficient(delta, stark, kappa_sq)
    if depth == 0.0:
        return 0.0

    def integrand(x):
        return depth * (1.0 + x) / (x * x + 1.0)

    head, _ = quad(integrand, 0.0, min(1.0, x_max))
    tail = 0.0
    if x_max > 1.0:
        # substitute x = exp(t); the transformed integrand tends to `depth`
        def log_integrand(t):
            ex = math.exp(t)
            return depth * (1.0 + ex) * ex / (ex * ex + 1.0)

        tail, _ = quad(log_integrand, 0.0, math.log(x_max), limit=200)
    return 2.0 * (head + tail)


def faddeev_log_slope(delta: float, stark: float, x_lo: float = 1e2,
                      x_hi: float = 1e6, kappa_sq: float = 0.0) -> float:
    """Growth rate d I / d ln(x_max); tends to 2*depth, zero only at delta = U."""
    i_lo = faddeev_integral(delta, stark, x_lo, kappa_sq)
    i_hi = faddeev_integral(delta, stark, x_hi, kappa_sq)
    return (i_hi - i_lo) / (math.log(x_hi) - math.log(x_lo))
