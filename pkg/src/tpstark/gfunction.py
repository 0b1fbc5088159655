"""Transcendental spectral function and its zero finders.

For a fixed photon sector q in {1/4, 3/4} and flip parity p in {+1, -1} the
model spectrum is encoded in a single real function of energy,

    G_p(E) = sum_{n>=0} (e_n(E) - p f_n(E)) w_n,
    w_n = (2(n + q - 1/4))! / (2^n n!) * tanh(theta)^n,

where the coefficient pair (e_n, f_n) obeys a linear three-term recurrence
seeded by f_0 = 1, e_0 = Omega_0(E).  G_p is analytic in E except for simple
poles on a ladder of energies where the recurrence denominator vanishes, and
its zeros between consecutive poles are exactly the eigenvalues carrying the
(q, p) label.  This gives an eigenvalue route that is independent of matrix
truncation and is used throughout as a cross-check against direct
diagonalization.

Two modified seeds probe the poles themselves: seeding at row m >= 1 with
f_m = 1 follows the m-th pole line as the coupling varies, and the seed
(e_0, f_0) = (1, 0) does the same for the zeroth line.  Zeros of those
modified functions along a pole line are couplings where the pole carries no
spectral weight (an eigenvalue sits exactly on the line).

Evaluation is delegated to compiled kernels that work in the log domain; see
``_kernels``.  All energies here are in units of the cavity frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import (
    ModelParams,
    SectorLabel,
    _q_of,
    derive_params,
    g_critical,
    pole_energy,
)

__all__ = [
    "PoleHitError",
    "SeriesConvergenceError",
    "GValue",
    "RecurrenceTable",
    "EigenvalueList",
    "SpecialPoint",
    "omega_numerator",
    "omega_denominator",
    "omega_value",
    "recurrence_pole_factor",
    "zeroth_pole_energy",
    "pole_energies",
    "recurrence",
    "g_eval",
    "find_zeros",
    "find_nondegenerate_points",
]


class PoleHitError(ValueError):
    """The requested energy coincides with a pole of the coefficient ratio."""


class SeriesConvergenceError(RuntimeError):
    """The series did not settle within the allotted number of terms."""


@dataclass(frozen=True)
class GValue:
    """Log-domain value of the spectral function at one energy."""

    sign: int
    log_magnitude: float
    converged: bool
    terms_used: int

    @property
    def value(self) -> float:
        """Plain float value; overflows to +-inf for huge magnitudes."""
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log_magnitude)
        except OverflowError:
            return self.sign * math.inf


@dataclass(frozen=True)
class RecurrenceTable:
    """Explicit coefficient rows for inspection and invariant checks.

    Row k stores (e, f) for index n = n_start + k after common rescaling;
    the true coefficients are e[k] * exp(log_scale[k]).  omega[k] holds the
    ratio numerator/denominator for that row (+-inf where the denominator
    vanishes, which is a removable point of the summed series).
    """

    n_start: int
    energy: float
    q: float
    omega: np.ndarray
    e: np.ndarray
    f: np.ndarray
    log_scale: np.ndarray


@dataclass(frozen=True)
class EigenvalueList:
    """Sorted eigenvalues of one symmetry sector found as zeros of G."""

    energies: np.ndarray
    sector: SectorLabel
    refine_tol: float
    method: str = "gfunction"


@dataclass(frozen=True)
class SpecialPoint:
    """Coupling on a pole line where the modified series changes sign.

    x is the logarithmic distance -log10(1 - g/g_c) from the collapse
    coupling; energy is the pole energy at that coupling.
    """

    x: float
    coupling: float
    energy: float
    pole_index: int
    sector: SectorLabel


def _scalars(params: ModelParams):
    return _kernels.derived_scalars(params.delta, params.stark, params.coupling)


def omega_numerator(n: int, energy: float, params: ModelParams, sector) -> float:
    """Numerator of the coefficient ratio Omega_n = e_n / f_n."""
    q = _q_of(sector)
    _, beta, c, a_plus, a_minus, _ = _scalars(params)
    num, _ = _kernels.omega_parts(n + q, 0.5 + energy, params.delta, params.stark,
                                  c, a_plus, a_minus, beta)
    return num


def omega_denominator(n: int, energy: float, params: ModelParams, sector) -> float:
    q = _q_of(sector)
    _, beta, c, a_plus, a_minus, _ = _scalars(params)
    _, den = _kernels.omega_parts(n + q, 0.5 + energy, params.delta, params.stark,
                                  c, a_plus, a_minus, beta)
    return den


def omega_value(n: int, energy: float, params: ModelParams, sector) -> float:
    """Coefficient ratio itself; +-inf at a vanishing denominator."""
    num = omega_numerator(n, energy, params, sector)
    den = omega_denominator(n, energy, params, sector)
    if den == 0.0:
        return math.copysign(math.inf, num) if num != 0.0 else math.nan
    return num / den


def recurrence_pole_factor(n: int, energy: float, params: ModelParams, sector) -> float:
    """(gamma + 1) D_n - U gamma N_n; a true series pole requires this to vanish."""
    gamma = derive_params(params).gamma
    num = omega_numerator(n, energy, params, sector)
    den = omega_denominator(n, energy, params, sector)
    return (gamma + 1.0) * den - params.stark * gamma * num


def zeroth_pole_energy(params: ModelParams, sector) -> float:
    """Energy where the denominator of Omega_0 vanishes.

    Unlike the n >= 1 ladder this line depends on the detuning, and it stays
    a pole of the seeded series only while the numerator is nonzero there
    (always true except the trivial delta = stark = 0 point).
    """
    q = _q_of(sector)
    _, beta, c, a_plus, a_minus, _ = _scalars(params)
    u = params.stark
    return (2.0 * a_minus * q / beta - 0.5
            - c * (params.delta / 2.0 + 2.0 * u * q / beta - u / 2.0))


def pole_energies(params: ModelParams, sector, e_min: float, e_max: float,
                  include_zeroth: bool = True) -> list[tuple[int, float]]:
    """Poles of the standard-seed series inside (e_min, e_max).

    Returns (index, energy) pairs sorted by energy.  Index 0 labels the
    zeroth line, indices n >= 1 the uniform ladder.
    """
    q = _q_of(sector)
    d = derive_params(params)
    out: list[tuple[int, float]] = []
    if include_zeroth and not (params.delta == 0.0 and params.stark == 0.0):
        e0 = zeroth_pole_energy(params, sector)
        if e_min < e0 < e_max:
            out.append((0, e0))
    # invert the affine ladder formula for the index range
    spacing = 2.0 * d.beta / (d.gamma * d.gamma)
    base = -0.5 / (d.gamma * d.gamma) - params.stark * params.delta / 2.0
    n_lo = max(1, int(math.floor((e_min - base) / spacing - q)))
    n_hi = int(math.ceil((e_max - base) / spacing - q)) + 1
    for n in range(n_lo, n_hi + 1):
        e_n = spacing * (n + q) + base
        if e_min < e_n < e_max:
            out.append((n, e_n))
    out.sort(key=lambda item: item[1])
    return out


def _forbidden_pole_distance(energy: float, params: ModelParams, q: float,
                             min_index: int, standard_seed: bool) -> float:
    """Distance from energy to the nearest pole the seeded series cannot cross."""
    d = derive_params(params)
    spacing = 2.0 * d.beta / (d.gamma * d.gamma)
    base = -0.5 / (d.gamma * d.gamma) - params.stark * params.delta / 2.0
    dist = math.inf
    n_star = (energy - base) / spacing - q
    for n in (math.floor(n_star), math.ceil(n_star), math.floor(n_star) - 1,
              math.ceil(n_star) + 1):
        n = int(n)
        if n >= max(1, min_index):
            dist = min(dist, abs(energy - (spacing * (n + q) + base)))
    if standard_seed and not (params.delta == 0.0 and params.stark == 0.0):
        dist = min(dist, abs(energy - zeroth_pole_energy(params, q)))
    return dist


def _seed_args(special_pole):
    if special_pole is None:
        return 0, False
    m = int(special_pole)
    if m < 0:
        raise ValueError("pole index must be nonnegative")
    if m == 0:
        return 0, True
    return m, False


def recurrence(energy: float, params: ModelParams, sector, n_rows: int = 64,
               special_pole=None, seed_scale: float = 1.0) -> RecurrenceTable:
    """Tabulate the coefficient pair for inspection.

    The rows are rescaled in blocks to stay inside the normal float range;
    log_scale records the common factor stripped from each row.
    """
    if n_rows < 1:
        raise ValueError("need at least one row")
    q = _q_of(sector)
    seed_start, zeroth_seed = _seed_args(special_pole)
    _assert_off_poles(energy, params, q, seed_start, special_pole is None)
    gamma, beta, c, a_plus, a_minus, _ = _scalars(params)
    delta, u, g = params.delta, params.stark, params.coupling
    half_e = 0.5 + energy

    omega = np.empty(n_rows)
    e_arr = np.empty(n_rows)
    f_arr = np.empty(n_rows)
    ls_arr = np.empty(n_rows)

    n = seed_start
    num, den = _kernels.omega_parts(n + q, half_e, delta, u, c, a_plus, a_minus, beta)
    omega[0] = num / den if den != 0.0 else math.copysign(math.inf, num)
    if zeroth_seed or den == 0.0 or not math.isfinite(num / den):
        e_c, f_c = seed_scale, 0.0
    else:
        e_c, f_c = seed_scale * num / den, seed_scale
    e_p = f_p = 0.0
    log_scale = 0.0
    e_arr[0], f_arr[0], ls_arr[0] = e_c, f_c, log_scale

    for k in range(1, n_rows):
        nq = n + q
        a_coef = 2.0 * a_plus * nq - beta * half_e
        b_coef = beta * (delta - u) / 2.0 + 2.0 * u * nq
        raw = a_coef * f_c - b_coef * e_c - g * ((gamma + 1.0) * f_p - u * gamma * e_p)
        num1, den1 = _kernels.omega_parts(nq + 1.0, half_e, delta, u, c, a_plus, a_minus, beta)
        pole_factor = (gamma + 1.0) * den1 - u * gamma * num1
        denominator = 4.0 * g * (nq + 0.25) * (nq + 0.75) * pole_factor
        if g == 0.0:
            # the weight truncates the series; pad remaining rows with zeros
            e_n = f_n = 0.0
        else:
            f_n = raw * den1 / denominator
            e_n = raw * num1 / denominator
        e_p, f_p = e_c, f_c
        e_c, f_c = e_n, f_n
        m = max(abs(e_c), abs(f_c), abs(e_p), abs(f_p))
        if m > 1e200 or 0.0 < m < 1e-200:
            inv = 1.0 / m
            e_c *= inv
            f_c *= inv
            e_p *= inv
            f_p *= inv
            log_scale += math.log(m)
        n += 1
        omega[k] = num1 / den1 if den1 != 0.0 else math.copysign(math.inf, num1)
        e_arr[k], f_arr[k], ls_arr[k] = e_c, f_c, log_scale

    return RecurrenceTable(n_start=seed_start, energy=energy, q=q,
                           omega=omega, e=e_arr, f=f_arr, log_scale=ls_arr)


def _assert_off_poles(energy, params, q, seed_start, standard_seed):
    tol = 1e-12 * max(1.0, abs(energy))
    dist = _forbidden_pole_distance(energy, params, q, seed_start + 1, standard_seed)
    if dist < tol:
        raise PoleHitError(
            "energy %.17g sits on a series pole; evaluate a nudged energy instead" % energy)


def g_eval(energy: float, params: ModelParams, sector: SectorLabel,
           tol: float = 1e-14, n_max: int = 5000,
           special_pole=None, seed_scale: float = 1.0) -> GValue:
    """Evaluate the spectral function at one energy.

    Raises PoleHitError within 1e-12 * max(1, |E|) of a pole the seeded
    series cannot cross; the value there is genuinely infinite, so callers
    should nudge the energy rather than retry.
    """
    q = _q_of(sector)
    seed_start, zeroth_seed = _seed_args(special_pole)
    _assert_off_poles(energy, params, q, seed_start, special_pole is None)
    sign, logmag, converged, terms = _kernels.series_eval(
        float(energy), params.delta, params.stark, params.coupling,
        q, float(sector.parity), tol, int(n_max),
        seed_start, zeroth_seed, float(seed_scale))
    if sign != 0 and not math.isfinite(logmag):
        raise PoleHitError(
            "series blew up at energy %.17g; the point is too close to a pole" % energy)
    return GValue(sign=int(sign), log_magnitude=float(logmag),
                  converged=bool(converged), terms_used=int(terms))


def _batch_eval(grid, params, q, parity, tol, n_max, seed_start, zeroth_seed, seed_scale):
    signs, logmags, convs, terms = _kernels.series_eval_batch(
        np.ascontiguousarray(grid, dtype=np.float64),
        params.delta, params.stark, params.coupling,
        q, float(parity), tol, int(n_max), seed_start, zeroth_seed, float(seed_scale))
    return signs, logmags, convs, terms


def _refine_sign_change(lo, hi, sign_lo, eval_sign, refine_tol):
    while hi - lo > refine_tol:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        s_mid = eval_sign(mid)
        if s_mid == 0:
            return mid
        if s_mid == sign_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_zeros(params: ModelParams, sector: SectorLabel, e_min: float, e_max: float,
               grid_density: int = 2000, refine_tol: float = 1e-10,
               series_tol: float = 1e-14, n_max: int = 5000,
               pole_window: float = 1e-8) -> EigenvalueList:
    """All zeros of G in (e_min, e_max), i.e. the sector eigenvalues there.

    The window is split at the series poles, each open piece is scanned on a
    uniform grid (grid_density points per piece), and every sign change is
    bisected down to refine_tol.  A strip of half-width pole_window around
    each pole is skipped: G diverges there and a sign flip across a pole is
    not a zero.  Each candidate is re-verified by a sign change across
    zero +- refine_tol before it is reported.

    Unconverged series evaluations raise SeriesConvergenceError; that happens
    when n_max is too small for the chosen coupling (the term count grows
    like 1/beta near the collapse coupling).
    """
    if not e_max > e_min:
        raise ValueError("need e_max > e_min")
    if grid_density < 8:
        raise ValueError("grid_density must be at least 8")
    q = _q_of(sector)
    parity = sector.parity

    poles = [e for _, e in pole_energies(params, sector, e_min, e_max)]
    bounds = [e_min] + poles + [e_max]

    def eval_sign(energy):
        sign, logmag, conv, _ = _kernels.series_eval(
            float(energy), params.delta, params.stark, params.coupling,
            q, float(parity), series_tol, int(n_max), 0, False, 1.0)
        if not conv:
            raise SeriesConvergenceError(
                "series unconverged at E=%.12g after %d terms; raise n_max or "
                "move the coupling away from its critical value" % (energy, n_max))
        if sign != 0 and not math.isfinite(logmag):
            # exact pole hit inside a bracket; nudge by one refine step
            return eval_sign(energy + refine_tol)
        return int(sign)

    zeros: list[float] = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        lo = a + pole_window if a in poles else a
        hi = b - pole_window if b in poles else b
        if not hi > lo:
            continue
        grid = np.linspace(lo, hi, int(grid_density))
        signs, logmags, convs, _ = _batch_eval(
            grid, params, q, parity, series_tol, n_max, 0, False, 1.0)
        if not convs.all():
            bad = grid[~convs][0]
            raise SeriesConvergenceError(
                "series unconverged at E=%.12g after %d terms; raise n_max or "
                "move the coupling away from its critical value" % (bad, n_max))
        blown = (signs != 0) & ~np.isfinite(logmags)
        for i in np.nonzero(blown)[0]:
            signs[i] = eval_sign(grid[i] + 1e-13 * max(1.0, abs(grid[i])))
        for i in range(len(grid) - 1):
            s0, s1 = int(signs[i]), int(signs[i + 1])
            if s0 == 0:
                zeros.append(grid[i])
                continue
            if s1 == 0 or s0 * s1 > 0:
                continue
            root = _refine_sign_change(grid[i], grid[i + 1], s0, eval_sign, refine_tol)
            left = max(root - refine_tol, lo)
            right = min(root + refine_tol, hi)
            if eval_sign(left) * eval_sign(right) <= 0:
                zeros.append(root)
        if len(grid) and int(signs[-1]) == 0:
            zeros.append(grid[-1])

    zeros.sort()
    return EigenvalueList(energies=np.asarray(zeros), sector=sector,
                          refine_tol=refine_tol)


def _pole_line_energy(delta, stark, coupling, pole_index, q):
    params = ModelParams(delta=delta, stark=stark, coupling=coupling)
    if pole_index == 0:
        return zeroth_pole_energy(params, q)
    return pole_energy(pole_index, q, params)


def _pole_crossing_xs(delta, stark, pole_index, q, x_min, x_max):
    """x positions where the scanned pole line meets a forbidden pole.

    Only the zeroth line has a different slope in beta than the n >= 1
    ladder, so only pole_index = 0 can produce crossings; they show up in
    the scan as sign flips that are poles, not zeros.
    """
    if pole_index != 0 or stark == 0.0:
        return []
    gamma = 1.0 / math.sqrt(1.0 - stark * stark)
    gc = g_critical(stark)
    rhs_const = (delta / (2.0 * stark) + (1.0 - delta / stark) / (2.0 * gamma)
                 - 0.5 / gamma ** 2 - stark * delta / 2.0)
    out = []
    for n in range(1, 512):
        coef = 2.0 * q / gamma - 2.0 * (n + q) / gamma ** 2
        if coef == 0.0:
            continue
        beta_star = rhs_const / coef
        if not 0.0 < beta_star < 1.0:
            continue
        g_star = gc * math.sqrt(1.0 - beta_star * beta_star)
        ratio = 1.0 - g_star / gc
        if ratio <= 0.0:
            continue
        x_star = -math.log10(ratio)
        if x_min < x_star < x_max:
            out.append(x_star)
    return sorted(out)


def find_nondegenerate_points(delta: float, stark: float, pole_index: int,
                              sector: SectorLabel, x_min: float = 0.5,
                              x_max: float = 7.0, grid_points: int = 600,
                              x_tol: float = 1e-7, series_tol: float = 1e-14,
                              n_max: int = 300000) -> list[SpecialPoint]:
    """Couplings where the chosen pole line carries an exact eigenvalue.

    Scans the modified series (seeded on pole line pole_index) along
    x = -log10(1 - g/g_c) and bisects its sign changes.  Brackets that
    straddle a crossing with another pole line are discarded; the flip there
    is a divergence, not a zero.
    """
    if not x_max > x_min > 0.0:
        raise ValueError("need x_max > x_min > 0")
    q = _q_of(sector)
    parity = sector.parity
    m = int(pole_index)
    seed_start, zeroth_seed = _seed_args(m)
    gc = g_critical(stark)

    xs = np.linspace(x_min, x_max, int(grid_points))
    gs = gc * (1.0 - 10.0 ** (-xs))
    es = np.array([_pole_line_energy(delta, stark, g, m, q) for g in gs])

    signs, logmags, convs, _ = _kernels.series_eval_batch_g(
        es, gs, delta, stark, q, float(parity),
        series_tol, int(n_max), seed_start, zeroth_seed, 1.0)
    if not convs.all():
        bad = xs[~np.asarray(convs, bool)][0]
        raise SeriesConvergenceError(
            "pole-line series unconverged at x=%.6g; raise n_max (terms grow "
            "like 10^(x/2))" % bad)

    crossings = _pole_crossing_xs(delta, stark, m, q, x_min, x_max)

    def eval_sign(x):
        g = gc * (1.0 - 10.0 ** (-x))
        e = _pole_line_energy(delta, stark, g, m, q)
        sign, logmag, conv, _ = _kernels.series_eval(
            e, delta, stark, g, q, float(parity),
            series_tol, int(n_max), seed_start, zeroth_seed, 1.0)
        if not conv:
            raise SeriesConvergenceError(
                "pole-line series unconverged at x=%.6g; raise n_max" % x)
        if sign != 0 and not math.isfinite(logmag):
            return eval_sign(x + 1e-10)
        return int(sign)

    points: list[SpecialPoint] = []
    for i in range(len(xs) - 1):
        s0, s1 = int(signs[i]), int(signs[i + 1])
        if s0 == 0 or s1 == 0:
            continue
        if s0 * s1 > 0:
            continue
        if any(xs[i] < xc < xs[i + 1] for xc in crossings):
            continue
        x_root = _refine_sign_change(xs[i], xs[i + 1], s0, eval_sign, x_tol)
        g_root = gc * (1.0 - 10.0 ** (-x_root))
        points.append(SpecialPoint(
            x=x_root, coupling=g_root,
            energy=_pole_line_energy(delta, stark, g_root, m, q),
            pole_index=m, sector=SectorLabel(q=q, parity=parity)))
    return points
