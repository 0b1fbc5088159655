"""Parameters and closed-form spectral relations of the two-photon Rabi-Stark model.

The Hamiltonian, in units of the cavity frequency, is

    H = a†a + g σ_z (a² + a†²) - σ_x (Δ/2 + U a†a)

with qubit splitting ``delta``, nonlinear Stark coupling ``stark`` (U) and
two-photon coupling ``coupling`` (g).  A Z₄ symmetry splits the Hilbert
space into four invariant sectors labelled by a Bargmann index
q ∈ {1/4, 3/4} (even/odd photon number) and a parity branch ±1 inside
each q subspace.

Everything in this module is elementary algebra on the derived quantities

    γ = 1 / sqrt(1 - U²)
    β = sqrt(1 - 4 γ² g²)
    tanh θ = sqrt((1 - β) / (1 + β))

which are real only for g <= g_c = sqrt(1 - U²)/2, the collapse coupling.
The discrete spectrum below g_c is organised by a ladder of pole energies
(one line per recurrence index n) on which exact level crossings sit; the
closed forms for those lines, the crossing couplings and the scaled energy
that maps pole n to the integer n are all collected here.  All functions
are pure and operate on plain floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ModelParams",
    "DerivedParams",
    "SectorLabel",
    "CrossingPoint",
    "Q_EVEN",
    "Q_ODD",
    "g_critical",
    "derive_params",
    "all_sectors",
    "pole_energy",
    "threshold_energy",
    "crossing_point",
    "scaled_energy",
    "x_from_coupling",
    "coupling_from_x",
]

Q_EVEN = 0.25
Q_ODD = 0.75


def g_critical(stark: float) -> float:
    """Collapse coupling g_c = sqrt(1 - U²)/2."""
    if abs(stark) >= 1.0:
        raise ValueError("Stark coupling magnitude must be below 1")
    return 0.5 * math.sqrt(1.0 - stark * stark)


@dataclass(frozen=True)
class ModelParams:
    """Validated model parameters (delta, stark, coupling) = (Δ, U, g)."""

    delta: float
    stark: float
    coupling: float = 0.0

    def __post_init__(self) -> None:
        for name in ("delta", "stark", "coupling"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
        if self.delta < 0.0:
            raise ValueError("delta must be non-negative")
        if abs(self.stark) >= 1.0:
            raise ValueError("Stark coupling magnitude must be below 1")
        if self.coupling < 0.0:
            raise ValueError("coupling must be non-negative")
        if self.coupling > g_critical(self.stark):
            raise ValueError("coupling exceeds critical value g_c")

    @property
    def g_crit(self) -> float:
        return g_critical(self.stark)


@dataclass(frozen=True)
class DerivedParams:
    """Derived constants of a parameter point.

    ``theta`` is the squeezing angle, infinite exactly at g = g_c where
    beta = 0; ``tanh_theta`` stays finite and is the quantity actually used
    in series evaluations.
    """

    gamma: float
    beta: float
    theta: float
    g_crit: float

    @property
    def tanh_theta(self) -> float:
        return math.sqrt((1.0 - self.beta) / (1.0 + self.beta))


def derive_params(params: ModelParams) -> DerivedParams:
    """Compute (γ, β, θ, g_c) for a parameter point.

    beta decreases strictly from 1 at g = 0 to 0 at g = g_c.
    """
    gamma = 1.0 / math.sqrt(1.0 - params.stark * params.stark)
    # rounding can push the radicand to -1e-17 exactly at g_c; clip to 0
    radicand = 1.0 - 4.0 * gamma * gamma * params.coupling * params.coupling
    beta = math.sqrt(max(radicand, 0.0))
    # tanh(theta) = sqrt((1-beta)/(1+beta)); use 1 - beta^2 = (2 gamma g)^2 to
    # avoid the subtractive loss near beta = 1 (tiny g)
    tanh_theta = 2.0 * gamma * params.coupling / (1.0 + beta)
    theta = math.inf if beta == 0.0 else math.atanh(tanh_theta)
    return DerivedParams(gamma=gamma, beta=beta, theta=theta, g_crit=params.g_crit)


@dataclass(frozen=True)
class SectorLabel:
    """One of the four symmetry sectors: q ∈ {1/4, 3/4}, parity ±1."""

    q: float
    parity: int

    def __post_init__(self) -> None:
        if self.q not in (Q_EVEN, Q_ODD):
            raise ValueError("q must be 0.25 (even photons) or 0.75 (odd photons)")
        if self.parity not in (1, -1):
            raise ValueError("parity must be +1 or -1")

    @property
    def photon_offset(self) -> int:
        """Lowest photon number in the sector: 0 for q=1/4, 1 for q=3/4."""
        return 0 if self.q == Q_EVEN else 1


def all_sectors() -> tuple[SectorLabel, ...]:
    return (
        SectorLabel(Q_EVEN, 1),
        SectorLabel(Q_EVEN, -1),
        SectorLabel(Q_ODD, 1),
        SectorLabel(Q_ODD, -1),
    )


def _q_of(sector: SectorLabel | float) -> float:
    q = sector.q if isinstance(sector, SectorLabel) else float(sector)
    if q not in (Q_EVEN, Q_ODD):
        raise ValueError("q must be 0.25 or 0.75")
    return q


def pole_energy(n: int, sector: SectorLabel | float, params: ModelParams) -> float:
    """Energy of pole line n in sector q.

    For n >= 1 the poles sit at

        E_n = 2 (n + q) β / γ² - 1/(2γ²) - UΔ/2,

    equally spaced by 2β/γ² and accumulating at the collapse threshold as
    g -> g_c.  The zeroth pole follows a different closed form,

        E_0 = 2 q β / γ - Δ/(2U) - (1/2γ)(1 - Δ/U),

    and is undefined at U = 0 (it may lie above the n > 0 poles).
    """
    if n < 0:
        raise ValueError("pole index must be non-negative")
    q = _q_of(sector)
    d = derive_params(params)
    if n == 0:
        if params.stark == 0.0:
            raise ValueError("zeroth pole undefined for U = 0")
        ratio = params.delta / params.stark
        return (
            2.0 * q * d.beta / d.gamma
            - params.delta / (2.0 * params.stark)
            - (1.0 - ratio) / (2.0 * d.gamma)
        )
    g2 = d.gamma * d.gamma
    return (
        2.0 * (n + q) * d.beta / g2
        - 0.5 / g2
        - params.stark * params.delta / 2.0
    )


def threshold_energy(delta: float, stark: float) -> float:
    """Common g -> g_c limit of all n > 0 pole lines,

        E_c = -1/(2γ²) - UΔ/2 = -(1 - U²)/2 - UΔ/2.

    Bound states formed at the collapse point sit below this energy.
    """
    if abs(stark) >= 1.0:
        raise ValueError("Stark coupling magnitude must be below 1")
    return -(1.0 - stark * stark) / 2.0 - stark * delta / 2.0


@dataclass(frozen=True)
class CrossingPoint:
    """Exact level crossing on pole line n: the two parity branches of a
    q sector become degenerate at energy -Δ/(2U), independent of n."""

    n: int
    beta_c: float
    g: float
    energy: float


def crossing_point(n: int, sector: SectorLabel | float, delta: float, stark: float) -> CrossingPoint:
    """Coupling and energy of the doubly degenerate point on pole line n.

    Both the numerator and denominator of the recurrence coefficient ratio
    vanish simultaneously when β = (1 - Δ/U) / (4 (n + q)), which requires
    Δ/U <= 1.  The crossing energy -Δ/(2U) is the same on every pole line
    and is never below -1/2; for Δ = U every crossing migrates to g_c and
    the whole spectrum collapses at -1/2.
    """
    if n < 0:
        raise ValueError("pole index must be non-negative")
    q = _q_of(sector)
    if stark == 0.0:
        raise ValueError("crossing condition undefined for U = 0")
    ratio = delta / stark
    if ratio > 1.0:
        raise ValueError("no crossing on pole line: requires delta/stark <= 1")
    beta_c = (1.0 - ratio) / (4.0 * (n + q))
    if beta_c > 1.0:
        raise ValueError("no crossing on pole line: beta_c exceeds 1")
    g_at = g_critical(stark) * math.sqrt(1.0 - beta_c * beta_c)
    return CrossingPoint(n=n, beta_c=beta_c, g=g_at, energy=-ratio / 2.0)


def scaled_energy(energy: float, params: ModelParams, sector: SectorLabel | float) -> float:
    """Map energy to the scaled variable

        E' = (γ² (E + UΔ/2) + 1/2) / (2β) - q,

    which sends pole line n > 0 to exactly n and the collapse threshold to
    -q.  Undefined at g = g_c where β = 0.
    """
    q = _q_of(sector)
    d = derive_params(params)
    if d.beta == 0.0:
        raise ValueError("scaled energy undefined at the critical coupling")
    g2 = d.gamma * d.gamma
    return (g2 * (energy + params.stark * params.delta / 2.0) + 0.5) / (2.0 * d.beta) - q


def x_from_coupling(coupling: float, stark: float) -> float:
    """Logarithmic distance from collapse, x = -log10(1 - g/g_c)."""
    gc = g_critical(stark)
    if coupling >= gc:
        return math.inf
    return -math.log10(1.0 - coupling / gc)


def coupling_from_x(x: float, stark: float) -> float:
    """Inverse of :func:`x_from_coupling`: g = g_c (1 - 10^(-x))."""
    return g_critical(stark) * (1.0 - 10.0 ** (-x))
