"""Spectral toolkit for the two-photon Rabi model with a Stark coupling.

The Hamiltonian (photon frequency = 1)

    H = a'a + g sigma_z (a^2 + a'^2) - sigma_x (delta/2 + U a'a)

conserves a four-fold symmetry: photon-number parity (q = 1/4 even, q = 3/4
odd) times a spin-reflection parity p = +-1.  The package computes sector
spectra two independent ways (transcendental-function zeros and truncated
diagonalization), locates the pole-line crossings and quasi-exact points,
analyzes the spectral collapse at g_c = sqrt(1 - U^2)/2, and extracts the
critical gap exponents.
"""

from . import collapse, criticality, ed, gfunction, model
from .model import (
    ModelParams,
    DerivedParams,
    SectorLabel,
    Q_EVEN,
    Q_ODD,
    all_sectors,
    derive_params,
    g_critical,
    threshold_energy,
)

__version__ = "0.1.0"

__all__ = [
    "collapse",
    "criticality",
    "ed",
    "gfunction",
    "model",
    "ModelParams",
    "DerivedParams",
    "SectorLabel",
    "Q_EVEN",
    "Q_ODD",
    "all_sectors",
    "derive_params",
    "g_critical",
    "threshold_energy",
    "__version__",
]
