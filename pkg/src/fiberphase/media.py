"""Dispersion of circularly polarized waves in a gyroelectric medium.

The permittivity tensor has equal diagonal transverse components
epsilon1, an antisymmetric imaginary off-diagonal pair +/- i epsilon2,
and an axial component epsilon3; permeability mu is scalar.  For
propagation along the symmetry axis the two circular field
combinations decouple with refractive indices squared

    n_plus^2  = mu * (epsilon1 + epsilon2)
    n_minus^2 = mu * (epsilon1 - epsilon2)

so one handedness can propagate while the other is evanescent, which
is what lets a single handedness be isolated inside such a fibre.
Units: c = 1, omega supplied in the same units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GyrotropicMedium:
    """Real material parameters; epsilon3 plays no role for axial propagation
    but is kept so the tensor is fully specified."""

    epsilon1: float
    epsilon2: float
    epsilon3: float
    mu: float

    def __post_init__(self):
        for name in ("epsilon1", "epsilon2", "epsilon3", "mu"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class DispersionVerdict:
    """One circular branch: propagating with real wavenumber, or
    evanescent with the magnitude of the imaginary propagation constant."""

    handedness: str  # "plus" or "minus" branch of n^2 = mu (eps1 +/- eps2)
    n_squared: float
    status: str  # "propagating" or "evanescent"
    propagation_constant: float


def refractive_indices(medium: GyrotropicMedium) -> tuple[float, float]:
    """(n_plus^2, n_minus^2) = mu * (epsilon1 +/- epsilon2).

    The sum and difference identities n+^2 + n-^2 = 2 mu eps1 and
    n+^2 - n-^2 = 2 mu eps2 hold exactly in this arithmetic.
    """
    n_plus_sq = medium.mu * (medium.epsilon1 + medium.epsilon2)
    n_minus_sq = medium.mu * (medium.epsilon1 - medium.epsilon2)
    return n_plus_sq, n_minus_sq


def classify(medium: GyrotropicMedium, omega: float) -> tuple[DispersionVerdict, DispersionVerdict]:
    """Per-branch propagation verdicts at angular frequency omega.

    A branch with n^2 > 0 propagates with k = sqrt(n^2) * omega; with
    n^2 <= 0 it is evanescent and the constant reported is the decay
    magnitude sqrt(-n^2) * omega (zero exactly at the n^2 = 0 boundary).
    """
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    verdicts = []
    for handedness, n_sq in zip(("plus", "minus"), refractive_indices(medium)):
        if n_sq > 0:
            verdicts.append(
                DispersionVerdict(handedness, n_sq, "propagating", math.sqrt(n_sq) * omega)
            )
        else:
            verdicts.append(
                DispersionVerdict(handedness, n_sq, "evanescent", math.sqrt(-n_sq) * omega)
            )
    return verdicts[0], verdicts[1]


def circular_combination_check(e1, e2):
    """Circular field combinations ((E1 + i E2)/sqrt2, (E1 - i E2)/sqrt2).

    Convention fixed here and used throughout the package: the plus
    combination carries left-handed annihilation together with
    right-handed creation content, the minus combination the reverse.
    A purely circular input therefore lands entirely in one output.
    """
    e1 = np.asarray(e1, dtype=complex)
    e2 = np.asarray(e2, dtype=complex)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    plus = (e1 + 1j * e2) * inv_sqrt2
    minus = (e1 - 1j * e2) * inv_sqrt2
    if plus.ndim == 0:
        return complex(plus), complex(minus)
    return plus, minus
