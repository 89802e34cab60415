"""Closed-form spectra of explicitly solvable models."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import SurfaceBoundary, boundary_length, flux_alpha
from .errors import InvalidGeometryError, PreconditionError
from .spectrum import SpectrumSeq


@dataclass(frozen=True)
class CylinderModel:
    """``S¹ × [-L, L]`` with flat metric and potential ``iβ dx``."""

    L: float
    beta: float

    def __post_init__(self):
        if not self.L > 0:
            raise InvalidGeometryError("cylinder half-length must be positive")


@dataclass(frozen=True)
class DiskFluxModel:
    """Unit disk with an Aharonov–Bohm flux ``β ∈ (0, 1/2]``."""

    beta: float

    def __post_init__(self):
        if not 0.0 < self.beta <= 0.5:
            raise PreconditionError("Aharonov-Bohm flux must lie in (0, 1/2]")


def _x_tanh(x: np.ndarray) -> np.ndarray:
    """``x·tanh(x)`` for ``x >= 0`` without overflow."""
    e = np.exp(-2.0 * x)
    return x * (1.0 - e) / (1.0 + e)


def _x_coth(x: np.ndarray) -> np.ndarray:
    """``x·coth(x)`` for ``x > 0``; ``-expm1`` keeps small arguments accurate."""
    e = np.exp(-2.0 * x)
    return x * (1.0 + e) / -np.expm1(-2.0 * x)


def cylinder_spectrum(model: CylinderModel, kmax: int) -> SpectrumSeq:
    """``{|k+β|tanh(|k+β|L), |k+β|coth(|k+β|L)}`` for ``|k| <= kmax``.

    For integer ``β`` the mode ``k = -β`` contributes ``0`` and ``1/L``.
    Labels are ``tanh`` / ``coth`` and the index is ``k``.
    """
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    k = np.arange(-kmax, kmax + 1)
    s = np.abs(k + model.beta)
    L = model.L
    vals, idx, labs = [], [], []
    regular = s > 0
    r = s[regular]
    kr = k[regular]
    vals += list(_x_tanh(r * L) / L)
    idx += list(kr)
    labs += ["tanh"] * len(r)
    vals += list(_x_coth(r * L) / L)
    idx += list(kr)
    labs += ["coth"] * len(r)
    for kz in k[~regular]:
        vals += [0.0, 1.0 / L]
        idx += [int(kz), int(kz)]
        labs += ["tanh", "coth"]
    return SpectrumSeq.from_values(vals, idx, labs)


def ab_disk_spectrum(model: DiskFluxModel, kmax: int) -> SpectrumSeq:
    """``{|k - β| : |k| <= kmax}``."""
    k = np.arange(-kmax, kmax + 1)
    return SpectrumSeq.from_values(np.abs(k - model.beta), k, "disk")


def circle_laplacian_eigs(beta: float, kmax: int) -> list[float]:
    """``(k + β)²`` for ``|k| <= kmax``, ordered by ``k``."""
    return [float((k + beta) ** 2) for k in range(-kmax, kmax + 1)]


def constant_A_exact_spectrum(sb: SurfaceBoundary, n_max: int) -> SpectrumSeq:
    """``{(2π/ℓ_j)(n ± α_j) : 1 <= n <= n_max}`` merged over components.

    Exact up to rapidly decaying terms for constant metric and potential
    with vanishing ``w1`` and ``q``.
    """
    vals, idx, labs = [], [], []
    for j, c in enumerate(sb.components):
        if not (c.g11.is_constant(0.0) and c.h1.is_constant(0.0)):
            raise PreconditionError(f"component {j + 1} has nonconstant metric or potential")
        if np.any(c.w1.coeffs) or np.any(c.q.coeffs):
            raise PreconditionError(f"component {j + 1} has nonzero w1 or q")
        ell = boundary_length(c)
        alpha, _ = flux_alpha(c)
        b0 = 2 * math.pi / ell
        for n in range(1, n_max + 1):
            vals += [b0 * (n + alpha), b0 * (n - alpha)]
            idx += [n, -n]
            labs += [f"N{j + 1}", f"N{j + 1}"]
    return SpectrumSeq.from_values(vals, idx, labs)
