"""Dirichlet-to-Neumann symbols, their spectral coefficients, and asymptotic spectra."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .boundary import (
    BoundaryComponent,
    SurfaceBoundary,
    boundary_length,
    components_from,
    curvature_flux,
    electric_integral,
    flux_alpha,
)
from .errors import ConventionError, TruncationDepthError
from .normal_form import normal_form
from .periodic import PeriodicFn
from .spectrum import SpectrumSeq, merge_spectra
from .symbols import GradedSymbol, HomogComponent, compose

MATCH_TOL = 1e-9


@dataclass(frozen=True)
class SteklovCoeffs:
    """``b_k(±1)`` of one boundary component.

    ``extra`` holds ``b_k`` for ``k >= 3``; those come only from the
    normal-form engine.
    """

    b0: float
    b1_plus: float
    b1_minus: float
    b2_plus: float
    b2_minus: float
    p: int
    alpha: float
    length: float
    extra: tuple[tuple[float, float], ...] = ()
    source: str = "closed"

    @property
    def b(self) -> list[tuple[float, float]]:
        return [
            (self.b0, self.b0),
            (self.b1_plus, self.b1_minus),
            (self.b2_plus, self.b2_minus),
            *self.extra,
        ]

    @property
    def depth(self) -> int:
        return 3 + len(self.extra)

    def swapped(self) -> "SteklovCoeffs":
        """Coefficients with the ``±1`` branches exchanged."""
        return SteklovCoeffs(
            self.b0,
            self.b1_minus,
            self.b1_plus,
            self.b2_minus,
            self.b2_plus,
            self.p,
            self.alpha,
            self.length,
            tuple((m, p) for p, m in self.extra),
            self.source,
        )

    def to_json(self) -> dict:
        return {
            "length": self.length,
            "alpha": self.alpha,
            "p": self.p,
            "b": [list(pair) for pair in self.b],
            "source": self.source,
        }


def _is_zero(f: PeriodicFn) -> bool:
    return f.is_zero or float(np.max(np.abs(f.coeffs))) == 0.0


def symbol_terminates(c: BoundaryComponent) -> bool:
    """Whether the three-term DN symbol is the full symbol.

    True for vanishing potentials, and for constant metric and potential
    with ``w1 = q = 0``.
    """
    if not (_is_zero(c.w1) and _is_zero(c.q)):
        return False
    if _is_zero(c.h1):
        return True
    return c.g11.is_constant(0.0) and c.h1.is_constant(0.0)


def dn_symbol(c: BoundaryComponent) -> GradedSymbol:
    """Orders 1, 0, -1 of the DN symbol in the chart of ``c``.

    ``a₀ = √g¹¹|ξ|``, ``a₁ = √g¹¹ h1 sgn ξ`` and
    ``a₂ = ½ w1 ξ^{-1} + ½ √g11 q |ξ|^{-1}`` with ``g¹¹ = 1/g11``.
    """
    sg = c.g11.sqrt()
    isg = sg.reciprocal()
    a0 = HomogComponent.even(1.0, isg)
    a1 = HomogComponent.odd(0.0, isg * c.h1)
    a2 = HomogComponent.odd(-1.0, c.w1 * 0.5) + HomogComponent.even(-1.0, sg * c.q * 0.5)
    exact = symbol_terminates(c)
    if exact and _is_zero(c.h1):
        comps = (a0,)
    elif exact:
        comps = (a0, a1)
    else:
        comps = (a0, a1, a2)
    return GradedSymbol(1.0, comps, exact=exact, self_adjoint=c.g11.is_constant(0.0))


def symmetrized_dn_symbol(c: BoundaryComponent, K: int = 3) -> GradedSymbol:
    """``g11^{1/4} ∘ Op(a) ∘ g11^{-1/4}``: the DN symbol made self-adjoint on ``L²(dx)``.

    The DN map is symmetric for the arc-length measure ``√g11 dx``; the
    weight conjugation moves it to ``dx`` without changing the spectrum.
    """
    a = dn_symbol(c)
    if not a.exact and K > a.depth:
        raise TruncationDepthError(1.0 - a.depth, "the DN symbol is only available through order -1")
    if c.g11.is_constant(0.0):
        return a.truncated(K).with_flags(self_adjoint=True)
    w = c.g11.power(0.25)
    out = compose(a.left_multiply(w), GradedSymbol.multiplication(w.reciprocal()), K)
    return out.with_flags(self_adjoint=True)


def steklov_coeffs_closed(c: BoundaryComponent, p: int | None = None) -> SteklovCoeffs:
    """Closed forms: ``b₀ = 2π/ℓ``, ``b₁(±1) = ±(2π/ℓ)α``, ``b₂(±1) = ±κ/4π + (1/4π)∫q``.

    With explicit ``p`` the flux is ``p + mean(h1)`` instead of the canonical ``α``.
    """
    ell = boundary_length(c)
    alpha, p_can = flux_alpha(c)
    if p is None:
        p = p_can
        flux = alpha
    else:
        flux = p + float(c.h1.mean)
    b0 = 2 * math.pi / ell
    kappa = curvature_flux(c)
    Q = electric_integral(c)
    return SteklovCoeffs(
        b0,
        b0 * flux,
        -b0 * flux,
        (kappa + Q) / (4 * math.pi),
        (-kappa + Q) / (4 * math.pi),
        p,
        alpha,
        ell,
    )


def steklov_coeffs_via_nf(c: BoundaryComponent, K: int = 3, p: int | None = None) -> SteklovCoeffs:
    """Coefficients from the normal-form engine, checked against the closed forms.

    Raises
    ------
    ConventionError
        If ``b₀``, ``b₁`` or ``b₂`` differ from the closed forms by more than 1e-9.
    TruncationDepthError
        If ``K > 3`` for a symbol known only through order -1.
    """
    closed = steklov_coeffs_closed(c, p)
    a = symmetrized_dn_symbol(c, K)
    res = normal_form(a, K, closed.p)
    ref = closed.b
    for k in range(min(3, K)):
        for s in range(2):
            if abs(res.b[k][s] - ref[k][s]) > MATCH_TOL * max(1.0, abs(ref[k][s])):
                raise ConventionError(
                    f"engine b_{k}({'+' if s == 0 else '-'}1) = {res.b[k][s]!r} "
                    f"disagrees with closed form {ref[k][s]!r}"
                )
    b = list(res.b) + [(0.0, 0.0)] * max(0, 3 - K)
    return SteklovCoeffs(
        b[0][0],
        b[1][0],
        b[1][1],
        b[2][0],
        b[2][1],
        closed.p,
        closed.alpha,
        closed.length,
        tuple(b[3:]),
        "engine",
    )


def boundary_coeffs(sb: SurfaceBoundary | Sequence[BoundaryComponent]) -> list[SteklovCoeffs]:
    return [steklov_coeffs_closed(c) for c in components_from(sb)]


def component_spectrum_asymptotic(
    sc: SteklovCoeffs,
    n_min: int,
    n_max: int,
    k0: int | None = None,
    label: str = "",
) -> SpectrumSeq:
    """``λ_n = Σ_{k<=k0} b_k(sgn n) |n|^{1-k}`` for ``n_min <= n <= n_max``, ``n != 0``."""
    b = sc.b
    if k0 is None:
        k0 = len(b) - 1
    if k0 >= len(b):
        raise TruncationDepthError(1 - k0, f"b_{k0} is not available")
    n = np.array([k for k in range(n_min, n_max + 1) if k != 0], dtype=np.int64)
    an = np.abs(n).astype(float)
    plus = n > 0
    vals = np.zeros(len(n))
    for k in range(k0 + 1):
        coef = np.where(plus, b[k][0], b[k][1])
        vals += coef * an ** (1 - k)
    return SpectrumSeq.from_values(vals, n, label)


def boundary_spectrum_asymptotic(
    sb: SurfaceBoundary | Sequence[BoundaryComponent],
    n_max: int,
    k0: int = 2,
    upto: float | None = None,
) -> SpectrumSeq:
    """Merged two-sided asymptotic spectrum over all components."""
    seqs = [
        component_spectrum_asymptotic(sc, -n_max, n_max, k0, label=f"N{j + 1}")
        for j, sc in enumerate(boundary_coeffs(sb))
    ]
    return merge_spectra(seqs, upto)


__all__ = [
    "SteklovCoeffs",
    "dn_symbol",
    "symmetrized_dn_symbol",
    "symbol_terminates",
    "steklov_coeffs_closed",
    "steklov_coeffs_via_nf",
    "component_spectrum_asymptotic",
    "boundary_spectrum_asymptotic",
    "merge_spectra",
    "SpectrumSeq",
]
