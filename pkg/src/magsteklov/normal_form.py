"""Reduction of an elliptic self-adjoint symbol on the circle to x-independent form.

The pipeline has three stages:

1. a change of variables ``φ`` making the principal symbol x-independent,
   followed by the ``J^{1/2}`` weight that keeps the transported operator
   self-adjoint on ``L²(dx)``;
2. conjugation by ``Op(k₁)`` with ``k₁`` unimodular, removing the
   x-dependence of the subprincipal symbol;
3. for each lower order ``ℓ``, conjugation by ``1 + Op(c_ℓ)``, which replaces
   ``a_ℓ`` by its mean.

Only the means ``b_k(±1)`` are outputs; the conjugators are not unitary, so
lower-order symbols may pick up imaginary parts with zero mean.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError, SelfAdjointnessError
from .periodic import QUADRATURE_NODES, WORK_DEGREE, PeriodicFn, grid
from .symbols import (
    RESIDUAL_TOL,
    GradedSymbol,
    HomogComponent,
    check_elliptic,
    compose,
    conjugate,
    self_adjoint_defect,
    xi_derivative_k,
)

REALITY_TOL = 1e-9
SYMMETRY_TOL = 1e-10
DEFAULT_DEPTH = 5
TRANSPORT_NODES = 512


@dataclass(frozen=True)
class Step1:
    """Outcome of the principal-symbol straightening."""

    b0: tuple[float, float]
    parity: int  # +1 if a0(x,-ξ) = a0(x,ξ), -1 if odd
    phi_grid: np.ndarray  # φ at grid(nodes) plus the endpoint 2π
    psi: PeriodicFn | None  # ψ(x) - x with ψ = φ^{-1}; None when φ = id

    @property
    def identity(self) -> bool:
        return self.psi is None


@dataclass(frozen=True)
class NormalFormResult:
    """Means of the x-independent symbol and the data of the conjugations."""

    b: list[tuple[float, float]]
    phi: np.ndarray
    k1: HomogComponent
    p: int
    m: float
    engine_derived_from: int = 3
    diagnostics: dict = field(default_factory=dict)

    def coefficient(self, k: int, sign: int) -> float:
        return self.b[k][0 if sign > 0 else 1]


# step 1 -----------------------------------------------------------------------


def principal_parity(a0: HomogComponent, tol: float = SYMMETRY_TOL) -> int:
    scale = max(a0.plus.max_abs(), 1e-300)
    if a0.plus.distance(a0.minus) <= tol * scale:
        return 1
    if a0.plus.distance(-a0.minus) <= tol * scale:
        return -1
    raise PreconditionError("principal symbol is neither even nor odd in ξ")


def nf_step1(a0: HomogComponent, m: float, nodes: int = QUADRATURE_NODES) -> Step1:
    """Diffeomorphism ``φ`` straightening the principal symbol, and ``b₀(±1)``.

    ``b₀ = (2π)^m (∫|a₀(x,1)|^{-1/m} dx)^{-m} · sgn a₀`` and
    ``φ(x) = ∫_0^x (b₀(1)/a₀(y,1))^{1/m} dy``.
    """
    if m == 0:
        raise PreconditionError("leading order must be nonzero")
    check_elliptic(a0)
    parity = principal_parity(a0)
    vals = a0.plus.values(nodes)
    if np.max(np.abs(np.imag(vals))) > SYMMETRY_TOL * np.max(np.abs(vals)):
        raise PreconditionError("principal symbol is not real")
    vals = np.real(vals)
    sign = np.sign(vals[0])
    if np.any(np.sign(vals) != sign):
        raise PreconditionError("principal symbol changes sign")
    weight = np.abs(vals) ** (-1.0 / m)
    b0_plus = float(sign * np.mean(weight) ** (-m))
    b0 = (b0_plus, parity * b0_plus)

    if a0.is_x_independent(1e-13 * abs(b0_plus)):
        x = np.append(grid(nodes), 2 * np.pi)
        return Step1(b0, parity, x, None)

    dphi = PeriodicFn.from_grid(weight * abs(b0_plus) ** (1.0 / m), degree=WORK_DEGREE, real=True)
    big_phi = (dphi - 1.0).primitive()  # φ(y) = y + Φ(y)
    psi = _invert(dphi, big_phi)
    x = grid(nodes)
    phi_vals = np.append(x + big_phi(x), 2 * np.pi)
    return Step1(b0, parity, phi_vals, psi)


def _invert(dphi: PeriodicFn, big_phi: PeriodicFn, nodes: int = TRANSPORT_NODES) -> PeriodicFn:
    """Periodic part ``u = ψ - id`` of ``ψ = φ^{-1}`` by Newton on a grid."""
    x = grid(nodes)
    y = x - big_phi(x)
    for _ in range(60):
        step = (y + big_phi(y) - x) / dphi(y)
        y = y - step
        if np.max(np.abs(step)) < 1e-15:
            break
    return PeriodicFn.from_grid(y - x, degree=WORK_DEGREE, real=True, tol=1e-11)


def _series_mul(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    out = np.zeros_like(f)
    for n in range(len(f)):
        out[n] = sum(f[k] * g[n - k] for k in range(n + 1))
    return out


def _series_pow(g: np.ndarray, s: float) -> np.ndarray:
    """``g(t)^s`` for a series with positive constant term (pointwise in x)."""
    h = np.zeros_like(g)
    h[0] = g[0] ** s
    for n in range(1, len(g)):
        acc = sum(((s + 1) * k - n) * g[k] * h[n - k] for k in range(1, n + 1))
        h[n] = acc / (n * g[0])
    return h


def transport(a: GradedSymbol, psi: PeriodicFn, K: int, nodes: int = TRANSPORT_NODES) -> GradedSymbol:
    """Symbol of ``J^{1/2} φ_* Op(a) φ^* J^{-1/2}`` with ``ψ = φ^{-1}``, ``J = ψ'``.

    The pushed-forward kernel has amplitude ``a(ψ(x), η/G(x,y)) J(y)/G(x,y)``
    with ``G(x,y) = (ψ(x) - ψ(y))/(x - y)``; reducing the ``y``-dependence
    by Taylor expansion at ``y = x`` gives the left symbol.
    """
    x = grid(nodes)
    # Taylor data at each grid point: ψ^{(i+1)}(x)/i! and ψ^{(i+1)}(x)/(i+1)!
    derivs = [1.0 + psi.derivative(1).values(nodes)]
    for i in range(2, K + 1):
        derivs.append(psi.derivative(i).values(nodes))
    derivs = np.real(np.array(derivs))
    fact = np.cumprod([1.0] + list(range(1, K + 1)))
    J_ser = np.array([derivs[i] / fact[i] for i in range(K)])
    G_ser = np.array([derivs[i] / fact[i + 1] for i in range(K)])
    points = x + psi.values(nodes)

    pushed = []
    for n in range(K):
        order = a.m - n
        plus = np.zeros(nodes, dtype=complex)
        minus = np.zeros(nodes, dtype=complex)
        for j in range(n + 1):
            k = n - j
            comp = a.component(j)
            if comp.is_zero:
                continue
            H = _series_mul(J_ser, _series_pow(G_ser, -(comp.order + 1.0)))
            dc = xi_derivative_k(comp, k)
            if dc.is_zero:
                continue
            w = (-1j) ** k * H[k]
            plus += dc.plus(points) * w
            minus += dc.minus(points) * w
        pushed.append(
            HomogComponent(
                order,
                PeriodicFn.from_grid(plus, degree=WORK_DEGREE, tol=1e-10),
                PeriodicFn.from_grid(minus, degree=WORK_DEGREE, tol=1e-10),
            )
        )
    f = GradedSymbol(a.m, tuple(pushed))
    J = PeriodicFn.from_grid(derivs[0], degree=WORK_DEGREE, real=True)
    half = J.sqrt()
    return compose(f, GradedSymbol.multiplication(half.reciprocal()), K).left_multiply(half)


# step 2 -----------------------------------------------------------------------


def _constant_value(c: HomogComponent, sign: int) -> complex:
    return complex(c.branch(sign).mean)


def nf_step2(a: GradedSymbol, p: int) -> tuple[HomogComponent, tuple[float, float]]:
    """Unimodular conjugator ``k₁`` and ``b₁(±1)`` for an x-independent principal part.

    ``b₁(ξ) = m p ξ^{-1} a₀(ξ) + mean a₁(·, ξ)`` and
    ``k₁ = exp(i ∫_0^x (b₁ - a₁)/(m ξ^{-1} a₀) dy)``.
    """
    a0, a1 = a.component(0), a.component(1)
    scale = max(a0.plus.max_abs(), a0.minus.max_abs())
    if not a0.is_x_independent(RESIDUAL_TOL * max(scale, 1.0)):
        raise PreconditionError("principal symbol must be x-independent before the second step")
    m = a.m
    branches = []
    b1 = []
    for sign in (1, -1):
        a0v = _constant_value(a0, sign).real
        f = a1.branch(sign)
        if abs(f.imag_part.mean) > REALITY_TOL * max(1.0, abs(f.mean)):
            raise SelfAdjointnessError("mean of the subprincipal symbol is not real")
        denom = m * sign * a0v  # m ξ^{-1} a₀(ξ) at ξ = ±1
        b1v = denom * p + float(np.real(f.mean))
        b1.append(b1v)
        # periodic part of the exponent; e^{ipx} restores the full winding
        expo = ((b1v - f) * (1.0 / denom)).primitive() * 1j
        if not f.real and np.max(np.abs(f.imag_part.coeffs)) > REALITY_TOL:
            raise SelfAdjointnessError("subprincipal symbol is not real after straightening")
        branches.append(_winding_exp(expo, p))
    k1 = HomogComponent(0.0, branches[0], branches[1])
    return k1, (b1[0], b1[1])


def _winding_exp(expo: PeriodicFn, p: int) -> PeriodicFn:
    """``exp(i p x + expo(x))`` as a Fourier series."""
    core = expo.apply(np.exp, degree=WORK_DEGREE, nodes=1024, tol=1e-12, real=False)
    c = np.zeros(2 * (WORK_DEGREE + abs(p)) + 1, dtype=complex)
    d = WORK_DEGREE + abs(p)
    c[d - WORK_DEGREE + p : d + WORK_DEGREE + p + 1] = core.coeffs
    return PeriodicFn(c)


# step 3 -----------------------------------------------------------------------


def _corrector(a: GradedSymbol, ell: int) -> tuple[GradedSymbol, tuple[complex, complex]]:
    """``1 + c_ℓ`` with ``c_ℓ = i/(m ξ^{-1} a₀) ∫_0^x (b_ℓ - a_ℓ)``."""
    a0, al = a.component(0), a.component(ell)
    m = a.m
    parts = []
    means = []
    for sign in (1, -1):
        a0v = _constant_value(a0, sign).real
        f = al.branch(sign)
        bl = complex(f.mean)
        means.append(bl)
        parts.append(((bl - f) * (1j / (m * sign * a0v))).primitive())
    c = HomogComponent(1.0 - ell, parts[0], parts[1])
    comps = [HomogComponent.const(0.0, 1.0, 1.0)]
    comps += [HomogComponent.zero(-i) for i in range(1, ell - 1)]
    comps.append(c)
    return GradedSymbol(0.0, tuple(comps), exact=True), (means[0], means[1])


def _real_pair(pair, what: str) -> tuple[float, float]:
    for v in pair:
        if abs(np.imag(v)) > REALITY_TOL * max(1.0, abs(v)):
            raise SelfAdjointnessError(f"{what} has imaginary part {np.imag(v):.3e}")
    return float(np.real(pair[0])), float(np.real(pair[1]))


def normal_form(
    a: GradedSymbol,
    K: int = DEFAULT_DEPTH,
    p: int = 0,
    check_self_adjoint: bool = True,
) -> NormalFormResult:
    """Coefficients ``b_k(±1)``, ``k < K``, of the x-independent normal form.

    Raises
    ------
    PreconditionError
        Leading order zero, principal symbol not even/odd, or the symbol is
        not self-adjoint.
    SelfAdjointnessError
        A mean ``b_k`` comes out non-real.
    TruncationDepthError
        The input symbol lacks orders required for depth ``K``.
    """
    if K < 1:
        raise ValueError("depth must be at least 1")
    a = a.truncated(K)
    if check_self_adjoint:
        defect = self_adjoint_defect(a, K)
        scale = max(1.0, a.component(0).plus.max_abs())
        if max(defect) > 1e-9 * scale:
            raise PreconditionError(
                f"symbol is not self-adjoint (defect {max(defect):.2e} at order "
                f"{a.m - int(np.argmax(defect)):g})"
            )
    s1 = nf_step1(a.component(0), a.m)
    diag: dict = {"phi_identity": s1.identity}
    if s1.psi is not None:
        a = transport(a, s1.psi, K)
        residual = max(a.component(0).plus.distance(s1.b0[0]), a.component(0).minus.distance(s1.b0[1]))
        diag["step1_residual"] = residual
        if residual > RESIDUAL_TOL * max(1.0, abs(s1.b0[0])):
            raise PreconditionError(f"straightened principal symbol retains x-dependence {residual:.2e}")
    # pin the principal part to its exact constant value
    a = GradedSymbol(
        a.m, (HomogComponent.const(a.m, *s1.b0),) + a.components[1:], exact=a.exact
    )
    b = [s1.b0]
    if K == 1:
        return NormalFormResult(b, s1.phi_grid, HomogComponent.const(0.0, 1.0, 1.0), p, a.m, diagnostics=diag)

    k1, b1 = nf_step2(a, p)
    b.append(b1)
    ksym = GradedSymbol(0.0, (k1,), exact=True)
    a = conjugate(a, ksym, K)
    residuals = [_level_residual(a.component(1), b1)]
    for ell in range(2, K):
        corr, means = _corrector(a, ell)
        b.append(_real_pair(means, f"b_{ell}"))
        a = conjugate(a, corr, K)
        residuals.append(_level_residual(a.component(ell), b[-1]))
    diag["level_residuals"] = residuals
    return NormalFormResult(b, s1.phi_grid, k1, p, a.m, diagnostics=diag)


def _level_residual(c: HomogComponent, target: tuple[float, float]) -> float:
    return max(c.plus.distance(target[0]), c.minus.distance(target[1]))


def b2_closed_form(
    a0: HomogComponent,
    a1: HomogComponent,
    a2: HomogComponent,
    b1: tuple[float, float],
    m: float,
) -> tuple[float, float]:
    """Second mean when the principal symbol is already x-independent.

    ``b₂(ξ) = mean[a₂ + ((m-1)/m) a₁(b₁-a₁)/a₀ - ½ ξ^{-2} m(m-1) a₀ ∂_x²k₁/k₁]``.
    """
    check_elliptic(a0)
    out = []
    for idx, sign in enumerate((1, -1)):
        a0v = _constant_value(a0, sign).real
        f1, f2 = a1.branch(sign), a2.branch(sign)
        bv = b1[idx]
        # ∂_x k₁/k₁ = i(b₁ - a₁)/(m ξ^{-1} a₀) =: i·g ; ∂_x²k₁/k₁ = i g' - g²
        g = (bv - f1) * (1.0 / (m * sign * a0v))
        d2 = g.derivative() * 1j - g * g
        total = f2 + f1 * (bv - f1) * ((m - 1) / (m * a0v)) - d2 * (0.5 * m * (m - 1) * a0v)
        out.append(complex(total.mean))
    return _real_pair(out, "b_2")
