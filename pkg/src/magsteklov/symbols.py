"""Classical symbols on the circle and their composition calculus.

A symbol is a finite descending list of positively homogeneous components.
Each component of order ``r`` is stored through its restrictions to
``ξ = +1`` and ``ξ = -1``; its value is ``plus(x)·ξ^r`` for ``ξ > 0`` and
``minus(x)·|ξ|^r`` for ``ξ < 0``.

The calculus implemented here is the left-quantisation one::

    compose(a, b) ~ Σ_k (-i)^k / k! · ∂_ξ^k a · ∂_x^k b
    adjoint(a)    ~ Σ_k (-i)^k / k! · ∂_ξ^k ∂_x^k conj(a)
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import factorial
from typing import Sequence

import numpy as np

from .errors import EllipticityError, TruncationDepthError
from .periodic import PeriodicFn

RESIDUAL_TOL = 1e-10
ELLIPTIC_TOL = 1e-12


def _falling(r: float, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= r - j
    return out


@dataclass(frozen=True, eq=False)
class HomogComponent:
    """One positively homogeneous component of order ``order``."""

    order: float
    plus: PeriodicFn
    minus: PeriodicFn

    @classmethod
    def zero(cls, order: float) -> "HomogComponent":
        z = PeriodicFn.zero()
        return cls(order, z, z)

    @classmethod
    def const(cls, order: float, plus: complex, minus: complex) -> "HomogComponent":
        return cls(order, PeriodicFn.constant(plus), PeriodicFn.constant(minus))

    @classmethod
    def even(cls, order: float, f: PeriodicFn) -> "HomogComponent":
        """``f(x)|ξ|^order``."""
        return cls(order, f, f)

    @classmethod
    def odd(cls, order: float, f: PeriodicFn) -> "HomogComponent":
        """``f(x) sgn(ξ) |ξ|^order``."""
        return cls(order, f, -f)

    def __call__(self, x, xi):
        xi = np.asarray(xi, dtype=float)
        if np.any(xi == 0):
            raise ValueError("homogeneous symbols are not evaluated at ξ = 0")
        p, m = self.plus(x), self.minus(x)
        return np.where(xi > 0, p, m) * np.abs(xi) ** self.order

    @property
    def is_zero(self) -> bool:
        return self.plus.is_zero and self.minus.is_zero

    @property
    def degree(self) -> int:
        return max(self.plus.degree, self.minus.degree)

    def branch(self, sign: int) -> PeriodicFn:
        return self.plus if sign > 0 else self.minus

    def map(self, f) -> "HomogComponent":
        return HomogComponent(self.order, f(self.plus), f(self.minus))

    def x_derivative(self, k: int = 1) -> "HomogComponent":
        if k == 0 or self.is_zero:
            return self
        return HomogComponent(self.order, self.plus.derivative(k), self.minus.derivative(k))

    def conj(self) -> "HomogComponent":
        return HomogComponent(self.order, self.plus.conj(), self.minus.conj())

    def means(self) -> tuple[complex, complex]:
        return complex(self.plus.mean), complex(self.minus.mean)

    def is_x_independent(self, tol: float = RESIDUAL_TOL) -> bool:
        return self.plus.is_constant(tol) and self.minus.is_constant(tol)

    def distance(self, other: "HomogComponent") -> float:
        if self.order != other.order:
            raise ValueError("components of different orders")
        return max(self.plus.distance(other.plus), self.minus.distance(other.minus))

    def __add__(self, other: "HomogComponent") -> "HomogComponent":
        if self.order != other.order:
            raise ValueError(f"cannot add components of orders {self.order} and {other.order}")
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        return HomogComponent(self.order, self.plus + other.plus, self.minus + other.minus)

    def __sub__(self, other: "HomogComponent") -> "HomogComponent":
        return self + (-other)

    def __neg__(self) -> "HomogComponent":
        return HomogComponent(self.order, -self.plus, -self.minus)

    def __mul__(self, other) -> "HomogComponent":
        if isinstance(other, HomogComponent):
            if self.is_zero or other.is_zero:
                return HomogComponent.zero(self.order + other.order)
            return HomogComponent(
                self.order + other.order, self.plus * other.plus, self.minus * other.minus
            )
        if isinstance(other, PeriodicFn):
            return HomogComponent(self.order, self.plus * other, self.minus * other)
        if other == 0:
            return HomogComponent.zero(self.order)
        return HomogComponent(self.order, self.plus * other, self.minus * other)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {"order": self.order, "plus": self.plus.to_json(), "minus": self.minus.to_json()}

    @classmethod
    def from_json(cls, obj) -> "HomogComponent":
        return cls(
            float(obj["order"]),
            PeriodicFn.from_json(obj["plus"], real=False),
            PeriodicFn.from_json(obj["minus"], real=False),
        )


def xi_derivative(c: HomogComponent) -> HomogComponent:
    """``∂_ξ`` of a homogeneous component (order drops by one)."""
    r = c.order
    if r == 0 or c.is_zero:
        return HomogComponent.zero(r - 1)
    return HomogComponent(r - 1, c.plus * r, c.minus * (-r))


def xi_derivative_k(c: HomogComponent, k: int) -> HomogComponent:
    if k == 0:
        return c
    r = c.order
    f = _falling(r, k)
    if f == 0 or c.is_zero:
        return HomogComponent.zero(r - k)
    return HomogComponent(r - k, c.plus * f, c.minus * (f * (-1) ** k))


@dataclass(frozen=True, eq=False)
class GradedSymbol:
    """Components of orders ``m, m-1, …, m-K+1``.

    ``exact`` declares every omitted lower component to be zero, so the
    symbol can be queried at any depth.  ``self_adjoint`` records that the
    symbol equals its adjoint at every retained order.
    """

    m: float
    components: tuple[HomogComponent, ...]
    exact: bool = False
    self_adjoint: bool = False

    def __post_init__(self):
        comps = tuple(self.components)
        for i, c in enumerate(comps):
            if abs(c.order - (self.m - i)) > 1e-12:
                raise ValueError(f"component {i} has order {c.order}, expected {self.m - i}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_components(
        cls, comps: Sequence[HomogComponent], m: float | None = None, exact: bool = False
    ) -> "GradedSymbol":
        """Fill gaps with zeros so orders descend by one from ``m``."""
        if m is None:
            m = max(c.order for c in comps)
        depth = int(round(m - min(c.order for c in comps))) + 1 if comps else 1
        slots = [HomogComponent.zero(m - i) for i in range(depth)]
        for c in comps:
            i = int(round(m - c.order))
            slots[i] = slots[i] + c
        return cls(m, tuple(slots), exact=exact)

    @classmethod
    def identity(cls) -> "GradedSymbol":
        return cls(0.0, (HomogComponent.const(0.0, 1.0, 1.0),), exact=True, self_adjoint=True)

    @classmethod
    def multiplication(cls, f: PeriodicFn) -> "GradedSymbol":
        """The multiplication operator by ``f`` (an exact order-0 symbol)."""
        return cls(0.0, (HomogComponent.even(0.0, f),), exact=True, self_adjoint=f.real)

    @property
    def depth(self) -> int:
        return len(self.components)

    def component(self, i: int) -> HomogComponent:
        if i < len(self.components):
            return self.components[i]
        if self.exact:
            return HomogComponent.zero(self.m - i)
        raise TruncationDepthError(self.m - i)

    def __getitem__(self, i: int) -> HomogComponent:
        return self.component(i)

    def __call__(self, x, xi):
        return sum(c(x, xi) for c in self.components)

    def truncated(self, K: int) -> "GradedSymbol":
        comps = tuple(self.component(i) for i in range(K))
        exact = self.exact and K >= self.depth
        return GradedSymbol(self.m, comps, exact=exact, self_adjoint=self.self_adjoint)

    def with_flags(self, **kw) -> "GradedSymbol":
        data = dict(exact=self.exact, self_adjoint=self.self_adjoint)
        data.update(kw)
        return GradedSymbol(self.m, self.components, **data)

    def map(self, f) -> "GradedSymbol":
        return GradedSymbol(self.m, tuple(f(c) for c in self.components), exact=self.exact)

    def left_multiply(self, f: PeriodicFn) -> "GradedSymbol":
        """Symbol of ``f ∘ Op(a)`` (exact: multiplication from the left)."""
        return self.map(lambda c: c * f)

    def __add__(self, other: "GradedSymbol") -> "GradedSymbol":
        if abs(self.m - other.m) > 1e-12:
            raise ValueError("leading orders differ")
        K = max(self.depth, other.depth)
        for s in (self, other):
            if not s.exact:
                K = min(K, s.depth)
        comps = tuple(self.component(i) + other.component(i) for i in range(K))
        return GradedSymbol(self.m, comps, exact=self.exact and other.exact)

    def __neg__(self) -> "GradedSymbol":
        return self.map(lambda c: -c)

    def __sub__(self, other: "GradedSymbol") -> "GradedSymbol":
        return self + (-other)

    def __mul__(self, s) -> "GradedSymbol":
        return self.map(lambda c: c * s)

    __rmul__ = __mul__

    def distance(self, other: "GradedSymbol", K: int | None = None) -> list[float]:
        """Per-order coefficient distances over the first ``K`` orders."""
        if K is None:
            K = min(self.depth, other.depth)
        return [self.component(i).distance(other.component(i)) for i in range(K)]

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "exact": self.exact,
            "components": [c.to_json() for c in self.components],
        }

    @classmethod
    def from_json(cls, obj) -> "GradedSymbol":
        if isinstance(obj, str):
            obj = json.loads(obj)
        comps = [HomogComponent.from_json(c) for c in obj["components"]]
        return cls.from_components(comps, m=float(obj["m"]), exact=bool(obj.get("exact", False)))


# composition ----------------------------------------------------------------


@dataclass
class _DerivCache:
    """Memoised ∂_ξ^k a_i and ∂_x^k b_j for one composition."""

    sym: GradedSymbol
    kind: str
    store: dict = field(default_factory=dict)

    def get(self, i: int, k: int) -> HomogComponent:
        key = (i, k)
        if key not in self.store:
            c = self.sym.component(i)
            self.store[key] = xi_derivative_k(c, k) if self.kind == "xi" else c.x_derivative(k)
        return self.store[key]


def _compose_level(da: _DerivCache, db: _DerivCache, n: int, order: float) -> HomogComponent:
    total = HomogComponent.zero(order)
    for k in range(n + 1):
        coef = (-1j) ** k / factorial(k)
        for i in range(n - k + 1):
            j = n - k - i
            left = da.get(i, k)
            if left.is_zero:
                continue
            right = db.get(j, k)
            if right.is_zero:
                continue
            total = total + (left * right) * coef
    return total


def compose(a: GradedSymbol, b: GradedSymbol, K: int) -> GradedSymbol:
    """Symbol of ``Op(a) ∘ Op(b)`` truncated to ``K`` orders.

    Raises
    ------
    TruncationDepthError
        If either input lacks a component needed for the requested depth.
    """
    m = a.m + b.m
    da, db = _DerivCache(a, "xi"), _DerivCache(b, "x")
    comps = tuple(_compose_level(da, db, n, m - n) for n in range(K))
    return GradedSymbol(m, comps)


def adjoint(a: GradedSymbol, K: int) -> GradedSymbol:
    """Symbol of the L²(dx) adjoint, truncated to ``K`` orders."""
    comps = []
    for n in range(K):
        total = HomogComponent.zero(a.m - n)
        for k in range(n + 1):
            c = a.component(n - k).conj()
            term = xi_derivative_k(c, k).x_derivative(k)
            if not term.is_zero:
                total = total + term * ((-1j) ** k / factorial(k))
        comps.append(total)
    return GradedSymbol(a.m, tuple(comps))


def check_elliptic(c: HomogComponent, tol: float = ELLIPTIC_TOL) -> None:
    scale = max(c.plus.max_abs(), c.minus.max_abs(), 1e-300)
    low = min(c.plus.min_abs(1024), c.minus.min_abs(1024))
    if low <= tol * scale:
        raise EllipticityError("leading symbol vanishes on the sample grid")


def parametrix(a: GradedSymbol, K: int) -> GradedSymbol:
    """Left inverse ``r`` with ``compose(r, a, K)`` equal to the identity symbol."""
    a0 = a.component(0)
    check_elliptic(a0)
    r0 = HomogComponent(-a.m, a0.plus.reciprocal(), a0.minus.reciprocal())
    comps = [r0]
    for n in range(1, K):
        partial = GradedSymbol(-a.m, tuple(comps) + (HomogComponent.zero(-a.m - n),))
        da, db = _DerivCache(partial, "xi"), _DerivCache(a, "x")
        rest = _compose_level(da, db, n, -n)
        comps.append(-(rest * r0))
    return GradedSymbol(-a.m, tuple(comps))


def conjugate(a: GradedSymbol, k: GradedSymbol, K: int) -> GradedSymbol:
    """Symbol of ``Op(k)^{-1} Op(a) Op(k)`` using the parametrix of ``k``."""
    return compose(parametrix(k, K), compose(a, k, K), K)


def symmetrize(a: GradedSymbol, K: int) -> GradedSymbol:
    """``(a + a*)/2``, self-adjoint through order ``m - K + 1``."""
    s = a.truncated(K) + adjoint(a, K)
    return (s * 0.5).with_flags(self_adjoint=True, exact=False)


def self_adjoint_defect(a: GradedSymbol, K: int | None = None) -> list[float]:
    if K is None:
        K = a.depth
    return a.truncated(K).distance(adjoint(a, K), K)
