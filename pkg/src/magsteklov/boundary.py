"""Boundary jet data of a surface and the invariants read off from it.

Each boundary circle is parameterised by a constant multiple of arc length
over ``[0, 2π)``, in boundary normal coordinates ``g = g11 dx₁² + dx₂²`` and
the gauge ``A₂ = 0``.  Purely imaginary data are stored through real
representatives: ``A₁ = i·h1`` and ``∂_{x₂}A₁ = i·w1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidGeometryError
from .periodic import QUADRATURE_NODES, PeriodicFn

FIELDS = ("g11", "h1", "w1", "q")
POSITIVITY_NODES = 4096


@dataclass(frozen=True, eq=False)
class BoundaryComponent:
    g11: PeriodicFn
    h1: PeriodicFn
    w1: PeriodicFn
    q: PeriodicFn

    def __post_init__(self):
        for name in FIELDS:
            f = getattr(self, name)
            if not isinstance(f, PeriodicFn):
                raise TypeError(f"{name} must be a PeriodicFn")
            if not f.real:
                raise InvalidGeometryError(f"{name} must be real valued")
        if float(np.min(self.g11.values(POSITIVITY_NODES))) <= 0.0:
            raise InvalidGeometryError("g11 must be positive")

    @classmethod
    def constant(cls, g11: float = 1.0, h1: float = 0.0, w1: float = 0.0, q: float = 0.0):
        c = PeriodicFn.constant
        return cls(c(float(g11)), c(float(h1)), c(float(w1)), c(float(q)))

    def replace(self, **kw) -> "BoundaryComponent":
        data = {name: getattr(self, name) for name in FIELDS}
        data.update(kw)
        return BoundaryComponent(**data)

    def negated_potential(self) -> "BoundaryComponent":
        """Same geometry with ``A`` replaced by ``-A``."""
        return self.replace(h1=-self.h1, w1=-self.w1)

    @property
    def is_flat_metric(self) -> bool:
        return self.g11.is_constant(1e-14)

    def to_json(self) -> dict:
        return {name: getattr(self, name).to_json() for name in FIELDS}

    @classmethod
    def from_json(cls, obj) -> "BoundaryComponent":
        missing = [k for k in FIELDS if k not in obj]
        if missing:
            raise InvalidGeometryError(f"boundary component lacks {', '.join(missing)}")
        return cls(**{k: PeriodicFn.from_json(obj[k], real=True) for k in FIELDS})


@dataclass(frozen=True, eq=False)
class SurfaceBoundary:
    components: tuple[BoundaryComponent, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise InvalidGeometryError("a surface boundary needs at least one component")
        object.__setattr__(self, "components", comps)

    @property
    def m(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def total_length(self) -> float:
        return sum(boundary_length(c) for c in self.components)

    def to_json(self) -> dict:
        return {"components": [c.to_json() for c in self.components], "meta": dict(self.meta)}

    @classmethod
    def from_json(cls, obj) -> "SurfaceBoundary":
        if "components" not in obj:
            raise InvalidGeometryError("boundary file lacks 'components'")
        try:
            comps = [BoundaryComponent.from_json(c) for c in obj["components"]]
        except ValueError as exc:
            if isinstance(exc, InvalidGeometryError):
                raise
            raise InvalidGeometryError(str(exc)) from exc
        return cls(tuple(comps), dict(obj.get("meta", {})))


def load_boundary(path: str | Path) -> SurfaceBoundary:
    with open(path) as fh:
        return SurfaceBoundary.from_json(json.load(fh))


def save_boundary(sb: SurfaceBoundary, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(sb.to_json(), fh)


def sqrt_g11(c: BoundaryComponent) -> PeriodicFn:
    return c.g11.sqrt(nodes=QUADRATURE_NODES)


def boundary_length(c: BoundaryComponent) -> float:
    """``∫_0^{2π} √g11 dx``."""
    return float(sqrt_g11(c).integral)


def flux_alpha(c: BoundaryComponent) -> tuple[float, int]:
    """Canonical flux ``α ∈ [0, 1)`` and the integer ``p`` with ``α = p + mean(h1)``."""
    v = float(c.h1.mean)
    p = -math.floor(v)
    alpha = p + v
    if alpha >= 1.0:  # floating rounding at the top of the interval
        alpha -= 1.0
        p -= 1
    return alpha, p


def curvature_flux(c: BoundaryComponent) -> float:
    """``κ = ∫_0^{2π} w1 dx``, so that ``b₂(±1) = ±κ/4π + (1/4π)∫q``."""
    return float(c.w1.integral)


def electric_integral(c: BoundaryComponent) -> float:
    """``∫ q`` against arc length, ``∫_0^{2π} q √g11 dx``."""
    return float((c.q * sqrt_g11(c)).integral)


def make_flat_cylinder(L: float, beta: float) -> SurfaceBoundary:
    """The two boundary circles of ``S¹ × [-L, L]`` with potential ``iβ dx``."""
    if not L > 0:
        raise InvalidGeometryError("cylinder half-length must be positive")
    comp = BoundaryComponent.constant(1.0, beta, 0.0, 0.0)
    return SurfaceBoundary((comp, comp), {"model": "cylinder", "L": float(L), "beta": float(beta)})


def random_component(
    rng: np.random.Generator,
    bandwidth: int = 4,
    g_range: tuple[float, float] = (0.5, 2.0),
    amplitude: float = 1.0,
) -> BoundaryComponent:
    """Random trigonometric boundary data with ``g11`` inside ``g_range``."""
    lo, hi = g_range
    cos = rng.uniform(-1, 1, bandwidth) / np.arange(1, bandwidth + 1)
    sin = rng.uniform(-1, 1, bandwidth) / np.arange(1, bandwidth + 1)
    shape = PeriodicFn.trig(0.0, cos, sin)
    vals = shape.values(1024)
    span = float(np.max(vals) - np.min(vals)) or 1.0
    # rescale into a random subinterval of [lo, hi]
    width = rng.uniform(0.2, 1.0) * (hi - lo)
    base = rng.uniform(lo, hi - width)
    g11 = (shape - float(np.min(vals))) * (width / span) + base

    def rand_trig(center: float) -> PeriodicFn:
        return PeriodicFn.trig(
            center,
            amplitude * rng.uniform(-1, 1, bandwidth),
            amplitude * rng.uniform(-1, 1, bandwidth),
        )

    return BoundaryComponent(
        g11,
        rand_trig(rng.uniform(-2, 2)),
        rand_trig(rng.uniform(-1, 1)),
        rand_trig(rng.uniform(-2, 2)),
    )


def components_from(data: Sequence[BoundaryComponent] | SurfaceBoundary) -> tuple[BoundaryComponent, ...]:
    if isinstance(data, SurfaceBoundary):
        return data.components
    return tuple(data)
