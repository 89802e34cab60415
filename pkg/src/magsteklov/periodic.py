"""Smooth 2π-periodic functions stored as truncated Fourier series.

A :class:`PeriodicFn` holds the coefficients ``c_n`` for ``|n| <= N`` and
evaluates as ``sum c_n exp(i n x)``.  Linear operations and products act on
the coefficients exactly; nonlinear maps (square roots, exponentials,
reciprocals) go through an oversampled grid and are projected back with a
check on the discarded tail.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import ResolutionError

WORK_DEGREE = 128
QUADRATURE_NODES = 4096
PROJECTION_TOL = 1e-12
SYMMETRY_TOL = 1e-12


def grid(nodes: int) -> np.ndarray:
    """Uniform nodes ``2π j / nodes`` on ``[0, 2π)``."""
    return 2.0 * np.pi * np.arange(nodes) / nodes


def _fft_size(degree: int) -> int:
    size = 8
    while size < 2 * degree + 2:
        size *= 2
    return size


class PeriodicFn:
    """Truncated Fourier series on ℝ/2πℤ.

    Parameters
    ----------
    coeffs : array_like
        Coefficients ordered ``n = -N, ..., N`` (odd length).
    real : bool
        Declares the function real valued; requires ``c_{-n} = conj(c_n)``.
    """

    __slots__ = ("coeffs", "real", "_zero")

    def __init__(self, coeffs, real: bool = False):
        c = np.array(coeffs, dtype=complex)
        if c.ndim != 1 or len(c) % 2 == 0:
            raise ValueError("coefficient array must be one dimensional with odd length")
        if real:
            scale = max(1.0, float(np.max(np.abs(c))))
            if np.max(np.abs(c - np.conj(c[::-1]))) > SYMMETRY_TOL * scale:
                raise ValueError("coefficients violate conjugate symmetry of a real function")
            c = 0.5 * (c + np.conj(c[::-1]))
        c.setflags(write=False)
        self.coeffs = c
        self.real = bool(real)
        self._zero = None

    # construction ------------------------------------------------------

    @classmethod
    def constant(cls, value: complex, degree: int = 0) -> "PeriodicFn":
        c = np.zeros(2 * degree + 1, dtype=complex)
        c[degree] = value
        return cls(c, real=np.isreal(value))

    @classmethod
    def zero(cls, degree: int = 0) -> "PeriodicFn":
        return cls.constant(0.0, degree)

    @classmethod
    def from_modes(cls, modes: Mapping[int, complex], real: bool = False) -> "PeriodicFn":
        """Build from a sparse ``{n: c_n}`` mapping."""
        degree = max((abs(n) for n in modes), default=0)
        c = np.zeros(2 * degree + 1, dtype=complex)
        for n, v in modes.items():
            c[n + degree] += v
        return cls(c, real=real)

    @classmethod
    def trig(cls, const: float = 0.0, cos: Iterable[float] = (), sin: Iterable[float] = ()) -> "PeriodicFn":
        """Real trigonometric polynomial ``const + Σ cos_k cos(kx) + sin_k sin(kx)``."""
        cos, sin = list(cos), list(sin)
        modes: dict[int, complex] = {0: const}
        for k, a in enumerate(cos, start=1):
            modes[k] = modes.get(k, 0) + a / 2
            modes[-k] = modes.get(-k, 0) + a / 2
        for k, s in enumerate(sin, start=1):
            modes[k] = modes.get(k, 0) + s / 2j
            modes[-k] = modes.get(-k, 0) - s / 2j
        return cls.from_modes(modes, real=True)

    @classmethod
    def from_grid(
        cls,
        values: np.ndarray,
        degree: int | None = None,
        real: bool | None = None,
        tol: float | None = None,
    ) -> "PeriodicFn":
        """Project samples on the uniform grid onto modes ``|n| <= degree``.

        With ``tol`` set, raises :class:`ResolutionError` when the discarded
        modes exceed ``tol`` relative to the largest retained coefficient.
        """
        values = np.asarray(values)
        nodes = len(values)
        if degree is None:
            degree = WORK_DEGREE
        degree = min(degree, (nodes - 1) // 2)
        fhat = np.fft.fft(values) / nodes
        n = np.arange(-degree, degree + 1)
        c = fhat[n % nodes]
        if tol is not None:
            tail_idx = np.arange(degree + 1, nodes - degree)
            if len(tail_idx):
                tail = float(np.max(np.abs(fhat[tail_idx])))
                scale = max(1.0, float(np.max(np.abs(c))))
                if tail > tol * scale:
                    raise ResolutionError(
                        f"Fourier tail {tail:.3e} exceeds tolerance after projection to degree {degree}"
                    )
        if real is None:
            real = bool(np.isrealobj(values) or np.max(np.abs(np.imag(values))) == 0.0)
        if real:
            c = 0.5 * (c + np.conj(c[::-1]))
        return cls(c, real=real)

    @classmethod
    def from_callable(
        cls,
        f: Callable[[np.ndarray], np.ndarray],
        degree: int = WORK_DEGREE,
        nodes: int = QUADRATURE_NODES,
        tol: float | None = PROJECTION_TOL,
    ) -> "PeriodicFn":
        return cls.from_grid(f(grid(nodes)), degree=degree, tol=tol)

    # basic data -----------------------------------------------------------

    @property
    def degree(self) -> int:
        return (len(self.coeffs) - 1) // 2

    def coeff(self, n: int) -> complex:
        d = self.degree
        return complex(self.coeffs[n + d]) if abs(n) <= d else 0j

    @property
    def mean(self) -> complex | float:
        c0 = self.coeffs[self.degree]
        return float(c0.real) if self.real else complex(c0)

    @property
    def integral(self) -> complex | float:
        return 2.0 * np.pi * self.mean

    @property
    def is_zero(self) -> bool:
        if self._zero is None:
            self._zero = not np.any(self.coeffs)
        return self._zero

    def resized(self, degree: int) -> "PeriodicFn":
        d = self.degree
        if degree == d:
            return self
        c = np.zeros(2 * degree + 1, dtype=complex)
        k = min(d, degree)
        c[degree - k : degree + k + 1] = self.coeffs[d - k : d + k + 1]
        return PeriodicFn(c, real=self.real)

    # evaluation -----------------------------------------------------------

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        z = np.exp(1j * x)
        # Horner in z = e^{ix}; |z| = 1 keeps it stable
        acc = np.zeros(x.shape, dtype=complex)
        for c in self.coeffs[::-1]:
            acc = acc * z + c
        vals = acc * z ** (-self.degree)
        return vals.real if self.real else vals

    def values(self, nodes: int | None = None) -> np.ndarray:
        """Samples on ``grid(nodes)``; ``nodes`` must exceed ``2·degree``."""
        d = self.degree
        if nodes is None:
            nodes = _fft_size(d)
        if nodes <= 2 * d:
            return self(grid(nodes))
        buf = np.zeros(nodes, dtype=complex)
        n = np.arange(-d, d + 1)
        buf[n % nodes] = self.coeffs
        vals = np.fft.ifft(buf) * nodes
        return vals.real if self.real else vals

    def max_abs(self, nodes: int | None = None) -> float:
        return float(np.max(np.abs(self.values(nodes))))

    def min_abs(self, nodes: int | None = None) -> float:
        return float(np.min(np.abs(self.values(nodes))))

    # calculus -------------------------------------------------------------

    def derivative(self, k: int = 1) -> "PeriodicFn":
        if k == 0:
            return self
        n = np.arange(-self.degree, self.degree + 1)
        return PeriodicFn(self.coeffs * (1j * n) ** k, real=self.real)

    def primitive(self) -> "PeriodicFn":
        """Periodic part ``P`` of the antiderivative, normalised by ``P(0) = 0``.

        ``∫_0^x f = mean·x + P(x)``.
        """
        d = self.degree
        n = np.arange(-d, d + 1)
        c = np.zeros_like(self.coeffs)
        nz = n != 0
        c[nz] = self.coeffs[nz] / (1j * n[nz])
        c[d] = -np.sum(c)
        return PeriodicFn(c, real=self.real)

    def shifted(self, theta: float) -> "PeriodicFn":
        """``x ↦ f(x + θ)``."""
        n = np.arange(-self.degree, self.degree + 1)
        return PeriodicFn(self.coeffs * np.exp(1j * n * theta), real=self.real)

    def conj(self) -> "PeriodicFn":
        if self.real:
            return self
        return PeriodicFn(np.conj(self.coeffs[::-1]))

    @property
    def real_part(self) -> "PeriodicFn":
        return PeriodicFn(0.5 * (self.coeffs + np.conj(self.coeffs[::-1])), real=True)

    @property
    def imag_part(self) -> "PeriodicFn":
        return PeriodicFn((self.coeffs - np.conj(self.coeffs[::-1])) / 2j, real=True)

    def apply(
        self,
        func: Callable[[np.ndarray], np.ndarray],
        degree: int | None = None,
        nodes: int = QUADRATURE_NODES,
        tol: float | None = PROJECTION_TOL,
        real: bool | None = None,
    ) -> "PeriodicFn":
        """Pointwise nonlinear map evaluated on an oversampled grid."""
        if degree is None:
            degree = max(self.degree, WORK_DEGREE)
        nodes = max(nodes, _fft_size(self.degree))
        out = func(self.values(nodes))
        if real is None:
            real = self.real and np.isrealobj(out)
        return PeriodicFn.from_grid(out, degree=degree, real=real, tol=tol)

    def sqrt(self, **kw) -> "PeriodicFn":
        return self.apply(np.sqrt, **kw)

    def power(self, s: float, **kw) -> "PeriodicFn":
        return self.apply(lambda v: np.power(v, s), **kw)

    def reciprocal(self, **kw) -> "PeriodicFn":
        return self.apply(lambda v: 1.0 / v, **kw)

    def exp(self, **kw) -> "PeriodicFn":
        return self.apply(np.exp, **kw)

    # arithmetic -----------------------------------------------------------

    def _binary_linear(self, other, sign: float) -> "PeriodicFn":
        if isinstance(other, PeriodicFn):
            d = max(self.degree, other.degree)
            c = self.resized(d).coeffs + sign * other.resized(d).coeffs
            return PeriodicFn(c, real=self.real and other.real)
        c = self.coeffs.copy()
        c[self.degree] += sign * other
        return PeriodicFn(c, real=self.real and np.isreal(other))

    def __add__(self, other):
        return self._binary_linear(other, 1.0)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary_linear(other, -1.0)

    def __rsub__(self, other):
        return (-self)._binary_linear(other, 1.0)

    def __neg__(self):
        return PeriodicFn(-self.coeffs, real=self.real)

    def __mul__(self, other):
        if isinstance(other, PeriodicFn):
            return _product(self, other)
        return PeriodicFn(self.coeffs * other, real=self.real and np.isreal(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PeriodicFn):
            return self * other.reciprocal()
        return self * (1.0 / other)

    # comparison -----------------------------------------------------------

    def distance(self, other: "PeriodicFn | complex") -> float:
        """Max coefficient distance (bounds the sup-norm up to ``2N+1``)."""
        diff = self - other
        return float(np.max(np.abs(diff.coeffs)))

    def allclose(self, other, tol: float = 1e-10) -> bool:
        return self.distance(other) <= tol

    def is_constant(self, tol: float = 1e-10) -> bool:
        d = self.degree
        c = np.array(self.coeffs)
        c[d] = 0
        return float(np.max(np.abs(c), initial=0.0)) <= tol

    def __repr__(self) -> str:
        return f"PeriodicFn(degree={self.degree}, real={self.real}, mean={self.mean!r})"

    # serialisation --------------------------------------------------------

    def to_json(self) -> dict:
        return {"re": self.coeffs.real.tolist(), "im": self.coeffs.imag.tolist()}

    @classmethod
    def from_json(cls, obj: Mapping | float, real: bool = True) -> "PeriodicFn":
        if isinstance(obj, (int, float)):
            return cls.constant(float(obj))
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise ValueError("'re' and 'im' arrays differ in length")
        return cls(re + 1j * im, real=real)


def _product(f: PeriodicFn, g: PeriodicFn) -> PeriodicFn:
    # exact up to the retained degree: the grid resolves degree df + dg
    df, dg = f.degree, g.degree
    full = df + dg
    out_degree = min(full, max(df, dg, WORK_DEGREE))
    real = f.real and g.real
    if df == 0 or dg == 0:
        if df == 0:
            f, g = g, f
        return PeriodicFn((f.coeffs * g.coeffs[0]), real=real).resized(out_degree)
    nodes = _fft_size(full)
    vals = f.values(nodes) * g.values(nodes)
    return PeriodicFn.from_grid(vals, degree=out_degree, real=real)
