"""Estimating boundary invariants from eigenvalue tails.

A single boundary component contributes two ladders to the spectrum,

    λ⁺_n = A(n + α) + C₊/n + …,    λ⁻_n = A(n - α) + C₋/n + …,    n >= 1,

with ``A = 2π/ℓ``, ``C± = (±κ + ∫q)/4π``.  The estimators below split the
sorted tail into ladders by matching it against a model, then refit the
model by least squares.  Only the sorted multiset of eigenvalues is used.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import FitError, ModelMismatchError, PreconditionError
from .progressions import ECSCertificate, ecs_certificate
from .spectrum import SpectrumSeq

EPS_ALIGN = 1e-3
FIT_TOL = 1e-2
MIN_SINGLE = 60
MIN_MULTI = 100
REFINE_STEPS = 6
VIOLATION_EPS = 0.02
SLOPE_TOL = 0.01


class DegeneracyWarning(UserWarning):
    """Several component counts explain the same spectral tail."""


def _values(sigma) -> np.ndarray:
    if isinstance(sigma, SpectrumSeq):
        return np.asarray(sigma.values, dtype=float)
    v = np.sort(np.asarray(sigma, dtype=float))
    if v.ndim != 1:
        raise ValueError("expected a one dimensional list of eigenvalues")
    return v


def default_head(n: int) -> int:
    return max(10, n // 10)


# parity fits -----------------------------------------------------------------------


@dataclass(frozen=True)
class LadderFit:
    """``σ ≈ A·n + B + C/n`` over ``n_range``."""

    A: float
    B: float
    C: float
    residual: float
    n_range: tuple[int, int]


@dataclass(frozen=True)
class EvenOddFit:
    even: LadderFit
    odd: LadderFit


def _ladder_fit(n: np.ndarray, y: np.ndarray) -> LadderFit:
    if len(np.unique(n)) < 3:
        raise FitError("fewer than 3 distinct indices in the fit window")
    M = np.column_stack([n, np.ones_like(n), 1.0 / n])
    coef, *_ = np.linalg.lstsq(M, y, rcond=None)
    res = float(np.max(np.abs(M @ coef - y)))
    return LadderFit(float(coef[0]), float(coef[1]), float(coef[2]), res, (int(n[0]), int(n[-1])))


def fit_even_odd(sigma, window: tuple[int, int] | None = None) -> EvenOddFit:
    """Fit ``σ_{2n}`` and ``σ_{2n+1}`` (1-based ranks) separately.

    ``window`` is an inclusive range of ``n``; the default skips the first
    tenth of the spectrum.
    """
    v = _values(sigma)
    n_top = (len(v) - 1) // 2
    if window is None:
        window = (max(1, default_head(len(v)) // 2), n_top)
    lo, hi = window
    hi = min(hi, n_top)
    if lo < 1 or hi - lo + 1 < 8:
        raise FitError("the fit window needs at least 8 indices per parity")
    n = np.arange(lo, hi + 1, dtype=float)
    even = v[2 * np.arange(lo, hi + 1) - 1]
    odd = v[2 * np.arange(lo, hi + 1)]
    return EvenOddFit(_ladder_fit(n, even), _ladder_fit(n, odd))


# ladder models -------------------------------------------------------------------


@dataclass
class Ladder:
    """One component: ``A(n ± α) + C±/n + D±/n²``."""

    A: float
    alpha: float
    C_plus: float = 0.0
    C_minus: float = 0.0
    D_plus: float = 0.0
    D_minus: float = 0.0

    def values(self, n_max: int) -> tuple[np.ndarray, np.ndarray]:
        n = np.arange(1, n_max + 1, dtype=float)
        plus = self.A * (n + self.alpha) + self.C_plus / n + self.D_plus / n**2
        minus = self.A * (n - self.alpha) + self.C_minus / n + self.D_minus / n**2
        return plus, minus


def _model(ladders: Sequence[Ladder], top: float):
    """Sorted model values with ``(component, branch, n)`` tags."""
    vals, comp, branch, idx = [], [], [], []
    for j, lad in enumerate(ladders):
        n_max = int(top / lad.A + abs(lad.alpha)) + 4
        plus, minus = lad.values(n_max)
        n = np.arange(1, n_max + 1)
        for sgn, arr in ((1, plus), (-1, minus)):
            vals.append(arr)
            comp.append(np.full(n_max, j))
            branch.append(np.full(n_max, sgn))
            idx.append(n)
    vals = np.concatenate(vals)
    order = np.argsort(vals, kind="stable")
    return (
        vals[order],
        np.concatenate(comp)[order],
        np.concatenate(branch)[order],
        np.concatenate(idx)[order],
    )


def _align(obs: np.ndarray, model: np.ndarray, spread: int = 3) -> int:
    """Offset ``t`` minimising ``mean |obs_i - model_{t+i}|``."""
    t0 = int(np.searchsorted(model, obs[0]))
    best, best_t = math.inf, None
    for t in range(t0 - spread, t0 + spread + 1):
        if t < 0 or t + len(obs) > len(model):
            continue
        cost = float(np.mean(np.abs(obs - model[t : t + len(obs)])))
        if cost < best:
            best, best_t = cost, t
    if best_t is None:
        raise FitError("model does not cover the observed range")
    return best_t


def _match(obs: np.ndarray, ladders: Sequence[Ladder]):
    vals, comp, branch, idx = _model(ladders, float(obs[-1]) * 1.05 + 1.0)
    t = _align(obs, vals)
    sl = slice(t, t + len(obs))
    return vals[sl], comp[sl], branch[sl], idx[sl]


def _fit_ladder(y: np.ndarray, branch: np.ndarray, n: np.ndarray, prev: Ladder) -> Ladder:
    plus, minus = branch > 0, branch < 0
    if plus.sum() < 4 or minus.sum() < 4:
        return prev
    n = n.astype(float)
    cols = [
        n,
        np.where(plus, 1.0, -1.0),
        np.where(plus, 1.0 / n, 0.0),
        np.where(minus, 1.0 / n, 0.0),
    ]
    if plus.sum() >= 8 and minus.sum() >= 8:
        cols += [np.where(plus, 1.0 / n**2, 0.0), np.where(minus, 1.0 / n**2, 0.0)]
    M = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(M, y, rcond=None)
    coef = list(coef) + [0.0] * (6 - len(coef))
    A = float(coef[0])
    return Ladder(A, float(coef[1]) / A, *map(float, coef[2:6]))


def _refine(obs: np.ndarray, ladders: list[Ladder], steps: int = REFINE_STEPS):
    for _ in range(steps):
        _, comp, branch, n = _match(obs, ladders)
        new = []
        for j, lad in enumerate(ladders):
            sel = comp == j
            new.append(_fit_ladder(obs[sel], branch[sel], n[sel], lad) if sel.any() else lad)
        if any(l.A <= 0 for l in new):
            break
        ladders = new
    pred, *_ = _match(obs, ladders)
    return ladders, float(np.max(np.abs(obs - pred)))


def _fold(lad: Ladder) -> tuple[float, float, float]:
    """Representative ``α ∈ [0, 1/2]`` with the branch coefficients in that frame."""
    a = lad.alpha % 1.0
    if a > 0.5:
        return 1.0 - a, lad.C_minus, lad.C_plus
    return a, lad.C_plus, lad.C_minus


# single component ----------------------------------------------------------------


def _alternative(fits) -> float | None:
    """Best residual among fits whose flux representative differs from the winner."""
    a0 = _fold(fits[0][0])[0]
    others = [r for lad, r, _ in fits[1:] if abs(_fold(lad)[0] - a0) > 1e-6 or lad.alpha % 1 != fits[0][0].alpha % 1]
    return min(others) if others else None


def _head_ladder(n: int) -> list[int]:
    h0 = default_head(n)
    return [h for h in (h0, 2 * h0, 4 * h0) if n - h >= 40] or [h0]


def _single_fits(v: np.ndarray, h: int) -> list[tuple[Ladder, float, int]]:
    """Refined single-ladder fits from several starting points, best first."""
    eo = fit_even_odd(v, (h // 2 + 1, (len(v) - 1) // 2))
    A0 = 0.5 * (eo.even.A + eo.odd.A)
    if A0 <= 0:
        raise ModelMismatchError("spectrum tail does not grow linearly")
    # lists truncated by index rather than energy are incomplete near the top
    obs = v[h:][v[h:] <= v[-1] - 2 * A0]
    f = (eo.even.B / A0) % 1.0
    seeds = [Ladder(A0, f), Ladder(A0, 1.0 - f)]
    seeds += [Ladder(A0, f, eo.even.C, eo.odd.C), Ladder(A0, 1.0 - f, eo.odd.C, eo.even.C)]
    seeds += [Ladder(A0, f, eo.odd.C, eo.even.C), Ladder(A0, 1.0 - f, eo.even.C, eo.odd.C)]
    fits = []
    for seed in seeds:
        try:
            (lad,), res = _refine(obs, [seed])
        except FitError:
            continue
        fits.append((lad, res, len(obs)))
    fits.sort(key=lambda t: t[1])
    return fits


@dataclass(frozen=True)
class RecoveredInvariants:
    """Boundary length, flux class, ``|κ|`` and ``∫q`` read off one component's spectrum."""

    length: float
    alpha: float
    curvature_flux_abs: float
    q_integral: float
    case_tag: str
    ambiguous: bool = False
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "length": self.length,
            "alpha": self.alpha,
            "curvature_flux_abs": self.curvature_flux_abs,
            "q_integral": self.q_integral,
            "case_tag": self.case_tag,
            "ambiguous": self.ambiguous,
            "diagnostics": self.diagnostics,
        }


def recover_single(
    sigma,
    head: int | None = None,
    eps_align: float = EPS_ALIGN,
    tol: float = FIT_TOL,
) -> RecoveredInvariants:
    """Invariants of a single boundary component from its spectrum.

    Raises
    ------
    PreconditionError
        With fewer than 60 eigenvalues.
    ModelMismatchError
        When no single-component model fits the tail to ``tol·A``.
    """
    v = _values(sigma)
    if len(v) < MIN_SINGLE:
        raise PreconditionError(f"need at least {MIN_SINGLE} eigenvalues, got {len(v)}")
    heads = [head] if head is not None else _head_ladder(len(v))
    runs = [(h, _single_fits(v, h)) for h in heads]
    runs = [(h, fits) for h, fits in runs if fits]
    if not runs:
        raise ModelMismatchError("could not align a single-component model with the tail")
    # a longer head only wins if it clearly reduces the misfit
    h, fits = runs[0]
    for h2, fits2 in runs[1:]:
        if fits2[0][1] < 0.5 * fits[0][1] and fits[0][1] > 1e-12 * v[-1]:
            h, fits = h2, fits2
    obs_len = fits[0][2]
    lad, resid, _ = fits[0]
    if resid > tol * lad.A:
        raise ModelMismatchError(
            f"single-component fit residual {resid:.3g} exceeds {tol * lad.A:.3g}"
        )
    alpha, cp, cm = _fold(lad)
    edge = min(alpha, 0.5 - alpha)
    if alpha < eps_align:
        tag = "alpha_zero"
    elif alpha > 0.5 - eps_align:
        tag = "alpha_half"
    else:
        tag = "generic"
    diag = {
        "residual": resid,
        "alternative_residual": _alternative(fits),
        "head": h,
        "tail": obs_len,
        "A": lad.A,
    }
    if tag != "generic":
        # both 1/n limits vanish: order -1 carries no information here
        diag["degenerate"] = bool(max(abs(cp), abs(cm)) <= max(resid, 1e-12) * 10)
    return RecoveredInvariants(
        length=2 * math.pi / lad.A,
        alpha=alpha,
        curvature_flux_abs=2 * math.pi * abs(cp - cm),
        q_integral=2 * math.pi * (cp + cm),
        case_tag=tag,
        ambiguous=eps_align / 4 < edge < 4 * eps_align,
        diagnostics=diag,
    )


# several components ----------------------------------------------------------------


@dataclass(frozen=True)
class MultiComponentEstimate:
    """Selected component count with ``(ℓ_j, α_j)`` sorted by length."""

    m: int
    components: tuple[tuple[float, float], ...]
    residual: float
    residuals: dict
    warnings: tuple[str, ...] = ()
    near_violation: tuple[bool, ...] = ()

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "components": [{"length": l, "alpha": a} for l, a in self.components],
            "residual": self.residual,
            "residuals_by_m": {str(k): v for k, v in self.residuals.items()},
            "warnings": list(self.warnings),
            "near_violation": list(self.near_violation),
        }


def weyl_density(v: np.ndarray) -> float:
    """Slope of the counting function: eigenvalues per unit length."""
    rank = np.arange(len(v), dtype=float)
    slope, _ = np.polyfit(v, rank, 1)
    return float(slope)


def _peaks(score: np.ndarray, k: int) -> list[int]:
    inner = np.flatnonzero((score[1:-1] >= score[:-2]) & (score[1:-1] >= score[2:])) + 1
    return sorted(inner, key=lambda i: -score[i])[:k]


def _frequency_candidates(obs: np.ndarray, fmax: float, count: int = 6) -> list[float]:
    span = float(obs[-1] - obs[0])
    grid = np.arange(0.25 / span, fmax * 1.02, 0.25 / span)
    score = np.abs(np.exp(2j * np.pi * np.outer(grid, obs)).mean(axis=1))
    out = []
    for i in _peaks(score, count):
        fine = np.linspace(grid[i] - 0.25 / span, grid[i] + 0.25 / span, 41)
        s = np.abs(np.exp(2j * np.pi * np.outer(fine, obs)).mean(axis=1))
        out.append(float(fine[int(np.argmax(s))]))
    return out


def _alpha_candidates(obs: np.ndarray, A: float, count: int = 3) -> list[float]:
    frac = (obs / A) % 1.0
    folded = np.minimum(frac, 1.0 - frac)
    hist, edges = np.histogram(folded, bins=100, range=(0.0, 0.5))
    smooth = np.convolve(np.pad(hist, 1, mode="reflect"), [1, 2, 1], mode="valid")
    centres = 0.5 * (edges[:-1] + edges[1:])
    out = []
    for i in sorted(range(len(smooth)), key=lambda i: -smooth[i]):
        c = float(centres[i])
        if all(abs(c - o) > 0.015 for o in out):
            out.append(c)
        if len(out) == count:
            break
    return out


def _dedupe(values: Sequence[float], rel: float = 2e-3) -> list[float]:
    out: list[float] = []
    for x in values:
        if all(abs(x - y) > rel * max(x, y) for y in out):
            out.append(x)
    return out


def _configs(obs: np.ndarray, D: float, m: int, bases: list[float]):
    top = float(obs[-1])
    for combo in itertools.combinations_with_replacement(bases, m - 1):
        rest = D - sum(2.0 / A for A in combo)
        if rest <= 1e-9:
            continue
        A_last = 2.0 / rest
        if top / A_last < 8:
            continue
        As = list(combo) + [A_last]
        choices = [_alpha_candidates(obs, A) for A in As]
        for alphas in itertools.product(*choices):
            yield [Ladder(A, a) for A, a in zip(As, alphas)]


def _quick_cost(obs: np.ndarray, ladders: list[Ladder]) -> float:
    try:
        pred, *_ = _match(obs, ladders)
    except FitError:
        return math.inf
    return float(np.median(np.abs(obs - pred)))


def _best_for_m(obs, D, m, bases, keep: int = 8):
    scored = sorted(
        ((c, _quick_cost(obs, c)) for c in _configs(obs, D, m, bases)), key=lambda t: t[1]
    )
    best = (None, math.inf)
    for cfg, cost in scored[:keep]:
        if not math.isfinite(cost):
            continue
        try:
            ladders, res = _refine(obs, cfg)
        except FitError:
            continue
        if res < best[1]:
            best = (ladders, res)
    return best


def recover_multi(
    sigma,
    m_max: int = 3,
    head: int | None = None,
    tol: float = 0.05,
) -> MultiComponentEstimate:
    """Brute-force model selection over ``m = 1..m_max`` ladder pairs.

    ``tol`` is relative to the mean eigenvalue spacing.  The smallest ``m``
    whose refined model fits within tolerance is returned; a
    :class:`DegeneracyWarning` is issued when a larger ``m`` fits as well.

    Raises
    ------
    PreconditionError
        With fewer than 100 eigenvalues or ``m_max`` outside ``1..3``.
    ModelMismatchError
        When no ``m <= m_max`` fits.
    """
    if not 1 <= m_max <= 3:
        raise PreconditionError("m_max must be between 1 and 3")
    v = _values(sigma)
    if len(v) < MIN_MULTI:
        raise PreconditionError(f"need at least {MIN_MULTI} eigenvalues, got {len(v)}")
    h = default_head(len(v)) if head is None else head
    obs = v[h : len(v) - max(2, len(v) // 20)]
    D = weyl_density(obs)
    threshold = tol / D
    freqs = _frequency_candidates(obs, D / 2)
    bases = [1.0 / f for f in freqs]
    A1 = 2.0 / D
    bases = _dedupe([k * A for A in [A1] + bases for k in (1, 2, 3)])
    bases = [A for A in bases if A > A1 * (1 - 1e-6) and float(obs[-1]) / A >= 8]

    fits, residuals = {}, {}
    for m in range(1, m_max + 1):
        ladders, res = _best_for_m(obs, D, m, bases)
        residuals[m] = res
        if ladders is not None:
            fits[m] = ladders
    ok = [m for m in fits if residuals[m] <= threshold]
    if not ok:
        raise ModelMismatchError(
            f"no model with m <= {m_max} fits the tail (best residual {min(residuals.values()):.3g})"
        )
    m = min(ok)
    notes = []
    larger = [k for k in ok if k > m]
    if larger:
        msg = f"tail is also explained by m = {', '.join(map(str, larger))} components"
        notes.append(msg)
        warnings.warn(msg, DegeneracyWarning, stacklevel=2)
    comps = []
    for lad in fits[m]:
        a, _, _ = _fold(lad)
        comps.append((2 * math.pi / lad.A, a))
    comps.sort()
    near = tuple(abs(a - 0.25) < VIOLATION_EPS for _, a in comps)
    if any(near):
        notes.append("some alpha lies near 1/4 or 3/4, where components are not identifiable")
    return MultiComponentEstimate(m, tuple(comps), residuals[m], residuals, tuple(notes), near)


# close matching ----------------------------------------------------------------


@dataclass(frozen=True)
class MatchReport:
    """Monotone matching of two tails after dropping finite heads."""

    pairs: tuple[tuple[float, float], ...]
    head_x: int
    head_y: int
    windows: tuple[tuple[float, float, float], ...]
    slopes: tuple[float, float]
    verdict: str

    @property
    def consistent(self) -> bool:
        return self.verdict == "consistent"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "head_x": self.head_x,
            "head_y": self.head_y,
            "slopes": list(self.slopes),
            "windows": [{"from": a, "to": b, "sup_deviation": d} for a, b, d in self.windows],
            "pairs": len(self.pairs),
        }


def _schedule(schedule) -> Callable[[float], float]:
    if schedule is None:
        return lambda x: 1e-6 * max(1.0, abs(x))
    if callable(schedule):
        return schedule
    tol = float(schedule)
    return lambda x: tol


def match_close(
    X,
    Y,
    schedule: float | Callable[[float], float] | None = None,
    max_head: int | None = None,
    n_windows: int = 8,
) -> MatchReport:
    """Decide whether two sorted spectra look like a close almost bijection.

    The relative head offset is chosen to minimise the mean tail deviation.
    The verdict is ``consistent`` when the last window's sup deviation is
    within ``schedule`` (a tolerance, or a function of the window's upper
    value) and no larger than the first window's.
    """
    x, y = _values(X), _values(Y)
    if len(x) < 2 * n_windows or len(y) < 2 * n_windows:
        raise PreconditionError("spectra are too short to compare")
    sx, sy = weyl_density(x), weyl_density(y)
    if max_head is None:
        max_head = max(10, min(len(x), len(y)) // 5)

    def tail_cost(d: int) -> float:
        hx, hy = max(d, 0), max(-d, 0)
        k = min(len(x) - hx, len(y) - hy)
        lo = k // 2
        return float(np.mean(np.abs(x[hx + lo : hx + k] - y[hy + lo : hy + k])))

    shifts = sorted(range(-max_head, max_head + 1), key=abs)
    d = min(shifts, key=tail_cost)
    hx, hy = max(d, 0), max(-d, 0)
    k = min(len(x) - hx, len(y) - hy)
    xs, ys = x[hx : hx + k], y[hy : hy + k]
    dev = np.abs(xs - ys)
    bounds = np.linspace(0, k, n_windows + 1).astype(int)
    windows = tuple(
        (float(min(xs[a], ys[a])), float(max(xs[b - 1], ys[b - 1])), float(np.max(dev[a:b])))
        for a, b in zip(bounds[:-1], bounds[1:])
        if b > a
    )
    tol = _schedule(schedule)
    if abs(sx - sy) > SLOPE_TOL * max(sx, sy):
        verdict = "structural_mismatch"
    elif windows[-1][2] <= tol(windows[-1][1]) and windows[-1][2] <= windows[0][2] + tol(windows[0][1]):
        verdict = "consistent"
    else:
        verdict = "mismatch"
    return MatchReport(tuple(zip(xs.tolist(), ys.tolist())), hx, hy, windows, (sx, sy), verdict)


__all__ = [
    "LadderFit",
    "EvenOddFit",
    "fit_even_odd",
    "RecoveredInvariants",
    "recover_single",
    "MultiComponentEstimate",
    "recover_multi",
    "MatchReport",
    "match_close",
    "ECSCertificate",
    "ecs_certificate",
    "DegeneracyWarning",
    "weyl_density",
]
