"""Exact decision procedures for unions of arithmetic progressions.

A generating multiset ``R = {(a_i, b_i)}`` produces the multiset
``S(R) = ⋃ (a_i ℕ + b_i)`` with ``ℕ = {1, 2, ...}``.  Two such multisets are
*almost equal* when they differ in finitely many elements.  Everything here
is exact: rationals are :class:`fractions.Fraction`, and almost-equality is
decided by comparing periodic residue patterns.

Progressions whose moduli are irrational multiples of each other are
handled through unit tags: a pair tagged ``u`` stands for ``(a·x_u, b·x_u)``
for an unspecified real ``x_u``.  Tags related by declared rational factors
are merged into one commensurability class.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CommensurabilityError, PreconditionError

DENSE_LIMIT = 10**7
SIGN_SEARCH_LIMIT = 20
UNIT_FRACTION_LIMIT = 10**4

Rational = Fraction


class HeuristicSearchWarning(UserWarning):
    """A search ran outside the hypotheses that make its answer conclusive."""


def as_rational(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal or ``"p/q"`` string, or float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, float):
        if not math.isfinite(x):
            raise CommensurabilityError(f"{x!r} is not a finite number")
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise CommensurabilityError(
                f"{x!r} is not an exact rational; tag irrational data with a unit"
            ) from exc
    raise CommensurabilityError(f"cannot interpret {x!r} as an exact rational")


def _lcm(values: Iterable[int]) -> int:
    return reduce(math.lcm, values, 1)


def rational_lcm(values: Iterable[Fraction]) -> Fraction:
    """Least positive common multiple of positive rationals."""
    values = list(values)
    den = _lcm(v.denominator for v in values)
    return Fraction(_lcm(int(v * den) for v in values), den)


def fmt(x: Fraction) -> str:
    return str(x)


@dataclass(frozen=True, order=True)
class APPair:
    """Progression ``aℕ + b`` with the offset reduced into ``[0, a)``.

    ``shift`` records how many steps the reduction removed: the pair as
    given was ``(a, b + shift·a)``.  It does not take part in equality.
    """

    a: Fraction
    b: Fraction
    unit: str = ""
    shift: int = field(default=0, compare=False)

    def __post_init__(self):
        a, b = as_rational(self.a), as_rational(self.b)
        if a <= 0:
            raise ValueError("progression modulus must be positive")
        q = math.floor(b / a)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b - q * a)
        object.__setattr__(self, "shift", self.shift + q)

    @classmethod
    def of(cls, a, b, unit: str = "") -> "APPair":
        return cls(as_rational(a), as_rational(b), unit or "")

    def reflected(self) -> "APPair":
        return APPair(self.a, -self.b, self.unit)

    def scaled(self, factor: Fraction, unit: str) -> "APPair":
        return APPair(self.a * factor, self.b * factor, unit)

    def elements(self, T: Fraction) -> list[Fraction]:
        T = as_rational(T)
        if T < self.a + self.b:
            return []
        n_max = math.floor((T - self.b) / self.a)
        return [self.a * n + self.b for n in range(1, n_max + 1)]

    @property
    def first(self) -> Fraction:
        return self.a + self.b

    def to_json(self) -> dict:
        out = {"a": fmt(self.a), "b": fmt(self.b)}
        if self.unit:
            out["unit"] = self.unit
        return out

    def __str__(self) -> str:
        tag = f"·{self.unit}" if self.unit else ""
        return f"({self.a}, {self.b}){tag}"


def pair(a, b, unit: str = "") -> APPair:
    return APPair.of(a, b, unit)


class GenMultiset(tuple):
    """Finite multiset of :class:`APPair` (stored as a tuple)."""

    def __new__(cls, pairs: Iterable = ()):
        items = []
        for p in pairs:
            if isinstance(p, APPair):
                items.append(p)
            elif isinstance(p, Mapping):
                items.append(APPair.of(p["a"], p["b"], p.get("unit") or ""))
            else:
                items.append(APPair.of(*p))
        return super().__new__(cls, items)

    def __add__(self, other) -> "GenMultiset":
        return GenMultiset(tuple(self) + tuple(GenMultiset(other)))

    def canonical(self) -> tuple[APPair, ...]:
        return tuple(sorted(self))

    def same_multiset(self, other: "GenMultiset") -> bool:
        return self.canonical() == GenMultiset(other).canonical()

    def to_json(self) -> list:
        return [p.to_json() for p in self]

    @classmethod
    def from_json(cls, obj) -> "GenMultiset":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if not isinstance(obj, list):
            raise ValueError("a generating multiset is a JSON list of {a, b} objects")
        return cls(obj)

    def __repr__(self) -> str:
        return "{" + ", ".join(str(p) for p in self) + "}"


def gms(*pairs) -> GenMultiset:
    """Shorthand: ``gms((1, 0), (2, "1/3"))``."""
    return GenMultiset(pairs)


def load_multiset(path) -> GenMultiset:
    with open(path) as fh:
        return GenMultiset.from_json(json.load(fh))


# generation --------------------------------------------------------------------


def generate(R: Iterable[APPair], T) -> list[Fraction]:
    """All elements ``a n + b <= T`` (``n >= 1``) with multiplicity, sorted."""
    T = as_rational(T)
    if T <= 0:
        raise ValueError("T must be positive")
    out: list[Fraction] = []
    for p in GenMultiset(R):
        out.extend(p.elements(T))
    return sorted(out)


def reflect(R: Iterable[APPair]) -> GenMultiset:
    """``R⁻ = {(a, -b)}``."""
    return GenMultiset(p.reflected() for p in GenMultiset(R))


def symmetric(R: Iterable[APPair]) -> GenMultiset:
    """``R ∪ R⁻``."""
    R = GenMultiset(R)
    return R + reflect(R)


# residue patterns --------------------------------------------------------------


@dataclass(frozen=True)
class _Lattice:
    """Pairs rescaled to integers: ``(A, B) = (a·L, b·L)`` with ``A | P``."""

    L: int
    P: int
    terms: tuple[tuple[int, int], ...]


def _lattice(pairs: Sequence[APPair], extra_den: int = 1) -> _Lattice:
    L = _lcm([p.a.denominator for p in pairs] + [p.b.denominator for p in pairs] + [extra_den])
    terms = tuple((int(p.a * L), int(p.b * L)) for p in pairs)
    P = _lcm(A for A, _ in terms)
    return _Lattice(L, P, terms)


@dataclass(frozen=True)
class ResiduePattern:
    """Periodic multiplicity data of ``S(R)``.

    For ``x >= threshold`` the multiplicity of ``x`` in ``S(R)`` equals the
    number of pairs with ``x ≡ b (mod a)``; this depends on ``x mod modulus``
    only.  Residues live on the lattice ``(1/scale)ℤ``.
    """

    modulus: Fraction
    threshold: Fraction
    scale: int
    pairs: tuple[APPair, ...]

    def multiplicity(self, x) -> int:
        x = as_rational(x)
        return sum(1 for p in self.pairs if ((x - p.b) / p.a).denominator == 1)

    @property
    def size(self) -> int:
        return int(self.modulus * self.scale)

    def table(self) -> dict[Fraction, int]:
        """Residue ``r ∈ [0, P)`` ↦ multiplicity, for residues with nonzero count."""
        lat = _lattice(self.pairs, self.scale)
        if lat.P > DENSE_LIMIT:
            raise ValueError(f"residue table with {lat.P} entries exceeds the dense limit")
        arr = _dense_counts(lat.terms, lat.P)
        return {Fraction(int(r), lat.L): int(arr[r]) for r in np.nonzero(arr)[0]}


def residue_pattern(R: Iterable[APPair]) -> ResiduePattern:
    pairs = tuple(GenMultiset(R))
    if not pairs:
        raise ValueError("empty generating multiset")
    lat = _lattice(pairs)
    return ResiduePattern(
        Fraction(lat.P, lat.L), max(p.first for p in pairs), lat.L, pairs
    )


def _dense_counts(terms: Sequence[tuple[int, int]], P: int, weights=None) -> np.ndarray:
    arr = np.zeros(P, dtype=np.int64)
    for idx, (A, B) in enumerate(terms):
        w = 1 if weights is None else weights[idx]
        arr[B % A :: A] += w
    return arr


def _crt(r1: int, m1: int, r2: int, m2: int) -> int:
    # m1, m2 coprime
    return (r1 + m1 * ((r2 - r1) * pow(m1, -1, m2) % m2)) % (m1 * m2)


def _prime_power_split(P: int) -> tuple[int, int]:
    """Largest prime-power factor ``q`` of ``P`` and ``P // q``."""
    best, n, d = 1, P, 2
    while d * d <= n:
        if n % d == 0:
            q = 1
            while n % d == 0:
                n //= d
                q *= d
            best = max(best, q)
        d += 1
    if n > 1:
        best = max(best, n)
    return best, P // best


def signed_pattern_witness(terms: Sequence[tuple[int, int, int]], P: int) -> int | None:
    """A residue ``r mod P`` where ``Σ w [r ≡ B (mod A)]`` is nonzero, or ``None``.

    ``terms`` are ``(w, A, B)`` with ``A | P``.  Small moduli use a dense
    table; large ones split ``ℤ/P`` by the Chinese remainder theorem along
    one prime power and recurse on each distinct fibre.
    """
    merged: dict[tuple[int, int], int] = {}
    for w, A, B in terms:
        key = (A, B % A)
        merged[key] = merged.get(key, 0) + w
    live = [(w, A, B) for (A, B), w in merged.items() if w]
    if not live:
        return None
    if P <= DENSE_LIMIT:
        arr = _dense_counts([(A, B) for _, A, B in live], P, [w for w, _, _ in live])
        nz = np.flatnonzero(arr)
        return int(nz[0]) if len(nz) else None
    q, Q = _prime_power_split(P)
    fibres: dict[tuple[int, ...], int] = {}
    split = [(w, math.gcd(A, q), A // math.gcd(A, q), B) for w, A, B in live]
    for c in range(q):
        active = tuple(i for i, (_, Aq, _, B) in enumerate(split) if (c - B) % Aq == 0)
        fibres.setdefault(active, c)
    for active, c in fibres.items():
        sub = [(split[i][0], split[i][2], split[i][3] % split[i][2]) for i in active]
        r = signed_pattern_witness(sub, Q)
        if r is not None:
            return _crt(c, q, r, Q)
    return None


# commensurability --------------------------------------------------------------


def _resolve_units(units: Iterable[str], relations: Mapping[str, tuple[str, Fraction]] | None):
    """Map each tag to ``(class representative, factor)`` with ``x_tag = factor·x_rep``."""
    parent: dict[str, tuple[str, Fraction]] = {}
    relations = dict(relations or {})

    def find(u: str, seen=()) -> tuple[str, Fraction]:
        if u in seen:
            raise CommensurabilityError(f"cyclic unit relation through {u!r}")
        if u not in relations:
            return u, Fraction(1)
        base, factor = relations[u]
        root, f = find(base, seen + (u,))
        return root, f * as_rational(factor)

    for u in set(units) | set(relations):
        parent[u] = find(u)
    return parent


@dataclass(frozen=True)
class CommensurabilityClass:
    unit: str
    left: GenMultiset
    right: GenMultiset


def commensurability_partition(
    R1: Iterable[APPair],
    R2: Iterable[APPair] = (),
    relations: Mapping[str, tuple[str, Fraction]] | None = None,
) -> list[CommensurabilityClass]:
    """Group pairs by unit class, rewriting each pair in its class's base unit.

    ``relations`` declares ``x_u = factor·x_v`` as ``{u: (v, factor)}``; tags
    connected through relations form one class.  Untagged pairs are plain
    rationals (unit ``""``).
    """
    R1, R2 = GenMultiset(R1), GenMultiset(R2)
    resolved = _resolve_units([p.unit for p in R1 + R2], relations)
    classes: dict[str, tuple[list, list]] = {}
    for side, R in ((0, R1), (1, R2)):
        for p in R:
            root, factor = resolved.get(p.unit, (p.unit, Fraction(1)))
            classes.setdefault(root, ([], []))[side].append(p.scaled(factor, root))
    return [
        CommensurabilityClass(u, GenMultiset(l), GenMultiset(r))
        for u, (l, r) in sorted(classes.items())
    ]


# almost equality -----------------------------------------------------------------


@dataclass(frozen=True)
class AEVerdict:
    """``equal`` plus either the agreement bound or a mismatch witness."""

    equal: bool
    witness: dict

    @property
    def verdict(self) -> str:
        return "equal_ae" if self.equal else "differ"

    def __bool__(self) -> bool:
        return self.equal

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "witness": self.witness}


def _class_almost_equal(left: GenMultiset, right: GenMultiset, unit: str) -> AEVerdict:
    if not left or not right:
        side = "left" if left else "right"
        only = left or right
        return AEVerdict(
            False,
            {"unit": unit, "reason": f"class present only on the {side}", "value": fmt(only[0].first)},
        )
    lat = _lattice(tuple(left) + tuple(right))
    nl = len(left)
    terms = [(1 if i < nl else -1, A, B) for i, (A, B) in enumerate(lat.terms)]
    t0 = max(p.first for p in tuple(left) + tuple(right))
    r = signed_pattern_witness(terms, lat.P)
    if r is None:
        return AEVerdict(True, {"unit": unit, "bound": fmt(t0)})
    residue = Fraction(r, lat.L)
    modulus = Fraction(lat.P, lat.L)
    k = math.ceil((t0 - residue) / modulus)
    value = residue + max(k, 0) * modulus
    mult_l = sum(1 for p in left if ((value - p.b) / p.a).denominator == 1)
    mult_r = sum(1 for p in right if ((value - p.b) / p.a).denominator == 1)
    return AEVerdict(
        False,
        {
            "unit": unit,
            "residue": fmt(residue),
            "modulus": fmt(modulus),
            "value": fmt(value),
            "multiplicity_left": mult_l,
            "multiplicity_right": mult_r,
        },
    )


def almost_equal(
    R1: Iterable[APPair],
    R2: Iterable[APPair],
    relations: Mapping[str, tuple[str, Fraction]] | None = None,
) -> AEVerdict:
    """Decide ``S(R1) =_ae S(R2)`` exactly, class by class."""
    parts = commensurability_partition(R1, R2, relations)
    bounds = {}
    for cls in parts:
        v = _class_almost_equal(cls.left, cls.right, cls.unit)
        if not v.equal:
            return v
        bounds[cls.unit] = v.witness["bound"]
    if len(bounds) == 1:
        ((unit, bound),) = bounds.items()
        return AEVerdict(True, {"bound": bound} if not unit else {"unit": unit, "bound": bound})
    return AEVerdict(True, {"bounds": bounds})


def cab_equivalent(R1: Iterable[APPair], R2: Iterable[APPair], relations=None) -> AEVerdict:
    """Close almost bijection between ``S(R1)`` and ``S(R2)``.

    For generated multisets a close almost bijection exists exactly when the
    two are almost equal, so this is the same decision.
    """
    return almost_equal(R1, R2, relations)


# refinements -------------------------------------------------------------------


def refinement(p: APPair, m: int) -> list[APPair]:
    """``{(m a, b + i a) : 0 <= i < m}``; their union is ``S(p)`` minus :func:`refinement_head`."""
    if m < 1:
        raise ValueError("refinement factor must be at least 1")
    return [APPair(m * p.a, p.b + i * p.a, p.unit) for i in range(m)]


def refinement_head(p: APPair, m: int) -> list[Fraction]:
    """Elements of ``S(p)`` not produced by ``refinement(p, m)``: ``a k + b`` for ``1 <= k < m``."""
    return [p.a * k + p.b for k in range(1, m)]


def _coarsen(residues: set[int], A: int, P: int) -> list[tuple[int, int]]:
    """Write a set of residues mod ``P`` (all ≡ const mod ``A``) as few progressions."""
    out = []
    remaining = set(residues)
    divisors = sorted(d for d in range(A, P + 1, A) if P % d == 0)
    for d in divisors:
        lifts = P // d
        for r in sorted(remaining):
            if r not in remaining:
                continue
            base = r % d
            cls = {base + j * d for j in range(lifts)}
            if cls <= remaining:
                out.append((d, base))
                remaining -= cls
    return out


def find_refinement_decomposition(target: APPair, R: Iterable[APPair]) -> GenMultiset | None:
    """Refined pieces of members of ``R`` partitioning ``S(target)`` up to finitely many elements.

    Each member contributes the part of its progression lying inside the
    target; returns ``None`` when some residue class of the target is
    reached by no member.
    """
    R = GenMultiset(R)
    target = APPair(target.a, target.b, target.unit)
    if not R:
        return None
    lat = _lattice((target,) + tuple(R))
    if lat.P > DENSE_LIMIT:
        raise ValueError("decomposition search modulus exceeds the dense limit")
    At, Bt = lat.terms[0]
    owner: dict[int, int] = {}
    for r in range(Bt % At, lat.P, At):
        for i, (A, B) in enumerate(lat.terms[1:]):
            if (r - B) % A == 0:
                owner[r] = i
                break
        else:
            return None
    used: dict[int, set[int]] = {}
    for r, i in owner.items():
        used.setdefault(i, set()).add(r)
    pieces = []
    for i in sorted(used):
        A, _ = lat.terms[1 + i]
        for d, base in _coarsen(used[i], math.lcm(A, At), lat.P):
            pieces.append(APPair(Fraction(d, lat.L), Fraction(base, lat.L), target.unit))
    return GenMultiset(pieces)


# covering systems --------------------------------------------------------------


def _integer_terms(R: Iterable[APPair]) -> list[tuple[int, int]]:
    terms = []
    for p in GenMultiset(R):
        if p.a.denominator != 1 or p.b.denominator != 1:
            raise TypeError(f"covering systems need integer pairs, got {p}")
        terms.append((int(p.a), int(p.b)))
    if not terms:
        raise ValueError("empty system")
    return terms


def _coverage(R) -> np.ndarray:
    terms = _integer_terms(R)
    P = _lcm(A for A, _ in terms)
    if P > DENSE_LIMIT:
        raise ValueError(f"lcm {P} of the moduli exceeds the dense limit")
    return _dense_counts(terms, P)


def is_covering(R) -> bool:
    """Every integer lies in some class ``b_i mod a_i``."""
    return bool(np.all(_coverage(R) >= 1))


def is_exact_covering(R) -> bool:
    """Every integer lies in exactly one class."""
    return bool(np.all(_coverage(R) == 1))


def is_distinct_covering(R) -> bool:
    """A covering system with pairwise distinct moduli."""
    terms = _integer_terms(R)
    moduli = [A for A, _ in terms]
    return len(set(moduli)) == len(moduli) and is_covering(R)


@dataclass(frozen=True)
class SplitTree:
    """Node ``(a, b)`` split into ``children`` of modulus ``m·a``."""

    a: int
    b: int
    children: tuple["SplitTree", ...] = ()

    def to_json(self) -> dict:
        out = {"pair": [self.a, self.b]}
        if self.children:
            out["children"] = [c.to_json() for c in self.children]
        return out

    def leaves(self) -> list[tuple[int, int]]:
        if not self.children:
            return [(self.a, self.b)]
        return [leaf for c in self.children for leaf in c.leaves()]


def _merge_moves(state: tuple[tuple[int, int], ...]):
    present = {}
    for A, B in state:
        present[(A, B)] = present.get((A, B), 0) + 1
    moduli = sorted({A for A, _ in state}, reverse=True)
    for M in moduli:
        for m in range(2, M + 1):
            if M % m:
                continue
            a = M // m
            for b in range(a):
                group = [(M, b + i * a) for i in range(m)]
                if all(present.get(g, 0) >= 1 for g in group):
                    yield (a, b), group


def is_natural_exact(R) -> tuple[bool, SplitTree | None]:
    """Whether an exact covering system arises by repeated splitting of ℤ.

    Searches all merge orders (with memoisation); on success returns the
    split tree rooted at ``(1, 0)``.

    Raises
    ------
    PreconditionError
        If ``R`` is not an exact covering system.
    """
    if not is_exact_covering(R):
        raise PreconditionError("input is not an exact covering system")
    start = tuple(sorted(_integer_terms(R)))
    dead: set = set()

    def search(state):
        if state == ((1, 0),):
            return []
        if state in dead:
            return None
        for merged, group in _merge_moves(state):
            rest = list(state)
            for g in group:
                rest.remove(g)
            nxt = tuple(sorted(rest + [merged]))
            path = search(nxt)
            if path is not None:
                return [(merged, group)] + path
        dead.add(state)
        return None

    path = search(start)
    if path is None:
        return False, None
    nodes: dict[tuple[int, int], list[SplitTree]] = {}
    for A, B in start:
        nodes.setdefault((A, B), []).append(SplitTree(A, B))
    for merged, group in path:
        children = tuple(nodes[g].pop() for g in group)
        nodes.setdefault(merged, []).append(SplitTree(merged[0], merged[1], children))
    return True, nodes[(1, 0)][0]


# anomalies and sign reduction ----------------------------------------------------


def anomaly_check(R: Iterable[APPair]) -> bool:
    """True iff every pair has ``a ± 4b ∉ 4aℤ``."""
    for p in GenMultiset(R):
        for s in (1, -1):
            if ((p.a + s * 4 * p.b) / (4 * p.a)).denominator == 1:
                return False
    return True


def sign_hypothesis_holds(a, b) -> bool:
    """``b, b - a/2, b ± a/4 ∉ aℤ``."""
    a, b = as_rational(a), as_rational(b)
    for shift in (0, Fraction(1, 2), Fraction(1, 4), Fraction(-1, 4)):
        if ((b - shift * a) / a).denominator == 1:
            return False
    return True


def sign_reduction(a, b, R: Iterable[APPair], warn: bool = True) -> tuple[int, ...] | None:
    """Signs ``ε`` with ``S({(a, b)}) =_ae S({(a_j, ε_j b_j)})``, or ``None``.

    Exhaustive over the ``2^k`` sign patterns with pruning on residue
    counts.  Outside the hypothesis ``b, b - a/2, b ± a/4 ∉ aℤ`` a
    :class:`HeuristicSearchWarning` is emitted; the search still runs.
    """
    R = GenMultiset(R)
    k = len(R)
    if k > SIGN_SEARCH_LIMIT:
        raise ValueError(f"sign search is limited to {SIGN_SEARCH_LIMIT} pairs")
    if warn and not sign_hypothesis_holds(a, b):
        warnings.warn(
            "sign reduction hypothesis fails; the search result is heuristic",
            HeuristicSearchWarning,
            stacklevel=2,
        )
    target = APPair.of(a, b)
    options = [(p, APPair(p.a, -p.b, p.unit)) for p in R]
    every = [target] + [q for opt in options for q in opt]
    lat = _lattice(every)
    if lat.P > DENSE_LIMIT:
        for signs in itertools.product((1, -1), repeat=k):
            chosen = [opt[0] if s > 0 else opt[1] for s, opt in zip(signs, options)]
            if almost_equal([target], chosen).equal:
                return signs
        return None
    goal = _dense_counts([lat.terms[0]], lat.P)
    inds = [
        (_dense_counts([lat.terms[1 + 2 * j]], lat.P), _dense_counts([lat.terms[2 + 2 * j]], lat.P))
        for j in range(k)
    ]
    signs: list[int] = []

    def dfs(j: int, acc: np.ndarray):
        if j == k:
            return tuple(signs) if np.array_equal(acc, goal) else None
        for s, ind in ((1, inds[j][0]), (-1, inds[j][1])):
            nxt = acc + ind
            if np.any(nxt > goal):
                continue
            signs.append(s)
            found = dfs(j + 1, nxt)
            if found:
                return found
            signs.pop()
        return None

    return dfs(0, np.zeros(lat.P, dtype=np.int64))


# classification against a single progression ------------------------------------


def unit_fraction_tuples(k: int, total: Fraction = Fraction(1, 2)) -> list[tuple[int, ...]]:
    """Nondecreasing ``(p_1, …, p_k)`` with ``Σ 1/p_j = total`` (here ``Σ 2/p_j = 1``)."""
    out: list[tuple[int, ...]] = []

    def dfs(prefix: list[int], remaining: Fraction, left: int):
        if left == 0:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        if remaining <= 0:
            return
        lo = max(prefix[-1] if prefix else 1, math.ceil(1 / remaining))
        hi = math.floor(left / remaining)
        for p in range(lo, min(hi, UNIT_FRACTION_LIMIT) + 1):
            dfs(prefix + [p], remaining - Fraction(1, p), left - 1)

    dfs([], Fraction(total), k)
    return out


@dataclass(frozen=True)
class Family:
    """Solutions ``R₂`` of ``S({(1,b)}∪refl) =_ae S(R₂∪R₂⁻)`` with ``|R₂| = k``.

    Pair ``j`` is ``(moduli[j], b + shifts[j])``.  ``b`` is free when
    ``b_value`` is ``None`` and pinned otherwise.
    """

    label: str
    p: tuple[int, ...]
    moduli: tuple[Fraction, ...]
    shifts: tuple[Fraction, ...]
    b_value: Fraction | None = None

    def pairs(self, b) -> GenMultiset:
        b = as_rational(b) if self.b_value is None else self.b_value
        return GenMultiset(APPair(a, b + s) for a, s in zip(self.moduli, self.shifts))

    def offsets(self) -> tuple[str, ...]:
        if self.b_value is not None:
            return tuple(fmt(self.b_value + s) for s in self.shifts)
        return tuple("b" if s == 0 else f"b+{fmt(s)}" for s in self.shifts)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "p": list(self.p),
            "moduli": [fmt(a) for a in self.moduli],
            "offsets": list(self.offsets()),
            "b": None if self.b_value is None else fmt(self.b_value),
        }


@dataclass(frozen=True)
class Classification:
    k: int
    tuples: tuple[tuple[int, ...], ...]
    families: tuple[Family, ...]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "unit_fraction_tuples": [list(t) for t in self.tuples],
            "families": [f.to_json() for f in self.families],
        }


GENERIC_B = Fraction(1, 7)
SPECIAL_B = (Fraction(0), Fraction(1, 4), Fraction(1, 2))
_LABELS = {
    (Fraction(2), Fraction(2)): "1(a)",
    (Fraction(3, 2), Fraction(3)): "1(b)",
    (Fraction(3), Fraction(3), Fraction(3)): "2(a)",
    (Fraction(2), Fraction(4), Fraction(4)): "2(b)",
    (Fraction(3, 2), Fraction(6), Fraction(6)): "2(c)",
}


def _normal_pair(a: Fraction, x: Fraction) -> tuple[Fraction, Fraction]:
    x = x % a
    return a, min(x, (-x) % a)


def _normal_key(pairs: Iterable[tuple[Fraction, Fraction]]) -> tuple:
    return tuple(sorted(_normal_pair(a, x) for a, x in pairs))


def _solve_offsets(moduli: Sequence[Fraction], b: Fraction) -> list[tuple[Fraction, ...]]:
    """All offset tuples (each up to reflection) solving the symmetric covering."""
    target = [APPair(1, b), APPair(1, -b)]
    den = _lcm([a.denominator for a in moduli] + [b.denominator, 4])
    lat = _lattice(target + [APPair(a, 0) for a in moduli], den)
    L, P = lat.L, lat.P
    goal = _dense_counts(lat.terms[:2], P)
    cands = []
    for a in moduli:
        A = int(a * L)
        opts = []
        for X in range(0, A // 2 + 1):
            ind = _dense_counts([(A, X), (A, (-X) % A)], P)
            if np.all(ind <= goal):
                opts.append((Fraction(X, L), ind))
        cands.append(opts)
    sols: list[tuple[Fraction, ...]] = []
    chosen: list[tuple[int, Fraction]] = []

    def dfs(j: int, acc: np.ndarray):
        if j == len(moduli):
            if np.array_equal(acc, goal):
                sols.append(tuple(x for _, x in chosen))
            return
        start = 0
        if j > 0 and moduli[j] == moduli[j - 1]:
            start = chosen[-1][0]  # equal moduli: nondecreasing offsets
        for idx in range(start, len(cands[j])):
            x, ind = cands[j][idx]
            nxt = acc + ind
            if np.any(nxt > goal):
                continue
            chosen.append((idx, x))
            dfs(j + 1, nxt)
            chosen.pop()

    dfs(0, np.zeros(P, dtype=np.int64))
    return sols


def _present(a: Fraction, x: Fraction, b: Fraction) -> Fraction:
    """Representative of ``{x, a - x}`` preferring an integer shift from ``b``."""
    for y in sorted({x % a, (-x) % a}):
        if (y - b).denominator == 1:
            return y
    return min(x % a, (-x) % a)


def classify_vs_single(k: int) -> Classification:
    """Every ``R₂`` with ``|R₂| = k`` whose symmetric union matches ``ℕ ± b``.

    Moduli are ``p_j/2`` for the unit-fraction tuples; offsets are searched
    exhaustively for a generic ``b`` and for ``b ∈ {0, 1/4, 1/2}``.
    Solutions at a special ``b`` that are instances of a generic family are
    not repeated.
    """
    if k not in (2, 3):
        raise ValueError("classification is implemented for k = 2 and k = 3")
    tuples = unit_fraction_tuples(k)
    families: list[Family] = []
    generic_keys: dict[Fraction, set] = {b: set() for b in SPECIAL_B}
    for ps in tuples:
        moduli = tuple(Fraction(p, 2) for p in ps)
        for offs in _solve_offsets(moduli, GENERIC_B):
            reps = [_present(a, x, GENERIC_B) for a, x in zip(moduli, offs)]
            shifts = tuple(r - GENERIC_B for r in reps)
            if any(s.denominator != 1 for s in shifts):
                raise AssertionError("generic solution with non-integer shift")
            fam = _family(ps, moduli, shifts, None)
            if fam not in families:
                families.append(fam)
            for b in SPECIAL_B:
                generic_keys[b].add(_normal_key((a, b + s) for a, s in zip(moduli, shifts)))
    for b in SPECIAL_B:
        for ps in tuples:
            moduli = tuple(Fraction(p, 2) for p in ps)
            for offs in _solve_offsets(moduli, b):
                key = _normal_key(zip(moduli, offs))
                if key in generic_keys[b]:
                    continue
                reps = [_present(a, x, b) for a, x in zip(moduli, offs)]
                fam = _family(ps, moduli, tuple(r - b for r in reps), b)
                if fam not in families:
                    families.append(fam)
    families.sort(key=lambda f: (f.label, f.shifts))
    return Classification(k, tuple(tuples), tuple(families))


def _family(ps, moduli, shifts, b) -> Family:
    order = sorted(range(len(moduli)), key=lambda i: (moduli[i], shifts[i]))
    moduli = tuple(moduli[i] for i in order)
    shifts = tuple(shifts[i] for i in order)
    ps = tuple(sorted(ps))
    return Family(_LABELS.get(moduli, "extra"), ps, moduli, shifts, b)


def ecs_pairs(
    l1, alpha1, parts: Sequence[tuple], signs: Sequence[int]
) -> list[tuple[Fraction, Fraction]]:
    """``(ℓ₁/ℓ_{2j}, (ℓ₁/ℓ_{2j}) ε_j α_{2j} - α₁)`` for the given signs."""
    l1, alpha1 = as_rational(l1), as_rational(alpha1)
    out = []
    for (l2, a2), s in zip(parts, signs):
        r = l1 / as_rational(l2)
        out.append((r, r * s * as_rational(a2) - alpha1))
    return out


@dataclass(frozen=True)
class ECSCertificate:
    """Outcome of the exact-covering test; ``signs``/``pairs`` set when found."""

    found: bool
    signs: tuple[int, ...] | None
    pairs: tuple[tuple[Fraction, Fraction], ...] | None
    reason: str

    def to_json(self) -> dict:
        return {
            "verdict": "ecs" if self.found else "refuted",
            "signs": None if self.signs is None else list(self.signs),
            "pairs": None if self.pairs is None else [[fmt(a), fmt(b)] for a, b in self.pairs],
            "reason": self.reason,
        }


def ecs_certificate(l1, alpha1, parts: Sequence[tuple], strict: bool = True) -> ECSCertificate:
    """Search signs making the scaled pairs an exact covering system of ℤ.

    Raises
    ------
    PreconditionError
        When ``strict`` and ``α₁ ∈ {0, 1/4, 1/2, 3/4}``.
    """
    alpha1 = as_rational(alpha1)
    if strict and alpha1 % 1 in (0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
        raise PreconditionError("the covering criterion requires alpha_1 not in {0, 1/4, 1/2, 3/4}")
    ratios = [as_rational(l1) / as_rational(l2) for l2, _ in parts]
    density = sum((1 / r for r in ratios), Fraction(0))
    if density != 1:
        return ECSCertificate(False, None, None, f"density sum of 1/ratio is {density}, not 1")
    if any(r.denominator != 1 for r in ratios):
        return ECSCertificate(False, None, None, "some length ratio is not an integer")
    last_reason = "no sign choice gives integer offsets"
    for signs in itertools.product((1, -1), repeat=len(parts)):
        prs = ecs_pairs(l1, alpha1, parts, signs)
        if any(b.denominator != 1 for _, b in prs):
            continue
        if is_exact_covering([APPair(a, b) for a, b in prs]):
            return ECSCertificate(True, signs, tuple(prs), "exact covering system")
        last_reason = "integer pairs found but none is an exact covering"
    return ECSCertificate(False, None, None, last_reason)
