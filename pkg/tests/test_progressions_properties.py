from collections import Counter
from fractions import Fraction as F

from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from magsteklov.progressions import (
    APPair,
    GenMultiset,
    almost_equal,
    generate,
    is_exact_covering,
    is_natural_exact,
    rational_lcm,
    reflect,
    refinement,
    residue_pattern,
)

MANY = settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])

moduli = st.builds(F, st.integers(1, 6), st.sampled_from([1, 2, 3]))
offsets = st.builds(F, st.integers(-6, 6), st.sampled_from([1, 2, 4]))
pairs = st.builds(APPair.of, moduli, offsets)
multisets = st.lists(pairs, min_size=1, max_size=4).map(GenMultiset)


def counts(R, lo, hi):
    return Counter(x for x in generate(R, hi) if x >= lo)


def brute_equal(R1, R2) -> bool:
    """Compare generated multisets over two full periods past every threshold."""
    every = list(R1) + list(R2)
    P = rational_lcm([p.a for p in every])
    assert P * max(p.a.denominator for p in every) <= 10**4
    lo = max(p.a + p.b for p in every)
    return counts(R1, lo, lo + 2 * P) == counts(R2, lo, lo + 2 * P)


@st.composite
def refined(draw, R):
    out = []
    for p in R:
        m = draw(st.integers(1, 3))
        out += refinement(p, m) if m > 1 else [p]
    return GenMultiset(draw(st.permutations(out)))


@MANY
@given(multisets, multisets)
def test_verdict_matches_brute_force(R1, R2):
    v = almost_equal(R1, R2)
    assert v.equal == brute_equal(R1, R2)
    if not v.equal:
        x = F(v.witness["value"])
        left, right = Counter(generate(R1, x)), Counter(generate(R2, x))
        assert left[x] == v.witness["multiplicity_left"]
        assert right[x] == v.witness["multiplicity_right"]
        assert left[x] != right[x]


@MANY
@given(st.data())
def test_refinements_are_almost_equal(data):
    R = data.draw(multisets)
    R2 = data.draw(refined(R))
    assert almost_equal(R, R2).equal
    assert brute_equal(R, R2)


@MANY
@given(st.data())
def test_equivalence_relation(data):
    R1 = data.draw(multisets)
    R2 = data.draw(st.one_of(refined(R1), multisets))
    R3 = data.draw(st.one_of(refined(R2), multisets))
    e12, e23, e13 = almost_equal(R1, R2).equal, almost_equal(R2, R3).equal, almost_equal(R1, R3).equal
    assert almost_equal(R1, R1).equal
    assert e12 == almost_equal(R2, R1).equal
    if e12 and e23:
        assert e13


@MANY
@given(multisets, multisets)
def test_reflection_is_compatible(R1, R2):
    assert reflect(reflect(R1)).same_multiset(R1)
    assert almost_equal(R1, R2).equal == almost_equal(reflect(R1), reflect(R2)).equal


@MANY
@given(multisets, st.integers(1, 20))
def test_residue_pattern_predicts_generation(R, extra):
    rp = residue_pattern(R)
    hi = rp.threshold + extra * rp.modulus / 4
    got = counts(R, rp.threshold, hi)
    for x, c in got.items():
        assert rp.multiplicity(x) == c


@MANY
@given(pairs, st.integers(1, 6))
def test_refinement_preserves_generated_sets(p, m):
    parts = refinement(p, m)
    hi = p.first + 12 * p.a * m
    lo = max(q.first for q in parts)
    assert counts(parts, lo, hi) == counts([p], lo, hi)


@MANY
@given(st.lists(st.integers(1, 12), min_size=1, max_size=4), st.lists(st.integers(1, 12), min_size=1, max_size=4))
def test_zero_offset_systems_are_rigid(a1, a2):
    R1 = GenMultiset(APPair.of(a, 0) for a in a1)
    R2 = GenMultiset(APPair.of(a, 0) for a in a2)
    if almost_equal(R1, R2).equal:
        assert sorted(a1) == sorted(a2)


@MANY
@given(st.data())
def test_distinct_moduli_systems_are_rigid(data):
    a1 = data.draw(st.lists(moduli, min_size=1, max_size=3, unique=True))
    a2 = data.draw(st.lists(moduli, min_size=1, max_size=3, unique=True))
    R1 = GenMultiset(APPair.of(a, data.draw(offsets)) for a in a1)
    R2 = GenMultiset(APPair.of(a, data.draw(offsets)) for a in a2)
    if almost_equal(R1, R2).equal:
        assert R1.same_multiset(R2)


@st.composite
def natural_ecs(draw):
    system = [(1, 0)]
    for _ in range(draw(st.integers(0, 4))):
        j = draw(st.integers(0, len(system) - 1))
        a, b = system.pop(j)
        m = draw(st.integers(2, 3))
        system += [(m * a, b + i * a) for i in range(m)]
    return GenMultiset(APPair.of(a, b) for a, b in system)


@MANY
@given(natural_ecs())
def test_exact_coverings_have_unit_density(R):
    assume(max(p.a for p in R) <= 200)
    assert is_exact_covering(R)
    assert sum(1 / p.a for p in R) == 1
    ok, tree = is_natural_exact(R)
    assert ok and sorted(tree.leaves()) == sorted((int(p.a), int(p.b)) for p in R)
