import warnings
from fractions import Fraction as F

import pytest

from magsteklov.errors import CommensurabilityError, PreconditionError
from magsteklov.progressions import (
    HeuristicSearchWarning,
    almost_equal,
    anomaly_check,
    cab_equivalent,
    classify_vs_single,
    commensurability_partition,
    find_refinement_decomposition,
    generate,
    gms,
    is_covering,
    is_distinct_covering,
    is_exact_covering,
    is_natural_exact,
    load_multiset,
    pair,
    reflect,
    refinement,
    residue_pattern,
    sign_reduction,
    symmetric,
    unit_fraction_tuples,
)


def test_pairs_are_canonical():
    assert pair(2, 5) == pair(2, 1)
    assert pair(1, F(-3, 10)).b == F(7, 10)
    assert pair(2, 5).shift == 2
    with pytest.raises(ValueError):
        pair(0, 1)


def test_floats_must_be_exact_rationals():
    assert pair(1.5, 0.25) == pair(F(3, 2), F(1, 4))
    # floats are read through their shortest decimal representation
    assert pair(0.1, 0) == pair("1/10", 0)
    with pytest.raises(CommensurabilityError):
        pair("sqrt2", 0)


def test_generate_examples():
    assert generate(gms((1, 0)), 4) == [1, 2, 3, 4]
    assert generate(gms((2, 0), (2, 1)), 5) == [2, 3, 4, 5]
    assert generate(gms(("3/2", "1/4")), 5) == [F(7, 4), F(13, 4), F(19, 4)]


def test_reflect_examples():
    assert reflect(gms((1, "3/10"))).same_multiset(gms((1, "7/10")))
    assert reflect(gms((1, 0))).same_multiset(gms((1, 0)))
    assert reflect(gms((3, 1), (4, 3))).same_multiset(gms((3, 2), (4, 1)))


def test_residue_pattern_examples():
    assert residue_pattern(gms((1, 0))).table() == {0: 1}
    rp = residue_pattern(gms((2, 0), (4, 1), (4, 3)))
    assert rp.modulus == 4 and rp.table() == {0: 1, 1: 1, 2: 1, 3: 1}
    rp = residue_pattern(gms((2, 0), (2, 0)))
    assert rp.multiplicity(6) == 2 and rp.multiplicity(7) == 0


def test_residue_pattern_of_fractional_moduli():
    rp = residue_pattern(gms(("3/2", "1/4"), (3, "3/4")))
    assert rp.modulus == 3
    assert rp.multiplicity(F(13, 4)) == 1 and rp.multiplicity(F(15, 4)) == 1


def test_almost_equal_examples():
    assert almost_equal(gms((1, 0), (1, 0)), gms((2, 0), (2, 0), (2, 1), (2, 1))).equal
    intro = gms((3, 0), (3, 1), (3, 2), (3, 0), (3, -1), (3, -2))
    assert almost_equal(symmetric(gms((1, 0))), intro).verdict == "equal_ae"
    sharp = gms((2, 0), (4, 1), (6, 1), (12, 3))
    assert almost_equal(symmetric(gms((1, 0))), symmetric(sharp)).equal


def test_differ_witness_points_at_a_residue():
    v = almost_equal(gms((1, "3/10")), gms((1, "2/5")))
    assert v.verdict == "differ"
    w = v.witness
    assert w["residue"] in ("3/10", "2/5")
    assert w["multiplicity_left"] != w["multiplicity_right"]


def test_cab_examples():
    R = gms((2, 1), ("5/3", "1/7"))
    assert cab_equivalent(R, R).equal
    assert cab_equivalent(symmetric(gms((1, "1/4"))), symmetric(gms(("3/2", "1/4"), (3, "3/4")))).equal
    assert not cab_equivalent(gms((1, "3/10")), gms((1, "2/5"))).equal


def test_almost_equal_at_large_period():
    R1 = gms((1000003, 0), (999983, 5))
    R2 = gms((1000003, 0), (999983, 5))
    assert almost_equal(R1, R2).equal
    R3 = gms((1000003, 1), (999983, 5))
    assert not almost_equal(R1, R3).equal


def test_refinement_examples():
    assert refinement(pair(1, 0), 3) == [pair(3, 0), pair(3, 1), pair(3, 2)]
    assert refinement(pair(2, 1), 2) == [pair(4, 1), pair(4, 3)]
    assert refinement(pair("3/2", "1/4"), 2) == [pair(3, "1/4"), pair(3, "7/4")]
    with pytest.raises(ValueError):
        refinement(pair(1, 0), 0)


def test_refinement_decomposition_examples():
    assert find_refinement_decomposition(pair(1, 0), gms((2, 0), (2, 1))).same_multiset(gms((2, 0), (2, 1)))
    assert find_refinement_decomposition(pair(1, "1/4"), gms(("3/2", "1/4"), (3, "3/4"))) is None
    found = find_refinement_decomposition(pair(2, 0), gms((4, 0), (4, 2), (4, 1)))
    assert found.same_multiset(gms((4, 0), (4, 2)))


def test_covering_examples():
    R = gms((2, 0), (4, 1), (4, 3))
    assert (is_covering(R), is_exact_covering(R), is_distinct_covering(R)) == (True, True, False)
    R = gms((2, 0), (3, 0), (4, 1), (6, 5), (12, 7))
    assert (is_covering(R), is_exact_covering(R), is_distinct_covering(R)) == (True, False, True)
    assert not is_covering(gms((2, 0)))
    with pytest.raises(TypeError):
        is_covering(gms(("3/2", 0)))


def test_natural_exact_examples():
    ok, tree = is_natural_exact(gms((2, 0), (4, 1), (4, 3)))
    assert ok
    assert sorted(tree.leaves()) == [(2, 0), (4, 1), (4, 3)]
    ok, tree = is_natural_exact(gms((1, 0)))
    assert ok and tree.children == ()
    with pytest.raises(PreconditionError):
        is_natural_exact(gms((2, 0)))


def non_natural_ecs():
    base = [(6, 0), (10, 1), (15, 2)]
    covered = {r for a, b in base for r in range(b, 30, a)}
    return gms(*base, *((30, r) for r in range(30) if r not in covered))


def test_non_natural_exact_covering():
    R = non_natural_ecs()
    assert is_exact_covering(R)
    ok, tree = is_natural_exact(R)
    assert not ok and tree is None
    assert sum(F(1, p.a) for p in R) == 1


def test_anomaly_examples():
    assert anomaly_check(gms((1, "3/10")))
    assert not anomaly_check(gms((1, "1/4")))
    assert not anomaly_check(gms((4, 1)))


def test_sign_reduction_examples():
    assert sign_reduction(1, "3/10", gms((1, "3/10"))) == (1,)
    assert sign_reduction(1, "3/10", gms((2, "3/10"), (2, "7/10"))) == (1, -1)
    # 2ℕ+0.3 and 2ℕ+1.7 cannot be signed into ℕ+0.3: both reflections land on odd shifts
    assert sign_reduction(1, "3/10", gms((2, "3/10"), (2, "17/10"))) is None


def test_sign_reduction_outside_hypothesis_warns():
    with pytest.warns(HeuristicSearchWarning):
        assert sign_reduction(1, "1/4", gms(("3/2", "1/4"), (3, "3/4"))) is None


def test_sign_reduction_size_bound():
    with pytest.raises(ValueError):
        sign_reduction(1, "3/10", gms(*[(21, "3/10")] * 21))


def test_unit_fraction_tuples():
    assert unit_fraction_tuples(2) == [(3, 6), (4, 4)]
    t3 = unit_fraction_tuples(3)
    assert len(t3) == 10
    assert {(3, 7, 42), (3, 8, 24), (3, 12, 12), (4, 8, 8), (6, 6, 6)} <= set(t3)


def test_classification_two_components():
    c = classify_vs_single(2)
    assert [f.label for f in c.families] == ["1(a)", "1(b)"]
    fam = {f.label: f for f in c.families}
    assert fam["1(a)"].moduli == (2, 2)
    assert fam["1(b)"].moduli == (F(3, 2), 3) and fam["1(b)"].b_value == F(1, 4)


def test_classification_three_components_contains_listed_families():
    labels = [f.label for f in classify_vs_single(3).families]
    assert labels.count("2(a)") == 1 and labels.count("2(b)") == 2 and labels.count("2(c)") == 1


def test_classification_family_members_are_genuine():
    for k in (2, 3):
        for fam in classify_vs_single(k).families:
            b = F(1, 7) if fam.b_value is None else fam.b_value
            assert almost_equal(symmetric(gms((1, b))), symmetric(fam.pairs(b))).equal, fam.label


def test_commensurability_partition():
    R1, R2 = gms((1, 0)), gms((2, 1))
    assert len(commensurability_partition(R1, R2)) == 1
    u, v = gms(pair(1, 0, "u")), gms(pair(1, 0, "v"))
    assert len(commensurability_partition(u, v)) == 2
    merged = commensurability_partition(u, v, {"v": ("u", F(2))})
    assert len(merged) == 1 and merged[0].right.same_multiset(gms(pair(2, 0, "u")))


def test_cross_unit_comparison_differs():
    u, v = gms(pair(1, 0, "u")), gms(pair(1, 0, "v"))
    assert not almost_equal(u, v).equal
    assert almost_equal(u + v, v + u).equal


def test_multiset_file(tmp_path):
    path = tmp_path / "r.json"
    path.write_text('[{"a": "3/2", "b": "1/4"}, {"a": 3, "b": "3/4"}]')
    assert load_multiset(path).same_multiset(gms(("3/2", "1/4"), (3, "3/4")))
    path.write_text('[{"a": "x", "b": 0}]')
    with pytest.raises((ValueError, CommensurabilityError)):
        load_multiset(path)
