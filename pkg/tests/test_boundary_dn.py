import math

import numpy as np
import pytest

from magsteklov.boundary import (
    BoundaryComponent,
    SurfaceBoundary,
    boundary_length,
    curvature_flux,
    electric_integral,
    flux_alpha,
    load_boundary,
    make_flat_cylinder,
    random_component,
    save_boundary,
)
from magsteklov.dn_map import (
    boundary_spectrum_asymptotic,
    component_spectrum_asymptotic,
    dn_symbol,
    steklov_coeffs_closed,
    steklov_coeffs_via_nf,
)
from magsteklov.errors import InvalidGeometryError, TruncationDepthError
from magsteklov.periodic import PeriodicFn
from magsteklov.spectrum import merge_spectra

from conftest import ladder_coeffs


def test_nonpositive_metric_is_rejected():
    with pytest.raises(InvalidGeometryError):
        BoundaryComponent.constant(g11=-1.0)
    with pytest.raises(InvalidGeometryError):
        make_flat_cylinder(0.0, 0.3)


def test_invariants_of_constant_component():
    c = BoundaryComponent.constant(4.0, 1.3, 0.5, 2.0)
    assert boundary_length(c) == pytest.approx(4 * math.pi)
    alpha, p = flux_alpha(c)
    assert (alpha, p) == (pytest.approx(0.3), -1)
    assert curvature_flux(c) == pytest.approx(math.pi)
    assert electric_integral(c) == pytest.approx(2.0 * 4 * math.pi)


def test_flux_is_canonical_for_negative_means():
    alpha, p = flux_alpha(BoundaryComponent.constant(1.0, -0.25))
    assert alpha == pytest.approx(0.75) and p == 1


def test_boundary_json_round_trip(tmp_path, rng):
    sb = SurfaceBoundary((random_component(rng), random_component(rng)), {"note": "x"})
    save_boundary(sb, tmp_path / "b.json")
    back = load_boundary(tmp_path / "b.json")
    assert back.m == 2 and back.meta == {"note": "x"}
    for a, b in zip(sb, back):
        assert a.g11.allclose(b.g11, 0.0) and a.q.allclose(b.q, 0.0)


def test_dn_symbol_of_cylinder_component():
    a = dn_symbol(BoundaryComponent.constant(1.0, 0.3))
    assert a.exact
    assert a(0.0, 4.0) == pytest.approx(4.3)
    assert a(0.0, -4.0) == pytest.approx(3.7)


def test_dn_symbol_without_potentials_is_principal_only():
    g = PeriodicFn.trig(2.0, [0.4])
    a = dn_symbol(BoundaryComponent(g, PeriodicFn.zero(), PeriodicFn.zero(), PeriodicFn.zero()))
    assert a.depth == 1 and a.exact


def test_dn_symbol_electric_term():
    a = dn_symbol(BoundaryComponent.constant(1.0, 0.0, 0.0, 2.0))
    assert a.component(2)(0.0, 3.0) == pytest.approx(1 / 3)
    assert a.component(2)(0.0, -3.0) == pytest.approx(1 / 3)


def test_closed_coefficients_cylinder():
    sc = steklov_coeffs_closed(BoundaryComponent.constant(1.0, 0.3))
    assert sc.b == [
        (pytest.approx(1.0), pytest.approx(1.0)),
        (pytest.approx(0.3), pytest.approx(-0.3)),
        (0.0, 0.0),
    ]


def test_closed_coefficients_with_curvature_and_potential():
    c = BoundaryComponent.constant(1.0, 0.0, 1 / (2 * math.pi), 1 / math.pi)
    sc = steklov_coeffs_closed(c)
    assert (sc.b2_plus, sc.b2_minus) == (pytest.approx(3 / (4 * math.pi)), pytest.approx(1 / (4 * math.pi)))


def test_engine_reproduces_cylinder_to_depth_five():
    sc = steklov_coeffs_via_nf(BoundaryComponent.constant(1.0, 0.3), 5)
    flat = [x for pair in sc.b[2:] for x in pair]
    assert sc.b1_plus == pytest.approx(0.3) and max(map(abs, flat)) < 1e-12


def test_engine_depth_beyond_available_symbol_raises(rng):
    with pytest.raises(TruncationDepthError):
        steklov_coeffs_via_nf(random_component(rng), 4)


def test_engine_matches_closed_forms_on_random_data(rng):
    for _ in range(3):
        c = random_component(rng)
        eng, closed = steklov_coeffs_via_nf(c), steklov_coeffs_closed(c)
        for e, k in zip(eng.b, closed.b):
            assert e == pytest.approx(k, abs=1e-9)


def test_asymptotic_evaluation():
    sc = ladder_coeffs(2 * math.pi, 0.3)
    seq = component_spectrum_asymptotic(sc, -5, 5, 1)
    lookup = dict(zip(seq.index.tolist(), seq.values.tolist()))
    assert lookup[5] == pytest.approx(5.3) and lookup[-5] == pytest.approx(4.7)
    sc2 = ladder_coeffs(2 * math.pi, 0.0, 0.0, 4 * math.pi)
    seq2 = component_spectrum_asymptotic(sc2, 10, 10, 2)
    assert seq2.values[0] == pytest.approx(10.1)


def test_merge_of_two_ladders():
    a = component_spectrum_asymptotic(ladder_coeffs(2 * math.pi, 0.0), -4, 4, 1)
    b = component_spectrum_asymptotic(ladder_coeffs(math.pi, 0.0), -4, 4, 1)
    assert merge_spectra([a, b], upto=4).values.tolist() == [1, 1, 2, 2, 2, 2, 3, 3, 4, 4, 4, 4]


def test_negating_the_potential_swaps_branches(rng):
    c = random_component(rng)
    s = steklov_coeffs_closed(c)
    t = steklov_coeffs_closed(c.negated_potential(), p=-s.p)
    assert (t.b1_plus, t.b1_minus) == (pytest.approx(s.b1_minus, abs=1e-12), pytest.approx(s.b1_plus, abs=1e-12))
    assert (t.b2_plus, t.b2_minus) == (pytest.approx(s.b2_minus, abs=1e-12), pytest.approx(s.b2_plus, abs=1e-12))
    a = component_spectrum_asymptotic(s, -60, 60, 2).values
    b = component_spectrum_asymptotic(t, -60, 60, 2).values
    assert np.allclose(a, b, atol=1e-12)


def test_enumeration_shift_translates_the_ladder():
    c = BoundaryComponent.constant(1.0, 0.3, 0.2, 0.5)
    base = steklov_coeffs_closed(c)
    for q in range(-2, 3):
        shifted = steklov_coeffs_closed(c, p=base.p + q)
        lam = component_spectrum_asymptotic(shifted, 20, 40, 1).values
        ref = component_spectrum_asymptotic(base, 20 + q, 40 + q, 1).values
        assert np.allclose(lam, ref, atol=1e-12)


def test_weyl_slope_of_merged_spectrum(rng):
    sb = SurfaceBoundary((random_component(rng), random_component(rng)))
    seq = boundary_spectrum_asymptotic(sb, 200, upto=150.0)
    n = np.arange(1, len(seq) + 1)
    slope = np.polyfit(n[len(n) // 2 :], seq.values[len(n) // 2 :], 1)[0]
    assert slope == pytest.approx(math.pi / sb.total_length(), rel=0.01)
