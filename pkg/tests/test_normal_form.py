import math

import numpy as np
import pytest

from magsteklov.boundary import BoundaryComponent, random_component
from magsteklov.dn_map import symmetrized_dn_symbol
from magsteklov.errors import PreconditionError
from magsteklov.normal_form import b2_closed_form, nf_step1, nf_step2, normal_form
from magsteklov.periodic import PeriodicFn
from magsteklov.symbols import GradedSymbol, HomogComponent


def flat_symbol(h1: PeriodicFn | float = 0.0) -> GradedSymbol:
    h = h1 if isinstance(h1, PeriodicFn) else PeriodicFn.constant(h1)
    return GradedSymbol(
        1.0, (HomogComponent.even(1.0, PeriodicFn.constant(1.0)), HomogComponent.odd(0.0, h))
    )


def test_step1_identity_for_constant_principal_symbol():
    s = nf_step1(HomogComponent.even(1.0, PeriodicFn.constant(2.0)), 1.0)
    assert s.identity
    assert s.b0 == pytest.approx((2.0, 2.0))


def test_step1_uses_the_boundary_length():
    g11 = PeriodicFn.trig(1.0, [0.5]) * PeriodicFn.trig(1.0, [0.5])
    a0 = HomogComponent.even(1.0, g11.sqrt().reciprocal())
    s = nf_step1(a0, 1.0)
    assert s.b0 == pytest.approx((1.0, 1.0), abs=1e-12)
    assert not s.identity


def test_step2_constant_flux():
    k1, b1 = nf_step2(flat_symbol(0.3), 0)
    assert b1 == pytest.approx((0.3, -0.3))
    assert k1.is_x_independent()


def test_step2_winding_shifts_the_flux():
    _, b1 = nf_step2(flat_symbol(0.3), 1)
    assert b1[0] == pytest.approx(1.3)


def test_step2_nonconstant_flux_has_unimodular_nonconstant_conjugator():
    h = PeriodicFn.trig(0.3, [1.0])
    k1, b1 = nf_step2(flat_symbol(h), 0)
    assert b1 == pytest.approx((0.3, -0.3), abs=1e-12)
    vals = k1.plus.values(256)
    assert np.allclose(np.abs(vals), 1.0, atol=1e-10)
    assert not k1.is_x_independent()


def test_normal_form_of_laplacian_root():
    res = normal_form(GradedSymbol(1.0, (HomogComponent.even(1.0, PeriodicFn.constant(1.0)),), exact=True), 4)
    assert res.b[0] == pytest.approx((1.0, 1.0))
    assert all(abs(x) < 1e-14 for pair in res.b[1:] for x in pair)


def test_flat_case_has_no_lower_order_terms():
    g = PeriodicFn.trig(1.0, [0.5]) * PeriodicFn.trig(1.0, [0.5])
    c = BoundaryComponent(g, PeriodicFn.zero(), PeriodicFn.zero(), PeriodicFn.zero())
    res = normal_form(symmetrized_dn_symbol(c, 6), 6)
    assert res.b[0] == pytest.approx((1.0, 1.0), abs=1e-12)
    assert max(abs(x) for pair in res.b[1:] for x in pair) < 1e-9


def test_non_self_adjoint_input_is_rejected():
    a = GradedSymbol(
        1.0,
        (
            HomogComponent.even(1.0, PeriodicFn.trig(1.5, [0.3])),
            HomogComponent.zero(0.0),
        ),
    )
    with pytest.raises(PreconditionError):
        normal_form(a, 2)


def test_b2_closed_form_for_constant_symbol():
    a0 = HomogComponent.even(1.0, PeriodicFn.constant(1.0))
    a1 = HomogComponent.odd(0.0, PeriodicFn.constant(0.3))
    a2 = HomogComponent.const(-1.0, 0.7, 0.2)
    assert b2_closed_form(a0, a1, a2, (0.3, -0.3), 1.0) == pytest.approx((0.7, 0.2))


def test_b2_closed_form_matches_engine_on_random_flat_metric():
    rng = np.random.default_rng(11)
    c = random_component(rng).replace(g11=PeriodicFn.constant(1.0))
    a = symmetrized_dn_symbol(c, 3)
    res = normal_form(a, 3)
    closed = b2_closed_form(a.component(0), a.component(1), a.component(2), res.b[1], 1.0)
    assert closed == pytest.approx(res.b[2], abs=1e-9)
