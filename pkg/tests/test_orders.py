import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyext.orders import (FractionalOrder, HardyParams, OrderError, d_constant, dtn_deficit,
                            hardy_constant, extension_hardy_constant, kappa, make_order,
                            multiplier, multiplier_derivative, poisson_normalizer, sphere_area)


def test_make_order_examples():
    o = make_order(4, 1.5)
    assert (o.int_part, o.frac, o.b, o.extension_order) == (1, 0.5, 0.0, 2)
    o = make_order(2, 0.75)
    assert (o.int_part, o.frac, o.b) == (0, 0.75, -0.5)
    assert o.as_dict()["b"] == -0.5


@pytest.mark.parametrize("n, s", [(2, 1.2), (2, 1.0), (3, 0.0), (3, -0.5), (0, 0.3)])
def test_make_order_rejects(n, s):
    with pytest.raises(OrderError):
        make_order(n, s)


@given(st.integers(1, 12), st.floats(0.01, 6.0))
def test_order_invariants(n, s):
    if not s < n / 2 or s == math.floor(s):
        with pytest.raises(OrderError):
            FractionalOrder(n, s)
        return
    o = FractionalOrder(n, s)
    assert -1 < o.b < 1
    assert o.int_part + o.frac == pytest.approx(s)
    assert (o.b == 0) == (abs(s + 0.5 - round(s + 0.5)) < 1e-15)


@pytest.mark.parametrize("s, want", [(0.5, 1.0), (1.5, 2.0), (2.5, 8.0 / 3.0)])
def test_d_constant(s, want):
    assert d_constant(s) == pytest.approx(want, abs=1e-12)


@given(st.floats(0.05, 0.95))
def test_d_constant_fractional_branch(s):
    want = 2 ** (1 - 2 * s) * math.gamma(1 - s) / math.gamma(s)
    assert d_constant(s) == pytest.approx(want, rel=1e-12)


def test_kappa_examples():
    for s in (0.3, 1.5, 2.5, 3.7):
        assert kappa(s, 0) == 1.0
    assert kappa(1.5, 1) == pytest.approx(-1.0, abs=1e-12)
    assert kappa(2.5, 1) == pytest.approx(-1 / 3, abs=1e-12)
    with pytest.raises(OrderError):
        kappa(1.5, 2)


@given(st.floats(1.05, 5.95))
def test_kappa_first_coefficient(s):
    if s == math.floor(s):
        return
    assert kappa(s, 1) == pytest.approx(1.0 / (2.0 * (1.0 - s)), rel=1e-12)


@pytest.mark.parametrize("n, a, want", [(1, 0.5, 1 / math.pi), (2, 0.5, 1 / (2 * math.pi)),
                                        (2, 1.0, 1 / math.pi)])
def test_poisson_normalizer(n, a, want):
    assert poisson_normalizer(n, a) == pytest.approx(want, rel=1e-13)


def test_hardy_constant_examples():
    assert hardy_constant(HardyParams(2, 1, 0.0, 0.0)) == pytest.approx(0.5, rel=1e-13)
    assert hardy_constant(HardyParams(4, 2, 0.0, 0.0)) == pytest.approx(1.25, rel=1e-13)
    assert hardy_constant(HardyParams(4, 2, 0.0, 0.5)) == pytest.approx(2.0625, rel=1e-13)


@given(st.integers(1, 9), st.floats(-0.95, 0.95))
def test_hardy_elementary_reductions(n, b):
    h = (n + 1 + b) / 2
    if h - 1 > 0:
        assert hardy_constant(HardyParams(n, 1, 0.0, b)) == pytest.approx(h - 1, rel=1e-10)
    if h - 2 > 0:
        assert hardy_constant(HardyParams(n, 2, 0.0, b)) == pytest.approx((h - 2) * h, rel=1e-10)


def test_hardy_params_admissibility():
    with pytest.raises(OrderError):
        HardyParams(2, 1, 0.5, 0.0)
    with pytest.raises(OrderError):
        HardyParams(4, 2, 0.0, 1.0)
    with pytest.raises(OrderError):
        HardyParams(4, 0, 0.0, 0.0)
    with pytest.raises(OrderError):
        hardy_constant(HardyParams(3, 1, -0.1, 0.0))


def test_extension_hardy_constant_matches_square():
    for n, s in ((4, 1.5), (6, 2.5), (3, 0.75), (7, 2.2)):
        o = make_order(n, s)
        p = HardyParams(n, o.extension_order, 0.0, o.b)
        assert extension_hardy_constant(o) == pytest.approx(hardy_constant(p) ** 2, rel=1e-12)


def test_multiplier_examples():
    assert multiplier(0.5, 1.0) == pytest.approx(math.exp(-1), rel=1e-14)
    assert multiplier(1.5, 1.0) == pytest.approx(2 / math.e, rel=1e-14)
    for a in (0.2, 1.0, 3.3):
        assert multiplier(a, 0.0) == 1.0


@given(st.floats(0.05, 6.0))
def test_multiplier_bounds_and_monotone(a):
    t = np.geomspace(1e-3, 50, 80)
    m = np.asarray(multiplier(a, t))
    assert np.all((m > 0) & (m <= 1))
    assert np.all(np.diff(m) < 0)
    assert np.all(np.asarray(multiplier_derivative(a, t)) < 0)


def test_dtn_deficit_examples():
    assert dtn_deficit(0.5, 1.0, "neumann") == pytest.approx(1 - math.exp(-1), rel=1e-14)
    assert dtn_deficit(1.5, 1.0, "dirichlet") == pytest.approx(1 - 2 / math.e, rel=1e-13)
    assert dtn_deficit(0.3, 0.0, "neumann") == 0.0
    assert abs(dtn_deficit(0.3, 1e-10, "neumann")) < 1e-5
    assert dtn_deficit(0.3, 60.0, "neumann") == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(OrderError):
        dtn_deficit(1.5, 1.0, "neumann")
    with pytest.raises(ValueError):
        dtn_deficit(0.5, 1.0, "robin")


def test_dirichlet_is_one_minus_multiplier():
    t = np.linspace(0.0, 20.0, 101)
    for a in (0.4, 1.5, 2.2):
        assert np.array_equal(dtn_deficit(a, t, "dirichlet"), 1 - np.asarray(multiplier(a, t)))


def test_sphere_area():
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    assert sphere_area(1) == pytest.approx(2.0)
