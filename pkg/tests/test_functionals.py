import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from polyext.extension import BesselForm, extend
from polyext.functionals import (CheckValue, boundedness_spread, dtn_residual_norm,
                                 energy_identity_gap, energy_ladder, hardy_quotient,
                                 ibp_checks, ibp_normal_flux, ibp_orthogonality, ibp_step1,
                                 kappa_fd, kappa_series, limits_gap, profile_energy,
                                 recursion_residual, taylor_remainder, trace_seminorm,
                                 walphasumm_constant, weighted_energy)
from polyext.orders import (HardyParams, OrderError, d_constant, hardy_constant, kappa,
                            make_order)
from polyext.radial_field import PhysicalField, YLadder, make_test_function

PI = math.pi


# -- CheckValue ---------------------------------------------------------------


def test_check_value_kinds():
    assert CheckValue("a", measured=1.0005, expected=1.0, tol=1e-3).passed
    assert not CheckValue("a", measured=1.01, expected=1.0, tol=1e-3).passed
    assert CheckValue("r", measured=101.0, expected=100.0, tol=0.02, kind="rel").passed
    assert not CheckValue("r", measured=103.0, expected=100.0, tol=0.02, kind="rel").passed
    assert CheckValue("m", measured=1e-9, tol=1e-8, kind="max").passed
    assert CheckValue("lo", measured=0.99, expected=1.0, tol=0.02, kind="min").passed
    assert not CheckValue("lo", measured=0.97, expected=1.0, tol=0.02, kind="min").passed
    assert CheckValue("i", measured=3.0, kind="info").passed


def test_check_value_nan_fails():
    for kind, exp in (("abs", 0.0), ("rel", 1.0), ("max", None), ("min", 1.0), ("info", None)):
        assert not CheckValue("x", measured=float("nan"), expected=exp, tol=1.0, kind=kind).passed


def test_check_value_errors_and_scaling():
    with pytest.raises(ValueError):
        CheckValue("x", measured=1.0, kind="approx")
    with pytest.raises(ValueError):
        CheckValue("x", measured=1.0, kind="abs")
    c = CheckValue("x", measured=1.5, expected=1.0, tol=0.1)
    assert c.abs_err == pytest.approx(0.5)
    assert c.rel_err == pytest.approx(0.5)
    assert c.scaled(10.0).passed and not c.passed
    assert c.line().startswith("[FAIL] x")


# -- energies and seminorms ---------------------------------------------------


def test_trace_seminorm_examples(gaussian):
    assert trace_seminorm(gaussian(2), 0.5) == pytest.approx(PI**1.5 / 2, rel=1e-10)
    assert trace_seminorm(gaussian(4), 1.5) == pytest.approx(15 * PI**2.5 / 8, rel=1e-10)


def test_weighted_energy_examples(gaussian):
    e2 = weighted_energy(extend(gaussian(2), 0.5, YLadder.points([1.0]), 0.0), 1, 0.0)
    assert e2 == pytest.approx(PI**1.5, rel=1e-2)
    e4 = weighted_energy(extend(gaussian(4), 1.5, YLadder.points([1.0]), 0.0), 2, 0.0)
    assert e4 == pytest.approx(7.5 * PI**2.5, rel=1e-2)
    assert e4 == pytest.approx(131.20, rel=1e-2)


def test_zero_field(grids):
    u = make_test_function("gaussian", {"amplitude": 0.0}, grids(2))
    assert weighted_energy(extend(u, 0.5, YLadder.points([1.0]))) == 0.0
    assert trace_seminorm(u, 0.5) == 0.0


@pytest.mark.parametrize("family", ["gaussian", "poly_gaussian(1)", "slater"])
@pytest.mark.parametrize("n, s", [(2, 0.5), (3, 0.75), (4, 1.5), (6, 2.5), (2, 0.3)])
def test_energy_identity_all_families(grids, family, n, s):
    u = make_test_function(family, None, grids(n))
    assert energy_identity_gap(u, make_order(n, s)) < 1e-2


def test_energy_identity_slater_6():
    from polyext.radial_field import RhoGrid
    u = make_test_function("slater", None, RhoGrid.build(6))
    assert energy_identity_gap(u, make_order(6, 2.5)) < 1e-2


@pytest.mark.parametrize("lam", [0.7, 1.6])
@pytest.mark.parametrize("n, s", [(2, 0.5), (4, 1.5)])
def test_scaling_covariance(grids, n, s, lam):
    u = make_test_function("gaussian", None, grids(n))
    v = u.rescaled(lam)
    want = n - 2 * s
    got = math.log(trace_seminorm(v, s) / trace_seminorm(u, s)) / math.log(lam)
    assert abs(got - want) < 1e-3
    o = make_order(n, s)
    lad = YLadder.points([1.0])
    eu = weighted_energy(extend(u, s, lad, o.b), o.extension_order, o.b)
    ev = weighted_energy(extend(v, s, lad, o.b), o.extension_order, o.b)
    assert abs(math.log(ev / eu) / math.log(lam) - want) < 1e-3


# -- Bessel energy constant ---------------------------------------------------


@pytest.mark.parametrize("s", [0.3, 0.5, 0.75, 1.5, 2.5])
def test_walphasumm_matches_2d(s):
    assert walphasumm_constant(s, s) == pytest.approx(2 * d_constant(s), rel=1e-6)


def test_walphasumm_examples():
    assert walphasumm_constant(1.5, 1.5, 4) == pytest.approx(4.0, rel=1e-6)
    assert walphasumm_constant(0.5, 0.5, 2) == pytest.approx(2.0, rel=1e-6)
    c = walphasumm_constant(2.5, 1.5, 4)
    assert math.isfinite(c) and c > 0


def test_walphasumm_preconditions():
    with pytest.raises(OrderError):
        walphasumm_constant(1.5, 2.0)
    with pytest.raises(OrderError):
        walphasumm_constant(1.2, 2.5)


def test_profile_energy():
    # b = 0: phi = e^-t, so 2 int (phi'^2 + phi^2) = 2
    assert profile_energy(0.0) == pytest.approx(2.0, rel=1e-10)
    for b in (-0.5, 0.4):
        v = profile_energy(b)
        assert math.isfinite(v) and v > 0
    with pytest.raises(OrderError):
        profile_energy(1.0)


# -- DtN ------------------------------------------------------------------------


def test_dtn_oracle(gaussian):
    o = make_order(2, 0.5)
    got = dtn_residual_norm(gaussian(2), o, 0.1)
    ref, _ = quad(lambda r: r**2 * math.exp(-r * r) * (1 - math.exp(-0.1 * r)) ** 2, 0, np.inf,
                  epsabs=0, epsrel=1e-12)
    assert got == pytest.approx(2 * PI * ref, rel=1e-9)


@pytest.mark.parametrize("n, s", [(2, 0.5), (4, 1.5)])
def test_dtn_monotone_to_zero(gaussian, n, s):
    ys = 2.0 ** -np.arange(3, 11)
    vals = energy_ladder(gaussian(n), make_order(n, s), ys)
    assert np.all(np.diff(vals) < 0)
    assert vals[-1] < 1e-2 * vals[0]
    assert dtn_residual_norm(gaussian(n), make_order(n, s), 0.0) == 0.0


# -- Taylor ---------------------------------------------------------------------


def test_taylor_zero_height(gaussian):
    r = taylor_remainder(gaussian(4), make_order(4, 1.5), [0.0, 0.1])
    assert r[0] == 0.0


def test_taylor_example(gaussian):
    o = make_order(4, 1.5)
    r = taylor_remainder(gaussian(4), o, 0.05)
    assert abs(r[0]) <= 1e-3
    ra = taylor_remainder(gaussian(4), o, 0.05, path="axis")
    assert ra[0] == pytest.approx(r[0], rel=1e-6)


def test_taylor_little_o(gaussian):
    # R(y) / y^(2[s]) decreases along the decades
    ys = np.array([1e-1, 1e-2, 1e-3])
    r = taylor_remainder(gaussian(4), make_order(4, 1.5), ys)
    q = np.abs(r) / ys**2
    assert np.all(np.diff(q) < 0)
    assert q[-1] < 1e-2


def test_taylor_bad_path(gaussian):
    with pytest.raises(ValueError):
        taylor_remainder(gaussian(4), make_order(4, 1.5), 0.1, path="other")


@pytest.mark.parametrize("s, m", [(1.5, 0), (1.5, 1), (2.5, 1), (2.5, 2)])
def test_kappa_oracles(s, m):
    assert kappa_fd(s, m) == pytest.approx(kappa(s, m), abs=1e-6)
    assert kappa_series(s, m) == pytest.approx(kappa(s, m), abs=1e-12)


# -- limits and recursion -------------------------------------------------------


def test_limits_gap_examples(gaussian):
    assert limits_gap(gaussian(4), make_order(4, 1.5), 1, 1e-3)[0] < 1e-2
    u6 = gaussian(6)
    o6 = make_order(6, 2.5)
    for m in (1, 2):
        assert limits_gap(u6, o6, m, 1e-3)[0] < 1e-2


def test_limits_gap_monotone(gaussian):
    ys = 1e-1 * 2.0 ** -np.arange(6)
    g = limits_gap(gaussian(4), make_order(4, 1.5), 1, ys)
    assert np.all(np.diff(g) < 0)


def test_limits_gap_range(gaussian):
    with pytest.raises(OrderError):
        limits_gap(gaussian(4), make_order(4, 1.5), 2, 1e-3)
    with pytest.raises(OrderError):
        limits_gap(gaussian(4), make_order(4, 1.5), 0, 1e-3)


def test_recursion_closed_form():
    # per mode: m - m'' = -2 t^-1 m' = 2 e^-t for m = (1+t) e^-t
    t = np.geomspace(1e-3, 30, 80)
    f = BesselForm.multiplier(1.5)
    lhs = f.delta_b(0.0).scale(-1.0)(t)
    rhs = f.derivative().shift(-1).scale(-2.0)(t)
    want = 2 * np.exp(-t)
    assert np.max(np.abs(lhs - want)) <= 1e-12
    assert np.max(np.abs(rhs - want)) <= 1e-12


def test_recursion_residuals(gaussian):
    ys = [1e-3, 0.1, 1.0]
    assert recursion_residual(gaussian(4), make_order(4, 1.5), 1, ys) <= 1e-12
    for m in (1, 2):
        assert recursion_residual(gaussian(6), make_order(6, 2.5), m, ys) <= 1e-8
    with pytest.raises(ValueError):
        recursion_residual(gaussian(4), make_order(4, 1.5), 1, [0.0])


# -- Hardy ----------------------------------------------------------------------


def test_hardy_gaussian_d3():
    U = PhysicalField.gaussian(2, 0.5, 0.5)
    p = HardyParams(2, 1, 0.0, 0.0)
    assert hardy_quotient(U, p) == pytest.approx(0.75, rel=1e-2)
    assert hardy_constant(p) ** 2 == pytest.approx(0.25, rel=1e-12)


def test_hardy_fd_fallback():
    U = PhysicalField.from_callable(2, lambda r, y: np.exp(-(r * r + y * y) / 2.0))
    assert hardy_quotient(U, HardyParams(2, 1, 0.0, 0.0)) == pytest.approx(0.75, rel=1e-2)


def test_hardy_n4_k2():
    p = HardyParams(4, 2, 0.0, 0.0)
    assert hardy_constant(p) ** 2 == pytest.approx(1.5625, rel=1e-12)
    assert hardy_quotient(PhysicalField.gaussian(4, 0.5, 0.5), p) >= 1.5625 * 0.98


FIELDS = [
    lambda n: PhysicalField.gaussian(n, 0.5, 0.5),
    lambda n: PhysicalField.gaussian(n, 1.0, 1.0, {(0, 0): 1.0, (1, 0): 1.0, (0, 1): 1.0}),
    lambda n: PhysicalField.gaussian(n, 0.5, 1.0, {(0, 0): 1.0, (0, 1): 0.5}),
]


@pytest.mark.parametrize("k, a, b", [(1, 0.0, 0.0), (1, 0.5, -0.4), (2, 0.0, 0.0), (2, 0.0, 0.5)])
@pytest.mark.parametrize("n", [4, 5])
@pytest.mark.parametrize("make", FIELDS)
def test_hardy_lower_bound(k, a, b, n, make):
    p = HardyParams(n, k, a, b)
    assert hardy_quotient(make(n), p) >= hardy_constant(p) ** 2 * 0.98


@given(st.floats(0.3, 2.0), st.floats(0.3, 2.0), st.floats(-0.9, 0.9), st.floats(0.0, 1.0))
def test_hardy_property(beta, gam, b, afrac):
    n, k = 3, 1
    a = afrac * ((n + 1 + b) / 2 - k) * 0.95
    p = HardyParams(n, k, a, b)
    U = PhysicalField.gaussian(n, beta, gam, {(0, 0): 1.0, (1, 0): 0.5})
    assert hardy_quotient(U, p, angles=24, order=12) >= hardy_constant(p) ** 2 * 0.98


def test_hardy_errors():
    with pytest.raises(OrderError):
        HardyParams(2, 2, 0.0, 0.0)
    with pytest.raises(ValueError):
        hardy_quotient(PhysicalField.gaussian(2, 0.001, 0.001), HardyParams(2, 1, 0.0, 0.0))
    with pytest.raises(ValueError):
        hardy_quotient(PhysicalField.gaussian(3, 0.5, 0.5), HardyParams(2, 1, 0.0, 0.0))


# -- integration by parts -------------------------------------------------------


W = PhysicalField.gaussian(3, 0.5, 0.7, {(0, 0): 1.0, (1, 0): 0.3})
V = PhysicalField.gaussian(3, 0.8, 0.4, {(0, 0): 1.0, (0, 1): 0.5})


@pytest.mark.parametrize("k", [2, 3, 4])
def test_ibp_step1(k):
    assert ibp_step1(W, V, k, 0.5) <= 1e-6
    assert ibp_checks("step1", W=W, V=V, k=k, b=0.5) <= 1e-6


def test_ibp_step1_needs_k2():
    with pytest.raises(ValueError):
        ibp_step1(W, V, 1, 0.5)


def test_ibp_orthogonality(gaussian):
    Vt = PhysicalField.gaussian(4, 1.0, 1.0, {(0, 1): 1.0})
    assert ibp_orthogonality(gaussian(4), make_order(4, 1.5), Vt) <= 1e-3


def test_ibp_orthogonality_rejects_trace(gaussian):
    with pytest.raises(ValueError, match="nonzero trace"):
        ibp_orthogonality(gaussian(4), make_order(4, 1.5), PhysicalField.gaussian(4, 1.0, 1.0))


def test_ibp_normal_flux(gaussian):
    ys = 10.0 ** -np.arange(1, 4)
    f = ibp_normal_flux(gaussian(4), make_order(4, 1.5), 1, ys)
    assert np.all(np.diff(f) < 0)
    assert f[-1] <= 1e-2
    with pytest.raises(OrderError):
        ibp_normal_flux(gaussian(4), make_order(4, 1.5), 2, ys)


def test_ibp_unknown():
    with pytest.raises(ValueError):
        ibp_checks("stepX")


# -- boundedness ----------------------------------------------------------------


@pytest.mark.parametrize("family, n, s", [("gaussian", 2, 0.5), ("poly_gaussian(1)", 4, 1.5)])
def test_boundedness_spread(grids, family, n, s):
    u = make_test_function(family, None, grids(n))
    o = make_order(n, s)
    spread, ratios = boundedness_spread(u, o)
    assert set(ratios) == {o.frac, o.frac + 1, s, s + 1}
    assert all(math.isfinite(v) and v > 0 for v in ratios.values())
    assert spread < 10.0
