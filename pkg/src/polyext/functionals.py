"""Energies, seminorms, Hardy quotients and identity residuals.

Spectral functionals integrate per-mode quantities over ``rho`` (with the
measure ``omega_{n-1} rho^(n-1)``) and over ``y`` with ``|y|^b``; the factor 2
accounts for both signs of ``y``. Physical functionals (Hardy quotients, the
integration-by-parts check, the boundedness ratio) use a polar rule in
``(|x|, |y|)``, because the weight ``|z|^(-2a)`` does not factor per mode.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import jv

from .extension import (BesselForm, ExtensionField, delta_b_apply, extend,
                        extend_axis_oracle, polyharm_energy_density, y_derivative_free)
from .orders import (FractionalOrder, HardyParams, OrderError, d_constant,
                     dtn_deficit, kappa, multiplier, sphere_area)
from .quadrature import graded_rule
from .radial_field import (PhysicalField, PolarGrid, RadialSpectralFunction, RhoGrid,
                           TailWarning, YLadder, integrate)
from .specfun import gamma, gamma_ratio, tnu_k
from .terms import TermExpr

__all__ = [
    "CheckValue",
    "CHECK_KINDS",
    "weighted_energy",
    "trace_seminorm",
    "energy_identity_gap",
    "walphasumm_constant",
    "dtn_residual_norm",
    "spectral_axis_value",
    "taylor_remainder",
    "limits_gap",
    "recursion_residual",
    "hardy_quotient",
    "ibp_step1",
    "ibp_orthogonality",
    "ibp_normal_flux",
    "ibp_checks",
    "kappa_series",
    "kappa_fd",
    "boundedness_ratio",
    "boundedness_spread",
    "profile_energy",
    "energy_ladder",
]

CHECK_KINDS = ("abs", "rel", "max", "min", "info")


@dataclass(frozen=True)
class CheckValue:
    """One verification outcome.

    ``kind``: ``abs`` passes when ``|measured - expected| <= tol``; ``rel``
    when ``|measured - expected| <= tol |expected|``; ``max`` when
    ``measured <= tol``; ``min`` when ``measured >= expected (1 - tol)``;
    ``info`` records a finite value without asserting anything. A NaN
    measurement always fails.
    """

    name: str
    params: dict = field(default_factory=dict)
    measured: float = float("nan")
    expected: float | None = None
    tol: float = 0.0
    kind: str = "abs"
    note: str = ""

    def __post_init__(self):
        if self.kind not in CHECK_KINDS:
            raise ValueError(f"unknown check kind {self.kind!r}")
        if self.kind in ("abs", "rel", "min") and self.expected is None:
            raise ValueError(f"kind {self.kind!r} needs an expected value")

    @property
    def abs_err(self) -> float | None:
        if self.expected is None:
            return None
        return abs(self.measured - self.expected)

    @property
    def rel_err(self) -> float | None:
        if self.expected is None:
            return None
        if self.expected == 0:
            return None if self.measured != 0 else 0.0
        return abs(self.measured - self.expected) / abs(self.expected)

    @property
    def passed(self) -> bool:
        m = self.measured
        if m is None or not math.isfinite(m):
            return False
        if self.kind == "abs":
            return abs(m - self.expected) <= self.tol
        if self.kind == "rel":
            return abs(m - self.expected) <= self.tol * abs(self.expected)
        if self.kind == "max":
            return m <= self.tol
        if self.kind == "min":
            return m >= self.expected * (1.0 - self.tol)
        return True

    def scaled(self, factor: float) -> "CheckValue":
        return replace(self, tol=self.tol * factor)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        exp = "-" if self.expected is None else f"{self.expected:.10g}"
        return (f"[{status}] {self.name}: measured={self.measured:.10g} "
                f"expected={exp} tol={self.tol:.3g} ({self.kind})")


# ---------------------------------------------------------------------------
# spectral energies


def _quad_ladder(b: float) -> YLadder:
    return YLadder.quadrature(b, y_max=1e6, y_min=1e-8, ratio=2.0, order=16)


def _on_quadrature(fld: ExtensionField, b: float) -> ExtensionField:
    lad = fld.ladder
    if lad.weights is not None and lad.b == b:
        return fld
    if fld.form is None:
        raise ValueError("energy needs an analytic field or a quadrature ladder")
    return ExtensionField(fld.u, fld.alpha, _quad_ladder(b), fld.form, fld.rho_power,
                          None, fld.b, fld.label)


def weighted_energy(fld: ExtensionField, k: int | None = None, b: float | None = None) -> float:
    """``iint |y|^b |grad Delta_b^k E|^2 dz`` in spectral form.

    ``k`` defaults to ``1 + [alpha]`` and ``b`` to the field's exponent.
    The field is moved onto a ``|y|^b`` quadrature ladder when needed.
    """
    bb = fld.b if b is None else float(b)
    kk = 1 + math.floor(fld.alpha) if k is None else int(k)
    if fld.form is not None and fld.form.is_zero():
        return 0.0
    q = _on_quadrature(fld, bb)
    dens = polyharm_energy_density(q, kk, bb)
    grid = q.u.grid
    w = grid.radial_weights()
    per_mode = dens @ q.ladder.weights
    total = 2.0 * float(w @ per_mode)
    edge = 2.0 * float(np.abs(w[-16:] @ per_mode[-16:]))
    yedge = 2.0 * float(np.abs(w @ (dens[:, -16:] @ q.ladder.weights[-16:])))
    if total != 0 and max(edge, yedge) > 1e-8 * abs(total):
        warnings.warn("weighted energy: integrand has not decayed at the grid edge",
                      TailWarning, stacklevel=2)
    return total


def trace_seminorm(u: RadialSpectralFunction, s: float) -> float:
    """``omega_{n-1} int rho^(n-1+2s) |u^|^2 d rho``."""
    return integrate(u.values**2, u.grid, rho_power=2.0 * s, radial=True)


def energy_identity_gap(u: RadialSpectralFunction, order: FractionalOrder) -> float:
    """Relative gap between the extension energy and ``2 d_s`` times the seminorm."""
    fld = extend(u, order.s, _quad_ladder(order.b), order.b)
    energy = weighted_energy(fld, order.extension_order, order.b)
    rhs = 2.0 * d_constant(order.s) * trace_seminorm(u, order.s)
    return abs(energy - rhs) / abs(rhs)


def _bessel_sq_integral(nu: float, power: float) -> float:
    """``int_0^infty t^power K_nu(t)^2 dt`` by graded quadrature."""
    nu = abs(nu)
    # t^power K_nu^2 = t^(power - 2 nu) (t^nu K_nu)^2
    lead = power - 2.0 * nu
    if not lead > -1.0:
        raise OrderError(f"int t^{power} K_{nu}^2 diverges at t = 0")
    t, w = graded_rule(60.0, power=lead, first=1e-7, ratio=2.0, knee=1.0,
                       width=1.0, order=24)
    vals = tnu_k(nu, t) ** 2 * t**lead
    return float(np.sum(w * vals))


def walphasumm_constant(alpha: float, s: float, n: int | None = None) -> float:
    """Energy factor ``C_alpha`` with energy of ``E_alpha[u]`` equal to
    ``C_alpha`` times the order-``s`` seminorm, from 1-D Bessel integrals.

    ``[s] = 2m - 1``: ``C = 2 c^2 A^2 int t^(b+2beta) K_beta^2``;
    ``[s] = 2m``:     ``C = 2 c^2 A^2 int t^(b+2beta) (K_beta^2 + K_(beta-1)^2)``;
    with ``beta = alpha - m``, ``A = 2^(1-beta)/Gamma(beta)`` and
    ``c = Gamma(h+alpha) Gamma(alpha-m) / (Gamma(h+alpha-m) Gamma(alpha))``,
    ``h = (b+1)/2``. ``n`` does not enter.
    """
    k = math.floor(s)
    sigma = s - k
    if sigma == 0:
        raise OrderError("s must not be an integer")
    b = 1.0 - 2.0 * sigma
    if not (alpha == s or (alpha > math.floor(alpha) >= k)):
        raise OrderError(f"need alpha = s or alpha > [alpha] >= [s] (alpha={alpha}, s={s})")
    m = (k + 1) // 2 if k % 2 else k // 2
    beta = alpha - m
    if not beta > 0:
        raise OrderError(f"alpha - m must be positive (alpha={alpha}, m={m})")
    h = (b + 1.0) / 2.0
    c = gamma_ratio(h + alpha, h + alpha - m) * gamma_ratio(alpha - m, alpha) if m else 1.0
    amp = 2.0 ** (1.0 - beta) / gamma(beta)
    integral = _bessel_sq_integral(beta, b + 2.0 * beta)
    if k % 2 == 0:
        integral += _bessel_sq_integral(beta - 1.0, b + 2.0 * beta)
    return 2.0 * c * c * amp * amp * integral


def profile_energy(b: float) -> float:
    """``int_R |t|^b (phi'^2 + phi^2) dt`` at ``phi = m_((1-b)/2)``.

    An upper bound for the one-dimensional trace constant; compare with
    ``2 d_((1-b)/2)`` (no equality is asserted).
    """
    if not -1.0 < b < 1.0:
        raise OrderError(f"need -1 < b < 1, got {b}")
    alpha = (1.0 - b) / 2.0
    form = BesselForm.multiplier(alpha)
    d1 = form.derivative()
    # phi' ~ t^(-b) near 0, so the integrand behaves like t^(-|b|)
    t, w = graded_rule(60.0, power=-abs(b), first=1e-7, ratio=2.0, knee=1.0, width=1.0, order=24)
    vals = t**b * (form(t) ** 2 + d1(t) ** 2)
    return 2.0 * float(np.sum(w * vals))


# ---------------------------------------------------------------------------
# boundary behaviour


def dtn_residual_norm(u: RadialSpectralFunction, order: FractionalOrder, y: float) -> float:
    """Majorant ``omega int rho^(n-1+2s) |u^|^2 Phi_sigma(y rho)^2 d rho``."""
    phi = np.asarray(dtn_deficit(order.frac, abs(y) * u.grid.nodes, "neumann"))
    return integrate(u.values**2 * phi**2, u.grid, rho_power=2.0 * order.s, radial=True)


def spectral_axis_value(u: RadialSpectralFunction, alpha: float, y) -> np.ndarray:
    """``E_alpha[u](0, y)`` through the spectral route."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    form = BesselForm.multiplier(alpha)
    g = u.grid
    vals = form(np.abs(y)[None, :] * g.nodes[:, None]) * u.values[:, None]
    return (2.0 * math.pi) ** (-g.n / 2.0) * (g.radial_weights() @ vals)


def _laplacian_moments(u: RadialSpectralFunction, top: int) -> list[float]:
    g = u.grid
    pref = (2.0 * math.pi) ** (-g.n / 2.0)
    return [pref * float(np.sum(g.radial_weights(2.0 * m) * u.values)) for m in range(top + 1)]


def taylor_remainder(u: RadialSpectralFunction, order: FractionalOrder, y,
                     path: str = "spectral") -> np.ndarray:
    """``E(0,y) - sum_{m<=[s]} kappa_{s,m} y^(2m) (-Delta)^m u(0) / (2m)!``."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    s, k = order.s, order.int_part
    if path == "spectral":
        ev = spectral_axis_value(u, s, y)
    elif path == "axis":
        ev = np.array([extend_axis_oracle(u.physical, u.n, s, float(v)) if v > 0
                       else float(u.physical(0.0)) for v in y])
    else:
        raise ValueError(f"unknown path {path!r}")
    lap = _laplacian_moments(u, k)
    model = np.zeros_like(y)
    for m in range(k + 1):
        model += kappa(s, m) * y ** (2 * m) * lap[m] / math.factorial(2 * m)
    out = ev - model
    out[y == 0] = 0.0
    return out


def _tower(fld: ExtensionField, m: int, b: float) -> ExtensionField:
    """``(-Delta_b)^m`` applied analytically."""
    cur = fld
    for _ in range(m):
        nxt = delta_b_apply(cur, b)
        cur = nxt.with_form(nxt.form.scale(-1.0), 0.0, nxt.label)
    return cur


def limits_gap(u: RadialSpectralFunction, order: FractionalOrder, m: int, y) -> np.ndarray:
    """Relative weighted-L^2 gap between ``(-Delta_b)^m E_s[u]`` at height y and
    ``(d_s/d_(s-m)) rho^(2m) u^``; weight ``rho^(2(s-2m))``."""
    if not 1 <= m <= order.int_part:
        raise OrderError(f"need 1 <= m <= [s] = {order.int_part}, got {m}")
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    fld = extend(u, order.s, YLadder.points(ys), order.b)
    # profile_values keeps the caller's ordering of the heights
    lhs = _tower(fld, m, order.b).profile_values(ys)
    rho = u.grid.nodes
    target = (d_constant(order.s) / d_constant(order.s - m)) * rho ** (2 * m) * u.values
    w = u.grid.radial_weights(2.0 * (order.s - 2 * m))
    num = w @ (lhs - target[:, None]) ** 2
    den = float(w @ target**2)
    return np.sqrt(num / den)


def recursion_residual(u: RadialSpectralFunction, order: FractionalOrder, m: int, y) -> float:
    """Relative per-mode sup gap of
    ``(-Delta_b)^m E = -2(1+[s]-m) y^-1 d_y (-Delta_b)^(m-1) E`` at heights y."""
    if not 1 <= m <= order.int_part:
        raise OrderError(f"need 1 <= m <= [s] = {order.int_part}, got {m}")
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(ys == 0):
        raise ValueError("the recursion holds off y = 0")
    b = order.b
    prev = BesselForm.multiplier(order.s)
    for _ in range(m - 1):
        prev = prev.delta_b(b).scale(-1.0)
    lhs_form = prev.delta_b(b).scale(-1.0)
    rhs_form = prev.derivative().shift(-1).scale(-2.0 * (1 + order.int_part - m))
    rho = u.grid.nodes
    t = rho[:, None] * np.abs(ys)[None, :]
    amp = (np.abs(u.values) * rho ** (2 * m))[:, None]
    lhs = amp * lhs_form(t)
    rhs = amp * rhs_form(t)
    scale = float(np.max(np.abs(lhs)))
    return float(np.max(np.abs(lhs - rhs))) / scale if scale > 0 else float(np.max(np.abs(rhs)))


def kappa_series(s: float, m: int) -> float:
    """``kappa_{s,m}`` from the power series of the multiplier (coefficient
    of ``t^(2m)`` times ``(2m)!``)."""
    ser = BesselForm.multiplier(s).series()
    return ser.get(float(2 * m), 0.0) * math.factorial(2 * m)


def kappa_fd(s: float, m: int, h0: float = 0.8, levels: int = 7) -> float:
    """``kappa_{s,m}`` from centered differences of ``m_s`` at ``t = 0``.

    The even extension ``m_s(|t|)`` has expansion exponents ``2j`` and
    ``2s + 2j``; the ``2m``-th difference quotient is Richardson-extrapolated
    over ``h = h0 2^-i`` eliminating those exponents in increasing order.
    """
    if m == 0:
        return float(multiplier(s, 0.0))
    exps = sorted({2.0 * (j - m) for j in range(m + 1, m + 8)}
                  | {2.0 * s + 2.0 * j - 2.0 * m for j in range(8)})
    exps = [e for e in exps if e > 0]
    coeffs = [(-1) ** (m - i) * math.comb(2 * m, m + i) for i in range(-m, m + 1)]
    row = []
    for i in range(levels):
        h = h0 * 2.0 ** -i
        pts = np.abs(np.arange(-m, m + 1) * h)
        f = np.asarray(multiplier(s, pts))
        row.append(float(np.dot(coeffs, f)) / h ** (2 * m))
    for e in exps[: levels - 1]:
        fac = 2.0**e
        row = [(fac * row[i + 1] - row[i]) / (fac - 1.0) for i in range(len(row) - 1)]
    return row[-1]


# ---------------------------------------------------------------------------
# physical-space functionals


def _tower_density_expr(expr: TermExpr, k: int, b: float, r, y) -> np.ndarray:
    cur = expr.delta_b_power(b, k // 2)
    if k % 2 == 0:
        v = cur(r, y)
        return v * v
    return cur.grad_sq(r, y)


def _fd_delta_b(U: PhysicalField, b: float, r, y, h: float = 1e-3) -> np.ndarray:
    def f(rr, yy):
        return U(np.abs(rr), yy)
    u0 = f(r, y)
    urr = (f(r + h, y) - 2 * u0 + f(r - h, y)) / h**2
    ur = (f(r + h, y) - f(r - h, y)) / (2 * h)
    uyy = (f(r, y + h) - 2 * u0 + f(r, y - h)) / h**2
    uy = (f(r, y + h) - f(r, y - h)) / (2 * h)
    return urr + (U.n - 1) * ur / r + uyy + b * uy / y


def _fd_tower_density(U: PhysicalField, k: int, b: float, r, y, h: float = 1e-3) -> np.ndarray:
    if k == 1:
        gr = (U(r + h, y) - U(np.abs(r - h), y)) / (2 * h)
        gy = (U(r, y + h) - U(r, np.abs(y - h))) / (2 * h)
        return gr * gr + gy * gy
    if k == 2:
        v = _fd_delta_b(U, b, r, y, h)
        return v * v
    raise ValueError("finite-difference fallback supports k <= 2 only")


def _r_max_for(U: PhysicalField) -> float:
    if U.expr is not None:
        rate = min(U.expr.beta, U.expr.gamma)
        if rate > 0:
            return min(max(math.sqrt(50.0 / rate), 4.0), 40.0)
    return 14.0


def hardy_quotient(U: PhysicalField, p: HardyParams, *, angles: int = 32,
                   order: int = 16) -> float:
    """``iint |y|^b |z|^(-2a) |grad Delta_b^k U|^2 / iint |y|^b |z|^(-2(a+k)) U^2``."""
    if U.n != p.n:
        raise ValueError("field and parameter dimensions differ")
    r_max = _r_max_for(U)
    g_num = PolarGrid.build(p.n, p.b, p.a, r_max=r_max, angles=angles, order=order)
    g_den = PolarGrid.build(p.n, p.b, p.a + p.k, r_max=r_max, angles=angles, order=order)
    if U.exact:
        num_vals = _tower_density_expr(U.expr, p.k, p.b, g_num.r, g_num.y)
    else:
        num_vals = _fd_tower_density(U, p.k, p.b, g_num.r, g_num.y)
    den_vals = U(g_den.r, g_den.y) ** 2
    for grid, vals in ((g_num, num_vals), (g_den, den_vals)):
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values are not finite on the quadrature grid")
        if grid.outer_fraction(vals) > 1e-8:
            raise ValueError("field does not decay: truncated integral has a heavy tail")
    den = integrate(den_vals, g_den)
    if not den > 0:
        raise ValueError("zero field")
    return integrate(num_vals, g_num) / den


def _tower_pairing(a: TermExpr, c: TermExpr, k: int, b: float, r, y) -> np.ndarray:
    ta = a.delta_b_power(b, k // 2)
    tc = c.delta_b_power(b, k // 2)
    if k % 2 == 0:
        return ta(r, y) * tc(r, y)
    return ta.grad_dot(tc, r, y)


def ibp_step1(W: PhysicalField, V: PhysicalField, k: int, b: float) -> float:
    """Relative gap of
    ``iint |y|^b (-Delta_b)^(k-1) W (-Delta_b) V = iint |y|^b grad^k W . grad^k V``."""
    if k < 2:
        raise ValueError("the integration-by-parts identity needs k >= 2")
    if not (W.exact and V.exact):
        raise ValueError("step1 needs analytic fields")
    if W.n != V.n:
        raise ValueError("dimension mismatch")
    r_max = max(_r_max_for(W), _r_max_for(V))
    g = PolarGrid.build(W.n, b, 0.0, r_max=r_max, angles=32, order=16)
    lw = W.expr.delta_b_power(b, k - 1).scale((-1.0) ** (k - 1))
    lv = V.expr.delta_b(b).scale(-1.0)
    lhs = integrate(lw(g.r, g.y) * lv(g.r, g.y), g)
    rhs = integrate(_tower_pairing(W.expr, V.expr, k, b, g.r, g.y), g)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)


def _gaussian_y_transform(V: PhysicalField) -> tuple[float, TermExpr]:
    """Split ``V = e^(-beta r^2) f(y)``; returns ``(beta, f)`` with ``f`` a 1-D
    term expression (no ``r`` dependence)."""
    e = V.expr
    if any(k[0] != 0.0 or k[2] != 0.0 for k in e.terms):
        raise ValueError("orthogonality test fields must have the form e^(-beta r^2) f(y)")
    f = TermExpr(e.n, dict(e.terms), beta=0.0, gamma=e.gamma)
    return e.beta, f


def _v_tower_values(beta: float, f: TermExpr, n: int, j: int, b: float,
                    rho: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Per-mode ``Delta_b^j V^`` on ``rho x y`` for ``V = e^(-beta r^2) f(y)``."""
    gauss = (2.0 * beta) ** (-n / 2.0) * np.exp(-(rho**2) / (4.0 * beta))
    zero = np.zeros_like(y)
    total = np.zeros((rho.size, y.size))
    dpow = f
    for i in range(j + 1):
        coef = math.comb(j, i) * (-(rho**2)) ** (j - i)
        total += coef[:, None] * dpow(zero, y)[None, :]
        dpow = dpow.delta_b(b)
    return gauss[:, None] * total


def ibp_orthogonality(u: RadialSpectralFunction, order: FractionalOrder,
                      V: PhysicalField) -> float:
    """``|iint |y|^b grad^k E_s[u] . grad^k V|`` over the geometric mean of the
    two energies, for ``V`` with zero trace (``k = 1 + [s]``)."""
    if not V.exact:
        raise ValueError("orthogonality needs an analytic test field")
    if V.n != u.n:
        raise ValueError("dimension mismatch")
    rr = np.linspace(0.0, 3.0, 7)
    if np.max(np.abs(V(rr, np.zeros_like(rr)))) > 1e-14:
        raise ValueError("test field has a nonzero trace on y = 0")
    beta, f = _gaussian_y_transform(V)
    b = order.b
    k = order.extension_order
    lad = _quad_ladder(b)
    fld = extend(u, order.s, lad, b)
    rho = u.grid.nodes
    y = lad.nodes
    j = k // 2
    e_cur = fld
    for _ in range(j):
        e_cur = delta_b_apply(e_cur, b)
    ev = e_cur.values
    vv = _v_tower_values(beta, f, u.n, j, b, rho, y)
    if k % 2 == 0:
        pair = ev * vv
        v_dens = vv * vv
    else:
        ey = y_derivative_free(e_cur).values
        fy = f.d_y()
        gauss = (2.0 * beta) ** (-u.n / 2.0) * np.exp(-(rho**2) / (4.0 * beta))
        vy = np.zeros_like(vv)
        dpow = fy
        for i in range(j + 1):
            coef = math.comb(j, i) * (-(rho**2)) ** (j - i)
            vy += coef[:, None] * dpow(np.zeros_like(y), y)[None, :]
            dpow = dpow.delta_b(b)
        vy = gauss[:, None] * vy
        rho2 = (rho**2)[:, None]
        pair = rho2 * ev * vv + ey * vy
        v_dens = rho2 * vv * vv + vy * vy
    w = u.grid.radial_weights()
    pairing = 2.0 * float(w @ (pair @ lad.weights))
    e_v = 2.0 * float(w @ (v_dens @ lad.weights))
    e_e = weighted_energy(fld, k, b)
    return abs(pairing) / math.sqrt(e_e * e_v)


def ibp_normal_flux(u: RadialSpectralFunction, order: FractionalOrder, m: int, y) -> np.ndarray:
    """Per-mode ``sup_rho |y^b d_y Delta_b^(m-1) E|`` at each height, divided by
    the mode scale ``sup_rho rho^(2m-1-b) |u^|``."""
    if not 1 <= m <= (1 + order.int_part) / 2.0:
        raise OrderError(f"need 1 <= m <= (1+[s])/2, got m={m}")
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(ys <= 0):
        raise ValueError("heights must be positive")
    b = order.b
    form = BesselForm.multiplier(order.s)
    for _ in range(m - 1):
        form = form.delta_b(b)
    d1 = form.derivative()
    rho = u.grid.nodes
    t = rho[:, None] * ys[None, :]
    amp = np.abs(u.values) * rho ** (2 * (m - 1) + 1)
    flux = ys[None, :] ** b * amp[:, None] * np.abs(d1(t))
    scale = float(np.max(rho ** (2 * m - 1 - b) * np.abs(u.values)))
    return np.max(flux, axis=0) / scale


def ibp_checks(which: str, **inputs):
    """Dispatch to ``ibp_step1``, ``ibp_orthogonality`` or ``ibp_normal_flux``."""
    table = {"step1": ibp_step1, "orthogonality": ibp_orthogonality,
             "normal_flux": ibp_normal_flux}
    if which not in table:
        raise ValueError(f"unknown check {which!r}; expected one of {sorted(table)}")
    return table[which](**inputs)


# ---------------------------------------------------------------------------
# boundedness of the extension in the weighted space


def _radial_inverse_matrix(n: int, rho: np.ndarray, r: np.ndarray) -> np.ndarray:
    """``Lambda(rho r) = Gamma(nu+1) (2/x)^nu J_nu(x)``, ``nu = n/2 - 1``."""
    nu = n / 2.0 - 1.0
    x = r[:, None] * rho[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        lam = gamma(nu + 1.0) * (2.0 / x) ** nu * jv(nu, x)
    return np.where(x < 1e-8, 1.0, lam)


def boundedness_ratio(u: RadialSpectralFunction, alpha: float, order: FractionalOrder, *,
                      r_max: float = 20.0, angles: int = 20, radial_order: int = 10) -> float:
    """``iint |y|^b |z|^(-2(1+[s])) E_alpha[u]^2 / int |x|^(-2s) u^2``."""
    n, s = order.n, order.s
    if u.n != n:
        raise ValueError("dimension mismatch")
    k = order.extension_order
    grid = RhoGrid.build(n, rho_min=1e-2, rho_max=_rho_cut(u), width=0.5, order=16)
    uu = u.on(grid) if u.analytic else u
    g = PolarGrid.build(n, order.b, float(k), r_max=r_max, angles=angles,
                        order=radial_order, first=1e-3, width=1.0)
    lam = _radial_inverse_matrix(n, grid.nodes, g.r)
    mult = np.asarray(multiplier(alpha, g.y[:, None] * grid.nodes[None, :]))
    pref = 2.0 ** (1.0 - n / 2.0) / gamma(n / 2.0)
    ew = pref * grid.weights * grid.nodes ** (n - 1) * uu.values
    e_vals = (lam * mult) @ ew
    num = integrate(e_vals**2, g)
    t, w = graded_rule(40.0, power=n - 1.0 - 2.0 * s, first=1e-4, ratio=2.0, knee=1.0,
                       width=0.5, order=16)
    den = sphere_area(n) * float(np.sum(w * t ** (n - 1.0 - 2.0 * s) * u.physical(t) ** 2))
    return num / den


def _rho_cut(u: RadialSpectralFunction) -> float:
    if u.family == "slater":
        return 45.0 / u.scale
    return 10.0 / u.scale


def boundedness_spread(u: RadialSpectralFunction, order: FractionalOrder, alphas=None) -> tuple[float, dict]:
    """Max/min of :func:`boundedness_ratio` over ``alphas`` (default
    ``{sigma, sigma+1, s, s+1}``)."""
    if alphas is None:
        alphas = sorted({order.frac, order.frac + 1.0, order.s, order.s + 1.0})
    ratios = {float(a): boundedness_ratio(u, a, order) for a in alphas}
    vals = np.array(list(ratios.values()))
    return float(vals.max() / vals.min()), ratios


def energy_ladder(u: RadialSpectralFunction, order: FractionalOrder, ys) -> np.ndarray:
    """DtN majorants along a ladder of heights."""
    return np.array([dtn_residual_norm(u, order, float(v)) for v in ys])
