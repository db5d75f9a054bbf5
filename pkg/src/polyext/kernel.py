"""Poisson kernels ``P^y_alpha`` and numerical checks of their identities.

``P^y_alpha(x) = c_{n,alpha} y^(2 alpha) / (|x|^2 + y^2)^((n + 2 alpha)/2)``.
Derivatives come from :class:`~polyext.terms.TermExpr`, so the identity
residuals contain no discretisation error. The Fourier check integrates the
kernel against ``cos`` (n = 1) or ``J_0`` (n = 2) between consecutive zeros
of the oscillatory factor and accelerates the partial sums.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import j0, jn_zeros

from .orders import OrderError, multiplier, poisson_normalizer, sphere_area
from .quadrature import graded_rule, panel_rule, wynn_epsilon
from .specfun import gamma_ratio
from .terms import TermExpr

__all__ = [
    "KernelPoint",
    "QuadratureWarning",
    "poisson_expr",
    "poisson_eval",
    "kernel_mass",
    "kernel_ft",
    "kernel_ft_check",
    "r1_residual",
    "R1_KINDS",
]

R1_KINDS = ("i_dy", "i_delta_b", "ii", "iii")


class QuadratureWarning(RuntimeWarning):
    """An oscillatory quadrature did not settle to the requested accuracy."""


@dataclass(frozen=True)
class KernelPoint:
    n: int
    alpha: float
    r: float
    y: float

    def __post_init__(self):
        if self.y == 0:
            raise ValueError("the kernel is defined off y = 0")
        if self.r < 0:
            raise ValueError("r = |x| must be nonnegative")
        if not self.alpha > 0:
            raise OrderError(f"alpha must be positive, got {self.alpha}")
        if int(self.n) != self.n or self.n < 1:
            raise OrderError(f"dimension must be a positive integer, got {self.n}")


def poisson_expr(n: int, alpha: float) -> TermExpr:
    """Closed form of ``P_alpha`` as a term expression in ``(r^2, y)``."""
    c = poisson_normalizer(n, alpha)
    return TermExpr.monomial(n, c, a=2.0 * alpha, q=(n + 2.0 * alpha) / 2.0)


def poisson_eval(p: KernelPoint) -> float:
    c = poisson_normalizer(p.n, p.alpha)
    y = abs(p.y)
    return c * y ** (2.0 * p.alpha) * (p.r * p.r + y * y) ** (-(p.n + 2.0 * p.alpha) / 2.0)


def kernel_mass(n: int, alpha: float, y: float = 1.0, order: int = 20) -> float:
    """``omega_{n-1} int_0^infty P^y_alpha(r) r^(n-1) dr``.

    ``[0, y]`` is integrated directly on graded panels; the tail is mapped
    to ``(0, 1]`` by ``r = y / v``, where the integrand behaves like
    ``v^(2 alpha - 1)``.
    """
    if not alpha > 0:
        raise OrderError(f"alpha must be positive, got {alpha}")
    y = abs(float(y))
    if y == 0:
        raise ValueError("the kernel is defined off y = 0")
    c = poisson_normalizer(n, alpha)
    ex = (n + 2.0 * alpha) / 2.0

    def dens(r):
        return c * y ** (2.0 * alpha) * (r * r + y * y) ** (-ex) * r ** (n - 1)

    r, w = panel_rule(np.linspace(0.0, y, 5), order)
    head = float(np.sum(w * dens(r)))
    v, wv = graded_rule(1.0, power=2.0 * alpha - 1.0, first=1e-4, ratio=2.0,
                        knee=1.0, order=order)
    tail = float(np.sum(wv * dens(y / v) * y / (v * v)))
    return sphere_area(n) * (head + tail)


def _transform_one(n: int, alpha: float, y: float, rho: float, segments: int,
                   order: int) -> tuple[float, float]:
    """Radial transform at one frequency; returns (value, error indicator)."""
    c = poisson_normalizer(n, alpha)
    ex = (n + 2.0 * alpha) / 2.0
    y2a = y ** (2.0 * alpha)
    if n == 1:
        def f(r):
            return 2.0 * c * y2a * (r * r + y * y) ** (-ex) * np.cos(rho * r)
        zeros = (np.arange(segments + 1) + 0.5) * math.pi / rho
        pref = (2.0 * math.pi) ** -0.5
    else:
        def f(r):
            return 2.0 * math.pi * c * y2a * (r * r + y * y) ** (-ex) * j0(rho * r) * r
        zeros = jn_zeros(0, segments + 1) / rho
        pref = 1.0 / (2.0 * math.pi)
    x, w = graded_rule(zeros[0], first=min(y, zeros[0]) / 8.0, ratio=1.5,
                       knee=zeros[0], order=order)
    head = float(np.sum(w * f(x)))
    x, w = panel_rule(zeros, order)
    parts = (w * f(x)).reshape(segments, order).sum(axis=1)
    sums = head + np.cumsum(parts)
    val, err = wynn_epsilon(sums[-40:])
    return pref * val, pref * err


def kernel_ft(n: int, alpha: float, rho, y: float = 1.0, *, segments: int = 80,
              order: int = 24) -> tuple[np.ndarray, np.ndarray]:
    """Unitary radial Fourier transform of ``P^y_alpha`` by direct quadrature.

    Returns ``(values, error_indicators)`` at the frequencies ``rho``.
    """
    if n not in (1, 2):
        raise ValueError("direct transform path supports n in {1, 2}")
    if not alpha > 0:
        raise OrderError(f"alpha must be positive, got {alpha}")
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(rho <= 0):
        raise ValueError("frequencies must be positive")
    out = np.empty_like(rho)
    err = np.empty_like(rho)
    for i, q in enumerate(rho):
        out[i], err[i] = _transform_one(n, alpha, abs(float(y)), float(q), segments, order)
    return out, err


def kernel_ft_check(n: int, alpha: float, rho, y: float = 1.0, *,
                    target: float = 1e-10) -> float:
    """Max of ``|FT - (2 pi)^(-n/2) m_alpha(y rho)| / (2 pi)^(-n/2)``."""
    vals, err = kernel_ft(n, alpha, rho, y)
    pref = (2.0 * math.pi) ** (-n / 2.0)
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    expected = pref * np.asarray(multiplier(alpha, abs(y) * rho))
    if np.any(err > target * pref):
        warnings.warn(f"oscillatory quadrature not converged (max indicator "
                      f"{float(np.max(err)) / pref:.2e})", QuadratureWarning, stacklevel=2)
    return float(np.max(np.abs(vals - expected)) / pref)


def r1_residual(which: str, n: int, alpha: float, b: float = 0.0, m: int = 1,
                point: tuple[float, float] = (1.0, 1.0)) -> float:
    """``|LHS - RHS|`` of one of the kernel identities at ``(r, y)``.

    ``i_dy``:      d_y P_a = 2a y^-1 (P_a - P_(a+1))
    ``i_delta_b``: Delta_b P_a = 2a(b - 1 + 2a) y^-2 (P_a - P_(a+1))
    ``ii``:        d_y P_a = y Delta_x P_(a-1) / (2(a-1)),  a > 1
    ``iii``:       Delta_b^m P_a = G Delta_x^m P_(a-m),  m < a, with
                   G = Gamma((b+1)/2 + a) Gamma(a-m) / (Gamma((b+1)/2 + a - m) Gamma(a))
    """
    r, y = float(point[0]), float(point[1])
    KernelPoint(n, alpha, abs(r), y)
    if not -1.0 < b < 1.0:
        raise OrderError(f"need -1 < b < 1, got {b}")
    y = abs(y)
    a = float(alpha)
    pa = poisson_expr(n, a)
    if which == "i_dy":
        lhs = pa.d_y()
        rhs = (pa - poisson_expr(n, a + 1.0)).times_monomial(2.0 * a, a=-1.0)
    elif which == "i_delta_b":
        lhs = pa.delta_b(b)
        rhs = (pa - poisson_expr(n, a + 1.0)).times_monomial(2.0 * a * (b - 1.0 + 2.0 * a), a=-2.0)
    elif which == "ii":
        if not a > 1.0:
            raise OrderError("identity ii needs alpha > 1")
        lhs = pa.d_y()
        rhs = poisson_expr(n, a - 1.0).lap_x().times_monomial(1.0 / (2.0 * (a - 1.0)), a=1.0)
    elif which == "iii":
        if int(m) != m or m < 1 or not m < a:
            raise OrderError("identity iii needs an integer 1 <= m < alpha")
        h = (b + 1.0) / 2.0
        ratio = gamma_ratio(h + a, h + a - m) * gamma_ratio(a - m, a)
        lhs = pa.delta_b_power(b, int(m))
        rhs = poisson_expr(n, a - m)
        for _ in range(int(m)):
            rhs = rhs.lap_x()
        rhs = rhs.scale(ratio)
    else:
        raise ValueError(f"unknown identity {which!r}; expected one of {R1_KINDS}")
    return float(abs(lhs(r, y) - rhs(r, y)))
