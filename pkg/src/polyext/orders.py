"""Fractional-order bookkeeping and the closed-form constants.

A :class:`FractionalOrder` fixes ``(n, s)`` together with the integer part
``[s]``, the fractional part ``sigma`` and the weight exponent
``b = 1 - 2 sigma``. The functions below are the explicit constants attached
to that data: the energy constant ``d_s``, the Taylor coefficients
``kappa_{s,m}``, the Poisson normalizer ``c_{n,alpha}``, the Hardy constant
``H_{k,a,b}``, the Fourier multiplier ``m_alpha`` of the Poisson kernel and the
boundary deficits ``Phi_alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import gamma, gamma_ratio, tnu_k, tk_derivative

__all__ = [
    "OrderError",
    "FractionalOrder",
    "HardyParams",
    "make_order",
    "d_constant",
    "kappa",
    "poisson_normalizer",
    "hardy_constant",
    "extension_hardy_constant",
    "multiplier",
    "multiplier_derivative",
    "dtn_deficit",
    "sphere_area",
]


class OrderError(ValueError):
    """Invalid fractional order or inadmissible parameter set."""


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere in R^n, ``2 pi^(n/2) / Gamma(n/2)``."""
    return 2.0 * math.pi ** (n / 2.0) / gamma(n / 2.0)


@dataclass(frozen=True)
class FractionalOrder:
    n: int
    s: float
    int_part: int = field(init=False)
    frac: float = field(init=False)
    b: float = field(init=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise OrderError(f"dimension must be a positive integer, got {self.n}")
        if not self.s > 0:
            raise OrderError(f"order must be positive, got s={self.s}")
        if self.s == math.floor(self.s):
            raise OrderError(f"order must not be an integer, got s={self.s}")
        if not self.s < self.n / 2.0:
            raise OrderError(f"need s < n/2, got s={self.s}, n={self.n}")
        k = math.floor(self.s)
        object.__setattr__(self, "int_part", int(k))
        object.__setattr__(self, "frac", self.s - k)
        object.__setattr__(self, "b", 1.0 - 2.0 * (self.s - k))

    @property
    def extension_order(self) -> int:
        """Order ``1 + [s]`` of the weighted polyharmonic operator."""
        return 1 + self.int_part

    def as_dict(self) -> dict:
        return {"n": self.n, "s": self.s, "int_part": self.int_part,
                "frac": self.frac, "b": self.b}


def make_order(n: int, s: float) -> FractionalOrder:
    return FractionalOrder(int(n), float(s))


@dataclass(frozen=True)
class HardyParams:
    """Parameters ``(n, k, a, b)`` of the weighted Hardy inequality."""

    n: int
    k: int
    a: float
    b: float

    def __post_init__(self):
        if self.k < 1 or int(self.k) != self.k:
            raise OrderError(f"k must be a positive integer, got {self.k}")
        if not -1.0 < self.b < 1.0:
            raise OrderError(f"need -1 < b < 1, got b={self.b}")
        bound = (self.n + 1 + self.b) / 2.0 - self.k
        if not 0.0 <= self.a < bound:
            raise OrderError(
                f"inadmissible exponents: need 0 <= a < (n+1+b)/2 - k = {bound:g}, got a={self.a}")

    def as_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "a": self.a, "b": self.b}


def _check_noninteger(s: float) -> None:
    if not s > 0 or s == math.floor(s):
        raise OrderError(f"expected a positive non-integer order, got {s}")


def d_constant(s: float) -> float:
    """``d_s = ([s]!/Gamma(s)) * 2 Gamma(1 - sigma) / 2^(2 sigma)``.

    Depends on ``s`` only; there is no dimension argument on purpose.
    """
    s = float(s)
    _check_noninteger(s)
    k = math.floor(s)
    sigma = s - k
    return math.factorial(k) / gamma(s) * 2.0 * gamma(1.0 - sigma) / 2.0 ** (2.0 * sigma)


def _binom(m: int, l: int) -> float:
    return gamma_ratio(m + 1, l + 1) / gamma(m - l + 1)


def kappa(s: float, m: int) -> float:
    """Taylor coefficient ``kappa_{s,m}`` of the extension at ``y = 0``.

    ``kappa_{s,m} = Gamma(s+1/2)/Gamma(s) * sum_l C(m,l) (-1)^l
    Gamma(s-l)/Gamma(s+1/2-l)``, with ``kappa_{s,0} = 1``.
    """
    s = float(s)
    _check_noninteger(s)
    if m < 0 or m > math.floor(s):
        raise OrderError(f"need 0 <= m <= [s], got m={m}, s={s}")
    if m == 0:
        return 1.0
    pref = gamma_ratio(s + 0.5, s)
    total = 0.0
    for l in range(m + 1):
        total += _binom(m, l) * (-1) ** l * gamma_ratio(s - l, s + 0.5 - l)
    return pref * total


def poisson_normalizer(n: int, alpha: float) -> float:
    """``c_{n,alpha} = Gamma((n + 2 alpha)/2) / (pi^(n/2) Gamma(alpha))``."""
    if alpha <= 0:
        raise OrderError(f"alpha must be positive, got {alpha}")
    return gamma_ratio((n + 2.0 * alpha) / 2.0, alpha) / math.pi ** (n / 2.0)


def hardy_constant(p: HardyParams) -> float:
    """Hardy constant ``H_{k,a,b}`` (the inequality carries its square)."""
    q = (p.n + 1 + p.b) / 4.0
    par = p.k / 2.0 - p.k // 2
    first = gamma_ratio(q + par - p.a / 2.0, q + par + p.a / 2.0)
    second = gamma_ratio(q + p.k / 2.0 + p.a / 2.0, q - p.k / 2.0 - p.a / 2.0)
    return 2.0 ** p.k * first * second


def extension_hardy_constant(order: FractionalOrder) -> float:
    """Constant of the extension Hardy inequality in the ``(n, s)`` variables.

    ``2^(2(1+[s])) Gamma((n-2s)/4 + 1 + [s])^2 / Gamma((n-2s)/4)^2``; equals
    ``hardy_constant(n, 1+[s], 0, b)**2``.
    """
    q = (order.n - 2.0 * order.s) / 4.0
    k = order.extension_order
    return 2.0 ** (2 * k) * gamma_ratio(q + k, q) ** 2


def _multiplier_norm(alpha: float) -> float:
    return 2.0 ** (1.0 - alpha) / gamma(alpha)


def multiplier(alpha: float, t):
    """Fourier multiplier ``m_alpha(t) = 2^(1-alpha)/Gamma(alpha) t^alpha K_alpha(t)``.

    ``m_alpha(0) = 1`` exactly; values lie in ``(0, 1]`` and decrease in t.
    """
    if alpha <= 0:
        raise OrderError(f"alpha must be positive, got {alpha}")
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise ValueError("multiplier needs t >= 0")
    out = np.ones_like(np.atleast_1d(arr))
    flat = np.atleast_1d(arr)
    pos = flat > 0
    if np.any(pos):
        out[pos] = _multiplier_norm(alpha) * tnu_k(alpha, flat[pos])
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def multiplier_derivative(alpha: float, t):
    """``m_alpha'(t) = -2^(1-alpha)/Gamma(alpha) t^alpha K_{alpha-1}(t)`` (t > 0)."""
    return _multiplier_norm(alpha) * np.asarray(tk_derivative(alpha, t))


def dtn_deficit(alpha: float, t, kind: str = "neumann"):
    """Deficit multiplier ``Phi_alpha(t)``.

    ``kind="neumann"``: ``1 - 2^alpha/Gamma(1-alpha) t^(1-alpha) K_{1-alpha}(t)``
    for ``alpha in (0, 1)``; ``kind="dirichlet"``: ``1 - m_alpha(t)``.
    Both vanish at ``t = 0`` and tend to 1 as ``t -> infinity``.
    """
    arr = np.asarray(t, dtype=float)
    if kind == "dirichlet":
        out = 1.0 - np.asarray(multiplier(alpha, arr))
    elif kind == "neumann":
        if not 0.0 < alpha < 1.0:
            raise OrderError(f"neumann deficit needs alpha in (0, 1), got {alpha}")
        # 2^alpha / Gamma(1-alpha) t^(1-alpha) K_{1-alpha} is m_{1-alpha}(t)
        out = 1.0 - np.asarray(multiplier(1.0 - alpha, arr))
    else:
        raise ValueError(f"unknown deficit kind {kind!r}")
    return float(out) if arr.ndim == 0 else out
