"""Extension operators in radial spectral form.

Per Fourier mode the extension of order ``alpha`` is
``E^(rho, y) = u^(rho) m_alpha(y rho)``, so every y-derivative and every
application of ``Delta_b`` reduces to calculus on the profile
``g(t) = m_alpha(t)``. Profiles are kept exactly as finite sums

    g(t) = sum c_{w,j} t^(alpha+j) K_{alpha-w}(t),   w in {0, 1},

which is closed under ``d/dt`` and multiplication by ``t^-1`` thanks to

    d/dt t^p K_alpha     = (p - alpha)     t^(p-1) K_alpha     - t^p K_(alpha-1)
    d/dt t^p K_(alpha-1) = (p + alpha - 1) t^(p-1) K_(alpha-1) - t^p K_alpha.

For ``t <= 1`` the sum is evaluated from its power series in ``t``, where
negative powers cancel exactly instead of numerically.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .orders import OrderError, poisson_normalizer, sphere_area
from .quadrature import graded_rule
from .radial_field import (FieldSamples, RadialSpectralFunction, TailWarning, YLadder)
from .specfun import gamma, rgamma, tnu_k

__all__ = [
    "BesselForm",
    "ModeProfile",
    "ExtensionField",
    "FiniteDifferenceWarning",
    "extend",
    "extend_axis_oracle",
    "frac_laplacian",
    "delta_b_apply",
    "y_derivative",
    "polyharm_energy_density",
    "axis_values",
]

_SERIES_T = 1.0
_SERIES_TERMS = 18


class FiniteDifferenceWarning(RuntimeWarning):
    """Finite-difference path used where it is unreliable."""


class BesselForm:
    """Finite sum ``sum c t^(alpha+j) K_(alpha-w)(t)`` keyed by ``(w, j)``."""

    __slots__ = ("alpha", "terms", "_series", "_zero")

    def __init__(self, alpha: float, terms=None):
        self.alpha = float(alpha)
        self.terms: dict[tuple[int, int], float] = {}
        self._series = None
        self._zero = None
        for k, c in (terms or {}).items():
            self._add(k, c)

    @classmethod
    def multiplier(cls, alpha: float) -> "BesselForm":
        """``m_alpha(t) = 2^(1-alpha)/Gamma(alpha) t^alpha K_alpha(t)``."""
        if not alpha > 0:
            raise OrderError(f"alpha must be positive, got {alpha}")
        out = cls(alpha, {(0, 0): 2.0 ** (1.0 - alpha) / gamma(alpha)})
        out._zero = 1.0
        return out

    def _add(self, k, c: float) -> None:
        if c == 0.0:
            return
        v = self.terms.get(k, 0.0) + c
        if v == 0.0:
            self.terms.pop(k, None)
        else:
            self.terms[k] = v

    def __add__(self, other: "BesselForm") -> "BesselForm":
        if other.alpha != self.alpha:
            raise ValueError("forms of different order")
        out = BesselForm(self.alpha, self.terms)
        for k, c in other.terms.items():
            out._add(k, c)
        return out

    def scale(self, c: float) -> "BesselForm":
        return BesselForm(self.alpha, {k: c * v for k, v in self.terms.items()})

    def __neg__(self) -> "BesselForm":
        return self.scale(-1.0)

    def __sub__(self, other: "BesselForm") -> "BesselForm":
        return self + (-other)

    def shift(self, j: int) -> "BesselForm":
        """Multiply by ``t^j``."""
        return BesselForm(self.alpha, {(w, i + j): c for (w, i), c in self.terms.items()})

    def derivative(self, times: int = 1) -> "BesselForm":
        out = self
        for _ in range(times):
            nxt = BesselForm(self.alpha)
            a = self.alpha
            for (w, j), c in out.terms.items():
                if w == 0:
                    nxt._add((0, j - 1), c * j)
                    nxt._add((1, j), -c)
                else:
                    nxt._add((1, j - 1), c * (2.0 * a - 1.0 + j))
                    nxt._add((0, j), -c)
            out = nxt
        return out

    def delta_b(self, b: float) -> "BesselForm":
        """``L_b g = g'' + (b/t) g' - g`` (the per-mode ``Delta_b / rho^2``)."""
        d1 = self.derivative()
        out = d1.derivative() - self
        if b != 0.0:
            out = out + d1.shift(-1).scale(b)
        return out

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # evaluation -----------------------------------------------------------

    def _direct(self, t: np.ndarray) -> np.ndarray:
        a = self.alpha
        out = np.zeros_like(t)
        base0 = base1 = None
        for (w, j), c in self.terms.items():
            if w == 0:
                if base0 is None:
                    base0 = tnu_k(a, t)
                out += c * t ** float(j) * base0
            else:
                if base1 is None:
                    base1 = tnu_k(abs(a - 1.0), t)
                p = j + 1.0 if a >= 1.0 else j + 2.0 * a - 1.0
                out += c * t**p * base1
        return out

    def series(self) -> dict[float, float]:
        """Power series ``{exponent: coefficient}`` of the form about t = 0.

        Coefficients of negative powers that cancel to rounding level are set
        to zero exactly. Only available for non-integer ``alpha``.
        """
        if self._series is not None:
            return self._series
        a = self.alpha
        if a == math.floor(a):
            raise ValueError("series expansion needs a non-integer order")
        acc: dict[float, float] = {}
        mag: dict[float, float] = {}

        def put(e: float, v: float) -> None:
            # exponents are integers or 2 alpha + integer; rebuild them exactly
            if abs(e - round(e)) < 1e-9:
                e = float(round(e))
            else:
                e = 2.0 * a + round(e - 2.0 * a)
            acc[e] = acc.get(e, 0.0) + v
            mag[e] = mag.get(e, 0.0) + abs(v)

        for (w, j), c in self.terms.items():
            nu = abs(a - w)
            pref = 0.5 * gamma(nu) * gamma(1.0 - nu)
            p = a + j
            for k in range(_SERIES_TERMS):
                fk = math.factorial(k)
                put(p - nu + 2 * k, c * pref * 2.0 ** (nu - 2 * k) * rgamma(k - nu + 1.0) / fk)
                put(p + nu + 2 * k, -c * pref * 2.0 ** (-nu - 2 * k) * rgamma(k + nu + 1.0) / fk)
        out = {}
        for e, v in acc.items():
            if e < 0 and abs(v) <= 1e-12 * mag[e]:
                continue
            if v != 0.0:
                out[e] = v
        self._series = out
        return out

    def _integer_series(self):
        """``({e: c}, {e: c_log})`` with ``sum (c + c_log log t) t^e``, integer order."""
        if self._series is not None:
            return self._series
        poly: dict[int, float] = {}
        logs: dict[int, float] = {}
        mag: dict[int, float] = {}

        def put(table, e, v):
            table[e] = table.get(e, 0.0) + v
            mag[e] = mag.get(e, 0.0) + abs(v)

        psi = [-np.euler_gamma]
        for i in range(1, 2 * _SERIES_TERMS + 40):
            psi.append(psi[-1] + 1.0 / i)

        # K_nu, integer nu: Laurent part, log(t/2) I_nu part and digamma part
        for (w, j), c in self.terms.items():
            nu = int(round(abs(self.alpha - w)))
            p = int(round(self.alpha)) + j
            for k in range(nu):
                v = 0.5 * (-1) ** k * math.factorial(nu - k - 1) / math.factorial(k)
                put(poly, p + 2 * k - nu, c * v * 2.0 ** (nu - 2 * k))
            sgn = (-1) ** (nu + 1)
            for k in range(_SERIES_TERMS):
                e = p + nu + 2 * k
                base = 2.0 ** (-nu - 2 * k) / (math.factorial(k) * math.factorial(nu + k))
                put(logs, e, c * sgn * base)
                put(poly, e, -c * sgn * base * math.log(2.0))
                put(poly, e, -c * sgn * 0.5 * (psi[k] + psi[nu + k]) * base)
        for table in (poly, logs):
            for e in list(table):
                if abs(table[e]) <= 1e-12 * mag[e] and e <= 0:
                    table[e] = 0.0
        self._series = (poly, logs)
        return self._series

    def _integer_limit(self) -> float:
        poly, logs = self._integer_series()
        for e in sorted(set(poly) | set(logs)):
            if e > 0:
                break
            if logs.get(e, 0.0) != 0.0:
                return math.copysign(math.inf, -logs[e])
            if e < 0 and poly.get(e, 0.0) != 0.0:
                return math.copysign(math.inf, poly[e])
        return poly.get(0, 0.0)

    def limit_at_zero(self) -> float:
        """Value at ``t = 0`` (``inf`` when a negative power survives)."""
        if self._zero is not None:
            return self._zero
        if self.alpha == math.floor(self.alpha):
            return self._integer_limit()
        ser = self.series()
        for e, v in ser.items():
            if e < 0:
                return math.copysign(math.inf, v)
        return ser.get(0.0, 0.0)

    def _series_eval(self, t: np.ndarray) -> np.ndarray:
        out = np.zeros_like(t)
        if self.alpha == math.floor(self.alpha):
            poly, logs = self._integer_series()
            lt = np.log(t)
            for e in sorted(set(poly) | set(logs), reverse=True):
                out += (poly.get(e, 0.0) + logs.get(e, 0.0) * lt) * t ** float(e)
            return out
        ser = self.series()
        with np.errstate(divide="ignore"):
            for e, v in sorted(ser.items(), key=lambda kv: -kv[0]):
                out += v * t**e
        return out

    def __call__(self, t) -> np.ndarray:
        arr = np.asarray(t, dtype=float)
        flat = np.atleast_1d(arr).ravel()
        out = np.zeros_like(flat)
        if np.any(flat < 0):
            raise ValueError("profile argument must be nonnegative")
        if self.terms:
            zero = flat == 0.0
            if np.any(zero):
                out[zero] = self.limit_at_zero()
            small = (flat > 0) & (flat <= _SERIES_T)
            big = ~zero & ~small
            if np.any(small):
                out[small] = self._series_eval(flat[small])
            if np.any(big):
                out[big] = self._direct(flat[big])
        out = out.reshape(arr.shape) if arr.ndim else out
        return float(out[0]) if arr.ndim == 0 else out

    def __repr__(self) -> str:
        return f"BesselForm(alpha={self.alpha}, terms={len(self.terms)})"


@dataclass(frozen=True)
class ModeProfile:
    """One Fourier mode: ``g(y) = m_alpha(y rho)`` with exact derivatives."""

    alpha: float
    rho: float

    @cached_property
    def form(self) -> BesselForm:
        return BesselForm.multiplier(self.alpha)

    def __call__(self, y) -> np.ndarray:
        return self.form(np.abs(np.asarray(y, dtype=float)) * self.rho)

    def derivative(self, y, j: int = 1) -> np.ndarray:
        """``d^j/dy^j m_alpha(y rho) = rho^j m_alpha^(j)(y rho)`` for y >= 0."""
        return self.rho**j * self.form.derivative(j)(np.asarray(y, dtype=float) * self.rho)


# ---------------------------------------------------------------------------
# extension fields


def _default_b(alpha: float) -> float:
    frac = alpha - math.floor(alpha)
    return 1.0 - 2.0 * frac if frac > 0 else 0.0


@dataclass(frozen=True)
class ExtensionField:
    """Per-mode samples ``E^(rho_i, y_j)`` on grid x ladder.

    Analytic fields store ``u^``, a power ``rho^q`` and a :class:`BesselForm`
    ``g`` with ``E^ = u^(rho) rho^q g(y rho)``; fields produced by finite
    differences store explicit samples instead (``form is None``).
    """

    u: RadialSpectralFunction
    alpha: float
    ladder: YLadder
    form: BesselForm | None = None
    rho_power: float = 0.0
    samples: np.ndarray | None = field(default=None, repr=False)
    b: float = 0.0
    label: str = "E"

    @property
    def n(self) -> int:
        return self.u.n

    @property
    def rho(self) -> np.ndarray:
        return self.u.grid.nodes

    @property
    def y(self) -> np.ndarray:
        return self.ladder.values

    @property
    def analytic(self) -> bool:
        return self.form is not None

    @cached_property
    def values(self) -> np.ndarray:
        if self.samples is not None:
            return self.samples
        rho = self.rho
        t = rho[:, None] * self.y[None, :]
        amp = self.u.values * rho**self.rho_power
        return amp[:, None] * self.form(t)

    def profile_values(self, y) -> np.ndarray:
        """Analytic samples at heights ``y`` outside the ladder."""
        if self.form is None:
            raise ValueError("explicit-sample field has no analytic profile")
        y = np.atleast_1d(np.asarray(y, dtype=float))
        rho = self.rho
        amp = self.u.values * rho**self.rho_power
        return amp[:, None] * self.form(rho[:, None] * y[None, :])

    def with_form(self, form: BesselForm, extra_power: float, label: str) -> "ExtensionField":
        return ExtensionField(self.u, self.alpha, self.ladder, form,
                              self.rho_power + extra_power, None, self.b, label)

    def with_samples(self, samples: np.ndarray, label: str) -> "ExtensionField":
        return ExtensionField(self.u, self.alpha, self.ladder, None, self.rho_power,
                              samples, self.b, label)

    def to_samples(self) -> FieldSamples:
        return FieldSamples("spectral", self.n, self.alpha, self.b,
                            self.rho.copy(), self.y.copy(), np.asarray(self.values))


def extend(u: RadialSpectralFunction, alpha: float, ladder: YLadder,
           b: float | None = None) -> ExtensionField:
    """Spectral extension ``E^(rho, y) = u^(rho) m_alpha(y rho)``."""
    if not alpha > 0:
        raise OrderError(f"alpha must be positive, got {alpha}")
    bb = _default_b(alpha) if b is None else float(b)
    return ExtensionField(u, float(alpha), ladder, BesselForm.multiplier(alpha),
                          0.0, None, bb, f"E_{alpha:g}")


def axis_values(fld: ExtensionField) -> np.ndarray:
    """``E(0, y_j) = (2 pi)^(-n/2) omega_{n-1} int E^(rho, y_j) rho^(n-1) d rho``."""
    g = fld.u.grid
    return (2.0 * math.pi) ** (-g.n / 2.0) * (g.radial_weights() @ fld.values)


def extend_axis_oracle(u: Callable, n: int, alpha: float, y: float, *,
                       order: int = 24) -> float:
    """Axis value ``E_alpha[u](0, y)`` by direct 1-D quadrature of the kernel.

    With ``r = y cot(phi)`` the convolution at ``x = 0`` becomes
    ``c_{n,alpha} omega_{n-1} int_0^(pi/2) u(y cot phi) cos^(n-1) phi
    sin^(2 alpha - 1) phi d phi``; panels are graded toward ``phi = 0``.
    """
    if not y > 0:
        raise ValueError("axis oracle needs y > 0")
    c = poisson_normalizer(n, alpha) * sphere_area(n)

    def run(first: float, ratio: float, k: int) -> float:
        phi, w = graded_rule(math.pi / 2.0, power=2.0 * alpha - 1.0, first=first,
                             ratio=ratio, knee=math.pi / 2.0, order=k)
        with np.errstate(over="ignore"):
            vals = np.asarray(u(y / np.tan(phi)), dtype=float)
        vals = np.where(np.isfinite(vals), vals, 0.0)
        return c * float(np.sum(w * vals * np.cos(phi) ** (n - 1) * np.sin(phi) ** (2.0 * alpha - 1.0)))

    first = min(y, 1.0) * 1e-6
    coarse = run(first, 1.5, order)
    fine = run(first / 4.0, 1.25, order + 8)
    if abs(fine - coarse) > 1e-9 * max(abs(fine), 1e-300):
        warnings.warn(f"axis quadrature unsettled at y={y}: {coarse!r} vs {fine!r}",
                      TailWarning, stacklevel=2)
    return fine


def frac_laplacian(u: RadialSpectralFunction, t: float) -> RadialSpectralFunction:
    """Multiplier ``|xi|^t`` (``t = 2s`` for ``(-Delta)^s``)."""
    if not t > 0:
        raise ValueError("exponent must be positive")
    rho = u.grid.nodes
    return RadialSpectralFunction(u.grid, rho**t * u.values, "custom", 0, 1.0, 1.0)


# ---------------------------------------------------------------------------
# operators


def _fd_weights(y: np.ndarray):
    hm = y[1:-1] - y[:-2]
    hp = y[2:] - y[1:-1]
    s = hm + hp
    d1 = (-hp / (hm * s), (hp - hm) / (hm * hp), hm / (hp * s))
    d2 = (2.0 / (hm * s), -2.0 / (hm * hp), 2.0 / (hp * s))
    return d1, d2


def _fd_first(vals: np.ndarray, y: np.ndarray) -> np.ndarray:
    (a, b, c), _ = _fd_weights(y)
    out = np.full(vals.shape, np.nan)
    out[:, 1:-1] = a * vals[:, :-2] + b * vals[:, 1:-1] + c * vals[:, 2:]
    return out


def _fd_second(vals: np.ndarray, y: np.ndarray) -> np.ndarray:
    _, (a, b, c) = _fd_weights(y)
    out = np.full(vals.shape, np.nan)
    out[:, 1:-1] = a * vals[:, :-2] + b * vals[:, 1:-1] + c * vals[:, 2:]
    return out


def _check_fd_ladder(ladder: YLadder) -> None:
    y = ladder.nodes
    if y.size < 3:
        raise ValueError("finite differences need at least 3 ladder nodes")
    per_decade = (y.size - 1) / max(math.log10(y[-1] / y[0]), 1e-300)
    if per_decade < 5.0 - 1e-9:
        raise ValueError(f"finite differences need >= 5 ladder nodes per decade, "
                         f"got {per_decade:.2f}")
    if not ladder.sentinel:
        warnings.warn("finite-difference path without a y=0 sentinel: the lowest "
                      "node has no stencil", FiniteDifferenceWarning, stacklevel=3)


def delta_b_apply(fld: ExtensionField, b: float | None = None,
                  path: str = "analytic") -> ExtensionField:
    """Per-mode ``Delta_b E = (-rho^2 + d_y^2 + b y^-1 d_y) E``.

    ``analytic`` is exact (and at ``y = 0`` equals the even limit
    ``-rho^2 + (1+b) d_y^2``); ``finite_difference`` uses 3-point
    nonuniform stencils on the ladder and leaves the top node as NaN.
    """
    bb = fld.b if b is None else float(b)
    if path == "analytic":
        if fld.form is None:
            raise ValueError("analytic path needs an extension field with an exact profile")
        return fld.with_form(fld.form.delta_b(bb), 2.0, f"Delta_b {fld.label}")
    if path != "finite_difference":
        raise ValueError(f"unknown path {path!r}")
    _check_fd_ladder(fld.ladder)
    vals = np.asarray(fld.values)
    y = fld.y
    rho = fld.rho
    d2 = _fd_second(vals, y)
    d1 = _fd_first(vals, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -(rho**2)[:, None] * vals + d2 + bb * d1 / y[None, :]
    if fld.ladder.sentinel:
        # even reflection across y = 0: f''(0) ~ 2 (f(y_1) - f(0)) / y_1^2
        f0, f1, y1 = vals[:, 0], vals[:, 1], y[1]
        out[:, 0] = -rho**2 * f0 + (1.0 + bb) * 2.0 * (f1 - f0) / y1**2
    return fld.with_samples(out, f"Delta_b[fd] {fld.label}")


def y_derivative(fld: ExtensionField, j: int, path: str = "analytic") -> ExtensionField:
    """``d^j/dy^j`` of the field, per mode ``rho^j g^(j)(y rho) u^``."""
    if j < 0:
        raise ValueError("derivative order must be nonnegative")
    if path == "analytic":
        if fld.form is None:
            raise ValueError("analytic path needs an extension field with an exact profile")
        limit = 2 * math.floor(fld.alpha)
        if fld.ladder.sentinel and j > limit:
            raise OrderError(f"y-derivative of order {j} is not continuous at y=0 "
                             f"for alpha={fld.alpha} (limit {limit})")
        return fld.with_form(fld.form.derivative(j), float(j), f"d_y^{j} {fld.label}")
    if path != "finite_difference":
        raise ValueError(f"unknown path {path!r}")
    _check_fd_ladder(fld.ladder)
    out = fld
    for i in range(j):
        vals = _fd_first(np.asarray(out.values), out.y)
        if out.ladder.sentinel:
            vals[:, 0] = 0.0
        out = out.with_samples(vals, f"d_y^{i + 1}[fd] {fld.label}")
    return out


def polyharm_energy_density(fld: ExtensionField, k: int, b: float | None = None) -> np.ndarray:
    """Per-mode density of ``|grad Delta_b^k E|^2`` (the half-integer tower).

    Even ``k``: ``|Delta_b^(k/2) E|^2``; odd ``k``:
    ``rho^2 |w|^2 + |d_y w|^2`` with ``w = Delta_b^((k-1)/2) E``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    bb = fld.b if b is None else float(b)
    if fld.form is None:
        raise ValueError("energy density needs an exact profile")
    cur = fld
    for _ in range(k // 2):
        cur = delta_b_apply(cur, bb)
    if k % 2 == 0:
        v = np.asarray(cur.values)
        return v * v
    v = np.asarray(cur.values)
    dy = np.asarray(y_derivative_free(cur).values)
    rho2 = (fld.rho**2)[:, None]
    return rho2 * v * v + dy * dy


def y_derivative_free(fld: ExtensionField) -> ExtensionField:
    """First y-derivative without the continuity guard (used inside energies)."""
    return fld.with_form(fld.form.derivative(1), 1.0, f"d_y {fld.label}")
