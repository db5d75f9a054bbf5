"""Exact symbolic calculus for x-radial fields in ``(w, y)`` coordinates.

A :class:`TermExpr` is a finite sum

    sum_k c_k * w^e_k * y^a_k * R^(-q_k) * exp(-beta w - gamma y^2),

with ``w = |x|^2`` and ``R = |x|^2 + y^2``. The class is closed under
``d/dw``, ``d/dy``, the radial Laplacian ``Delta_x = 4 w d_w^2 + 2 n d_w``
and the weighted operator ``Delta_b = Delta_x + d_y^2 + b y^-1 d_y``. The
Poisson kernels (``beta = gamma = 0``) and the polynomial-Gaussian test
fields (no ``R`` factors) are both members, so identities can be checked
from closed-form derivatives without any differencing.
"""

from __future__ import annotations

import numpy as np

__all__ = ["TermExpr"]

_KEY_DIGITS = 12


def _key(e: float, a: float, q: float) -> tuple[float, float, float]:
    return (round(float(e), _KEY_DIGITS) + 0.0,
            round(float(a), _KEY_DIGITS) + 0.0,
            round(float(q), _KEY_DIGITS) + 0.0)


class TermExpr:
    """Sum of ``c w^e y^a R^-q`` terms times a shared Gaussian factor."""

    __slots__ = ("n", "beta", "gamma", "terms")

    def __init__(self, n: int, terms=None, beta: float = 0.0, gamma: float = 0.0):
        self.n = int(n)
        self.beta = float(beta)
        self.gamma = float(gamma)
        self.terms: dict[tuple[float, float, float], float] = {}
        for k, c in (terms or {}).items():
            self._add(k, c)

    def _add(self, k, c: float) -> None:
        if c == 0.0:
            return
        k = _key(*k)
        v = self.terms.get(k, 0.0) + c
        if v == 0.0:
            self.terms.pop(k, None)
        else:
            self.terms[k] = v

    def _empty(self) -> "TermExpr":
        return TermExpr(self.n, beta=self.beta, gamma=self.gamma)

    def _compatible(self, other: "TermExpr") -> None:
        if (self.n, self.beta, self.gamma) != (other.n, other.beta, other.gamma):
            raise ValueError("terms must share n and Gaussian exponents")

    # construction helpers
    @classmethod
    def monomial(cls, n: int, c: float = 1.0, e: float = 0.0, a: float = 0.0,
                 q: float = 0.0, beta: float = 0.0, gamma: float = 0.0) -> "TermExpr":
        return cls(n, {(e, a, q): c}, beta, gamma)

    def copy(self) -> "TermExpr":
        return TermExpr(self.n, dict(self.terms), self.beta, self.gamma)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    # linear structure
    def __add__(self, other: "TermExpr") -> "TermExpr":
        self._compatible(other)
        out = self.copy()
        for k, c in other.terms.items():
            out._add(k, c)
        return out

    def __neg__(self) -> "TermExpr":
        return self.scale(-1.0)

    def __sub__(self, other: "TermExpr") -> "TermExpr":
        return self + (-other)

    def scale(self, c: float) -> "TermExpr":
        out = self._empty()
        for k, v in self.terms.items():
            out._add(k, c * v)
        return out

    def __mul__(self, c: float) -> "TermExpr":
        return self.scale(float(c))

    __rmul__ = __mul__

    def times_monomial(self, c: float = 1.0, e: float = 0.0, a: float = 0.0,
                       q: float = 0.0) -> "TermExpr":
        out = self._empty()
        for (e0, a0, q0), v in self.terms.items():
            out._add((e0 + e, a0 + a, q0 + q), c * v)
        return out

    # calculus
    def d_w(self) -> "TermExpr":
        out = self._empty()
        for (e, a, q), c in self.terms.items():
            out._add((e - 1.0, a, q), c * e)
            out._add((e, a, q + 1.0), -c * q)
            out._add((e, a, q), -c * self.beta)
        return out

    def d_y(self) -> "TermExpr":
        out = self._empty()
        for (e, a, q), c in self.terms.items():
            out._add((e, a - 1.0, q), c * a)
            out._add((e, a + 1.0, q + 1.0), -2.0 * c * q)
            out._add((e, a + 1.0, q), -2.0 * c * self.gamma)
        return out

    def y_inv_d_y(self) -> "TermExpr":
        return self.d_y().times_monomial(a=-1.0)

    def lap_x(self) -> "TermExpr":
        fw = self.d_w()
        return fw.d_w().times_monomial(4.0, e=1.0) + fw.scale(2.0 * self.n)

    def delta_b(self, b: float) -> "TermExpr":
        fy = self.d_y()
        out = self.lap_x() + fy.d_y()
        if b != 0.0:
            out = out + fy.times_monomial(b, a=-1.0)
        return out

    def delta_b_power(self, b: float, m: int) -> "TermExpr":
        out = self
        for _ in range(m):
            out = out.delta_b(b)
        return out

    # evaluation
    def __call__(self, r, y) -> np.ndarray:
        """Evaluate at physical coordinates ``(r, y)`` (broadcasting)."""
        r = np.asarray(r, dtype=float)
        return self.evaluate(r * r, y)

    def evaluate(self, w, y) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        y = np.asarray(y, dtype=float)
        w, y = np.broadcast_arrays(w, y)
        big_r = w + y * y
        total = np.zeros(w.shape)
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = {}
            for (e, a, q), c in self.terms.items():
                val = np.full(w.shape, c)
                if e != 0.0:
                    val = val * _power(w, e, logs, "w")
                if a != 0.0:
                    val = val * _power(y, a, logs, "y")
                if q != 0.0:
                    val = val * _power(big_r, -q, logs, "R")
                total = total + val
        if self.beta != 0.0 or self.gamma != 0.0:
            total = total * np.exp(-self.beta * w - self.gamma * y * y)
        return total

    def grad_sq(self, r, y) -> np.ndarray:
        """``|grad_z F|^2 = 4 w F_w^2 + F_y^2`` at ``(r, y)``."""
        r = np.asarray(r, dtype=float)
        w = r * r
        fw = self.d_w().evaluate(w, y)
        fy = self.d_y().evaluate(w, y)
        return 4.0 * w * fw * fw + fy * fy

    def grad_dot(self, other: "TermExpr", r, y) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        w = r * r
        return (4.0 * w * self.d_w().evaluate(w, y) * other.d_w().evaluate(w, y)
                + self.d_y().evaluate(w, y) * other.d_y().evaluate(w, y))

    def __repr__(self) -> str:
        return (f"TermExpr(n={self.n}, beta={self.beta}, gamma={self.gamma}, "
                f"terms={len(self.terms)})")


def _power(base: np.ndarray, p: float, cache: dict, tag: str) -> np.ndarray:
    if float(p).is_integer() and abs(p) <= 16:
        return base ** int(p)
    lg = cache.get(tag)
    if lg is None:
        lg = np.log(base)
        cache[tag] = lg
    return np.exp(p * lg)
