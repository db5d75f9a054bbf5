"""Quadrature rules shared by the grids and the functionals.

All rules return ``(nodes, weights)`` such that ``sum(w * f(x))`` approximates
the plain integral of ``f``; weights already contain any change-of-variable
Jacobian. Singular endpoint behaviour ``(x - a)^p`` is absorbed by mapping the
first panel through ``x = a + h v^(1/(1+p))``, which turns the leading power
into a constant.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

__all__ = [
    "IntegrabilityError",
    "gauss_legendre",
    "panel_rule",
    "endpoint_panel",
    "graded_edges",
    "graded_rule",
    "jacobi_rule",
    "wynn_epsilon",
]


class IntegrabilityError(ValueError):
    """The requested weight is not integrable at the endpoint."""


@lru_cache(maxsize=None)
def _gl_unit(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(order)
    # map to [0, 1]
    return 0.5 * (x + 1.0), 0.5 * w


def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on ``[0, 1]``."""
    x, w = _gl_unit(int(order))
    return x.copy(), w.copy()


def panel_rule(edges, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on consecutive panels ``edges``."""
    e = np.asarray(edges, dtype=float)
    if e.ndim != 1 or e.size < 2 or np.any(np.diff(e) <= 0):
        raise ValueError("panel edges must be strictly increasing")
    u, v = _gl_unit(order)
    h = np.diff(e)
    x = (e[:-1, None] + h[:, None] * u[None, :]).ravel()
    w = (h[:, None] * v[None, :]).ravel()
    return x, w


def endpoint_panel(a: float, h: float, power: float = 0.0,
                   order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Rule on ``[a, a+h]`` for integrands behaving like ``(x-a)^power``."""
    if not power > -1.0:
        raise IntegrabilityError(f"(x-a)^{power} is not integrable at x=a")
    u, v = _gl_unit(order)
    if float(power).is_integer():
        # x^p is already polynomial; a substitution would only spoil smoothness
        return a + h * u, h * v
    g = 1.0 / (1.0 + power)
    x = a + h * u**g
    w = h * g * u ** (g - 1.0) * v
    return x, w


def graded_edges(upper: float, *, lower: float = 0.0, first: float = 1e-6,
                 ratio: float = 2.0, knee: float = 1.0,
                 width: float = 1.0) -> np.ndarray:
    """Panel edges: one panel ``[lower, lower+first]``, geometric growth by
    ``ratio`` up to ``lower+knee``, then uniform panels of ``width``."""
    if upper <= lower:
        raise ValueError("need upper > lower")
    span = upper - lower
    first = min(first, span)
    knee = min(max(knee, first), span)
    rel = [0.0, first]
    while rel[-1] * ratio < knee * (1.0 - 1e-12):
        rel.append(rel[-1] * ratio)
    if rel[-1] < knee:
        rel.append(knee)
    if knee < span:
        count = max(1, int(np.ceil((span - knee) / width - 1e-12)))
        rel.extend(np.linspace(knee, span, count + 1)[1:])
    return lower + np.asarray(rel)


def graded_rule(upper: float, *, lower: float = 0.0, power: float = 0.0,
                first: float = 1e-6, ratio: float = 2.0, knee: float = 1.0,
                width: float = 1.0, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Graded composite rule on ``[lower, upper]`` with an endpoint power."""
    edges = graded_edges(upper, lower=lower, first=first, ratio=ratio,
                         knee=knee, width=width)
    x0, w0 = endpoint_panel(edges[0], edges[1] - edges[0], power, order)
    if edges.size == 2:
        return x0, w0
    x1, w1 = panel_rule(edges[1:], order)
    return np.concatenate([x0, x1]), np.concatenate([w0, w1])


@lru_cache(maxsize=None)
def _jacobi(order: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    return roots_jacobi(order, a, b)


def jacobi_rule(order: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Jacobi rule for ``int_{-1}^{1} (1-x)^a (1+x)^b f(x) dx``."""
    if not (a > -1.0 and b > -1.0):
        raise IntegrabilityError(f"Jacobi exponents must exceed -1, got ({a}, {b})")
    x, w = _jacobi(int(order), float(a), float(b))
    return x.copy(), w.copy()


def wynn_epsilon(partial_sums) -> tuple[float, float]:
    """Accelerate a sequence of partial sums with Wynn's epsilon algorithm.

    Returns the best even-column estimate together with the difference to its
    neighbour, used as an error indicator.
    """
    s = np.asarray(partial_sums, dtype=float)
    if s.size < 3:
        return float(s[-1]), float("inf") if s.size < 2 else abs(s[-1] - s[-2])
    best, err = s[-1], abs(s[-1] - s[-2])
    prev = np.zeros(s.size + 1)
    cur = s.copy()
    k = 0
    while cur.size > 1:
        d = np.diff(cur)
        if np.any(np.abs(d) <= 1e-15 * np.abs(cur[1:]) + 1e-300):
            break
        nxt = prev[1:cur.size] + 1.0 / d
        prev, cur = cur, nxt
        k += 1
        if k % 2 == 0 and cur.size >= 2:
            e = abs(cur[-1] - cur[-2])
            if e < err:
                best, err = cur[-1], e
    return float(best), float(err)
