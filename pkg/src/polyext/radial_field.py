"""Radial Fourier grids, y-ladders, test functions and field I/O.

For x-radial data every quantity reduces to the radial frequency ``rho`` and
the extension variable ``y``; the dimension ``n`` only enters through the
measure ``omega_{n-1} rho^(n-1) d rho``. Fourier transforms follow the
unitary convention ``u^(xi) = (2 pi)^(-n/2) int e^(-i x.xi) u(x) dx``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .orders import poisson_normalizer, sphere_area
from .quadrature import IntegrabilityError, graded_rule, jacobi_rule
from .terms import TermExpr

__all__ = [
    "FieldFormatError",
    "TailWarning",
    "RhoGrid",
    "YLadder",
    "PolarGrid",
    "RadialSpectralFunction",
    "PhysicalField",
    "FieldSamples",
    "make_test_function",
    "eval_physical_origin",
    "integrate",
    "dump_field",
    "load_field",
    "FIELD_VERSION",
]

FIELD_VERSION = "v1"


class FieldFormatError(ValueError):
    """Malformed or incompatible field file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.reason = message
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class TailWarning(RuntimeWarning):
    """The integrand has not decayed at the end of the grid."""


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class RhoGrid:
    """Quadrature rule for ``int_0^infty f(rho) d rho``.

    The first panel is ``[0, rho_min]``; panels then grow geometrically up
    to ``knee`` and are uniform of size ``width`` up to ``rho_max``. All nodes
    are strictly positive.
    """

    n: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    rho_min: float = 1e-4
    rho_max: float = 40.0
    order: int = 16
    ratio: float = 2.0
    width: float = 1.0

    @classmethod
    def build(cls, n: int, *, rho_min: float = 1e-4, rho_max: float = 40.0,
              order: int = 16, ratio: float = 2.0, width: float = 1.0) -> "RhoGrid":
        x, w = graded_rule(rho_max, first=rho_min, ratio=ratio, knee=1.0,
                           width=width, order=order)
        return cls(int(n), x, w, rho_min, rho_max, order, ratio, width)

    def refined(self) -> "RhoGrid":
        """Grid with every panel halved (twice the nodes)."""
        return RhoGrid.build(self.n, rho_min=self.rho_min / 2.0, rho_max=self.rho_max,
                             order=self.order, ratio=math.sqrt(self.ratio),
                             width=self.width / 2.0)

    @property
    def surface(self) -> float:
        return sphere_area(self.n)

    def __len__(self) -> int:
        return self.nodes.size

    def radial_weights(self, power: float = 0.0) -> np.ndarray:
        """Weights of ``omega_{n-1} int f rho^(n-1+power) d rho``."""
        return self.surface * self.weights * self.nodes ** (self.n - 1 + power)


@dataclass(frozen=True)
class YLadder:
    """Heights ``0 < y_1 < ... < y_J`` with an optional ``y = 0`` sentinel.

    Geometric ladders (``ratio`` set) serve limit studies. Quadrature ladders
    additionally carry weights for ``int_0^y_max y^b f(y) dy`` and have
    ``ratio = None``.
    """

    nodes: np.ndarray = field(repr=False)
    ratio: float | None = None
    sentinel: bool = False
    weights: np.ndarray | None = field(default=None, repr=False)
    b: float | None = None

    @classmethod
    def geometric(cls, y_min: float = 1e-4, y_max: float = 20.0, count: int = 60,
                  sentinel: bool = False) -> "YLadder":
        if not 0 < y_min < y_max or count < 2:
            raise ValueError("need 0 < y_min < y_max and count >= 2")
        nodes = np.geomspace(y_min, y_max, count)
        ratio = (y_max / y_min) ** (1.0 / (count - 1))
        return cls(nodes, ratio, sentinel)

    @classmethod
    def halving(cls, y_start: float, steps: int, sentinel: bool = False) -> "YLadder":
        """``y_start * 2^-j`` for ``j = 0..steps`` in increasing order."""
        nodes = y_start * 2.0 ** -np.arange(steps, -1, -1, dtype=float)
        return cls(nodes, 2.0, sentinel)

    @classmethod
    def points(cls, values, sentinel: bool = False) -> "YLadder":
        nodes = np.asarray(sorted(float(v) for v in values if v > 0), dtype=float)
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("ladder heights must be distinct")
        return cls(nodes, None, sentinel or any(v == 0 for v in values))

    @classmethod
    def quadrature(cls, b: float = 0.0, *, y_max: float = 1e6, y_min: float = 1e-8,
                   ratio: float = 2.0, order: int = 16, knee: float | None = None,
                   width: float = 1.0) -> "YLadder":
        """Rule for ``int_0^y_max y^b f(y) dy``; ``y^b`` is absorbed exactly
        on the first panel and carried in the weights elsewhere."""
        if not b > -1.0:
            raise IntegrabilityError(f"y^{b} is not integrable at y=0")
        knee = y_max if knee is None else knee
        x, w = graded_rule(y_max, first=min(y_min, y_max), ratio=ratio, knee=knee,
                           width=width, order=order, power=b)
        return cls(x, None, False, w * x**b, float(b))

    @property
    def values(self) -> np.ndarray:
        """Heights including the sentinel ``0`` when present."""
        if self.sentinel:
            return np.concatenate([[0.0], self.nodes])
        return self.nodes

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class PolarGrid:
    """Rule for ``iint_{R^(n+1)} |y|^b (r^2 + y^2)^(-q) F(|x|, |y|) dz``.

    Uses ``r = R cos(theta)``, ``|y| = R sin(theta)``. The angular factor
    ``cos^(n-1) sin^b`` becomes a Gauss-Jacobi weight in ``cos(2 theta)``;
    the radial factor ``R^(n+b-2q)`` is absorbed on the first radial panel.
    ``weights`` include ``2 omega_{n-1}`` (both signs of y) and the full weight.
    """

    n: int
    b: float
    q: float
    r: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    radius: np.ndarray = field(repr=False)
    r_max: float = 12.0

    @classmethod
    def build(cls, n: int, b: float = 0.0, q: float = 0.0, *, r_max: float = 12.0,
              angles: int = 32, order: int = 16, first: float = 1e-4,
              width: float = 0.5) -> "PolarGrid":
        power = n + b - 2.0 * q
        if not power > -1.0:
            raise IntegrabilityError(
                f"|z|^(-2q) |y|^b is not integrable at the origin (n={n}, b={b}, q={q})")
        if not -1.0 < b < 1.0:
            raise IntegrabilityError(f"need -1 < b < 1, got {b}")
        xs, wx = jacobi_rule(angles, (b - 1.0) / 2.0, (n - 2.0) / 2.0)
        cos_t = np.sqrt((1.0 + xs) / 2.0)
        sin_t = np.sqrt((1.0 - xs) / 2.0)
        wx = wx * 2.0 ** (-(n + b + 1.0) / 2.0)
        rad, wr = graded_rule(r_max, power=power, first=first, ratio=2.0, knee=1.0,
                              width=width, order=order)
        wr = wr * rad**power
        big_r = rad[:, None] * np.ones_like(xs)[None, :]
        w = 2.0 * sphere_area(n) * wr[:, None] * wx[None, :]
        return cls(int(n), float(b), float(q), (rad[:, None] * cos_t[None, :]).ravel(),
                   (rad[:, None] * sin_t[None, :]).ravel(), w.ravel(), big_r.ravel(),
                   float(r_max))

    def __len__(self) -> int:
        return self.weights.size

    def outer_fraction(self, values) -> float:
        """Share of ``sum |w f|`` carried by the eight outermost radii."""
        v = np.abs(self.weights * np.asarray(values, dtype=float))
        total = float(np.sum(v))
        if total == 0.0:
            return 0.0
        cut = np.unique(self.radius)[-8]
        return float(np.sum(v[self.radius >= cut])) / total


# ---------------------------------------------------------------------------
# test functions

_FAMILIES = ("gaussian", "poly_gaussian", "slater")


@dataclass(frozen=True)
class RadialSpectralFunction:
    """Radial spectral data ``u^(rho)`` sampled on a :class:`RhoGrid`.

    ``family`` is one of ``gaussian``, ``poly_gaussian``, ``slater`` (with
    exact analytic profile) or ``custom`` (samples only). ``scale`` applies
    ``u(x) -> u(x/scale)``, i.e. ``u^(rho) -> scale^n u^(scale rho)``.
    """

    grid: RhoGrid
    values: np.ndarray = field(repr=False)
    family: str = "custom"
    j: int = 0
    scale: float = 1.0
    amplitude: float = 1.0

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def analytic(self) -> bool:
        return self.family in _FAMILIES

    @property
    def tag(self) -> str:
        base = f"poly_gaussian({self.j})" if self.family == "poly_gaussian" else self.family
        return base if self.scale == 1.0 else f"{base}[scale={self.scale:g}]"

    def params(self) -> dict:
        return {"family": self.family, "j": self.j, "scale": self.scale,
                "amplitude": self.amplitude}

    def profile(self, rho) -> np.ndarray:
        """Exact ``u^(rho)`` at arbitrary frequencies (analytic families)."""
        if not self.analytic:
            raise ValueError("custom spectral data has no analytic profile")
        lam = self.scale
        x = lam * np.asarray(rho, dtype=float)
        if self.family == "gaussian":
            base = np.exp(-0.5 * x * x)
        elif self.family == "poly_gaussian":
            base = x ** (2 * self.j) * np.exp(-x * x)
        else:
            base = np.exp(-x)
        return self.amplitude * lam**self.n * base

    def on(self, grid: RhoGrid) -> "RadialSpectralFunction":
        """Resample the analytic profile on another grid."""
        if grid.n != self.n:
            raise ValueError("grid dimension mismatch")
        return RadialSpectralFunction(grid, self.profile(grid.nodes), self.family,
                                      self.j, self.scale, self.amplitude)

    def rescaled(self, lam: float) -> "RadialSpectralFunction":
        out = RadialSpectralFunction(self.grid, self.values, self.family, self.j,
                                     self.scale * lam, self.amplitude)
        if self.analytic:
            return out.on(self.grid)
        raise ValueError("rescaling needs an analytic family")

    def physical_expr(self) -> TermExpr | None:
        """Physical profile ``u(r)`` as a closed form, when it is one."""
        n, lam = self.n, self.scale
        if self.family == "gaussian":
            return TermExpr.monomial(n, self.amplitude, beta=0.5 / lam**2)
        if self.family == "poly_gaussian":
            # rho^(2j) e^(-rho^2) is the transform of (-Delta)^j 2^(-n/2) e^(-r^2/4)
            g = TermExpr.monomial(n, 2.0 ** (-n / 2.0), beta=0.25)
            for _ in range(self.j):
                g = -g.lap_x()
            # u(x/lam): w -> w/lam^2
            terms = {(e, a, q): c * lam ** (-2.0 * e) for (e, a, q), c in g.terms.items()}
            return TermExpr(n, terms, beta=0.25 / lam**2).scale(self.amplitude)
        return None

    def physical(self, r) -> np.ndarray:
        """Physical profile ``u(r)``."""
        r = np.asarray(r, dtype=float)
        expr = self.physical_expr()
        if expr is not None:
            return expr(r, np.zeros_like(r))
        if self.family == "slater":
            # e^(-rho) is (2 pi)^(n/2) times the transform of P^1_(1/2)
            n = self.n
            x = r / self.scale
            c = (2.0 * math.pi) ** (n / 2.0) * poisson_normalizer(n, 0.5)
            return self.amplitude * c * (1.0 + x * x) ** (-(n + 1) / 2.0)
        raise ValueError("custom spectral data has no physical profile")


def make_test_function(family: str, params: dict | None, grid: RhoGrid) -> RadialSpectralFunction:
    """Build one of the analytic test functions on ``grid``.

    ``family`` may be ``gaussian``, ``slater``, ``poly_gaussian`` (with
    ``params["j"]``) or the compact spelling ``poly_gaussian(j)``.
    ``params`` may carry ``scale`` and ``amplitude``.
    """
    params = dict(params or {})
    name = family.strip()
    j = int(params.pop("j", 0))
    if name.startswith("poly_gaussian(") and name.endswith(")"):
        try:
            j = int(name[len("poly_gaussian("):-1])
        except ValueError:
            raise ValueError(f"bad poly_gaussian index in {family!r}") from None
        name = "poly_gaussian"
    if name not in _FAMILIES:
        raise ValueError(f"unknown test family {family!r}; expected one of {_FAMILIES}")
    if j < 0:
        raise ValueError("poly_gaussian index must be nonnegative")
    scale = float(params.pop("scale", 1.0))
    amplitude = float(params.pop("amplitude", 1.0))
    if params:
        raise ValueError(f"unknown test-function parameters {sorted(params)}")
    if not scale > 0:
        raise ValueError("scale must be positive")
    proto = RadialSpectralFunction(grid, np.empty(0), name, j, scale, amplitude)
    return proto.on(grid)


def _tail_check(contrib: np.ndarray, total: float, what: str, rtol: float = 1e-10) -> bool:
    tail = abs(float(np.sum(contrib[-8:])))
    if tail > rtol * max(abs(total), 1e-300):
        warnings.warn(f"{what}: integrand not decayed at grid end "
                      f"(tail {tail:.2e} of {total:.2e})", TailWarning, stacklevel=3)
        return False
    return True


def eval_physical_origin(u: RadialSpectralFunction) -> float:
    """``u(0) = (2 pi)^(-n/2) omega_{n-1} int u^(rho) rho^(n-1) d rho``."""
    g = u.grid
    contrib = g.radial_weights() * u.values
    total = float(np.sum(contrib))
    _tail_check(contrib, total, "eval_physical_origin")
    return (2.0 * math.pi) ** (-g.n / 2.0) * total


# ---------------------------------------------------------------------------
# integration


def integrate(values, grid: RhoGrid | YLadder | PolarGrid, ladder: YLadder | None = None, *,
              rho_power: float = 0.0, y_power: float | None = None,
              radial: bool = False, both_signs: bool = False) -> float:
    """Weighted quadrature on a grid or a grid-ladder product.

    Weight: ``rho^rho_power`` (times ``omega_{n-1} rho^(n-1)`` when
    ``radial``) and ``|y|^y_power`` (default: the ladder's own exponent). For
    a :class:`YLadder` passed alone, ``values`` are on its nodes. With
    ``both_signs`` the y-integral covers ``R`` instead of ``(0, infty)``.
    """
    vals = np.asarray(values, dtype=float)
    if isinstance(grid, PolarGrid):
        if vals.shape != grid.weights.shape:
            raise ValueError("values do not match the polar grid")
        return float(np.sum(grid.weights * vals))
    if isinstance(grid, YLadder):
        if ladder is not None:
            raise ValueError("pass a single ladder")
        return _integrate_y(vals, grid, y_power) * (2.0 if both_signs else 1.0)
    if not isinstance(grid, RhoGrid):
        raise TypeError("integrate expects a RhoGrid or YLadder")
    lead = rho_power + (grid.n - 1 if radial else 0)
    if not lead > -1.0:
        raise IntegrabilityError(f"rho^{lead} is not integrable at rho=0")
    w = grid.radial_weights(rho_power) if radial else grid.weights * grid.nodes**rho_power
    if ladder is None:
        if vals.shape != w.shape:
            raise ValueError("values do not match the grid")
        return float(np.sum(w * vals))
    if vals.shape != (w.size, ladder.nodes.size):
        raise ValueError("values must have shape (len(grid), len(ladder nodes))")
    wy = _y_weights(ladder, y_power)
    return float(w @ vals @ wy) * (2.0 if both_signs else 1.0)


def _y_weights(ladder: YLadder, y_power: float | None) -> np.ndarray:
    if ladder.weights is None:
        raise ValueError("ladder carries no quadrature weights; use YLadder.quadrature")
    p = ladder.b if y_power is None else float(y_power)
    if not p > -1.0:
        raise IntegrabilityError(f"|y|^{p} is not integrable at y=0")
    if p == ladder.b:
        return ladder.weights
    if p < ladder.b and p - ladder.b <= -1.0:
        raise IntegrabilityError("weight exponent too far below the ladder's exponent")
    return ladder.weights * ladder.nodes ** (p - ladder.b)


def _integrate_y(vals: np.ndarray, ladder: YLadder, y_power: float | None) -> float:
    wy = _y_weights(ladder, y_power)
    if vals.shape != wy.shape:
        raise ValueError("values do not match the ladder")
    return float(np.sum(wy * vals))


# ---------------------------------------------------------------------------
# physical fields


@dataclass(frozen=True)
class PhysicalField:
    """x-radial, y-even field ``U(r, y)`` in physical coordinates.

    Analytic fields carry a :class:`TermExpr` and get exact derivatives;
    fields given by a callable only are differentiated by finite
    differences (flagged by ``exact = False``). Only ``y >= 0`` is stored;
    evaluation at negative heights reflects.
    """

    n: int
    tag: str
    expr: TermExpr | None = None
    func: Callable | None = field(default=None, repr=False)
    r_nodes: np.ndarray = field(default_factory=lambda: np.linspace(0.0, 6.0, 61), repr=False)
    y_nodes: np.ndarray = field(default_factory=lambda: np.linspace(0.0, 6.0, 61), repr=False)
    alpha: float = float("nan")
    b: float = 0.0

    def __post_init__(self):
        if (self.expr is None) == (self.func is None):
            raise ValueError("give exactly one of expr or func")
        if self.expr is not None and self.expr.n != self.n:
            raise ValueError("expression dimension mismatch")

    @property
    def exact(self) -> bool:
        return self.expr is not None

    @classmethod
    def gaussian(cls, n: int, beta: float = 0.5, gamma: float = 0.5, poly=None,
                 tag: str | None = None) -> "PhysicalField":
        """``p(r^2, y^2) exp(-beta r^2 - gamma y^2)``; ``poly`` maps
        ``(i, j) -> c`` for the monomial ``c r^(2i) y^(2j)``."""
        poly = poly or {(0, 0): 1.0}
        terms = {(float(i), 2.0 * j, 0.0): float(c) for (i, j), c in poly.items()}
        expr = TermExpr(n, terms, beta=beta, gamma=gamma)
        name = tag or f"gaussian(beta={beta:g},gamma={gamma:g},terms={len(poly)})"
        return cls(int(n), name, expr=expr)

    @classmethod
    def from_callable(cls, n: int, func: Callable, tag: str = "sampled") -> "PhysicalField":
        return cls(int(n), tag, func=func)

    def __call__(self, r, y) -> np.ndarray:
        y = np.abs(np.asarray(y, dtype=float))
        if self.expr is not None:
            return self.expr(r, y)
        return np.asarray(self.func(np.asarray(r, dtype=float), y), dtype=float)

    @property
    def values(self) -> np.ndarray:
        return self(self.r_nodes[:, None], self.y_nodes[None, :])

    def to_samples(self) -> "FieldSamples":
        return FieldSamples("physical", self.n, self.alpha, self.b,
                            np.asarray(self.r_nodes, dtype=float),
                            np.asarray(self.y_nodes, dtype=float), self.values)


# ---------------------------------------------------------------------------
# field files


@dataclass(frozen=True)
class FieldSamples:
    """Lattice samples as stored in a field file."""

    kind: str
    n: int
    alpha: float
    b: float
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def to_samples(self) -> "FieldSamples":
        return self

    @property
    def columns(self) -> tuple[str, str, str]:
        return ("rho", "y", "value") if self.kind == "spectral" else ("r", "y", "value")


def dump_field(fld, path) -> None:
    """Write a field in the v1 CSV format (shortest round-trip floats)."""
    smp = fld.to_samples()
    if smp.kind not in ("spectral", "physical"):
        raise ValueError(f"unknown field kind {smp.kind!r}")
    vals = np.asarray(smp.values, dtype=float)
    if vals.shape != (smp.x.size, smp.y.size):
        raise ValueError("field values do not match the lattice")
    lines = [f"# polyext-field {FIELD_VERSION} kind={smp.kind} n={int(smp.n)} "
             f"alpha={float(smp.alpha)!r} b={float(smp.b)!r}",
             ",".join(smp.columns)]
    for i, xi in enumerate(smp.x):
        xs = repr(float(xi))
        for j, yj in enumerate(smp.y):
            lines.append(f"{xs},{float(yj)!r},{float(vals[i, j])!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_header(line: str) -> dict:
    parts = line.strip().split()
    if len(parts) < 2 or parts[0] != "#" or parts[1] != "polyext-field":
        raise FieldFormatError("missing '# polyext-field' header", 1)
    if len(parts) < 3:
        raise FieldFormatError("header lacks a version", 1)
    if parts[2] != FIELD_VERSION:
        raise FieldFormatError(f"unsupported field version {parts[2]!r}", 1)
    meta = {}
    for tok in parts[3:]:
        if "=" not in tok:
            raise FieldFormatError(f"bad header token {tok!r}", 1)
        k, v = tok.split("=", 1)
        meta[k] = v
    missing = {"kind", "n", "alpha", "b"} - meta.keys()
    if missing:
        raise FieldFormatError(f"header missing {sorted(missing)}", 1)
    if meta["kind"] not in ("spectral", "physical"):
        raise FieldFormatError(f"unknown kind {meta['kind']!r}", 1)
    try:
        return {"kind": meta["kind"], "n": int(meta["n"]),
                "alpha": float(meta["alpha"]), "b": float(meta["b"])}
    except ValueError as exc:
        raise FieldFormatError(f"bad header value: {exc}", 1) from None


def load_field(path) -> FieldSamples:
    """Read a v1 field file; raises :class:`FieldFormatError` on bad input."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise FieldFormatError("empty file", 1)
    meta = _parse_header(lines[0])
    want = "rho,y,value" if meta["kind"] == "spectral" else "r,y,value"
    if len(lines) < 2 or lines[1].strip() != want:
        raise FieldFormatError(f"expected column line {want!r}", 2)
    rows = []
    for no, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != 3:
            raise FieldFormatError(f"expected 3 columns, got {len(cells)}", no)
        try:
            rows.append(tuple(float(c) for c in cells))
        except ValueError:
            raise FieldFormatError(f"non-numeric cell in {line!r}", no) from None
    if not rows:
        raise FieldFormatError("no data rows", len(lines))
    arr = np.asarray(rows)
    xs = list(dict.fromkeys(arr[:, 0].tolist()))
    ys = list(dict.fromkeys(arr[:, 1].tolist()))
    if arr.shape[0] != len(xs) * len(ys):
        raise FieldFormatError(
            f"incomplete lattice: {arr.shape[0]} rows for {len(xs)} x {len(ys)} nodes",
            len(lines))
    grid_x = np.repeat(np.asarray(xs), len(ys))
    grid_y = np.tile(np.asarray(ys), len(xs))
    if not (np.array_equal(grid_x, arr[:, 0]) and np.array_equal(grid_y, arr[:, 1])):
        raise FieldFormatError("rows are not in lattice order", None)
    return FieldSamples(meta["kind"], meta["n"], meta["alpha"], meta["b"],
                        np.asarray(xs), np.asarray(ys),
                        arr[:, 2].reshape(len(xs), len(ys)))
