"""Uniform grids and real functions sampled on them.

All derivative and integral operators here are fourth-order accurate and
exact for low-degree polynomials, which is what the transformation code
relies on when it compares engine output against closed forms.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from scipy.interpolate import CubicSpline


class GridError(ValueError):
    """Raised for malformed grids or mismatched grid functions."""


@dataclass(frozen=True)
class Grid:
    """Uniform grid with ``n`` nodes on ``[a, b]``."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            raise GridError("grid endpoints must be finite")
        if not self.a < self.b:
            raise GridError(f"need a < b, got a={self.a}, b={self.b}")
        if int(self.n) != self.n or self.n < 5:
            raise GridError(f"need an integer n >= 5, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        x = self.a + self.h * np.arange(self.n)
        x[-1] = self.b
        x.flags.writeable = False
        return x

    def index_of(self, x0: float, tol: float = 1e-9) -> int:
        """Index of the node at ``x0``; raises if ``x0`` is not a node."""
        i = int(round((x0 - self.a) / self.h))
        if i < 0 or i >= self.n or abs(self.a + i * self.h - x0) > tol * max(1.0, self.h):
            raise GridError(f"x0={x0} is not a node of {self}")
        return i

    def nearest_index(self, x0: float) -> int:
        return int(np.clip(round((x0 - self.a) / self.h), 0, self.n - 1))

    def sub(self, i0: int, i1: int) -> "Grid":
        """Sub-grid covering nodes ``i0..i1`` inclusive."""
        if not 0 <= i0 < i1 < self.n:
            raise GridError(f"bad sub-range [{i0}, {i1}] for n={self.n}")
        x = self.x
        return Grid(float(x[i0]), float(x[i1]), i1 - i0 + 1)

    def index_range(self, lo: float, hi: float) -> slice:
        """Slice of nodes with ``lo <= x <= hi`` (with a roundoff margin)."""
        eps = 1e-9 * self.h
        idx = np.nonzero((self.x >= lo - eps) & (self.x <= hi + eps))[0]
        if idx.size == 0:
            raise GridError(f"no nodes in [{lo}, {hi}]")
        return slice(int(idx[0]), int(idx[-1]) + 1)


def make_grid(a: float, b: float, n: int = 4001) -> Grid:
    return Grid(float(a), float(b), n)


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class GridFn:
    """Real values sampled at every node of ``grid``."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = _frozen(self.values)
        if v.shape != (self.grid.n,):
            raise GridError(f"expected {self.grid.n} values, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: Grid, func) -> "GridFn":
        return cls(grid, np.broadcast_to(func(grid.x), (grid.n,)))

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def restrict(self, i0: int, i1: int) -> "GridFn":
        return GridFn(self.grid.sub(i0, i1), self.values[i0:i1 + 1])

    def resample(self, grid: Grid) -> "GridFn":
        """Cubic-spline resampling onto ``grid`` (which must lie inside this one)."""
        if grid == self.grid:
            return self
        return resample(self.x, self.values, grid)

    def _coerce(self, other):
        if isinstance(other, GridFn):
            check_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return GridFn(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFn(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return GridFn(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other):
        return GridFn(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridFn(self.grid, self.values / self._coerce(other))

    def __neg__(self):
        return GridFn(self.grid, -self.values)

    def __pow__(self, p):
        return GridFn(self.grid, self.values ** p)

    def __call__(self, x0: float) -> float:
        """Value at a node (no interpolation)."""
        return float(self.values[self.grid.index_of(x0)])

    def to_csv(self, path: Union[str, Path], header: str = "value") -> None:
        write_columns(path, {"x": self.x, header: self.values})


def check_same_grid(f: GridFn, g: GridFn) -> None:
    if f.grid != g.grid:
        raise GridError(f"grid mismatch: {f.grid} vs {g.grid}")


def resample(x: np.ndarray, y: np.ndarray, grid: Grid) -> GridFn:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.size < 4 or np.any(np.diff(x) <= 0):
        raise GridError("tabulated abscissae must be strictly increasing with at least 4 points")
    span = 1e-9 * (x[-1] - x[0])
    if grid.a < x[0] - span or grid.b > x[-1] + span:
        raise GridError(f"grid [{grid.a}, {grid.b}] extends outside table [{x[0]}, {x[-1]}]")
    return GridFn(grid, CubicSpline(x, y)(np.clip(grid.x, x[0], x[-1])))


# Fourth-order stencils. Interior nodes use centered five-point formulas; the
# first and last two nodes use one-sided formulas of the same order.
_D1_EDGE = (
    np.array([-25.0, 48.0, -36.0, 16.0, -3.0]),
    np.array([-3.0, -10.0, 18.0, -6.0, 1.0]),
)
_D2_EDGE = (
    np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]),
    np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0]),
)


# Ten-point fourth-order edge stencil (minimum-norm weights, times 12); it
# amplifies rounding noise ~4x less than the six-point one.
_D2_EDGE10 = np.array([2850.0, -4676.0, -939.0, 2556.0, 2234.0, -520.0, -2331.0, -804.0, 2506.0, -876.0]) / 143.0
# third-order fallback for n == 5, where a six-point edge stencil does not fit
_D2_EDGE5 = (
    np.array([35.0, -104.0, 114.0, -56.0, 11.0]),
    np.array([11.0, -20.0, 6.0, 4.0, -1.0]),
)


def _deriv1_array(v: np.ndarray, h: float) -> np.ndarray:
    d = np.empty_like(v)
    d[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
    for i, w in enumerate(_D1_EDGE):
        d[i] = w @ v[:5] / (12.0 * h)
        d[-1 - i] = -(w @ v[::-1][:5]) / (12.0 * h)
    return d


def _deriv2_array(v: np.ndarray, h: float) -> np.ndarray:
    d = np.empty_like(v)
    d[2:-2] = (-v[:-4] + 16.0 * v[1:-3] - 30.0 * v[2:-2] + 16.0 * v[3:-1] - v[4:]) / (12.0 * h * h)
    if v.size >= 10:
        edge = (_D2_EDGE10, _D2_EDGE[1])
    elif v.size >= 6:
        edge = _D2_EDGE
    else:
        edge = _D2_EDGE5
    for i, w in enumerate(edge):
        m = w.size
        d[i] = w @ v[:m] / (12.0 * h * h)
        d[-1 - i] = w @ v[::-1][:m] / (12.0 * h * h)
    return d


def deriv1(f: GridFn) -> GridFn:
    return GridFn(f.grid, _deriv1_array(f.values, f.grid.h))


def deriv2(f: GridFn) -> GridFn:
    return GridFn(f.grid, _deriv2_array(f.values, f.grid.h))


def _cumint_array(v: np.ndarray, h: float) -> np.ndarray:
    # Per-interval integrals of the local cubic interpolant; exact for cubics.
    inc = np.empty(v.size - 1)
    inc[1:-1] = (-v[:-3] + 13.0 * v[1:-2] + 13.0 * v[2:-1] - v[3:]) * (h / 24.0)
    inc[0] = (9.0 * v[0] + 19.0 * v[1] - 5.0 * v[2] + v[3]) * (h / 24.0)
    inc[-1] = (v[-4] - 5.0 * v[-3] + 19.0 * v[-2] + 9.0 * v[-1]) * (h / 24.0)
    return np.concatenate(([0.0], np.cumsum(inc)))


def cumint(f: GridFn, anchor_index: int = 0) -> GridFn:
    """Antiderivative of ``f`` vanishing at node ``anchor_index``."""
    n = f.grid.n
    if not -n <= anchor_index < n:
        raise GridError(f"anchor index {anchor_index} out of range for n={n}")
    F = _cumint_array(f.values, f.grid.h)
    return GridFn(f.grid, F - F[anchor_index])


def _mask_slice(n: int, mask) -> np.ndarray:
    keep = np.zeros(n, dtype=bool)
    if mask is None:
        keep[:] = True
    elif isinstance(mask, slice):
        keep[mask] = True
    elif isinstance(mask, tuple) and len(mask) == 2:
        keep[mask[0]:mask[1]] = True
    else:
        keep[np.asarray(mask)] = True
    return keep


def sup_diff(f: GridFn, g: GridFn, mask: Optional[Union[slice, Tuple[int, int]]] = None) -> float:
    """``max |f - g|`` over the nodes selected by ``mask`` (all nodes by default).

    ``mask`` is a slice or an ``(start, stop)`` index pair; NaN entries are
    skipped, so masked residual bands never contribute.
    """
    check_same_grid(f, g)
    keep = _mask_slice(f.grid.n, mask)
    d = np.abs(f.values - g.values)[keep]
    d = d[~np.isnan(d)]
    return float(d.max()) if d.size else 0.0


def sup_norm(f: GridFn, mask=None) -> float:
    return sup_diff(f, GridFn(f.grid, np.zeros(f.grid.n)), mask)


def fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_columns(path: Union[str, Path], columns: dict) -> None:
    """Write equal-length columns as CSV with 17 significant digits."""
    names = list(columns)
    cols = [np.asarray(columns[k], dtype=float) for k in names]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in zip(*cols):
            w.writerow([fmt(v) for v in row])


def read_columns(path: Union[str, Path]) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise GridError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise GridError(f"{path}: non-numeric entry ({exc})") from None
    if data.ndim != 2 or data.shape[1] != len(header):
        raise GridError(f"{path}: ragged or empty table")
    return {h: data[:, j] for j, h in enumerate(header)}


def read_gridfn(path: Union[str, Path]) -> GridFn:
    """Read a ``x,value`` CSV written by :meth:`GridFn.to_csv`."""
    cols = read_columns(path)
    x = cols["x"]
    name = [k for k in cols if k != "x"][0]
    grid = Grid(float(x[0]), float(x[-1]), x.size)
    if np.max(np.abs(grid.x - x)) > 1e-9 * max(1.0, grid.b - grid.a):
        return resample(x, cols[name], grid)
    return GridFn(grid, cols[name])
