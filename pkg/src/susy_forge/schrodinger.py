"""Stationary Schrodinger equation psi'' + (E - V) psi = 0 on a uniform grid.

Homogeneous problems are integrated with Numerov's method outward from the
Cauchy node in both directions; inhomogeneous problems are assembled by
variation of parameters from two Numerov solutions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from .grid import (
    Grid,
    GridError,
    GridFn,
    _deriv1_array,
    _deriv2_array,
    check_same_grid,
    cumint,
    deriv1,
    deriv2,
    read_columns,
    resample,
)

BLOWUP = 1e300
RESIDUAL_BAND = 4

BUILTINS = ("constant", "quartic_dirac", "oscillator_fp")


@dataclass(frozen=True)
class PotentialSpec:
    """A one-dimensional potential.

    ``kind`` is ``"builtin"``, ``"tabulated"`` or ``"transformed"``.  Builtins:
    ``constant`` (V = c**2), ``quartic_dirac`` (V = x**4 - 2x) and
    ``oscillator_fp`` (V = x**2 - 1).
    """

    kind: str
    name: str = ""
    params: Dict[str, float] = field(default_factory=dict)
    table: Optional[GridFn] = None
    source: Any = None  # TransformOutput for kind == "transformed"

    @classmethod
    def constant(cls, c: float = 1.0) -> "PotentialSpec":
        return cls("builtin", "constant", {"c": float(c)})

    @classmethod
    def quartic_dirac(cls) -> "PotentialSpec":
        return cls("builtin", "quartic_dirac")

    @classmethod
    def oscillator_fp(cls) -> "PotentialSpec":
        return cls("builtin", "oscillator_fp")

    @classmethod
    def builtin(cls, name: str, **params) -> "PotentialSpec":
        if name not in BUILTINS:
            raise ValueError(f"unknown builtin potential {name!r}; choose from {BUILTINS}")
        return cls("builtin", name, {k: float(v) for k, v in params.items()})

    @classmethod
    def tabulated(cls, table: GridFn) -> "PotentialSpec":
        if not np.all(np.isfinite(table.values)):
            raise GridError("tabulated potential contains non-finite samples")
        return cls("tabulated", "tabulated", table=table)

    @classmethod
    def transformed(cls, out) -> "PotentialSpec":
        return cls("transformed", "transformed", source=out)

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "PotentialSpec":
        """Read a potential table with header ``x,V`` (strictly increasing x)."""
        cols = read_columns(path)
        if "x" not in cols or "V" not in cols:
            raise GridError(f"{path}: expected columns x,V")
        x, v = cols["x"], cols["V"]
        if np.any(np.diff(x) <= 0):
            raise GridError(f"{path}: x must be strictly increasing")
        if x.size < 5:
            raise GridError(f"{path}: need at least 5 rows")
        grid = Grid(float(x[0]), float(x[-1]), x.size)
        if np.max(np.abs(grid.x - x)) <= 1e-9 * (grid.b - grid.a):
            return cls.tabulated(GridFn(grid, v))
        # non-uniform table: keep a dense uniform resampling
        fine = Grid(float(x[0]), float(x[-1]), max(4001, x.size))
        return cls.tabulated(resample(x, v, fine))

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.name == "constant":
            return np.full_like(x, self.params.get("c", 1.0) ** 2)
        if self.name == "quartic_dirac":
            return x ** 4 - 2.0 * x
        if self.name == "oscillator_fp":
            return x ** 2 - 1.0
        raise TypeError(f"{self.kind} potentials are only defined on grids; use .on(grid)")

    def on(self, grid: Grid) -> GridFn:
        """Sample the potential on ``grid``."""
        if self.kind == "builtin":
            return GridFn(grid, self(grid.x))
        if self.kind == "tabulated":
            return self.table.resample(grid)
        if self.kind == "transformed":
            v3 = self.source.V3
            if not np.all(np.isfinite(v3.values)):
                raise GridError("transformed potential is singular on its grid")
            return v3.resample(grid)
        raise ValueError(f"unknown potential kind {self.kind!r}")

    def describe(self) -> str:
        if self.kind == "builtin" and self.params:
            args = ",".join(f"{k}={v:g}" for k, v in self.params.items())
            return f"{self.name}({args})"
        return self.name


@dataclass(frozen=True)
class CauchyData:
    x0: float
    value: float
    slope: float

    def __post_init__(self):
        if self.value == 0 and self.slope == 0:
            raise ValueError("Cauchy data (0, 0) only yields the trivial solution")


@dataclass(frozen=True)
class SolutionPair:
    """Samples of a solution and its derivative at a fixed energy.

    ``overflow`` marks nodes where the integration exceeded ``BLOWUP`` and was
    stopped; those nodes hold NaN.
    """

    psi: GridFn
    dpsi: GridFn
    energy: float
    potential: PotentialSpec
    overflow: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        check_same_grid(self.psi, self.dpsi)
        if self.overflow is None:
            object.__setattr__(self, "overflow", np.zeros(self.grid.n, dtype=bool))

    @property
    def grid(self) -> Grid:
        return self.psi.grid

    @property
    def blew_up(self) -> bool:
        return bool(self.overflow.any())

    @classmethod
    def from_samples(cls, grid: Grid, psi, dpsi, energy: float, potential: PotentialSpec) -> "SolutionPair":
        return cls(GridFn(grid, psi), GridFn(grid, dpsi), float(energy), potential)


def _taylor_start(f: np.ndarray, df: np.ndarray, d2f: np.ndarray, d3f: np.ndarray,
                  i: int, psi0: float, dpsi0: float, s: float) -> float:
    """psi(x_i + s) from a fifth-order Taylor expansion of psi'' = f psi."""
    f0, f1, f2, f3 = f[i], df[i], d2f[i], d3f[i]
    p2 = f0 * psi0
    p3 = f1 * psi0 + f0 * dpsi0
    p4 = f2 * psi0 + 2.0 * f1 * dpsi0 + f0 * p2
    p5 = f3 * psi0 + 3.0 * f2 * dpsi0 + 3.0 * f1 * p2 + f0 * p3
    return psi0 + s * dpsi0 + s**2 / 2 * p2 + s**3 / 6 * p3 + s**4 / 24 * p4 + s**5 / 120 * p5


def _numerov_sweep(f: np.ndarray, h: float, psi: np.ndarray, over: np.ndarray, start: int, step: int) -> None:
    """March psi'' = f psi from nodes start-step, start to the end in direction ``step``."""
    c = h * h / 12.0
    n = f.size
    i = start
    w_prev = (1.0 - c * f[i - step]) * psi[i - step]
    w = (1.0 - c * f[i]) * psi[i]
    while 0 <= i + step < n:
        w_next = 2.0 * w - w_prev + 12.0 * c * f[i] * psi[i]
        i += step
        psi[i] = w_next / (1.0 - c * f[i])
        if not abs(psi[i]) <= BLOWUP:
            stop = slice(i, n) if step > 0 else slice(0, i + 1)
            psi[stop] = np.nan
            over[stop] = True
            return
        w_prev, w = w, w_next


def _numerov(f: np.ndarray, h: float, i0: int, value: float, slope: float):
    n = f.size
    psi = np.zeros(n)
    over = np.zeros(n, dtype=bool)
    df = _deriv1_array(f, h)
    d2f = _deriv2_array(f, h)
    d3f = _deriv1_array(d2f, h)
    psi[i0] = value
    if i0 + 1 < n:
        psi[i0 + 1] = _taylor_start(f, df, d2f, d3f, i0, value, slope, h)
        if i0 + 2 < n:
            _numerov_sweep(f, h, psi, over, i0 + 1, +1)
    if i0 - 1 >= 0:
        psi[i0 - 1] = _taylor_start(f, df, d2f, d3f, i0, value, slope, -h)
        if i0 - 2 >= 0:
            _numerov_sweep(f, h, psi, over, i0 - 1, -1)
    return psi, over


def _derivative_channel(psi: np.ndarray, over: np.ndarray, h: float, i0: int, slope: float) -> np.ndarray:
    d = np.full_like(psi, np.nan)
    ok = ~over
    idx = np.nonzero(ok)[0]
    if idx.size >= 5:
        lo, hi = idx[0], idx[-1]
        d[lo:hi + 1] = _deriv1_array(psi[lo:hi + 1], h)
    d[i0] = slope
    return d


def solve_ivp(V: PotentialSpec, E: float, ic: CauchyData, grid: Grid) -> SolutionPair:
    """Solve psi'' = (V - E) psi with psi(x0) = value, psi'(x0) = slope."""
    i0 = grid.index_of(ic.x0)
    f = V.on(grid).values - E
    psi, over = _numerov(f, grid.h, i0, ic.value, ic.slope)
    dpsi = _derivative_channel(psi, over, grid.h, i0, ic.slope)
    return SolutionPair(GridFn(grid, psi), GridFn(grid, dpsi), float(E), V, over)


def solve_inhomogeneous(V: PotentialSpec, lam: float, source: GridFn, ic: CauchyData, grid: Grid) -> SolutionPair:
    """Solve u1'' + (lam - V) u1 = source with Cauchy data ``ic``.

    Built as y_p + value*y1 + slope*y2 where y1, y2 are the homogeneous
    solutions with unit Cauchy data at x0 (so W(y1, y2) = 1) and
    y_p = -y1 * int y2*s + y2 * int y1*s, both integrals anchored at x0.
    """
    if source.grid != grid:
        source = source.resample(grid)
    i0 = grid.index_of(ic.x0)
    y1 = solve_ivp(V, lam, CauchyData(ic.x0, 1.0, 0.0), grid)
    y2 = solve_ivp(V, lam, CauchyData(ic.x0, 0.0, 1.0), grid)
    a = cumint(y2.psi * source, i0).values
    b = cumint(y1.psi * source, i0).values
    p1, p2 = y1.psi.values, y2.psi.values
    d1, d2 = y1.dpsi.values, y2.dpsi.values
    u = -p1 * a + p2 * b + ic.value * p1 + ic.slope * p2
    du = -d1 * a + d2 * b + ic.value * d1 + ic.slope * d2
    over = y1.overflow | y2.overflow | ~np.isfinite(u)
    u[over] = np.nan
    du[over] = np.nan
    return SolutionPair(GridFn(grid, u), GridFn(grid, du), float(lam), V, over)


def wronskian2(f: SolutionPair, g: SolutionPair) -> GridFn:
    """W(f, g) = f g' - f' g at every node."""
    check_same_grid(f.psi, g.psi)
    return f.psi * g.dpsi - f.dpsi * g.psi


def residual(V: PotentialSpec, E: float, psi: GridFn, band: int = RESIDUAL_BAND) -> GridFn:
    """psi'' + (E - V) psi; the ``band`` nodes at each end are set to NaN."""
    r = deriv2(psi).values + (E - V.on(psi.grid).values) * psi.values
    if band:
        r[:band] = np.nan
        r[-band:] = np.nan
    return GridFn(psi.grid, r)


def residual_check(sol: SolutionPair) -> float:
    """Scaled residual sup |r| / (1 + sup |psi''|) of a solution pair."""
    r = residual(sol.potential, sol.energy, sol.psi)
    d2 = np.abs(deriv2(sol.psi).values[RESIDUAL_BAND:-RESIDUAL_BAND])
    return float(np.nanmax(np.abs(r.values)) / (1.0 + np.nanmax(d2)))


def solution_from_derivative(psi: GridFn, energy: float, potential: PotentialSpec) -> SolutionPair:
    """Wrap sampled values, taking the derivative channel from the grid stencil."""
    return SolutionPair(psi, deriv1(psi), float(energy), potential)
