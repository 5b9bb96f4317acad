"""Fokker-Planck drift systems with diffusion 1/2.

f = exp(-U - k t) Psi maps  f_t = f''/2 + (U' f)'  onto
Psi'' + [2k - U'^2 + U''] Psi = 0, i.e. V1 = U'^2 - U'' at eps = 2k.
A transformed solution psi_hat gives the new drift V = -log psi_hat and the
stationary density g = psi_hat^2 = exp(-2V).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

from .confluent import TransformOutput
from .grid import Grid, GridFn, deriv1, deriv2, make_grid
from .schrodinger import RESIDUAL_BAND, PotentialSpec, SolutionPair
from .specfun import DomainError, hermite

DIFFUSION = 0.5


class NonPositiveStateError(ValueError):
    """psi_hat is not strictly positive, so -log psi_hat is not a drift."""

    def __init__(self, message: str, intervals: List[Tuple[float, float]]):
        super().__init__(message)
        self.intervals = intervals


@dataclass(frozen=True)
class DriftSystem:
    """Drift U (builtin 'harmonic' is U = x^2/2) with separation rate k."""

    U: Union[GridFn, str]
    k: float
    grid: Optional[Grid] = None

    def __post_init__(self):
        if isinstance(self.U, GridFn):
            if self.grid is None:
                object.__setattr__(self, "grid", self.U.grid)
        elif self.U != "harmonic":
            raise ValueError(f"unknown builtin drift {self.U!r} (only 'harmonic')")
        elif self.grid is None:
            raise ValueError("builtin drift needs a grid")

    @property
    def diffusion(self) -> float:
        return DIFFUSION

    @property
    def time_factor_rate(self) -> float:
        return float(self.k)

    def U_on_grid(self) -> GridFn:
        if isinstance(self.U, GridFn):
            return self.U.resample(self.grid)
        return GridFn(self.grid, 0.5 * self.grid.x ** 2)


def working_domain(k: int) -> Tuple[float, float]:
    """Whole line for even k, positive half-axis (away from the node) for odd k."""
    return (-4.0, 4.0) if int(k) % 2 == 0 else (0.05, 4.0)


def drift_to_potential(sys: DriftSystem) -> Tuple[PotentialSpec, float]:
    eps = 2.0 * sys.k
    if not isinstance(sys.U, GridFn):
        return PotentialSpec.oscillator_fp(), eps
    U = sys.U_on_grid()
    return PotentialSpec.tabulated(deriv1(U) ** 2 - deriv2(U)), eps


def seed_from_hermite(k: int, grid: Grid) -> SolutionPair:
    """u = exp(-x^2/2) H_k(x) at lam = 2k, with the analytic derivative."""
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise DomainError(f"Hermite seed index must be a nonnegative integer, got {k!r}")
    k = int(k)
    x = grid.x
    gauss = np.exp(-0.5 * x ** 2)
    hk = hermite(k, x)
    hk1 = hermite(k - 1, x) if k > 0 else np.zeros_like(x)
    u = gauss * hk
    du = gauss * (2.0 * k * hk1 - x * hk)
    return SolutionPair.from_samples(grid, u, du, 2.0 * k, PotentialSpec.oscillator_fp())


def hermite_grid(k: int, n: int = 4001) -> Grid:
    return make_grid(*working_domain(k), n)


@dataclass(frozen=True)
class FPStationary:
    """Transformed drift, its derivative, the stationary density and the flux V' g."""

    Vdrift: GridFn
    dVdrift: GridFn
    g: GridFn
    flux: GridFn
    k: float = 0.0

    @property
    def grid(self) -> Grid:
        return self.g.grid

    @classmethod
    def from_drift(cls, V: GridFn, dV: Optional[GridFn] = None, k: float = 0.0) -> "FPStationary":
        if dV is None:
            dV = deriv1(V)
        g = np.exp(-2.0 * V.values)
        return cls(V, dV, GridFn(V.grid, g), GridFn(V.grid, dV.values * g), k)


def _sign_intervals(grid: Grid, bad: np.ndarray) -> List[Tuple[float, float]]:
    idx = np.nonzero(bad)[0]
    if idx.size == 0:
        return []
    x = grid.x
    cut = np.nonzero(np.diff(idx) > 1)[0]
    starts = np.concatenate(([idx[0]], idx[cut + 1]))
    ends = np.concatenate((idx[cut], [idx[-1]]))
    return [(float(x[s]), float(x[e])) for s, e in zip(starts, ends)]


def transformed_drift(out: TransformOutput, k: float = 0.0, allow_nodes: bool = False) -> FPStationary:
    """V = -log psi_hat, g = psi_hat^2.

    With ``allow_nodes`` a psi_hat that changes sign (excited seeds) is
    accepted and V = -log|psi_hat|; g and the flux V' g = -psi_hat psi_hat'
    stay smooth through the nodes.  Poles of psi_hat are always rejected.
    """
    psi = out.psi_hat.values
    dpsi = out.dpsi_hat.values
    grid = out.grid
    poles = ~np.isfinite(psi)
    if poles.any():
        raise NonPositiveStateError("psi_hat has poles (singular gamma)", _sign_intervals(grid, poles))
    if not allow_nodes:
        bad = ~(psi > 0)
        if bad.any():
            spans = _sign_intervals(grid, bad)
            raise NonPositiveStateError(f"psi_hat is not positive on {spans}", spans)
    with np.errstate(divide="ignore", invalid="ignore"):
        V = -np.log(np.abs(psi))
        dV = -dpsi / psi
    return FPStationary(GridFn(grid, V), GridFn(grid, dV), GridFn(grid, psi ** 2),
                        GridFn(grid, -psi * dpsi), float(k))


def fp_residual(st: FPStationary, band: int = RESIDUAL_BAND) -> GridFn:
    """-g''/2 - (V' g)' with ``band`` nodes at each end set to NaN."""
    r = -DIFFUSION * deriv2(st.g).values - deriv1(st.flux).values
    if band:
        r[:band] = np.nan
        r[-band:] = np.nan
    return GridFn(st.grid, r)
