"""Second-order confluent Darboux transformation.

A seed solution u at factorization energy lam and a constant gamma define

    D  = gamma + I,        I(x) = int_a^x u(t)^2 dt   (anchored at the left node)
    V3 = V1 - 2 (log D)'' = V1 - 4 u u'/D + 2 u^4/D^2

Solutions of the transformed equation at lam come from reduction of order
(``missing_state``); solutions at any other energy come from the Wronskian
formula with an auxiliary solution u1 of u1'' + (lam - V1) u1 = -u
(``transform_at_energy``).  ``chained_darboux`` evaluates the same map as two
first-order steps and serves as an independent cross-check.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .grid import Grid, GridFn, check_same_grid, cumint, deriv1, deriv2
from .schrodinger import (
    RESIDUAL_BAND,
    CauchyData,
    PotentialSpec,
    SolutionPair,
    residual,
    solve_inhomogeneous,
)

RESIDUAL_RTOL = 1e-5


class SingularGammaWarning(UserWarning):
    """D = gamma + I vanishes on the grid; the transformed potential has poles."""


class NodeObstructionError(ValueError):
    """The seed has a node where the requested construction needs 1/u."""

    def __init__(self, message: str, interval: Tuple[float, float]):
        super().__init__(message)
        self.interval = interval


@dataclass(frozen=True)
class ConfluentSeed:
    u: SolutionPair
    gamma: float
    I: GridFn
    D: GridFn

    @property
    def grid(self) -> Grid:
        return self.u.grid

    @property
    def lam(self) -> float:
        return self.u.energy

    @property
    def I_max(self) -> float:
        return float(self.I.values[-1])

    @property
    def delta_sing(self) -> float:
        return 1e-8 * (1.0 + abs(self.gamma) + self.I_max)

    def singular_nodes(self) -> np.ndarray:
        """Nodes where |D| < delta_sing or next to a sign change of D."""
        d = self.D.values
        bad = np.abs(d) < self.delta_sing
        flip = np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]
        bad[flip] = True
        bad[flip + 1] = True
        return np.nonzero(bad)[0]

    @property
    def min_abs_D(self) -> float:
        return float(np.min(np.abs(self.D.values)))

    @property
    def is_regular(self) -> bool:
        return self.singular_nodes().size == 0


@dataclass(frozen=True)
class GammaRegularity:
    """Values of gamma for which D = gamma + I has no zero on the grid.

    Because I is nondecreasing from I_min to I_max, the admissible set is
    (-inf, -I_max) U (-I_min, +inf).  ``paper_offset`` is F(a) for a closed-form
    antiderivative F of u^2; the same set in that convention is shifted by
    -F(a).
    """

    I_min: float
    I_max: float
    paper_offset: Optional[float] = None

    def intervals(self) -> List[Tuple[float, float]]:
        return [(-np.inf, -self.I_max), (-self.I_min, np.inf)]

    def contains(self, gamma: float) -> bool:
        return gamma < -self.I_max or gamma > -self.I_min

    def paper_intervals(self) -> List[Tuple[float, float]]:
        if self.paper_offset is None:
            raise ValueError("no closed-form antiderivative attached to this seed")
        off = self.paper_offset
        return [(lo - off, hi - off) for lo, hi in self.intervals()]

    def contains_paper(self, gamma_paper: float) -> bool:
        if self.paper_offset is None:
            raise ValueError("no closed-form antiderivative attached to this seed")
        return self.contains(gamma_paper + self.paper_offset)


@dataclass(frozen=True)
class TransformOutput:
    V1: GridFn
    V3: GridFn
    psi_hat: GridFn
    dpsi_hat: GridFn
    energy: float
    singular_nodes: np.ndarray = field(repr=False)
    residual: GridFn = field(repr=False)
    residual_sup: float
    tolerance: float
    gamma: float
    lam: float
    C1: Optional[float] = None
    C2: Optional[float] = None

    @property
    def grid(self) -> Grid:
        return self.V3.grid

    @property
    def ok(self) -> bool:
        return self.residual_sup <= self.tolerance

    @property
    def is_regular(self) -> bool:
        return self.singular_nodes.size == 0

    def singular_intervals(self) -> List[Tuple[float, float]]:
        return _runs_to_intervals(self.grid, self.singular_nodes)


def _runs_to_intervals(grid: Grid, nodes: np.ndarray) -> List[Tuple[float, float]]:
    if nodes.size == 0:
        return []
    x = grid.x
    breaks = np.nonzero(np.diff(nodes) > 1)[0]
    starts = np.concatenate(([nodes[0]], nodes[breaks + 1]))
    ends = np.concatenate((nodes[breaks], [nodes[-1]]))
    return [(float(x[s]), float(x[e])) for s, e in zip(starts, ends)]


def build_seed(u: SolutionPair, gamma: float) -> ConfluentSeed:
    if u.blew_up or not np.all(np.isfinite(u.psi.values)):
        raise ValueError("seed solution overflowed on the grid; shrink the domain")
    if not np.any(u.psi.values != 0):
        raise ValueError("seed solution vanishes identically")
    I = cumint(u.psi ** 2, 0)
    steps = np.diff(I.values)
    if np.any(steps < -1e-12 * max(1.0, float(I.values[-1]))):
        raise ArithmeticError("cumulative integral of u^2 is not monotone")
    seed = ConfluentSeed(u, float(gamma), I, I + float(gamma))
    if not seed.is_regular:
        bad = _runs_to_intervals(seed.grid, seed.singular_nodes())
        warnings.warn(f"D = gamma + int u^2 vanishes near {bad}; those nodes are masked",
                      SingularGammaWarning, stacklevel=2)
    return seed


def gamma_regularity(u: SolutionPair, paper_offset: Optional[float] = None) -> GammaRegularity:
    I = cumint(u.psi ** 2, 0).values
    return GammaRegularity(float(I.min()), float(I.max()), paper_offset)


def _sentinel(values: np.ndarray, nodes: np.ndarray, sign: np.ndarray) -> np.ndarray:
    out = values.copy()
    out[nodes] = np.copysign(np.inf, np.where(sign[nodes] == 0, 1.0, sign[nodes]))
    return out


def transformed_potential(V1: PotentialSpec, seed: ConfluentSeed) -> GridFn:
    """V3 = V1 - 4 u u'/D + 2 u^4/D^2, with +inf at singular nodes."""
    u, du, d = seed.u.psi.values, seed.u.dpsi.values, seed.D.values
    with np.errstate(divide="ignore", invalid="ignore"):
        v3 = V1.on(seed.grid).values - 4.0 * u * du / d + 2.0 * u ** 4 / d ** 2
    bad = seed.singular_nodes()
    return GridFn(seed.grid, _sentinel(v3, bad, np.ones_like(v3)))


def _residual_mask(n: int, singular: np.ndarray, band: int = RESIDUAL_BAND) -> np.ndarray:
    masked = np.zeros(n, dtype=bool)
    for i in singular:
        masked[max(0, i - band):i + band + 1] = True
    return masked


def _finish(seed: ConfluentSeed, V3: GridFn, psi: np.ndarray, dpsi: np.ndarray, energy: float,
            C1=None, C2=None) -> TransformOutput:
    grid = seed.grid
    bad = seed.singular_nodes()
    psi = _sentinel(psi, bad, np.sign(psi))
    psi_hat = GridFn(grid, psi)
    masked = _residual_mask(grid.n, bad)
    safe = np.where(masked | ~np.isfinite(psi), 0.0, psi)
    v3_safe = np.where(np.isfinite(V3.values), V3.values, 0.0)
    r = residual(PotentialSpec.tabulated(GridFn(grid, v3_safe)), energy, GridFn(grid, safe)).values.copy()
    r[masked] = np.nan
    d2 = np.abs(deriv2(GridFn(grid, safe)).values)
    d2[masked] = np.nan
    d2[:RESIDUAL_BAND] = d2[-RESIDUAL_BAND:] = np.nan
    finite = ~np.isnan(r)
    r_sup = float(np.max(np.abs(r[finite]))) if finite.any() else 0.0
    scale = float(np.nanmax(d2)) if finite.any() else 0.0
    return TransformOutput(
        V1=seed.u.potential.on(grid),
        V3=V3,
        psi_hat=psi_hat,
        dpsi_hat=GridFn(grid, dpsi),
        energy=float(energy),
        singular_nodes=bad,
        residual=GridFn(grid, r),
        residual_sup=r_sup,
        tolerance=RESIDUAL_RTOL * (1.0 + scale),
        gamma=seed.gamma,
        lam=seed.lam,
        C1=C1,
        C2=C2,
    )


def seed_nodes(u: SolutionPair) -> List[Tuple[float, float]]:
    """Intervals [x_i, x_{i+1}] that contain a zero of u."""
    v = u.psi.values
    x = u.grid.x
    out = []
    for i in np.nonzero(v == 0)[0]:
        out.append((float(x[i]), float(x[i])))
    for i in np.nonzero(v[:-1] * v[1:] < 0)[0]:
        out.append((float(x[i]), float(x[i + 1])))
    return sorted(out)


def missing_state(seed: ConfluentSeed, C1: float, C2: float) -> TransformOutput:
    """Solutions at the factorization energy: (u/D) (C1 + C2 int_a^x D^2/u^2)."""
    if C1 == 0 and C2 == 0:
        raise ValueError("C1 and C2 cannot both vanish")
    u, du, d = seed.u.psi.values, seed.u.dpsi.values, seed.D.values
    V3 = transformed_potential(seed.u.potential, seed)
    with np.errstate(divide="ignore", invalid="ignore"):
        if C2 != 0:
            nodes = seed_nodes(seed.u)
            if nodes:
                raise NodeObstructionError(
                    f"C2 != 0 needs a nodeless seed; u vanishes in {nodes[0]}", nodes[0])
            J = cumint(GridFn(seed.grid, d ** 2 / u ** 2), 0).values
        else:
            J = np.zeros_like(u)
        bracket = C1 + C2 * J
        psi = u / d * bracket
        dpsi = (du / d - u ** 3 / d ** 2) * bracket
        if C2 != 0:
            dpsi = dpsi + C2 * d / u
    return _finish(seed, V3, psi, dpsi, seed.lam, C1, C2)


def _u1_anchor(u: np.ndarray) -> int:
    # largest |u|: the homogeneous basis behind u1 then grows least across
    # the grid, which keeps the variation-of-parameters sum well conditioned
    return int(np.argmax(np.abs(u)))


def auxiliary_solution(seed: ConfluentSeed) -> SolutionPair:
    """u1 with u1'' + (lam - V1) u1 = -u and W(u, u1) = -D.

    Cauchy data u1 = 0, u1' = -D/u at the node where |u| is largest; since
    W(u, u1)' = -u^2 for this source, the identity then holds on the whole grid.
    """
    u = seed.u
    j = _u1_anchor(u.psi.values)
    x0 = float(seed.grid.x[j])
    slope = -float(seed.D.values[j]) / float(u.psi.values[j])
    return solve_inhomogeneous(u.potential, seed.lam, -u.psi, CauchyData(x0, 0.0, slope), seed.grid)


def transform_at_energy(seed: ConfluentSeed, psi: SolutionPair) -> TransformOutput:
    """Map a solution at energy eps != lam: W(u, u1, psi) / W(u, u1).

    Second derivatives are eliminated through the differential equations,
    which reduces the 3x3 determinant to u W(u, psi) + (lam - eps) psi W(u, u1).
    """
    check_same_grid(seed.u.psi, psi.psi)
    lam, eps = seed.lam, psi.energy
    if abs(lam - eps) <= 1e-12 * max(1.0, abs(lam)):
        raise ValueError("psi has the factorization energy; use missing_state")
    u1 = auxiliary_solution(seed)
    u, du = seed.u.psi.values, seed.u.dpsi.values
    p, dp = psi.psi.values, psi.dpsi.values
    w2 = u * u1.dpsi.values - du * u1.psi.values
    wup = u * dp - du * p
    with np.errstate(divide="ignore", invalid="ignore"):
        w3 = u * wup + (lam - eps) * p * w2
        out = w3 / w2
        dout = ((lam - eps) * dp + du * wup / w2 + (lam - eps) * u ** 2 * p / w2
                + u ** 3 * wup / w2 ** 2)
    V3 = transformed_potential(seed.u.potential, seed)
    return _finish(seed, V3, out, dout, eps)


@dataclass(frozen=True)
class DarbouxChain:
    """Intermediate objects of the two-step chain on a node-free sub-grid."""

    nodes: slice
    psi_bar: GridFn
    u_bar: GridFn
    V2: GridFn
    psi_hat: GridFn


def node_free_range(u: SolutionPair, min_nodes: int = 5) -> slice:
    """Longest run of nodes on which u keeps one strict sign."""
    v = u.psi.values
    ok = (v != 0) & np.isfinite(v)
    sign = np.sign(v)
    best, start = (0, 0), None
    for i in range(v.size + 1):
        good = i < v.size and ok[i] and (start is None or sign[i] == sign[start])
        if good and start is None:
            start = i
        elif not good and start is not None:
            if i - start > best[1] - best[0]:
                best = (start, i)
            start = i if i < v.size and ok[i] else None
    if best[1] - best[0] < min_nodes:
        raise NodeObstructionError("seed has no node-free subdomain of usable size",
                                   (u.grid.a, u.grid.b))
    return slice(*best)


def darboux_chain(u: SolutionPair, gamma: float, psi: SolutionPair) -> DarbouxChain:
    check_same_grid(u.psi, psi.psi)
    sl = node_free_range(u)
    i0, i1 = sl.start, sl.stop - 1
    D = cumint(u.psi ** 2, 0).values + gamma
    sub = u.grid.sub(i0, i1)
    uu, du = u.psi.values[sl], u.dpsi.values[sl]
    log_du = GridFn(sub, du / uu)
    psi_bar = GridFn(sub, psi.dpsi.values[sl] - log_du.values * psi.psi.values[sl])
    u_bar = GridFn(sub, D[sl] / uu)
    with np.errstate(divide="ignore", invalid="ignore"):
        psi_hat = deriv1(psi_bar) - deriv1(u_bar) / u_bar * psi_bar
    V1 = u.potential.on(u.grid).values[sl]
    V2 = GridFn(sub, V1 - 2.0 * deriv1(log_du).values)
    return DarbouxChain(sl, psi_bar, u_bar, V2, psi_hat)


def chained_darboux(u: SolutionPair, gamma: float, psi: SolutionPair) -> GridFn:
    """Two first-order steps psi -> psi' - (u'/u) psi -> (same with u_bar = D/u).

    Returned on the longest node-free stretch of u.
    """
    return darboux_chain(u, gamma, psi).psi_hat
