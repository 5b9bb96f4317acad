"""Pseudoscalar Dirac systems  i s2 Phi' + (m s3 + q s1 - E) Phi = 0  in component form.

    Phi1' - q Phi1 + (E + m) Phi2 = 0
    Phi2' + q Phi2 - (E - m) Phi1 = 0

Eliminating Phi2 gives Phi1'' + (E^2 - m^2 - q^2 - q') Phi1 = 0, i.e. a
Schrodinger problem with V = q^2 + q' at eps = E^2 - m^2.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy.integrate import quad

from .confluent import TransformOutput, seed_nodes
from .grid import Grid, GridFn, cumint, deriv1
from .schrodinger import PotentialSpec, SolutionPair

ENERGY_RTOL = 1e-12


class DegenerateSpinorError(ValueError):
    pass


def q0_inverted(x):
    return -np.asarray(x, dtype=float) ** 2


@dataclass(frozen=True)
class PseudoscalarSystem:
    q: Union[GridFn, str]
    m: float
    E: float
    grid: Optional[Grid] = None

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"mass must be positive, got {self.m}")
        if isinstance(self.q, GridFn):
            if self.grid is None:
                object.__setattr__(self, "grid", self.q.grid)
        elif self.q != "q0":
            raise ValueError(f"unknown builtin q {self.q!r} (only 'q0' = -x^2)")
        elif self.grid is None:
            raise ValueError("builtin q needs a grid")

    @classmethod
    def inverted_oscillator(cls, grid: Grid, m: float = 1.0, E: Optional[float] = None) -> "PseudoscalarSystem":
        return cls("q0", m, m if E is None else E, grid)

    def q_on_grid(self) -> GridFn:
        if isinstance(self.q, GridFn):
            return self.q.resample(self.grid)
        return GridFn(self.grid, q0_inverted(self.grid.x))

    def dq_on_grid(self) -> GridFn:
        if isinstance(self.q, GridFn):
            return deriv1(self.q_on_grid())
        return GridFn(self.grid, -2.0 * self.grid.x)

    @property
    def at_threshold(self) -> bool:
        return abs(abs(self.E) - self.m) <= ENERGY_RTOL * self.m


@dataclass(frozen=True)
class Spinor:
    phi1: GridFn
    phi2: GridFn
    degenerate: bool = False

    @property
    def grid(self) -> Grid:
        return self.phi1.grid


def to_schrodinger(sys: PseudoscalarSystem) -> Tuple[PotentialSpec, float]:
    """(V, eps) with V = q^2 + q' and eps = E^2 - m^2."""
    if not isinstance(sys.q, GridFn):
        V = PotentialSpec.quartic_dirac()
    else:
        q = sys.q_on_grid()
        V = PotentialSpec.tabulated(q ** 2 + sys.dq_on_grid())
    return V, sys.E ** 2 - sys.m ** 2


def _exp_int_q(sys: PseudoscalarSystem) -> np.ndarray:
    if isinstance(sys.q, GridFn):
        return cumint(sys.q_on_grid(), 0).values
    x, a = sys.grid.x, sys.grid.a
    return -(x ** 3 - a ** 3) / 3.0


def spinor_at_Em(sys: PseudoscalarSystem, k1: float, k2: float) -> Spinor:
    """Closed-form spinor at |E| = m; integrals anchored at the left node.

    E = +m:  Phi2 = k2 e^{-Q},  Phi1 = e^{Q} (k1 - 2m int Phi2 e^{-Q})
    E = -m:  Phi1 = k1 e^{Q},   Phi2 = e^{-Q} (k2 - 2m int Phi1 e^{Q})
    with Q = int q.
    """
    if not sys.at_threshold:
        raise ValueError(f"closed-form spinors need |E| = m (E={sys.E}, m={sys.m})")
    grid = sys.grid
    Q = _exp_int_q(sys)
    if k1 == 0 and k2 == 0:
        z = GridFn(grid, np.zeros(grid.n))
        return Spinor(z, z, degenerate=True)
    m = sys.m
    if sys.E > 0:
        phi2 = k2 * np.exp(-Q)
        inner = cumint(GridFn(grid, phi2 * np.exp(-Q)), 0).values
        phi1 = np.exp(Q) * (k1 - 2.0 * m * inner)
    else:
        phi1 = k1 * np.exp(Q)
        inner = cumint(GridFn(grid, phi1 * np.exp(Q)), 0).values
        phi2 = np.exp(-Q) * (k2 - 2.0 * m * inner)
    return Spinor(GridFn(grid, phi1), GridFn(grid, phi2))


def origin_constants(sys: PseudoscalarSystem, k1: float, k2: float) -> Tuple[float, float]:
    """Engine (k1, k2) reproducing the spinor whose integrals start at x = 0.

    Only for the builtin q = -x^2 at E = m, where
    Phi2 = k2 e^{x^3/3} and Phi1 = e^{-x^3/3} (k1 - 2 m k2 int_0^x e^{2t^3/3} dt).
    """
    if isinstance(sys.q, GridFn) or sys.E < 0:
        raise ValueError("origin-anchored constants are only defined for q = -x^2 at E = +m")
    a = sys.grid.a
    head = quad(lambda t: np.exp(2.0 * t ** 3 / 3.0), 0.0, a, epsabs=1e-14, epsrel=1e-13)[0]
    k1e = np.exp(-a ** 3 / 3.0) * (k1 - 2.0 * sys.m * k2 * head)
    k2e = k2 * np.exp(a ** 3 / 3.0)
    return float(k1e), float(k2e)


def component_residuals(sys: PseudoscalarSystem, sp: Spinor) -> Tuple[GridFn, GridFn]:
    q = sys.q_on_grid().values
    p1, p2 = sp.phi1.values, sp.phi2.values
    r1 = deriv1(sp.phi1).values - q * p1 + (sys.E + sys.m) * p2
    r2 = deriv1(sp.phi2).values + q * p2 - (sys.E - sys.m) * p1
    return GridFn(sys.grid, r1), GridFn(sys.grid, r2)


def seed_from_spinor(sys: PseudoscalarSystem, sp: Spinor) -> SolutionPair:
    """Upper component as a Schrodinger solution; Phi1' taken from the first equation."""
    if sp.degenerate:
        raise DegenerateSpinorError("zero spinor cannot seed a transformation")
    V, eps = to_schrodinger(sys)
    q = sys.q_on_grid().values
    dphi1 = q * sp.phi1.values - (sys.E + sys.m) * sp.phi2.values
    return SolutionPair(sp.phi1, GridFn(sys.grid, dphi1), eps, V)


def transformed_q(out: TransformOutput) -> GridFn:
    """q1 = psi_hat'/psi_hat, so that q1^2 + q1' = V3 - eps."""
    psi = out.psi_hat.values
    if not np.all(np.isfinite(psi)):
        raise ValueError("transformed solution is singular on the grid")
    probe = SolutionPair(out.psi_hat, out.dpsi_hat, out.energy, PotentialSpec.tabulated(out.V1))
    nodes = seed_nodes(probe)
    if nodes:
        raise ValueError(f"psi_hat has a node in {nodes[0]}; q1 is singular there")
    return GridFn(out.grid, out.dpsi_hat.values / psi)


def transformed_system(out: TransformOutput, m: float) -> PseudoscalarSystem:
    """Dirac system parametrized by q1 at |E| = m."""
    return PseudoscalarSystem(transformed_q(out), m, m)


def transformed_spinor(out: TransformOutput, m: float, k1: float, k2: float) -> Spinor:
    """Spinor of the transformed system, integrals evaluated by quadrature."""
    return spinor_at_Em(transformed_system(out, m), k1, k2)
