"""Builtin seeds: a potential, a transformation function u and, where one
exists, the oracle entry whose antiderivative of u^2 defines the closed-form gamma convention."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .dirac import PseudoscalarSystem, origin_constants, seed_from_spinor, spinor_at_Em
from .fokker_planck import seed_from_hermite
from .grid import Grid
from .schrodinger import CauchyData, PotentialSpec, SolutionPair, solve_ivp

SEEDS = {
    "constant": ("decay", "bound", "cosh", "sin", "general"),
    "quartic_dirac": ("spinor",),
    "oscillator_fp": ("hermite",),
}
BUILTIN_SYSTEMS = tuple(SEEDS)
DEFAULT_SEED = {"constant": "decay", "quartic_dirac": "spinor", "oscillator_fp": "hermite"}


@dataclass(frozen=True)
class Seed:
    u: SolutionPair
    oracle: Optional[str] = None  # entry carrying F for gamma calibration
    oracle_params: Dict[str, float] = field(default_factory=dict)


def _ivp_from_closed_form(V: PotentialSpec, lam: float, grid: Grid, f, df) -> SolutionPair:
    a = grid.a
    return solve_ivp(V, lam, CauchyData(a, float(f(a)), float(df(a))), grid)


def constant_seed(kind: str, grid: Grid, c: float = 1.0, eps: Optional[float] = None,
                  k1: float = 1.0, k2: float = 1.0) -> Seed:
    """Seeds of V = c^2.  ``eps`` is the factorization energy (0 for ``decay``)."""
    V = PotentialSpec.constant(c)
    if kind == "decay":
        u = _ivp_from_closed_form(V, 0.0, grid, lambda x: np.exp(-c * x), lambda x: -c * np.exp(-c * x))
        return Seed(u, "v3rosu", {"c": c})
    if eps is None:
        raise ValueError(f"seed {kind!r} needs eps")
    p = {"c": c, "eps": eps}
    if kind == "sin":
        if eps <= c * c:
            raise ValueError("the sine seed needs eps > c^2")
        s = np.sqrt(eps - c * c)
        u = _ivp_from_closed_form(V, eps, grid, lambda x: np.sin(s * x), lambda x: s * np.cos(s * x))
        return Seed(u, "trig-V3", p)
    if eps >= c * c:
        raise ValueError(f"seed {kind!r} needs eps < c^2")
    s = np.sqrt(c * c - eps)
    if kind == "bound":
        u = _ivp_from_closed_form(V, eps, grid, lambda x: np.exp(s * x), lambda x: s * np.exp(s * x))
        return Seed(u, "conbound-V3", p)
    if kind == "cosh":
        u = _ivp_from_closed_form(V, eps, grid, lambda x: 2 * np.cosh(s * x), lambda x: 2 * s * np.sinh(s * x))
        return Seed(u, "hyperbolic-V3", p)
    if kind == "general":
        u = _ivp_from_closed_form(V, eps, grid,
                                  lambda x: k1 * np.exp(s * x) + k2 * np.exp(-s * x),
                                  lambda x: s * (k1 * np.exp(s * x) - k2 * np.exp(-s * x)))
        return Seed(u, "V3gen", dict(p, k1=k1, k2=k2))
    raise ValueError(f"unknown constant-potential seed {kind!r}; choose from {SEEDS['constant']}")


def dirac_seed(grid: Grid, m: float = 1.0, k1: float = 1.0, k2: float = 0.0) -> Seed:
    """Upper spinor component at E = m for q = -x^2, constants referred to x = 0."""
    sys = PseudoscalarSystem.inverted_oscillator(grid, m)
    u = seed_from_spinor(sys, spinor_at_Em(sys, *origin_constants(sys, k1, k2)))
    # closed-form F only for u = e^{-x^3/3} on the positive axis
    if k1 == 1 and k2 == 0 and grid.a > 0:
        return Seed(u, "hatpsiex", {})
    return Seed(u)


def hermite_seed(grid: Grid, k: int) -> Seed:
    u = seed_from_hermite(k, grid)
    return Seed(u, "v3fok", {"k": int(k)})


def builtin_seed(system: str, grid: Grid, seed: Optional[str] = None, **p) -> Seed:
    seed = seed or DEFAULT_SEED.get(system)
    if system == "constant":
        return constant_seed(seed, grid, p.get("c", 1.0), p.get("eps"), p.get("k1", 1.0), p.get("k2", 1.0))
    if system == "quartic_dirac":
        return dirac_seed(grid, p.get("m", 1.0), p.get("k1", 1.0), p.get("k2", 0.0))
    if system == "oscillator_fp":
        return hermite_seed(grid, p.get("k", 0))
    raise ValueError(f"unknown builtin system {system!r}; choose from {sorted(SEEDS)}")
