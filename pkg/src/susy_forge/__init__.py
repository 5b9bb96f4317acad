"""Confluent second-order SUSY (Darboux) transformations of 1D Schrodinger
operators, with Dirac and Fokker-Planck adapters and a closed-form oracle catalog."""
from .confluent import (
    ConfluentSeed,
    GammaRegularity,
    TransformOutput,
    build_seed,
    chained_darboux,
    gamma_regularity,
    missing_state,
    transform_at_energy,
    transformed_potential,
)
from .grid import Grid, GridFn, cumint, deriv1, deriv2, make_grid
from .schrodinger import CauchyData, PotentialSpec, SolutionPair, solve_inhomogeneous, solve_ivp

__version__ = "0.1.0"

__all__ = [
    "CauchyData", "ConfluentSeed", "GammaRegularity", "Grid", "GridFn", "PotentialSpec", "SolutionPair",
    "TransformOutput", "build_seed", "chained_darboux", "cumint", "deriv1", "deriv2", "gamma_regularity",
    "make_grid", "missing_state", "solve_inhomogeneous", "solve_ivp", "transform_at_energy",
    "transformed_potential",
]
