"""
Frenkel-Kontorova models on the Fibonacci quasi-crystal

Exact Fibonacci-chain geometry, a pattern-equivariant substrate potential,
anti-integrable equilibria and level-by-level minimal configurations.
"""

__version__ = "1.0.0"
__author__ = "FKQC Team"

from .errors import ContractionError, ConvergenceError, FKQCError, NumericalError, ValidationError
from .golden import DEFAULT_THETA, TAU, GoldenNumber, tau_power
from .minimal import LevelOptimizer, OptimizerSettings, lift, optimize_level
from .models import AILParams, AnchorFn, Configuration, PotentialSpec, Word
from .parser import AnchorTableParser
from .solver import equilibrium, solve_fixed_point, solve_tridiagonal

__all__ = [
    "AILParams",
    "AnchorFn",
    "AnchorTableParser",
    "Configuration",
    "ContractionError",
    "ConvergenceError",
    "DEFAULT_THETA",
    "FKQCError",
    "GoldenNumber",
    "LevelOptimizer",
    "NumericalError",
    "OptimizerSettings",
    "PotentialSpec",
    "TAU",
    "ValidationError",
    "Word",
    "equilibrium",
    "lift",
    "optimize_level",
    "solve_fixed_point",
    "solve_tridiagonal",
    "tau_power",
]
