"""Numerical laboratory for beta-ensembles and their operator limits.

Samplers for the classical tridiagonal/unitary/discrete-Schrodinger
models, simulations of their scaling-limit operators (stochastic Airy,
carousel-driven bulk phases, Dirac boundary problems), closed-form
reference laws (Painleve edge curves, tail exponents, gap and repulsion
rates), and the cross-validation suite tying the routes together.
"""

__version__ = "0.1.0"

from . import (acceptance, airy, carousel, cli, ensembles, painleve, rng,
               stats, szego, tridiag)
from .rng import RngStream

__all__ = [
    "__version__",
    "RngStream",
    "acceptance",
    "airy",
    "carousel",
    "cli",
    "ensembles",
    "painleve",
    "rng",
    "stats",
    "szego",
    "tridiag",
]
