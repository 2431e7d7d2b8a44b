"""Finite SU(2) oscillator on triangular lattices.

Bivariate Krawtchouk polynomials (Rahman and Tratnik families), the exact
difference and ladder operators they diagonalize, and their continuum
limits.
"""

from .errors import (BoundaryCoefficientError, DegenerateParametersError, LatticeMismatchError,
                     OutOfLatticeError, PropagationError)
from .lattice import EXACT, FLOAT, GridFunction, LatticeOperator, TriLattice, enumerate_lattice
from .parameters import DerivedParams, FrequencyPair, RahmanParams, derive_params

__version__ = "0.1.0"

__all__ = [
    "BoundaryCoefficientError", "DegenerateParametersError", "DerivedParams", "EXACT", "FLOAT",
    "FrequencyPair", "GridFunction", "LatticeMismatchError", "LatticeOperator",
    "OutOfLatticeError", "PropagationError", "RahmanParams", "TriLattice", "__version__",
    "derive_params", "enumerate_lattice",
]
