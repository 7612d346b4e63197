"""Exact symbolic calculus on odd symplectic superspace.

Grassmann-graded polynomial arithmetic over a rational-function field,
odd Poisson brackets, BV Delta operators on functions and semidensities,
a constructive Darboux normalization, graded Hamiltonian flows, the
multivector/differential-form dictionary, and pull-back invariants on
codimension-(1.1) surfaces.  Every identity the library implements is
exposed as a machine-checkable zero residual.
"""

from .symbols import Chart, Parity, SymbolError, SymbolTable, standard_chart, standard_table
from .scalars import Scalar, ScalarError
from .superexpr import ParityError, SuperExpr
from .grammar import ParseError, parse_expr, render_expr

__all__ = [
    "Chart", "Parity", "SymbolError", "SymbolTable", "standard_chart",
    "standard_table", "Scalar", "ScalarError", "ParityError", "SuperExpr",
    "ParseError", "parse_expr", "render_expr",
]

__version__ = "0.1.0"
