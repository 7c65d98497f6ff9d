"""
Conic Bundles - Exact Core
精确有理数、多元多项式与无分式线性代数
"""

from .rat import Rat, to_rat, rat_str, is_rational_square, rational_sqrt
from .poly import MPoly, VarSet, poly_arith, UVW, T01, X6, TVAR
from .matrix import PolyMatrix, det, adjugate_inverse
from .univariate import uni_tools, is_separable, binary_is_separable

__all__ = [
    "Rat", "to_rat", "rat_str", "is_rational_square", "rational_sqrt",
    "MPoly", "VarSet", "poly_arith", "UVW", "T01", "X6", "TVAR",
    "PolyMatrix", "det", "adjugate_inverse",
    "uni_tools", "is_separable", "binary_is_separable",
]
