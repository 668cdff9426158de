"""Exact counting experiments for images of point sets under SL_2(F_p) and H_1(F_p)."""
from .errors import FinpackError
from .fp_core import FieldCtx, Line, PointSet, field_new
from .groups import H1Elem, MatrixSet, SL2Elem, enumerate_h1, enumerate_sl2

__all__ = [
    "FinpackError", "FieldCtx", "Line", "PointSet", "field_new",
    "H1Elem", "MatrixSet", "SL2Elem", "enumerate_h1", "enumerate_sl2",
]
__version__ = "0.1.0"
