"""Exact isometry testing and symmetrization for tuples of matrices over finite fields."""
from .errors import (BudgetExceeded, Degenerate, FieldTooSmall, InternalError, NonDivisor, NotClassTwo,
                     NotExponentP, NotInvertible, NotPGroup, ParseError, ShapeMismatch, StarIsoError)
from .ffield import FieldCtx, Fel, parse_field
from .exactla import Mat, MatTuple, Subspace, format_tuple, parse_tuple
from .forms import FormInstance, canonicalize, isometry_single
from .staralg import adjoint, decompose
from .isometry import isometry_general, isometry_test, verify_isometry
from .symmetrize import lovasz_flip, pit_witness, symmetrize
from .apps import CayleyTable, QuadraticForm, baer_reduce, iqf1s, pgroup_iso, pseudo_isometry

__version__ = "0.1.0"
