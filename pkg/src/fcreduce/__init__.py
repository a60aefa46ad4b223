"""Differential reduction of the three-variable Lauricella function F_C."""

from .algebra import Polynomial, RationalFunction, parse
from .errors import (
    DivisionByZero,
    EvaluationFailure,
    ExceptionalParameter,
    FcError,
    ParseError,
    PoleInParameter,
    SingularSystem,
    UnknownSymbol,
    UnreducibleMonomial,
)
from .reduction import (
    ParameterVector,
    ReductionResult,
    ShiftVector,
    check_exceptional,
    direct_operator,
    index_change,
    inverse_operator,
)
from .series import convergence_check, fc_series, fc_series_deriv, theta_series_all, verify_reduction
from .theta import BASIS, NormalOperator, ThetaOperator, apply_theta_normal, normal_reduce, op_compose

__all__ = [
    "BASIS",
    "DivisionByZero",
    "EvaluationFailure",
    "ExceptionalParameter",
    "FcError",
    "NormalOperator",
    "ParameterVector",
    "ParseError",
    "PoleInParameter",
    "Polynomial",
    "RationalFunction",
    "ReductionResult",
    "ShiftVector",
    "SingularSystem",
    "ThetaOperator",
    "UnknownSymbol",
    "UnreducibleMonomial",
    "apply_theta_normal",
    "check_exceptional",
    "convergence_check",
    "direct_operator",
    "fc_series",
    "fc_series_deriv",
    "index_change",
    "inverse_operator",
    "normal_reduce",
    "op_compose",
    "parse",
    "theta_series_all",
    "verify_reduction",
]
__version__ = "0.1.0"
