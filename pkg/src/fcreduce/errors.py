"""Exception types raised by the reduction engine and its helpers."""


class FcError(Exception):
    """Base class for all errors raised by :mod:`fcreduce`."""

    kind = "FcError"

    def to_dict(self):
        return {"type": self.kind, "message": str(self)}


class DivisionByZero(FcError, ZeroDivisionError):
    kind = "DivisionByZero"


class UnknownSymbol(FcError, KeyError):
    kind = "UnknownSymbol"

    def __str__(self):
        return Exception.__str__(self)


class ParseError(FcError, ValueError):
    kind = "ParseError"


class SingularSystem(FcError, ArithmeticError):
    """Raised by the linear solver when no nonzero pivot is left."""

    kind = "SingularSystem"

    def __init__(self, rank, size):
        super().__init__(f"singular system: rank {rank} < {size}")
        self.rank = rank
        self.size = size

    def to_dict(self):
        return {**super().to_dict(), "rank": self.rank, "size": self.size}


class UnreducibleMonomial(FcError, ValueError):
    kind = "UnreducibleMonomial"


class ExceptionalParameter(FcError, ArithmeticError):
    """A parameter combination makes a shift operator undefined.

    ``factors`` lists the vanishing expressions; ``step`` is the position
    in the shift chain (``None`` outside :func:`index_change`).
    """

    kind = "ExceptionalParameter"

    def __init__(self, factors, step=None, operator=None):
        self.factors = list(factors)
        self.step = step
        self.operator = operator
        where = f" at step {step}" if step is not None else ""
        op = f" ({operator})" if operator else ""
        super().__init__(
            f"exceptional parameters{op}{where}: vanishing factor(s) "
            + ", ".join(self.factors)
        )

    def to_dict(self):
        return {
            **super().to_dict(),
            "factors": self.factors,
            "step": self.step,
            "operator": self.operator,
        }


class PoleInParameter(FcError, ArithmeticError):
    kind = "PoleInParameter"


class EvaluationFailure(FcError, ArithmeticError):
    kind = "EvaluationFailure"
