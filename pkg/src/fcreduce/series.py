"""Truncated Taylor series of F_C and numerical checks of reduction results.

The series is

    F_C = sum (a)_{|m|} (b)_{|m|} / ((c1)_{m1} (c2)_{m2} (c3)_{m3}) z^m / m!

with ``|m| = m1 + m2 + m3``. By default every index runs from 0 to
``order`` (``truncation="box"``); ``truncation="total"`` keeps only
``|m| <= order``.

Exact rational arithmetic is used when all inputs are rational, floats
otherwise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .algebra import RationalFunction, _to_rf
from .errors import DivisionByZero, EvaluationFailure, FcError, PoleInParameter
from .reduction import ParameterVector, ReductionResult
from .theta import BASIS

__all__ = [
    "TRUNCATIONS",
    "DERIV_MODES",
    "fc_series",
    "fc_series_deriv",
    "theta_series_all",
    "convergence_check",
    "PointReport",
    "VerificationReport",
    "verify_reduction",
]

TRUNCATIONS = ("box", "total")
DERIV_MODES = ("d", "theta", "termwise")


def _number(x, bindings=None):
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers")
    if isinstance(x, float):
        return x
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    f = _to_rf(x)
    if bindings:
        f = f.subs({k: v for k, v in bindings.items() if k in f.free_symbols()})
    if not f.is_constant():
        raise EvaluationFailure(f"unbound symbols {sorted(f.free_symbols())} in {f}")
    return f.to_fraction()


def _coerce(params, z, bindings=None):
    if isinstance(params, ParameterVector):
        params = tuple(params)
    params = [_number(p, bindings) for p in params]
    z = [_number(v, bindings) for v in z]
    if len(params) != 5 or len(z) != 3:
        raise ValueError("expected 5 parameters and 3 arguments")
    if any(isinstance(v, float) for v in params + z):
        params = [float(v) for v in params]
        z = [float(v) for v in z]
    return params, z


def _upper(a, b, n):
    """``(a)_k (b)_k`` for ``k < n``."""
    out = [a * 0 + 1]
    for k in range(1, n):
        out.append(out[-1] * (a + k - 1) * (b + k - 1))
    return out


def _lower(c, z, n, shift=0, weight=0, name="c"):
    """``m^weight z^m / ((c)_{m+shift} m!)`` for ``m < n``."""
    poch = z * 0 + 1
    for k in range(shift):
        if c + k == 0:
            raise PoleInParameter(f"{name} = {c} makes the Pochhammer symbol vanish")
        poch *= c + k
    out = []
    term = 1 / poch
    for m in range(n):
        if m:
            ck = c + shift + m - 1
            if ck == 0:
                raise PoleInParameter(f"{name} = {c} makes the Pochhammer symbol vanish")
            term = term * z / (ck * m)
        out.append(term * m**weight if weight else term)
    return out


def _convolve(x, y):
    out = [x[0] * 0] * (len(x) + len(y) - 1)
    for i, xi in enumerate(x):
        if xi == 0:
            continue
        for j, yj in enumerate(y):
            out[i + j] += xi * yj
    return out


def _sum(params, z, order, truncation, shifts=(0, 0, 0), weights=(0, 0, 0), bounds=None):
    if order < 0:
        raise ValueError("order must be nonnegative")
    if truncation not in TRUNCATIONS:
        raise ValueError(f"truncation must be one of {TRUNCATIONS}")
    a, b, *cs = params
    bounds = bounds or (order, order, order)
    if min(bounds) < 0:
        return z[0] * 0
    rows = [
        _lower(c, zi, n + 1, s, w, f"c{i}")
        for i, (c, zi, n, s, w) in enumerate(zip(cs, z, bounds, shifts, weights), start=1)
    ]
    conv = _convolve(_convolve(rows[0], rows[1]), rows[2])
    if truncation == "total":
        conv = conv[: order + 1]
    lift = sum(shifts)
    ab = _upper(a, b, len(conv) + lift)[lift:]
    return sum(u * v for u, v in zip(ab, conv))


def fc_series(params, z, order: int, *, truncation: str = "box", bindings=None):
    """Truncated series value of ``F_C(params; z)``.

    ``params`` holds ``(a, b, c1, c2, c3)``; entries may be numbers or
    expressions resolved through ``bindings``.
    """
    params, z = _coerce(params, z, bindings)
    return _sum(params, z, order, truncation)


def fc_series_deriv(params, z, order: int, deriv=(0, 0, 0), *, mode: str = "d",
                    truncation: str = "box", bindings=None):
    """Derivative of the truncated series.

    ``mode="d"`` sums the series of ``d^k F/dz^k`` itself, truncated with the
    same rule after differentiation. ``"termwise"`` differentiates the already
    truncated series of ``F``. ``"theta"`` applies ``theta_i = z_i d/dz_i``.
    """
    if mode not in DERIV_MODES:
        raise ValueError(f"mode must be one of {DERIV_MODES}")
    deriv = tuple(int(d) for d in deriv)
    if len(deriv) != 3 or min(deriv) < 0:
        raise ValueError("deriv must hold three nonnegative integers")
    params, z = _coerce(params, z, bindings)
    if mode == "theta":
        return _sum(params, z, order, truncation, weights=deriv)
    if mode == "d":
        return _sum(params, z, order, truncation, shifts=deriv)
    if truncation == "total":
        cut = order - sum(deriv)
        return _sum(params, z, cut, "total", shifts=deriv) if cut >= 0 else z[0] * 0
    return _sum(params, z, order, "box", shifts=deriv, bounds=tuple(order - d for d in deriv))


def theta_series_all(params, z, order: int, *, truncation: str = "box", bindings=None) -> list:
    """``theta^alpha F_C`` for every basis monomial, in basis order."""
    params, z = _coerce(params, z, bindings)
    return [_sum(params, z, order, truncation, weights=alpha) for alpha in BASIS]


def convergence_check(z) -> bool:
    """Whether ``sqrt(z1) + sqrt(z2) + sqrt(z3) < 1``.

    Negative arguments fall outside the criterion; they return True with a
    warning.
    """
    values = [float(_number(v)) for v in z]
    if any(v < 0 for v in values):
        warnings.warn("convergence criterion is only stated for nonnegative arguments", stacklevel=2)
        return True
    return sum(math.sqrt(v) for v in values) < 1


@dataclass
class PointReport:
    z: tuple
    lhs: object = None
    rhs: object = None
    abs_dev: float = math.nan
    rel_dev: float = math.nan
    passed: bool = False
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "z": [str(v) for v in self.z],
            "lhs": None if self.lhs is None else float(self.lhs),
            "rhs": None if self.rhs is None else float(self.rhs),
            "abs_dev": self.abs_dev,
            "rel_dev": self.rel_dev,
            "passed": self.passed,
            "error": self.error,
        }


@dataclass
class VerificationReport:
    points: list = field(default_factory=list)
    tolerance: float = 1e-8
    order: int = 30

    @property
    def passed(self) -> bool:
        return bool(self.points) and all(p.passed for p in self.points)

    @property
    def max_deviation(self) -> float:
        devs = [p.rel_dev if abs(p.lhs or 0) >= ABS_FLOOR else p.abs_dev
                for p in self.points if p.error is None]
        return max(devs, default=math.nan)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "tolerance": self.tolerance,
            "order": self.order,
            "points": [p.to_dict() for p in self.points],
        }


ABS_FLOOR = 1e-12


def verify_reduction(result: ReductionResult, old_params, points: Iterable[Sequence], order: int = 30,
                     tol: float = 1e-8, *, bindings: Mapping | None = None,
                     truncation: str = "box") -> VerificationReport:
    """Compare ``F_C(old)`` with ``sum Q_alpha theta^alpha F_C(new)`` at sample points."""
    bindings = dict(bindings or {})
    report = VerificationReport(tolerance=tol, order=order)
    if not isinstance(old_params, ParameterVector):
        old_params = ParameterVector.of(old_params)
    for point in points:
        z = tuple(_number(v, bindings) for v in point)
        entry = PointReport(z=z)
        report.points.append(entry)
        try:
            lhs = fc_series(old_params, z, order, truncation=truncation, bindings=bindings)
            thetas = theta_series_all(result.new_params, z, order, truncation=truncation, bindings=bindings)
            values = dict(bindings)
            values.update({f"z{i}": v for i, v in enumerate(z, start=1)})
            rhs = 0
            for q, t in zip(result.Q.coeffs, thetas):
                if q.is_zero():
                    continue
                qv = _eval_coefficient(q, values)
                rhs = rhs + (float(qv) * t if isinstance(t, float) else qv * t)
        except (FcError, ZeroDivisionError) as exc:
            entry.error = f"{type(exc).__name__}: {exc}"
            continue
        entry.lhs, entry.rhs = lhs, rhs
        entry.abs_dev = float(abs(Fraction(lhs) - Fraction(rhs)) if not isinstance(lhs, float) else abs(lhs - rhs))
        entry.rel_dev = entry.abs_dev / abs(float(lhs)) if lhs != 0 else math.inf
        entry.passed = entry.abs_dev <= tol if abs(float(lhs)) < ABS_FLOOR else entry.rel_dev <= tol
    return report


def _eval_coefficient(q: RationalFunction, values):
    needed = {k: v for k, v in values.items() if k in q.free_symbols()}
    floats = {k: v for k, v in needed.items() if isinstance(v, float)}
    if not floats:
        try:
            return q.evaluate(needed)
        except DivisionByZero as exc:
            raise EvaluationFailure(str(exc)) from None
    exact = q.subs({k: v for k, v in needed.items() if k not in floats})
    num = _float_poly(exact.num, floats)
    den = _float_poly(exact.den, floats)
    if den == 0:
        raise EvaluationFailure(f"coefficient {q} has a pole at the sample point")
    return num / den


def _float_poly(poly, values):
    from .algebra import SYMBOLS

    total = 0.0
    for exps, c in poly.terms().items():
        term = float(c)
        for idx, e in enumerate(exps):
            if e:
                term *= values[SYMBOLS.names[idx]] ** e
        total += term
    return total
