"""Shift operators for F_C and their composition into arbitrary integer shifts.

``index_change(shift, params)`` returns coefficients ``Q`` with

    F_C(params) = sum_alpha Q_alpha theta^alpha F_C(params + shift)

over the basis ``(1, t1, t2, t3, t1t2, t1t3, t2t3, t1t2t3)``.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .algebra import ONE, ZERO, RationalFunction, _to_rf, solve_linear
from .errors import ExceptionalParameter, ParseError, SingularSystem
from .theta import (
    BASIS,
    NormalOperator,
    ReductionTable,
    apply_theta_normal,
    build_canonical_system,
    build_reduction_table,
)

__all__ = [
    "PARAM_NAMES",
    "ParameterVector",
    "ShiftVector",
    "ReductionResult",
    "VanishingFactor",
    "direct_operator",
    "inverse_operator",
    "index_change",
    "check_exceptional",
    "discriminant_factors",
    "discriminant",
    "singular_cubic",
    "continuous_denominator",
    "get_table",
    "compose_normal",
    "clear_caches",
]

PARAM_NAMES = ("a", "b", "c1", "c2", "c3")


@dataclass(frozen=True)
class ParameterVector:
    """The five parameters ``(a, b, c1, c2, c3)`` of F_C."""

    a: RationalFunction
    b: RationalFunction
    c1: RationalFunction
    c2: RationalFunction
    c3: RationalFunction

    def __post_init__(self):
        for name in PARAM_NAMES:
            value = _to_rf(getattr(self, name))
            if value.free_symbols() & {"z1", "z2", "z3"}:
                raise ValueError(f"parameter {name} must not depend on z1, z2, z3")
            object.__setattr__(self, name, value)

    @classmethod
    def of(cls, *values) -> "ParameterVector":
        """Build from five values or one sequence of five (numbers or strings)."""
        if len(values) == 1 and not isinstance(values[0], (str, int, RationalFunction)):
            values = tuple(values[0])
        if len(values) != 5:
            raise ValueError(f"expected 5 parameters, got {len(values)}")
        return cls(*(_to_rf(v) for v in values))

    @classmethod
    def symbolic(cls) -> "ParameterVector":
        return cls.of(*PARAM_NAMES)

    def __iter__(self):
        return iter((self.a, self.b, self.c1, self.c2, self.c3))

    def __getitem__(self, key):
        if isinstance(key, str):
            return getattr(self, key)
        return tuple(self)[key]

    def shifted(self, name: str, k: int = 1) -> "ParameterVector":
        values = dict(zip(PARAM_NAMES, self))
        values[name] = values[name] + k
        return ParameterVector(**values)

    def plus(self, shift: "ShiftVector") -> "ParameterVector":
        return ParameterVector(*(p + k for p, k in zip(self, shift)))

    def subs(self, bindings) -> "ParameterVector":
        return ParameterVector(*(p.subs(bindings) for p in self))

    def to_strings(self) -> list:
        return [str(p) for p in self]

    def key(self) -> str:
        return ",".join(self.to_strings())

    def is_numeric(self) -> bool:
        return all(p.is_constant() for p in self)

    def __str__(self):
        return "(" + ", ".join(self.to_strings()) + ")"


@dataclass(frozen=True)
class ShiftVector:
    """Integer shifts ``(n_a, n_b, m1, m2, m3)`` in parameter order."""

    n_a: int = 0
    n_b: int = 0
    m1: int = 0
    m2: int = 0
    m3: int = 0

    def __post_init__(self):
        for v in self:
            if isinstance(v, bool) or not isinstance(v, int):
                raise TypeError("shift entries must be integers")

    @classmethod
    def of(cls, values) -> "ShiftVector":
        if isinstance(values, str):
            try:
                values = [int(v) for v in values.split(",")]
            except ValueError:
                raise ParseError(f"invalid shift vector {values!r}") from None
        values = tuple(values)
        if len(values) != 5:
            raise ParseError(f"a shift vector has 5 entries, got {len(values)}")
        return cls(*values)

    def __iter__(self):
        return iter((self.n_a, self.n_b, self.m1, self.m2, self.m3))

    def __neg__(self):
        return ShiftVector(*(-v for v in self))

    def steps(self):
        """Unit steps ``(name, +1 | -1)`` in the fixed order a, b, c1, c2, c3."""
        for name, n in zip(PARAM_NAMES, self):
            for _ in range(abs(n)):
                yield name, 1 if n > 0 else -1

    def __str__(self):
        return ",".join(str(v) for v in self)


@dataclass(frozen=True)
class ReductionResult:
    """``F_C(old) = sum Q_alpha theta^alpha F_C(new_params)``."""

    Q: NormalOperator
    new_params: ParameterVector

    def to_json_dict(self) -> dict:
        return {"Q": self.Q.to_strings(), "newParams": self.new_params.to_strings()}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), ensure_ascii=False)

    @classmethod
    def from_json(cls, text) -> "ReductionResult":
        data = json.loads(text) if isinstance(text, str) else text
        if set(data) != {"Q", "newParams"} or len(data["Q"]) != 8 or len(data["newParams"]) != 5:
            raise ParseError("malformed ReductionResult document")
        return cls(NormalOperator.from_strings(data["Q"]), ParameterVector.of(data["newParams"]))


@dataclass(frozen=True)
class VanishingFactor:
    step: int
    operator: str
    factor: str

    def __str__(self):
        return f"step {self.step} ({self.operator}): {self.factor} = 0"


# -- caches ------------------------------------------------------------------

_lock = threading.Lock()
_tables: dict = {}
_operators: dict = {}


def clear_caches():
    with _lock:
        _tables.clear()
        _operators.clear()


def _cache_dir():
    path = os.environ.get("FC_CACHE_DIR")
    return Path(path) if path else None


def _disk_path(kind, key):
    root = _cache_dir()
    if root is None:
        return None
    digest = hashlib.sha256(f"{kind}|{key}".encode()).hexdigest()
    return root / f"{kind}-{digest}.json"


def _disk_load(kind, key):
    path = _disk_path(kind, key)
    if path is None or not path.exists():
        return None
    try:
        data = json.loads(path.read_text())
    except (OSError, ValueError):
        return None
    if data.get("key") != key:
        return None
    return data["value"]


def _disk_store(kind, key, value):
    path = _disk_path(kind, key)
    if path is None:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps({"key": key, "value": value}, ensure_ascii=False))
    tmp.replace(path)


def get_table(params: ParameterVector) -> ReductionTable:
    """Memoized reduction table for ``params``."""
    key = params.key()
    table = _tables.get(key)
    if table is not None:
        return table
    stored = _disk_load("table", key)
    if stored is not None:
        from .theta import CLOSURE

        system = build_canonical_system(tuple(params))
        entries = {m: NormalOperator.from_strings(v) for m, v in zip(CLOSURE, stored)}
        table = ReductionTable(system=system, entries=entries)
    else:
        table = build_reduction_table(build_canonical_system(tuple(params)))
        _disk_store("table", key, [table.entries[m].to_strings() for m in table.entries])
    with _lock:
        return _tables.setdefault(key, table)


# -- unit operators ------------------------------------------------------------

_UPPER = ("a", "b")
_LOWER = ("c1", "c2", "c3")


def _check_name(which):
    if which not in PARAM_NAMES:
        raise ValueError(f"unknown parameter {which!r}; expected one of {PARAM_NAMES}")


def direct_operator(which: str, params: ParameterVector) -> NormalOperator:
    """Step-up operator for ``a``/``b`` or step-down operator for ``c_i``.

    ``F_C(params + e_a) = (1/a)(a + t1 + t2 + t3) F_C(params)`` and
    ``F_C(params - e_ci) = (1/(c_i - 1))(c_i - 1 + t_i) F_C(params)``.
    """
    _check_name(which)
    if which in _UPPER:
        lead = params[which]
        if lead.is_zero():
            raise ExceptionalParameter([which], operator=f"{which}-up")
        inv = 1 / lead
        return NormalOperator((ONE, inv, inv, inv, ZERO, ZERO, ZERO, ZERO))
    lead = params[which] - 1
    if lead.is_zero():
        raise ExceptionalParameter([f"{which} - 1"], operator=f"{which}-down")
    coeffs = [ZERO] * 8
    coeffs[0] = ONE
    coeffs[int(which[1])] = 1 / lead
    return NormalOperator(tuple(coeffs))


def discriminant_factors(which: str) -> list:
    """Affine factors of the parameter discriminant for the inverse of ``which``.

    The factors are written in the parameters of the function the matching
    direct operator acts on, i.e. the lower end of an ``a``/``b`` step and
    the upper end of a ``c_i`` step.
    """
    _check_name(which)
    if which in _UPPER:
        uppers, lowers = (which,), (1, 2, 3)
    else:
        uppers, lowers = _UPPER, (int(which[1]),)
    factors = []
    for p in uppers:
        factors += [f"1 + {p} - c{i}" for i in lowers]
        pairs = [(i, j) for i in (1, 2, 3) for j in (1, 2, 3) if i < j and (i in lowers or j in lowers)]
        factors += [f"2 + {p} - c{i} - c{j}" for i, j in pairs]
        factors.append(f"3 + {p} - c1 - c2 - c3")
    return factors


def discriminant(which: str, params: ParameterVector | None = None) -> RationalFunction:
    """Product of :func:`discriminant_factors`, optionally evaluated at ``params``."""
    out = ONE
    for text in discriminant_factors(which):
        out = out * RationalFunction.parse(text)
    return out if params is None else _eval_params(out, dict(zip(PARAM_NAMES, params)))


def singular_cubic() -> RationalFunction:
    """Cubic factor of the z-denominator of every inverse operator."""
    z = [RationalFunction.symbol(f"z{i}") for i in (1, 2, 3)]
    out = RationalFunction.const(-1) + 10 * z[0] * z[1] * z[2]
    for i in range(3):
        out = out + 3 * z[i] - 3 * z[i] ** 2 + z[i] ** 3
        for j in range(3):
            if i != j:
                out = out - z[i] ** 2 * z[j] - z[i] * z[j]
    return out


def continuous_denominator() -> RationalFunction:
    """``singular_cubic() * (1 - z1 - z2 - z3)``."""
    z = [RationalFunction.symbol(f"z{i}") for i in (1, 2, 3)]
    return singular_cubic() * (1 - z[0] - z[1] - z[2])


def _inverse_target(which, params):
    return params.shifted(which, -1 if which in _UPPER else 1)


def _vanishing_discriminant(which, target):
    values = dict(zip(PARAM_NAMES, target))
    bad = []
    for text in discriminant_factors(which):
        if _eval_params(RationalFunction.parse(text), values).is_zero():
            bad.append(text)
    return bad


def _eval_params(f, values):
    return f.subs(values)


def compose_normal(Q: NormalOperator, O: NormalOperator, table: ReductionTable) -> NormalOperator:
    """Normal form of ``Q o O`` where ``table`` belongs to the function ``O`` acts on."""
    cache = {(0, 0, 0): O}

    def nf(alpha):
        hit = cache.get(alpha)
        if hit is None:
            i = next(k for k in range(3) if alpha[k])
            rest = list(alpha)
            rest[i] -= 1
            hit = apply_theta_normal(i + 1, nf(tuple(rest)), table)
            cache[alpha] = hit
        return hit

    out = [ZERO] * 8
    for q, alpha in zip(Q.coeffs, BASIS):
        if q.is_zero():
            continue
        v = nf(alpha)
        for s in range(8):
            if not v.coeffs[s].is_zero():
                out[s] = out[s] + q * v.coeffs[s]
    return NormalOperator(tuple(out))


def inverse_operator(which: str, params: ParameterVector, table: ReductionTable | None = None) -> NormalOperator:
    """Inverse of the direct operator for ``which``.

    For ``a`` or ``b`` the result lowers the parameter by one; for ``c_i`` it
    raises it by one. It acts on ``F_C(params)``. ``table`` must belong to the
    target parameters (``params`` with the shift applied) and is built when
    omitted.
    """
    _check_name(which)
    target = _inverse_target(which, params)
    if table is None:
        table = get_table(target)
    try:
        D = direct_operator(which, target)
    except ExceptionalParameter as exc:
        raise ExceptionalParameter(exc.factors, operator=f"{which}-inverse") from None
    # column alpha: normal form of theta^alpha o D on F_C(target)
    columns = [compose_normal(NormalOperator.basis(k), D, table) for k in range(8)]
    matrix = [[columns[c].coeffs[r] for c in range(8)] for r in range(8)]
    rhs = [ONE] + [ZERO] * 7
    try:
        coeffs = solve_linear(matrix, rhs)
    except SingularSystem:
        bad = _vanishing_discriminant(which, target) or ["determinant"]
        raise ExceptionalParameter(bad, operator=f"{which}-inverse") from None
    return NormalOperator(tuple(coeffs))


def _cached_unit(kind, which, params):
    key = f"{kind}|{which}|{params.key()}"
    hit = _operators.get(key)
    if hit is not None:
        return hit
    stored = _disk_load("op", key) if kind == "inverse" else None
    if stored is not None:
        op = NormalOperator.from_strings(stored)
    elif kind == "direct":
        op = direct_operator(which, params)
    else:
        op = inverse_operator(which, params)
        _disk_store("op", key, op.to_strings())
    with _lock:
        return _operators.setdefault(key, op)


def _unit_step(which, sign, current):
    """Operator expressing ``F_C(current)`` through ``F_C(current + sign e)``."""
    new = current.shifted(which, sign)
    if which in _UPPER:
        kind = "direct" if sign < 0 else "inverse"
    else:
        kind = "direct" if sign > 0 else "inverse"
    op = _cached_unit(kind, which, new)
    return op, new, kind


def index_change(shift, params: ParameterVector | Sequence | None = None) -> ReductionResult:
    """Express ``F_C(params)`` through ``F_C(params + shift)``.

    Unit steps run in the order a, b, c1, c2, c3; each intermediate result
    is reduced to normal form before the next step.
    """
    shift = shift if isinstance(shift, ShiftVector) else ShiftVector.of(shift)
    if params is None:
        params = ParameterVector.symbolic()
    elif not isinstance(params, ParameterVector):
        params = ParameterVector.of(params)
    Q = NormalOperator.identity()
    current = params
    for step, (which, sign) in enumerate(shift.steps(), start=1):
        try:
            op, new, kind = _unit_step(which, sign, current)
        except ExceptionalParameter as exc:
            raise ExceptionalParameter(exc.factors, step=step, operator=exc.operator) from None
        if Q.is_identity():
            Q = op
        else:
            Q = compose_normal(Q, op, get_table(new))
        current = new
    return ReductionResult(Q=Q, new_params=current)


def check_exceptional(shift, params: ParameterVector) -> list:
    """Vanishing factors that :func:`index_change` would meet along the chain."""
    shift = shift if isinstance(shift, ShiftVector) else ShiftVector.of(shift)
    found = []
    current = params
    for step, (which, sign) in enumerate(shift.steps(), start=1):
        new = current.shifted(which, sign)
        if which in _UPPER:
            kind = "direct" if sign < 0 else "inverse"
        else:
            kind = "direct" if sign > 0 else "inverse"
        if kind == "direct":
            lead = new[which] if which in _UPPER else new[which] - 1
            if lead.is_zero():
                name = which if which in _UPPER else f"{which} - 1"
                found.append(VanishingFactor(step, f"{which}-direct", name))
        else:
            lead = current[which] if which in _UPPER else current[which] - 1
            if lead.is_zero():
                name = which if which in _UPPER else f"{which} - 1"
                found.append(VanishingFactor(step, f"{which}-inverse", name))
            for text in _vanishing_discriminant(which, current):
                found.append(VanishingFactor(step, f"{which}-inverse", text))
        current = new
    return found
