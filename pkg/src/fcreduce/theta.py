"""Operators in theta_1, theta_2, theta_3 and their reduction modulo the F_C system.

An operator is stored in normal order: every coefficient stands to the left
of its theta-monomial. Modulo the PDE system of F_C every operator is
equivalent to a unique combination of the eight square-free monomials in
:data:`BASIS`.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import product
from math import comb
from typing import Mapping, Sequence

from .algebra import ONE, ZERO, RationalFunction, _to_rf, solve_linear_many
from .errors import UnreducibleMonomial

__all__ = [
    "BASIS",
    "BASIS_LABELS",
    "CLOSURE",
    "ThetaOperator",
    "NormalOperator",
    "CanonicalSystem",
    "ReductionTable",
    "op_compose",
    "build_canonical_system",
    "build_reduction_table",
    "normal_reduce",
    "apply_theta_normal",
]

BASIS = (
    (0, 0, 0),
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (1, 1, 0),
    (1, 0, 1),
    (0, 1, 1),
    (1, 1, 1),
)
BASIS_LABELS = ("1", "t1", "t2", "t3", "t1t2", "t1t3", "t2t3", "t1t2t3")
SLOT = {m: k for k, m in enumerate(BASIS)}


def _unit(i):
    e = [0, 0, 0]
    e[i - 1] = 1
    return tuple(e)


def _add_mono(x, y):
    return (x[0] + y[0], x[1] + y[1], x[2] + y[2])


def _others(i):
    return tuple(j for j in (1, 2, 3) if j != i)


SQUARES = ((2, 0, 0), (0, 2, 0), (0, 0, 2))
SQUARE_TIMES = tuple(
    _add_mono(SQUARES[i - 1], _unit(j)) for i in (1, 2, 3) for j in _others(i)
)
SQUARE_TIMES_PAIR = ((2, 1, 1), (1, 2, 1), (1, 1, 2))
CLOSURE = SQUARES + SQUARE_TIMES + SQUARE_TIMES_PAIR


def _check_mono(m):
    if len(m) != 3 or any((not isinstance(e, int)) or e < 0 for e in m):
        raise UnreducibleMonomial(f"invalid theta-monomial {m!r}")
    return tuple(m)


def _mono_str(m):
    parts = []
    for i, e in enumerate(m, start=1):
        if e == 1:
            parts.append(f"t{i}")
        elif e > 1:
            parts.append(f"t{i}^{e}")
    return "*".join(parts) or "1"


class ThetaOperator:
    """Finite sum ``sum_m c_m * theta^m`` with rational-function coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Sequence[int], object] | None = None):
        clean = {}
        for m, c in (terms or {}).items():
            c = _to_rf(c)
            if not c.is_zero():
                clean[_check_mono(tuple(m))] = c
        self.terms = clean

    @classmethod
    def theta(cls, i: int) -> "ThetaOperator":
        return cls({_unit(i): ONE})

    @classmethod
    def monomial(cls, m, coeff=1) -> "ThetaOperator":
        return cls({tuple(m): coeff})

    @classmethod
    def scalar(cls, f) -> "ThetaOperator":
        return cls({(0, 0, 0): f})

    def __add__(self, other):
        other = _as_operator(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, ZERO) + c
        return ThetaOperator(out)

    __radd__ = __add__

    def __neg__(self):
        return ThetaOperator({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_operator(other))

    def __rsub__(self, other):
        return _as_operator(other) - self

    def scale(self, f) -> "ThetaOperator":
        """Left multiplication by the coefficient ``f``."""
        f = _to_rf(f)
        return ThetaOperator({m: f * c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, ThetaOperator):
            return op_compose(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return _as_operator(other) * self

    def __eq__(self, other):
        if not isinstance(other, ThetaOperator):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset((m, str(c)) for m, c in self.terms.items()))

    def max_exponent(self) -> int:
        return max((max(m) for m in self.terms), default=0)

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def coefficient(self, m) -> RationalFunction:
        return self.terms.get(tuple(m), ZERO)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (sum(m), [-e for e in m])):
            parts.append(f"({self.terms[m]})*{_mono_str(m)}")
        return " + ".join(parts)

    def __repr__(self):
        return f"ThetaOperator({str(self)!r})"


def _as_operator(x) -> ThetaOperator:
    if isinstance(x, ThetaOperator):
        return x
    if isinstance(x, NormalOperator):
        return x.to_operator()
    return ThetaOperator.scalar(x)


def _theta_power(f: RationalFunction, gamma) -> RationalFunction:
    for i, k in enumerate(gamma, start=1):
        for _ in range(k):
            if f.is_zero():
                return f
            f = f.theta(i)
    return f


def op_compose(L: ThetaOperator, M: ThetaOperator) -> ThetaOperator:
    """Normal-ordered product ``L o M``.

    Moves each theta-monomial of ``L`` past the coefficients of ``M`` by the
    Leibniz rule ``theta^a g = sum_c binom(a, c) theta^c(g) theta^(a-c)``.
    """
    L, M = _as_operator(L), _as_operator(M)
    out = defaultdict(lambda: ZERO)
    derived = {}
    for alpha, f in L.terms.items():
        for beta, g in M.terms.items():
            for gamma in product(*(range(e + 1) for e in alpha)):
                key = (beta, gamma)
                dg = derived.get(key)
                if dg is None:
                    dg = derived[key] = _theta_power(g, gamma)
                if dg.is_zero():
                    continue
                mult = comb(alpha[0], gamma[0]) * comb(alpha[1], gamma[1]) * comb(alpha[2], gamma[2])
                mono = (
                    alpha[0] - gamma[0] + beta[0],
                    alpha[1] - gamma[1] + beta[1],
                    alpha[2] - gamma[2] + beta[2],
                )
                term = f * dg
                out[mono] = out[mono] + (term * mult if mult != 1 else term)
    return ThetaOperator(out)


@dataclass(frozen=True)
class NormalOperator:
    """Coefficients over ``(1, t1, t2, t3, t1t2, t1t3, t2t3, t1t2t3)``."""

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(_to_rf(c) for c in self.coeffs)
        if len(cs) != 8:
            raise ValueError(f"a normal operator has 8 coefficients, got {len(cs)}")
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def basis(cls, k) -> "NormalOperator":
        if isinstance(k, tuple):
            k = SLOT[k]
        return cls(tuple(ONE if j == k else ZERO for j in range(8)))

    @classmethod
    def identity(cls) -> "NormalOperator":
        return cls.basis(0)

    @classmethod
    def zero(cls) -> "NormalOperator":
        return cls((ZERO,) * 8)

    @classmethod
    def from_strings(cls, items: Sequence[str]) -> "NormalOperator":
        return cls(tuple(_to_rf(s) for s in items))

    def __getitem__(self, k):
        if isinstance(k, tuple):
            k = SLOT[k]
        elif isinstance(k, str):
            k = BASIS_LABELS.index(k)
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self):
        return 8

    def __add__(self, other):
        return NormalOperator(tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return NormalOperator(tuple(x - y for x, y in zip(self.coeffs, other.coeffs)))

    def scale(self, f) -> "NormalOperator":
        f = _to_rf(f)
        return NormalOperator(tuple(f * c for c in self.coeffs))

    def is_identity(self) -> bool:
        return self.coeffs[0].is_one() and all(c.is_zero() for c in self.coeffs[1:])

    def to_operator(self) -> ThetaOperator:
        return ThetaOperator(dict(zip(BASIS, self.coeffs)))

    def to_strings(self) -> list:
        return [str(c) for c in self.coeffs]

    def subs(self, bindings) -> "NormalOperator":
        return NormalOperator(tuple(c.subs(bindings) for c in self.coeffs))

    def __str__(self):
        return "[" + ", ".join(self.to_strings()) + "]"


@dataclass(frozen=True)
class CanonicalSystem:
    """``theta_i^2 F = L_i F`` with square-free ``L_i`` for i = 1, 2, 3."""

    params: tuple
    L: tuple
    D0: RationalFunction

    def S(self, i: int) -> RationalFunction:
        return self.L[i - 1].coefficient((0, 0, 0))

    def R(self, i: int, m: int) -> RationalFunction:
        return self.L[i - 1].coefficient(_unit(m))

    def P(self, i: int, j: int, k: int) -> RationalFunction:
        """Coefficient of ``theta_j theta_k`` (j != k) in ``L_i``."""
        if j == k:
            raise ValueError("P needs two distinct theta indices")
        return self.L[i - 1].coefficient(_add_mono(_unit(j), _unit(k)))

    def vector(self, i: int) -> NormalOperator:
        return NormalOperator(tuple(self.L[i - 1].coefficient(m) for m in BASIS))


def _z(i):
    return RationalFunction.symbol(f"z{i}")


def build_canonical_system(params: Sequence) -> CanonicalSystem:
    """Solve the three F_C equations for ``theta_1^2, theta_2^2, theta_3^2``.

    Starts from ``theta_i (theta_i + c_i - 1) F = z_i (a + T)(b + T) F`` with
    ``T = theta_1 + theta_2 + theta_3`` and eliminates the squares jointly.
    """
    a, b, c1, c2, c3 = (_to_rf(p) for p in params)
    cs = (c1, c2, c3)
    th = [ThetaOperator.theta(i) for i in (1, 2, 3)]
    total = th[0] + th[1] + th[2]
    upper = op_compose(total + a, total + b)
    rows, rhs = [], []
    columns = BASIS[:7]
    for i in (1, 2, 3):
        eq = op_compose(th[i - 1], th[i - 1] + (cs[i - 1] - 1)) - op_compose(
            ThetaOperator.scalar(_z(i)), upper
        )
        row, r = [ZERO] * 3, {}
        for m, c in eq.terms.items():
            if m in SQUARES:
                row[SQUARES.index(m)] = c
            elif m in SLOT and SLOT[m] < 7:
                r[m] = -c
            else:
                raise AssertionError(f"unexpected monomial {m} in the F_C system")
        rows.append(row)
        rhs.append([r.get(m, ZERO) for m in columns])
    X = solve_linear_many(rows, rhs)
    L = tuple(ThetaOperator(dict(zip(columns, X[i]))) for i in range(3))
    D0 = 1 - _z(1) - _z(2) - _z(3)
    return CanonicalSystem(params=(a, b, c1, c2, c3), L=L, D0=D0)


@dataclass(frozen=True, eq=False)
class ReductionTable:
    """Normal forms of the twelve non-square-free monomials in :data:`CLOSURE`.

    Higher monomials are reduced on request by peeling one theta at a time;
    those results are memoized in a private cache.
    """

    system: CanonicalSystem
    entries: Mapping
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def params(self):
        return self.system.params

    def __getitem__(self, mono) -> NormalOperator:
        return self.normal_form(tuple(mono))

    def __contains__(self, mono):
        return tuple(mono) in self.entries

    def normal_form(self, mono, peel: bool = True) -> NormalOperator:
        mono = _check_mono(tuple(mono))
        if mono in SLOT:
            return NormalOperator.basis(mono)
        hit = self.entries.get(mono)
        if hit is not None:
            return hit
        if not peel:
            raise UnreducibleMonomial(f"{_mono_str(mono)} is outside the reduction table")
        hit = self._cache.get(mono)
        if hit is None:
            l = max(range(3), key=lambda k: (mono[k], -k))
            rest = list(mono)
            rest[l] -= 1
            hit = apply_theta_normal(l + 1, self.normal_form(tuple(rest)), self)
            self._cache[mono] = hit
        return hit


def _split(op: ThetaOperator, known: Mapping, unknowns: Sequence):
    """Reduce ``op`` to basis coefficients plus coefficients of unknown monomials."""
    vec = [ZERO] * 8
    unk = {u: ZERO for u in unknowns}

    def add_vector(c, v):
        for k in range(8):
            if not v.coeffs[k].is_zero():
                vec[k] = vec[k] + c * v.coeffs[k]

    def accumulate(mono, c):
        if mono in SLOT:
            vec[SLOT[mono]] = vec[SLOT[mono]] + c
        elif mono in known:
            add_vector(c, known[mono])
        elif mono in unk:
            unk[mono] = unk[mono] + c
        else:
            for l in range(3):
                if mono[l] == 0:
                    continue
                rest = list(mono)
                rest[l] -= 1
                rest = tuple(rest)
                if rest in known or rest in SLOT:
                    base = known[rest] if rest in known else NormalOperator.basis(rest)
                    sub = op_compose(ThetaOperator.theta(l + 1), base.to_operator())
                    for m2, c2 in sub.terms.items():
                        accumulate(m2, c * c2)
                    return
            raise UnreducibleMonomial(f"cannot reduce {_mono_str(mono)} at this stage")

    for mono, c in op.terms.items():
        accumulate(mono, c)
    return vec, unk


def _solve_stage(equations, unknowns, known):
    """Solve ``u_r = basis_r + sum_s coef_rs u_s`` for all unknown monomials."""
    A, B = [], []
    for r, op in enumerate(equations):
        vec, unk = _split(op, known, unknowns)
        A.append([(ONE if s == r else ZERO) - unk[u] for s, u in enumerate(unknowns)])
        B.append(vec)
    X = solve_linear_many(A, B)
    return {u: NormalOperator(tuple(X[r])) for r, u in enumerate(unknowns)}


def build_reduction_table(system: CanonicalSystem) -> ReductionTable:
    """Normal forms of theta_i^2, theta_i^2 theta_j and theta_i^2 theta_j theta_k.

    The second and third groups are each obtained from one linear system
    in which the not-yet-known entries of the same group appear as unknowns.
    """
    known = {SQUARES[i]: system.vector(i + 1) for i in range(3)}

    eqs2 = []
    for i in (1, 2, 3):
        for j in _others(i):
            eqs2.append(op_compose(ThetaOperator.theta(j), system.L[i - 1]))
    known.update(_solve_stage(eqs2, list(SQUARE_TIMES), known))

    eqs3 = []
    for i in (1, 2, 3):
        j, k = _others(i)
        pair = ThetaOperator.monomial(_add_mono(_unit(j), _unit(k)))
        eqs3.append(op_compose(pair, system.L[i - 1]))
    known.update(_solve_stage(eqs3, list(SQUARE_TIMES_PAIR), known))
    return ReductionTable(system=system, entries={m: known[m] for m in CLOSURE})


def apply_theta_normal(i: int, N: NormalOperator, table: ReductionTable) -> NormalOperator:
    """Normal form of ``theta_i o N``."""
    out = [ZERO] * 8
    e = _unit(i)
    for k, alpha in enumerate(BASIS):
        c = N.coeffs[k]
        if c.is_zero():
            continue
        dc = c.theta(i)
        if not dc.is_zero():
            out[k] = out[k] + dc
        target = _add_mono(alpha, e)
        slot = SLOT.get(target)
        if slot is not None:
            out[slot] = out[slot] + c
        else:
            v = table.entries[target]
            for s in range(8):
                if not v.coeffs[s].is_zero():
                    out[s] = out[s] + c * v.coeffs[s]
    return NormalOperator(tuple(out))


def normal_reduce(L, table: ReductionTable, peel: bool = True) -> NormalOperator:
    """Unique basis representative of ``L`` modulo the F_C system.

    With ``peel=False`` any monomial outside the table's closure raises
    :class:`UnreducibleMonomial` instead of being reduced stepwise.
    """
    L = _as_operator(L)
    out = [ZERO] * 8
    for mono, c in L.terms.items():
        v = table.normal_form(mono, peel=peel)
        for s in range(8):
            if not v.coeffs[s].is_zero():
                out[s] = out[s] + c * v.coeffs[s]
    return NormalOperator(tuple(out))
