"""Exact arithmetic in the field of multivariate rational functions over Q.

Polynomials are stored in FLINT's sparse multivariate format with integer
coefficients. A :class:`RationalFunction` keeps numerator and denominator
coprime in Z[x] (integer content included) with a positive leading
coefficient of the denominator in graded-lex order, which makes the
representation, and therefore its text form, unique.

All variables share one append-only :class:`SymbolTable`. Values created
before a symbol was appended are lifted into the larger context on demand.
"""

from __future__ import annotations

import ast
import math
import re
import threading
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import flint

from .errors import DivisionByZero, ParseError, SingularSystem, UnknownSymbol

__all__ = [
    "DEFAULT_SYMBOLS",
    "SYMBOLS",
    "SymbolTable",
    "Polynomial",
    "RationalFunction",
    "parse",
    "rat_normalize",
    "rat_arith",
    "theta_apply",
    "substitute",
    "solve_linear",
    "solve_linear_many",
    "matrix_rank",
    "as_rational",
]

DEFAULT_SYMBOLS = ("a", "b", "c1", "c2", "c3", "z1", "z2", "z3", "eps")
ALIASES = {"ε": "eps", "epsilon": "eps"}
_IDENT = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


class SymbolTable:
    """Ordered, append-only list of variable names.

    The order fixes the graded-lex monomial order used for canonical signs
    and for printing.
    """

    def __init__(self, names: Iterable[str] = DEFAULT_SYMBOLS):
        self._lock = threading.Lock()
        self._install(tuple(names))

    def _install(self, names):
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}
        self.zctx = flint.fmpz_mpoly_ctx.get(names, "deglex")
        self.qctx = flint.fmpq_mpoly_ctx.get(names, "deglex")

    def __contains__(self, name):
        return ALIASES.get(name, name) in self._index

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        name = ALIASES.get(name, name)
        try:
            return self._index[name]
        except KeyError:
            raise UnknownSymbol(f"unknown symbol {name!r}") from None

    def register(self, name: str) -> str:
        name = ALIASES.get(name, name)
        if name in self._index:
            return name
        if not _IDENT.match(name):
            raise ParseError(f"invalid symbol name {name!r}")
        with self._lock:
            if name not in self._index:
                self._install(self.names + (name,))
        return name


SYMBOLS = SymbolTable()


def _lift(p):
    ctx = SYMBOLS.zctx
    if p.context() is ctx:
        return p
    return p.project_to_context(ctx)


def _zconst(value: int):
    return SYMBOLS.zctx.constant(value)


def _q_to_z(q):
    """Split a fmpq_mpoly into (fmpz_mpoly, positive integer scale)."""
    terms = q.to_dict()
    if not terms:
        return _zctx_for(q).from_dict({}), 1
    scale = 1
    for c in terms.values():
        scale = scale * int(c.q) // math.gcd(scale, int(c.q))
    zterms = {m: int(c.p) * (scale // int(c.q)) for m, c in terms.items()}
    return _zctx_for(q).from_dict(zterms), scale


def _zctx_for(q):
    return flint.fmpz_mpoly_ctx.get(q.context().names(), "deglex")


def _z_to_q(p):
    qctx = flint.fmpq_mpoly_ctx.get(p.context().names(), "deglex")
    return qctx.from_dict(p.to_dict())


def as_rational(value) -> Fraction:
    """Convert int, Fraction, fmpq, decimal string or constant to Fraction."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, flint.fmpq):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, flint.fmpz):
        return Fraction(int(value))
    if isinstance(value, RationalFunction):
        return value.to_fraction()
    if isinstance(value, str):
        return parse(value).to_fraction()
    if isinstance(value, float):
        return Fraction(repr(value))
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


class Polynomial:
    """Multivariate polynomial with rational coefficients.

    Thin immutable wrapper around ``fmpq_mpoly`` over the global symbol
    table. Exponent vectors are reported in symbol-table order.
    """

    __slots__ = ("_q",)

    def __init__(self, value=0):
        if isinstance(value, Polynomial):
            self._q = value._q
        elif isinstance(value, str):
            f = parse(value)
            if not f.is_polynomial():
                raise ParseError(f"{value!r} is not a polynomial")
            scale = f.den.terms()[(0,) * len(SYMBOLS)]
            self._q = (f.num * (1 / scale))._q
        elif isinstance(value, flint.fmpq_mpoly):
            self._q = value
        elif isinstance(value, flint.fmpz_mpoly):
            self._q = _z_to_q(_lift(value))
        else:
            self._q = SYMBOLS.qctx.constant(flint.fmpq(*_pq(as_rational(value))))

    @classmethod
    def symbol(cls, name: str) -> "Polynomial":
        name = SYMBOLS.register(name)
        return cls(SYMBOLS.qctx.gen(SYMBOLS.index(name)))

    @classmethod
    def from_terms(cls, terms: Mapping[Sequence[int], object]) -> "Polynomial":
        out = {}
        n = len(SYMBOLS)
        for exps, c in terms.items():
            exps = tuple(exps) + (0,) * (n - len(exps))
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            c = as_rational(c)
            if c:
                out[exps] = flint.fmpq(c.numerator, c.denominator)
        return cls(SYMBOLS.qctx.from_dict(out))

    def _lifted(self):
        ctx = SYMBOLS.qctx
        if self._q.context() is ctx:
            return self._q
        return self._q.project_to_context(ctx)

    def _other(self, other):
        if isinstance(other, Polynomial):
            return other._lifted()
        return Polynomial(other)._lifted()

    def terms(self) -> dict:
        n = len(SYMBOLS)
        return {
            tuple(int(e) for e in m) + (0,) * (n - len(m)): Fraction(int(c.p), int(c.q))
            for m, c in self._q.to_dict().items()
        }

    def is_zero(self) -> bool:
        return self._q.is_zero()

    def total_degree(self) -> int:
        return int(self._q.total_degree()) if not self._q.is_zero() else -1

    def __add__(self, other):
        return Polynomial(self._lifted() + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Polynomial(self._lifted() - self._other(other))

    def __rsub__(self, other):
        return Polynomial(self._other(other) - self._lifted())

    def __mul__(self, other):
        return Polynomial(self._lifted() * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Polynomial(-self._q)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        return Polynomial(self._q**k)

    def __eq__(self, other):
        try:
            return self._lifted() == self._other(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(str(self))

    def gcd(self, other) -> "Polynomial":
        return Polynomial(self._lifted().gcd(self._other(other)))

    def divides(self, other) -> bool:
        """True if ``self`` divides ``other`` exactly."""
        if self.is_zero():
            return Polynomial(other).is_zero()
        _, r = divmod(self._other(other), self._lifted())
        return r.is_zero()

    def __truediv__(self, other):
        q, r = divmod(self._lifted(), self._other(other))
        if not r.is_zero():
            return RationalFunction(self, other)
        return Polynomial(q)

    def __str__(self):
        return str(self._q)

    def __repr__(self):
        return f"Polynomial({str(self)!r})"


def _pq(fr: Fraction):
    return fr.numerator, fr.denominator


class RationalFunction:
    """Element of Q(symbols) in canonical reduced form.

    Construct from numbers, strings or polynomials::

        >>> RationalFunction("z1**2 - z1*z2", "z1")
        RationalFunction('z1 - z2')
    """

    __slots__ = ("_n", "_d", "_s", "_qpair")

    def __init__(self, num=0, den=1):
        n = _to_rf(num)
        if isinstance(den, int) and den == 1:
            self._n, self._d = n._n, n._d
        else:
            r = _div(n, _to_rf(den))
            self._n, self._d = r._n, r._d
        self._s = None
        self._qpair = None

    @classmethod
    def _raw(cls, n, d) -> "RationalFunction":
        obj = cls.__new__(cls)
        obj._n = n
        obj._d = d
        obj._s = None
        obj._qpair = None
        return obj

    @classmethod
    def _make(cls, n, d) -> "RationalFunction":
        if d.is_zero():
            raise DivisionByZero("zero denominator")
        if n.is_zero():
            return cls._raw(n, _zconst(1))
        g = n.gcd(d)
        if not g.is_one():
            n = n / g
            d = d / g
        if d.leading_coefficient() < 0:
            n, d = -n, -d
        return cls._raw(n, d)

    @classmethod
    def symbol(cls, name: str) -> "RationalFunction":
        name = SYMBOLS.register(name)
        return cls._raw(SYMBOLS.zctx.gen(SYMBOLS.index(name)), _zconst(1))

    @classmethod
    def const(cls, value) -> "RationalFunction":
        fr = as_rational(value)
        return cls._raw(_zconst(fr.numerator), _zconst(fr.denominator))

    @classmethod
    def parse(cls, text: str) -> "RationalFunction":
        return parse(text)

    # -- structure ---------------------------------------------------------

    @property
    def num(self) -> Polynomial:
        return Polynomial(self._n)

    @property
    def den(self) -> Polynomial:
        return Polynomial(self._d)

    def numerator_z(self):
        """Numerator as a lifted integer ``fmpz_mpoly`` (internal use)."""
        return _lift(self._n)

    def denominator_z(self):
        return _lift(self._d)

    def is_zero(self) -> bool:
        return self._n.is_zero()

    def is_one(self) -> bool:
        return self._n.is_one() and self._d.is_one()

    def is_constant(self) -> bool:
        return self._n.is_constant() and self._d.is_constant()

    def is_polynomial(self) -> bool:
        return self._d.is_constant()

    def nterms(self) -> int:
        return len(self._n) + len(self._d)

    def free_symbols(self) -> set:
        names = self._n.context().names()
        used = set()
        for p in (self._n, self._d):
            if p.is_zero():
                continue
            for name, deg in zip(names, p.degrees()):
                if deg > 0:
                    used.add(name)
        return used

    def to_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        n = int(self._n.leading_coefficient()) if not self._n.is_zero() else 0
        return Fraction(n, int(self._d.leading_coefficient()))

    def __float__(self):
        return float(self.to_fraction())

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        return _add(self, _to_rf(other))

    def __radd__(self, other):
        return _add(_to_rf(other), self)

    def __sub__(self, other):
        return _add(self, -_to_rf(other))

    def __rsub__(self, other):
        return _add(_to_rf(other), -self)

    def __mul__(self, other):
        return _mul(self, _to_rf(other))

    def __rmul__(self, other):
        return _mul(_to_rf(other), self)

    def __truediv__(self, other):
        return _div(self, _to_rf(other))

    def __rtruediv__(self, other):
        return _div(_to_rf(other), self)

    def __neg__(self):
        return RationalFunction._raw(-self._n, self._d)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        if k >= 0:
            return RationalFunction._raw(self._n**k, self._d**k)
        return _inv(self) ** (-k)

    def __eq__(self, other):
        try:
            o = _to_rf(other)
        except (TypeError, ParseError):
            return NotImplemented
        return _lift(self._n) == _lift(o._n) and _lift(self._d) == _lift(o._d)

    def __hash__(self):
        return hash(str(self))

    # -- calculus and evaluation ------------------------------------------

    def diff(self, name: str) -> "RationalFunction":
        idx = SYMBOLS.index(name)
        n, d = _lift(self._n), _lift(self._d)
        var = SYMBOLS.names[idx]
        dn = n.derivative(var)
        dd = d.derivative(var)
        if dd.is_zero():
            return RationalFunction._make(dn, d)
        return RationalFunction._make(dn * d - n * dd, d * d)

    def theta(self, i: int) -> "RationalFunction":
        """Euler derivative ``z_i * d/dz_i``."""
        var = f"z{i}"
        n, d = _lift(self._n), _lift(self._d)
        dn = n.derivative(var)
        dd = d.derivative(var)
        z = SYMBOLS.zctx.gen(SYMBOLS.index(var))
        if dd.is_zero():
            if dn.is_zero():
                return ZERO
            return RationalFunction._make(z * dn, d)
        return RationalFunction._make(z * (dn * d - n * dd), d * d)

    def subs(self, bindings: Mapping[str, object]) -> "RationalFunction":
        """Substitute exact rationals for some symbols."""
        if not bindings:
            return self
        if any(isinstance(v, (RationalFunction, Polynomial, str)) and not _to_rf(v).is_constant()
               for v in bindings.values()):
            return self._compose(bindings)
        values = {}
        for name, v in bindings.items():
            idx = SYMBOLS.index(name)
            fr = as_rational(v)
            values[SYMBOLS.names[idx]] = flint.fmpq(*_pq(fr))
        qn = _z_to_q(_lift(self._n)).subs(values)
        qd = _z_to_q(_lift(self._d)).subs(values)
        if qd.is_zero():
            raise DivisionByZero(f"substitution makes the denominator of {self} vanish")
        zn, sn = _q_to_z(qn)
        zd, sd = _q_to_z(qd)
        return RationalFunction._make(zn * sd, zd * sn)

    def _compose(self, bindings):
        images = {SYMBOLS.index(k): _to_rf(v) for k, v in bindings.items()}

        def image(poly):
            out = ZERO
            for exps, c in Polynomial(poly).terms().items():
                term = RationalFunction.const(c)
                for idx, e in enumerate(exps):
                    if e:
                        base = images.get(idx) or RationalFunction.symbol(SYMBOLS.names[idx])
                        term = term * base ** int(e)
                out = out + term
            return out

        den = image(_z_to_q(_lift(self._d)))
        if den.is_zero():
            raise DivisionByZero(f"substitution makes the denominator of {self} vanish")
        return image(_z_to_q(_lift(self._n))) / den

    def evaluate(self, values: Mapping[str, object]) -> Fraction:
        """Exact value at a point; every free symbol must be bound."""
        missing = self.free_symbols() - {ALIASES.get(k, k) for k in values}
        if missing:
            raise UnknownSymbol(f"unbound symbol(s): {', '.join(sorted(missing))}")
        if self._qpair is None or self._qpair[0].context().names() != SYMBOLS.names:
            self._qpair = (_z_to_q(_lift(self._n)), _z_to_q(_lift(self._d)))
        point = [flint.fmpq(0)] * len(SYMBOLS)
        for name, v in values.items():
            point[SYMBOLS.index(name)] = flint.fmpq(*_pq(as_rational(v)))
        qn, qd = self._qpair
        den = qd(*point)
        if den == 0:
            raise DivisionByZero(f"denominator of {self} vanishes at the point")
        val = qn(*point) / den
        return Fraction(int(val.p), int(val.q))

    # -- text ------------------------------------------------------------

    def __str__(self):
        if self._s is None:
            self._s = _render(self._n, self._d)
        return self._s

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"


def _render(n, d) -> str:
    ns = str(n)
    if d.is_one():
        return ns
    if len(n) > 1:
        ns = f"({ns})"
    ds = str(d)
    if len(d) > 1 or "*" in ds or not (d.is_constant() or d.leading_coefficient() == 1):
        ds = f"({ds})"
    return f"{ns}/{ds}"


def _to_rf(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Polynomial):
        zn, s = _q_to_z(x._lifted())
        return RationalFunction._make(zn, _zconst(s))
    if isinstance(x, str):
        return parse(x)
    if isinstance(x, (int, Fraction, flint.fmpq, flint.fmpz)) and not isinstance(x, bool):
        return RationalFunction.const(x)
    raise TypeError(f"cannot convert {type(x).__name__} to RationalFunction")


def _same_ctx(x, y):
    xn, xd, yn, yd = x._n, x._d, y._n, y._d
    ctx = xn.context()
    if not (xd.context() is ctx and yn.context() is ctx and yd.context() is ctx):
        xn, xd, yn, yd = _lift(xn), _lift(xd), _lift(yn), _lift(yd)
    return xn, xd, yn, yd


def _add(x, y):
    if x._n.is_zero():
        return y
    if y._n.is_zero():
        return x
    xn, xd, yn, yd = _same_ctx(x, y)
    if xd == yd:
        if xd.is_one():
            return RationalFunction._raw(xn + yn, xd)
        return RationalFunction._make(xn + yn, xd)
    g = xd.gcd(yd)
    if g.is_one():
        return RationalFunction._raw(xn * yd + yn * xd, xd * yd)
    xd1 = xd / g
    yd1 = yd / g
    t = xn * yd1 + yn * xd1
    if t.is_zero():
        return RationalFunction._raw(t, _zconst(1).project_to_context(t.context()))
    h = t.gcd(g)
    if h.is_one():
        return RationalFunction._raw(t, xd1 * yd)
    return RationalFunction._raw(t / h, xd1 * (yd / h))


def _mul(x, y):
    if x._n.is_zero():
        return x
    if y._n.is_zero():
        return y
    xn, xd, yn, yd = _same_ctx(x, y)
    g1 = xn.gcd(yd)
    g2 = yn.gcd(xd)
    if not g1.is_one():
        xn = xn / g1
        yd = yd / g1
    if not g2.is_one():
        yn = yn / g2
        xd = xd / g2
    return RationalFunction._raw(xn * yn, xd * yd)


def _inv(x):
    if x._n.is_zero():
        raise DivisionByZero("division by zero rational function")
    n, d = x._d, x._n
    if d.leading_coefficient() < 0:
        n, d = -n, -d
    return RationalFunction._raw(n, d)


def _div(x, y):
    return _mul(x, _inv(y))


ZERO = RationalFunction._raw(_zconst(0), _zconst(1))
ONE = RationalFunction._raw(_zconst(1), _zconst(1))


# -- parsing -----------------------------------------------------------------

_BINOPS = {
    ast.Add: lambda x, y: x + y,
    ast.Sub: lambda x, y: x - y,
    ast.Mult: lambda x, y: x * y,
    ast.Div: lambda x, y: x / y,
}


def parse(text: str) -> RationalFunction:
    """Parse an exact expression.

    Accepts integers, decimals (read exactly), ``p/q``, symbol names,
    ``+ - * /``, parentheses and integer powers written ``**`` or ``^``.
    Unseen symbol names are appended to the symbol table.
    """
    if not isinstance(text, str):
        raise ParseError(f"expected a string, got {type(text).__name__}")
    src = text.strip().replace("^", "**").replace("ε", "eps")
    if not src:
        raise ParseError("empty expression")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None
    return _eval(tree.body, text)


def _eval(node, text):
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            k = _int_exponent(node.right, text)
            return _eval(node.left, text) ** k
        op = _BINOPS.get(type(node.op))
        if op is None:
            raise ParseError(f"unsupported operator in {text!r}")
        return op(_eval(node.left, text), _eval(node.right, text))
    if isinstance(node, ast.UnaryOp):
        if isinstance(node.op, ast.USub):
            return -_eval(node.operand, text)
        if isinstance(node.op, ast.UAdd):
            return _eval(node.operand, text)
        raise ParseError(f"unsupported unary operator in {text!r}")
    if isinstance(node, ast.Constant):
        v = node.value
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"unsupported literal {v!r} in {text!r}")
        return RationalFunction.const(as_rational(v))
    if isinstance(node, ast.Name):
        return RationalFunction.symbol(node.id)
    raise ParseError(f"unsupported syntax in {text!r}")


def _int_exponent(node, text):
    sign = 1
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        sign = -1 if isinstance(node.op, ast.USub) else 1
        node = node.operand
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return sign * node.value
    raise ParseError(f"exponents must be integer literals in {text!r}")


# -- functional interface ------------------------------------------------------


def rat_normalize(num, den) -> RationalFunction:
    """Canonical representative of ``num/den``."""
    n = _to_rf(num)
    d = _to_rf(den)
    if d.is_zero():
        raise DivisionByZero("zero denominator")
    return n / d


def rat_arith(kind: str, x, y) -> RationalFunction:
    x, y = _to_rf(x), _to_rf(y)
    if kind == "add":
        return x + y
    if kind == "sub":
        return x - y
    if kind == "mul":
        return x * y
    if kind == "div":
        return x / y
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def theta_apply(i: int, f) -> RationalFunction:
    if i not in (1, 2, 3):
        raise ValueError(f"variable index must be 1, 2 or 3, got {i}")
    return _to_rf(f).theta(i)


def substitute(f, bindings: Mapping[str, object]) -> RationalFunction:
    for name in bindings:
        SYMBOLS.index(name)
    return _to_rf(f).subs(bindings)


def _check_square(A, nrhs_rows):
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("matrix must be square")
    if nrhs_rows != n:
        raise ValueError("right-hand side has the wrong length")
    return n


def solve_linear_many(A, B):
    """Solve ``A X = B`` for a square matrix ``A`` and ``n x k`` block ``B``.

    Gaussian elimination over the rational-function field. The pivot in
    each column is the nonzero candidate with the fewest terms.
    Returns ``X`` as a list of rows.
    """
    n = _check_square(A, len(B))
    k = len(B[0]) if n else 0
    M = [[_to_rf(x) for x in A[r]] + [_to_rf(x) for x in B[r]] for r in range(n)]
    width = n + k
    for col in range(n):
        best = None
        for r in range(col, n):
            e = M[r][col]
            if not e.is_zero() and (best is None or e.nterms() < M[best][col].nterms()):
                best = r
        if best is None:
            raise SingularSystem(matrix_rank(A), n)
        if best != col:
            M[col], M[best] = M[best], M[col]
        pivot_row = M[col]
        inv = 1 / pivot_row[col]
        pivot_row = [ZERO] * col + [ONE] + [x * inv for x in pivot_row[col + 1:]]
        M[col] = pivot_row
        for r in range(col + 1, n):
            f = M[r][col]
            if f.is_zero():
                continue
            row = M[r]
            for c in range(col + 1, width):
                if not pivot_row[c].is_zero():
                    row[c] = row[c] - f * pivot_row[c]
            row[col] = ZERO
    X = [[ZERO] * k for _ in range(n)]
    for r in range(n - 1, -1, -1):
        row = M[r]
        for j in range(k):
            s = row[n + j]
            for c in range(r + 1, n):
                if not row[c].is_zero():
                    s = s - row[c] * X[c][j]
            X[r][j] = s
    return X


def solve_linear(A, b):
    """Solve the square system ``A x = b`` exactly."""
    X = solve_linear_many(A, [[x] for x in b])
    return [row[0] for row in X]


def matrix_rank(A) -> int:
    M = [[_to_rf(x) for x in row] for row in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    rank = 0
    for col in range(cols):
        piv = next((r for r in range(rank, rows) if not M[r][col].is_zero()), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = 1 / M[rank][col]
        for r in range(rank + 1, rows):
            f = M[r][col] * inv
            if f.is_zero():
                continue
            M[r] = [x - f * y for x, y in zip(M[r], M[rank])]
        rank += 1
    return rank
