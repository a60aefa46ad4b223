from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fcreduce.algebra import (
    SYMBOLS,
    ONE,
    ZERO,
    Polynomial,
    RationalFunction as R,
    matrix_rank,
    parse,
    rat_arith,
    rat_normalize,
    solve_linear,
    solve_linear_many,
    substitute,
    theta_apply,
)
from fcreduce.errors import DivisionByZero, ParseError, SingularSystem, UnknownSymbol
from oracles import sym, sym_equal

NAMES = ["a", "b", "c1", "z1", "z2", "z3"]


@st.composite
def polynomials(draw, max_terms=4):
    terms = []
    for _ in range(draw(st.integers(0, max_terms))):
        coeff = draw(st.integers(-5, 5))
        mono = "*".join(f"{n}^{draw(st.integers(1, 2))}" for n in draw(st.lists(st.sampled_from(NAMES), max_size=3)))
        terms.append(f"({coeff})" + (f"*{mono}" if mono else ""))
    return parse(" + ".join(terms) or "0")


@st.composite
def rationals(draw):
    num = draw(polynomials())
    den = draw(polynomials().filter(lambda p: not p.is_zero()))
    return num / den


def test_normalize_cancels_gcd():
    assert rat_normalize(parse("z1^2 - z1*z2"), parse("z1")) == parse("z1 - z2")
    assert str(rat_normalize(parse("z1^2 - z1*z2"), parse("z1"))) == "z1 - z2"


def test_normalize_zero_numerator():
    f = rat_normalize(ZERO, parse("1 - z1"))
    assert f.is_zero() and f.den == Polynomial(1)


def test_normalize_zero_denominator():
    with pytest.raises(DivisionByZero):
        rat_normalize(ONE, ZERO)


def test_arith_examples():
    z1, z2 = R.symbol("z1"), R.symbol("z2")
    assert rat_arith("add", z1, z2) == parse("z1 + z2")
    assert rat_arith("mul", 1 / (1 - z1), 1 - z1).is_one()
    with pytest.raises(DivisionByZero):
        rat_arith("div", R.symbol("a"), ZERO)
    with pytest.raises(ValueError):
        rat_arith("pow", z1, z2)


def test_theta_examples():
    z1 = R.symbol("z1")
    assert theta_apply(1, z1) == z1
    assert theta_apply(2, z1).is_zero()
    d0 = parse("1 - z1 - z2 - z3")
    assert theta_apply(1, 1 / d0) == z1 / d0**2
    with pytest.raises(ValueError):
        theta_apply(4, z1)


def test_solve_examples():
    a, b = R.symbol("a"), R.symbol("b")
    assert solve_linear([[ONE, ZERO], [ZERO, ONE]], [a, b]) == [a, b]
    assert solve_linear([[a, ZERO], [ZERO, b]], [ONE, ONE]) == [1 / a, 1 / b]
    with pytest.raises(SingularSystem) as info:
        solve_linear([[ONE, ONE], [ONE, ONE]], [a, b])
    assert info.value.rank == 1


def test_substitute_examples():
    assert substitute(parse("1 + eps"), {"eps": Fraction(1, 10)}) == R.const(Fraction(11, 10))
    with pytest.raises(DivisionByZero):
        substitute(parse("1/(1 - eps)"), {"eps": 1})
    assert substitute(parse("a/(c1 - 1)"), {"c1": 2}) == R.symbol("a")
    with pytest.raises(UnknownSymbol):
        substitute(parse("a"), {"nosuchsymbol_q": 1})


def test_canonical_sign_and_content():
    f = parse("(-2*z1 + 2)/(4*z1 - 4*z2)")
    assert f.den.terms() and str(f) == "(-z1 + 1)/(2*z1 - 2*z2)"
    assert parse("(2*a)/(-4)") == parse("-a/2")


def test_parse_errors():
    for bad in ["a +", "sin(z1)", "a**b", "z1 = 2", "a^(1/2)", "'x'"]:
        with pytest.raises(ParseError):
            parse(bad)


def test_parse_accepts_unicode_epsilon_and_caret():
    assert parse("1 + ε") == parse("1 + eps")
    assert parse("z1^2") == parse("z1**2")
    assert parse("0.1") == R.const(Fraction(1, 10))


def test_symbol_table_is_append_only():
    before = tuple(SYMBOLS.names)
    parse("fresh_symbol_k + 1")
    assert tuple(SYMBOLS.names[: len(before)]) == before
    assert "fresh_symbol_k" in SYMBOLS


def test_evaluate_requires_all_symbols():
    f = parse("a/(c1 - 1)")
    assert f.evaluate({"a": 3, "c1": Fraction(5, 2)}) == 2
    with pytest.raises(Exception):
        f.evaluate({"a": 3})


def test_matrix_rank():
    a = R.symbol("a")
    assert matrix_rank([[a, ONE], [a * a, a]]) == 1
    assert matrix_rank([[a, ONE], [ONE, a]]) == 2


@given(polynomials(), polynomials(), polynomials())
def test_distributivity(p, q, r):
    assert (p + q) * r == p * r + q * r


@given(rationals(), rationals())
def test_arithmetic_matches_sympy(x, y):
    assert sym_equal(x + y, sym(str(x)) + sym(str(y)))
    assert sym_equal(x * y, sym(str(x)) * sym(str(y)))
    if not y.is_zero():
        assert sym_equal(x / y, sym(str(x)) / sym(str(y)))


@given(rationals(), rationals(), st.sampled_from([1, 2, 3]))
def test_theta_leibniz(f, g, i):
    assert theta_apply(i, f * g) == theta_apply(i, f) * g + f * theta_apply(i, g)


@given(rationals(), rationals(), st.sampled_from(["add", "sub", "mul"]))
def test_normalize_idempotent(x, y, kind):
    r = rat_arith(kind, x, y)
    n = rat_normalize(r.num, r.den)
    assert n == r and str(n) == str(r)
    assert parse(str(r)) == r


@given(st.lists(rationals(), min_size=9, max_size=9), st.lists(rationals(), min_size=3, max_size=3))
def test_solve_remultiplies(entries, rhs):
    A = [entries[0:3], entries[3:6], entries[6:9]]
    try:
        x = solve_linear(A, rhs)
    except SingularSystem:
        assert matrix_rank(A) < 3
        return
    for row, b in zip(A, rhs):
        assert sum((c * v for c, v in zip(row, x)), ZERO) == b


def test_solve_many_blocks():
    a, b = R.symbol("a"), R.symbol("b")
    A = [[a, ONE], [ONE, b]]
    X = solve_linear_many(A, [[ONE, ZERO], [ZERO, ONE]])
    for i in range(2):
        for j in range(2):
            assert sum((A[i][k] * X[k][j] for k in range(2)), ZERO) == (ONE if i == j else ZERO)


def test_monomial_denominator_round_trips():
    r = R.symbol("b") / (R.symbol("a") * R.symbol("b") ** 2)
    assert str(r) == "1/(a*b)"
    assert parse(str(r)) == r
