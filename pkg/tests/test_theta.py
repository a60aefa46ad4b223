from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fcreduce.algebra import RationalFunction as R, parse
from fcreduce.errors import UnreducibleMonomial
from fcreduce.reduction import continuous_denominator, singular_cubic
from fcreduce.theta import (
    BASIS,
    CLOSURE,
    SLOT,
    NormalOperator,
    ThetaOperator,
    apply_theta_normal,
    build_canonical_system,
    build_reduction_table,
    normal_reduce,
    op_compose,
)
from oracles import naive_fc_weighted

T1, T2, T3 = (ThetaOperator.theta(i) for i in (1, 2, 3))
PARAMS = ("a", "b", "c1", "c2", "c3")
D0 = parse("1 - z1 - z2 - z3")


def test_compose_commutation_rules():
    z1 = ThetaOperator.scalar(R.symbol("z1"))
    assert op_compose(T1, z1) == z1 * T1 + z1
    assert op_compose(T1, T2) == ThetaOperator.monomial((1, 1, 0))
    f = 1 / parse("1 - z1")
    assert op_compose(T1, ThetaOperator.scalar(f)) == ThetaOperator.scalar(f) * T1 + parse("z1/(1 - z1)^2")


def test_canonical_system_coefficients(symbolic_table):
    sysm = symbolic_table.system
    a, b, c1, c2 = (R.symbol(n) for n in ("a", "b", "c1", "c2"))
    z1, z2, z3 = (R.symbol(f"z{i}") for i in (1, 2, 3))
    assert sysm.D0 == D0
    # sign fixed by the leading term theta_1^2 F = a b z1 / c1 + ...
    assert sysm.S(1) == a * b * z1 / D0
    assert sysm.R(1, 1) == ((a + b) * z1 + (z2 + z3 - 1) * (c1 - 1)) / D0
    assert sysm.R(1, 2) == z1 * (1 + a + b - c2) / D0
    assert sysm.P(1, 2, 3) == 2 * z1 / D0
    assert sysm.L[0].coefficient((1, 1, 1)).is_zero()


def test_canonical_system_is_symmetric(symbolic_table):
    sysm = symbolic_table.system
    swap = {"c1": "c2", "c2": "c1", "z1": "z2", "z2": "z1"}
    L1 = sysm.vector(1)
    L2 = sysm.vector(2)
    permuted = [c.subs({k: R.symbol(v) for k, v in swap.items()}) for c in L1.coeffs]
    order = {m: k for k, m in enumerate(BASIS)}
    for k, m in enumerate(BASIS):
        m2 = (m[1], m[0], m[2])
        assert L2.coeffs[order[m2]] == permuted[k]


def test_table_stage_one_copies_system(symbolic_table):
    for i, sq in enumerate(((2, 0, 0), (0, 2, 0), (0, 0, 2)), start=1):
        assert symbolic_table[sq] == symbolic_table.system.vector(i)


def test_normal_reduce_basic(symbolic_table):
    op = T1 + ThetaOperator.monomial((1, 1, 1), parse("z2"))
    assert normal_reduce(op, symbolic_table).to_operator() == op
    assert normal_reduce(ThetaOperator.monomial((2, 0, 0)), symbolic_table) == symbolic_table.system.vector(1)
    assert normal_reduce(op_compose(T1, T1), symbolic_table) == symbolic_table[(2, 0, 0)]


def test_apply_theta_normal_examples(symbolic_table):
    one = NormalOperator.basis(0)
    assert apply_theta_normal(1, one, symbolic_table) == NormalOperator.basis(SLOT[(1, 0, 0)])
    assert apply_theta_normal(1, NormalOperator.basis(SLOT[(1, 0, 0)]), symbolic_table) == symbolic_table[(2, 0, 0)]
    assert apply_theta_normal(3, NormalOperator.basis(SLOT[(1, 1, 0)]), symbolic_table) == NormalOperator.basis(SLOT[(1, 1, 1)])


def test_peeling_can_be_disabled(symbolic_table):
    with pytest.raises(UnreducibleMonomial):
        symbolic_table.normal_form((3, 1, 0), peel=False)
    assert symbolic_table.normal_form((3, 1, 0)) == apply_theta_normal(1, symbolic_table[(2, 1, 0)], symbolic_table)


def test_alternate_routes_agree(symbolic_table):
    target = symbolic_table[(2, 1, 1)]
    assert apply_theta_normal(3, symbolic_table[(2, 1, 0)], symbolic_table) == target
    assert apply_theta_normal(2, symbolic_table[(2, 0, 1)], symbolic_table) == target
    twice = apply_theta_normal(1, NormalOperator.basis(SLOT[(0, 1, 1)]), symbolic_table)
    assert apply_theta_normal(1, twice, symbolic_table) == target


def test_integrability_on_all_basis_vectors(symbolic_table):
    for k in range(8):
        N = NormalOperator.basis(k)
        for i in (1, 2, 3):
            for j in (1, 2, 3):
                if i < j:
                    lhs = apply_theta_normal(i, apply_theta_normal(j, N, symbolic_table), symbolic_table)
                    rhs = apply_theta_normal(j, apply_theta_normal(i, N, symbolic_table), symbolic_table)
                    assert lhs == rhs


def test_table_denominators_depend_on_z_only(symbolic_table):
    # D0, the singular cubic and the quartic singular locus; no parameters
    cubic, quartic = singular_cubic(), _quartic(symbolic_table)
    bound = (D0 * cubic * quartic) ** 3
    for mono in CLOSURE:
        for c in symbolic_table[mono].coeffs:
            assert not R(c.den).free_symbols() & set(PARAMS)
            assert (bound / R(c.den)).is_polynomial()


def _quartic(table):
    den = table[(1, 1, 2)].coeffs[0].denominator_z()
    _, factors = den.factor()
    for f, _ in factors:
        if f.total_degree() == 4:
            return parse(str(f))
    raise AssertionError("no quartic factor")


def test_quartic_is_the_singular_locus(symbolic_table):
    q = _quartic(symbolic_table)
    # vanishes on 1 = sqrt(z1) + sqrt(z2) + sqrt(z3)
    for s1, s2 in [(Fraction(1, 5), Fraction(1, 3)), (Fraction(1, 2), Fraction(1, 7))]:
        s3 = 1 - s1 - s2
        assert q.evaluate({"z1": s1**2, "z2": s2**2, "z3": s3**2}) == 0
    assert q.subs({"z2": 0, "z3": 0}) == parse("(1 - z1)^4")


def test_inverse_denominator_polynomial_matches_cubic():
    assert continuous_denominator() == singular_cubic() * D0


SAMPLE = (Fraction(1, 3), Fraction(1, 5), Fraction(1, 7), Fraction(1, 11), Fraction(1, 13))
Z = (Fraction(1, 50), Fraction(1, 60), Fraction(1, 70))


@pytest.fixture(scope="module")
def numeric_table():
    return build_reduction_table(build_canonical_system(SAMPLE))


def _action(vec, params, z, order):
    fparams = [float(p) for p in params]
    fz = [float(v) for v in z]
    values = {f"z{i}": v for i, v in enumerate(z, start=1)}
    return sum(float(c.evaluate(values)) * naive_fc_weighted(fparams, fz, order, alpha)
               for c, alpha in zip(vec.coeffs, BASIS) if not c.is_zero())


@pytest.mark.parametrize("mono", CLOSURE)
def test_table_entries_act_like_the_series(numeric_table, mono):
    fparams = [float(p) for p in SAMPLE]
    lhs = naive_fc_weighted(fparams, [float(v) for v in Z], 25, mono)
    rhs = _action(numeric_table[mono], SAMPLE, Z, 25)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_numeric_table_matches_substituted_symbolic(numeric_table, symbolic_table):
    bindings = dict(zip(PARAMS, SAMPLE))
    for mono in ((2, 1, 0), (1, 1, 2)):
        assert numeric_table[mono] == symbolic_table[mono].subs(bindings)


@st.composite
def operators(draw):
    terms = {}
    for _ in range(draw(st.integers(1, 3))):
        mono = tuple(draw(st.integers(0, 2)) for _ in range(3))
        coeff = draw(st.sampled_from(["1", "z1", "z2/(1 - z3)", "a*z1 - 2", "1/(1 - z1 - z2)", "c1"]))
        terms[mono] = parse(coeff)
    return ThetaOperator(terms)


@given(operators(), operators(), operators())
def test_composition_is_associative(L, M, N):
    assert op_compose(L, op_compose(M, N)) == op_compose(op_compose(L, M), N)


@given(operators(), operators())
def test_composition_distributes(L, M):
    assert op_compose(T2, L + M) == op_compose(T2, L) + op_compose(T2, M)
