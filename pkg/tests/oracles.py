"""Independent reference implementations used by the tests.

Everything here is deliberately naive: direct Pochhammer products, explicit
triple loops, and sympy for symbolic comparisons. Nothing imports fcreduce.
"""

from fractions import Fraction
from itertools import product
from math import factorial

import sympy as sp


def poch(x, n):
    out = Fraction(1) if not isinstance(x, float) else 1.0
    for k in range(n):
        out *= x + k
    return out


def naive_fc(params, z, order, box=True):
    a, b, c1, c2, c3 = params
    total = 0
    for m in product(range(order + 1), repeat=3):
        if not box and sum(m) > order:
            continue
        M = sum(m)
        term = poch(a, M) * poch(b, M)
        for c, zi, mi in zip((c1, c2, c3), z, m):
            term = term * zi**mi / (poch(c, mi) * factorial(mi))
        total += term
    return total


def naive_fc_weighted(params, z, order, alpha):
    """theta^alpha of the box-truncated series, weight m^alpha per term."""
    a, b, c1, c2, c3 = params
    total = 0
    for m in product(range(order + 1), repeat=3):
        w = m[0] ** alpha[0] * m[1] ** alpha[1] * m[2] ** alpha[2]
        if not w:
            continue
        M = sum(m)
        term = poch(a, M) * poch(b, M) * w
        for c, zi, mi in zip((c1, c2, c3), z, m):
            term = term * zi**mi / (poch(c, mi) * factorial(mi))
        total += term
    return total


def naive_fc_d1(params, z, order):
    """Series of dF/dz1 with every index of the differentiated series <= order.

    Built by differentiating each monomial of F one power at a time.
    """
    a, b, c1, c2, c3 = params
    total = 0
    for m in product(range(1, order + 2), range(order + 1), range(order + 1)):
        M = sum(m)
        term = poch(a, M) * poch(b, M) * m[0] * z[0] ** (m[0] - 1)
        term = term / (poch(c1, m[0]) * factorial(m[0]))
        for c, zi, mi in zip((c2, c3), z[1:], m[1:]):
            term = term * zi**mi / (poch(c, mi) * factorial(mi))
        total += term
    return total


def gauss_2f1(a, b, c, z, order):
    return sum(poch(a, m) * poch(b, m) / poch(c, m) * z**m / factorial(m) for m in range(order + 1))


def appell_f4(a, b, c1, c2, z1, z2, order):
    total = 0
    for m1 in range(order + 1):
        for m2 in range(order + 1):
            total += (poch(a, m1 + m2) * poch(b, m1 + m2) / (poch(c1, m1) * poch(c2, m2))
                      * z1**m1 * z2**m2 / (factorial(m1) * factorial(m2)))
    return total


SYMS = sp.symbols("a b c1 c2 c3 z1 z2 z3 eps")
NAMESPACE = {str(s): s for s in SYMS}


def sym(text):
    """Parse an expression with sympy (``^`` accepted for powers)."""
    return sp.sympify(text.replace("^", "**"), locals=NAMESPACE)


def sym_equal(x, y):
    return sp.cancel(sp.together(sym(str(x)) - sym(str(y)))) == 0
