"""Fock representation, checked against a q-difference-operator model.

In the model |λ⟩ = ∏_j ξ_j^{m_j} / (q²)_{m_j}, β*_j multiplies by ξ_j and
β_j = (1 - q²) D_j with D_j the Jackson derivative in ξ_j.  Everything is
evaluated at a rational q so the comparison is exact.
"""

from fractions import Fraction

from hypothesis import given, settings, strategies as st

from qbacklund.combin import fock_basis, from_occupations, occupations
from qbacklund.fock import (FockVector, Generator, GradedOperator, apply_generator, apply_word, beta,
                            beta_star, bra_form, matrix_of, pairing, parse_word, word)
from qbacklund.ring import PolyQ, PolyZ, RatFuncQ, ZQPoly

q = PolyQ.monomial(1)
Q0 = Fraction(2, 7)


def zq(p):
    return ZQPoly.from_polyq(p)


def at_q0(c: ZQPoly) -> Fraction:
    return sum((Fraction(coef) * Q0 ** qe for ze, qe, coef in c.terms()), Fraction(0))


def poch(m, x=Q0):
    out = Fraction(1)
    for i in range(1, m + 1):
        out *= 1 - x ** (2 * i)
    return out


# --- the oracle: dict exponent tuple -> Fraction

def to_xi(vec: FockVector, n):
    out = {}
    for lam, c in vec.coeffs.items():
        m = occupations(lam, n)
        coef = at_q0(c)
        for mj in m:
            coef /= poch(mj)
        out[m] = out.get(m, 0) + coef
    return {e: c for e, c in out.items() if c}


def oracle_act(kind, j, f):
    out = {}
    for e, c in f.items():
        m = e[j - 1]
        if kind == "beta*":
            e2, c2 = e[:j - 1] + (m + 1,) + e[j:], c
        elif kind == "beta":
            if m == 0:
                continue
            # (1 - q^2) D ξ^m = (1 - q^{2m}) ξ^{m-1}
            e2, c2 = e[:j - 1] + (m - 1,) + e[j:], c * (1 - Q0 ** (2 * m))
        else:  # q^N
            e2, c2 = e, c * Q0 ** m
        out[e2] = out.get(e2, 0) + c2
    return {e: c for e, c in out.items() if c}


def test_generator_examples():
    x = FockVector.basis(3, (2, 2, 1))
    assert apply_generator(beta_star(1), x) == FockVector(3, {(3, 2, 1): zq(1 - q ** 2)})
    # removing the height-2 column leaves (1,1,1)
    assert apply_generator(beta(2), x) == FockVector.basis(3, (1, 1, 1))
    assert apply_generator(Generator("q^N", 3), x) == FockVector(3, {(2, 2, 1): zq(q)})
    assert apply_generator(beta(1), x).is_zero()


def test_word_examples():
    x = FockVector.basis(2, (1,))
    assert apply_word(word(beta(1), beta_star(2)), x) == FockVector(2, {(1, 1): zq(1 - q ** 2)})
    assert apply_word(word(), x) == x
    for lam in fock_basis(3, 2):
        m1 = occupations(lam, 3)[0]
        got = apply_word(word(beta_star(1), beta(1)), FockVector.basis(3, lam))
        expect = FockVector(3, {lam: zq(1 - q ** (2 * m1))})
        assert got == expect


def test_parse_word():
    w = parse_word("b1 b*2^3 qN1")
    assert str(w) == "b1 b*2^3 qN1"
    assert w.degree == 2


def test_matrix_of_examples():
    z = ZQPoly.monomial(1, ze=1)
    T1 = matrix_of([word(beta(1), beta_star(2)), word(beta(2), beta_star(1), scalar=z)], 2, 1)
    a = PolyZ.const(RatFuncQ(1 - q ** 2))
    assert [[x.at_z(1) for x in row] for row in T1.dense(1)] == [[RatFuncQ(0), a.at_z(1)], [a.at_z(1), RatFuncQ(0)]]
    assert matrix_of([word()], 3, 2) == GradedOperator.identity(3, [2])
    b1 = matrix_of([word(beta_star(1))], 3, 0)
    assert b1.d == 1
    assert b1.dense(0) == [[PolyZ.const(RatFuncQ(1 - q ** 2))], [PolyZ()], [PolyZ()]]


def test_pairing_and_bra_form():
    assert pairing((1,), apply_generator(beta_star(1), FockVector.basis(3, ()))) == PolyZ.const(RatFuncQ(1 - q ** 2))
    for lam in fock_basis(3, 2):
        assert pairing(lam, FockVector.basis(3, lam)) == PolyZ.const(RatFuncQ(1))
    assert bra_form((1,), (1,)) == RatFuncQ(1 - q ** 2)
    assert bra_form((1,), (1, 1)) == RatFuncQ(0)


generators = st.tuples(st.sampled_from(["beta", "beta*", "q^N"]), st.integers(1, 3))


@settings(max_examples=150, deadline=None)
@given(st.lists(generators, max_size=5), st.integers(0, 3), st.data())
def test_words_match_difference_operators(gens, k, data):
    n = 3
    lam = data.draw(st.sampled_from(fock_basis(n, k)))
    x = FockVector.basis(n, lam)
    f = to_xi(x, n)
    w = word(*[Generator(kind, j) for kind, j in gens])
    for kind, j in reversed(gens):
        f = oracle_act(kind, j, f)
    assert to_xi(apply_word(w, x), n) == f


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 3))
def test_words_agree_with_graded_operators(n, k):
    # the matrix route and the state route give the same vectors
    w = parse_word(f"b*1 b{n} qN1")
    op = GradedOperator.from_words([w], n, [k])
    for lam in fock_basis(n, k):
        x = FockVector.basis(n, lam)
        assert op.apply(x) == apply_word(w, x)


def test_occupation_round_trip():
    for n in range(1, 5):
        for k in range(4):
            for lam in fock_basis(n, k):
                assert from_occupations(occupations(lam, n)) == lam
                assert sum(occupations(lam, n)) == k
