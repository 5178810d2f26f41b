import pytest
from hypothesis import given, settings, strategies as st

from qbacklund.combin import basis_index, gaussian_binomial
from qbacklund.fock import GradedOperator, beta, beta_star, word
from qbacklund.funrel import first_difference
from qbacklund.lattice import (boltzmann_weight, build_monodromy, build_Qr, build_Tr, check_yang_baxter,
                               monodromy_words)
from qbacklund.ring import PolyQ, ZQPoly

q = PolyQ.monomial(1)
Z = ZQPoly.monomial(1, ze=1)


def test_monodromy_small():
    mono = build_monodromy(2, 1)
    assert mono["A"][0] == GradedOperator.identity(2, [1])
    # D has u^n with the identity: only the all-D path reaches that power
    assert mono["D"][2] == GradedOperator.identity(2, [1])
    assert mono["B"][0].d == 1 and mono["C"][0].d == -1
    assert all(len(monodromy_words(n).words["A"]) == n + 1 for n in range(1, 5))


def test_Tr_examples():
    T1 = build_Tr(2, 1, 1)
    expect = GradedOperator.from_words([word(beta(1), beta_star(2)), word(beta(2), beta_star(1), scalar=Z)], 2, [1])
    assert T1 == expect
    for n in (1, 2, 3):
        assert build_Tr(n, 2, 0) == GradedOperator.identity(n, [2])
        assert build_Tr(n, 2, n) == GradedOperator.scalar(n, [2], Z)


def test_Qr_examples():
    Q1 = build_Qr("+", 2, 1, 1)
    idx = basis_index(2, 1)
    assert Q1.at_z(1).entry(1, idx[(1, 1)], idx[(1,)]) == ZQPoly.monomial(-1)
    for flavor in "+-":
        assert build_Qr(flavor, 3, 2, 0) == GradedOperator.identity(3, [2])
    assert build_Qr("+", 3, 2, 3).is_zero()


@pytest.mark.parametrize("n,k", [(1, 2), (2, 2), (3, 1), (3, 3), (4, 2)])
def test_Qplus_vanishes_beyond_k(n, k):
    for r in range(k + 1, k + 3):
        assert build_Qr("+", n, k, r).is_zero()
    assert not build_Qr("+", n, k, k).is_zero()


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 3), st.integers(0, 4), st.sampled_from("+-"))
def test_two_routes_agree_and_are_polynomial(n, k, r, flavor):
    a = build_Qr(flavor, n, k, r, "composition")
    assert first_difference(a, build_Qr(flavor, n, k, r, "transfer")) is None
    assert a.entries_polynomial()
    if r <= n:
        t = build_Tr(n, k, r, "trace")
        assert first_difference(t, build_Tr(n, k, r, "commutator")) is None
        assert t.entries_polynomial()


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 4), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))
def test_Q_and_T_commute(n, k, r, s):
    T = build_Tr(n, k, min(r, n))
    Qp, Qm = build_Qr("+", n, k, s), build_Qr("-", n, k, s)
    assert T * Qp == Qp * T
    assert T * Qm == Qm * T
    assert Qp * Qm == Qm * Qp


def test_boltzmann_examples():
    for m in range(4):
        w = boltzmann_weight("T", 1, m, 0, m + 1)
        assert (w.u_power, w.coeff) == (1, 1 - q ** (2 * m + 2))
    assert boltzmann_weight("+", 2, 1, 2, 1).is_zero
    w = boltzmann_weight("-", 1, 0, 0, 1)
    assert (w.u_power, w.coeff) == (1, q ** 2 * gaussian_binomial(1, 0))
    # charge conservation
    assert boltzmann_weight("-", 1, 1, 0, 1).is_zero


@pytest.mark.parametrize("which", ["RLL", "DLL+", "DLL-"])
def test_yang_baxter(which):
    assert check_yang_baxter(which, 3).passed


def test_rll_at_stated_point():
    from fractions import Fraction
    assert check_yang_baxter("RLL", 3, points=[(Fraction(2), Fraction(3))]).passed


def test_printed_variants_fail():
    # the literal R display and the literal D^- entry do not satisfy the relations
    assert not check_yang_baxter("RLL", 2, variant="printed").passed
    assert not check_yang_baxter("DLL-", 2, variant="printed").passed
