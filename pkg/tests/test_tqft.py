from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qbacklund.combin import dominates, partitions_of
from qbacklund.fock import FockVector, GradedOperator
from qbacklund.ring import PolyQ, RatFuncQ
from qbacklund.tqft import (backlund_fusion_link, cylindric_expansion, cylindric_expansion_check,
                            example_chain, expand_in_whittaker, fusion_algebra_basis, fusion_goldens,
                            fusion_table, q_lambda_matrix, qwhittaker, reduced_box, schur_bialternant_check,
                            verify_frobenius, verlinde_table)

q = PolyQ.monomial(1)


def test_whittaker_examples():
    assert qwhittaker((1,), 2).value.coeffs == {(1,): RatFuncQ(1)}
    assert qwhittaker((1, 1), 2).value.coeffs == {(1, 1): RatFuncQ(1)}
    assert qwhittaker((2,), 2).value.coeffs == {(2,): RatFuncQ(1), (1, 1): RatFuncQ(1 + q ** 2)}
    with pytest.raises(ValueError):
        qwhittaker((1, 1, 1), 2)


@pytest.mark.parametrize("r,ell", [(1, 3), (2, 3), (3, 3), (2, 4)])
def test_column_shapes_are_elementary(r, ell):
    assert qwhittaker((1,) * r, ell).value.coeffs == {(1,) * r: RatFuncQ(1)}


shapes = st.integers(0, 5).flatmap(lambda m: st.sampled_from(partitions_of(m, 3)))


@settings(max_examples=30, deadline=None)
@given(shapes, st.integers(0, 2))
def test_two_constructions_agree(lam, extra):
    ell = max(1, len(lam)) + extra
    a = qwhittaker(lam, ell, "branching").value
    assert a == qwhittaker(lam, ell, "gram_schmidt").value
    assert schur_bialternant_check(lam, ell)
    # leading term m_λ, every other term dominated by λ
    assert a[lam] == RatFuncQ(1)
    assert all(dominates(lam, mu) for mu in a.coeffs)


def test_fusion_basis_dimensions():
    assert len(fusion_algebra_basis(2, 1)) == 2
    assert len(fusion_algebra_basis(3, 0)) == 1
    assert len(fusion_algebra_basis(3, 2)) == 6


@pytest.mark.parametrize("n,k,red,lam", [(2, 1, (), (1, 1)), (2, 1, (1,), (1,)), (3, 2, (1, 1), (2, 2, 1)),
                                         (3, 2, (2,), (2,))])
def test_q_lambda_maps_vacuum(n, k, red, lam):
    Q = q_lambda_matrix(red, n, k)
    vac = FockVector.basis(n, (k,) * n)
    assert Q.apply(vac) == FockVector.basis(n, lam)
    if not red:
        assert Q == GradedOperator.identity(n, [k])


def test_stated_products():
    t = fusion_table(3, 2)
    assert t.product((2,), (1, 1)) == {(1,): PolyQ.ONE}
    assert t.product((1,), (1, 1)) == {(2, 1): PolyQ.ONE, (): 1 + q ** 2}
    assert fusion_goldens(3, 2).passed
    assert fusion_goldens(3, 1) is None


def test_worked_example_product():
    # computed (2)*(2,1) at n=3, k=3; the (2) term is the one the chain assembles to
    t = fusion_table(3, 3)
    assert t.product((2,), (2, 1)) == {(2,): 1 + q ** 2, (1, 1): 1 + q ** 2, (3, 2): 1 + q ** 2}
    chain = example_chain()
    checks = chain.notes["checks"]
    assert all(v for name, v in checks.items() if name != "stated_product")
    assert not checks["stated_product"]


def test_negative_coefficient():
    assert fusion_table(3, 3)((2, 1), (2, 1), (2, 1)) == 2 + 2 * q ** 2 - q ** 4


@pytest.mark.parametrize("n,k", [(2, 2), (3, 2), (3, 3), (4, 1)])
def test_table_axioms(n, k):
    t = fusion_table(n, k)
    reds = sorted(set(reduced_box(n, k)))
    for a, b, c in product(reds, repeat=3):
        assert t((), a, b) == (PolyQ.ONE if a == b else PolyQ.ZERO)
        assert t(a, b, c) == t(b, a, c)
    for a, b, c, d in product(reds, repeat=4):
        lhs = sum((t(a, b, e) * t(e, c, d) for e in reds), PolyQ.ZERO)
        rhs = sum((t(b, c, e) * t(a, e, d) for e in reds), PolyQ.ZERO)
        assert lhs == rhs


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 4), st.integers(0, 3))
def test_table_entries_are_polynomials_in_q2(n, k):
    for c in fusion_table(n, k).coefficients.values():
        assert all(x == 0 for x in c.c[1::2])


def test_at_q_zero_matches_verlinde():
    for n, k in ((2, 3), (3, 2), (3, 3), (4, 2)):
        v = verlinde_table(n, k)
        assert v["residual"] < 1e-9
        assert v["table"] == fusion_table(n, k).at_q_zero()


@pytest.mark.parametrize("n,k", [(3, 2), (3, 3), (4, 2)])
def test_frobenius(n, k):
    rep = verify_frobenius(n, k)
    assert rep.passed
    assert rep.notes["form_symmetric"] and rep.notes["verlinde_match"]
    # the reduced-column weights are not invariant
    assert not rep.notes["reduced_convention_invariant"]


def test_cylindric_expansion():
    for k in (1, 2):
        rep = cylindric_expansion_check(3, k)
        assert rep.passed
    # coefficient of P_(1) in <(2,1)|Q+(x1)Q+(x2)|(2,2,1)> is -N_{(1),(1,1)}^{(2,1)}
    coeffs = expand_in_whittaker(cylindric_expansion((2, 1), (2, 2, 1), 3))
    t = fusion_table(3, 2)
    assert t((1,), (1, 1), (2, 1)) == PolyQ.ONE
    assert coeffs[(1,)] == RatFuncQ(-1)


@pytest.mark.parametrize("k,j", [(1, 1), (1, 2), (2, 1)])
def test_backlund_fusion_link(k, j):
    rep = backlund_fusion_link(3, k, j, 2)
    assert rep.passed
    assert rep.notes["equations_checked"] > 0


def test_q_zero_export_integers():
    data = fusion_table(3, 2).to_json(q_zero=True)
    assert all(isinstance(e["value"], int) and e["value"] > 0 for e in data["entries"])


def test_verlinde_numeric_unitarity():
    v = verlinde_table(3, 2)
    assert np.isfinite(v["residual"])
