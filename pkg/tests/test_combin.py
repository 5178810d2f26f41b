from itertools import product
from math import comb

from hypothesis import given, strategies as st

from qbacklund.combin import (add_column, b_factor, box_partitions, column_ops, complement, compositions,
                              conjugate, expand_reduced, fock_basis, fock_dimension, gaussian_binomial,
                              multiplicity, occupations, partitions_of, reduce_and_complement, remove_column)
from qbacklund.ring import PolyQ

q = PolyQ.monomial(1)


def brute_basis(n, k):
    # all occupation vectors with m_1 + ... + m_n = k, read as partitions
    out = set()
    for m in product(range(k + 1), repeat=n):
        if sum(m) == k:
            lam = []
            for j in range(n, 0, -1):
                lam += [j] * m[j - 1]
            out.add(conjugate(tuple(lam)) if lam else ())
    return out


def test_fock_basis_examples():
    assert fock_basis(3, 2) == ((2,), (2, 1), (2, 2), (2, 1, 1), (2, 2, 1), (2, 2, 2))
    assert fock_basis(1, 3) == ((3,),)
    assert fock_basis(2, 1) == ((1,), (1, 1))
    assert fock_basis(4, 0) == ((),)


def test_fock_basis_counts():
    for n in range(1, 6):
        for k in range(5):
            basis = fock_basis(n, k)
            assert len(basis) == len(set(basis)) == comb(n + k - 1, k) == fock_dimension(n, k)
            assert set(basis) == brute_basis(n, k)


def test_column_ops_examples():
    assert column_ops((2, 2, 1), 1, "add_column") == (3, 2, 1)
    assert column_ops((2, 2, 1), 3, "multiplicity") == 1
    assert column_ops((2, 1), 1, "remove_column") == (1, 1)


def test_reduce_and_complement_examples():
    red, mn, _ = reduce_and_complement((3, 2, 1), 3, 3)
    assert (red, mn) == ((2, 1), 1)
    assert reduce_and_complement((2, 2, 2), 3, 2)[:2] == ((), 2)
    assert complement((1,), 3, 2) == (2, 1)


def test_q_numbers():
    assert gaussian_binomial(2, 1) == 1 + q ** 2
    assert gaussian_binomial(3, 5) == PolyQ.ZERO
    assert b_factor((2, 2, 1)) == (1 - q ** 2) ** 2


def test_gaussian_binomial_nonnegative_and_symmetric():
    for m in range(13):
        for r in range(m + 1):
            g = gaussian_binomial(m, r)
            assert all(c >= 0 for c in g.c)
            assert g == gaussian_binomial(m, m - r)
            assert g(1) == comb(m, r)


def test_compositions_examples():
    assert compositions(1, 3) == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    assert compositions(0, 4) == [(0, 0, 0, 0)]
    assert compositions(2, 2) == [(2, 0), (1, 1), (0, 2)]
    for r in range(5):
        for n in range(1, 5):
            assert len(compositions(r, n)) == comb(r + n - 1, n - 1)


partitions = st.integers(0, 8).flatmap(lambda m: st.sampled_from(partitions_of(m)))


@given(partitions)
def test_conjugate_involution(lam):
    assert conjugate(conjugate(lam)) == lam
    assert sum(conjugate(lam)) == sum(lam)


@given(partitions, st.integers(1, 5))
def test_add_remove_column_inverse(lam, j):
    n = max(5, len(lam))
    grown = add_column(lam, j)
    assert multiplicity(grown, j) == multiplicity(lam, j) + 1
    assert remove_column(grown, j) == lam
    if multiplicity(lam, j):
        assert add_column(remove_column(lam, j), j) == lam
    assert sum(occupations(grown, n)) == sum(occupations(lam, n)) + 1


@given(st.integers(2, 5), st.integers(0, 4))
def test_reduction_is_a_bijection_on_the_basis(n, k):
    reds = [reduce_and_complement(lam, n, k)[0] for lam in fock_basis(n, k)]
    assert sorted(set(reds)) == sorted(box_partitions(n - 1, k))
    for red in box_partitions(n - 1, k):
        assert complement(complement(red, n, k), n, k) == red
        lam = expand_reduced(red, n, k)
        assert lam in fock_basis(n, k)
        assert reduce_and_complement(lam, n, k)[0] == red
