"""
Partitions and the particle-configuration dictionary.

A partition with at most n parts labels an n-site particle configuration:
m_j(λ) = λ_j - λ_{j+1} is the number of columns of height j in the Young
diagram, i.e. the number of particles at site j.  The total particle number
is λ_1.  Partitions are plain tuples of positive integers.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

from .ring import PolyQ

Partition = tuple  # weakly decreasing tuple of positive ints


def as_partition(parts) -> Partition:
    """Normalise a part list: drop zeros, check weakly decreasing."""
    p = tuple(int(x) for x in parts if x)
    if any(x < 0 for x in p) or any(a < b for a, b in zip(p, p[1:])):
        raise ValueError(f"not a partition: {parts!r}")
    return p


def conjugate(lam: Partition) -> Partition:
    if not lam:
        return ()
    return tuple(sum(1 for x in lam if x > i) for i in range(lam[0]))


def multiplicity(lam: Partition, j: int) -> int:
    """Number of columns of height j (= particles at site j)."""
    if j < 1:
        raise ValueError("site index starts at 1")
    a = lam[j - 1] if j <= len(lam) else 0
    b = lam[j] if j < len(lam) else 0
    return a - b


def occupations(lam: Partition, n: int) -> tuple[int, ...]:
    return tuple(multiplicity(lam, j) for j in range(1, n + 1))


def from_occupations(m) -> Partition:
    """Inverse of ``occupations``: λ_i = m_i + m_{i+1} + ... + m_n."""
    parts, acc = [], 0
    for x in reversed(m):
        acc += x
        parts.append(acc)
    return as_partition(reversed(parts))


def add_column(lam: Partition, j: int) -> Partition:
    """Insert one column of height j (create a particle at site j)."""
    if j < 1:
        raise ValueError("site index starts at 1")
    parts = list(lam) + [0] * max(0, j - len(lam))
    for i in range(j):
        parts[i] += 1
    return tuple(x for x in parts if x)


def remove_column(lam: Partition, j: int) -> Partition:
    """Delete one column of height j; raises if site j is empty."""
    if multiplicity(lam, j) == 0:
        raise ValueError(f"no column of height {j} in {lam}")
    parts = list(lam)
    for i in range(j):
        parts[i] -= 1
    return tuple(x for x in parts if x)


def column_ops(lam: Partition, j: int, op: str):
    if op == "multiplicity":
        return multiplicity(lam, j)
    if op == "add_column":
        return add_column(lam, j)
    if op == "remove_column":
        return remove_column(lam, j)
    raise ValueError(f"unknown column operation {op!r}")


@lru_cache(maxsize=None)
def fock_basis(n: int, k: int) -> tuple[Partition, ...]:
    """Partitions with at most n parts and λ_1 = k, in the fixed basis order.

    The order is by length, then lexicographically; for (n, k) = (3, 2) it is
    (2), (2,1), (2,2), (2,1,1), (2,2,1), (2,2,2).
    """
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    if k == 0:
        return ((),)
    out = []

    def rec(prefix, length):
        if len(prefix) == length:
            out.append(tuple(prefix))
            return
        for x in range(1, prefix[-1] + 1):
            rec(prefix + [x], length)

    for length in range(1, n + 1):
        rec([k], length)
    out.sort(key=lambda p: (len(p), p))
    return tuple(out)


@lru_cache(maxsize=None)
def basis_index(n: int, k: int) -> dict:
    return {lam: i for i, lam in enumerate(fock_basis(n, k))}


def fock_dimension(n: int, k: int) -> int:
    return comb(n + k - 1, k)


def reduce_partition(lam: Partition, n: int) -> tuple[Partition, int]:
    """Strip all height-n columns; returns (λ̃, m_n)."""
    if len(lam) > n:
        raise ValueError(f"{lam} has more than {n} parts")
    mn = lam[n - 1] if len(lam) == n else 0
    return tuple(x - mn for x in lam if x - mn), mn


def complement(red: Partition, n: int, k: int) -> Partition:
    """Complement of λ̃ in the (n-1) x k box: (k - λ̃_{n-1}, ..., k - λ̃_1)."""
    if len(red) > n - 1 or (red and red[0] > k):
        raise ValueError(f"{red} does not fit in the {n - 1}x{k} box")
    padded = list(red) + [0] * (n - 1 - len(red))
    return tuple(k - x for x in reversed(padded) if k - x)


def reduce_and_complement(lam: Partition, n: int, k: int) -> tuple[Partition, int, Partition]:
    red, mn = reduce_partition(lam, n)
    return red, mn, complement(red, n, k)


def expand_reduced(red: Partition, n: int, k: int) -> Partition:
    """The unique λ with λ_1 = k and at most n parts whose reduction is λ̃."""
    if len(red) > n - 1 or (red and red[0] > k):
        raise ValueError(f"{red} does not fit in the {n - 1}x{k} box")
    shift = k - (red[0] if red else 0)
    padded = list(red) + [0] * (n - len(red))
    return tuple(x + shift for x in padded if x + shift)


def box_partitions(rows: int, cols: int) -> tuple[Partition, ...]:
    """Partitions fitting in a rows x cols box, ordered by size then reverse lex."""
    out = []

    def rec(prefix, cap):
        out.append(tuple(prefix))
        if len(prefix) == rows:
            return
        for x in range(min(cap, cols), 0, -1):
            rec(prefix + [x], x)

    rec([], cols)
    out.sort(key=lambda p: (sum(p), tuple(-x for x in p)))
    return tuple(out)


def partitions_of(m: int, max_parts: int | None = None) -> list[Partition]:
    """Partitions of m (at most ``max_parts`` parts), in reverse lexicographic order."""
    out = []

    def rec(rem, cap, prefix):
        if rem == 0:
            out.append(tuple(prefix))
            return
        if max_parts is not None and len(prefix) == max_parts:
            return
        for x in range(min(rem, cap), 0, -1):
            rec(rem - x, x, prefix + [x])

    rec(m, m, [])
    return out


def dominates(lam: Partition, mu: Partition) -> bool:
    """λ >= μ in dominance order (same size assumed)."""
    a = b = 0
    for i in range(max(len(lam), len(mu))):
        a += lam[i] if i < len(lam) else 0
        b += mu[i] if i < len(mu) else 0
        if a < b:
            return False
    return True


def compositions(r: int, n: int) -> list[tuple[int, ...]]:
    """All n-tuples of nonnegative ints summing to r, first entry descending."""
    if n == 0:
        return [()] if r == 0 else []
    if n == 1:
        return [(r,)]
    return [(a,) + rest for a in range(r, -1, -1) for rest in compositions(r - a, n - 1)]


# ---------------------------------------------------------------------------
# q-numbers (all in the variable q^2)


@lru_cache(maxsize=None)
def pochhammer(m: int) -> PolyQ:
    """(q^2; q^2)_m = prod_{j=1}^m (1 - q^{2j})."""
    if m < 0:
        raise ValueError("negative Pochhammer index")
    out = PolyQ.ONE
    for j in range(1, m + 1):
        out = out * (PolyQ.ONE - PolyQ.monomial(2 * j))
    return out


@lru_cache(maxsize=None)
def gaussian_binomial(m: int, r: int) -> PolyQ:
    """[m choose r] in q^2; zero outside 0 <= r <= m."""
    if r < 0 or m < 0 or r > m:
        return PolyQ.ZERO
    if r == 0 or r == m:
        return PolyQ.ONE
    # q-Pascal: [m, r] = [m-1, r-1] + q^{2r} [m-1, r]
    return gaussian_binomial(m - 1, r - 1) + gaussian_binomial(m - 1, r).shift(2 * r)


def b_factor(lam: Partition, n: int | None = None) -> PolyQ:
    """b_λ = prod_j (q^2)_{m_j(λ)} over sites j = 1..n (default n = len λ)."""
    if n is None:
        n = len(lam)
    out = PolyQ.ONE
    for m in occupations(lam, n):
        out = out * pochhammer(m)
    return out


def partition_to_json(lam: Partition) -> list[int]:
    return list(lam)
