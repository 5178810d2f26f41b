"""
Fock representation of the q-boson algebra.

The canonical basis vector |λ⟩ has m_j(λ) particles at site j.  In this
normalisation

    β_j  |λ⟩ = |λ - column of height j⟩            (zero if m_j = 0)
    β*_j |λ⟩ = (1 - q^{2 m_j + 2}) |λ + column of height j⟩
    q^{±N_j} |λ⟩ = q^{±m_j} |λ⟩,   N_j |λ⟩ = m_j |λ⟩

so every matrix element of a word in the generators is a polynomial in q.
Sites are cyclic: site 0 is site n and site n + 1 is site 1.

Operators that change the particle number by a fixed amount d are stored as
``GradedOperator``: a family of blocks k -> k + d over a set of source
particle numbers.  Blocks are column-sparse, entries are ``ZQPoly``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .combin import Partition, basis_index, fock_basis, from_occupations, occupations
from .ring import PolyZ, RingError, ZQPoly, _INT_TYPES

KINDS = ("beta", "beta*", "q^N", "q^-N", "N")
_DEGREE = {"beta": -1, "beta*": 1, "q^N": 0, "q^-N": 0, "N": 0}


@dataclass(frozen=True)
class Generator:
    kind: str
    site: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")

    def reduced(self, n: int) -> "Generator":
        return Generator(self.kind, (self.site - 1) % n + 1)

    @property
    def degree(self) -> int:
        return _DEGREE[self.kind]

    def __str__(self):
        return {"beta": "b", "beta*": "b*", "q^N": "qN", "q^-N": "q-N", "N": "N"}[self.kind] + str(self.site)


def beta(j: int) -> Generator:
    return Generator("beta", j)


def beta_star(j: int) -> Generator:
    return Generator("beta*", j)


@dataclass(frozen=True)
class OperatorWord:
    """Product of generator powers, rightmost factor acting first."""

    factors: tuple = ()
    scalar: ZQPoly = field(default=ZQPoly.ONE)

    def __post_init__(self):
        for g, p in self.factors:
            if p < 1:
                raise ValueError("word powers must be positive")
        object.__setattr__(self, "scalar", ZQPoly.coerce(self.scalar))

    @property
    def degree(self) -> int:
        return sum(g.degree * p for g, p in self.factors)

    def __mul__(self, other: "OperatorWord") -> "OperatorWord":
        return OperatorWord(self.factors + other.factors, self.scalar * other.scalar)

    def scaled(self, c) -> "OperatorWord":
        return OperatorWord(self.factors, self.scalar * ZQPoly.coerce(c))

    def __str__(self):
        body = " ".join(str(g) + (f"^{p}" if p > 1 else "") for g, p in self.factors) or "1"
        return body if self.scalar == ZQPoly.ONE else f"({self.scalar}) {body}"


_TOKEN = re.compile(r"^(b\*|b|qN|q-N|N)(\d+)(?:\^(\d+))?$")
_TOKEN_KIND = {"b": "beta", "b*": "beta*", "qN": "q^N", "q-N": "q^-N", "N": "N"}


def parse_word(text: str, scalar=1) -> OperatorWord:
    """Parse a word such as ``"b1 b*2^3 qN1"`` (leftmost factor acts last)."""
    factors = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"bad generator token {tok!r}")
        factors.append((Generator(_TOKEN_KIND[m.group(1)], int(m.group(2))), int(m.group(3) or 1)))
    return OperatorWord(tuple(factors), scalar)


def word(*factors, scalar=1) -> OperatorWord:
    """Build a word from generators or (generator, power) pairs."""
    out = []
    for f in factors:
        out.append(f if isinstance(f, tuple) else (f, 1))
    return OperatorWord(tuple(out), scalar)


@lru_cache(maxsize=None)
def _creation_factor(m: int, p: int) -> ZQPoly:
    # prod_{i=1}^p (1 - q^{2(m+i)})
    out = ZQPoly.ONE
    for i in range(1, p + 1):
        out = out * ZQPoly.from_terms([(0, 0, 1), (0, 2 * (m + i), -1)])
    return out


def _act(g: Generator, p: int, occ: list, n: int):
    """Apply g^p in place to an occupation list; return the scalar or None for zero."""
    j = (g.site - 1) % n
    m = occ[j]
    kind = g.kind
    if kind == "beta":
        if m < p:
            return None
        occ[j] = m - p
        return ZQPoly.ONE
    if kind == "beta*":
        occ[j] = m + p
        return _creation_factor(m, p)
    if kind == "q^N":
        return ZQPoly.monomial(1, qe=p * m)
    if kind == "q^-N":
        return ZQPoly.monomial(1, qe=-p * m)
    return ZQPoly.monomial(m ** p) if m else None


def apply_word_to_state(w: OperatorWord, occ: Sequence[int], n: int):
    """Act on a basis state given by occupations; return (coeff, occ) or None."""
    state = list(occ)
    coef = w.scalar
    if not coef:
        return None
    for g, p in reversed(w.factors):
        c = _act(g, p, state, n)
        if c is None:
            return None
        if c is not ZQPoly.ONE:
            coef = coef * c
    return coef, tuple(state)


class FockVector:
    """Sparse vector: partition -> coefficient."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: dict | None = None):
        self.n = n
        self.coeffs = {}
        for lam, c in (coeffs or {}).items():
            c = ZQPoly.coerce(c)
            if c:
                self.coeffs[tuple(lam)] = c

    @classmethod
    def basis(cls, n: int, lam: Partition) -> "FockVector":
        return cls(n, {tuple(lam): ZQPoly.ONE})

    def __eq__(self, other):
        if not isinstance(other, FockVector):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    def __add__(self, other: "FockVector") -> "FockVector":
        out = dict(self.coeffs)
        for lam, c in other.coeffs.items():
            out[lam] = out.get(lam, ZQPoly.ZERO) + c
        return FockVector(self.n, out)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other.scaled(-1)

    def scaled(self, c) -> "FockVector":
        c = ZQPoly.coerce(c)
        return FockVector(self.n, {lam: x * c for lam, x in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        inner = ", ".join(f"{list(lam)}: {c}" for lam, c in sorted(self.coeffs.items()))
        return f"FockVector({{{inner}}})"


def apply_word(w: OperatorWord, x: FockVector) -> FockVector:
    out: dict = {}
    for lam, c in x.coeffs.items():
        res = apply_word_to_state(w, occupations(lam, x.n), x.n)
        if res is None:
            continue
        coef, occ = res
        mu = from_occupations(occ)
        out[mu] = out.get(mu, ZQPoly.ZERO) + c * coef
    return FockVector(x.n, out)


def apply_generator(g: Generator, x: FockVector) -> FockVector:
    return apply_word(word(g), x)


def pairing(lam: Partition, x: FockVector) -> PolyZ:
    """Coefficient of |λ⟩ in x (dual-basis pairing)."""
    return x.coeffs.get(tuple(lam), ZQPoly.ZERO).to_polyz()


def bra_form(lam: Partition, mu: Partition, n: int | None = None):
    """δ_{λμ} b_λ: the inner product on the canonical basis."""
    from .combin import b_factor
    from .ring import RatFuncQ

    if tuple(lam) != tuple(mu):
        return RatFuncQ.ZERO
    return RatFuncQ(b_factor(tuple(lam), n if n is not None else len(lam)))


# ---------------------------------------------------------------------------
# graded block operators


def _matmul(acols: list, bcols: list) -> list:
    """Column-sparse product: column j of A B = sum_l B[l, j] * column l of A."""
    out = []
    for bcol in bcols:
        acc: dict = {}
        for l, b in bcol.items():
            bt = b.t
            for i, a in acols[l].items():
                d = acc.get(i)
                if d is None:
                    d = acc[i] = {}
                for ka, ca in a.t.items():
                    for kb, cb in bt.items():
                        kk = ka + kb
                        d[kk] = d.get(kk, 0) + ca * cb
        col = {}
        for i, d in acc.items():
            t = {k: c for k, c in d.items() if c}
            if t:
                col[i] = ZQPoly._raw(t)
        out.append(col)
    return out


def _cols_add(a: list, b: list, sign: int = 1) -> list:
    out = []
    for ca, cb in zip(a, b):
        col = dict(ca)
        for i, x in cb.items():
            y = col.get(i)
            v = (y + x if sign > 0 else y - x) if y is not None else (x if sign > 0 else -x)
            if v:
                col[i] = v
            else:
                col.pop(i, None)
        out.append(col)
    return out


def _cols_scale(a: list, c: ZQPoly) -> list:
    if not c:
        return [{} for _ in a]
    if c == ZQPoly.ONE:
        return a
    return [{i: x * c for i, x in col.items()} for col in a]


class GradedOperator:
    """
    Operator of fixed particle-number degree d on an n-site chain.

    ``blocks[k]`` is the matrix from fock_basis(n, k) to fock_basis(n, k + d)
    stored as a list of sparse columns {row index: ZQPoly}.  When k + d < 0
    the block is the zero map into the empty space.  Sums and products are
    kept on the blocks where every operand is defined, so a product whose
    intermediate particle number is missing simply has fewer blocks.
    """

    __slots__ = ("n", "d", "blocks")

    def __init__(self, n: int, d: int, blocks: dict):
        self.n = n
        self.d = d
        self.blocks = blocks

    # -- constructors
    @classmethod
    def zero(cls, n: int, d: int, ks: Iterable[int]) -> "GradedOperator":
        return cls(n, d, {k: [{} for _ in fock_basis(n, k)] for k in ks})

    @classmethod
    def identity(cls, n: int, ks: Iterable[int]) -> "GradedOperator":
        return cls.scalar(n, ks, ZQPoly.ONE)

    @classmethod
    def scalar(cls, n: int, ks: Iterable[int], c) -> "GradedOperator":
        c = ZQPoly.coerce(c)
        return cls(n, 0, {k: [({i: c} if c else {}) for i in range(len(fock_basis(n, k)))] for k in ks})

    @classmethod
    def block_scalar(cls, n: int, ks: Iterable[int], fn) -> "GradedOperator":
        """Degree-0 operator acting on block k as the scalar fn(k)."""
        return cls(n, 0, {k: _cols_scale(cls.identity(n, [k]).blocks[k], ZQPoly.coerce(fn(k))) for k in ks})

    @classmethod
    def from_words(cls, words: Sequence[OperatorWord], n: int, ks: Iterable[int], d: int | None = None) -> "GradedOperator":
        degs = {w.degree for w in words}
        if len(degs) > 1:
            raise ValueError(f"words of mixed degrees {sorted(degs)}")
        if d is None:
            d = degs.pop() if degs else 0
        elif degs and degs != {d}:
            raise ValueError("word degree does not match the requested degree")
        blocks = {}
        for k in ks:
            src = fock_basis(n, k)
            if k + d < 0:
                blocks[k] = [{} for _ in src]
                continue
            tgt = basis_index(n, k + d)
            cols = []
            for lam in src:
                occ = occupations(lam, n)
                col: dict = {}
                for w in words:
                    res = apply_word_to_state(w, occ, n)
                    if res is None:
                        continue
                    c, occ2 = res
                    i = tgt[from_occupations(occ2)]
                    v = col[i] + c if i in col else c
                    if v:
                        col[i] = v
                    else:
                        col.pop(i, None)
                cols.append(col)
            blocks[k] = cols
        return cls(n, d, blocks)

    @classmethod
    def from_generator(cls, g: Generator, n: int, ks: Iterable[int]) -> "GradedOperator":
        return cls.from_words([word(g)], n, ks)

    # -- inspection
    @property
    def ks(self) -> tuple[int, ...]:
        return tuple(sorted(self.blocks))

    def target_dim(self, k: int) -> int:
        return len(fock_basis(self.n, k + self.d)) if k + self.d >= 0 else 0

    def entry(self, k: int, i: int, j: int) -> ZQPoly:
        return self.blocks[k][j].get(i, ZQPoly.ZERO)

    def dense(self, k: int) -> list[list[PolyZ]]:
        """Row-major matrix of PolyZ entries for block k."""
        cols = self.blocks[k]
        return [[cols[j].get(i, ZQPoly.ZERO).to_polyz() for j in range(len(cols))]
                for i in range(self.target_dim(k))]

    def nonzero_entries(self):
        for k, cols in self.blocks.items():
            for j, col in enumerate(cols):
                for i, x in col.items():
                    yield k, i, j, x

    def is_zero(self) -> bool:
        return all(not col for cols in self.blocks.values() for col in cols)

    def __bool__(self):
        return not self.is_zero()

    def _compat(self, other: "GradedOperator"):
        if not isinstance(other, GradedOperator):
            raise RingError(f"cannot combine GradedOperator with {type(other).__name__}")
        if self.n != other.n or self.d != other.d:
            raise RingError(
                f"incompatible operators (n={self.n}, d={self.d}) vs (n={other.n}, d={other.d})")
        # sums live on the blocks both summands are defined on
        return [k for k in self.blocks if k in other.blocks]

    def __eq__(self, other):
        if not isinstance(other, GradedOperator):
            return NotImplemented
        if self.n != other.n or self.d != other.d or set(self.blocks) != set(other.blocks):
            return False
        return all(self.blocks[k] == other.blocks[k] for k in self.blocks)

    __hash__ = None

    def __repr__(self):
        return f"GradedOperator(n={self.n}, d={self.d}, ks={list(self.ks)})"

    # -- arithmetic
    def __add__(self, other):
        if not isinstance(other, GradedOperator):
            if self.d:
                raise RingError("scalar added to an operator of nonzero degree")
            other = GradedOperator.scalar(self.n, self.blocks, other)
        ks = self._compat(other)
        return GradedOperator(self.n, self.d, {k: _cols_add(self.blocks[k], other.blocks[k]) for k in ks})

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GradedOperator):
            if self.d:
                raise RingError("scalar subtracted from an operator of nonzero degree")
            other = GradedOperator.scalar(self.n, self.blocks, other)
        ks = self._compat(other)
        return GradedOperator(self.n, self.d, {k: _cols_add(self.blocks[k], other.blocks[k], -1) for k in ks})

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return GradedOperator(self.n, self.d, {k: [{i: -x for i, x in col.items()} for col in cols]
                                              for k, cols in self.blocks.items()})

    def __mul__(self, other):
        if isinstance(other, GradedOperator):
            return self.compose(other)
        c = ZQPoly.coerce(other)
        return GradedOperator(self.n, self.d, {k: _cols_scale(cols, c) for k, cols in self.blocks.items()})

    def __rmul__(self, other):
        return self * other

    def compose(self, other: "GradedOperator") -> "GradedOperator":
        """self ∘ other on every source block of ``other``."""
        if self.n != other.n:
            raise RingError("operators on different chains")
        blocks = {}
        for k, bcols in other.blocks.items():
            mid = k + other.d
            if mid < 0:
                blocks[k] = [{} for _ in bcols]
                continue
            if mid not in self.blocks:
                continue  # not computable here; the product lives on fewer blocks
            blocks[k] = _matmul(self.blocks[mid], bcols)
        return GradedOperator(self.n, self.d + other.d, blocks)

    def __pow__(self, e: int):
        if self.d:
            raise RingError("power of an operator with nonzero degree")
        out = GradedOperator.identity(self.n, self.blocks)
        for _ in range(e):
            out = self * out
        return out

    def commutator(self, other: "GradedOperator", c=1) -> "GradedOperator":
        """self*other - c*other*self (c = q^2 gives the q^2-commutator)."""
        return self * other - (other * self) * c

    def restrict(self, ks: Iterable[int]) -> "GradedOperator":
        return GradedOperator(self.n, self.d, {k: self.blocks[k] for k in ks})

    def map_entries(self, fn) -> "GradedOperator":
        blocks = {}
        for k, cols in self.blocks.items():
            new = []
            for col in cols:
                c2 = {}
                for i, x in col.items():
                    y = fn(x)
                    if y:
                        c2[i] = y
                new.append(c2)
            blocks[k] = new
        return GradedOperator(self.n, self.d, blocks)

    def exact_div(self, p) -> "GradedOperator":
        return self.map_entries(lambda x: x.exact_div(p))

    def at_z(self, z0) -> "GradedOperator":
        return self.map_entries(lambda x: x.at_z(z0))

    def shift_q(self, qe: int) -> "GradedOperator":
        return self.map_entries(lambda x: x.shift(qe=qe))

    def entries_polynomial(self) -> bool:
        """Every entry is an integer polynomial in q^2 and z."""
        return all(x.is_polynomial() and x.is_even_in_q() for *_, x in self.nonzero_entries())

    def apply(self, x: FockVector) -> FockVector:
        out: dict = {}
        for lam, c in x.coeffs.items():
            k = lam[0] if lam else 0
            j = basis_index(self.n, k)[lam]
            tgt = fock_basis(self.n, k + self.d)
            for i, e in self.blocks[k][j].items():
                mu = tgt[i]
                out[mu] = out.get(mu, ZQPoly.ZERO) + e * c
        return FockVector(self.n, out)

    def to_numpy(self, k: int, q: float | complex, z: float | complex = 1):
        import numpy as np

        cols = self.blocks[k]
        m = np.zeros((self.target_dim(k), len(cols)), dtype=complex)
        for j, col in enumerate(cols):
            for i, x in col.items():
                m[i, j] = x.evaluate(q, z)
        return m

    def to_json(self) -> dict:
        out = []
        for k in self.ks:
            out.append({
                "k": k,
                "source_basis": [list(p) for p in fock_basis(self.n, k)],
                "target_basis": [list(p) for p in fock_basis(self.n, k + self.d)] if k + self.d >= 0 else [],
                "matrix": [[x.to_json() for x in row] for row in self.dense(k)],
            })
        return {"n": self.n, "degree": self.d, "blocks": out}


def matrix_of(terms: Sequence[OperatorWord], n: int, k: int) -> GradedOperator:
    return GradedOperator.from_words(terms, n, [k])


def generator_op(kind: str, j: int, n: int, ks: Iterable[int]) -> GradedOperator:
    return GradedOperator.from_generator(Generator(kind, j), n, ks)


def q2N(n: int, ks: Iterable[int], power: int = 1) -> GradedOperator:
    """q^{2 power N} where N is the total particle number."""
    return GradedOperator.block_scalar(n, ks, lambda k: ZQPoly.monomial(1, qe=2 * power * k))


def as_scalar(x):
    if isinstance(x, _INT_TYPES):
        return ZQPoly.monomial(x)
    return ZQPoly.coerce(x)
