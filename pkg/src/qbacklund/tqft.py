"""
q-Whittaker functions, the fusion algebra A_{n,k} and its Frobenius structure.

A_{n,k} is the algebra generated by the Q_r^+ (equivalently the T_r) on the
k-particle block at z = 1.  Its basis {Q_λ̃} is fixed by the operator-state
correspondence Q_λ̃ |k^n⟩ = |λ⟩, where |k^n⟩ has all k particles at site n
and λ̃ is λ with its height-n columns removed.  Fusion coefficients are then
matrix elements, N_{λ̃μ̃}^{ν̃} = ⟨ν| Q_λ̃ |μ⟩.

Linear algebra is exact over Q(q) with ``RatFuncQ``.  Rank decisions are
made at a random rational q (a lower bound for the generic rank) and then
certified by exact identities.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .combin import (
    add_column,
    b_factor,
    basis_index,
    box_partitions,
    complement,
    expand_reduced,
    fock_basis,
    fock_dimension,
    gaussian_binomial,
    multiplicity,
    partitions_of,
    reduce_partition,
    remove_column,
)
from .fock import GradedOperator
from .funrel import VerifyReport
from .lattice import build_Qr
from .ring import MultiPoly, PolyQ, RatFuncQ, RingError, ZQPoly, poly_determinant

Partition = tuple

# ---------------------------------------------------------------------------
# symmetric polynomials in the monomial basis


def _rf(x) -> RatFuncQ:
    if isinstance(x, RatFuncQ):
        return x
    if isinstance(x, PolyQ):
        return RatFuncQ(x)
    if isinstance(x, ZQPoly):
        return x.to_ratfunc()
    return RatFuncQ(x)


@dataclass
class SymPoly:
    """Symmetric polynomial in ℓ variables: {partition: coefficient of m_λ}."""

    ell: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for lam, c in self.coeffs.items():
            if len(lam) > self.ell:
                raise ValueError(f"{lam} has more than {self.ell} parts")
            c = _rf(c)
            if c:
                clean[tuple(lam)] = c
        self.coeffs = clean

    def __getitem__(self, lam) -> RatFuncQ:
        return self.coeffs.get(tuple(lam), RatFuncQ.ZERO)

    def __eq__(self, other):
        return isinstance(other, SymPoly) and self.ell == other.ell and self.coeffs == other.coeffs

    def __add__(self, other: "SymPoly") -> "SymPoly":
        out = dict(self.coeffs)
        for lam, c in other.coeffs.items():
            out[lam] = out.get(lam, RatFuncQ.ZERO) + c
        return SymPoly(self.ell, out)

    def __sub__(self, other: "SymPoly") -> "SymPoly":
        return self + other.scaled(-1)

    def scaled(self, c) -> "SymPoly":
        c = _rf(c)
        return SymPoly(self.ell, {lam: v * c for lam, v in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def at_q(self, q) -> dict:
        return {lam: c(q) for lam, c in self.coeffs.items()}

    def to_multipoly(self, q=0) -> MultiPoly:
        """Expand m_λ into monomials after evaluating coefficients at q."""
        names = tuple(f"x{i}" for i in range(1, self.ell + 1))
        out = MultiPoly.constant(0, names)
        terms = {}
        for lam, c in self.coeffs.items():
            val = c(Fraction(q))
            padded = tuple(lam) + (0,) * (self.ell - len(lam))
            for perm in set(itertools.permutations(padded)):
                terms[perm] = terms.get(perm, 0) + val
        return out + MultiPoly(names, terms)

    def __str__(self):
        if not self.coeffs:
            return "0"
        order = sorted(self.coeffs, key=lambda p: (sum(p), p), reverse=True)
        return " + ".join(f"({self.coeffs[lam]})*m{list(lam)}" for lam in order)

    def to_json(self) -> dict:
        return {"ell": self.ell,
                "terms": [{"m": list(lam), "coeff": str(c)} for lam, c in
                          sorted(self.coeffs.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)]}


@dataclass
class WhittakerPoly:
    shape: Partition
    ell: int
    value: SymPoly


# ---------------------------------------------------------------------------
# q-Whittaker functions P_λ(x; q) = P_λ(x; q^2, 0)


def _interlacing(lam: Partition):
    """μ with λ_1 >= μ_1 >= λ_2 >= μ_2 >= ... (μ has one part fewer than λ)."""
    lam = tuple(lam)
    ranges = [range(lam[i + 1], lam[i] + 1) for i in range(len(lam) - 1)]
    for mu in itertools.product(*ranges):
        yield tuple(mu)


@lru_cache(maxsize=None)
def _whittaker_by_branching(lam: Partition, ell: int) -> dict:
    """
    m-coordinates of P_λ(x_1..x_ℓ) from the branching rule at (q^2, 0):

        P_λ(x_1..x_ℓ) = Σ_{μ ≺ λ} ψ_{λ/μ} x_ℓ^{|λ|-|μ|} P_μ(x_1..x_{ℓ-1}),
        ψ_{λ/μ} = Π_{i<ℓ} [λ_i - λ_{i+1}, λ_i - μ_i]_{q^2}.

    The m_ν coefficient is the coefficient of x^ν (ν padded, decreasing), so
    only μ with |λ| - |μ| = ν_ℓ and P_μ's m_{ν_1..ν_{ℓ-1}} coefficient enter.
    """
    if len(lam) > ell:
        return {}
    if ell == 0:
        return {(): RatFuncQ.ONE} if not lam else {}
    padded = lam + (0,) * (ell - len(lam))
    out: dict = {}
    for mu in _interlacing(padded):
        coef = PolyQ.ONE
        for i in range(ell - 1):
            coef = coef * gaussian_binomial(padded[i] - padded[i + 1], padded[i] - mu[i])
        d = sum(padded) - sum(mu)
        sub = _whittaker_by_branching(tuple(x for x in mu if x), ell - 1)
        for kappa, c in sub.items():
            kp = kappa + (0,) * (ell - 1 - len(kappa))
            if kp and kp[-1] < d:
                continue  # x^{(κ, d)} is not in decreasing order
            nu = tuple(x for x in kp + (d,) if x)
            out[nu] = out.get(nu, RatFuncQ.ZERO) + c * RatFuncQ(coef)
    return {k: v for k, v in out.items() if v}


def _p_to_m(rho: Partition, lam: Partition) -> int:
    """Coefficient of m_λ in the power sum p_ρ (ways to distribute parts)."""
    target = list(lam)
    count = 0
    for assign in itertools.product(range(len(target)), repeat=len(rho)):
        sums = [0] * len(target)
        for part, slot in zip(rho, assign):
            sums[slot] += part
        if sums == target:
            count += 1
    return count


def _z(rho: Partition) -> int:
    out = 1
    for part in set(rho):
        m = rho.count(part)
        out *= part ** m * math.factorial(m)
    return out


@lru_cache(maxsize=None)
def _m_gram(m: int):
    """Gram matrix of the m-basis of degree m under ⟨p_ρ, p_σ⟩ = δ z_ρ Π(1 - q^{2ρ_i})."""
    parts = sorted(partitions_of(m))  # lexicographic: refines dominance
    L = [[Fraction(_p_to_m(rho, lam)) for lam in parts] for rho in parts]
    Linv = _invert_rational(L)
    D = []
    for rho in parts:
        d = PolyQ.const(_z(rho))
        for x in rho:
            d = d * (PolyQ.ONE - PolyQ.monomial(2 * x))
        D.append(RatFuncQ(d))
    size = len(parts)
    G = [[sum((D[r] * (Linv[a][r] * Linv[b][r]) for r in range(size) if Linv[a][r] and Linv[b][r]),
              RatFuncQ.ZERO) for b in range(size)] for a in range(size)]
    return parts, G


def _invert_rational(M):
    n = len(M)
    A = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c])
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [x / piv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


@lru_cache(maxsize=None)
def _gram_schmidt_all(m: int) -> dict:
    """P_λ for all |λ| = m in infinitely many variables, m-coordinates as vectors."""
    parts, G = _m_gram(m)
    size = len(parts)

    def form(u, v):
        acc = RatFuncQ.ZERO
        for a in range(size):
            if not u[a]:
                continue
            for b in range(size):
                if v[b] and G[a][b]:
                    acc = acc + u[a] * v[b] * G[a][b]
        return acc

    done: list = []  # (vector, norm)
    out = {}
    for i, lam in enumerate(parts):  # increasing in lexicographic order
        vec = [RatFuncQ.ONE if j == i else RatFuncQ.ZERO for j in range(size)]
        for prev, norm in done:
            c = form(vec, prev) / norm
            if c:
                vec = [x - c * y for x, y in zip(vec, prev)]
        done.append((vec, form(vec, vec)))
        out[lam] = {parts[j]: vec[j] for j in range(size) if vec[j]}
    return out


def _whittaker_by_gram_schmidt(lam: Partition, ell: int) -> dict:
    full = _gram_schmidt_all(sum(lam))[lam]
    return {nu: c for nu, c in full.items() if len(nu) <= ell}


def qwhittaker(lam: Partition, ell: int, method: str = "branching") -> WhittakerPoly:
    lam = tuple(x for x in lam if x)
    if len(lam) > ell:
        raise ValueError(f"{lam} has more than {ell} parts")
    if method == "branching":
        coeffs = _whittaker_by_branching(lam, ell)
    elif method == "gram_schmidt":
        coeffs = _whittaker_by_gram_schmidt(lam, ell)
    else:
        raise ValueError(f"unknown method {method!r}")
    return WhittakerPoly(lam, ell, SymPoly(ell, dict(coeffs)))


def schur_bialternant_check(lam: Partition, ell: int) -> bool:
    """P_λ(x; q=0) · a_δ == a_{λ+δ} as polynomials in ℓ variables."""
    lam = tuple(x for x in lam if x)
    names = tuple(f"x{i}" for i in range(1, ell + 1))
    xs = [MultiPoly.var(v, names) for v in names]
    padded = lam + (0,) * (ell - len(lam))
    a_lam = poly_determinant([[xs[i] ** (padded[j] + ell - 1 - j) for j in range(ell)] for i in range(ell)])
    a_delta = poly_determinant([[xs[i] ** (ell - 1 - j) for j in range(ell)] for i in range(ell)])
    P0 = qwhittaker(lam, ell).value.to_multipoly(0)
    return P0 * a_delta == a_lam


# ---------------------------------------------------------------------------
# exact linear algebra over Q(q)


def _solve(M: list, rhs: list) -> list:
    """Solve M c = rhs (square, RatFuncQ entries) by Gauss-Jordan; raises if singular."""
    n = len(M)
    A = [[_rf(x) for x in row] + [_rf(b)] for row, b in zip(M, rhs)]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c]), None)
        if p is None:
            raise RingError("singular system")
        A[c], A[p] = A[p], A[c]
        inv = A[c][c].inverse()
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [A[r][n] for r in range(n)]


def _inverse(M: list) -> list:
    n = len(M)
    cols = [_solve(M, [RatFuncQ.ONE if i == j else RatFuncQ.ZERO for i in range(n)]) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _rank_at(vectors: list, q0: Fraction) -> int:
    rows = [[x.evaluate(q0, 1) if isinstance(x, ZQPoly) else x for x in v] for v in vectors]
    rank, ncols = 0, len(rows[0]) if rows else 0
    rows = [list(map(Fraction, r)) for r in rows]
    for c in range(ncols):
        p = next((r for r in range(rank, len(rows)) if rows[r][c]), None)
        if p is None:
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        for r in range(rank + 1, len(rows)):
            if rows[r][c]:
                f = rows[r][c] / rows[rank][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _flatten(op: GradedOperator, k: int) -> list:
    cols = op.blocks[k]
    dim = len(cols)
    return [cols[j].get(i, ZQPoly.ZERO) for j in range(dim) for i in range(dim)]


def _combine(coeffs: list, ops: list, n: int, k: int) -> GradedOperator:
    """Σ c_i ops_i with RatFuncQ c_i; the result must have polynomial entries."""
    den = PolyQ.ONE
    for c in coeffs:
        den = _lcm(den, c.den)
    acc = GradedOperator.zero(n, 0, [k])
    for c, op in zip(coeffs, ops):
        if c:
            scale = ZQPoly.from_polyq(c.num * den.exact_div(c.den))
            acc = acc + op * scale
    if den.is_one():
        return acc
    try:
        return acc.exact_div(den)
    except RingError as exc:
        raise RingError("combination has non-polynomial entries") from exc


def _lcm(a: PolyQ, b: PolyQ) -> PolyQ:
    from .ring import poly_gcd
    if b.is_one():
        return a
    return (a * b).exact_div(poly_gcd(a, b)).monic()


# ---------------------------------------------------------------------------
# the fusion algebra A_{n,k}


def _vacuum_index(n: int, k: int) -> int:
    return basis_index(n, k)[(k,) * n if k else ()]


@dataclass
class FusionAlgebra:
    n: int
    k: int
    basis: list          # GradedOperator on block k (products of Q_r^+ at z = 1)
    words: list          # the Q_r^+ indices of each basis element
    state_matrix: list   # columns: basis_i |k^n⟩, RatFuncQ entries
    state_inverse: list


@lru_cache(maxsize=None)
def _qplus_z1(n: int, k: int, r: int) -> GradedOperator:
    return build_Qr("+", n, k, r).at_z(1)


@lru_cache(maxsize=None)
def fusion_algebra(n: int, k: int, seed: int = 7) -> FusionAlgebra:
    """
    Close {1, Q_1^+, ..., Q_k^+} under products and pick a basis of the span.

    Candidates are admitted when they raise the rank at a random rational q;
    that rank is a lower bound for the rank over Q(q).  Closure is then
    certified exactly: every product basis_i · Q_r^+ is an exact Q(q)
    combination of the basis.
    """
    dim = fock_dimension(n, k)
    q0 = Fraction(random.Random(seed).randint(2, 10 ** 6), random.Random(seed + 1).randint(10 ** 6 + 1, 2 * 10 ** 6))
    gens = [_qplus_z1(n, k, r) for r in range(1, k + 1)]
    basis = [GradedOperator.identity(n, [k])]
    words: list = [()]
    flat = [_flatten(basis[0], k)]
    frontier = list(range(len(basis)))
    while frontier and len(basis) < dim:
        nxt = []
        for i in frontier:
            for r, g in enumerate(gens, start=1):
                if words[i] and r < words[i][-1]:
                    continue  # commuting generators: keep words sorted
                cand = basis[i] * g
                f = _flatten(cand, k)
                if _rank_at(flat + [f], q0) > len(flat):
                    basis.append(cand)
                    words.append(words[i] + (r,))
                    flat.append(f)
                    nxt.append(len(basis) - 1)
        frontier = nxt
    if len(basis) != dim:
        raise RingError(f"fusion algebra spans {len(basis)} dimensions, expected {dim}")
    vac = _vacuum_index(n, k)
    S = [[_rf(b.blocks[k][vac].get(i, ZQPoly.ZERO)) for b in basis] for i in range(dim)]
    Sinv = _inverse(S)
    alg = FusionAlgebra(n, k, basis, words, S, Sinv)
    _certify_closure(alg, gens)
    return alg


def _coords(alg: FusionAlgebra, op: GradedOperator) -> list:
    """Coordinates of op in the basis, read off from op |k^n⟩."""
    vac = _vacuum_index(alg.n, alg.k)
    col = op.blocks[alg.k][vac]
    dim = len(alg.basis)
    y = [_rf(col.get(i, ZQPoly.ZERO)) for i in range(dim)]
    return [sum((alg.state_inverse[a][b] * y[b] for b in range(dim) if y[b]), RatFuncQ.ZERO)
            for a in range(dim)]


def _certify_closure(alg: FusionAlgebra, gens: list):
    for b in alg.basis:
        for g in gens:
            prod = b * g
            c = _coords(alg, prod)
            if _combine(c, alg.basis, alg.n, alg.k) != prod:
                raise RingError("span of the Q_r^+ products is not closed under multiplication")


def fusion_algebra_basis(n: int, k: int) -> list:
    return list(fusion_algebra(n, k).basis)


def reduced_box(n: int, k: int) -> list:
    """Reduced partitions λ̃ in the (n-1) x k box, in Fock basis order of λ."""
    return [reduce_partition(lam, n)[0] for lam in fock_basis(n, k)]


@lru_cache(maxsize=None)
def q_lambda_matrix(red: Partition, n: int, k: int) -> GradedOperator:
    """The element Q_λ̃ of A_{n,k} with Q_λ̃ |k^n⟩ = |λ⟩."""
    red = tuple(red)
    lam = expand_reduced(red, n, k)
    alg = fusion_algebra(n, k)
    idx = basis_index(n, k)[lam]
    c = [alg.state_inverse[a][idx] for a in range(len(alg.basis))]
    return _combine(c, alg.basis, n, k)


@dataclass
class FusionTable:
    n: int
    k: int
    coefficients: dict  # (λ̃, μ̃, ν̃) -> PolyQ, nonzero entries only

    def __call__(self, lam, mu, nu) -> PolyQ:
        return self.coefficients.get((tuple(lam), tuple(mu), tuple(nu)), PolyQ.ZERO)

    def product(self, lam, mu) -> dict:
        """ν̃ -> N_{λ̃μ̃}^{ν̃}, nonzero terms."""
        lam, mu = tuple(lam), tuple(mu)
        return {nu: c for (a, b, nu), c in self.coefficients.items() if a == lam and b == mu}

    def at_q_zero(self) -> dict:
        return {key: c(0) for key, c in self.coefficients.items() if c(0)}

    def to_json(self, q_zero: bool = False) -> dict:
        entries = []
        for (lam, mu, nu), c in sorted(self.coefficients.items()):
            e = {"lambda": list(lam), "mu": list(mu), "nu": list(nu)}
            if q_zero:
                if not c(0):
                    continue
                e["value"] = int(c(0))
            else:
                e["coeffs"] = _q2_coeffs(c)
            entries.append(e)
        return {"n": self.n, "k": self.k, "entries": entries}


def _q2_coeffs(p: PolyQ) -> list:
    """Ascending coefficients in q^2 (entries are even in q)."""
    c = list(p.c)
    if any(c[i] for i in range(1, len(c), 2)):
        raise RingError(f"{p} is not a polynomial in q^2")
    return [int(x) if Fraction(x).denominator == 1 else str(x) for x in c[::2]]


@lru_cache(maxsize=None)
def fusion_table(n: int, k: int) -> FusionTable:
    basis = fock_basis(n, k)
    reds = reduced_box(n, k)
    coeffs = {}
    for lam_red in reds:
        Q = q_lambda_matrix(lam_red, n, k)
        for j, mu in enumerate(basis):
            for i, x in Q.blocks[k][j].items():
                if not x.is_polynomial():
                    raise RingError(f"non-polynomial fusion coefficient {x}")
                p = x.to_ratfunc()
                if not p.is_polynomial():
                    raise RingError(f"non-polynomial fusion coefficient {p}")
                coeffs[(lam_red, reds[j], reds[i])] = p.num
    return FusionTable(n, k, coeffs)


def fusion_product_str(table: FusionTable, lam, mu) -> str:
    prod = table.product(lam, mu)
    if not prod:
        return "0"
    return " + ".join(f"({c})*{list(nu)}" if c != PolyQ.ONE else str(list(nu))
                      for nu, c in sorted(prod.items()))


# ---------------------------------------------------------------------------
# Frobenius structure and the q = 0 Verlinde oracle


def b_reduced(red: Partition, n: int, k: int, convention: str = "reduced") -> PolyQ:
    """
    b_λ̃ = Π_j (q^2)_{m_j}.  ``reduced`` counts the columns of λ̃ only;
    ``full`` also counts the k - λ̃_1 height-n columns of the expanded λ.
    """
    if convention == "reduced":
        return b_factor(tuple(red), n)
    if convention == "full":
        return b_factor(expand_reduced(tuple(red), n, k), n)
    raise ValueError(f"unknown convention {convention!r}")


@dataclass
class FrobeniusData:
    n: int
    k: int
    identity: GradedOperator
    form: dict  # (λ̃, μ̃) -> RatFuncQ, nonzero values only

    def __call__(self, lam, mu) -> RatFuncQ:
        return self.form.get((tuple(lam), tuple(mu)), RatFuncQ.ZERO)


def frobenius_data(n: int, k: int, convention: str = "reduced") -> FrobeniusData:
    form = {}
    for lam in box_partitions(n - 1, k):
        form[(lam, complement(lam, n, k))] = RatFuncQ.ONE / b_reduced(lam, n, k, convention)
    return FrobeniusData(n, k, q_lambda_matrix((), n, k), form)


def _frobenius_form_failures(table: FusionTable, convention: str, limit: int = 3):
    """Witnesses where ⟨Q_λQ_μ, Q_ν⟩ ≠ ⟨Q_λ, Q_μQ_ν⟩, and symmetry failures."""
    n, k = table.n, table.k
    F = frobenius_data(n, k, convention)
    reds = box_partitions(n - 1, k)
    inv, sym = [], []
    for a in reds:
        for b in reds:
            if F(a, b) != F(b, a) and len(sym) < limit:
                sym.append([list(a), list(b)])
            for c in reds:
                left = sum((RatFuncQ(table(a, b, r)) * F(r, c) for r in reds if table(a, b, r)), RatFuncQ.ZERO)
                right = sum((RatFuncQ(table(b, c, r)) * F(a, r) for r in reds if table(b, c, r)), RatFuncQ.ZERO)
                if left != right and len(inv) < limit:
                    inv.append([list(a), list(b), list(c)])
    return inv, sym


def verlinde_table(n: int, k: int) -> dict:
    """
    SU(n) level-k fusion numbers from the Verlinde formula, computed in
    floating point and rounded.  Weights are the reduced partitions in the
    (n-1) x k box; returns {(λ̃, μ̃, ν̃): int} plus the worst rounding residual.
    """
    reds = box_partitions(n - 1, k)
    h = k + n
    rho = np.arange(n - 1, -1, -1, dtype=float)

    def shifted(lam):
        v = np.array(list(lam) + [0] * (n - len(lam)), dtype=float) + rho
        return v - v.mean()  # project off the trace: su(n) weights

    vecs = [shifted(lam) for lam in reds]
    S = np.zeros((len(reds), len(reds)), dtype=complex)
    for a, va in enumerate(vecs):
        for b, vb in enumerate(vecs):
            # the alternating sum over S_n is a determinant
            S[a, b] = np.linalg.det(np.exp(-2j * np.pi * np.outer(va, vb) / h))
    S /= math.sqrt(abs((S @ S.conj().T)[0, 0]))
    unit = reds.index(())
    out, worst = {}, 0.0
    for a in range(len(reds)):
        for b in range(len(reds)):
            for c in range(len(reds)):
                val = np.sum(S[a] * S[b] * S[c].conj() / S[unit])
                r = round(val.real)
                worst = max(worst, abs(val - r))
                if r:
                    out[(reds[a], reds[b], reds[c])] = int(r)
    return {"table": out, "residual": float(worst)}


def verify_frobenius(n: int, k: int, convention: str = "full") -> VerifyReport:
    table = fusion_table(n, k)
    reds = box_partitions(n - 1, k)
    notes: dict = {}
    fail = None

    for a, b, c in itertools.product(reds, repeat=3):
        if table(a, b, c) != table(b, a, c):
            fail = fail or {"axiom": "commutativity", "witness": [list(a), list(b), list(c)]}
            break
    for a, b, c in itertools.product(reds, repeat=3):
        if fail:
            break
        for s in reds:
            left = sum((table(a, b, r) * table(r, c, s) for r in reds), PolyQ.ZERO)
            right = sum((table(b, c, r) * table(a, r, s) for r in reds), PolyQ.ZERO)
            if left != right:
                fail = {"axiom": "associativity", "witness": [list(a), list(b), list(c), list(s)]}
                break
    for b, c in itertools.product(reds, repeat=2):
        if table((), b, c) != (PolyQ.ONE if b == c else PolyQ.ZERO):
            fail = fail or {"axiom": "unit", "witness": [list(b), list(c)]}
            break

    inv, sym = _frobenius_form_failures(table, convention)
    other = "full" if convention == "reduced" else "reduced"
    inv_o, sym_o = _frobenius_form_failures(table, other)
    notes["form_convention"] = convention
    notes["form_symmetric"] = not sym
    notes[f"{other}_convention_invariant"] = not inv_o
    notes[f"{other}_convention_symmetric"] = not sym_o
    if inv and not fail:
        fail = {"axiom": "form invariance", "witness": inv}

    nonneg = all(all(Fraction(c) >= 0 for c in p.c) for p in table.coefficients.values())
    notes["coefficients_nonnegative"] = nonneg

    ver = verlinde_table(n, k)
    q0 = table.at_q_zero()
    notes["verlinde_residual"] = ver["residual"]
    matches = q0 == ver["table"]
    if not matches:
        conj = {(a, b, _dual(c, n, k)): v for (a, b, c), v in ver["table"].items()}
        notes["verlinde_match_with_dual_output"] = q0 == conj
    notes["verlinde_match"] = matches
    if not matches and not fail:
        diff = sorted(set(q0.items()) ^ set(ver["table"].items()))[:3]
        fail = {"axiom": "q=0 Verlinde", "witness": [[list(x) for x in key] + [v] for key, v in diff]}
    if ver["residual"] >= 1e-6 and not fail:
        fail = {"axiom": "Verlinde rounding", "witness": ver["residual"]}
    return VerifyReport("Frobenius axioms", n, k, 0, fail is None, fail, notes)


def _dual(red: Partition, n: int, k: int) -> Partition:
    """Highest weight of the dual SU(n) representation, as a reduced partition."""
    padded = list(red) + [0] * (n - 1 - len(red))
    top = padded[0] if padded else 0
    return tuple(x for x in (top - padded[n - 2 - i] for i in range(n - 1)) if x)


# ---------------------------------------------------------------------------
# the P-expansion route


def _q_word(n: int, k: int, word: tuple) -> GradedOperator:
    out = GradedOperator.identity(n, [k])
    for r in word:
        if r:
            out = out * _qplus_z1(n, k, r)
    return out


def cylindric_expansion(lam: Partition, mu: Partition, n: int) -> SymPoly:
    """⟨λ| Π_{i<n} Q^+(x_i) |μ⟩ at z = 1 in the monomial basis (ℓ = n - 1)."""
    k = lam[0] if lam else 0
    ell = n - 1
    idx = basis_index(n, k)
    coeffs = {}
    for nu in box_partitions(ell, k):
        padded = tuple(nu) + (0,) * (ell - len(nu))
        x = _q_word(n, k, padded).blocks[k][idx[mu]].get(idx[lam])
        if x:
            coeffs[nu] = x.to_ratfunc()
    return SymPoly(ell, coeffs)


def expand_in_whittaker(f: SymPoly) -> dict:
    """Coefficients c_ν with f = Σ c_ν P_ν, by triangular solve from the top."""
    ell = f.ell
    rest = SymPoly(ell, dict(f.coeffs))
    out = {}
    degrees = sorted({sum(p) for p in f.coeffs}, reverse=True)
    for d in degrees:
        for nu in sorted(partitions_of(d, ell), reverse=True):  # lex decreasing
            c = rest[nu]
            if c:
                out[nu] = c
                rest = rest - qwhittaker(nu, ell).value.scaled(c)
    if not rest.is_zero():
        raise RingError("expansion did not terminate: residual is nonzero")
    return out


# candidate readings of the expansion coefficient of P_ν in ⟨λ|ΠQ^+|μ⟩
_PLACEMENTS = {
    "N_{nu mu}^{lambda}": lambda nu, mu, lam: (nu, mu, lam),
    "N_{nu lambda}^{mu}": lambda nu, mu, lam: (nu, lam, mu),
    "N_{mu lambda}^{nu}": lambda nu, mu, lam: (mu, lam, nu),
}


def cylindric_expansion_check(n: int, k: int) -> VerifyReport:
    """Compare the P-expansion of ⟨λ|ΠQ^+(x_i)|μ⟩ with the fusion table."""
    table = fusion_table(n, k)
    basis = fock_basis(n, k)
    ell = n - 1
    data = {}
    for lam in basis:
        for mu in basis:
            c = expand_in_whittaker(cylindric_expansion(lam, mu, n))
            outside = [nu for nu in c if nu and nu[0] > k]
            if outside:
                return VerifyReport("cylindric expansion", n, k, ell, False,
                                    {"lambda": list(lam), "mu": list(mu), "nu": list(outside[0]),
                                     "reason": "P_nu outside the box"})
            data[(lam, mu)] = c

    def agrees(place, signed):
        for (lam, mu), c in data.items():
            lr, mr = reduce_partition(lam, n)[0], reduce_partition(mu, n)[0]
            for nu in box_partitions(ell, k):
                expect = table(*_PLACEMENTS[place](nu, mr, lr))
                if signed and sum(nu) % 2:
                    expect = -expect
                if c.get(nu, RatFuncQ.ZERO) != RatFuncQ(expect):
                    return False
        return True

    found = [(p, s) for p in _PLACEMENTS for s in (True, False) if agrees(p, s)]
    notes = {"matching_placements": [f"{'(-1)^|nu| ' if s else ''}{p}" for p, s in found]}
    passed = bool(found)
    if passed:
        notes["resolved"] = notes["matching_placements"][0]
    return VerifyReport("cylindric expansion", n, k, ell, passed,
                        None if passed else {"reason": "no index placement matches"}, notes)


# ---------------------------------------------------------------------------
# Bäcklund transform and fusion


def _entry(op: GradedOperator, k: int, row: int, col: int) -> PolyQ:
    x = op.blocks[k][col].get(row)
    if x is None:
        return PolyQ.ZERO
    r = x.at_z(1).to_ratfunc()
    return r.num if r.den.is_one() else r


def _signed_row(table: FusionTable | None, a: int, mu_red: Partition, k: int):
    """ρ̃ -> (-1)^a N_{(a) μ̃}^{ρ̃}; empty when (a) is outside the box."""
    if table is None or a > k:
        return {}
    key = (a,) if a else ()
    sign = -1 if a % 2 else 1
    return {rho: c * sign for rho, c in table.product(key, mu_red).items()}


def backlund_fusion_link(n: int, k: int, j: int, R: int) -> VerifyReport:
    """
    Matrix elements of β̃_j(v)Q^+(v) = Q^+(v)β_j and its creation partner,
    read as linear systems in the fusion coefficients.  For λ in the target
    block and μ in block k:

        Σ_{a+b=r} Σ_ρ (-1)^a N_{(a)μ̃}^{ρ̃} ⟨λ|β̃_{j,b}|ρ⟩ = (-1)^r c N_{(r) red(β_jμ)}^{λ̃},

    where β_j|μ⟩ = c|β_jμ⟩ (c = 1, and c = 1 - q^{2m_j(μ)+2} for β*_j).
    The same identity without the (-1)^r on the right is recorded in notes.
    """
    from .backlund import solve_beta_tilde

    fields = solve_beta_tilde(n, k + 1, R)
    tab_k = fusion_table(n, k)
    tab_lo = fusion_table(n, k - 1) if k >= 1 else None
    tab_hi = fusion_table(n, k + 1)
    basis = fock_basis(n, k)
    idx = basis_index(n, k)
    fail, printed_ok, checked = None, True, 0
    for flavor, target_k, tab_t in (("tilde", k - 1, tab_lo), ("tilde*", k + 1, tab_hi)):
        if target_k < 0:
            continue
        series = fields[(flavor, j)].series
        tbasis = fock_basis(n, target_k)
        for mu in basis:
            mu_red = reduce_partition(mu, n)[0]
            m = multiplicity(mu, j)
            if flavor == "tilde":
                moved = remove_column(mu, j) if m else None
                c = PolyQ.ONE
            else:
                moved = add_column(mu, j)
                c = PolyQ.ONE - PolyQ.monomial(2 * m + 2)
            for r in range(R + 1):
                for li, lam in enumerate(tbasis):
                    lhs = RatFuncQ.ZERO
                    for a in range(r + 1):
                        for rho_red, coef in _signed_row(tab_k, a, mu_red, k).items():
                            rho = idx[expand_reduced(rho_red, n, k)]
                            e = _entry(series[r - a], k, li, rho)
                            if e:
                                lhs = lhs + RatFuncQ(coef) * _rf(e)
                    rhs = RatFuncQ.ZERO
                    if moved is not None and r <= target_k:
                        key = (r,) if r else ()
                        val = tab_t(key, reduce_partition(moved, n)[0], reduce_partition(lam, n)[0])
                        rhs = RatFuncQ(val * c)
                    sign = -1 if r % 2 else 1
                    checked += 1
                    if lhs != rhs * sign and fail is None:
                        fail = {"flavor": flavor, "lambda": list(lam), "mu": list(mu), "r": r, "j": j,
                                "lhs": str(lhs), "rhs": str(rhs * sign)}
                    if lhs != rhs:
                        printed_ok = False
    notes = {"equations_checked": checked, "without_sign_factor_holds": printed_ok}
    return VerifyReport("Backlund-fusion linear systems", n, k, R, fail is None, fail, notes)


def _vector(op: GradedOperator, k: int, col: int, n: int) -> dict:
    """Column ``col`` of block k as {partition: PolyQ} at z = 1."""
    tb = fock_basis(n, k + op.d)
    out = {}
    for i, x in op.blocks[k][col].items():
        r = x.at_z(1).to_ratfunc()
        out[tb[i]] = r.num
    return out


def _vadd(u: dict, v: dict, s: int = 1) -> dict:
    out = dict(u)
    for key, c in v.items():
        out[key] = out.get(key, PolyQ.ZERO) + c * s
    return {key: c for key, c in out.items() if c}


def _p(*terms) -> PolyQ:
    """Polynomial from (coeff, q-power) pairs."""
    out = PolyQ.ZERO
    for c, e in terms:
        out = out + PolyQ.monomial(e, c)
    return out


def example_chain(n: int = 3, j: int = 1, mu: Partition = (2, 2, 1)) -> VerifyReport:
    """
    The creation-side system at r = 2 for n = 3, j = 1, μ = (2,2,1):

        (1-q^2) N_{(2)(2,1)}^{λ̃} = ⟨λ|β̃*_{1,2}|μ⟩ - Σ_ρ ⟨λ|β̃*_{1,1}|ρ⟩N_{(1)μ̃}^{ρ̃}
                                   + Σ_ρ ⟨λ|β̃*_{1,0}|ρ⟩N_{(2)μ̃}^{ρ̃}

    Each term is compared with its stated value, and the assembled
    coefficients with the k = 3 fusion table and the stated product.
    """
    from .backlund import solve_beta_tilde
    from .fock import matrix_of, parse_word

    k = mu[0]
    fields = solve_beta_tilde(n, k + 1, 2)
    series = fields[("tilde*", j)].series
    idx = basis_index(n, k)
    mu_red = reduce_partition(mu, n)[0]
    tab_k, tab_hi = fusion_table(n, k), fusion_table(n, k + 1)
    checks: dict = {}

    # operator forms of the low coefficients
    op1 = matrix_of([parse_word("b*2 qN1^2", scalar=-1)], n, k)
    op2 = matrix_of([parse_word("b*1 b*2 b3 qN1^2")], n, k)
    checks["beta*~_{1,1} = -b*2 q^{2N1}"] = series[1].restrict([k]).at_z(1) == op1.at_z(1)
    checks["beta*~_{1,2} = b*1 b*2 b3 q^{2N1}"] = series[2].restrict([k]).at_z(1) == op2.at_z(1)

    term1 = _vector(series[2], k, idx[mu], n)
    term2: dict = {}
    for rho_red, c in tab_k.product((1,), mu_red).items():
        v = _vector(series[1], k, idx[expand_reduced(rho_red, n, k)], n)
        term2 = _vadd(term2, {key: x * c for key, x in v.items()})
    term3: dict = {}
    for rho_red, c in tab_k.product((2,), mu_red).items():
        v = _vector(series[0], k, idx[expand_reduced(rho_red, n, k)], n)
        term3 = _vadd(term3, {key: x * c for key, x in v.items()})

    stated1 = {(3, 2): _p((1, 0), (-1, 2)) * _p((1, 0), (-1, 4))}
    stated2 = {(3, 3, 2): -(_p((1, 0), (-1, 2)) * _p((1, 0), (1, 2))),
               (3, 2): -(_p((1, 0), (-1, 4)) * _p((1, 2)))}
    stated3 = {(3, 1, 1): _p((1, 0), (-1, 4))}
    checks["term1"] = term1 == stated1
    checks["term2"] = term2 == stated2
    checks["term3"] = term3 == stated3

    total = _vadd(_vadd(term1, term2, -1), term3)
    target = reduce_partition(add_column(mu, j), n)[0]
    lhs = {reduce_partition(lam, n)[0]: c for lam, c in total.items()}
    one_minus = _p((1, 0), (-1, 2))
    rhs = {nu: c * one_minus for nu, c in tab_hi.product((2,), target).items()}
    checks["assembles_to_table"] = lhs == rhs
    stated_product = {nu: _p((1, 0), (1, 2)) for nu in [(1,), (1, 1), (3, 2)]}
    checks["stated_product"] = tab_hi.product((2,), target) == stated_product

    fail = [name for name, ok in checks.items() if not ok]
    notes = {"checks": checks,
             "computed_product": {str(list(nu)): str(c) for nu, c in sorted(tab_hi.product((2,), target).items())}}
    return VerifyReport("fusion example chain", n, k + 1, 2, not fail, fail or None, notes)


# products displayed for n = 3: (λ̃, μ̃) -> {ν̃: coefficient}
_ONE_PLUS_Q2 = PolyQ.ONE + PolyQ.monomial(2)
STATED_PRODUCTS = {
    (3, 2): {((2,), (1, 1)): {(1,): PolyQ.ONE},
             ((1,), (1, 1)): {(2, 1): PolyQ.ONE, (): _ONE_PLUS_Q2}},
    (3, 3): {((2,), (2, 1)): {(1,): _ONE_PLUS_Q2, (1, 1): _ONE_PLUS_Q2, (3, 2): _ONE_PLUS_Q2}},
}


def fusion_goldens(n: int, k: int) -> VerifyReport | None:
    """Compare the table with the stated products; None when none are stated."""
    stated = STATED_PRODUCTS.get((n, k))
    if stated is None:
        return None
    table = fusion_table(n, k)
    per, fail = {}, []
    for (a, b), expect in stated.items():
        got = table.product(a, b)
        name = f"{list(a)}*{list(b)}"
        per[name] = got == expect
        if got != expect:
            fail.append({"product": name, "computed": {str(list(nu)): str(c) for nu, c in sorted(got.items())}})
    return VerifyReport("stated fusion products", n, k, 0, not fail, fail or None, {"per_product": per})
