"""
Transfer matrices T_r and Q-operator coefficients Q_r^±, each by two routes,
plus exact Yang-Baxter checks for R, D^+ and D^-.

Conventions (all verified by the route-equivalence tests):

* L_j(u) = [[1, u β*_j], [β_j, u]] with rows = outgoing, columns = incoming
  auxiliary state; the monodromy is L_n(u) ... L_1(u), so the auxiliary
  space meets site 1 first.
* T(u) = A(u) + z D(u) = sum_r u^r T_r.
* In the Q-model row an auxiliary edge value e_j counts particles moved
  from site j to site j + 1; the seam edge e_n (site n -> site 1) carries
  the weight z^{e_n}.  At a vertex, a is the incoming edge (particles
  created at this site), c the outgoing edge (particles annihilated here),
  b and d the occupation before and after: a + b = c + d.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Sequence

from .combin import (basis_index, compositions, fock_basis, from_occupations,
                     gaussian_binomial, occupations, pochhammer)
from .fock import GradedOperator, OperatorWord, apply_word_to_state, beta, beta_star, word
from .ring import PolyQ, ZQPoly

Z = ZQPoly.monomial(1, ze=1)
Q2 = ZQPoly.monomial(1, qe=2)
ONE_MINUS_Q2 = PolyQ([1, 0, -1])


# ---------------------------------------------------------------------------
# monodromy


@dataclass(frozen=True)
class Monodromy2x2:
    """Entries of L_n(u)...L_1(u) as u-polynomials of operator words."""

    n: int
    words: dict  # entry name -> tuple over powers of u -> tuple of OperatorWord

    def coefficient(self, entry: str, r: int, ks: Iterable[int]) -> GradedOperator:
        terms = self.words[entry][r] if r < len(self.words[entry]) else ()
        d = {"A": 0, "D": 0, "B": 1, "C": -1}[entry]
        return GradedOperator.from_words(list(terms), self.n, ks, d)

    def series(self, entry: str, ks: Iterable[int]) -> list[GradedOperator]:
        ks = list(ks)
        return [self.coefficient(entry, r, ks) for r in range(self.n + 1)]


# local Lax entries: (out, in) -> (u power, factors)
def _lax_entry(j: int, out: int, inp: int):
    if out == 0 and inp == 0:
        return 0, ()
    if out == 0 and inp == 1:
        return 1, ((beta_star(j), 1),)
    if out == 1 and inp == 0:
        return 0, ((beta(j), 1),)
    return 1, ()


@lru_cache(maxsize=None)
def monodromy_words(n: int) -> Monodromy2x2:
    entries = {}
    for name, (out, inp) in {"A": (0, 0), "B": (0, 1), "C": (1, 0), "D": (1, 1)}.items():
        by_power: list = [[] for _ in range(n + 1)]
        # aux states s_0 = inp (into site 1), s_j = out of site j, s_n = out
        for mids in product((0, 1), repeat=n - 1):
            states = (inp,) + mids + (out,)
            upow, factors = 0, ()
            for j in range(1, n + 1):
                p, f = _lax_entry(j, states[j], states[j - 1])
                upow += p
                factors = f + factors  # site j sits to the left of sites < j
            by_power[upow].append(OperatorWord(factors))
        entries[name] = tuple(tuple(x) for x in by_power)
    return Monodromy2x2(n, entries)


def build_monodromy(n: int, k: int) -> dict[str, list[GradedOperator]]:
    """A, B, C, D as lists of u-coefficients on the k-particle block."""
    m = monodromy_words(n)
    return {name: m.series(name, [k]) for name in "ABCD"}


def transfer_words(n: int, r: int) -> list[OperatorWord]:
    m = monodromy_words(n)
    out = list(m.words["A"][r])
    out += [w.scaled(Z) for w in m.words["D"][r]]
    return out


# ---------------------------------------------------------------------------
# T_r


def hopping_letter(i: int, n: int, ks) -> GradedOperator:
    """a_i = β_i β*_{i+1} (i < n) and a_n = z β_n β*_1."""
    if i < n:
        return GradedOperator.from_words([word(beta(i), beta_star(i + 1))], n, ks)
    return GradedOperator.from_words([word(beta(n), beta_star(1), scalar=Z)], n, ks)


def cyclic_word_order(subset: Sequence[int], n: int) -> list[int]:
    """
    Letter order i_1..i_r for the nested q^2-commutator of a proper subset.

    The subset splits into maximal cyclic runs s, s+1, ..., s+m; each run
    is read backwards (s+m, ..., s) so that the innermost bracket is
    [a_{s+1}, a_s].  Distinct runs act on disjoint sites and commute.
    """
    sset = set(subset)
    if len(sset) >= n:
        raise ValueError("the full cycle has no run decomposition")
    order = []
    for s in sorted(sset):
        if (s - 2) % n + 1 in sset:
            continue
        run = [s]
        while run[-1] % n + 1 in sset:
            run.append(run[-1] % n + 1)
        order.extend(reversed(run))
    return order


def build_Tr(n: int, k: int, r: int, method: str = "trace") -> GradedOperator:
    if not 0 <= r <= n:
        raise ValueError(f"r must lie in 0..{n}")
    ks = [k]
    if method == "trace":
        return GradedOperator.from_words(transfer_words(n, r), n, ks, 0)
    if method != "commutator":
        raise ValueError(f"unknown method {method!r}")
    if r == 0:
        return GradedOperator.identity(n, ks)
    if r == n:
        # all n letters close the cycle; the trace gives z on the nose
        return GradedOperator.scalar(n, ks, Z)
    letters = {i: hopping_letter(i, n, ks) for i in range(1, n + 1)}
    total = GradedOperator.zero(n, 0, ks)
    for subset in combinations(range(1, n + 1), r):
        order = cyclic_word_order(subset, n)
        x = letters[order[-1]]
        for i in reversed(order[:-1]):
            x = letters[i].commutator(x, Q2)
        total = total + x
    return total.exact_div(ONE_MINUS_Q2 ** (r - 1))


# ---------------------------------------------------------------------------
# Q_r^± by compositions


def _composition_word(flavor: str, alpha: tuple) -> OperatorWord:
    n = len(alpha)
    an = alpha[-1]
    fac = []
    if flavor == "+":
        # (β*_1)^{α_n} (β_1 β*_2)^{α_1} ... (β_{n-1} β*_n)^{α_{n-1}} β_n^{α_n}
        fac.append((beta_star(1), an))
        for i in range(1, n):
            fac += [(beta(i), alpha[i - 1]), (beta_star(i + 1), alpha[i - 1])]
        fac.append((beta(n), an))
    else:
        # β_n^{α_n} (β_{n-1} β*_n)^{α_{n-1}} ... (β_1 β*_2)^{α_1} (β*_1)^{α_n}
        fac.append((beta(n), an))
        for i in range(n - 1, 0, -1):
            fac += [(beta(i), alpha[i - 1]), (beta_star(i + 1), alpha[i - 1])]
        fac.append((beta_star(1), an))
    return OperatorWord(tuple((g, p) for g, p in fac if p))


@lru_cache(maxsize=None)
def _poch_product(alpha: tuple) -> PolyQ:
    out = PolyQ.ONE
    for a in alpha:
        out = out * pochhammer(a)
    return out


def _composition_scalar(flavor: str, alpha: tuple) -> ZQPoly:
    r = sum(alpha)
    if flavor == "+":
        return ZQPoly.monomial((-1) ** r, ze=alpha[-1])
    return ZQPoly.monomial(1, qe=sum(a * (a + 1) for a in alpha), ze=alpha[-1])


def _qr_composition(flavor: str, n: int, k: int, r: int) -> GradedOperator:
    src = fock_basis(n, k)
    tgt = basis_index(n, k)
    terms = [(_composition_word(flavor, al), _poch_product(al), _composition_scalar(flavor, al))
             for al in compositions(r, n)]
    cols = []
    for lam in src:
        occ = occupations(lam, n)
        col: dict = {}
        for w, den, sc in terms:
            res = apply_word_to_state(w, occ, n)
            if res is None:
                continue
            c, occ2 = res
            # each creation power (β*)^a brings (q^2)_{m+a}/(q^2)_m, divisible by (q^2)_a
            c = c.exact_div(den) * sc
            i = tgt[from_occupations(occ2)]
            v = col[i] + c if i in col else c
            if v:
                col[i] = v
            else:
                col.pop(i, None)
        cols.append(col)
    return GradedOperator(n, 0, {k: cols})


# ---------------------------------------------------------------------------
# vertex weights and the row-transfer route


@dataclass(frozen=True)
class VertexWeight:
    flavor: str  # "T", "+" or "-"
    a: int
    b: int
    c: int
    d: int
    u_power: int
    coeff: PolyQ

    @property
    def is_zero(self) -> bool:
        return self.coeff.is_zero()

    def __str__(self):
        return f"u^{self.u_power} * ({self.coeff})" if self.coeff else "0"


def boltzmann_weight(flavor: str, a: int, b: int, c: int, d: int) -> VertexWeight:
    """
    Weight ⟨c,d|L|a,b⟩: a, c are the incoming/outgoing auxiliary edges and
    b, d the occupation of the site before/after.
    """
    zero = VertexWeight(flavor, a, b, c, d, 0, PolyQ.ZERO)
    if min(a, b, c, d) < 0 or a + b != c + d:
        return zero
    if flavor == "T":
        if a not in (0, 1) or c not in (0, 1):
            return zero
        if a == 0:
            return VertexWeight(flavor, a, b, c, d, 0, PolyQ.ONE)
        if c == 0:
            return VertexWeight(flavor, a, b, c, d, 1, PolyQ.ONE - PolyQ.monomial(2 * d))
        return VertexWeight(flavor, a, b, c, d, 1, PolyQ.ONE)
    if flavor == "+":
        if b < c:
            return zero
        return VertexWeight(flavor, a, b, c, d, a, gaussian_binomial(d, a) * (-1) ** a)
    if flavor == "-":
        if a + b < c:
            return zero
        coeff = gaussian_binomial(a + b, a).shift(a * (a + 1))
        return VertexWeight(flavor, a, b, c, d, a, coeff)
    raise ValueError(f"unknown flavor {flavor!r}")


@lru_cache(maxsize=None)
def _weight_entry(flavor: str, a: int, b: int, c: int) -> ZQPoly:
    w = boltzmann_weight(flavor, a, b, c, a + b - c)
    return ZQPoly.from_polyq(w.coeff)


def _qr_transfer(flavor: str, n: int, k: int, r: int) -> GradedOperator:
    src = fock_basis(n, k)
    tgt = basis_index(n, k)
    cols = []
    for lam in src:
        occ = occupations(lam, n)
        col: dict = {}
        for seam in range(r + 1):
            # frontier: (occupations so far, incoming edge, u power) -> weight
            frontier = {((), seam, 0): ZQPoly.monomial(1, ze=seam)}
            for j in range(n):
                b = occ[j]
                nxt: dict = {}
                for (outs, a, up), wgt in frontier.items():
                    up2 = up + a
                    if up2 > r:
                        continue
                    for c in range(r + 1):
                        d = a + b - c
                        if d < 0:
                            break
                        w = _weight_entry(flavor, a, b, c)
                        if not w:
                            continue
                        key = (outs + (d,), c, up2)
                        val = wgt * w
                        nxt[key] = nxt[key] + val if key in nxt else val
                frontier = nxt
            for (outs, a, up), wgt in frontier.items():
                if a != seam or up != r or not wgt:
                    continue
                i = tgt[from_occupations(outs)]
                v = col[i] + wgt if i in col else wgt
                if v:
                    col[i] = v
                else:
                    col.pop(i, None)
        cols.append(col)
    return GradedOperator(n, 0, {k: cols})


@lru_cache(maxsize=None)
def _qr_cached(flavor: str, n: int, k: int, r: int, method: str) -> GradedOperator:
    if method == "composition":
        return _qr_composition(flavor, n, k, r)
    if method == "transfer":
        return _qr_transfer(flavor, n, k, r)
    raise ValueError(f"unknown method {method!r}")


def build_Qr(flavor: str, n: int, k: int, r: int, method: str = "composition") -> GradedOperator:
    if flavor not in ("+", "-"):
        raise ValueError("flavor must be '+' or '-'")
    if r < 0:
        raise ValueError("r must be nonnegative")
    if flavor == "+" and method == "composition" and r > k:
        return GradedOperator.zero(n, 0, [k])
    return _qr_cached(flavor, n, k, r, method)


@lru_cache(maxsize=None)
def _tr_cached(n: int, k: int, r: int) -> GradedOperator:
    return build_Tr(n, k, r, "trace")


def T_coefficients(n: int, k: int, order: int) -> list[GradedOperator]:
    """T_0..T_order on block k (zero beyond n)."""
    return [_tr_cached(n, k, r) if r <= n else GradedOperator.zero(n, 0, [k]) for r in range(order + 1)]


def Q_coefficients(flavor: str, n: int, k: int, order: int) -> list[GradedOperator]:
    return [build_Qr(flavor, n, k, r) for r in range(order + 1)]


# ---------------------------------------------------------------------------
# Yang-Baxter checks on small tensor products


class _StateOp:
    """Sparse matrix on tuples of local states, entries ZQPoly."""

    __slots__ = ("m",)

    def __init__(self, m: dict):
        self.m = m  # in_state -> {out_state: entry}

    def __mul__(self, other: "_StateOp") -> "_StateOp":
        out: dict = {}
        for s, col in other.m.items():
            acc: dict = {}
            for mid, x in col.items():
                for t, y in self.m.get(mid, {}).items():
                    acc[t] = acc[t] + y * x if t in acc else y * x
            out[s] = {t: v for t, v in acc.items() if v}
        return _StateOp(out)

    def diff(self, other: "_StateOp", states) -> list:
        bad = []
        for s in states:
            a, b = self.m.get(s, {}), other.m.get(s, {})
            for t in set(a) | set(b):
                if a.get(t, ZQPoly.ZERO) != b.get(t, ZQPoly.ZERO):
                    bad.append((s, t))
        return bad


def _fock_local(kind: str, m: int, aux_norm: str = "canonical"):
    """Action of a one-site generator on |m⟩: returns (coeff, m') or None."""
    if kind == "b":
        if m == 0:
            return None
        if aux_norm == "canonical":
            return ZQPoly.ONE, m - 1
        return ZQPoly.from_terms([(0, 0, 1), (0, 2 * m, -1)]), m - 1
    if kind == "b*":
        if aux_norm == "canonical":
            return ZQPoly.from_terms([(0, 0, 1), (0, 2 * m + 2, -1)]), m + 1
        return ZQPoly.ONE, m + 1
    if kind == "q2N":
        return ZQPoly.monomial(1, qe=2 * m), m
    raise ValueError(kind)


def _lax_local(u, m: int, s_in: int):
    """Column of L(u) for aux input s_in and site occupation m: [(s_out, m', coeff)]."""
    u = Fraction(u)
    if s_in == 0:
        out = [(0, m, ZQPoly.ONE)]
        if m > 0:
            out.append((1, m - 1, ZQPoly.ONE))
        return out
    c, m2 = _fock_local("b*", m)
    return [(0, m2, c * u), (1, m, ZQPoly.monomial(u))]


def check_RLL(u, v, cutoff: int, convention: str = "resolved") -> list:
    """
    Check R12(u/v) L13(u) L23(v) = L23(v) L13(u) R12(u/v) on C^2 x C^2 x F,
    all states of total charge s1 + s2 + m <= cutoff.  R is multiplied by
    (u - v) to clear denominators.  Returns the mismatching entries.
    """
    u, v = Fraction(u), Fraction(v)
    if u == v:
        raise ValueError("need u != v")
    states = [(s1, s2, m) for s1 in (0, 1) for s2 in (0, 1) for m in range(cutoff + 1) if s1 + s2 + m <= cutoff]
    top = [(s1, s2, m) for s1 in (0, 1) for s2 in (0, 1) for m in range(cutoff + 3)]

    def L13(x):
        ops = {}
        for s1, s2, m in top:
            ops[(s1, s2, m)] = {(t1, s2, m2): c for t1, m2, c in _lax_local(x, m, s1)}
        return _StateOp(ops)

    def L23(x):
        ops = {}
        for s1, s2, m in top:
            ops[(s1, s2, m)] = {(s1, t2, m2): c for t2, m2, c in _lax_local(x, m, s2)}
        return _StateOp(ops)

    R = r_matrix_cleared(u, v, convention)
    Rop = _StateOp({(s1, s2, m): {(t // 2, t % 2, m): ZQPoly.coerce(R[t][s1 * 2 + s2])
                                  for t in range(4) if R[t][s1 * 2 + s2]}
                    for s1, s2, m in top})
    lhs = Rop * L13(u) * L23(v)
    rhs = L23(v) * L13(u) * Rop
    return lhs.diff(rhs, states)


def r_matrix_cleared(u, v, convention: str = "resolved") -> list[list[ZQPoly]]:
    """
    The R-matrix with denominators cleared, rows/columns |00⟩, |01⟩, |10⟩, |11⟩
    (first label = auxiliary space 1).

    ``"printed"`` is (u - v) R(u/v) read literally from the 4x4 display.
    ``"resolved"`` is the same matrix transposed and evaluated at v/u, which
    is the form satisfying R12 L13(u) L23(v) = L23(v) L13(u) R12 with our
    row = outgoing convention for L.
    """
    u, v = Fraction(u), Fraction(v)
    if convention == "resolved":
        u, v = v, u
    elif convention != "printed":
        raise ValueError(f"unknown convention {convention!r}")
    q2 = lambda c0, c2: ZQPoly.from_terms([(0, 0, c0), (0, 2, c2)])
    a = q2(-v, u)  # u q^2 - v
    R = [[a, 0, 0, 0],
         [0, q2(0, u - v), q2(-u, u), 0],
         [0, q2(-v, v), ZQPoly.monomial(u - v), 0],
         [0, 0, 0, a]]
    if convention == "resolved":
        R = [list(row) for row in zip(*R)]
    return [[ZQPoly.coerce(x) for x in row] for row in R]


def _lpm_local(flavor: str, v, m_in: int, b: int, cutoff: int):
    """
    Column of L^±(v) for auxiliary input m_in and site occupation b, in the
    canonical one-site basis: [(m_out, b_out, coeff)].
    """
    v = Fraction(v)
    out = []
    for c in range(cutoff + 1):
        d = m_in + b - c
        if d < 0:
            break
        w = boltzmann_weight(flavor, m_in, b, c, d)
        if w.coeff:
            out.append((c, d, ZQPoly.from_polyq(w.coeff) * v ** w.u_power))
    return out


def _darboux_local(flavor: str, u, v, s_in: int, m: int, aux_norm: str, variant: str = "resolved"):
    """
    Column of the cleared D^±(u, v) acting on (C^2, auxiliary Fock).

    For D^- the ``"printed"`` variant has (v/u) β in the lower-left corner;
    the ``"resolved"`` one has (v/u) β q^{2N}, the unique charge-conserving
    solution of the Yang-Baxter equation with L^- (up to normalisation).
    """
    u, v = Fraction(u), Fraction(v)
    out = []

    def add(s_out, gen, scale, extra=None):
        if gen is None:
            out.append((s_out, m, ZQPoly.monomial(scale) if extra is None else extra))
            return
        res = _fock_local(gen, m, aux_norm)
        if res is None:
            return
        c, m2 = res
        out.append((s_out, m2, c * scale if extra is None else c * extra))

    if flavor == "+":
        # v D^+ = [[v - u q^{2N}, -u β*], [v β, -u]]
        if s_in == 0:
            out.append((0, m, ZQPoly.from_terms([(0, 0, v), (0, 2 * m, -u)])))
            add(1, "b", v)
        else:
            add(0, "b*", -u)
            add(1, None, -u)
    else:
        # u D^- = [[u q^{2N}, u β*], [v β, u - v q^{2N+2}]]
        if s_in == 0:
            out.append((0, m, ZQPoly.monomial(u, qe=2 * m)))
            add(1, "b", v if variant == "printed" else ZQPoly.monomial(v, qe=2 * m))
        else:
            add(0, "b*", u)
            out.append((1, m, ZQPoly.from_terms([(0, 0, u), (0, 2 * m + 2, -v)])))
    return [x for x in out if x[2]]


def check_DLL(flavor: str, u, v, cutoff: int, aux_norm: str = "canonical", variant: str = "resolved") -> list:
    """
    Check D12(u,v) L13(u) L^±23(v) = L^±23(v) L13(u) D12(u,v) on
    C^2 x (auxiliary Fock) x (site Fock) in all sectors of total charge
    s + m + b <= cutoff.  ``aux_norm`` selects how β, β* act on the auxiliary
    Fock space of D (canonical basis or monomials ξ^m).
    """
    u, v = Fraction(u), Fraction(v)
    big = cutoff + 3
    top = [(s, m, b) for s in (0, 1) for m in range(big) for b in range(big) if s + m + b <= big]
    states = [x for x in top if sum(x) <= cutoff]

    def L13(x):
        return _StateOp({(s, m, b): {(t, m, b2): c for t, b2, c in _lax_local(x, b, s)} for s, m, b in top})

    def L23(x):
        return _StateOp({(s, m, b): {(s, m2, b2): c for m2, b2, c in _lpm_local(flavor, x, m, b, big)}
                         for s, m, b in top})

    def D12():
        return _StateOp({(s, m, b): {(t, m2, b): c for t, m2, c in _darboux_local(flavor, u, v, s, m, aux_norm, variant)}
                         for s, m, b in top})

    lhs = D12() * L13(u) * L23(v)
    rhs = L23(v) * L13(u) * D12()
    return lhs.diff(rhs, states)


@dataclass
class YBReport:
    which: str
    passed: bool
    points: list
    failures: list

    def to_json(self) -> dict:
        return {"identity": self.which, "pass": self.passed, "points": [[str(a), str(b)] for a, b in self.points],
                "failure_location": [repr(f) for f in self.failures[:5]] or None}


def check_yang_baxter(which: str, cutoff: int = 3, points: Sequence | None = None,
                      variant: str = "resolved") -> YBReport:
    """
    Run RLL / DLL+ / DLL- at a grid of rational (u, v).

    After clearing denominators each side is a polynomial of degree at most
    2 in u and at most cutoff + 1 in v on the sectors checked (R, D and
    L13 are linear in u; L^± contributes v^a with a <= charge).  A grid
    of 3 values of u times cutoff + 2 values of v therefore certifies the
    identity; u and v come from disjoint sets so u != v.
    """
    if points is None:
        us = [Fraction(p) for p in (2, 3, 5)]
        vs = [Fraction(1, p) for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31)[: cutoff + 2]]
        points = list(product(us, vs))
    failures = []
    for u, v in points:
        if which == "RLL":
            bad = check_RLL(u, v, cutoff, variant)
        elif which in ("DLL+", "DLL-"):
            bad = check_DLL(which[-1], u, v, cutoff, variant=variant)
        else:
            raise ValueError(f"unknown Yang-Baxter check {which!r}")
        failures += [((u, v),) + tuple(b) for b in bad]
    return YBReport(which, not failures, list(points), failures)


def max_block_z(op: GradedOperator) -> int:
    return max((x.max_z() for *_, x in op.nonzero_entries()), default=0)
