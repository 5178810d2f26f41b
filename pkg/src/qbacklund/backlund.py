"""
Quantum and classical Bäcklund transforms of the Ablowitz-Ladik chain.

Quantum side: the fields β̃_j(v) = Q^+(v) β_j Q^+(v)^{-1} (and the starred
partner) are solved order by order from the functional relations

    β̃_j  - β_j  = v (1 - β*_j β̃_j) β̃_{j-1}
    β̃*_j - β*_j = v β*_{j+1} (β*_j β̃_j - 1)

and cross-checked against honest series conjugation.  The hat fields use
Q^-(v) and the relations

    β̂_j  - β_j  = -v β_{j-1} (1 - β_j β̂*_j)
    β̂*_j - β*_j =  v (1 - β_j β̂*_j) β̂*_{j+1}.

Every coefficient is a ``GradedOperator`` on the blocks k = 0..K.  Products
that would leave that range drop the offending blocks, so each check states
which blocks it must cover.

Classical side: the same relations with commuting ψ, ψ* solved over
``MultiPoly`` v-series, plus invariance, Darboux, commutativity and Poisson
checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .fock import Generator, GradedOperator, generator_op
from .funrel import VerifyReport, first_difference, invert_Qplus
from .lattice import build_Qr, build_Tr, transfer_words
from .ring import MultiPoly, VSeries, ZQPoly

ONE_MINUS_Q2 = ZQPoly.from_terms([(0, 0, 1), (0, 2, -1)])
Q2 = ZQPoly.monomial(1, qe=2)

FLAVORS = ("tilde", "tilde*", "hat", "hat*")


@dataclass
class TransformedField:
    site: int
    flavor: str  # one of FLAVORS
    series: VSeries  # coefficients: GradedOperator of degree -1 or +1

    @property
    def degree(self) -> int:
        return 1 if self.flavor.endswith("*") else -1

    def coefficient(self, r: int) -> GradedOperator:
        return self.series[r]

    def to_json(self) -> dict:
        return {"site": self.site, "flavor": self.flavor,
                "coefficients": [c.to_json() for c in self.series]}


def _site(j: int, n: int) -> int:
    return (j - 1) % n + 1


def _twist(j: int, n: int, kind: str) -> ZQPoly:
    """Quasi-periodicity: β_{j+n} = z^{-1} β_j and β*_{j+n} = z β*_j."""
    w = (j - 1) // n
    return ZQPoly.monomial(1, ze=w if kind.endswith("*") else -w)


class _Ops:
    """Bare generators on a fixed block range, cached per site."""

    def __init__(self, n: int, ks):
        self.n, self.ks = n, tuple(ks)
        self._cache: dict = {}

    def _get(self, kind, j):
        key = (kind, j)
        if key not in self._cache:
            op = generator_op(kind, _site(j, self.n), self.n, self.ks)
            tw = _twist(j, self.n, kind)
            self._cache[key] = op if tw == ZQPoly.ONE else op * tw
        return self._cache[key]

    def b(self, j):
        return self._get("beta", j)

    def bs(self, j):
        return self._get("beta*", j)

    def one(self):
        return GradedOperator.identity(self.n, self.ks)

    def zero(self, d):
        return GradedOperator.zero(self.n, d, self.ks)

    def P(self, j):
        """q^{2N_j} written as 1 - β*_j β_j."""
        return self.one() - self.bs(j) * self.b(j)


def _restrict(op: GradedOperator, ks) -> GradedOperator:
    return op.restrict([k for k in ks if k in op.blocks])


# ---------------------------------------------------------------------------
# recursive solutions


@lru_cache(maxsize=None)
def _tilde_coefficients(n: int, K: int, R: int):
    g = _Ops(n, range(K + 1))
    bt = {j: [g.b(j)] for j in range(1, n + 1)}
    bts = {j: [g.bs(j)] for j in range(1, n + 1)}
    # order levels are sequential; within a level sites only read lower orders
    for r in range(1, R + 1):
        for j in range(1, n + 1):
            jm, tw = _site(j - 1, n), _twist(j - 1, n, "beta")
            acc = bt[jm][r - 1] * tw
            for a in range(r):
                acc = acc - g.bs(j) * (bt[j][a] * bt[jm][r - 1 - a]) * tw
            bt[j].append(acc)
        for j in range(1, n + 1):
            term = g.bs(j + 1) * (g.bs(j) * bt[j][r - 1])
            if r == 1:
                term = term - g.bs(j + 1)
            bts[j].append(term)
    return bt, bts


def solve_beta_tilde(n: int, k: int, R: int) -> dict:
    """
    β̃_j(v) and β̃*_j(v) to order R on blocks 0..k, keyed by (flavor, site).

    β̃_{j,r}  = β̃_{j-1,r-1} - Σ_{a+b=r-1} β*_j β̃_{j,a} β̃_{j-1,b}
    β̃*_{j,r} = β*_{j+1} β*_j β̃_{j,r-1} - δ_{r,1} β*_{j+1}
    """
    if R < 0:
        raise ValueError("order must be nonnegative")
    bt, bts = _tilde_coefficients(n, k, R)
    out = {}
    for j in range(1, n + 1):
        out[("tilde", j)] = TransformedField(j, "tilde", VSeries(bt[j]))
        out[("tilde*", j)] = TransformedField(j, "tilde*", VSeries(bts[j]))
    return out


@lru_cache(maxsize=None)
def _hat_coefficients(n: int, K: int, R: int):
    # β̂*_{j,a} β̂*_{j+1,b} reaches one block higher per order, so solve on a
    # wider range and cut back at the end
    top = K + R + 1
    g = _Ops(n, range(top + 1))
    bh = {j: [g.b(j)] for j in range(1, n + 1)}
    bhs = {j: [g.bs(j)] for j in range(1, n + 1)}
    for r in range(1, R + 1):
        for j in range(1, n + 1):
            jp, tw = _site(j + 1, n), _twist(j + 1, n, "beta*")
            acc = bhs[jp][r - 1] * tw
            for a in range(r):
                acc = acc - g.b(j) * (bhs[j][a] * bhs[jp][r - 1 - a]) * tw
            bhs[j].append(acc)
        for j in range(1, n + 1):
            term = g.b(j - 1) * (g.b(j) * bhs[j][r - 1])
            if r == 1:
                term = term - g.b(j - 1)
            bh[j].append(term)
    ks = range(K + 1)
    return ({j: [_restrict(c, ks) for c in v] for j, v in bh.items()},
            {j: [_restrict(c, ks) for c in v] for j, v in bhs.items()})


def solve_beta_hat(n: int, k: int, R: int) -> dict:
    """
    β̂_j(v) and β̂*_j(v) to order R on blocks 0..k, keyed by (flavor, site).

    β̂*_{j,r} = β̂*_{j+1,r-1} - Σ_{a+b=r-1} β_j β̂*_{j,a} β̂*_{j+1,b}
    β̂_{j,r}  = β_{j-1} β_j β̂*_{j,r-1} - δ_{r,1} β_{j-1}
    """
    if R < 0:
        raise ValueError("order must be nonnegative")
    bh, bhs = _hat_coefficients(n, k, R)
    out = {}
    for j in range(1, n + 1):
        out[("hat", j)] = TransformedField(j, "hat", VSeries(bh[j]))
        out[("hat*", j)] = TransformedField(j, "hat*", VSeries(bhs[j]))
    return out


# ---------------------------------------------------------------------------
# conjugation oracle


def _q_multiblock(flavor: str, n: int, ks, R: int) -> VSeries:
    return VSeries([GradedOperator(n, 0, {k: build_Qr(flavor, n, k, r).blocks[k] for k in ks})
                    for r in range(R + 1)])


@lru_cache(maxsize=None)
def _q_and_inverse(flavor: str, n: int, top: int, R: int):
    ks = list(range(top + 1))
    Q = _q_multiblock(flavor, n, ks, R)
    if flavor == "+":
        inv = VSeries([GradedOperator(n, 0, {k: c.blocks[k] for k, c in
                                             ((k, invert_Qplus(n, k, R)[0][r]) for k in ks)})
                       for r in range(R + 1)])
    else:
        # formal inverse: the constant term of Q^-(v) is the identity
        inv = Q.invert(unit_inverse=GradedOperator.identity(n, ks))
    return Q, inv


def conjugate_by_Q(flavor: str, generator: Generator, n: int, k: int, R: int) -> TransformedField:
    """Q^±(v) · gen · Q^±(v)^{-1} on blocks 0..k, computed block by block."""
    if flavor not in ("+", "-"):
        raise ValueError("flavor must be '+' or '-'")
    if generator.kind not in ("beta", "beta*"):
        raise ValueError("only β_j and β*_j are transformed")
    j = _site(generator.site, n)
    Q, inv = _q_and_inverse(flavor, n, k + 1, R)
    G = generator_op(generator.kind, j, n, range(k + 1))
    gs = VSeries([G], R, zero=GradedOperator.zero(n, G.d, range(k + 1)))
    series = Q * (gs * inv)
    name = ("tilde" if flavor == "+" else "hat") + ("*" if generator.kind == "beta*" else "")
    return TransformedField(j, name, series)


def _compare_fields(a: VSeries, b: VSeries, need) -> dict | None:
    for r, (x, y) in enumerate(zip(a, b)):
        missing = [k for k in need if k not in x.blocks or k not in y.blocks]
        if missing:
            return {"order": r, "missing_blocks": missing}
        loc = first_difference(_restrict(x, need), _restrict(y, need))
        if loc is not None:
            return {"order": r, **loc}
    return None


def check_conjugation(flavor: str, n: int, k: int, R: int) -> VerifyReport:
    """Recursive solution = Q^±-conjugation, all sites, both generators."""
    sol = solve_beta_tilde(n, k, R) if flavor == "+" else solve_beta_hat(n, k, R)
    name = "tilde" if flavor == "+" else "hat"
    need = list(range(k + 1))
    for j in range(1, n + 1):
        for kind, fl in (("beta", name), ("beta*", name + "*")):
            conj = conjugate_by_Q(flavor, Generator(kind, j), n, k, R)
            loc = _compare_fields(sol[(fl, j)].series, conj.series, need)
            if loc is not None:
                return VerifyReport(f"conjugation{flavor}", n, k, R, False, {"field": fl, "site": j, **loc})
    return VerifyReport(f"conjugation{flavor}", n, k, R, True)


# ---------------------------------------------------------------------------
# closed forms for the first orders, as printed


def printed_closed_forms(n: int, k: int, j: int) -> dict:
    """The listed expressions for β̃_{j,r}, β̃*_{j,r}, r = 1, 2, 3."""
    g = _Ops(n, range(k + 4))
    b, bs, P = g.b, g.bs, g.P
    return {
        ("tilde", 1): b(j - 1) * P(j),
        ("tilde", 2): b(j - 2) * P(j - 1) * P(j) - b(j - 1) * b(j - 1) * bs(j) * P(j),
        ("tilde", 3): (b(j - 3) * P(j - 2) * P(j - 1) * P(j)
                       - (b(j - 2) * b(j - 1) * bs(j) * P(j - 1) * P(j)) * 2),
        ("tilde*", 1): -(P(j) * bs(j + 1)),
        ("tilde*", 2): b(j - 1) * bs(j) * bs(j + 1) * P(j),
        ("tilde*", 3): (-(b(j - 1) * b(j - 1) * bs(j) * bs(j) * bs(j + 1) * P(j))
                        + b(j - 2) * bs(j) * bs(j + 1) * P(j - 1) * P(j)),
    }


def derived_tilde_3(n: int, k: int, j: int) -> GradedOperator:
    """
    β̃_{j,3} expanded by hand from the recursion, with P_i = 1 - β*_i β_i:

        P_j P_{j-1} P_{j-2} β_{j-3} - P_j β*_{j-1} P_{j-1} β_{j-2}^2
        - (1 + q^2) β*_j P_j P_{j-1} β_{j-1} β_{j-2} + β*_j^2 P_j β_{j-1}^3
    """
    g = _Ops(n, range(k + 4))
    b, bs, P = g.b, g.bs, g.P
    return (P(j) * P(j - 1) * P(j - 2) * b(j - 3)
            - P(j) * bs(j - 1) * P(j - 1) * b(j - 2) * b(j - 2)
            - (bs(j) * P(j) * P(j - 1) * b(j - 1) * b(j - 2)) * (ZQPoly.ONE + Q2)
            + bs(j) * bs(j) * P(j) * b(j - 1) * b(j - 1) * b(j - 1))


def check_closed_forms(n: int, k: int) -> VerifyReport:
    """Compare orders 1..3 of the recursion with the printed expressions, site by site."""
    sol = solve_beta_tilde(n, k, 3)
    need = list(range(k + 1))
    results = {}
    first = None
    for key in [(f, r) for f in ("tilde", "tilde*") for r in (1, 2, 3)]:
        ok = True
        for j in range(1, n + 1):
            printed = printed_closed_forms(n, k, j)[key]
            loc = _compare_fields(VSeries([sol[(key[0], j)].series[key[1]]]), VSeries([printed]), need)
            if loc is not None:
                ok = False
                if first is None:
                    first = {"field": key[0], "order": key[1], "site": j, **{a: b for a, b in loc.items() if a != "order"}}
                break
        results[f"{key[0]}_{key[1]}"] = ok
    notes = {"per_expression": results}
    # the hand-expanded third order is checked as well
    derived_ok = all(
        _compare_fields(VSeries([sol[("tilde", j)].series[3]]), VSeries([derived_tilde_3(n, k, j)]), need) is None
        for j in range(1, n + 1))
    notes["derived_tilde_3_holds"] = derived_ok
    return VerifyReport("closed-forms", n, k, 3, first is None, first, notes)


# ---------------------------------------------------------------------------
# algebra relations and invariants


def _const(op: GradedOperator, R: int) -> VSeries:
    return VSeries([op], R, zero=op * 0)


def _zero_series(s: VSeries, need) -> dict | None:
    for r, c in enumerate(s):
        missing = [k for k in need if k not in c.blocks]
        if missing:
            return {"order": r, "missing_blocks": missing}
        for kk, i, jj, x in _restrict(c, need).nonzero_entries():
            return {"order": r, "k": kk, "row": i, "col": jj, "difference": str(x)}
    return None


def _series_word(w, fields: dict, R: int, n: int, ks) -> VSeries:
    out = None
    for gen, p in w.factors:
        key = ("tilde" if gen.kind == "beta" else "tilde*", _site(gen.site, n))
        for _ in range(p):
            out = fields[key].series if out is None else out * fields[key].series
    if out is None:
        out = _const(GradedOperator.identity(n, ks), R)
    return out * w.scalar


def transformed_transfer(n: int, k: int, R: int, r: int) -> VSeries:
    """T_r rebuilt from β̃, β̃* (series in v)."""
    fields = solve_beta_tilde(n, k, R)
    ks = list(range(k + 1))
    total = None
    for w in transfer_words(n, r):
        s = _series_word(w, fields, R, n, ks)
        total = s if total is None else total + s
    if total is None:
        total = _const(GradedOperator.zero(n, 0, ks), R)
    return total


def check_transformed_algebra_and_invariants(n: int, k: int, R: int) -> VerifyReport:
    fields = solve_beta_tilde(n, k, R)
    all_ks = list(range(k + 1))
    lower = list(range(k))  # blocks on which a creation field can be followed by anything
    one = _const(GradedOperator.identity(n, range(k + 2)), R)
    c = ONE_MINUS_Q2

    def bt(j):
        return fields[("tilde", j)].series

    def bts(j):
        return fields[("tilde*", j)].series

    def P(j):
        return one - bts(j) * bt(j)

    checks = []
    for i in range(1, n + 1):
        checks.append((f"[b~{i}, b~*{i}] = (1-q^2) P~{i}", bt(i) * bts(i) - bts(i) * bt(i) - P(i) * c, lower))
        checks.append((f"b~{i} b~*{i} - q^2 b~*{i} b~{i} = 1-q^2", bt(i) * bts(i) - (bts(i) * bt(i)) * Q2 - one * c, lower))
        checks.append((f"b~{i} P~{i} = q^2 P~{i} b~{i}", bt(i) * P(i) - (P(i) * bt(i)) * Q2, all_ks))
        checks.append((f"P~{i} b~*{i} = q^2 b~*{i} P~{i}", P(i) * bts(i) - (bts(i) * P(i)) * Q2, lower))
        for j in range(1, n + 1):
            if j == i:
                continue
            checks.append((f"[b~{i}, b~*{j}] = 0", bt(i) * bts(j) - bts(j) * bt(i), lower))
            if j > i:
                checks.append((f"[b~{i}, b~{j}] = 0", bt(i) * bt(j) - bt(j) * bt(i), all_ks))
                checks.append((f"[b~*{i}, b~*{j}] = 0", bts(i) * bts(j) - bts(j) * bts(i), lower[:-1] if k else []))
            checks.append((f"[P~{i}, b~{j}] = 0", P(i) * bt(j) - bt(j) * P(i), all_ks))
    for label, series, need in checks:
        loc = _zero_series(series, need)
        if loc is not None:
            return VerifyReport("transformed-algebra", n, k, R, False, {"relation": label, **loc})

    for r in range(n + 1):
        bare = GradedOperator(n, 0, {kk: c_.blocks[kk] for kk, c_ in
                                     ((kk, build_Tr(n, kk, r)) for kk in all_ks)})
        diff = transformed_transfer(n, k, R, r) - _const(bare, R)
        loc = _zero_series(diff, lower)
        if loc is not None:
            return VerifyReport("transformed-algebra", n, k, R, False, {"relation": f"T_{r} invariance", **loc})
    return VerifyReport("transformed-algebra", n, k, R, True)


# ---------------------------------------------------------------------------
# Q^- commutation lemma


def _qminus_lemma(n: int, k: int, R: int, sign: int):
    top = k + 2
    Q = _q_multiblock("-", n, range(top + 1), R)
    g = _Ops(n, range(top + 1))
    need = list(range(k + 1))
    for j in range(1, n + 1):
        b, bs, bm, bsp = (_const(x, R) for x in (g.b(j), g.bs(j), g.b(j - 1), g.bs(j + 1)))
        lhs = Q * b - b * Q
        rhs = -(bm * (Q + (b * Q * bs) * sign)).shift_power(1)
        loc = _zero_series(lhs - rhs, need)
        if loc is not None:
            return {"line": "annihilation", "site": j, **loc}
        lhs = Q * bs - bs * Q
        rhs = ((Q - b * Q * bs) * bsp).shift_power(1)
        loc = _zero_series(lhs - rhs, need)
        if loc is not None:
            return {"line": "creation", "site": j, **loc}
    return None


def check_Qminus_commutation(n: int, k: int, R: int, sign: int = 1) -> VerifyReport:
    """
    Q^-(v) β_j - β_j Q^-(v)   = -v β_{j-1} [Q^-(v) + sign · β_j Q^-(v) β*_j]
    Q^-(v) β*_j - β*_j Q^-(v) =  v [Q^-(v) - β_j Q^-(v) β*_j] β*_{j+1}

    ``sign = +1`` is the form as usually stated.  Summing the coefficient
    recursion [Q_r, β_j] = -β_{j-1} Q_{r-1} q^{2N_j+2} - β_{j-1}[Q_{r-1}, β_j] β*_j
    and using β_j β*_j = 1 - q^{2N_j+2} gives ``sign = -1`` instead; both are
    evaluated and the other one is recorded in the notes.  No inverse of Q^-
    is needed.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    loc = _qminus_lemma(n, k, R, sign)
    other = _qminus_lemma(n, k, R, -sign) is None
    return VerifyReport("Qminus-commutation", n, k, R, loc is None, loc,
                        {"sign": sign, "opposite_sign_holds": other})


# ---------------------------------------------------------------------------
# classical transforms


def classical_names(n: int) -> tuple[str, ...]:
    return tuple(f"psi{j}" for j in range(1, n + 1)) + tuple(f"psi*{j}" for j in range(1, n + 1))


@dataclass
class ClassicalPhase:
    n: int
    flavor: str  # "tilde" or "hat"
    names: tuple
    fields: dict  # ("psi" | "psi*", site) -> VSeries of MultiPoly

    def psi(self, j: int) -> VSeries:
        return self.fields[("psi", _site(j, self.n))]

    def psi_star(self, j: int) -> VSeries:
        return self.fields[("psi*", _site(j, self.n))]

    def to_json(self) -> dict:
        return {"n": self.n, "flavor": self.flavor,
                "fields": [{"field": f, "site": j, "coefficients": [str(c) for c in s]}
                           for (f, j), s in sorted(self.fields.items())]}


class _Coords:
    def __init__(self, n: int):
        self.n = n
        self.names = classical_names(n)

    def psi(self, j):
        return MultiPoly.var(f"psi{_site(j, self.n)}", self.names)

    def psi_star(self, j):
        return MultiPoly.var(f"psi*{_site(j, self.n)}", self.names)

    def const(self, c):
        return MultiPoly.constant(c, self.names)


def classical_transform(n: int, R: int, flavor: str = "tilde") -> ClassicalPhase:
    """
    tilde:  ψ̃_{j,r}  = ψ̃_{j-1,r-1} - ψ*_j Σ_{a+b=r-1} ψ̃_{j-1,a} ψ̃_{j,b}
            ψ̃*_{j,r} = ψ*_{j+1} ψ*_j ψ̃_{j,r-1} - δ_{r,1} ψ*_{j+1}
    hat:    ψ̂*_{j,r} = ψ̂*_{j+1,r-1} - ψ_j Σ_{a+b=r-1} ψ̂*_{j,a} ψ̂*_{j+1,b}
            ψ̂_{j,r}  = ψ_{j-1} ψ_j ψ̂*_{j,r-1} - δ_{r,1} ψ_{j-1}
    """
    if R < 0:
        raise ValueError("order must be nonnegative")
    if flavor not in ("tilde", "hat"):
        raise ValueError("flavor must be 'tilde' or 'hat'")
    c = _Coords(n)
    sites = range(1, n + 1)
    a = {j: [c.psi(j)] for j in sites}
    s = {j: [c.psi_star(j)] for j in sites}
    for r in range(1, R + 1):
        if flavor == "tilde":
            for j in sites:
                jm = _site(j - 1, n)
                acc = sum((a[jm][x] * a[j][r - 1 - x] for x in range(r)), c.const(0))
                a[j].append(a[jm][r - 1] - c.psi_star(j) * acc)
            for j in sites:
                term = c.psi_star(j + 1) * c.psi_star(j) * a[j][r - 1]
                s[j].append(term - c.psi_star(j + 1) if r == 1 else term)
        else:
            for j in sites:
                jp = _site(j + 1, n)
                acc = sum((s[j][x] * s[jp][r - 1 - x] for x in range(r)), c.const(0))
                s[j].append(s[jp][r - 1] - c.psi(j) * acc)
            for j in sites:
                term = c.psi(j - 1) * c.psi(j) * s[j][r - 1]
                a[j].append(term - c.psi(j - 1) if r == 1 else term)
    fields = {}
    for j in sites:
        fields[("psi", j)] = VSeries(a[j])
        fields[("psi*", j)] = VSeries(s[j])
    return ClassicalPhase(n, flavor, c.names, fields)


def classical_closed_forms(n: int, j: int) -> dict:
    """Commutative images of the listed quantum coefficients, r = 1, 2, 3."""
    c = _Coords(n)
    p, ps = c.psi, c.psi_star

    def P(i):
        return 1 - ps(i) * p(i)

    return {
        ("psi", 1): p(j - 1) * P(j),
        ("psi", 2): p(j - 2) * P(j - 1) * P(j) - p(j - 1) ** 2 * ps(j) * P(j),
        ("psi", 3): p(j - 3) * P(j - 2) * P(j - 1) * P(j) - 2 * p(j - 2) * p(j - 1) * ps(j) * P(j - 1) * P(j),
        ("psi*", 1): -P(j) * ps(j + 1),
        ("psi*", 2): p(j - 1) * ps(j) * ps(j + 1) * P(j),
        ("psi*", 3): -(p(j - 1) ** 2) * ps(j) ** 2 * ps(j + 1) * P(j) + p(j - 2) * ps(j) * ps(j + 1) * P(j - 1) * P(j),
    }


# u-polynomials with v-series coefficients: lists indexed by the power of u


def _upoly_mul(f: list, g: list) -> list:
    out = [None] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        for j, y in enumerate(g):
            t = x * y
            out[i + j] = t if out[i + j] is None else out[i + j] + t
    return out


def _upoly_add(f: list, g: list, sign: int = 1) -> list:
    out = []
    for i in range(max(len(f), len(g))):
        x = f[i] if i < len(f) else None
        y = g[i] if i < len(g) else None
        if y is not None and sign < 0:
            y = -y
        out.append(x if y is None else y if x is None else x + y)
    return out


def _mat_mul(A, B):
    return [[_upoly_add(_upoly_mul(A[i][0], B[0][j]), _upoly_mul(A[i][1], B[1][j])) for j in range(2)]
            for i in range(2)]


def _series_const(x: MultiPoly, R: int) -> VSeries:
    return VSeries([x], R, zero=x * 0)


def _lax(psi: VSeries, psi_star: VSeries, R: int):
    """L_j(u) = [[1, u ψ*_j], [ψ_j, u]] with u-polynomial entries."""
    one = _series_const(psi[0] * 0 + 1, R)
    zero = one * 0
    return [[[one], [zero, psi_star]], [[psi], [zero, one]]]


def _monodromy(phase_psi, phase_psi_star, n: int, R: int):
    M = None
    for j in range(1, n + 1):
        L = _lax(phase_psi(j), phase_psi_star(j), R)
        M = L if M is None else _mat_mul(L, M)  # L_n ... L_1
    return M


def _series_is_zero(s: VSeries):
    for r, c in enumerate(s):
        if c:
            return r
    return None


def _upoly_first_nonzero(f: list):
    for i, s in enumerate(f):
        if s is None:
            continue
        r = _series_is_zero(s)
        if r is not None:
            return i, r
    return None


def _bare_phase(n: int, R: int) -> ClassicalPhase:
    c = _Coords(n)
    fields = {}
    for j in range(1, n + 1):
        fields[("psi", j)] = _series_const(c.psi(j), R)
        fields[("psi*", j)] = _series_const(c.psi_star(j), R)
    return ClassicalPhase(n, "bare", c.names, fields)


def poisson_bracket(F: MultiPoly, G: MultiPoly, n: int) -> MultiPoly:
    """{F, G} = Σ_k (1 - ψ*_k ψ_k)(∂_{ψ_k}F ∂_{ψ*_k}G - ∂_{ψ*_k}F ∂_{ψ_k}G)."""
    c = _Coords(n)
    out = c.const(0)
    for k in range(1, n + 1):
        a, s = f"psi{k}", f"psi*{k}"
        inner = F.partial(a) * G.partial(s) - F.partial(s) * G.partial(a)
        if inner:
            out = out + (1 - c.psi_star(k) * c.psi(k)) * inner
    return out


def _series_bracket(f: VSeries, g: VSeries, n: int) -> VSeries:
    out = []
    for r in range(min(f.order, g.order) + 1):
        acc = f[0] * 0
        for a in range(r + 1):
            acc = acc + poisson_bracket(f[a], g[r - a], n)
        out.append(acc)
    return VSeries(out)


# bivariate truncated series for the commutativity check: {(a, b): MultiPoly}


def _biv_mul(f: dict, g: dict, R: int) -> dict:
    out: dict = {}
    for (a1, b1), x in f.items():
        for (a2, b2), y in g.items():
            if a1 + a2 + b1 + b2 > R:
                continue
            key = (a1 + a2, b1 + b2)
            out[key] = out[key] + x * y if key in out else x * y
    return {k: v for k, v in out.items() if v}


def _substitute(poly: MultiPoly, images: dict, R: int) -> dict:
    """Evaluate a polynomial at bivariate series arguments (name -> series)."""
    names = poly.names
    zero_key = (0, 0)
    one = MultiPoly.constant(1, names)
    total: dict = {}
    powers: dict = {}
    for exps, coef in poly.terms.items():
        term = {zero_key: one * coef}
        for name, e in zip(names, exps):
            if not e:
                continue
            key = (name, e)
            if key not in powers:
                base = images[name]
                acc = {zero_key: one}
                for _ in range(e):
                    acc = _biv_mul(acc, base, R)
                powers[key] = acc
            term = _biv_mul(term, powers[key], R)
        for kk, v in term.items():
            total[kk] = total[kk] + v if kk in total else v
    return {k: v for k, v in total.items() if v}


def _composed(n: int, R: int) -> dict:
    """Fields of B(x) applied after B(y), as series in (x, y) to total order R."""
    ph = classical_transform(n, R, "tilde")
    images = {}
    for j in range(1, n + 1):
        images[f"psi{j}"] = {(0, b): c for b, c in enumerate(ph.psi(j)) if c}
        images[f"psi*{j}"] = {(0, b): c for b, c in enumerate(ph.psi_star(j)) if c}
    out = {}
    for key, s in ph.fields.items():
        acc: dict = {}
        for a, coeff in enumerate(s):
            sub = _substitute(coeff, images, R - a)
            for (x, y), v in sub.items():
                kk = (x + a, y)
                acc[kk] = acc[kk] + v if kk in acc else v
        out[key] = {k: v for k, v in acc.items() if v}
    return out


def classical_checks(n: int, R: int) -> VerifyReport:
    """Invariants, Darboux relation, commutativity and Poisson preservation of B^+(v)."""
    ph = classical_transform(n, R, "tilde")
    bare = _bare_phase(n, R)
    notes = {}

    # (i) spectral invariants
    Mt = _monodromy(ph.psi, ph.psi_star, n, R)
    Mb = _monodromy(bare.psi, bare.psi_star, n, R)
    trace_t = _upoly_add(Mt[0][0], Mt[1][1])
    trace_b = _upoly_add(Mb[0][0], Mb[1][1])
    loc = _upoly_first_nonzero(_upoly_add(trace_t, trace_b, -1))
    if loc is not None:
        return VerifyReport("classical", n, 0, R, False, {"check": "T_r invariance", "r": loc[0], "order": loc[1]})
    det_t = _upoly_add(_upoly_mul(Mt[0][0], Mt[1][1]), _upoly_mul(Mt[0][1], Mt[1][0]), -1)
    det_b = _upoly_add(_upoly_mul(Mb[0][0], Mb[1][1]), _upoly_mul(Mb[0][1], Mb[1][0]), -1)
    loc = _upoly_first_nonzero(_upoly_add(det_t, det_b, -1))
    if loc is not None:
        return VerifyReport("classical", n, 0, R, False, {"check": "det L invariance", "u_power": loc[0], "order": loc[1]})
    prod = _series_const(MultiPoly.constant(1, ph.names), R)
    for j in range(1, n + 1):
        prod = prod * (_series_const(MultiPoly.constant(1, ph.names), R) - ph.psi_star(j) * ph.psi(j))
    closed = [None] * n + [prod]
    loc = _upoly_first_nonzero(_upoly_add(det_t, closed, -1))
    if loc is not None:
        return VerifyReport("classical", n, 0, R, False, {"check": "det L = u^n prod(1 - psi* psi)", "order": loc[1]})
    hat = classical_transform(n, R, "hat")
    Mh = _monodromy(hat.psi, hat.psi_star, n, R)
    loc = _upoly_first_nonzero(_upoly_add(_upoly_add(Mh[0][0], Mh[1][1]), trace_b, -1))
    if loc is not None:
        return VerifyReport("classical", n, 0, R, False, {"check": "T_r invariance (hat)", "r": loc[0], "order": loc[1]})
    notes["invariants"] = True

    # (ii) Darboux relation D_{j+1} L_j(ψ) = L_j(ψ̃) D_j
    loc = check_darboux(n, R)
    if loc is not None:
        return VerifyReport("classical", n, 0, R, False, {"check": "Darboux", **loc})
    notes["darboux"] = True

    # (iii) B(x) B(y) = B(y) B(x)
    comp = _composed(n, R)
    for key, f in comp.items():
        swapped = {(b, a): v for (a, b), v in f.items()}
        if swapped != f:
            bad = sorted(set(f) ^ set(swapped) | {kk for kk in f if kk in swapped and f[kk] != swapped[kk]})
            return VerifyReport("classical", n, 0, R, False,
                                {"check": "commutativity", "field": key[0], "site": key[1], "xy_orders": list(bad[0])})
    notes["commutativity"] = True

    # (iv) Poisson structure
    one = _series_const(MultiPoly.constant(1, ph.names), R)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            pairs = [("{psi~_i, psi*~_j}", ph.psi(i), ph.psi_star(j),
                      one - ph.psi_star(j) * ph.psi(j) if i == j else one * 0)]
            if i < j:
                pairs.append(("{psi~_i, psi~_j}", ph.psi(i), ph.psi(j), one * 0))
                pairs.append(("{psi*~_i, psi*~_j}", ph.psi_star(i), ph.psi_star(j), one * 0))
            for label, f, g, expected in pairs:
                r = _series_is_zero(_series_bracket(f, g, n) - expected)
                if r is not None:
                    return VerifyReport("classical", n, 0, R, False,
                                        {"check": "Poisson", "bracket": label, "i": i, "j": j, "order": r})
    notes["poisson"] = True
    return VerifyReport("classical", n, 0, R, True, notes=notes)


def darboux_matrix(ph: ClassicalPhase, j: int, R: int):
    """D_j(u, v) = [[v - u a_j, -u b_j], [v c_j, -u]] as u-polynomials of v-series."""
    one = _series_const(MultiPoly.constant(1, ph.names), R)
    zero = one * 0
    bare_star = _series_const(_Coords(ph.n).psi_star(j), R)
    c = ph.psi(j - 1)
    a = one + (bare_star * c).shift_power(1)
    b = -bare_star.shift_power(1)
    v = one.shift_power(1)
    return [[[v, -a], [zero, -b]], [[c.shift_power(1)], [zero, -one]]]


def check_darboux(n: int, R: int):
    ph = classical_transform(n, R, "tilde")
    bare = _bare_phase(n, R)
    for j in range(1, n + 1):
        lhs = _mat_mul(darboux_matrix(ph, j + 1, R), _lax(bare.psi(j), bare.psi_star(j), R))
        rhs = _mat_mul(_lax(ph.psi(j), ph.psi_star(j), R), darboux_matrix(ph, j, R))
        for i in range(2):
            for m in range(2):
                loc = _upoly_first_nonzero(_upoly_add(lhs[i][m], rhs[i][m], -1))
                if loc is not None:
                    return {"site": j, "entry": [i, m], "u_power": loc[0], "order": loc[1]}
    return None
