"""
Command line entry point.

    qbacklund verify --suite tq --n 3 --k 2 --order 5
    qbacklund fusion --n 3 --k 3 --q-zero
    qbacklund whittaker --shape 2 --vars 2
    qbacklund backlund --mode classical --n 3 --order 1 --site 1
    qbacklund spectrum --n 3 --k 2 --q 0.3

Exit status: 0 when every check passes, 1 on a check failure, 2 on a
usage error.  JSON output carries {"schema": "qbf-1"} and is byte-identical
across runs with the same arguments; wall-clock times are only added with
--timings.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

SCHEMA = "qbf-1"
LIMITS = {"n": 5, "k": 4, "order": 8}
SUITES = ("oracle-equivalence", "tq", "wronskian", "commute", "yang-baxter", "backlund-quantum",
          "backlund-classical", "fusion", "frobenius", "bethe")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    n: int = 3
    k: int = 2
    order: int | None = None
    site: int = 1
    shape: tuple = ()
    vars: int = 2
    q: float = 0.3
    tol: float = 1e-8
    seed: int = 0
    fmt: str = "text"
    output: str | None = None
    suites: tuple = ()
    mode: str = "quantum"
    flavor: str = "tilde"
    method: str = "branching"
    q_zero: bool = False
    unsafe_size: bool = False
    timings: bool = False
    jobs: int = 1

    def validate(self):
        if self.n < 1:
            raise UsageError("n must be at least 1")
        if self.k < 0:
            raise UsageError("k must be nonnegative")
        if self.order is not None and self.order < 0:
            raise UsageError("order must be nonnegative")
        if not 0 < self.q < 1:
            raise UsageError("numeric q must satisfy 0 < q < 1")
        if self.vars < 0:
            raise UsageError("number of variables must be nonnegative")
        if not self.unsafe_size:
            for name, bound in LIMITS.items():
                val = getattr(self, name)
                if val is not None and val > bound:
                    raise UsageError(f"{name}={val} exceeds the default bound {name} <= {bound}; "
                                     "pass --unsafe-size to override")


@dataclass
class SuiteResult:
    suite: str
    reports: list = field(default_factory=list)  # JSON dicts
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.get("pass") for r in self.reports)


# ---------------------------------------------------------------------------
# suites


def _rep(obj) -> dict:
    return obj.to_json()


def _suite_oracle(cfg: RunConfig) -> list:
    from .lattice import build_Qr, build_Tr
    from .funrel import first_difference
    R = 4 if cfg.order is None else cfg.order
    out = []
    for r in range(min(R, cfg.n) + 1):
        loc = first_difference(build_Tr(cfg.n, cfg.k, r, "trace"), build_Tr(cfg.n, cfg.k, r, "commutator"))
        out.append({"identity": f"T_{r} trace = commutator", "n": cfg.n, "k": cfg.k, "order": r,
                    "pass": loc is None, **({"failure_location": loc} if loc else {})})
    for flavor in "+-":
        for r in range(R + 1):
            loc = first_difference(build_Qr(flavor, cfg.n, cfg.k, r, "composition"),
                                   build_Qr(flavor, cfg.n, cfg.k, r, "transfer"))
            out.append({"identity": f"Q{flavor}_{r} composition = transfer", "n": cfg.n, "k": cfg.k,
                        "order": r, "pass": loc is None, **({"failure_location": loc} if loc else {})})
    return out


def _suite_tq(cfg: RunConfig) -> list:
    from .funrel import check_TQ
    R = max(1, cfg.k + cfg.n if cfg.order is None else cfg.order)
    return [_rep(check_TQ(f, cfg.n, cfg.k, R)) for f in "+-"]


def _suite_wronskian(cfg: RunConfig) -> list:
    from .funrel import check_wronskian_and_det, invert_Qplus
    R = max(cfg.n, cfg.n + cfg.k if cfg.order is None else cfg.order)
    return [_rep(check_wronskian_and_det(cfg.n, cfg.k, R)), _rep(invert_Qplus(cfg.n, cfg.k, min(R, 4))[1])]


def _suite_commute(cfg: RunConfig) -> list:
    from .funrel import build_hamiltonian_and_check, check_commuting_family
    R = cfg.k + 1 if cfg.order is None else cfg.order
    return [_rep(check_commuting_family(cfg.n, cfg.k, R)), _rep(build_hamiltonian_and_check(cfg.n, cfg.k))]


def _suite_yang_baxter(cfg: RunConfig) -> list:
    from .lattice import check_yang_baxter
    cutoff = 3 if cfg.order is None else cfg.order
    return [_rep(check_yang_baxter(w, cutoff)) for w in ("RLL", "DLL+", "DLL-")]


def _suite_backlund_quantum(cfg: RunConfig) -> list:
    from .backlund import (check_closed_forms, check_conjugation, check_Qminus_commutation,
                           check_transformed_algebra_and_invariants)
    R = 3 if cfg.order is None else cfg.order
    out = [_rep(check_conjugation("+", cfg.n, cfg.k, R)), _rep(check_conjugation("-", cfg.n, cfg.k, R))]
    if cfg.n >= 3:
        out.append(_rep(check_closed_forms(cfg.n, cfg.k)))
    out.append(_rep(check_transformed_algebra_and_invariants(cfg.n, cfg.k, R)))
    out.append(_rep(check_Qminus_commutation(cfg.n, cfg.k, R)))
    return out


def _suite_backlund_classical(cfg: RunConfig) -> list:
    from .backlund import classical_checks
    R = 4 if cfg.order is None else cfg.order
    return [_rep(classical_checks(cfg.n, R))]


def _suite_fusion(cfg: RunConfig) -> list:
    from .tqft import (backlund_fusion_link, cylindric_expansion_check, example_chain, fusion_goldens,
                       fusion_table)
    out = []
    gold = fusion_goldens(cfg.n, cfg.k)
    if gold is not None:
        out.append(_rep(gold))
    else:
        fusion_table(cfg.n, cfg.k)  # polynomiality is checked while building
        out.append({"identity": "fusion table polynomial", "n": cfg.n, "k": cfg.k, "order": 0, "pass": True})
    if cfg.n == 3 and cfg.k == 3:
        out.append(_rep(example_chain()))
    if cfg.n >= 2 and cfg.k <= 3:
        out.append(_rep(cylindric_expansion_check(cfg.n, cfg.k)))
    R = 2 if cfg.order is None else cfg.order
    out.append(_rep(backlund_fusion_link(cfg.n, cfg.k, cfg.site, R)))
    return out


def _suite_frobenius(cfg: RunConfig) -> list:
    from .tqft import verify_frobenius
    return [_rep(verify_frobenius(cfg.n, cfg.k))]


def _suite_bethe(cfg: RunConfig) -> list:
    from .funrel import bethe_spectral_suite
    _, rep = bethe_spectral_suite(cfg.n, cfg.k, cfg.q, cfg.tol, cfg.seed)
    return [_rep(rep)]


_SUITE_FUNCS = {
    "oracle-equivalence": _suite_oracle,
    "tq": _suite_tq,
    "wronskian": _suite_wronskian,
    "commute": _suite_commute,
    "yang-baxter": _suite_yang_baxter,
    "backlund-quantum": _suite_backlund_quantum,
    "backlund-classical": _suite_backlund_classical,
    "fusion": _suite_fusion,
    "frobenius": _suite_frobenius,
    "bethe": _suite_bethe,
}


def _run_one(args) -> SuiteResult:
    name, cfg = args
    t0 = time.perf_counter()
    try:
        reports = _SUITE_FUNCS[name](cfg)
    except ValueError as exc:
        raise UsageError(f"suite {name}: {exc}") from exc
    return SuiteResult(name, reports, time.perf_counter() - t0)


def run_verify(cfg: RunConfig) -> list[SuiteResult]:
    if not cfg.suites:
        raise UsageError("select at least one suite")
    jobs = [(s, cfg) for s in cfg.suites]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    return sorted(results, key=lambda r: r.suite)


# ---------------------------------------------------------------------------
# exports


def _export_fusion(cfg: RunConfig):
    from .tqft import fusion_product_str, fusion_table, reduced_box
    table = fusion_table(cfg.n, cfg.k)
    if cfg.fmt == "json":
        return table.to_json(q_zero=cfg.q_zero)
    lines = [f"fusion products, n={cfg.n} k={cfg.k}" + (" at q=0" if cfg.q_zero else "")]
    reds = sorted(set(reduced_box(cfg.n, cfg.k)))
    for a in reds:
        for b in reds:
            if b < a:
                continue
            if cfg.q_zero:
                prod = {nu: c(0) for nu, c in table.product(a, b).items() if c(0)}
                rhs = " + ".join((f"{c}*" if c != 1 else "") + str(list(nu)) for nu, c in sorted(prod.items())) or "0"
            else:
                rhs = fusion_product_str(table, a, b)
            lines.append(f"{list(a)} * {list(b)} = {rhs}")
    return "\n".join(lines)


def _export_whittaker(cfg: RunConfig):
    from .tqft import qwhittaker
    P = qwhittaker(cfg.shape, cfg.vars, cfg.method)
    if cfg.fmt == "json":
        return {"shape": list(P.shape), "vars": P.ell, "method": cfg.method, **P.value.to_json()}
    return f"P_{list(P.shape)}(x_1..x_{P.ell}; q) = {P.value}"


def _export_backlund(cfg: RunConfig):
    from .backlund import classical_transform, solve_beta_hat, solve_beta_tilde
    R = 2 if cfg.order is None else cfg.order
    if not 1 <= cfg.site <= cfg.n:
        raise UsageError(f"site must lie in 1..{cfg.n}")
    if cfg.mode == "classical":
        ph = classical_transform(cfg.n, R, cfg.flavor)
        mark = "~" if cfg.flavor == "tilde" else "^"
        fields = {"psi": ph.psi(cfg.site), "psi*": ph.psi_star(cfg.site)}
        if cfg.fmt == "json":
            return {"mode": "classical", "n": cfg.n, "site": cfg.site, "flavor": cfg.flavor, "order": R,
                    "fields": {f: [str(c) for c in s] for f, s in fields.items()}}
        return "\n".join(f"{f}{mark}_{{{cfg.site},{r}}} = {c}" for f, s in fields.items() for r, c in enumerate(s))
    solve = solve_beta_tilde if cfg.flavor == "tilde" else solve_beta_hat
    sol = solve(cfg.n, cfg.k, R)
    keys = [(cfg.flavor, cfg.site), (cfg.flavor + "*", cfg.site)]
    if cfg.fmt == "json":
        return {"mode": "quantum", "n": cfg.n, "k": cfg.k, "site": cfg.site, "order": R,
                "fields": [sol[key].to_json() for key in keys]}
    lines = []
    for key in keys:
        for r, c in enumerate(sol[key].series):
            nz = sum(1 for _ in c.nonzero_entries())
            lines.append(f"{key[0]}_{{{cfg.site},{r}}}: degree {c.d:+d}, blocks {list(c.ks)}, {nz} nonzero entries")
    return "\n".join(lines)


def _export_spectrum(cfg: RunConfig):
    from .funrel import bethe_spectral_suite
    sols, rep = bethe_spectral_suite(cfg.n, cfg.k, cfg.q, cfg.tol, cfg.seed)
    data = sorted((s.to_json() for s in sols), key=lambda d: json.dumps(d["T_eigenvalues"]))
    if cfg.fmt == "json":
        return {"n": cfg.n, "k": cfg.k, "q": cfg.q, "states": data, "report": rep.to_json()}, rep.passed
    lines = [f"n={cfg.n} k={cfg.k} q={cfg.q}: {len(data)} joint eigenstates"]
    for d in data:
        roots = ", ".join(_cplx(y) for y in d["roots"])
        t = ", ".join(_cplx(x) for x in d["T_eigenvalues"])
        lines.append(f"  roots [{roots}]  T [{t}]")
    return "\n".join(lines), rep.passed


def _cplx(pair) -> str:
    re, im = pair
    return f"{re:.10g}" if abs(im) < 1e-12 else f"{re:.10g}{im:+.10g}j"


_EXPORTS = {"fusion": _export_fusion, "whittaker": _export_whittaker,
            "backlund": _export_backlund, "spectrum": _export_spectrum}


# ---------------------------------------------------------------------------
# argument parsing


def _shape(text: str) -> tuple:
    try:
        parts = tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad shape {text!r}") from None
    if any(x < 0 for x in parts) or list(parts) != sorted(parts, reverse=True):
        raise argparse.ArgumentTypeError(f"{text!r} is not a partition")
    return tuple(x for x in parts if x)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=3, help="number of sites")
    common.add_argument("--k", type=int, default=2, help="particle number")
    common.add_argument("--order", type=int, default=None, help="series order R")
    common.add_argument("--site", type=int, default=1)
    common.add_argument("--q", type=float, default=0.3, help="numeric q for the Bethe suite")
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    common.add_argument("--json", dest="fmt", action="store_const", const="json", help="same as --format json")
    common.add_argument("--output", "-o", default=None, help="write to a file instead of stdout")
    common.add_argument("--unsafe-size", action="store_true", help=f"lift the size bounds {LIMITS}")

    p = argparse.ArgumentParser(prog="qbacklund", description="q-boson Q-operators, Bäcklund transforms and fusion.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", action="append", choices=SUITES + ("all",), required=True)
    v.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    v.add_argument("--timings", action="store_true", help="include wall-clock seconds per suite")

    f = sub.add_parser("fusion", parents=[common], help="export a fusion table")
    f.add_argument("--q-zero", action="store_true", help="specialise to q = 0 (integer WZNW table)")

    w = sub.add_parser("whittaker", parents=[common], help="q-Whittaker polynomial in monomial coordinates")
    w.add_argument("--shape", type=_shape, required=True, help="partition, e.g. '2,1'")
    w.add_argument("--vars", type=int, default=2)
    w.add_argument("--method", choices=("branching", "gram_schmidt"), default="branching")

    b = sub.add_parser("backlund", parents=[common], help="Bäcklund-transformed fields")
    b.add_argument("--mode", choices=("quantum", "classical"), default="quantum")
    b.add_argument("--flavor", choices=("tilde", "hat"), default="tilde")

    sub.add_parser("spectrum", parents=[common], help="numeric Bethe ansatz spectrum")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command, n=ns.n, k=ns.k, order=ns.order, site=ns.site, q=ns.q, tol=ns.tol,
                    seed=ns.seed, fmt=ns.fmt, output=ns.output, unsafe_size=ns.unsafe_size)
    if ns.command == "verify":
        suites = SUITES if "all" in ns.suite else tuple(dict.fromkeys(ns.suite))
        cfg.suites, cfg.jobs, cfg.timings = suites, ns.jobs, ns.timings
    elif ns.command == "fusion":
        cfg.q_zero = ns.q_zero
    elif ns.command == "whittaker":
        cfg.shape, cfg.vars, cfg.method = ns.shape, ns.vars, ns.method
    elif ns.command == "backlund":
        cfg.mode, cfg.flavor = ns.mode, ns.flavor
    return cfg


def _emit(cfg: RunConfig, payload):
    if isinstance(payload, dict):
        text = json.dumps({"schema": SCHEMA, "command": cfg.command, **payload}, indent=2, sort_keys=True)
    else:
        text = payload
    if cfg.output:
        try:
            with open(cfg.output, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            raise UsageError(f"cannot write {cfg.output}: {exc}") from exc
    else:
        print(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        cfg.validate()
        if cfg.command == "verify":
            results = run_verify(cfg)
            ok = all(r.passed for r in results)
            if cfg.fmt == "json":
                suites = []
                for r in results:
                    entry = {"suite": r.suite, "pass": r.passed, "reports": r.reports}
                    if cfg.timings:
                        entry["seconds"] = round(r.seconds, 3)
                    suites.append(entry)
                _emit(cfg, {"pass": ok, "suites": suites})
            else:
                lines = []
                for r in results:
                    extra = f" ({r.seconds:.2f}s)" if cfg.timings else ""
                    lines.append(f"[{'PASS' if r.passed else 'FAIL'}] {r.suite}{extra}")
                    for rep in r.reports:
                        mark = "ok  " if rep.get("pass") else "FAIL"
                        line = f"    {mark} {rep.get('identity')} n={rep.get('n')} k={rep.get('k')} order={rep.get('order')}"
                        if not rep.get("pass") and rep.get("failure_location") is not None:
                            line += f"  at {json.dumps(rep['failure_location'], default=str)}"
                        lines.append(line)
                lines.append("overall: " + ("PASS" if ok else "FAIL"))
                _emit(cfg, "\n".join(lines))
            return EXIT_OK if ok else EXIT_FAIL
        try:
            out = _EXPORTS[cfg.command](cfg)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        ok = True
        if isinstance(out, tuple):
            out, ok = out
        _emit(cfg, out)
        return EXIT_OK if ok else EXIT_FAIL
    except UsageError as exc:
        print(f"qbacklund: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
