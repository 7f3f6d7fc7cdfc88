"""qgb: normal forms, identity certification and root-of-unity reports.

Exit codes: 0 success, 1 certification failure, 2 usage error, 3 budget.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

from .catalog import ALIASES, AUXILIARY, STRAIGHTENING, iter_instances, lookup, powers
from .coeff import alpha_beta, R, S
from .freealg import Element, ParseError, TensorElement, parse_expression
from .qgroup import CertRecord, _certify, build, transport_checks
from .pbw import BudgetExceeded
from .rewrite import BudgetError, normal_form, to_elt

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
DEFAULT_ROU = (5, 1, 4)


@dataclass(frozen=True)
class Params:
    n: int
    ell: int | None = None
    y: int | None = None
    z: int | None = None

    def rou(self) -> tuple[int, int, int]:
        if self.ell is None:
            return DEFAULT_ROU
        if self.y is None or self.z is None:
            raise UsageError("--ell needs --y and --z")
        return self.ell, self.y, self.z


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class Suite:
    tag: str
    kind: str                       # "generic" or "rou"
    run: Callable[[Params], list[CertRecord]]
    in_all: bool = True


# suite bodies -------------------------------------------------------------------------
# Module-level functions so that --jobs can ship them to worker processes.


def _catalog(tag: str, p: Params) -> list[CertRecord]:
    inst = build(p.n)
    ident = lookup(tag)
    return [_certify(inst, tag, ident, idx) for _, idx in iter_instances([tag], p.n)] \
        if p.n >= ident.min_rank else []


def _transport(tag: str, p: Params) -> list[CertRecord]:
    return [r for r in transport_checks(build(p.n)) if r.tag == tag]


def _alpha_beta(p: Params, m_max: int = 8) -> list[CertRecord]:
    out = []
    for m in range(1, m_max):
        a, b = alpha_beta(m)
        a1, b1 = alpha_beta(m + 1)
        ok = a1 == S ** 2 * a + R ** (m - 1) * b and b1 == S * b + R ** m
        out.append(CertRecord("alpha-beta", f"m={m}", "PASS" if ok else "FAIL", 0.0, "" if ok else "recurrence"))
    return out


def _coproduct(tag: str, p: Params) -> list[CertRecord]:
    from .hopf import coproduct_suite
    return coproduct_suite(build(p.n), tag)


def _iso(group: str, p: Params) -> list[CertRecord]:
    from .hopf import iso_suite
    return iso_suite(group, p.n)


def _pairing(p: Params) -> list[CertRecord]:
    from .hopf import pairing_suite
    return pairing_suite(build(p.n))


def _specialized(p: Params):
    ell, y, z = p.rou()
    return build(p.n, "specialized", ell, y, z)


def _restricted(p: Params):
    from .restricted import restricted_instance
    ell, y, z = p.rou()
    return restricted_instance(p.n, ell, y, z)


def _central(p: Params) -> list[CertRecord]:
    from .restricted import central_suite
    return central_suite(_specialized(p))


def _ideal(tag: str, p: Params) -> list[CertRecord]:
    from .restricted import hopf_ideal_suite
    return [r for r in hopf_ideal_suite(_specialized(p)) if r.tag == tag]


def _skew(p: Params) -> list[CertRecord]:
    from .hopf import skew_primitive_suite
    return skew_primitive_suite(_restricted(p))


def _double(p: Params) -> list[CertRecord]:
    from .hopf import eta_suite
    from .restricted import double_condition
    ell, y, z = p.rou()
    dc = double_condition(p.n, ell, y, z)
    out = [CertRecord("6.1", f"n={p.n},check=determinant", "PASS" if dc.closed_form_ok else "FAIL", 0.0,
                      "" if dc.closed_form_ok else str(dc.det_symbolic)),
           CertRecord("6.1", f"n={p.n},check=matrix-from-structure-constants",
                      "PASS" if dc.from_pairing_ok else "FAIL", 0.0)]
    return out + eta_suite(_restricted(p))


def _integral(tag: str, p: Params) -> list[CertRecord]:
    from .restricted import antipode_integral_check, counit_check, distinguished_check, integral_check
    inst = _restricted(p)
    if tag == "7.1":
        return integral_check(inst, "left") + [antipode_integral_check(inst)]
    if tag == "7.2":
        return integral_check(inst, "right")
    if tag == "7.3":
        return counit_check(inst)
    recs = distinguished_check(inst)
    return [r for r in recs if r.tag == tag]


def _dual(p: Params) -> list[CertRecord]:
    from .restricted import dual_integral_check
    return dual_integral_check(_restricted(p))


def _ribbon(p: Params) -> list[CertRecord]:
    from .restricted import NoWitness, ribbon_solve
    ell, y, z = p.rou()
    w = ribbon_solve(p.n, ell, y, z)
    if isinstance(w, NoWitness):
        return [CertRecord("8.2", f"n={p.n},ell={ell}", "FAIL", 0.0, str(w))]
    return w.checks


def registry() -> dict[str, Suite]:
    from functools import partial
    reg: dict[str, Suite] = {}

    def add(tag, kind, fn, in_all=True):
        reg[tag] = Suite(tag, kind, fn, in_all)
    add("2.2", "generic", _pairing)
    for tag in list(STRAIGHTENING) + list(AUXILIARY) + list(powers(1)):
        add(tag, "generic", partial(_catalog, tag))
    for tag in ("3.8.1", "3.8.2"):
        add(tag, "generic", partial(_transport, tag))
    add("alpha-beta", "generic", _alpha_beta)
    for tag in ("4.3.i", "4.3.ii", "4.5", "4.6", "4.8"):
        add(tag, "generic", partial(_coproduct, tag))
    add("5.4", "generic", partial(_iso, "so"))
    add("5.5", "generic", partial(_iso, "sl"))
    add("3.15", "rou", _central)
    for tag in ("4.2", "4.9", "4.10", "4.11", "4.12"):
        add(tag, "rou", partial(_ideal, tag))
    add("5.3", "rou", _skew)
    add("6.1", "rou", _double)
    for tag in ("7.1", "7.2", "7.3", "7.4", "7.6"):
        add(tag, "rou", partial(_integral, tag))
    add("7.5", "rou", _dual, in_all=False)
    add("8.2", "rou", _ribbon)
    return reg


def _sort_key(tag: str):
    parts = tag.replace("-", ".").split(".")
    return tuple((0, int(x), "") if x.isdigit() else (1, 0, x) for x in parts)


def run_suites(tags: list[str], params: Params, jobs: int = 1) -> list[CertRecord]:
    reg = registry()
    if jobs > 1 and len(tags) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_one, [(t, params) for t in tags]))
    else:
        chunks = [_run_one((t, params), reg) for t in tags]
    return [r for chunk in chunks for r in chunk]


def _run_one(arg, reg: dict | None = None) -> list[CertRecord]:
    tag, params = arg
    reg = reg or registry()
    return reg[tag].run(params)


# commands -------------------------------------------------------------------------


def _params(args) -> Params:
    if (args.y is None) != (args.z is None) or (args.y is not None and args.ell is None):
        raise UsageError("--ell, --y and --z go together")
    return Params(args.n, args.ell, args.y, args.z)


def _set_budget(args) -> None:
    if getattr(args, "budget", None) is not None:
        os.environ["QGB_BUDGET"] = str(args.budget)


def cmd_nf(args) -> int:
    p = _params(args)
    try:
        x = parse_expression(args.expr)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if p.ell is None:
        if args.restricted:
            raise UsageError("--restricted needs --ell, --y and --z")
        inst = build(p.n)
    else:
        inst = build(p.n, "restricted" if args.restricted else "specialized", p.ell, p.y, p.z)
    if isinstance(x, TensorElement):
        from .hopf import Tensor
        out = Tensor(inst.alg)
        for (u, v), c in x.terms.items():
            out = out + Tensor.pure(to_elt(Element.word(*u), inst.alg), to_elt(Element.word(*v), inst.alg)) * c
        print(out)
        return EXIT_OK
    if args.trace:
        if p.ell is not None:
            raise UsageError("--trace works in generic mode")
        res, tr = normal_form(x, inst.pbw_rules, trace=True)
        for line in tr.lines():
            print("  " + line)
    else:
        res = normal_form(x, inst.pbw_rules)
    print(res)
    return EXIT_OK


def cmd_certify(args) -> int:
    reg = registry()
    p = _params(args)
    if args.tag == "all":
        kinds = {"generic"} if p.ell is None else {"generic", "rou"}
        tags = sorted((t for t, s in reg.items() if s.in_all and s.kind in kinds), key=_sort_key)
    else:
        tag = ALIASES.get(args.tag, args.tag)
        if tag not in reg:
            print(f"unknown tag {args.tag!r}", file=sys.stderr)
            return EXIT_USAGE
        tags = [tag]
    records = run_suites(tags, p, args.jobs)
    return _report(records, args, summary=args.tag == "all")


def _report(records: list[CertRecord], args, summary: bool = False) -> int:
    if args.format == "records":
        for r in records:
            print(r.line())
    else:
        for r in records:
            line = f"{r.tag:<10} {r.status:<12} {r.params}"
            if r.note:
                line += f"  [{r.note}]"
            if r.residue:
                line += f"\n    residue: {r.residue}"
            print(line)
    if summary:
        counts: dict[str, list[int]] = {}
        for r in records:
            c = counts.setdefault(r.tag, [0, 0])
            c[0 if r.status == "PASS" else 1] += 1
        for tag in sorted(counts, key=_sort_key):
            ok, bad = counts[tag]
            print(f"# {tag}: {ok} pass, {bad} not passing")
    if not records:
        print("no instances at this rank")
        return EXIT_OK
    if any(r.status == "INCONCLUSIVE" for r in records):
        status, code = "INCONCLUSIVE", EXIT_BUDGET
    elif any(r.status == "FAIL" for r in records):
        status, code = "FAIL", EXIT_FAIL
    else:
        status, code = "PASS", EXIT_OK
    print(f"{status}: {len(records)} records")
    return code


def cmd_rou(args) -> int:
    from .restricted import NoWitness, double_condition, ribbon_solve
    p = _params(args)
    if args.what == "double":
        ell, y, z = p.rou()
        dc = double_condition(p.n, ell, y, z)
        print(f"det A = {dc.det_symbolic}")
        print(dc)
        return EXIT_OK if dc.closed_form_ok and dc.from_pairing_ok else EXIT_FAIL
    if args.what == "ribbon":
        ell = args.ell if args.ell is not None else DEFAULT_ROU[0]
        if args.y is None:
            w = ribbon_solve(p.n, ell)
            print(w)
            return EXIT_OK
        w = ribbon_solve(p.n, ell, args.y, args.z)
        print(w)
        if isinstance(w, NoWitness):
            return EXIT_OK
        return _report(w.checks, args)
    if args.what == "central":
        return _report(_central(p), args)
    if args.what == "integral":
        from .restricted import integral_check
        return _report(integral_check(_restricted(p), args.side), args)
    if args.what == "ideal":
        from .restricted import hopf_ideal_suite
        return _report(hopf_ideal_suite(_specialized(p)), args)
    if args.what == "distinguished":
        from .restricted import distinguished_check
        return _report(distinguished_check(_restricted(p)), args)
    return _report(_dual(p), args)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qgb", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, n_default):
        sp.add_argument("--n", type=int, default=n_default, help="rank")
        sp.add_argument("--ell", type=int, help="order of the root of unity")
        sp.add_argument("--y", type=int, help="r = q^y")
        sp.add_argument("--z", type=int, help="s = q^z")
        sp.add_argument("--budget", type=int, help="reduction step budget (default: QGB_BUDGET or 10^6)")
        sp.add_argument("--format", choices=("text", "records"), default="text")

    nf = sub.add_parser("nf", help="normal form of an expression")
    common(nf, 2)
    nf.add_argument("expr")
    nf.add_argument("--trace", action="store_true")
    nf.add_argument("--restricted", action="store_true", help="work in the restricted quotient")
    nf.set_defaults(func=cmd_nf)

    cert = sub.add_parser("certify", help="certify identities by tag, or all")
    common(cert, 3)
    cert.add_argument("tag")
    cert.add_argument("--jobs", type=int, default=1)
    cert.add_argument("--trace", action="store_true")
    cert.set_defaults(func=cmd_certify)

    rou = sub.add_parser("rou", help="root-of-unity reports")
    common(rou, 2)
    rou.add_argument("what", choices=("central", "integral", "ribbon", "double", "ideal", "distinguished", "dual"))
    rou.add_argument("--side", choices=("left", "right"), default="left")
    rou.add_argument("--jobs", type=int, default=1)
    rou.set_defaults(func=cmd_rou)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    saved = os.environ.get("QGB_BUDGET")
    _set_budget(args)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetError, BudgetExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if saved is None:
            os.environ.pop("QGB_BUDGET", None)
        else:
            os.environ["QGB_BUDGET"] = saved


if __name__ == "__main__":
    sys.exit(main())
