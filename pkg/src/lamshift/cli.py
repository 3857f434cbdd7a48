"""Batch command-line front end.

Exit codes: 0 for a positive outcome (equivalent, derived, yes, a normal
form), 1 for a negative one (inequivalent, no, divergence), 2 when a budget
ran out, 3 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from typing import Optional

from lamshift import axioms, corpus, cps, equiv_app, equiv_nf
from lamshift import semantics as sem
from lamshift.parser import ParseError, parse_defs, parse_term
from lamshift.printer import print_term
from lamshift.syntax import IllegalInput

OK, NEGATIVE, UNDECIDED, ERROR = 0, 1, 2, 3

EXIT = {
    "equivalent": OK,
    "derived": OK,
    "yes": OK,
    "inequivalent": NEGATIVE,
    "no": NEGATIVE,
    "diverges": NEGATIVE,
    "unknown": UNDECIDED,
    "not-derived": UNDECIDED,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ERROR, f"{self.prog}: error: {message}\n")


def _data(name: str) -> str:
    return resources.files("lamshift").joinpath("data", name).read_text(encoding="utf-8")


def prelude():
    """The shipped combinator definitions."""
    return parse_defs(_data("combinators.defs"))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=[sem.RELAXED, sem.ORIGINAL], default=sem.RELAXED)
    common.add_argument("--rules", choices=[sem.GLOBAL, sem.LOCAL], default=sem.GLOBAL)
    common.add_argument("--strategy", choices=[sem.CBV, sem.CBN], default=sem.CBV)
    common.add_argument("--flavor", choices=list(equiv_nf.FLAVORS), default=equiv_nf.PLAIN)
    common.add_argument("--fuel", type=int, help="step budget per evaluation")
    common.add_argument("--depth", type=int, help="game depth")
    common.add_argument("--budget", type=int, default=50_000, help="axiom search expansions")
    common.add_argument("--defs", action="append", default=[], metavar="FILE")
    common.add_argument("--pool", metavar="FILE")
    common.add_argument("--json", action="store_true")
    common.add_argument("--trace", action="store_true", help="show steps, witnesses or traces")
    common.add_argument("--no-upto-context", action="store_true")
    common.add_argument("--no-upto-reduction", action="store_true")

    p = _Parser(prog="lamshift", description="Shift/reset calculus: evaluation, CPS and equivalence checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, nargs, help_ in [
        ("eval", 1, "evaluate a term"),
        ("trace", 1, "print every reduction step"),
        ("classify", 1, "kind of normal form"),
        ("cps", 1, "CPS translation"),
        ("cps-equiv", 2, "compare CPS translations"),
        ("axioms", 2, "search for an equational derivation"),
        ("nf-bisim", 2, "normal-form bisimulation game"),
        ("app-bisim", 2, "bounded applicative bisimulation game"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=help_)
        if nargs == 1:
            sp.add_argument("term")
        else:
            sp.add_argument("left")
            sp.add_argument("right")
    cp = sub.add_parser("corpus", parents=[common], help="run a regression corpus")
    cp.add_argument("path", nargs="?", help="corpus file (default: the shipped one)")
    cp.add_argument("--filter", metavar="TAG")
    cp.add_argument("--jobs", type=int, default=1)
    return p


def _mode(args) -> sem.SemMode:
    return sem.SemMode(strategy=args.strategy, rules=args.rules, top_level=args.mode)


def _defs(args):
    table = prelude()
    for path in args.defs:
        with open(path, encoding="utf-8") as fh:
            table = parse_defs(fh.read(), table)
    return table


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True, ensure_ascii=False))
    else:
        for line in lines:
            print(line)


def _eval(args, t, fuel):
    trace: list = []
    out = sem.evaluate(t, _mode(args), fuel, trace if args.trace or args.command == "trace" else None)
    verdict = corpus.eval_verdict(out)
    payload = {"command": args.command, "verdict": verdict, "steps": out.steps, "budget": {"fuel": fuel, "depth": None}}
    lines = []
    if trace:
        lines += [f"{i}. {rule:<12} {print_term(term)}" for i, (rule, term) in enumerate(trace, 1)]
        payload["trace"] = [{"rule": r, "term": print_term(term)} for r, term in trace]
    match out:
        case sem.Normal(term=nf):
            payload["result"] = print_term(nf)
            lines.append(f"{verdict} after {out.steps} steps")
            lines.append(print_term(nf))
        case sem.Diverges():
            lines.append(f"diverges (a term recurs after {out.steps} steps)")
        case _:
            lines.append(f"unknown: fuel exhausted after {out.steps} steps")
    _emit(args, payload, lines)
    return OK if isinstance(out, sem.Normal) else EXIT[verdict]


def _classify(args, t):
    kind = sem.classify(t)
    name = kind.name if kind else "reducible"
    _emit(args, {"command": "classify", "verdict": name}, [name])
    return OK if kind else NEGATIVE


def _cps(args, t):
    out = print_term(cps.cps_translate(t))
    _emit(args, {"command": "cps", "verdict": "translated", "result": out}, [out])
    return OK


def _nf(args, t0, t1, fuel, depth):
    opts = equiv_nf.UpToOptions(context=not args.no_upto_context, reduction=not args.no_upto_reduction)
    v = equiv_nf.nf_bisim_check(t0, t1, args.flavor, depth, fuel, opts)
    payload = {"command": "nf-bisim", "verdict": v.verdict, "budget": {"fuel": fuel, "depth": depth}}
    lines = [f"{v.verdict} ({args.flavor})"]
    match v:
        case equiv_nf.Equivalent(witness=w):
            payload["witness"] = {
                "pairs": [{"left": print_term(p.left), "right": print_term(p.right), "via": p.via} for p in w]
            }
            lines[0] += f", witness of {len(w)} pair{'' if len(w) == 1 else 's'}"
            if args.trace:
                lines += equiv_nf.witness_relation(v)
        case equiv_nf.Inequivalent(trace=tr, reason=why):
            payload["reason"] = why
            payload["trace"] = [
                {
                    "left": print_term(s.obligation.left),
                    "right": print_term(s.obligation.right),
                    "via": s.obligation.via,
                }
                for s in tr
            ]
            lines.append(f"reason: {why}")
            if args.trace:
                lines += [
                    f"{print_term(s.obligation.left)}  ?  {print_term(s.obligation.right)}    [{s.obligation.via}]"
                    for s in tr
                ]
        case equiv_nf.Unknown(reason=why):
            payload["reason"] = why
            lines.append(f"budget exhausted: {why}")
    _emit(args, payload, lines)
    return EXIT[v.verdict]


def _app(args, t0, t1, fuel, depth):
    pool = None
    if args.pool:
        with open(args.pool, encoding="utf-8") as fh:
            pool = equiv_app.load_pool(fh.read(), _defs(args))
    v = equiv_app.app_bisim_check(t0, t1, pool, depth, fuel)
    payload = {"command": "app-bisim", "verdict": v.verdict, "budget": {"fuel": fuel, "depth": depth}}
    lines = [v.verdict]
    match v:
        case equiv_app.Equivalent(witness=w, bounded=b):
            payload["bounded"] = b
            payload["witness"] = {"pairs": [{"left": print_term(l), "right": print_term(r)} for l, r in w]}
            lines[0] += f" up to depth {depth} (bounded: no pool test separates the terms)"
        case equiv_app.Inequivalent(trace=tr, context=c):
            payload["context"] = print_term(c)
            payload["trace"] = [{"label": str(m.label), "left": m.left, "right": m.right} for m in tr]
            lines.append(f"context: {print_term(c)}")
            if args.trace:
                lines += [f"{m.label}: {m.left} / {m.right}" for m in tr]
        case equiv_app.Unknown(reason=why):
            payload["reason"] = why
            lines.append(f"budget exhausted: {why}")
    _emit(args, payload, lines)
    return EXIT[v.verdict]


def _axioms(args, t0, t1):
    d = axioms.derive_axiom_eq(t0, t1, args.budget)
    payload = {"command": "axioms", "verdict": d.verdict, "budget": {"expansions": args.budget}}
    lines = [f"{d.verdict} ({d.expanded} expansions)"]
    if isinstance(d, axioms.Derived):
        payload["steps"] = [
            {"axiom": s.axiom, "direction": s.direction, "path": s.path, "result": print_term(s.result)}
            for s in d.steps
        ]
        lines += [f"{line}   {print_term(s.result)}" for line, s in zip(d.lines(), d.steps)]
    _emit(args, payload, lines)
    return EXIT[d.verdict]


def _corpus(args):
    text = _data("shipped.corpus") if args.path is None else open(args.path, encoding="utf-8").read()
    entries = corpus.parse_corpus(text, _defs(args))
    results = corpus.run_corpus(entries, args.filter, args.jobs)
    failed = [r for r in results if not r.passed]
    if args.json:
        rows = [
            {"name": r.name, "expected": r.expected, "actual": r.actual, "passed": r.passed, "detail": r.detail}
            for r in results
        ]
        print(json.dumps({"command": "corpus", "results": rows, "failed": len(failed)}, sort_keys=True))
    else:
        width = max((len(r.name) for r in results), default=4)
        for r in results:
            mark = "pass" if r.passed else "FAIL"
            extra = f"  {r.detail}" if r.detail and not r.passed else ""
            print(f"{mark}  {r.name:<{width}}  expected {r.expected:<20} got {r.actual}{extra}")
        print(f"{len(results) - len(failed)}/{len(results)} passed")
    return OK if not failed else NEGATIVE


def run(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "corpus":
            return _corpus(args)
        defs = _defs(args)
        cps_like = args.command in ("cps", "cps-equiv")
        fuel = args.fuel if args.fuel is not None else (20_000 if cps_like else 10_000)
        if fuel <= 0 or (args.depth is not None and args.depth < 0):
            raise UsageError("fuel must be positive and depth non-negative")
        if hasattr(args, "term"):
            t = parse_term(args.term, defs)
            match args.command:
                case "eval" | "trace":
                    return _eval(args, t, fuel)
                case "classify":
                    return _classify(args, t)
                case "cps":
                    return _cps(args, t)
        t0, t1 = parse_term(args.left, defs), parse_term(args.right, defs)
        match args.command:
            case "cps-equiv":
                ans = cps.cps_equiv(t0, t1, fuel)
                _emit(args, {"command": "cps-equiv", "verdict": ans, "budget": {"fuel": fuel, "depth": None}}, [ans])
                return EXIT[ans]
            case "axioms":
                return _axioms(args, t0, t1)
            case "nf-bisim":
                return _nf(args, t0, t1, fuel, args.depth if args.depth is not None else 64)
            case "app-bisim":
                return _app(args, t0, t1, fuel, args.depth if args.depth is not None else 4)
    except (ParseError, IllegalInput, corpus.CorpusError, UsageError, OSError) as e:
        print(f"lamshift: error: {e}", file=sys.stderr)
        return ERROR
    except ValueError as e:  # invalid mode combinations
        print(f"lamshift: error: {e}", file=sys.stderr)
        return ERROR
    raise AssertionError(args.command)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
