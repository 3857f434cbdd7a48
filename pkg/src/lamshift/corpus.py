"""Regression corpus: line-oriented entries with expected verdicts.

An entry is a block of ``key: value`` lines; blank lines separate entries
and ``#`` starts a comment line.  Example::

    name: trace-six-steps
    command: eval
    term: <((S k1. i (k1 i)) (S k2. omega)) Omega>
    expect: normal:value
    steps: 6
    tags: reduction
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from typing import Optional

from lamshift import axioms, cps, equiv_app, equiv_nf
from lamshift import semantics as sem
from lamshift.parser import ParseError, parse_term
from lamshift.syntax import alpha_eq

COMMANDS = ("eval", "nf-bisim", "app-bisim", "cps-equiv", "axioms")
NF_KINDS = ("value", "control-stuck", "open-stuck", "context-stuck")
EXPECTED = {
    "equivalent",
    "inequivalent",
    "unknown",
    "diverges",
    "derived",
    "not-derived",
    "yes",
    "no",
} | {f"normal:{k}" for k in NF_KINDS}
KEYS = {
    "name",
    "command",
    "term",
    "left",
    "right",
    "expect",
    "steps",
    "result",
    "flavor",
    "mode",
    "rules",
    "strategy",
    "fuel",
    "depth",
    "budget",
    "tags",
    "note",
}
INT_KEYS = ("steps", "fuel", "depth", "budget")


class CorpusError(ValueError):
    def __init__(self, message: str, entry: Optional[str] = None, line: Optional[int] = None):
        self.entry = entry
        self.line = line
        where = f"entry {entry!r}" if entry else f"line {line}"
        super().__init__(f"{where}: {message}")


@dataclass
class Entry:
    name: str
    command: str
    terms: tuple
    expect: str
    options: dict = field(default_factory=dict)
    tags: tuple = ()
    note: str = ""
    line: int = 0


def _blocks(text: str):
    block, start = [], 0
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            if block:
                yield start, block
            block = []
            continue
        if not block:
            start = n
        block.append((n, line))
    if block:
        yield start, block


def parse_corpus(text: str, defs: dict) -> list[Entry]:
    entries = []
    names = set()
    for start, block in _blocks(text):
        fields: dict = {}
        for n, line in block:
            key, sep, value = line.partition(":")
            key, value = key.strip(), value.strip()
            if not sep or key not in KEYS:
                raise CorpusError(f"bad field {line!r}", fields.get("name"), n)
            if key in fields:
                raise CorpusError(f"duplicate field {key!r}", fields.get("name"), n)
            fields[key] = value
        entries.append(_entry(fields, defs, start))
        if entries[-1].name in names:
            raise CorpusError("duplicate entry name", entries[-1].name)
        names.add(entries[-1].name)
    return entries


def _entry(fields: dict, defs: dict, line: int) -> Entry:
    name = fields.get("name")
    if not name:
        raise CorpusError("entry without a name", line=line)
    command = fields.get("command")
    if command not in COMMANDS:
        raise CorpusError(f"unknown command {command!r}", name)
    expect = fields.get("expect")
    if expect not in EXPECTED:
        raise CorpusError(f"unknown expected value {expect!r}", name)
    try:
        if command == "eval":
            if "term" not in fields:
                raise CorpusError("eval needs a term", name)
            terms = (parse_term(fields["term"], defs),)
        else:
            if "left" not in fields or "right" not in fields:
                raise CorpusError(f"{command} needs left and right", name)
            terms = (parse_term(fields["left"], defs), parse_term(fields["right"], defs))
        options = {k: fields[k] for k in ("flavor", "mode", "rules", "strategy") if k in fields}
        for k in INT_KEYS:
            if k in fields:
                options[k] = int(fields[k])
        if "result" in fields:
            options["result"] = parse_term(fields["result"], defs)
        if options.get("flavor", equiv_nf.PLAIN) not in equiv_nf.FLAVORS:
            raise CorpusError(f"unknown flavor {options['flavor']!r}", name)
        sem_mode(options)
    except ParseError as e:
        raise CorpusError(f"parse error: {e}", name) from None
    except ValueError as e:
        if isinstance(e, CorpusError):
            raise
        raise CorpusError(str(e), name) from None
    tags = tuple(fields.get("tags", "").split())
    return Entry(name, command, terms, expect, options, tags, fields.get("note", ""), line)


def sem_mode(options: dict) -> sem.SemMode:
    mode = options.get("mode", "relaxed")
    if mode not in (sem.RELAXED, sem.ORIGINAL):
        raise ValueError(f"unknown mode {mode!r}")
    return sem.SemMode(
        strategy=options.get("strategy", sem.CBV),
        rules=options.get("rules", sem.GLOBAL),
        top_level=mode,
    )


@dataclass(frozen=True)
class Outcome:
    name: str
    expected: str
    actual: str
    passed: bool
    detail: str = ""


def run_entry(e: Entry) -> Outcome:
    o = e.options
    detail = ""
    ok = True
    match e.command:
        case "eval":
            out = sem.evaluate(e.terms[0], sem_mode(o), o.get("fuel", 10_000))
            actual = eval_verdict(out)
            if isinstance(out, sem.Normal):
                if "steps" in o and out.steps != o["steps"]:
                    ok, detail = False, f"took {out.steps} steps, expected {o['steps']}"
                if "result" in o and not alpha_eq(out.term, o["result"]):
                    ok, detail = False, "normal form differs from the expected result"
        case "nf-bisim":
            v = equiv_nf.nf_bisim_check(
                *e.terms, o.get("flavor", equiv_nf.PLAIN), o.get("depth", 64), o.get("fuel", 10_000)
            )
            actual = v.verdict
        case "app-bisim":
            v = equiv_app.app_bisim_check(*e.terms, depth=o.get("depth", 4), fuel=o.get("fuel", 10_000))
            actual = v.verdict
            if isinstance(v, equiv_app.Inequivalent):
                detail = f"context {v.context}"
        case "cps-equiv":
            actual = cps.cps_equiv(*e.terms, o.get("fuel", 20_000))
        case "axioms":
            actual = axioms.derive_axiom_eq(*e.terms, o.get("budget", 50_000)).verdict
    return Outcome(e.name, e.expect, actual, ok and actual == e.expect, detail)


def eval_verdict(out: sem.EvalOutcome) -> str:
    match out:
        case sem.Normal(kind=k):
            return f"normal:{k.name}"
        case sem.Diverges():
            return "diverges"
    return "unknown"


def run_corpus(entries: list[Entry], tag: Optional[str] = None, jobs: int = 1) -> list[Outcome]:
    """Run the selected entries; results keep corpus order."""
    chosen = [e for e in entries if tag is None or tag in e.tags]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(run_entry, chosen))
    return [run_entry(e) for e in chosen]
