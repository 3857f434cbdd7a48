"""Reduction semantics: decomposition, one-step reduction, evaluation.

Four orthogonal switches select the rule set (see :class:`SemMode`):
call-by-value or call-by-name, global or local capture rules, plain or
extended calculus (context variables), relaxed or original top level.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Optional, Union

from lamshift.syntax import (
    EMPTY_CTX,
    App,
    AppL,
    AppR,
    CtxApp,
    CtxVarF,
    EvalCtx,
    IllegalInput,
    Lam,
    Reset,
    ResetF,
    Shift,
    Term,
    Var,
    ctx_fv,
    fresh_var,
    is_delimiter,
    is_value,
    plug,
    subst,
    term_key,
)

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

CBV, CBN = "cbv", "cbn"
GLOBAL, LOCAL = "global", "local"
PLAIN, EXTENDED = "plain", "extended"
RELAXED, ORIGINAL = "relaxed", "original"

BETA_V = "beta_v"
SHIFT = "shift"
RESET = "reset"
SHIFT_ELEM = "shift_elem"
SHIFT_EMPTY = "shift_empty"
BETA_N = "beta_n"
SHIFT_EXT = "shift_ext"
RULE_NAMES = (BETA_V, SHIFT, RESET, SHIFT_ELEM, SHIFT_EMPTY, BETA_N, SHIFT_EXT)


@dataclass(frozen=True)
class SemMode:
    strategy: str = CBV
    rules: str = GLOBAL
    calculus: str = PLAIN
    top_level: str = RELAXED

    def __post_init__(self):
        if self.strategy not in (CBV, CBN):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.rules not in (GLOBAL, LOCAL):
            raise ValueError(f"unknown rules {self.rules!r}")
        if self.calculus not in (PLAIN, EXTENDED):
            raise ValueError(f"unknown calculus {self.calculus!r}")
        if self.top_level not in (RELAXED, ORIGINAL):
            raise ValueError(f"unknown top level {self.top_level!r}")
        if self.rules == LOCAL and self.calculus != PLAIN:
            raise ValueError("local rules are defined for the plain calculus only")
        if self.strategy == CBN and (self.calculus != PLAIN or self.rules != GLOBAL):
            raise ValueError("call-by-name requires the plain calculus and global rules")


DEFAULT = SemMode()
LOCAL_MODE = SemMode(rules=LOCAL)
EXTENDED_MODE = SemMode(calculus=EXTENDED)
ORIGINAL_MODE = SemMode(top_level=ORIGINAL)
CBN_MODE = SemMode(strategy=CBN)


# -- normal forms --------------------------------------------------------------


@dataclass(frozen=True)
class ValueNF:
    value: Term

    name = "value"


@dataclass(frozen=True)
class ControlStuck:
    """``E[S k. body]`` with no enclosing delimiter."""

    ctx: EvalCtx
    var: str
    body: Term

    name = "control-stuck"


@dataclass(frozen=True)
class OpenStuck:
    """``F[x v]``; under call-by-name the argument is any term."""

    ctx: EvalCtx
    var: str
    arg: Term

    name = "open-stuck"


@dataclass(frozen=True)
class ContextStuck:
    """``F[<a>v]``"""

    ctx: EvalCtx
    cvar: str
    value: Term

    name = "context-stuck"


NFKind = Union[ValueNF, ControlStuck, OpenStuck, ContextStuck]


@dataclass(frozen=True)
class NormalForm:
    kind: NFKind


@dataclass(frozen=True)
class Redex:
    redex: Term
    ctx: EvalCtx  # innermost first
    rule: str


Decomposition = Union[NormalForm, Redex]


def _check(t: Term, mode: SemMode) -> None:
    if mode.calculus == PLAIN and t.fcv:
        raise IllegalInput(f"context variables {sorted(t.fcv)} in a plain-calculus term")


def decompose(t: Term, mode: SemMode = DEFAULT) -> Decomposition:
    """Split ``t`` into its unique redex and evaluation context, if any."""
    _check(t, mode)
    frames: list = []  # outermost first while descending
    cur = t
    cbn = mode.strategy == CBN
    while True:
        match cur:
            case Var() | Lam():
                # only reachable at the top: non-values are the only thing we descend into
                return NormalForm(ValueNF(cur))
            case App(f, a):
                if not is_value(f):
                    frames.append(AppL(a))
                    cur = f
                elif cbn:
                    if isinstance(f, Lam):
                        return Redex(cur, _inner_first(frames), BETA_N)
                    return NormalForm(OpenStuck(_inner_first(frames), f.name, a))
                elif not is_value(a):
                    frames.append(AppR(f))
                    cur = a
                elif isinstance(f, Lam):
                    return Redex(cur, _inner_first(frames), BETA_V)
                else:
                    return NormalForm(OpenStuck(_inner_first(frames), f.name, a))
            case Reset(b):
                if is_value(b):
                    return Redex(cur, _inner_first(frames), RESET)
                frames.append(ResetF())
                cur = b
            case CtxApp(c, b):
                if is_value(b):
                    return NormalForm(ContextStuck(_inner_first(frames), c, b))
                frames.append(CtxVarF(c))
                cur = b
            case Shift(k, body):
                return _shift_site(cur, frames, mode)
            case _:
                raise TypeError(f"not a term: {cur!r}")


def _inner_first(frames: list) -> EvalCtx:
    return tuple(reversed(frames))


def _shift_site(s: Shift, frames: list, mode: SemMode) -> Decomposition:
    if mode.rules == LOCAL:
        if not frames:
            return NormalForm(ControlStuck(EMPTY_CTX, s.var, s.body))
        fr = frames[-1]
        outer = _inner_first(frames[:-1])
        if isinstance(fr, ResetF):
            return Redex(Reset(s), outer, SHIFT_EMPTY)
        return Redex(plug((fr,), s), outer, SHIFT_ELEM)
    j = len(frames) - 1
    while j >= 0 and not is_delimiter(frames[j]):
        j -= 1
    if j < 0:
        return NormalForm(ControlStuck(_inner_first(frames), s.var, s.body))
    redex = plug(_inner_first(frames[j:]), s)
    rule = SHIFT if isinstance(frames[j], ResetF) else SHIFT_EXT
    return Redex(redex, _inner_first(frames[:j]), rule)


def split_shift(t: Term) -> tuple[EvalCtx, Shift]:
    """Split ``E[S k.t]`` (pure ``E``, call-by-value) into ``(E, S k.t)``."""
    frames = []
    while True:
        match t:
            case Shift():
                return _inner_first(frames), t
            case App(f, a) if not is_value(f):
                frames.append(AppL(a))
                t = f
            case App(f, a) if not is_value(a):
                frames.append(AppR(f))
                t = a
            case _:
                raise IllegalInput("not of the form E[S k.t]")


def contract(redex: Term, rule: str) -> Term:
    """Apply ``rule`` at the root of ``redex``."""
    match rule:
        case "beta_v" | "beta_n":
            return subst(redex.fun.body, redex.fun.var, redex.arg)
        case "reset":
            return redex.body
        case "shift" | "shift_ext":
            delim = (ResetF(),) if isinstance(redex, Reset) else (CtxVarF(redex.cvar),)
            e, s = split_shift(redex.body)
            d = e + delim
            x = fresh_var(ctx_fv(d), "x")
            k_val = Lam(x, plug(d, Var(x)))
            return Reset(subst(s.body, s.var, k_val))
        case "shift_empty":
            s = redex.body
            x = fresh_var(set(), "x")
            return Reset(subst(s.body, s.var, Lam(x, Var(x))))
        case "shift_elem":
            if isinstance(redex.fun, Shift):
                s, elem = redex.fun, (AppL(redex.arg),)
            else:
                s, elem = redex.arg, (AppR(redex.fun),)
            avoid = ctx_fv(elem) | s.body.fv
            x = fresh_var(avoid, "x")
            k2 = fresh_var(avoid | {x}, "k")
            k_val = Lam(x, Reset(App(Var(k2), plug(elem, Var(x)))))
            return Shift(k2, subst(s.body, s.var, k_val))
    raise ValueError(f"unknown rule {rule!r}")


@dataclass(frozen=True)
class Stepped:
    term: Term
    rule: str


def step(t: Term, mode: SemMode = DEFAULT) -> Optional[Stepped]:
    """One reduction step, or ``None`` at a normal form."""
    d = decompose(t, mode)
    if isinstance(d, NormalForm):
        return None
    return Stepped(plug(d.ctx, contract(d.redex, d.rule)), d.rule)


# -- evaluation ------------------------------------------------------------------


@dataclass(frozen=True)
class Normal:
    term: Term
    kind: NFKind
    steps: int

    outcome = "normal"


@dataclass(frozen=True)
class Diverges:
    loop_witness: Term
    steps: int

    outcome = "diverges"


@dataclass(frozen=True)
class FuelExhausted:
    last: Term
    steps: int

    outcome = "fuel-exhausted"


EvalOutcome = Union[Normal, Diverges, FuelExhausted]


def program(t: Term, mode: SemMode) -> Term:
    """The term actually run: original mode adds a top-level reset if needed."""
    if mode.top_level == ORIGINAL and not isinstance(t, (Reset, CtxApp)):
        return Reset(t)
    return t


def evaluate(t: Term, mode: SemMode = DEFAULT, fuel: int = 10_000, trace: Optional[list] = None) -> EvalOutcome:
    """Reduce to a normal form within ``fuel`` steps.

    Takes the same steps as iterating :func:`step`, but keeps the evaluation
    context between steps instead of re-decomposing from the root.

    A term that recurs (up to alpha-equivalence) means the reduction
    sequence is cyclic, hence infinite, since reduction is deterministic.
    Recurrence is found with Brent's method: the current term is compared
    with a checkpoint that moves at powers of two, so any cycle is caught
    within a bounded number of extra steps while most steps cost no key.
    ``trace`` collects ``(rule, term)`` pairs when given.
    """
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    t = program(t, mode)
    _check(t, mode)
    m = _Machine(t, mode)
    mark, mark_key, power = t, None, 1
    steps = 0
    while True:
        d = m.next_redex()
        if isinstance(d, NormalForm):
            return Normal(m.term(), d.kind, steps)
        if steps >= fuel:
            return FuelExhausted(m.term(), steps)
        m.contract(d)
        steps += 1
        if trace is not None:
            trace.append((d.rule, m.term()))
        if m.size() == mark.size:
            cur = m.term()
            if cur.fv == mark.fv:
                if mark_key is None:
                    mark_key = term_key(mark)
                if term_key(cur) == mark_key:
                    return Diverges(cur, steps)
        if steps == power:
            mark, mark_key, power = m.term(), None, power * 2


class _Machine:
    """A focused term: ``frames`` (outermost first) around ``cur``."""

    def __init__(self, t: Term, mode: SemMode):
        self.mode = mode
        self.cbn = mode.strategy == CBN
        self.frames: list = []
        self.outer_sizes: list = [0]  # size contributed by frames[:i]
        self.cur = t

    def push(self, fr, sibling_size: int):
        self.frames.append(fr)
        self.outer_sizes.append(self.outer_sizes[-1] + 1 + sibling_size)

    def pop(self):
        self.outer_sizes.pop()
        return self.frames.pop()

    def size(self) -> int:
        return self.outer_sizes[-1] + self.cur.size

    def term(self) -> Term:
        return plug(_inner_first(self.frames), self.cur)

    def next_redex(self) -> Decomposition:
        while True:
            cur = self.cur
            match cur:
                case Var() | Lam():
                    if not self.frames:
                        return NormalForm(ValueNF(cur))
                    fr = self.frames[-1]
                    match fr:
                        case AppL(a):
                            self.pop()
                            self.cur = App(cur, a)
                            if self.cbn or is_value(a):
                                return self._value_app()
                            self.push(AppR(cur), cur.size)
                            self.cur = a
                        case AppR(f):
                            self.pop()
                            self.cur = App(f, cur)
                            return self._value_app()
                        case ResetF():
                            self.pop()
                            self.cur = Reset(cur)
                            return Redex(self.cur, _inner_first(self.frames), RESET)
                        case CtxVarF(c):
                            self.pop()
                            self.cur = CtxApp(c, cur)
                            return NormalForm(ContextStuck(_inner_first(self.frames), c, cur))
                case App(f, a):
                    if not is_value(f):
                        self.push(AppL(a), a.size)
                        self.cur = f
                    elif self.cbn or is_value(a):
                        return self._value_app()
                    else:
                        self.push(AppR(f), f.size)
                        self.cur = a
                case Reset(b):
                    if is_value(b):
                        return Redex(cur, _inner_first(self.frames), RESET)
                    self.push(ResetF(), 0)
                    self.cur = b
                case CtxApp(c, b):
                    if is_value(b):
                        return NormalForm(ContextStuck(_inner_first(self.frames), c, b))
                    self.push(CtxVarF(c), 0)
                    self.cur = b
                case Shift():
                    d = _shift_site(cur, self.frames, self.mode)
                    if isinstance(d, Redex):
                        # the redex absorbs the frames it spans
                        while len(self.frames) > len(d.ctx):
                            self.pop()
                        self.cur = d.redex
                    return d
                case _:
                    raise TypeError(f"not a term: {cur!r}")

    def _value_app(self) -> Decomposition:
        f, a = self.cur.fun, self.cur.arg
        ctx = _inner_first(self.frames)
        if isinstance(f, Lam):
            return Redex(self.cur, ctx, BETA_N if self.cbn else BETA_V)
        return NormalForm(OpenStuck(ctx, f.name, a))

    def contract(self, d: Redex) -> None:
        self.cur = contract(d.redex, d.rule)


def classify(t: Term) -> Optional[NFKind]:
    """The normal-form kind of ``t`` under the default rules, ``None`` if reducible."""
    mode = EXTENDED_MODE if t.fcv else DEFAULT
    d = decompose(t, mode)
    return d.kind if isinstance(d, NormalForm) else None


# -- context splitting -------------------------------------------------------------


@dataclass(frozen=True)
class PureOnly:
    ctx: EvalCtx


@dataclass(frozen=True)
class Split:
    outer: EvalCtx
    inner: EvalCtx  # pure prefix plus the innermost delimiter frame


def ctx_split(ctx: EvalCtx) -> Union[PureOnly, Split]:
    for j, fr in enumerate(ctx):
        if is_delimiter(fr):
            return Split(tuple(ctx[j + 1 :]), tuple(ctx[: j + 1]))
    return PureOnly(tuple(ctx))
