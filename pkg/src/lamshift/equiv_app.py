"""Applicative bisimulation over finite pools of arguments and contexts.

The labelled transition system is implemented by its own rules rather
than by calling the reduction semantics, so the two can be tested against
each other.  The game is bounded: an ``Equivalent`` verdict only says no
pool test up to the depth tells the terms apart, while an
``Inequivalent`` verdict ships a context that provably separates them.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Union

from lamshift import semantics as sem
from lamshift.parser import parse_sections
from lamshift.printer import HOLE, print_ctx, print_term
from lamshift.syntax import (
    App,
    AppL,
    AppR,
    CtxApp,
    EvalCtx,
    IllegalInput,
    Lam,
    Reset,
    Shift,
    Term,
    Var,
    ctx_fv,
    fresh_var,
    is_pure_ctx,
    is_value,
    pair_key,
    plug,
    require_plain,
    subst_value,
    term_key,
)

# -- labels -------------------------------------------------------------------


@dataclass(frozen=True)
class Tau:
    def __str__(self):
        return "tau"


@dataclass(frozen=True)
class Arg:
    value: Term

    def __str__(self):
        return f"arg {print_term(self.value)}"


@dataclass(frozen=True)
class Ctx:
    ctx: EvalCtx

    def __str__(self):
        return f"ctx {print_ctx(self.ctx)}"


Label = Union[Tau, Arg, Ctx]
TAU = Tau()


def _closed(t: Term) -> None:
    require_plain(t, "the transition system")
    if t.fv:
        raise IllegalInput(f"the transition system expects closed terms, free: {sorted(t.fv)}")


def is_stuck(t: Term) -> bool:
    """Control-stuck: a shift in evaluation position with no reset around it."""
    while True:
        match t:
            case Shift():
                return True
            case App(f, a) if not is_value(f):
                t = f
            case App(f, a) if not is_value(a):
                t = a
            case _:
                return False


def _capture(t: Term, ctx: EvalCtx) -> Term:
    # shift, capt_l, capt_r: the label context grows as frames are crossed
    while True:
        match t:
            case Shift(k, body):
                x = fresh_var(ctx_fv(ctx) | body.fv, "x")
                return Reset(subst_value(body, k, Lam(x, Reset(plug(ctx, Var(x))))))
            case App(f, a) if not is_value(f):
                ctx = (AppL(a),) + ctx
                t = f
            case App(f, a):
                ctx = (AppR(f),) + ctx
                t = a


def _tau(t: Term) -> Optional[Term]:
    match t:
        case App(Lam(x, b), a) if is_value(a):
            return subst_value(b, x, a)  # beta
        case App(f, a) if not is_value(f):
            r = _tau(f)  # comp_l
            return None if r is None else App(r, a)
        case App(f, a) if not is_value(a):
            r = _tau(a)  # comp_r
            return None if r is None else App(f, r)
        case Reset(b) if is_value(b):
            return b  # reset
        case Reset(b) if is_stuck(b):
            return _capture(b, ())  # capt_reset
        case Reset(b):
            r = _tau(b)  # comp_reset
            return None if r is None else Reset(r)
    return None


def lts_step(t: Term, label: Label) -> Optional[Term]:
    """The successor of closed ``t`` under ``label``, or ``None``."""
    _closed(t)
    match label:
        case Tau():
            return _tau(t)
        case Arg(v):
            if isinstance(t, Lam):
                return subst_value(t.body, t.var, v)
            return None
        case Ctx(ctx):
            if not is_pure_ctx(ctx):
                raise IllegalInput("context labels must be pure contexts")
            return _capture(t, tuple(ctx)) if is_stuck(t) else None
    raise TypeError(f"not a label: {label!r}")


# -- observations -------------------------------------------------------------

VALUE, STUCK, DIVERGE, UNKNOWN = "value", "stuck", "diverge", "unknown"


@dataclass(frozen=True)
class Observation:
    kind: str
    term: Optional[Term] = None


def enabled_observation(t: Term, fuel: int = 10_000) -> Observation:
    """What a closed term shows after its internal steps."""
    _closed(t)
    out = sem.evaluate(t, sem.DEFAULT, fuel)
    match out:
        case sem.Normal(term=nf, kind=sem.ValueNF()):
            return Observation(VALUE, nf)
        case sem.Normal(term=nf, kind=sem.ControlStuck()):
            return Observation(STUCK, nf)
        case sem.Normal():
            raise AssertionError("closed terms cannot be open-stuck")
        case sem.Diverges():
            return Observation(DIVERGE)
    return Observation(UNKNOWN)


# -- pools ----------------------------------------------------------------------


@dataclass(frozen=True)
class Pool:
    values: tuple
    contexts: tuple  # EvalCtx tuples

    def __post_init__(self):
        for v in self.values:
            if not isinstance(v, Lam) or v.fv or v.fcv:
                raise IllegalInput(f"pool value {print_term(v)} must be a closed abstraction")
        for c in self.contexts:
            if not is_pure_ctx(c) or ctx_fv(c):
                raise IllegalInput(f"pool context {print_ctx(c)} must be closed and pure")
        object.__setattr__(self, "values", _dedup(self.values, term_key))
        object.__setattr__(self, "contexts", _dedup(self.contexts, lambda c: term_key(plug(c, Var(HOLE)))))


def _dedup(items, key) -> tuple:
    seen = {}
    for it in items:
        seen.setdefault(key(it), it)
    return tuple(seen.values())


def term_to_ctx(t: Term) -> EvalCtx:
    """Read a term with one hole ``_`` in evaluation position as a pure context."""
    frames = []
    while t != Var(HOLE):
        match t:
            case App(f, a) if HOLE in f.fv and HOLE not in a.fv:
                frames.append(AppL(a))
                t = f
            case App(f, a) if HOLE in a.fv and HOLE not in f.fv and is_value(f):
                frames.append(AppR(f))
                t = a
            case _:
                raise IllegalInput(f"{print_term(t)} is not a pure evaluation context")
    return tuple(reversed(frames))


def load_pool(text: str, base=None) -> Pool:
    _, sections = parse_sections(text, base, closed=True, hole_sections=("contexts",))
    unknown = set(sections) - {"values", "contexts"}
    if unknown:
        raise IllegalInput(f"unknown pool sections {sorted(unknown)}")
    values = [t for _, t in sections.get("values", [])]
    contexts = [term_to_ctx(t) for _, t in sections.get("contexts", [])]
    return Pool(tuple(values), tuple(contexts))


def default_pool() -> Pool:
    text = resources.files("lamshift").joinpath("data/default.pool").read_text(encoding="utf-8")
    return load_pool(text)


# -- the game ---------------------------------------------------------------------


@dataclass(frozen=True)
class Move:
    label: Label
    left: str  # observation kinds after the move
    right: str


@dataclass(frozen=True)
class Closing:
    """Pool values substituted for the free variables of open inputs."""

    bindings: tuple  # (name, value)


@dataclass(frozen=True)
class Equivalent:
    witness: tuple  # pairs (left, right)
    bounded: bool = True
    verdict = "equivalent"


@dataclass(frozen=True)
class Inequivalent:
    trace: tuple  # Moves; the first is the observation of the inputs (a Tau move)
    closing: Closing
    context: Term  # validated distinguishing context, hole ``_``
    verdict = "inequivalent"


@dataclass(frozen=True)
class Unknown:
    reason: str
    verdict = "unknown"


Verdict = Union[Equivalent, Inequivalent, Unknown]


class SynthesisFailed(RuntimeError):
    """A synthesized context did not separate the terms: an engine bug."""


def _game(t0: Term, t1: Term, pool: Pool, depth: int, fuel: int):
    obs_cache: dict = {}

    def observe(t):
        k = term_key(t)
        if k not in obs_cache:
            obs_cache[k] = enabled_observation(t, fuel)
        return obs_cache[k]

    visited = {}
    queue = deque([(t0, t1, (), TAU)])
    unknown = False
    while queue:
        s0, s1, path, label = queue.popleft()
        key = pair_key(s0, s1)
        if key in visited:
            continue
        visited[key] = (s0, s1)
        o0, o1 = observe(s0), observe(s1)
        here = path + (Move(label, o0.kind, o1.kind),)
        d = len(path)
        if UNKNOWN in (o0.kind, o1.kind):
            unknown = True
            continue
        if o0.kind != o1.kind:
            return "mismatch", here
        if o0.kind == DIVERGE or d >= depth:
            continue
        if o0.kind == VALUE:
            labels = [Arg(v) for v in pool.values]
        else:
            labels = [Ctx(c) for c in pool.contexts]
        for lab in labels:
            n0, n1 = lts_step(o0.term, lab), lts_step(o1.term, lab)
            queue.append((n0, n1, here, lab))
    if unknown:
        return "unknown", None
    return "equivalent", tuple(visited.values())


def _closings(t0: Term, t1: Term, pool: Pool):
    names = sorted(t0.fv | t1.fv)
    if not names:
        yield Closing(())
        return
    if not pool.values:
        raise IllegalInput("open terms need pool values to close them")
    for combo in itertools.product(pool.values, repeat=len(names)):
        yield Closing(tuple(zip(names, combo)))


def _close(t: Term, closing: Closing) -> Term:
    for x, v in closing.bindings:
        t = subst_value(t, x, v)
    return t


def app_bisim_check(t0: Term, t1: Term, pool: Optional[Pool] = None, depth: int = 4, fuel: int = 10_000) -> Verdict:
    """Bounded applicative bisimulation game; open inputs are closed by every
    assignment of pool values to their free variables."""
    require_plain(t0, "app_bisim_check")
    require_plain(t1, "app_bisim_check")
    pool = pool if pool is not None else default_pool()
    witness = []
    unknown = False
    for closing in _closings(t0, t1, pool):
        c0, c1 = _close(t0, closing), _close(t1, closing)
        status, data = _game(c0, c1, pool, depth, fuel)
        if status == "mismatch":
            ctx = synthesize_context(data, closing)
            if not validate_witness(ctx, t0, t1, fuel):
                raise SynthesisFailed(f"context {print_term(ctx)} does not separate the terms")
            return Inequivalent(data, closing, ctx)
        if status == "unknown":
            unknown = True
        else:
            witness.extend(data)
    if unknown:
        return Unknown("fuel")
    return Equivalent(tuple(witness))


def synthesize_context(trace, closing: Closing = Closing(())) -> Term:
    """Compose one context constructor per move, first move innermost.

    ``arg v`` becomes ``_ v`` and ``ctx E`` becomes ``<E[_]>``; open inputs are
    first closed by ``(\\x. _) v``.
    """
    c: Term = Var(HOLE)
    for x, v in reversed(closing.bindings):
        c = App(Lam(x, c), v)
    for mv in trace:
        match mv.label:
            case Arg(v):
                c = App(c, v)
            case Ctx(e):
                c = Reset(plug(e, c))
    return c


def fill(c: Term, t: Term) -> Term:
    """Plug ``t`` into the hole of ``c``; unlike substitution this may capture."""
    match c:
        case Var(n):
            return t if n == HOLE else c
        case Lam(x, b):
            return Lam(x, fill(b, t))
        case Shift(k, b):
            return Shift(k, fill(b, t))
        case App(f, a):
            return App(fill(f, t), fill(a, t))
        case Reset(b):
            return Reset(fill(b, t))
        case CtxApp(a, b):
            return CtxApp(a, fill(b, t))
    raise TypeError(f"not a term: {c!r}")


def validate_witness(c: Term, t0: Term, t1: Term, fuel: int = 10_000) -> bool:
    """True iff ``c`` closes both terms and their observations differ definitely."""
    p0, p1 = fill(c, t0), fill(c, t1)
    if p0.fv or p1.fv:
        return False
    o0, o1 = enabled_observation(p0, fuel), enabled_observation(p1, fuel)
    return UNKNOWN not in (o0.kind, o1.kind) and o0.kind != o1.kind

