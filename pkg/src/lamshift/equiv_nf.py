"""Normal-form bisimulation games.

Three flavors share one engine:

* ``plain``: relaxed semantics, plain calculus;
* ``refined``: captured contexts are merged into shift bodies through a
  fresh context variable;
* ``pure``: the game runs on delimited terms, matching the semantics where
  every program runs under a top-level reset.

The candidate relation is grown from the input pair.  A pair already in the
relation (up to joint renaming) is discharged coinductively, so when the
worklist empties the relation is a bisimulation up to reduction,
reflexivity and shared outer frames.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Union

from lamshift import semantics as sem
from lamshift.printer import print_term
from lamshift.syntax import (
    App,
    AppL,
    AppR,
    CtxApp,
    CtxVarF,
    IllegalInput,
    Lam,
    Reset,
    ResetF,
    Shift,
    Term,
    Var,
    alpha_eq,
    fresh_ctx_var,
    fresh_var,
    is_pure_term,
    is_value,
    pair_key,
    plug,
    rename,
    require_plain,
    subst,
    term_key,
)

PLAIN, REFINED, PURE = "plain", "refined", "pure"
FLAVORS = (PLAIN, REFINED, PURE)
ACTIVE, PASSIVE = "active", "passive"


@dataclass(frozen=True)
class UpToOptions:
    context: bool = True  # strip identical outer frames after active moves
    reduction: bool = True  # relate pairs up to evaluation


@dataclass(frozen=True)
class Obligation:
    left: Term
    right: Term
    polarity: str = ACTIVE
    via: str = "input"


@dataclass(frozen=True)
class Mismatch:
    reason: str


@dataclass(frozen=True)
class Obligations:
    items: tuple


@dataclass(frozen=True)
class WitnessPair:
    left: Term
    right: Term
    via: str


@dataclass(frozen=True)
class TraceStep:
    obligation: Obligation
    left_nf: Optional[Term] = None
    right_nf: Optional[Term] = None


@dataclass(frozen=True)
class Equivalent:
    witness: tuple
    verdict = "equivalent"


@dataclass(frozen=True)
class Inequivalent:
    trace: tuple  # TraceSteps from the input pair down to the mismatch
    reason: str
    verdict = "inequivalent"


@dataclass(frozen=True)
class Unknown:
    reason: str  # "fuel" or "depth"
    verdict = "unknown"


Verdict = Union[Equivalent, Inequivalent, Unknown]


def flavor_mode(flavor: str) -> sem.SemMode:
    if flavor == PLAIN:
        return sem.DEFAULT
    if flavor in (REFINED, PURE):
        return sem.EXTENDED_MODE
    raise ValueError(f"unknown flavor {flavor!r}")


def _fresh_names(t0: Term, t1: Term):
    fv = t0.fv | t1.fv
    fcv = t0.fcv | t1.fcv
    return fv, fcv


def _pure_value_obligation(v0: Term, v1: Term, via: str, polarity: str, flavor: str) -> Obligation:
    fv, fcv = _fresh_names(v0, v1)
    x = fresh_var(fv, "x")
    l, r = App(v0, Var(x)), App(v1, Var(x))
    if flavor == PURE:
        a = fresh_ctx_var(fcv, "a")
        l, r = CtxApp(a, l), CtxApp(a, r)
    return Obligation(l, r, polarity, via)


def _ctx_obligations(f0, f1, hole_avoid, via) -> Union[Mismatch, list]:
    z = Var(fresh_var(hole_avoid, "z"))
    s0, s1 = sem.ctx_split(f0), sem.ctx_split(f1)
    match s0, s1:
        case sem.PureOnly(e0), sem.PureOnly(e1):
            return [Obligation(plug(e0, z), plug(e1, z), ACTIVE, via + "/ctx")]
        case sem.Split(o0, d0), sem.Split(o1, d1):
            return [
                Obligation(plug(d0, z), plug(d1, z), ACTIVE, via + "/delimited"),
                Obligation(plug(o0, z), plug(o1, z), ACTIVE, via + "/outer"),
            ]
    return Mismatch("a pure context against a delimited one")


def expand_pair(t0: Term, t1: Term, flavor: str) -> Union[Mismatch, Obligations]:
    """One game move on a pair of normal forms."""
    mode = flavor_mode(flavor)
    d0, d1 = sem.decompose(t0, mode), sem.decompose(t1, mode)
    if not isinstance(d0, sem.NormalForm) or not isinstance(d1, sem.NormalForm):
        raise IllegalInput("expand_pair expects normal forms")
    n0, n1 = d0.kind, d1.kind
    if type(n0) is not type(n1):
        return Mismatch(f"{n0.name} against {n1.name}")
    fv, fcv = _fresh_names(t0, t1)
    match n0, n1:
        case sem.ValueNF(v0), sem.ValueNF(v1):
            return Obligations((_pure_value_obligation(v0, v1, "value", PASSIVE, flavor),))
        case sem.OpenStuck(f0, x0, a0), sem.OpenStuck(f1, x1, a1):
            if x0 != x1:
                return Mismatch(f"head variables {x0} and {x1} differ")
            obs = [_pure_value_obligation(a0, a1, "open/arg", ACTIVE, flavor)]
            ctx = _ctx_obligations(f0, f1, fv, "open")
            if isinstance(ctx, Mismatch):
                return ctx
            return Obligations(tuple(obs + ctx))
        case sem.ControlStuck(e0, k0, b0), sem.ControlStuck(e1, k1, b1):
            if flavor == PURE:
                raise AssertionError("control-stuck term in the pure game")
            if flavor == PLAIN:
                k = fresh_var(fv | b0.fv | b1.fv, "k")
                b0, b1 = rename(b0, k0, k), rename(b1, k1, k)
                z = Var(fresh_var(fv, "z"))
                return Obligations(
                    (
                        Obligation(plug(e0, z), plug(e1, z), ACTIVE, "control/ctx"),
                        Obligation(Reset(b0), Reset(b1), ACTIVE, "control/body"),
                    )
                )
            a = fresh_ctx_var(fcv, "a")
            x = fresh_var(fv, "x")
            c0 = Lam(x, CtxApp(a, plug(e0, Var(x))))
            c1 = Lam(x, CtxApp(a, plug(e1, Var(x))))
            return Obligations(
                (Obligation(Reset(subst(b0, k0, c0)), Reset(subst(b1, k1, c1)), ACTIVE, "control/merged"),)
            )
        case sem.ContextStuck(f0, a0, v0), sem.ContextStuck(f1, a1, v1):
            if a0 != a1:
                return Mismatch(f"context variables {a0} and {a1} differ")
            z = Var(fresh_var(fv, "z"))
            return Obligations(
                (
                    Obligation(plug(f0, Reset(z)), plug(f1, Reset(z)), ACTIVE, "context/ctx"),
                    _pure_value_obligation(v0, v1, "context/value", PASSIVE, flavor),
                )
            )
    raise AssertionError("unreachable")


# -- up-to normalization --------------------------------------------------------


def _outer_frame(t: Term):
    """The outermost evaluation frame of ``t`` and the term in its hole."""
    match t:
        case App(f, a) if not is_value(f):
            return AppL(a), f
        case App(f, a) if not is_value(a):
            return AppR(f), a
        case Reset(b) if not is_value(b):
            return ResetF(), b
        case CtxApp(c, b) if not is_value(b):
            return CtxVarF(c), b
    return None, None


def _same_frame(f0, f1) -> bool:
    match f0, f1:
        case (AppL(a), AppL(b)) | (AppR(a), AppR(b)):
            return alpha_eq(a, b)
        case ResetF(), ResetF():
            return True
        case CtxVarF(a), CtxVarF(b):
            return a == b
    return False


def strip_shared_frames(t0: Term, t1: Term, flavor: str) -> tuple[Term, Term, int]:
    """Remove identical outermost frames; pure-flavor results stay pure."""
    stripped = 0
    while True:
        f0, s0 = _outer_frame(t0)
        f1, s1 = _outer_frame(t1)
        if f0 is None or f1 is None or not _same_frame(f0, f1):
            return t0, t1, stripped
        if flavor == PURE and not (is_pure_term(s0) and is_pure_term(s1)):
            return t0, t1, stripped
        t0, t1 = s0, s1
        stripped += 1


@dataclass
class Normalized:
    status: str  # "ok", "discharged", "diverge-mismatch", "unknown"
    left: Optional[Term] = None
    right: Optional[Term] = None
    stripped: int = 0
    note: str = ""


class Evaluator:
    """Evaluation with a per-check cache."""

    def __init__(self, mode: sem.SemMode, fuel: int):
        self.mode = mode
        self.fuel = fuel
        self.cache: dict = {}

    def __call__(self, t: Term) -> sem.EvalOutcome:
        key = term_key(t)
        out = self.cache.get(key)
        if out is None:
            out = sem.evaluate(t, self.mode, self.fuel)
            self.cache[key] = out
        return out


def upto_normalize(ob: Obligation, opts: UpToOptions, flavor: str, evaluator: Evaluator) -> Normalized:
    """Reduce both sides, discharge by reflexivity, and strip shared frames
    (the latter after active moves only).

    The returned sides are always normal forms, since game moves are played
    on normal forms; ``opts.reduction`` only decides whether the relation is
    kept up to reduction, which the caller handles.
    """
    l, r = ob.left, ob.right
    if alpha_eq(l, r):
        return Normalized("discharged", l, r, note="refl")
    o0, o1 = evaluator(l), evaluator(r)
    if isinstance(o0, sem.FuelExhausted) or isinstance(o1, sem.FuelExhausted):
        return Normalized("unknown", l, r, note="fuel")
    if isinstance(o0, sem.Diverges) and isinstance(o1, sem.Diverges):
        return Normalized("discharged", l, r, note="both diverge")
    if isinstance(o0, sem.Diverges) or isinstance(o1, sem.Diverges):
        side = "left" if isinstance(o0, sem.Diverges) else "right"
        return Normalized("diverge-mismatch", l, r, note=f"only the {side} side diverges")
    l, r = o0.term, o1.term
    if opts.reduction and alpha_eq(l, r):
        return Normalized("discharged", l, r, note="refl after reduction")
    stripped = 0
    if ob.polarity == ACTIVE and opts.context and opts.reduction:
        l, r, stripped = strip_shared_frames(l, r, flavor)
        if stripped and alpha_eq(l, r):
            return Normalized("discharged", l, r, stripped, note="refl after stripping")
    return Normalized("ok", l, r, stripped)


# -- the game -----------------------------------------------------------------


@dataclass
class _Node:
    ob: Obligation
    depth: int
    parent: Optional["_Node"]
    tainted: bool  # some ancestor (or this node) was frame-stripped
    nf: Optional[Normalized] = None


@dataclass
class GameStats:
    pairs: int = 0
    evaluations: int = 0
    unknown: list = field(default_factory=list)


def _entry(t0: Term, t1: Term, flavor: str) -> tuple[Term, Term]:
    if flavor == PLAIN:
        require_plain(t0, "the plain game")
        require_plain(t1, "the plain game")
        return t0, t1
    if flavor == PURE and not (is_pure_term(t0) and is_pure_term(t1)):
        a = fresh_ctx_var(t0.fcv | t1.fcv, "a")
        return CtxApp(a, t0), CtxApp(a, t1)
    return t0, t1


def _trace(node: _Node) -> tuple:
    out = []
    while node is not None:
        nf = node.nf
        out.append(TraceStep(node.ob, nf.left if nf else None, nf.right if nf else None))
        node = node.parent
    return tuple(reversed(out))


def _game(t0, t1, flavor, depth, fuel, opts, max_pairs):
    evaluator = Evaluator(flavor_mode(flavor), fuel)
    t0, t1 = _entry(t0, t1, flavor)
    visited: dict = {}
    queue = deque([_Node(Obligation(t0, t1, ACTIVE, "input"), 0, None, False)])
    unknown = None
    while queue:
        node = queue.popleft()
        ob = node.ob
        raw_key = pair_key(ob.left, ob.right)
        if raw_key in visited:
            continue
        nf = upto_normalize(ob, opts, flavor, evaluator)
        node.nf = nf
        if nf.stripped:
            node.tainted = True
        if nf.status == "discharged":
            if node.parent is None:
                visited[raw_key] = WitnessPair(ob.left, ob.right, nf.note)
            continue
        if nf.status == "unknown":
            unknown = unknown or "fuel"
            continue
        if nf.status == "diverge-mismatch":
            return Inequivalent(_trace(node), nf.note), node.tainted
        key = pair_key(nf.left, nf.right) if opts.reduction else raw_key
        if key in visited:
            continue
        if node.depth >= depth:
            unknown = unknown or "depth"
            continue
        if len(visited) >= max_pairs:
            unknown = unknown or "depth"
            continue
        if opts.reduction:
            visited[key] = WitnessPair(nf.left, nf.right, ob.via)
        else:
            visited[key] = WitnessPair(ob.left, ob.right, ob.via)
        moves = expand_pair(nf.left, nf.right, flavor)
        if isinstance(moves, Mismatch):
            return Inequivalent(_trace(node), moves.reason), node.tainted
        for child in moves.items:
            queue.append(_Node(child, node.depth + 1, node, node.tainted))
    if unknown:
        return Unknown(unknown), False
    return Equivalent(tuple(visited.values())), False


def nf_bisim_check(
    t0: Term,
    t1: Term,
    flavor: str = PLAIN,
    depth: int = 64,
    fuel: int = 10_000,
    opts: UpToOptions = UpToOptions(),
    max_pairs: int = 20_000,
) -> Verdict:
    """Play the normal-form bisimulation game on ``t0`` and ``t1``.

    ``Equivalent`` carries the relation built (a bisimulation up to the
    enabled techniques), ``Inequivalent`` the chain of obligations leading
    to a mismatch, ``Unknown`` says which budget ran out.
    """
    flavor_mode(flavor)
    verdict, tainted = _game(t0, t1, flavor, depth, fuel, opts, max_pairs)
    if isinstance(verdict, Inequivalent) and tainted:
        # a mismatch below a stripped frame does not refute the original pair
        verdict, _ = _game(t0, t1, flavor, depth, fuel, UpToOptions(False, opts.reduction), max_pairs)
    return verdict


def witness_relation(verdict: Verdict) -> list[str]:
    if not isinstance(verdict, Equivalent):
        raise ValueError("a witness relation exists only for equivalent verdicts")
    return [f"{print_term(p.left)}  ~  {print_term(p.right)}    [{p.via}]" for p in verdict.witness]


def check_witness(verdict: Equivalent, flavor: str, fuel: int = 10_000, opts: UpToOptions = UpToOptions()) -> bool:
    """Re-expand every witness pair; each obligation must be discharged by
    reduction, reflexivity, stripping, or membership in the witness."""
    evaluator = Evaluator(flavor_mode(flavor), fuel)
    bare = UpToOptions(False, opts.reduction)

    def key(ob, nf):
        return pair_key(nf.left, nf.right) if opts.reduction else pair_key(ob.left, ob.right)

    keys = set()
    for p in verdict.witness:
        ob = Obligation(p.left, p.right, PASSIVE, p.via)
        keys.add(key(ob, upto_normalize(ob, bare, flavor, evaluator)) if opts.reduction else key(ob, None))
    for p in verdict.witness:
        nf = upto_normalize(Obligation(p.left, p.right, PASSIVE), bare, flavor, evaluator)
        if nf.status == "discharged":
            continue
        if nf.status != "ok":
            return False
        moves = expand_pair(nf.left, nf.right, flavor)
        if isinstance(moves, Mismatch):
            return False
        for ob in moves.items:
            if pair_key(ob.left, ob.right) in keys:
                continue
            nf = upto_normalize(ob, opts, flavor, evaluator)
            if nf.status == "discharged":
                continue
            if nf.status != "ok" or key(ob, nf) not in keys:
                return False
    return True


def replay_trace(verdict: Inequivalent, flavor: str, fuel: int = 10_000, opts: UpToOptions = UpToOptions(False)) -> bool:
    """Re-run the recorded chain and confirm it ends in the recorded mismatch."""
    evaluator = Evaluator(flavor_mode(flavor), fuel)
    steps = verdict.trace
    for i, st in enumerate(steps):
        nf = upto_normalize(st.obligation, opts, flavor, evaluator)
        last = i == len(steps) - 1
        if nf.status == "diverge-mismatch":
            return last and nf.note == verdict.reason
        if nf.status != "ok":
            return False
        moves = expand_pair(nf.left, nf.right, flavor)
        if isinstance(moves, Mismatch):
            return last and moves.reason == verdict.reason
        if last:
            return False
        nxt = steps[i + 1].obligation
        if not any(alpha_eq(o.left, nxt.left) and alpha_eq(o.right, nxt.right) for o in moves.items):
            return False
    return False
