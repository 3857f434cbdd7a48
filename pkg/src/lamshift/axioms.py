"""The eight equational axioms and a bounded derivation search.

Axioms are closed under congruence, so every rewrite is applied at a
subterm position given as a child-index string (``""`` is the root, ``0``
the function or body, ``1`` the argument).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator, Union

from lamshift.semantics import split_shift
from lamshift.syntax import (
    App,
    AppL,
    AppR,
    EvalCtx,
    IllegalInput,
    Lam,
    Reset,
    Shift,
    Term,
    Var,
    alpha_eq,
    ctx_fv,
    fresh_var,
    is_value,
    plug,
    positions,
    replace_at,
    require_plain,
    subst,
    term_key,
)
from lamshift.syntax import _nameless

AXIOMS = (
    "beta_v",
    "beta_Omega",
    "reset_shift",
    "reset_lift",
    "reset_value",
    "shift_reset",
    "eta_v",
    "shift_elim",
)
FWD, BWD = "fwd", "bwd"
ARROW = {FWD: "→", BWD: "←"}


def flip(direction: str) -> str:
    return BWD if direction == FWD else FWD


@dataclass(frozen=True)
class Rewrite:
    term: Term
    axiom: str
    direction: str
    path: str


def pure_decompositions(t: Term) -> Iterator[tuple[EvalCtx, Term]]:
    """Every split ``t = E[s]`` with ``E`` a pure context (innermost-first frames)."""
    yield (), t
    if isinstance(t, App):
        for ctx, s in pure_decompositions(t.fun):
            yield ctx + (AppL(t.arg),), s
        if is_value(t.fun):
            for ctx, s in pure_decompositions(t.arg):
                yield ctx + (AppR(t.fun),), s


def _local_rewrites(s: Term) -> Iterator[tuple[Term, str, str]]:
    """Axiom instances rooted at ``s``."""

    def fresh(base):
        # new binders only need to avoid the free names they scope over
        return fresh_var(s.fv, base)

    match s:
        case App(Lam(x, body), arg):
            if is_value(arg):
                yield subst(body, x, arg), "beta_v", FWD
            for ctx, hole in pure_decompositions(body):
                if hole == Var(x) and x not in ctx_fv(ctx):
                    yield plug(ctx, arg), "beta_Omega", FWD
    match s:
        case Reset(body) if not is_value(body):
            try:
                e, sh = split_shift(body)
            except IllegalInput:
                pass
            else:
                x = fresh_var(body.fv, "x")
                k_val = Lam(x, Reset(plug(e, Var(x))))
                yield Reset(subst(sh.body, sh.var, k_val)), "reset_shift", FWD
    match s:
        case Reset(App(Lam(x, t0), Reset() as t1)):
            yield App(Lam(x, Reset(t0)), t1), "reset_lift", FWD
        case App(Lam(x, Reset(t0)), Reset() as t1):
            yield Reset(App(Lam(x, t0), t1)), "reset_lift", BWD
    match s:
        case Reset(v) if is_value(v):
            yield v, "reset_value", FWD
    if is_value(s):
        yield Reset(s), "reset_value", BWD
    match s:
        case Shift(k, Reset(b)):
            yield Shift(k, b), "shift_reset", FWD
        case Shift(k, b):
            yield Shift(k, Reset(b)), "shift_reset", BWD
    match s:
        case Lam(x, App(v, Var(y))) if y == x and is_value(v) and x not in v.fv:
            yield v, "eta_v", FWD
    if is_value(s):
        x = fresh("x")
        yield Lam(x, App(s, Var(x))), "eta_v", BWD
    match s:
        case Shift(k, App(Var(k2), b)) if k2 == k and k not in b.fv:
            yield b, "shift_elim", FWD
    k = fresh("k")
    yield Shift(k, App(Var(k), s)), "shift_elim", BWD
    # (λx.E[x]) t from E[t]; the empty context is left out, see derive_axiom_eq
    for ctx, sub in pure_decompositions(s):
        if ctx:
            x = fresh("x")
            yield App(Lam(x, plug(ctx, Var(x))), sub), "beta_Omega", BWD


def axiom_rewrites(t: Term, max_size: int | None = None) -> list[Rewrite]:
    """All single axiom applications at every position of ``t``.

    Backward ``beta_v`` and ``reset_shift`` (which would have to guess an
    anti-substitution) are not generated; the search reaches them by
    rewriting forward from the other side.  Results larger than
    ``max_size`` are dropped.
    """
    require_plain(t, "axiom_rewrites")
    out = []
    for path, s in positions(t):
        for new, ax, d in _local_rewrites(s):
            if max_size is None or t.size - s.size + new.size <= max_size:
                out.append(Rewrite(replace_at(t, path, new), ax, d, path))
    return out


# -- derivations ------------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    path: str
    axiom: str
    direction: str
    result: Term

    def __str__(self):
        return f"{self.axiom}@{self.path or 'ε'} ({ARROW[self.direction]})"


@dataclass(frozen=True)
class Derived:
    start: Term
    steps: tuple
    expanded: int

    verdict = "derived"

    def lines(self) -> list[str]:
        return [f"{i}: {s}" for i, s in enumerate(self.steps, 1)]


@dataclass(frozen=True)
class NotFound:
    expanded: int

    verdict = "not-derived"


def _is_instance(src: Term, step: Step) -> bool:
    return any(
        r.path == step.path and r.axiom == step.axiom and r.direction == step.direction and alpha_eq(r.term, step.result)
        for r in axiom_rewrites(src)
    )


def check_step(src: Term, step: Step) -> bool:
    """``src = step.result`` by one instance of the axiom, in either orientation."""
    if _is_instance(src, step):
        return True
    back = Step(step.path, step.axiom, flip(step.direction), src)
    return _is_instance(step.result, back)


def replay(d: Derived) -> Term:
    """Check every step and return the final term."""
    cur = d.start
    for st in d.steps:
        if not check_step(cur, st):
            raise ValueError(f"step {st} does not apply")
        cur = st.result
    return cur


SIZE_SLACK = 8


def _sites(t: Term):
    """Preorder ``(path, subterm, env, depth, index)``; ``index`` is the
    subterm's offset in ``term_key(t)``, which has one token per node."""
    stack = [("", t, {}, 0)]
    index = 0
    while stack:
        path, s, env, depth = stack.pop()
        yield path, s, env, depth, index
        index += 1
        match s:
            case Lam(x, b) | Shift(x, b):
                stack.append((path + "0", b, {**env, x: depth + 1}, depth + 1))
            case App(f, a):
                stack.append((path + "1", a, env, depth))
                stack.append((path + "0", f, env, depth))
            case Reset(b):
                stack.append((path + "0", b, env, depth))


def _key_in(s: Term, env: dict, depth: int) -> tuple:
    out: list = []
    _nameless(s, out, dict(env), depth, None, None)
    return tuple(out)


def derive_axiom_eq(t0: Term, t1: Term, budget: int = 50_000, max_size: int | None = None) -> Union[Derived, NotFound]:
    """Bidirectional breadth-first search for an equational derivation.

    ``budget`` bounds node expansions.  Terms larger than ``max_size``
    (default: the larger input plus a small slack) are not explored, which
    keeps the backward rules from growing terms without end.
    """
    require_plain(t0, "derive_axiom_eq")
    require_plain(t1, "derive_axiom_eq")
    if alpha_eq(t0, t1):
        return Derived(t0, (), 0)
    cap = max_size if max_size is not None else max(t0.size, t1.size) + SIZE_SLACK
    k0, k1 = term_key(t0), term_key(t1)
    # key -> [term or None, parent key, (path, axiom, direction), new subterm]
    seen = ({k0: [t0, None, None, None]}, {k1: [t1, None, None, None]})
    queues = (deque([k0]), deque([k1]))
    expanded = 0
    while expanded < budget and (queues[0] or queues[1]):
        side = 0 if queues[0] and (not queues[1] or len(queues[0]) <= len(queues[1])) else 1
        mine, other = seen[side], seen[1 - side]
        key = queues[side].popleft()
        term = _materialize(mine, key)
        expanded += 1
        for path, s, env, depth, i in _sites(term):
            for new, ax, d in _local_rewrites(s):
                if term.size - s.size + new.size > cap:
                    continue
                nk = key[:i] + _key_in(new, env, depth) + key[i + s.size :]
                if nk in mine:
                    continue
                mine[nk] = [None, key, (path, ax, d), new]
                if nk in other:
                    for table in seen:
                        _materialize_chain(table, nk)
                    return Derived(t0, _join(seen, nk), expanded)
                queues[side].append(nk)
    return NotFound(expanded)


def _materialize(table: dict, key) -> Term:
    entry = table[key]
    if entry[0] is None:
        parent = table[entry[1]][0]  # parents are expanded, hence materialized
        entry[0] = replace_at(parent, entry[2][0], entry[3])
    return entry[0]


def _materialize_chain(table: dict, key) -> None:
    chain = []
    while key is not None:
        chain.append(key)
        key = table[key][1]
    for k in reversed(chain):
        _materialize(table, k)


def _chain(table: dict, key) -> list:
    # [(term, move from parent)] from the root to key
    out = []
    while key is not None:
        term, parent, move, _ = table[key]
        out.append((term, move))
        key = parent
    return out[::-1]


def _join(seen, meet) -> tuple:
    left, right = _chain(seen[0], meet), _chain(seen[1], meet)
    steps = [Step(p, ax, d, term) for term, (p, ax, d) in (x for x in left[1:])]
    # right chain runs t1 -> meet; walk it backwards with flipped orientation
    for i in range(len(right) - 1, 0, -1):
        p, ax, d = right[i][1]
        steps.append(Step(p, ax, flip(d), right[i - 1][0]))
    return tuple(steps)
