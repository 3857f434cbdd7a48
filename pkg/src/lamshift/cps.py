"""Two-layer CPS translation, beta-eta normalization and CPS equivalence.

The image of the translation is a plain lambda term: no shift, reset or
context application.  Every translated term takes a continuation ``k1`` and
a metacontinuation ``k2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from lamshift import semantics
from lamshift.syntax import (
    App,
    CtxApp,
    IllegalInput,
    Lam,
    NameSupply,
    Reset,
    Shift,
    Term,
    Var,
    all_names,
    apps,
    lams,
    require_plain,
    subst,
    term_key,
)

YES, NO, UNKNOWN = "yes", "no", "unknown"


def kappa_init() -> Term:
    """The initial delimited continuation ``\\x k2. k2 x``."""
    return Lam("x", Lam("k2", App(Var("k2"), Var("x"))))


def is_lambda_term(t: Term) -> bool:
    stack = [t]
    while stack:
        s = stack.pop()
        match s:
            case Shift() | Reset() | CtxApp():
                return False
            case App(f, a):
                stack += [f, a]
            case Lam(_, b):
                stack.append(b)
    return True


def cps_translate(t: Term) -> Term:
    """Translate a plain term; fresh binders avoid every name of ``t``."""
    require_plain(t, "cps_translate")
    names = NameSupply(all_names(t))
    return _cps(t, names)


def _cps(t: Term, ns: NameSupply) -> Term:
    k1, k2 = ns.fresh("k"), ns.fresh("k")
    match t:
        case Var():
            return lams([k1, k2], apps(Var(k1), t, Var(k2)))
        case Lam(x, b):
            return lams([k1, k2], apps(Var(k1), Lam(x, _cps(b, ns)), Var(k2)))
        case App(f, a):
            x0, x1, k2a, k2b = ns.fresh("x"), ns.fresh("x"), ns.fresh("k"), ns.fresh("k")
            inner = lams([x1, k2b], apps(Var(x0), Var(x1), Var(k1), Var(k2b)))
            outer = lams([x0, k2a], apps(_cps(a, ns), inner, Var(k2a)))
            return lams([k1, k2], apps(_cps(f, ns), outer, Var(k2)))
        case Reset(b):
            x = ns.fresh("x")
            meta = Lam(x, apps(Var(k1), Var(x), Var(k2)))
            return lams([k1, k2], apps(_cps(b, ns), kappa_init(), meta))
        case Shift(k, b):
            x1, x2, k1b, k2b = ns.fresh("x"), ns.fresh("x"), ns.fresh("k"), ns.fresh("k")
            cont = lams(
                [x1, k1b, k2b],
                apps(Var(k1), Var(x1), Lam(x2, apps(Var(k1b), Var(x2), Var(k2b)))),
            )
            body = subst(_cps(b, ns), k, cont)
            return lams([k1, k2], apps(body, kappa_init(), Var(k2)))
    raise IllegalInput(f"cannot translate {t!r}")


# -- beta-eta normalization ------------------------------------------------------


@dataclass(frozen=True)
class Normalized:
    term: Term
    steps: int


@dataclass(frozen=True)
class NoNormalForm:
    """Fuel ran out, or a reduct recurred so no normal form is reachable this way."""

    last: Term
    steps: int
    cyclic: bool = False


def _beta_step(t: Term) -> Optional[Term]:
    # leftmost-outermost redex
    match t:
        case App(Lam(x, b), a):
            return subst(b, x, a)
        case App(f, a):
            r = _beta_step(f)
            if r is not None:
                return App(r, a)
            r = _beta_step(a)
            return None if r is None else App(f, r)
        case Lam(x, b):
            r = _beta_step(b)
            return None if r is None else Lam(x, r)
    return None


def _eta(t: Term) -> Term:
    match t:
        case Lam(x, b):
            b = _eta(b)
            if isinstance(b, App) and b.arg == Var(x) and x not in b.fun.fv:
                return b.fun
            return Lam(x, b)
        case App(f, a):
            return App(_eta(f), _eta(a))
    return t


def beta_eta_normalize(t: Term, fuel: int = 20_000) -> Union[Normalized, NoNormalForm]:
    """Normal-order beta to normal form, then eta contraction, to a fixed point.

    ``fuel`` bounds the number of beta steps.
    """
    if not is_lambda_term(t):
        raise IllegalInput("beta_eta_normalize expects a pure lambda term")
    # Brent's cycle detection: compare against a checkpoint moved at powers
    # of two; keys are only built when sizes agree
    mark, mark_key, power, since = t, None, 1, 0
    steps = 0
    while True:
        r = _beta_step(t)
        if r is None:
            e = _eta(t)
            if e == t:
                return Normalized(t, steps)
            t = e
            mark, mark_key, power, since = t, None, 1, 0
            continue
        if steps >= fuel:
            return NoNormalForm(t, steps)
        steps += 1
        t = r
        if t.size == mark.size:
            if mark_key is None:
                mark_key = term_key(mark)
            if term_key(t) == mark_key:
                return NoNormalForm(t, steps, cyclic=True)
        since += 1
        if since == power:
            mark, mark_key, power, since = t, None, power * 2, 0


def lambda_equiv(l0: Term, l1: Term, fuel: int = 20_000) -> str:
    """Decide beta-eta convertibility of two lambda terms when both normalize."""
    n0 = beta_eta_normalize(l0, fuel)
    n1 = beta_eta_normalize(l1, fuel)
    if isinstance(n0, Normalized) and isinstance(n1, Normalized):
        return YES if term_key(n0.term) == term_key(n1.term) else NO
    return UNKNOWN


def cps_equiv(t0: Term, t1: Term, fuel: int = 20_000) -> str:
    """``yes`` / ``no`` / ``unknown`` for beta-eta convertibility of the CPS images."""
    return lambda_equiv(cps_translate(t0), cps_translate(t1), fuel)


def run_cps(t: Term, fuel: int = 20_000) -> semantics.EvalOutcome:
    """Run the CPS image with the initial continuation and the identity metacontinuation."""
    prog = apps(cps_translate(t), kappa_init(), Lam("x", Var("x")))
    return semantics.evaluate(prog, semantics.DEFAULT, fuel)
