"""Terms and evaluation contexts of the lambda-calculus with shift and reset.

Terms are immutable dataclasses.  Variables are plain strings; binders keep
their names and alpha-equivalence is decided on a nameless encoding.  Every
node caches its free value variables (``fv``), free context variables
(``fcv``) and size, so substitution can skip untouched subterms cheaply.

Evaluation contexts are tuples of frames stored innermost-first.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Union


class Term:
    """Base class of all term nodes."""

    __slots__ = ()

    fv: frozenset
    fcv: frozenset
    size: int

    def __str__(self) -> str:
        from lamshift.printer import print_term

        return print_term(self)


def _init(node, fv, fcv, size):
    object.__setattr__(node, "fv", fv)
    object.__setattr__(node, "fcv", fcv)
    object.__setattr__(node, "size", size)


_EMPTY: frozenset = frozenset()


@dataclass(frozen=True, repr=False)
class Var(Term):
    name: str
    fv: frozenset = field(init=False, compare=False, repr=False)
    fcv: frozenset = field(init=False, compare=False, repr=False)
    size: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        _init(self, frozenset((self.name,)), _EMPTY, 1)

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, repr=False)
class Lam(Term):
    var: str
    body: Term
    fv: frozenset = field(init=False, compare=False, repr=False)
    fcv: frozenset = field(init=False, compare=False, repr=False)
    size: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        b = self.body
        fv = b.fv - {self.var} if self.var in b.fv else b.fv
        _init(self, fv, b.fcv, b.size + 1)

    def __repr__(self):
        return f"Lam({self.var!r}, {self.body!r})"


@dataclass(frozen=True, repr=False)
class App(Term):
    fun: Term
    arg: Term
    fv: frozenset = field(init=False, compare=False, repr=False)
    fcv: frozenset = field(init=False, compare=False, repr=False)
    size: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        f, a = self.fun, self.arg
        _init(self, f.fv | a.fv, f.fcv | a.fcv, f.size + a.size + 1)

    def __repr__(self):
        return f"App({self.fun!r}, {self.arg!r})"


@dataclass(frozen=True, repr=False)
class Shift(Term):
    var: str
    body: Term
    fv: frozenset = field(init=False, compare=False, repr=False)
    fcv: frozenset = field(init=False, compare=False, repr=False)
    size: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        b = self.body
        fv = b.fv - {self.var} if self.var in b.fv else b.fv
        _init(self, fv, b.fcv, b.size + 1)

    def __repr__(self):
        return f"Shift({self.var!r}, {self.body!r})"


@dataclass(frozen=True, repr=False)
class Reset(Term):
    body: Term
    fv: frozenset = field(init=False, compare=False, repr=False)
    fcv: frozenset = field(init=False, compare=False, repr=False)
    size: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        b = self.body
        _init(self, b.fv, b.fcv, b.size + 1)

    def __repr__(self):
        return f"Reset({self.body!r})"


@dataclass(frozen=True, repr=False)
class CtxApp(Term):
    """``<a>t``: a term delimited by the unknown delimited context ``a``."""

    cvar: str
    body: Term
    fv: frozenset = field(init=False, compare=False, repr=False)
    fcv: frozenset = field(init=False, compare=False, repr=False)
    size: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        b = self.body
        _init(self, b.fv, b.fcv | {self.cvar}, b.size + 1)

    def __repr__(self):
        return f"CtxApp({self.cvar!r}, {self.body!r})"


Value = Union[Var, Lam]


class IllegalInput(ValueError):
    """A term is outside the fragment an operation accepts."""


def is_value(t: Term) -> bool:
    return isinstance(t, (Var, Lam))


def is_plain(t: Term) -> bool:
    """True when ``t`` contains no context-variable application."""
    # context variables have no binders, so fcv is empty iff no CtxApp occurs
    return not t.fcv


def require_plain(t: Term, what: str = "operation") -> None:
    if not is_plain(t):
        raise IllegalInput(f"{what} expects a plain term, got context variables {sorted(t.fcv)}")


def is_pure_term(t: Term) -> bool:
    """Pure terms: values, delimited terms ``<t>`` and ``<a>t``."""
    return isinstance(t, (Var, Lam, Reset, CtxApp))


def free_vars(t: Term) -> tuple[frozenset, frozenset]:
    """Free value variables and free context variables of ``t``."""
    return t.fv, t.fcv


def all_names(t: Term) -> set:
    """Every value-variable name occurring in ``t``, bound or free."""
    out: set = set()
    stack = [t]
    while stack:
        s = stack.pop()
        match s:
            case Var(name):
                out.add(name)
            case Lam(x, b) | Shift(x, b):
                out.add(x)
                stack.append(b)
            case App(f, a):
                stack.append(f)
                stack.append(a)
            case Reset(b) | CtxApp(_, b):
                stack.append(b)
    return out


# -- fresh names -------------------------------------------------------------

_TRAILING = re.compile(r"[0-9']+$")


def _base(name: str) -> str:
    return _TRAILING.sub("", name) or "x"


def fresh_var(avoid: Iterable[str], base: str = "x") -> str:
    """Least-numbered ``base<n>`` not in ``avoid``; deterministic."""
    avoid = avoid if isinstance(avoid, (set, frozenset)) else set(avoid)
    base = _base(base)
    n = 0
    while f"{base}{n}" in avoid:
        n += 1
    return f"{base}{n}"


def fresh_ctx_var(avoid: Iterable[str], base: str = "a") -> str:
    return fresh_var(avoid, base)


class NameSupply:
    """Hands out distinct fresh names, never repeating within one session."""

    def __init__(self, avoid: Iterable[str] = ()):
        self.used = set(avoid)

    def fresh(self, base: str = "x") -> str:
        name = fresh_var(self.used, base)
        self.used.add(name)
        return name

    def avoid(self, names: Iterable[str]) -> None:
        self.used.update(names)


# -- substitution ------------------------------------------------------------


def subst(t: Term, x: str, s: Term) -> Term:
    """Capture-avoiding ``t{s/x}`` for an arbitrary term ``s``."""
    if x not in t.fv:
        return t
    return _subst(t, x, s)


def _subst(t: Term, x: str, s: Term) -> Term:
    if x not in t.fv:
        return t
    match t:
        case Var():
            return s
        case App(f, a):
            return App(_subst(f, x, s), _subst(a, x, s))
        case Lam(y, b) | Shift(y, b):
            if y in s.fv:
                y2 = fresh_var(s.fv | b.fv | {x}, y)
                b = _subst(b, y, Var(y2))
                y = y2
            return type(t)(y, _subst(b, x, s))
        case Reset(b):
            return Reset(_subst(b, x, s))
        case CtxApp(a, b):
            return CtxApp(a, _subst(b, x, s))
    raise TypeError(f"not a term: {t!r}")


def subst_value(t: Term, x: str, v: Term) -> Term:
    """``t{v/x}``; the call-by-value rules only ever substitute values."""
    if not is_value(v):
        raise IllegalInput("subst_value expects a value")
    return subst(t, x, v)


def subst_term(t: Term, x: str, s: Term) -> Term:
    """``t{s/x}`` for any term ``s`` (call-by-name beta, CPS images)."""
    return subst(t, x, s)


def rename(t: Term, x: str, y: str) -> Term:
    return subst(t, x, Var(y))


# -- contexts ----------------------------------------------------------------


@dataclass(frozen=True)
class AppL:
    """``[] t``"""

    arg: Term


@dataclass(frozen=True)
class AppR:
    """``v []``"""

    fun: Term


@dataclass(frozen=True)
class ResetF:
    """``<[]>``"""


@dataclass(frozen=True)
class CtxVarF:
    """``<a>[]``"""

    cvar: str


Frame = Union[AppL, AppR, ResetF, CtxVarF]
EvalCtx = tuple  # tuple[Frame, ...], innermost first

EMPTY_CTX: EvalCtx = ()


def plug(ctx: EvalCtx, t: Term) -> Term:
    """Fill the hole of ``ctx`` with ``t``; variables of ``t`` may be captured."""
    for fr in ctx:
        match fr:
            case AppL(a):
                t = App(t, a)
            case AppR(f):
                t = App(f, t)
            case ResetF():
                t = Reset(t)
            case CtxVarF(a):
                t = CtxApp(a, t)
            case _:
                raise TypeError(f"not a frame: {fr!r}")
    return t


def compose(inner: EvalCtx, outer: EvalCtx) -> EvalCtx:
    """The context ``outer[inner[]]``."""
    return tuple(inner) + tuple(outer)


def is_delimiter(fr) -> bool:
    return isinstance(fr, (ResetF, CtxVarF))


def is_pure_ctx(ctx: EvalCtx) -> bool:
    return not any(is_delimiter(fr) for fr in ctx)


def is_delim_ctx(ctx: EvalCtx) -> bool:
    """A pure prefix followed by exactly one delimiter frame."""
    return bool(ctx) and is_delimiter(ctx[-1]) and is_pure_ctx(ctx[:-1])


def ctx_fv(ctx: EvalCtx) -> frozenset:
    out: set = set()
    for fr in ctx:
        match fr:
            case AppL(t) | AppR(t):
                out |= t.fv
    return frozenset(out)


def ctx_fcv(ctx: EvalCtx) -> frozenset:
    out: set = set()
    for fr in ctx:
        match fr:
            case AppL(t) | AppR(t):
                out |= t.fcv
            case CtxVarF(a):
                out.add(a)
    return frozenset(out)


def subst_ctx(t: Term, a: str, d: EvalCtx) -> Term:
    """Context substitution ``t{d/a}``: every ``<a>s`` becomes ``d[s{d/a}]``."""
    if not is_delim_ctx(d):
        raise IllegalInput("subst_ctx expects a delimited context")
    if a not in t.fcv:
        return t
    return _subst_ctx(t, a, d, ctx_fv(d))


def _subst_ctx(t: Term, a: str, d: EvalCtx, dfv: frozenset) -> Term:
    if a not in t.fcv:
        return t
    match t:
        case App(f, arg):
            return App(_subst_ctx(f, a, d, dfv), _subst_ctx(arg, a, d, dfv))
        case Lam(y, b) | Shift(y, b):
            if y in dfv:
                y2 = fresh_var(dfv | b.fv, y)
                b = rename(b, y, y2)
                y = y2
            return type(t)(y, _subst_ctx(b, a, d, dfv))
        case Reset(b):
            return Reset(_subst_ctx(b, a, d, dfv))
        case CtxApp(c, b):
            inner = _subst_ctx(b, a, d, dfv)
            return plug(d, inner) if c == a else CtxApp(c, inner)
    raise TypeError(f"not a term: {t!r}")


# -- alpha-equivalence and canonical keys -----------------------------------


def _nameless(t: Term, out: list, env: dict, depth: int, free: dict | None, cfree: dict | None) -> None:
    # Prefix encoding; bound variables become de Bruijn indices.
    match t:
        case Var(n):
            lvl = env.get(n)
            if lvl is not None:
                out.append(depth - lvl)
            elif free is None:
                out.append("$" + n)
            else:
                if n not in free:
                    free[n] = f"v{len(free)}"
                out.append("$" + free[n])
        case App(f, a):
            out.append("A")
            _nameless(f, out, env, depth, free, cfree)
            _nameless(a, out, env, depth, free, cfree)
        case Lam(x, b) | Shift(x, b):
            out.append("L" if type(t) is Lam else "S")
            saved = env.get(x)
            env[x] = depth + 1
            _nameless(b, out, env, depth + 1, free, cfree)
            if saved is None:
                del env[x]
            else:
                env[x] = saved
        case Reset(b):
            out.append("R")
            _nameless(b, out, env, depth, free, cfree)
        case CtxApp(c, b):
            if cfree is None:
                out.append("C" + c)
            else:
                if c not in cfree:
                    cfree[c] = f"a{len(cfree)}"
                out.append("C" + cfree[c])
            _nameless(b, out, env, depth, free, cfree)
        case _:
            raise TypeError(f"not a term: {t!r}")


def term_key(t: Term) -> tuple:
    """Alpha-invariant key; free names are kept as they are."""
    out: list = []
    _nameless(t, out, {}, 0, None, None)
    return tuple(out)


def alpha_eq(t0: Term, t1: Term) -> bool:
    if t0 is t1:
        return True
    if t0.size != t1.size or t0.fv != t1.fv or t0.fcv != t1.fcv:
        return False
    return term_key(t0) == term_key(t1)


def pair_key(t0: Term, t1: Term) -> tuple:
    """Key of a pair up to joint injective renaming of all names."""
    free: dict = {}
    cfree: dict = {}
    out: list = []
    _nameless(t0, out, {}, 0, free, cfree)
    out.append("|")
    _nameless(t1, out, {}, 0, free, cfree)
    return tuple(out)


def canonicalize_pair(t0: Term, t1: Term) -> tuple[Term, Term]:
    """Rename a pair jointly into a canonical alphabet.

    Free value variables become ``v0, v1, ...`` and free context variables
    ``a0, a1, ...`` in order of first occurrence, scanning ``t0`` first; bound
    variables become ``b<level>``.  Two pairs are mapped to equal terms iff
    they coincide up to a consistent renaming of all names.
    """
    free: dict = {}
    cfree: dict = {}
    return _canon(t0, free, cfree, {}, 0), _canon(t1, free, cfree, {}, 0)


def _canon(t: Term, free: dict, cfree: dict, env: dict, depth: int) -> Term:
    match t:
        case Var(n):
            if n in env:
                return Var(env[n])
            if n not in free:
                free[n] = f"v{len(free)}"
            return Var(free[n])
        case Lam(x, b) | Shift(x, b):
            y = f"b{depth}"
            return type(t)(y, _canon(b, free, cfree, {**env, x: y}, depth + 1))
        case App(f, a):
            f2 = _canon(f, free, cfree, env, depth)
            return App(f2, _canon(a, free, cfree, env, depth))
        case Reset(b):
            return Reset(_canon(b, free, cfree, env, depth))
        case CtxApp(c, b):
            if c not in cfree:
                cfree[c] = f"a{len(cfree)}"
            return CtxApp(cfree[c], _canon(b, free, cfree, env, depth))
    raise TypeError(f"not a term: {t!r}")


# -- positions ---------------------------------------------------------------


def children(t: Term) -> tuple:
    match t:
        case App(f, a):
            return (f, a)
        case Lam(_, b) | Shift(_, b) | Reset(b) | CtxApp(_, b):
            return (b,)
    return ()


def subterm_at(t: Term, path: str) -> Term:
    for c in path:
        t = children(t)[int(c)]
    return t


def replace_at(t: Term, path: str, new: Term) -> Term:
    """Replace the subterm at ``path`` (child-index string); no renaming."""
    if not path:
        return new
    i, rest = int(path[0]), path[1:]
    match t:
        case App(f, a):
            return App(replace_at(f, rest, new), a) if i == 0 else App(f, replace_at(a, rest, new))
        case Lam(x, b) | Shift(x, b):
            return type(t)(x, replace_at(b, rest, new))
        case Reset(b):
            return Reset(replace_at(b, rest, new))
        case CtxApp(c, b):
            return CtxApp(c, replace_at(b, rest, new))
    raise IndexError(f"no child {i} in {t!r}")


def positions(t: Term, prefix: str = ""):
    """Yield ``(path, subterm)`` for every subterm, outermost first."""
    stack = [(prefix, t)]
    while stack:
        p, s = stack.pop()
        yield p, s
        kids = children(s)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((p + str(i), kids[i]))


def apps(f: Term, *args: Term) -> Term:
    for a in args:
        f = App(f, a)
    return f


def lams(names: Iterable[str], body: Term) -> Term:
    for x in reversed(list(names)):
        body = Lam(x, body)
    return body
