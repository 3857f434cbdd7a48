"""Concrete syntax output with minimal parentheses."""

from __future__ import annotations

from lamshift.syntax import App, CtxApp, Lam, Reset, Shift, Term, Var, plug

HOLE = "_"


def print_term(t: Term) -> str:
    match t:
        case Lam(x, b):
            return f"\\{x}. {print_term(b)}"
        case Shift(k, b):
            return f"S {k}. {print_term(b)}"
        case App():
            return _print_app(t)
    return _print_atom(t)


def _print_app(t: Term) -> str:
    spine = []
    while isinstance(t, App):
        spine.append(t.arg)
        t = t.fun
    parts = [_print_atom(t)] + [_print_atom(a) for a in reversed(spine)]
    return " ".join(parts)


def _print_atom(t: Term) -> str:
    match t:
        case Var(x):
            return x
        case Reset(b):
            return f"<{print_term(b)}>"
        case CtxApp(a, b):
            return f"@{a}< {print_term(b)} >"
    return f"({print_term(t)})"


def print_ctx(ctx) -> str:
    """Print an evaluation context with ``_`` standing for the hole."""
    return print_term(plug(ctx, Var(HOLE)))
