import pytest

from lamshift.parser import ParseError, UnknownName, parse_defs, parse_term
from lamshift.printer import print_term
from lamshift.syntax import (
    App,
    AppL,
    AppR,
    CtxApp,
    Lam,
    NameSupply,
    Reset,
    ResetF,
    Shift,
    Var,
    alpha_eq,
    fresh_var,
    free_vars,
    pair_key,
    plug,
    subst,
    subst_ctx,
)

x, y, z = Var("x"), Var("y"), Var("z")


def test_parse_lambda():
    assert parse_term("\\x. x") == Lam("x", x)


def test_application_associates_left():
    assert parse_term("x y z") == App(App(x, y), z)


def test_parse_worked_trace_term(P):
    t = P("<((S k1. i (k1 i)) (S k2. omega)) Omega>")
    i = Lam("x", x)
    omega = Lam("x", App(x, x))
    expected = Reset(
        App(App(Shift("k1", App(i, App(Var("k1"), i))), Shift("k2", omega)), App(omega, omega))
    )
    assert t == expected


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as e:
        parse_term("(\\x. x")
    assert e.value.line == 1


def test_closed_parse_rejects_unknown_names():
    with pytest.raises(UnknownName):
        parse_term("\\x. y", closed=True)


def test_defs_may_use_earlier_defs():
    d = parse_defs("i = \\x. x; ii = i i;")
    assert d["ii"] == App(Lam("x", x), Lam("x", x))


@pytest.mark.parametrize(
    "t, text",
    [
        (Lam("x", x), "\\x. x"),
        (Reset(x), "<x>"),
        (CtxApp("a", x), "@a< x >"),
    ],
)
def test_print(t, text):
    assert print_term(t) == text


def test_print_parse_roundtrip_with_context_application():
    t = Lam("y", CtxApp("a", App(y, Lam("x", x))))
    assert alpha_eq(parse_term(print_term(t)), t)


def test_free_variables():
    assert free_vars(Lam("x", x)) == (frozenset(), frozenset())
    assert free_vars(Shift("k", App(Var("k"), Lam("x", x)))) == (frozenset(), frozenset())
    assert free_vars(CtxApp("a", App(x, y))) == ({"x", "y"}, {"a"})


def test_alpha_equivalence():
    assert alpha_eq(Lam("x", x), Lam("y", y))
    assert alpha_eq(Shift("k", Var("k")), Shift("j", Var("j")))
    assert not alpha_eq(Lam("x", x), Lam("x", Reset(x)))
    assert not alpha_eq(Lam("x", y), Lam("x", z))


def test_subst_plain():
    v = Lam("y", Reset(y))
    t = App(Var("k"), App(Var("k"), x))
    assert subst(t, "k", v) == App(v, App(v, x))
    assert subst(x, "x", v) == v


def test_subst_avoids_capture():
    t = Lam("x", App(x, y))
    out = subst(t, "y", Lam("w", x))
    assert isinstance(out, Lam) and out.var != "x"
    assert alpha_eq(out, Lam("u", App(Var("u"), Lam("w", x))))


def test_subst_ctx():
    # contexts are innermost first, so the delimiter comes last
    E = (AppL(Lam("v", Var("v"))), ResetF())
    assert subst_ctx(CtxApp("a", x), "a", E) == Reset(App(x, Lam("v", Var("v"))))
    assert subst_ctx(CtxApp("b", x), "a", E) == CtxApp("b", x)
    v = Lam("w", Var("w"))
    out = subst_ctx(Lam("y", CtxApp("a", y)), "a", (AppL(v), ResetF()))
    assert alpha_eq(out, Lam("y", Reset(App(y, v))))


def test_plug_orders_frames_innermost_first(P):
    Omega = P("Omega")
    assert plug((), x) == x
    assert plug((ResetF(), AppL(Omega)), x) == App(Reset(x), Omega)
    assert plug((AppR(P("i")), ResetF()), P("S k. omega")) == P("<i (S k. omega)>")


def test_fresh_var():
    assert fresh_var(set()) == "x0"
    assert fresh_var({"x0"}) == "x1"
    s = NameSupply()
    assert s.fresh() != s.fresh()


def test_pair_keys_rename_free_variables_consistently():
    v0, v1 = Lam("x", x), Lam("x", App(x, x))
    assert pair_key(App(v0, y), App(v1, y)) == pair_key(App(v0, z), App(v1, z))
    assert pair_key(App(x, y), x) == pair_key(App(y, x), y)
    assert pair_key(x, y) != pair_key(x, x)
