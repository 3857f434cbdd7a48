import pytest

from lamshift import semantics as sem
from lamshift.syntax import AppL, AppR, CtxApp, IllegalInput, Lam, ResetF, Var, alpha_eq


def test_decompose_beta_under_reset(P):
    t = P("<(\\x. x x) i>")
    d = sem.decompose(t)
    assert d == sem.Redex(P("(\\x. x x) i"), (ResetF(),), sem.BETA_V)


def test_undelimited_shift_is_control_stuck(P):
    d = sem.decompose(P("(S k. k i) omega"))
    assert isinstance(d, sem.NormalForm) and isinstance(d.kind, sem.ControlStuck)


def test_open_application_is_stuck(P):
    d = sem.decompose(P("i (x i)"))
    assert d.kind == sem.OpenStuck((AppR(P("i")),), "x", P("i"))


def test_first_shift_step(P):
    s = sem.step(P("<((S k1. i (k1 i)) (S k2. omega)) Omega>"))
    assert s.rule == sem.SHIFT
    assert alpha_eq(s.term, P("<i ((\\x. <(x (S k2. omega)) Omega>) i)>"))


def test_six_step_trace():
    from lamshift.cli import prelude
    from lamshift.parser import parse_term

    t = parse_term("<((S k1. i (k1 i)) (S k2. omega)) Omega>", prelude())
    trace: list = []
    out = sem.evaluate(t, trace=trace)
    assert isinstance(out, sem.Normal) and out.steps == 6
    assert [r for r, _ in trace] == ["shift", "beta_v", "shift", "reset", "beta_v", "reset"]


def test_local_rules_use_the_empty_context_rule(P):
    s = sem.step(P("<S k. k>"), sem.LOCAL_MODE)
    assert s.rule == sem.SHIFT_EMPTY
    assert alpha_eq(s.term, P("<\\x. x>"))


def test_local_rules_move_shift_one_frame(P):
    s = sem.step(P("<(S k. k) i>"), sem.LOCAL_MODE)
    assert s.rule == sem.SHIFT_ELEM


def test_extended_shift_through_context_variable(P):
    t = CtxApp("a", P("(S k. k i) omega"))
    s = sem.step(t, sem.EXTENDED_MODE)
    assert s.rule == sem.SHIFT_EXT
    assert alpha_eq(s.term, P("<(\\x. @a< x omega >) i>"))


def test_extended_mode_required_for_context_variables(P):
    with pytest.raises(IllegalInput):
        sem.step(CtxApp("a", P("i")))


def test_evaluate_values_and_divergence(P):
    out = sem.evaluate(P("<theta (S k. k k)>"))
    assert alpha_eq(out.term, P("\\y. y (\\z. (\\x. <theta x>) (\\x. <theta x>) y z)"))
    d = sem.evaluate(P("Omega"))
    assert isinstance(d, sem.Diverges) and alpha_eq(d.loop_witness, P("Omega"))


def test_fuel_exhaustion(P):
    out = sem.evaluate(P("Delta (\\x. x x)"), fuel=50)
    assert isinstance(out, sem.FuelExhausted) and out.steps == 50


def test_classify(P):
    assert sem.classify(P("S k. Omega")) == sem.ControlStuck((), "k", P("Omega"))
    assert isinstance(sem.classify(P("<i (x i)>")), sem.OpenStuck)
    assert sem.classify(P("i i")) is None
    kind = sem.classify(Lam("y", Var("y")))
    assert isinstance(kind, sem.ValueNF)


def test_context_stuck(P):
    t = P("i (@a< i >)")
    assert isinstance(sem.classify(t), sem.ContextStuck)


def test_original_mode_adds_a_reset(P):
    out = sem.evaluate(P("S k. i"), sem.ORIGINAL_MODE)
    assert isinstance(out.kind, sem.ValueNF)


def test_call_by_name(P):
    out = sem.evaluate(P("(\\x. i) Omega"), sem.CBN_MODE)
    assert isinstance(out, sem.Normal) and out.steps == 1


def test_ctx_split(P):
    pure = (AppL(P("i")), AppR(P("i")))
    assert sem.ctx_split(pure) == sem.PureOnly(pure)
    assert sem.ctx_split((ResetF(),)) == sem.Split((), (ResetF(),))
    F = (AppL(P("i")), ResetF(), AppR(P("i")), ResetF())
    assert sem.ctx_split(F) == sem.Split(F[2:], F[:2])


def test_bad_mode_combination():
    with pytest.raises(ValueError):
        sem.SemMode(rules=sem.LOCAL, calculus=sem.EXTENDED)
