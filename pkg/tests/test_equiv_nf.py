import pytest

from lamshift import equiv_nf as nf
from lamshift.syntax import AppL, Var, alpha_eq, plug


def test_values_expand_to_passive_applications(P):
    out = nf.expand_pair(P("\\x. x"), P("\\x. <x>"), nf.PLAIN)
    assert isinstance(out, nf.Obligations) and len(out.items) == 1
    ob = out.items[0]
    assert ob.polarity == nf.PASSIVE
    y = ob.left.arg
    assert isinstance(y, Var) and alpha_eq(ob.left, P(f"(\\x. x) {y.name}"))


def test_value_against_stuck_is_a_mismatch(P):
    assert isinstance(nf.expand_pair(P("i"), P("S k. k i"), nf.PLAIN), nf.Mismatch)


def test_stripping_removes_identical_frames(P):
    t0, t1 = P("<i i> omega"), P("<omega> omega")
    l, r, n = nf.strip_shared_frames(t0, t1, nf.PLAIN)
    assert n == 1 and l == P("<i i>") and r == P("<omega>")


def test_passive_obligations_are_not_stripped(P):
    ev = nf.Evaluator(nf.flavor_mode(nf.PLAIN), 1000)
    ob = nf.Obligation(P("x i"), P("x omega"), nf.PASSIVE)
    out = nf.upto_normalize(ob, nf.UpToOptions(), nf.PLAIN, ev)
    assert out.status == "ok" and out.stripped == 0


def test_refl_after_reduction(P):
    ev = nf.Evaluator(nf.flavor_mode(nf.PLAIN), 1000)
    out = nf.upto_normalize(nf.Obligation(P("<i omega>"), P("<omega>")), nf.UpToOptions(), nf.PLAIN, ev)
    assert out.status == "discharged"


def test_double_reset(P):
    v = nf.nf_bisim_check(P("<<x i>>"), P("<x i>"))
    assert isinstance(v, nf.Equivalent) and nf.check_witness(v, nf.PLAIN)


def test_fixed_point_combinators(P):
    v = nf.nf_bisim_check(P("Theta"), P("Theta_S"), depth=32)
    assert isinstance(v, nf.Equivalent) and len(v.witness) <= 10
    assert nf.check_witness(v, nf.PLAIN)
    assert len(nf.witness_relation(v)) == len(v.witness)


def test_duplicated_open_stuck_term_is_refuted(P):
    v = nf.nf_bisim_check(P("<x i>"), P("(\\y. <x i>) <x i>"))
    assert isinstance(v, nf.Inequivalent)
    assert nf.replay_trace(v, nf.PLAIN)


@pytest.mark.parametrize("flavor, verdict", [(nf.PLAIN, "inequivalent"), (nf.REFINED, "equivalent")])
def test_stuck_term_and_its_application(P, flavor, verdict):
    assert nf.nf_bisim_check(P("S k. i"), P("(S k. i) Omega"), flavor).verdict == verdict


@pytest.mark.parametrize("flavor, verdict", [(nf.PLAIN, "inequivalent"), (nf.PURE, "equivalent")])
def test_shift_elimination(P, flavor, verdict):
    assert nf.nf_bisim_check(P("\\y. y"), P("S k. k (\\y. y)"), flavor).verdict == verdict


def test_alpha_equal_inputs_give_a_singleton_witness(P):
    v = nf.nf_bisim_check(P("\\x. x"), P("\\y. y"))
    assert isinstance(v, nf.Equivalent) and len(v.witness) == 1


def test_pure_flavor_relates_omega_and_stuck_omega(P):
    assert nf.nf_bisim_check(P("Omega"), P("S k. Omega"), nf.PURE).verdict == "equivalent"
    assert nf.nf_bisim_check(P("Omega"), P("S k. Omega"), nf.PLAIN).verdict == "inequivalent"


def test_budgets_give_unknown(P):
    v = nf.nf_bisim_check(P("Delta omega"), P("<Delta omega>"), fuel=30)
    assert isinstance(v, nf.Unknown) and v.reason == "fuel"


def test_up_to_can_be_switched_off(P):
    opts = nf.UpToOptions(context=False, reduction=False)
    v = nf.nf_bisim_check(P("<<x i>>"), P("<x i>"), opts=opts)
    assert v.verdict == "equivalent"


def test_unknown_flavor_rejected(P):
    with pytest.raises(ValueError):
        nf.nf_bisim_check(P("i"), P("i"), "mystery")
