from lamshift import cps
from lamshift import semantics as sem
from lamshift.syntax import alpha_eq, apps


def test_translate_variable(P):
    assert alpha_eq(cps.cps_translate(P("x")), P("\\k1 k2. k1 x k2"))


def test_translation_is_a_lambda_term(P):
    out = cps.cps_translate(P("<(S k. k i) (S j. omega)>"))
    assert cps.is_lambda_term(out)
    assert not out.fv


def test_normalize_beta_and_eta(P):
    n = cps.beta_eta_normalize(P("(\\x. x) y"))
    assert isinstance(n, cps.Normalized) and n.term == P("y")
    assert alpha_eq(cps.beta_eta_normalize(P("\\x. f x")).term, P("f"))


def test_omega_image_has_no_normal_form(P):
    n = cps.beta_eta_normalize(cps.cps_translate(P("Omega")))
    assert isinstance(n, cps.NoNormalForm)


def test_worked_translation_matches_hand_reduced_form(P):
    t = P("x <y (S k. z (k x'))>")
    hand = P(
        "\\k1 k2. (\\x2 k1' k2'. y x2 kinit (\\x3. k1' x3 k2')) x'"
        " (\\x1 k2'. z x1 kinit k2') (\\x0. x x0 k1 k2)"
    )
    assert cps.lambda_equiv(cps.cps_translate(t), hand) == cps.YES


def test_cps_equiv(P):
    assert cps.cps_equiv(P("\\x. x"), P("\\x. x")) == cps.YES
    assert cps.cps_equiv(P("\\x. x"), P("\\x. x x")) == cps.NO
    assert cps.cps_equiv(P("Omega"), P("Omega Omega")) == cps.UNKNOWN


def test_reduction_steps_are_cps_equivalent(P):
    t = P("<((S k1. i (k1 i)) (S k2. omega)) Omega>")
    s = sem.step(t)
    assert cps.cps_equiv(t, s.term) == cps.YES


def test_run_cps_of_reset_value(P):
    out = cps.run_cps(P("<\\x. x>"))
    assert isinstance(out, sem.Normal)
    # the value image of v, projected out of its translation
    image = apps(cps.cps_translate(P("\\x. x")), P("\\a b. a"), P("\\a. a"))
    assert cps.lambda_equiv(out.term, image) == cps.YES


def test_run_cps_agrees_with_evaluation_on_values(P):
    for text in ["<i i>", "<(S k. k i) omega>", "<theta (S k. k k)>"]:
        assert isinstance(sem.evaluate(P(text)).kind, sem.ValueNF)
        assert isinstance(cps.run_cps(P(text)), sem.Normal)


def test_run_cps_diverges(P):
    assert not isinstance(cps.run_cps(P("Omega"), 2000), sem.Normal)
