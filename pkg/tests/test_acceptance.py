"""Acceptance criteria, one test each; every test prints a pass/fail line."""

import time
from importlib import resources

import pytest

import test_properties as props
from lamshift import axioms, corpus, cps
from lamshift import equiv_app as app
from lamshift import equiv_nf as nf
from lamshift import semantics as sem
from lamshift.syntax import alpha_eq
from conftest import DEFS, term


@pytest.fixture
def report(capsys, request):
    lines = []

    def note(ok: bool, detail: str = ""):
        lines.append(f"{request.node.name}: {'PASS' if ok else 'FAIL'}{'  ' + detail if detail else ''}")
        return ok

    yield note
    with capsys.disabled():
        for line in lines:
            print("\n" + line)


def shipped_corpus():
    text = resources.files("lamshift").joinpath("data/shipped.corpus").read_text(encoding="utf-8")
    return corpus.parse_corpus(text, DEFS)


def test_criterion_1_reduction_fidelity(report):
    t = term("<((S k1. i (k1 i)) (S k2. omega)) Omega>")
    trace: list = []
    out = sem.evaluate(t, trace=trace)
    rules = [r for r, _ in trace]
    best = min(_timed(lambda: sem.evaluate(t)) for _ in range(20))
    ok = (
        isinstance(out, sem.Normal)
        and alpha_eq(out.term, term("omega"))
        and out.steps == 6
        and rules == ["shift", "beta_v", "shift", "reset", "beta_v", "reset"]
        and best < 1e-3
    )
    assert report(ok, f"{out.steps} steps {rules}, {best * 1e6:.0f} us")


def _timed(f):
    start = time.perf_counter()
    f()
    return time.perf_counter() - start


def test_criterion_2_combinator_value(report):
    out = sem.evaluate(term("<theta (S k. k k)>"))
    expected = term("\\y. y (\\z. ((\\x. <theta x>) (\\x. <theta x>)) y z)")
    assert report(isinstance(out, sem.Normal) and alpha_eq(out.term, expected))


def test_criterion_3_axiom_matrix(report):
    entries = [e for e in shipped_corpus() if "axiom" in e.tags]
    start = time.perf_counter()
    results = [corpus.run_entry(e) for e in entries]
    elapsed = time.perf_counter() - start
    failed = [r.name for r in results if not r.passed]
    by_axiom = {e.tags[1] for e in entries}
    per = {a: sum(1 for e in entries if a in e.tags and e.name.endswith("-plain")) for a in axioms.AXIOMS}
    ok = not failed and by_axiom == set(axioms.AXIOMS) and set(per.values()) == {3} and elapsed < 30
    assert report(ok, f"{len(results)} checks, {len(failed)} failed {failed}, {elapsed:.1f} s")


def test_criterion_4_counterexamples(report):
    checks = {}
    checks["dupl plain"] = nf.nf_bisim_check(term("<x i>"), term("(\\y. <x i>) <x i>")).verdict == "inequivalent"
    stuck = (term("S k. i"), term("(S k. i) Omega"))
    checks["stuck plain"] = nf.nf_bisim_check(*stuck, nf.PLAIN).verdict == "inequivalent"
    checks["stuck refined"] = nf.nf_bisim_check(*stuck, nf.REFINED).verdict == "equivalent"
    om = (term("Omega"), term("S k. Omega"))
    v = app.app_bisim_check(*om)
    checks["omega app"] = isinstance(v, app.Inequivalent) and app.validate_witness(v.context, *om)
    delta = (term("Delta"), term("Delta_S"))
    v = app.app_bisim_check(*delta)
    checks["delta app"] = (
        isinstance(v, app.Inequivalent)
        and app.validate_witness(v.context, *delta)
        and any(isinstance(m.label, app.Arg) and alpha_eq(m.label.value, term("\\x. S k. Omega")) for m in v.trace)
    )
    checks["omega pure"] = nf.nf_bisim_check(*om, nf.PURE).verdict == "equivalent"
    bad = [k for k, ok in checks.items() if not ok]
    assert report(not bad, f"failed: {bad}" if bad else f"{len(checks)} verdicts")


def test_criterion_5_fixed_point_equivalence(report):
    start = time.perf_counter()
    v = nf.nf_bisim_check(term("Theta"), term("Theta_S"), nf.PLAIN, depth=32)
    elapsed = time.perf_counter() - start
    ok = isinstance(v, nf.Equivalent) and len(v.witness) <= 10 and elapsed < 1 and nf.check_witness(v, nf.PLAIN)
    size = len(v.witness) if isinstance(v, nf.Equivalent) else None
    assert report(ok, f"{v.verdict}, {size} pairs, {elapsed:.3f} s")


PROPERTY_SUITES = [
    props.test_step_is_deterministic_and_decomposition_unique,
    props.test_substitution_lemma,
    props.test_reset_programs_never_get_control_stuck,
    props.test_tau_transitions_are_reduction_steps,
    props.test_context_labels_agree_with_capture_under_reset,
    props.test_extended_rules_are_conservative,
    props.test_global_and_local_rules_agree,
]


def test_criterion_6_property_suites(report):
    failed = []
    for suite in PROPERTY_SUITES:
        try:
            suite()
        except AssertionError:
            failed.append(suite.__name__)
    assert report(not failed, f"{len(PROPERTY_SUITES)} suites x {props.N} cases, violations in {failed}")


def _pairs():
    seen = {}
    for e in shipped_corpus():
        if len(e.terms) == 2 and e.command != "axioms":
            seen.setdefault((e.terms[0], e.terms[1]), e.options.get("depth", 32))
    return seen


def test_criterion_7_flavor_monotonicity(report):
    violations = []
    pairs = _pairs()
    for (t0, t1), depth in pairs.items():
        v = {f: nf.nf_bisim_check(t0, t1, f, depth).verdict for f in nf.FLAVORS}
        if v[nf.PLAIN] == "equivalent" and v[nf.REFINED] != "equivalent":
            violations.append(("plain => refined", t0, t1))
        if v[nf.REFINED] == "equivalent" and v[nf.PURE] != "equivalent":
            violations.append(("refined => pure", t0, t1))
        closed = not (t0.fv or t1.fv)
        if closed and "equivalent" in (v[nf.PLAIN], v[nf.REFINED]):
            if app.app_bisim_check(t0, t1).verdict == "inequivalent":
                violations.append(("nf => app", t0, t1))
    assert report(not violations, f"{len(pairs)} pairs, {len(violations)} violations")


def test_criterion_8_cps_consistency(report):
    t = term("x <y (S k. z (k x'))>")
    hand = term(
        "\\k1 k2. (\\x2 k1' k2'. y x2 kinit (\\x3. k1' x3 k2')) x'"
        " (\\x1 k2'. z x1 kinit k2') (\\x0. x x0 k1 k2)"
    )
    worked = cps.lambda_equiv(cps.cps_translate(t), hand)
    omega = cps.cps_equiv(term("Omega"), term("Omega Omega"))
    derived = axioms.derive_axiom_eq(term("Theta"), term("Delta"))
    ok = worked == cps.YES and omega != cps.YES and not isinstance(derived, axioms.Derived)
    assert report(ok, f"worked={worked} omega={omega} theta/delta={derived.verdict}")
