import pytest
from hypothesis import given, settings, strategies as st

from ltr.evaluator import (Configuration, Evaluator, Failed, Finished, FuelExhausted, Stepped,
                           check_language_structural, check_none, decompose, fresh_var, match, run,
                           step, step_atomic)
from ltr.exprs import (ERROR, NIL, SKIP, Cons, Error, Fold, FormulaT, Head, MapLit, MetaVarE,
                       PPred, PVar, PWild, RuleT, Select, Seq, TermT, mklist, plist, unlist)
from ltr.model import LanguageDef, MetaVar, Rule, formula, mv, var
from ltr.script import parse_script
from ltr.stdlib import load_fixture
from ltr.syntax import print_language
from ltr.typesys import typecheck_config

from oracles import fold_pairs


@pytest.fixture(scope="module")
def stlc():
    return load_fixture("stlc")


def m(name):
    return MetaVarE(mv(name))


def evaluate(lang, src, check=check_language_structural, fuel=10_000):
    e = typecheck_config(frozenset(), lang, parse_script(src, lang), check)
    return Evaluator(check).run(Configuration.initial(lang, e), fuel)


def test_seq_skip_steps_to_right(stlc):
    c = Configuration.initial(stlc, Seq(SKIP, Seq(SKIP, SKIP)))
    out = step_atomic(c)
    assert out.expr == Seq(SKIP, SKIP) and out.language is stlc


def test_select_over_nil(stlc):
    out = step_atomic(Configuration.initial(stlc, Select(NIL, PWild(), ERROR)))
    assert out.expr == NIL


def test_fold_singleton_is_nil(stlc):
    out = step_atomic(Configuration.initial(stlc, Fold("<:", mklist([m("T")]))))
    assert out.expr == NIL


def test_step_atomic_on_value_is_none(stlc):
    assert step_atomic(Configuration.initial(stlc, SKIP)) is None


@pytest.mark.parametrize("n", [0, 1, 2, 4, 7])
def test_fold_matches_oracle(n, stlc):
    ts = [m(f"T{i}") for i in range(1, n + 1)]
    res = Evaluator(check_none).run(Configuration.initial(stlc, Fold("=", mklist(ts))), 100)
    got = unlist(res.outcome.value)
    want = fold_pairs("=", [t.var for t in ts])
    assert [(f.pred, tuple(a.var for a in unlist(f.args))) for f in got] == \
        [(f.pred, f.args) for f in want]


def test_decompose_under_cons():
    inner = Head(NIL)
    d = decompose(Cons(inner, NIL))
    assert d.redex is inner


def test_decompose_rule_template_conclusion_first():
    prem = Head(NIL)
    conc = Head(mklist([FormulaT("-->", mklist([m("a"), m("b")]))]))
    d = decompose(RuleT(prem, conc))
    assert d.redex is conc


def test_decompose_value_is_none():
    assert decompose(SKIP) is None


def test_error_in_context_collapses(stlc):
    c = Configuration.initial(stlc, Cons(ERROR, NIL))
    out = step(c)
    assert isinstance(out, Stepped) and isinstance(out.config.expr, Error)
    assert isinstance(step(out.config), Failed)


def test_language_check_failure_keeps_language(stlc):
    res = evaluate(stlc, "setRules (getRules @ [(nil --- (|- ?a ?b))])")
    assert isinstance(res.outcome, Failed)
    assert res.outcome.config.language == stlc
    assert print_language(res.outcome.config.language) == print_language(stlc)


def test_without_check_the_same_step_succeeds(stlc):
    res = evaluate(stlc, "setRules (getRules @ [(nil --- (|- ?a ?b))])", check=check_none)
    assert isinstance(res.outcome, Finished)
    assert len(res.outcome.config.language.rules) == len(stlc.rules) + 1


def test_fresh_var_policy():
    c = Configuration.initial(LanguageDef(), SKIP)
    x1, c = fresh_var(c)
    x2, c = fresh_var(c)
    assert str(x1) == "X#1" and x1 != x2
    assert x1.primes == 0 and x2.primes == 0


def test_fresh_var_avoids_language():
    lang = LanguageDef(rules=(Rule((), formula("-->", var("X#1"), var("X#2"))),))
    x, _ = fresh_var(Configuration.initial(lang, SKIP))
    assert x == MetaVar("X", 0, 3)


def test_run_skip(stlc):
    res = run(Configuration.initial(stlc, SKIP))
    assert isinstance(res.outcome, Finished) and res.steps == 0


def test_run_seq(stlc):
    res = run(Configuration.initial(stlc, Seq(SKIP, SKIP)))
    assert isinstance(res.outcome, Finished) and res.steps == 1


def test_fuel(stlc):
    res = evaluate(stlc, "setRules getRules ; setRules getRules", fuel=2)
    assert isinstance(res.outcome, FuelExhausted)


def test_trace_records_every_configuration(stlc):
    e = parse_script("skip ; skip ; skip")
    res = run(Configuration.initial(stlc, e), trace=True)
    assert len(res.trace) == res.steps + 1


def test_structural_check(stlc):
    assert check_language_structural(stlc) == []
    assert check_language_structural(LanguageDef()) == []
    bad = stlc.with_rules([*stlc.rules, Rule((), formula("|-", var("a"), var("b")))])
    assert check_language_structural(bad)


def test_match_formula():
    v = FormulaT("|-", mklist([m("G"), TermT("app", mklist([m("e1"), m("e2")])), m("T")]))
    p = PPred("|-", plist([PVar("g"), PVar("e"), PVar("t")]))
    got = match(v, p)
    assert got == {"g": m("G"), "e": TermT("app", mklist([m("e1"), m("e2")])), "t": m("T")}
    assert match(NIL, plist([])) == {}


def test_match_head_mismatch():
    from ltr.exprs import POp
    assert match(TermT("arrow", mklist([m("T1"), m("T2")])), POp("lam", PWild())) is None


def test_let_and_match_evaluate(stlc):
    assert unlist(_value(stlc, "let x = nil in x")) == []
    got = _value(stlc, "match (|- [?G, ?e, ?T]) with (|- [g, ev, t]) => t", check_none)
    assert got == m("T")


def test_match_failure_is_error(stlc):
    e = parse_script("match ?A with (|- [g, ev, t]) => t", stlc)
    res = Evaluator(check_none).run(Configuration.initial(stlc, e), 100)
    assert isinstance(res.outcome, Failed)


@pytest.mark.parametrize("src,want", [
    ("concat [[?a], [?b, ?c]]", ["a", "b", "c"]),
    ("concat nil", []),
    ("concat [nil]", []),
])
def test_concat(src, want, stlc):
    assert [x.var for x in unlist(_value(stlc, src))] == [mv(w) for w in want]


@pytest.mark.parametrize("src,want", [
    ("overlap((arrow ?T1 ?T2), ?T1)", True),
    ("overlap((B), (B))", False),
    ("overlap(?X, ?X)", True),
])
def test_overlap(src, want, stlc):
    got = _value(stlc, f"if {src} then [?yes] else nil")
    assert bool(unlist(got)) is want


def test_tick_only_primes_listed_vars(stlc):
    got = _value(stlc, "tick((arrow ?A ?B), [?A])")
    assert got == TermT("arrow", mklist([m("A'"), m("B")]))


def test_map_length_mismatch_is_error(stlc):
    e = MapLit(mklist([m("a")]), NIL)
    res = Evaluator(check_none).run(Configuration.initial(stlc, e), 10)
    assert isinstance(res.outcome, Failed)


def _value(lang, src, check=check_none):
    res = Evaluator(check).run(Configuration.initial(lang, parse_script(src, lang)), 10_000)
    assert isinstance(res.outcome, Finished), res.outcome
    return res.outcome.value


# selectors never produce more elements than they consume; the keep form
# additionally preserves every element the pattern does not match
@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.sampled_from("ABC")), max_size=6), st.booleans())
def test_selector_length_bounds(items, keep):
    lang = load_fixture("tiny")
    src = ", ".join(f"(succ ?{n})" if wrapped else f"?{n}" for wrapped, n in items)
    marker = "(keep)" if keep else ""
    out = unlist(_value(lang, f"[{src}]{marker}[(succ y)]: if y == ?A then nothing else just self"))
    matched_kept = sum(w and n != "A" for w, n in items)
    unmatched = sum(not w for w, _ in items)
    assert len(out) <= len(items)
    assert len(out) == matched_kept + (unmatched if keep else 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 5))
def test_runs_are_deterministic(n):
    lang = load_fixture("stlc")
    src = "let v = newVar in " * n + "setRules getRules"
    a = evaluate(lang, src)
    b = evaluate(lang, src)
    assert a.outcome == b.outcome and a.steps == b.steps
