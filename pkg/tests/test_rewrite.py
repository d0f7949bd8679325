from hypothesis import given, settings, strategies as st

import oracles
from metacone.expr import App, Atom, Rule, Var, canonicalize, parse_expr, parse_rule
from metacone.rewrite import (bisubstitutions, cosubstitutions, match, rule_results,
                              substitutions, unify, apply_binding)
from test_expr import exprs

AXIOM = parse_rule("x_ . y_ <-> (y_ . x_) . y_")
rules = st.builds(lambda l, r: Rule(l, r), exprs(6), exprs(6))


class TestMatch:
    @settings(max_examples=300)
    @given(exprs(6), exprs(8))
    def test_agrees_with_oracle(self, p, s):
        assert (match(p, s) is None) == (oracles.naive_match(p, s) is None)

    @settings(max_examples=300)
    @given(exprs(6), exprs(8))
    def test_binding_reproduces_subject(self, p, s):
        b = match(p, s)
        if b is not None:
            assert apply_binding(p, b) == s

    def test_variable_never_binds_a_rule_node(self):
        nested = App(Atom("TwoWayRule"), [Atom("a"), Atom("b")])
        assert match(Var(1), nested) is None


class TestUnify:
    def test_occurs_check(self):
        assert unify(Var(-1), App(Atom("o"), [Var(-1), Atom("a")])) is None

    @settings(max_examples=200)
    @given(exprs(5), exprs(5))
    def test_unifier_equalizes(self, a, b):
        from metacone.rewrite import _negate, _resolve
        na = _negate(a)
        s = unify(na, b)
        if s is not None:
            assert _resolve(na, s) == _resolve(b, s)


class TestEvents:
    def test_rewrites_known_expression(self):
        results = {e.result for e in substitutions(AXIOM, parse_expr("(a . b) . a"))}
        assert canonicalize(parse_expr("b . a")) in results

    @settings(max_examples=200)
    @given(exprs(8))
    def test_substitution_matches_oracle(self, e):
        ours = {ev.result for ev in substitutions(AXIOM, canonicalize(e))}
        assert ours == oracles.one_step_rewrites([AXIOM], canonicalize(e))

    @settings(max_examples=200)
    @given(rules, rules)
    def test_sub_within_bisub(self, code, data):
        s = {r for *_, r in rule_results(code, data, "sub")}
        b = {r for *_, r in rule_results(code, data, "bisub")}
        assert s <= b

    @settings(max_examples=200)
    @given(rules, rules)
    def test_cosub_within_bisub(self, code, data):
        c = {r for *_, r in rule_results(code, data, "cosub")}
        b = {r for *_, r in rule_results(code, data, "bisub")}
        assert c <= b

    def test_cosubstitution_specializes_target(self):
        data = parse_rule("a_ <-> b_")
        outs = {ev.result for ev in cosubstitutions(AXIOM, data)}
        assert outs and all(isinstance(r, Rule) for r in outs)

    def test_bisub_on_expression(self):
        assert bisubstitutions(AXIOM, parse_expr("a . b"))
