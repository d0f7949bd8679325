import pytest
from hypothesis import given, settings, strategies as st

import oracles
from metacone.expr import (App, Atom, ParseError, Rule, Var, canonical_rule, canonicalize,
                           compile_schema, leaf_count, parse, parse_expr, parse_rule, parse_rules,
                           pretty, rule_leaf_count, rule_size, size, skolemize, symbolic_key,
                           to_string, QuantifiedStatement)

O = Atom("o")


def exprs(max_leaves=12):
    leaves = st.one_of(st.builds(Var, st.integers(1, 4)), st.sampled_from([Atom("a"), Atom("b")]))
    return st.recursive(leaves, lambda kids: st.builds(lambda x, y: App(O, [x, y]), kids, kids),
                        max_leaves=max_leaves)


rules = st.builds(lambda l, r: Rule(l, r), exprs(), exprs())


def rename(e, perm):
    if type(e) is Var:
        return Var(perm[int(e)])
    if isinstance(e, App):
        return App(e[0], [rename(x, perm) for x in e[1:]])
    return e


class TestParse:
    def test_infix_and_brackets_agree(self):
        assert parse("a_ . b_") == parse("o[a_, b_]")

    def test_rule_arrows(self):
        assert parse_rule("a -> b").directed
        assert not parse_rule("a <-> b").directed
        assert parse_rule("a ↔ b") == parse_rule("a <-> b")

    def test_round_trip(self):
        r = parse("x_ . y_ <-> (y_ . x_) . y_")
        assert parse(to_string(r)) == r

    def test_pretty_uses_letters(self):
        assert pretty(parse("x_ . y_ <-> (y_ . x_) . y_")) == "a∘b ↔ (b∘a)∘b"

    @pytest.mark.parametrize("bad", ["", "f[a", "a .", "a b ]", "<-> a"])
    def test_errors(self, bad):
        with pytest.raises(ParseError):
            parse(bad)

    def test_parse_rules_skips_comments(self):
        assert len(parse_rules("# c\na <-> b\n\nb <-> c  # tail\n")) == 2

    def test_expected_kinds(self):
        with pytest.raises(ParseError):
            parse_expr("a <-> b")
        with pytest.raises(ParseError):
            parse_rule("a . b")

    def test_unicode_identifiers(self):
        assert parse_expr("α1[x_]")[0] == Atom("α1")


class TestMeasures:
    def test_sizes(self):
        r = parse("x_ . y_ <-> (y_ . x_) . y_")
        assert size(r.lhs) == 3
        assert leaf_count(r.rhs) == 3
        assert rule_size(r) == 3 + 5 + 1
        assert rule_leaf_count(r) == 5


class TestCanonical:
    def test_first_occurrence(self):
        assert canonicalize(parse("b_ . a_")) == App(O, [Var(1), Var(2)])

    @settings(max_examples=300)
    @given(exprs())
    def test_matches_oracle(self, e):
        assert canonicalize(e) == oracles.rename_by_first_occurrence(e)

    @settings(max_examples=300)
    @given(rules, st.sampled_from(["full", "symbolic", "none"]))
    def test_idempotent(self, r, mode):
        c = canonical_rule(r, mode)
        assert canonical_rule(c, mode) == c

    @settings(max_examples=300)
    @given(rules, st.permutations([1, 2, 3, 4]), st.sampled_from(["full", "symbolic", "none"]))
    def test_invariant_under_renaming(self, r, perm, mode):
        p = dict(zip([1, 2, 3, 4], perm))
        r2 = Rule(rename(r.lhs, p), rename(r.rhs, p))
        assert canonical_rule(r, mode) == canonical_rule(r2, mode)

    @settings(max_examples=300)
    @given(rules)
    def test_full_merges_side_swaps(self, r):
        assert canonical_rule(r, "full") == canonical_rule(r.swapped(), "full")

    def test_symbolic_keeps_some_swaps_apart(self):
        # the side order depends on variable names, so renaming after a swap
        # can flip it again
        r = parse_rule("a_ . (b_ . c_) <-> (a_ . b_) . c_")
        assert canonical_rule(r, "symbolic") in (canonical_rule(r, "none"),
                                                 canonical_rule(r.swapped(), "none"))

    def test_symbols_before_compounds(self):
        assert symbolic_key(Atom("z")) < symbolic_key(parse_expr("a . a"))

    def test_directed_rules_keep_orientation(self):
        r = parse_rule("(a_ . b_) -> a_")
        assert canonical_rule(r, "full").lhs == parse_expr("a_ . b_")

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            canonical_rule(parse_rule("a_ <-> b_ . a_"), "sideways")


class TestQuantifiers:
    def test_existential_becomes_skolem_function(self):
        q = QuantifiedStatement((("forall", "x"), ("exists", "y")), parse_expr("x . y"), Atom("e"))
        r = skolemize(q, constants=("e",))
        side = r.lhs if isinstance(r.lhs, App) else r.rhs
        assert side[0] == O and type(side[1]) is Var
        witness = side[2]
        assert isinstance(witness[0], Atom) and witness[1] == side[1]

    def test_unbound_atom_rejected(self):
        q = QuantifiedStatement((("forall", "x"),), parse_expr("x . e"), Atom("x"))
        with pytest.raises(ValueError):
            skolemize(q)

    def test_schema_head_variable(self):
        r = compile_schema(parse_rule("f_[a] <-> f_[b]"))
        assert type(r.lhs[0]) is Var
