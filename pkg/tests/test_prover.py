import dataclasses

from hypothesis import given, settings, strategies as st

import oracles
from metacone.accumulate import evolve
from metacone.expr import App, Atom, Rule, Var, canonicalize, parse_rule
from metacone.prover import (NotFound, count_proofs, extract_proof, proof_metrics, prove,
                             prove_to_tautology, replay, replay_chain, unroll)

AXIOM = parse_rule("x_ . y_ <-> (y_ . x_) . y_")
GOAL = parse_rule("(a_ . b_) . a_ <-> (a_ . (a_ . (a_ . b_))) . a_")
O = Atom("o")


def small_exprs():
    leaves = st.builds(Var, st.integers(1, 2))
    return st.recursive(leaves, lambda kids: st.builds(lambda x, y: App(O, [x, y]), kids, kids),
                        max_leaves=4)


small_rules = st.builds(lambda l, r: Rule(l, r), small_exprs(), small_exprs())


def chain_steps_ok(chain, axioms):
    """Each consecutive pair differs by one axiom use, checked by the oracle."""
    for a, b in zip(chain, chain[1:]):
        if canonicalize(a) == canonicalize(b):
            continue
        if canonicalize(b) not in oracles.one_step_rewrites(axioms, canonicalize(a)):
            return False
    return True


class TestForward:
    def test_finds_and_replays(self):
        p = prove([AXIOM], GOAL, "sub", budget=3)
        assert p and replay(p)

    def test_unrolled_chain(self):
        p = prove([AXIOM], GOAL, "sub", budget=3)
        chain = unroll(p, [AXIOM])
        assert replay_chain(chain, [AXIOM])
        assert chain_steps_ok(chain, [AXIOM])
        ends = canonicalize(Rule(chain[0], chain[-1]))
        assert ends in (canonicalize(GOAL), canonicalize(GOAL.swapped()))

    def test_metrics(self):
        p = prove([AXIOM], GOAL, "sub", budget=3)
        m = proof_metrics(p)
        assert m["events"] == len(p.steps) and len(m["sizes"]) == len(p.steps)
        assert proof_metrics(unroll(p, [AXIOM]))["events"] >= 1

    def test_axiom_proves_itself(self):
        p = prove([AXIOM], AXIOM)
        assert p and len(p) == 0

    def test_preflight_refutes(self):
        res = prove([AXIOM], parse_rule("a_ . b_ <-> b_ . a_"), budget=1, preflight_models=True)
        assert isinstance(res, NotFound) and not res and res.refuted_by.refuted

    def test_budget_exhausted_is_not_a_disproof(self):
        res = prove([AXIOM], parse_rule("a_ . b_ <-> b_ . a_"), budget=1)
        assert not res and res.refuted_by is None and "budget" in res.reason

    def test_tampered_proof_fails_replay(self):
        p = prove([AXIOM], GOAL, "sub", budget=3)
        bad = dataclasses.replace(p.steps[-1], result=parse_rule("a_ <-> a_ . a_"))
        p.steps[-1] = bad
        assert not replay(p)

    def test_json(self):
        p = prove([AXIOM], GOAL, "sub", budget=3)
        assert len(p.to_json()["events"]) == len(p)


class TestExtraction:
    @settings(max_examples=30, deadline=None)
    @given(small_rules, st.sampled_from(["sub", "cosub", "bisub"]))
    def test_every_token_has_a_replaying_proof(self, axiom, kind):
        g = evolve([axiom], 2, kind, max_tokens=400)
        for t in g.tokens:
            p = extract_proof(g, t.rule)
            assert p is not None and replay(p)
            assert count_proofs(g, t.rule) >= 1

    def test_missing_goal(self):
        g = evolve([AXIOM], 1)
        assert extract_proof(g, parse_rule("a_ <-> b_")) is None
        assert count_proofs(g, parse_rule("a_ <-> b_")) == 0


class TestTautology:
    def test_one_rewrite(self):
        goal = parse_rule("a_ . b_ <-> (b_ . a_) . b_")
        p = prove_to_tautology([AXIOM], goal, budget=100)
        assert p and p.style == "to-tautology"
        assert p.steps[-1].result.lhs == p.steps[-1].result.rhs

    def test_trivial_goal(self):
        p = prove_to_tautology([AXIOM], parse_rule("a_ <-> a_"))
        assert p and len(p) == 0

    def test_refuted_goal(self):
        res = prove_to_tautology([AXIOM], parse_rule("a_ . b_ <-> b_ . a_"))
        assert not res and res.refuted_by is not None
