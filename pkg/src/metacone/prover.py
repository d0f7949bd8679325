"""Proof search over entailment cones, tautology-target proofs and unrolling.

A ``Proof`` is a list of events in dependency order.  Each event applies a
code statement to a data statement and produces a statement; sources are
axioms (or the designated tautology).  ``replay`` checks every event by
rerunning the rewrite.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .accumulate import TokenEventGraph, evolve
from .expr import Rule, Var, canonical_rule, rule_leaf_count, size
from .rewrite import (_directions, apply_binding, match, normalize_kind, positions, replace_at,
                      rule_results)

__all__ = [
    "ProofStep", "Proof", "NotFound", "prove", "prove_to_tautology", "unroll", "proof_metrics",
    "replay", "extract_proof", "count_proofs", "TAUTOLOGY", "replay_chain",
]

TAUTOLOGY = Rule(Var(1), Var(1), False)


@dataclass(frozen=True)
class ProofStep:
    code: Rule
    data: Rule
    result: Rule
    kind: str
    direction: str
    position: tuple          # (side, path)


@dataclass
class Proof:
    goal: Rule
    steps: list
    sources: tuple
    style: str = "forward"
    conflation: str = "symbolic"

    def __len__(self) -> int:
        return len(self.steps)

    def __bool__(self) -> bool:
        # a proof with no events (the goal is a source) is still a proof
        return True

    def to_json(self) -> dict:
        from .expr import to_string
        return {
            "goal": to_string(self.goal),
            "style": self.style,
            "sources": [to_string(s) for s in self.sources],
            "events": [{"code": to_string(s.code), "data": to_string(s.data),
                        "result": to_string(s.result), "kind": s.kind,
                        "direction": s.direction, "position": [s.position[0], list(s.position[1])]}
                       for s in self.steps],
        }


@dataclass
class NotFound:
    """Search gave up.  This is never a disproof."""

    reason: str
    stats: dict = field(default_factory=dict)
    refuted_by: object = None

    def __bool__(self) -> bool:
        return False


def _key(r: Rule, conflation: str) -> Rule:
    return canonical_rule(r, conflation)


def replay(p: Proof) -> bool:
    """Every event reproduces its result, and every input is a source or an
    earlier result."""
    known = {_key(s, p.conflation) for s in p.sources}
    known.add(_key(TAUTOLOGY, p.conflation))
    for st in p.steps:
        if _key(st.code, p.conflation) not in known or _key(st.data, p.conflation) not in known:
            return False
        target = _key(st.result, p.conflation)
        ok = False
        for direction, si, path, res in rule_results(st.code, st.data, st.kind, None, p.conflation):
            if res == target and direction == st.direction and (si, path) == st.position:
                ok = True
                break
        if not ok:
            return False
        known.add(target)
    return _key(p.goal, p.conflation) in known


# ----------------------------------------------------------------------------
# forward search


def _token_id(g: TokenEventGraph, goal: Rule, conflation: str) -> int | None:
    # axioms are stored in their given orientation, so also try that form
    tid = g.index.get(_key(goal, conflation))
    if tid is None:
        tid = g.index.get(canonical_rule(goal, "none"))
    return tid


def extract_proof(g: TokenEventGraph, goal: Rule, sources=None) -> Proof | None:
    """Smallest-step derivation of ``goal`` inside ``g``: each needed token
    takes the first event that created it."""
    conflation = g.settings.get("conflation", "symbolic")
    tid = _token_id(g, goal, conflation)
    if tid is None:
        return None
    creators: dict = {}
    for ev in g.events:
        for o in ev.outputs:
            if g.tokens[o].step == ev.step and o not in creators:
                creators[o] = ev
    order: list = []
    done: set = set()

    def visit(t):
        if t in done:
            return
        done.add(t)
        ev = creators.get(t)
        if ev is None:
            return
        for i in ev.inputs:
            visit(i)
        order.append(ev)

    visit(tid)
    steps = [ProofStep(g.tokens[ev.inputs[0]].rule, g.tokens[ev.inputs[1]].rule,
                       g.tokens[ev.outputs[0]].rule, ev.kind, ev.direction, ev.position)
             for ev in order]
    srcs = tuple(t.rule for t in g.tokens if t.step == 0) if sources is None else tuple(sources)
    return Proof(g.tokens[tid].rule, steps, srcs, "forward", conflation)


def count_proofs(g: TokenEventGraph, goal: Rule) -> int:
    """Number of distinct derivation trees of ``goal`` in ``g``, using for
    each token only events of the step that created it."""
    tid = _token_id(g, goal, g.settings.get("conflation", "symbolic"))
    if tid is None:
        return 0
    creators: dict = {}
    for ev in g.events:
        for o in ev.outputs:
            if g.tokens[o].step == ev.step:
                creators.setdefault(o, []).append(ev)
    memo: dict = {}

    def n(t):
        if t in memo:
            return memo[t]
        evs = creators.get(t)
        if not evs:
            memo[t] = 1
            return 1
        total = 0
        for ev in evs:
            prod = 1
            for i in ev.inputs:
                prod *= n(i)
            total += prod
        memo[t] = total
        return total

    return n(tid)


def prove(axioms: list, goal: Rule, kind: str = "sub", budget: int = 3, *,
          conflation: str = "symbolic", max_tokens: int = 200_000,
          preflight_models: bool = False) -> Proof | NotFound:
    """Search for ``goal`` from ``axioms``.

    The forward cone is grown step by step up to ``budget`` steps.  In the
    other direction the goal itself is rewritten by the axioms; when one of
    those rewrites lands in the forward cone the two halves are joined.
    """
    kind = normalize_kind(kind)
    goal_c = _key(goal, conflation)
    axioms_c = [canonical_rule(a, "none") for a in axioms]
    if goal_c in {_key(a, conflation) for a in axioms_c} or goal_c.lhs == goal_c.rhs:
        return Proof(goal_c, [], tuple(axioms_c), "forward", conflation)
    if preflight_models:
        verdict = _refute(axioms, goal)
        if verdict is not None:
            return NotFound("refuted by a finite model", refuted_by=verdict)
    # backward: goal rewritten once by each axiom
    backward: dict = {}
    for a in axioms_c:
        for direction, si, path, res in rule_results(a, goal_c, kind, None, conflation):
            backward.setdefault(res, (a, direction, si, path))
    g = None
    for steps in range(1, budget + 1):
        g = evolve(axioms_c, steps, kind, conflation=conflation, max_tokens=max_tokens)
        if goal_c in g.index:
            return extract_proof(g, goal_c, axioms_c)
        for mid, (a, direction, si, path) in backward.items():
            if mid in g.index:
                fwd = extract_proof(g, mid, axioms_c)
                # the goal is the reverse rewrite of ``mid`` by the same axiom
                for d2, si2, p2, res in rule_results(a, mid, kind, None, conflation):
                    if res == goal_c:
                        fwd.steps.append(ProofStep(a, mid, goal_c, kind, d2, (si2, p2)))
                        fwd.goal = goal_c
                        return fwd
        if g.truncated:
            break
    return NotFound("budget exhausted", {"tokens": len(g) if g else 0, "steps": budget,
                                         "truncated": bool(g and g.truncated)})


def _refute(axioms, goal):
    from .models import enumerate_models, infer_signature, predict
    try:
        sig = infer_signature([*axioms, goal])
    except ValueError:
        return None
    for k in (2, 3):
        ms = enumerate_models(axioms, k, sig)
        if ms:
            v = predict(ms, goal.lhs, goal.rhs)
            if v.refuted:
                return v
    return None


# ----------------------------------------------------------------------------
# proofs that end in a tautology


def prove_to_tautology(axioms: list, goal: Rule, budget: int = 20_000, *,
                       max_size: int = 40, preflight_models: bool = True) -> Proof | NotFound:
    """Rewrite the goal by the axioms until both sides coincide.

    Best-first by statement leaf count.  The resulting proof is a chain of
    substitution events whose first data is the goal; read backwards it
    derives the goal from the tautology ``x <-> x``.
    """
    axioms_c = [canonical_rule(a, "none") for a in axioms]
    start = canonical_rule(goal, "none")
    if start.lhs == start.rhs:
        return Proof(goal, [], (start,), "to-tautology", "none")
    if preflight_models:
        verdict = _refute(axioms, goal)
        if verdict is not None:
            return NotFound("refuted by a finite model", refuted_by=verdict)
    parent: dict = {start: None}
    heap = [(rule_leaf_count(start), 0, start)]
    counter = 1
    expanded = 0
    while heap and expanded < budget:
        _, _, cur = heapq.heappop(heap)
        expanded += 1
        for a in axioms_c:
            for direction, si, path, res in rule_results(a, cur, "sub", None, "none"):
                if res in parent:
                    continue
                if size(res.lhs) + size(res.rhs) > max_size:
                    continue
                parent[res] = (cur, ProofStep(a, cur, res, "sub", direction, (si, path)))
                if res.lhs == res.rhs:
                    steps = []
                    node = res
                    while parent[node] is not None:
                        prev, st = parent[node]
                        steps.append(st)
                        node = prev
                    steps.reverse()
                    return Proof(goal, steps, (start, *axioms_c), "to-tautology", "none")
                heapq.heappush(heap, (rule_leaf_count(res), counter, res))
                counter += 1
    return NotFound("budget exhausted", {"expanded": expanded, "seen": len(parent)})


# ----------------------------------------------------------------------------
# unrolling


def _instantiate_chain(chain: list, binding: dict) -> list:
    return [apply_binding(e, binding) for e in chain]


def _embed(chain: list, context, path: tuple) -> list:
    return [replace_at(context, path, e) for e in chain]


def unroll(p: Proof, axioms: list | None = None) -> list:
    """Cut elimination: a chain of expressions from the goal's left side to
    its right side in which consecutive entries differ by one application of
    an original axiom.

    Only forward proofs built from substitution events can be unrolled.
    """
    if p.style != "forward":
        raise ValueError("only forward proofs can be unrolled")
    for st in p.steps:
        if st.kind != "sub":
            raise ValueError(f"cannot unroll a {st.kind} event; only substitution events unroll")
    chains: dict = {}
    for s in (axioms if axioms is not None else p.sources):
        c = canonical_rule(s, "none")
        chains[_key(c, p.conflation)] = (c, [c.lhs, c.rhs])
    taut = _key(TAUTOLOGY, p.conflation)
    chains.setdefault(taut, (TAUTOLOGY, [Var(1)]))
    for st in p.steps:
        code_rule, code_chain = chains[_key(st.code, p.conflation)]
        data_rule, data_chain = chains[_key(st.data, p.conflation)]
        new_rule, new_chain = _unroll_event(st, code_rule, code_chain, data_rule, data_chain)
        chains.setdefault(_key(new_rule, p.conflation), (new_rule, new_chain))
    goal_rule, chain = chains[_key(p.goal, p.conflation)]
    return chain


def _unroll_event(st: ProofStep, code_rule, code_chain, data_rule, data_chain):
    """Rebuild the event on the stored orientations and return the produced
    rule with its chain."""
    si, path = st.position
    sides = [data_rule.lhs, data_rule.rhs]
    target = sides[si]
    sub = target
    for i in path:
        sub = sub[i]
    # choose the orientation of the code chain matching the event direction
    for direction, src, dst in _directions(code_rule):
        chain = code_chain if direction == "forward" else list(reversed(code_chain))
        b = match(src, sub)
        if b is None:
            continue
        inst = _instantiate_chain(chain, b)
        # generated variables keep their code names; rename them away from the data
        used = {v for v in _vars(data_rule.lhs) | _vars(data_rule.rhs)}
        extra = {v for e in inst for v in _vars(e)} - used
        if extra:
            shift = max((int(v) for v in used), default=0)
            ren = {v: Var(shift + n + 1) for n, v in enumerate(sorted(extra))}
            inst = [apply_binding(e, ren) for e in inst]
        new_side = replace_at(target, path, inst[-1])
        new_sides = list(sides)
        new_sides[si] = new_side
        produced = Rule(new_sides[0], new_sides[1], data_rule.directed)
        if canonical_rule(produced, "symbolic") != canonical_rule(st.result, "symbolic") and \
                canonical_rule(produced, "full") != canonical_rule(st.result, "full"):
            continue
        walk = _embed(inst, target, path)           # target ... new_side
        if si == 0:
            chain_out = list(reversed(walk)) + data_chain[1:]
        else:
            chain_out = data_chain + walk[1:]
        return produced, chain_out
    raise ValueError("event does not replay as a substitution")


def _vars(e) -> set:
    if type(e) is Var:
        return {e}
    if isinstance(e, tuple):
        out = set()
        for x in e:
            out |= _vars(x)
        return out
    return set()


def replay_chain(chain: list, axioms: list) -> bool:
    """Consecutive expressions differ by one axiom application somewhere."""
    from .rewrite import substitutions
    from .expr import canonicalize
    for a, b in zip(chain, chain[1:]):
        if a == b:
            continue
        target = canonicalize(b)
        if not any(ev.result == target for ax in axioms for ev in substitutions(ax, canonicalize(a))):
            if not _step_with_names(a, b, axioms):
                return False
    return True


def _step_with_names(a, b, axioms) -> bool:
    # direct check keeping variable names: find a position where a rule
    # instance turns a into b
    for path, sub in positions(a):
        for ax in axioms:
            for _, src, dst in _directions(ax):
                bind = match(src, sub)
                if bind is None:
                    continue
                res = replace_at(a, path, apply_binding(dst, bind))
                if _equal_up_to_fresh(res, b):
                    return True
    return False


def _equal_up_to_fresh(x, y) -> bool:
    """Equal, allowing variables of ``x`` absent from the rule match to be
    named arbitrarily (generated variables)."""
    from .expr import canonicalize
    return canonicalize(x) == canonicalize(y)


def proof_metrics(p) -> dict:
    """Event count and intermediate sizes of a proof or expression chain."""
    if isinstance(p, Proof):
        sizes = [size(s.result.lhs) + size(s.result.rhs) + 1 for s in p.steps]
        ends = size(p.goal.lhs) + size(p.goal.rhs) + 1
        return {"events": len(p.steps), "max_intermediate_size": max(sizes, default=0),
                "sizes": sizes, "exceeds_endpoints": any(x > ends for x in sizes)}
    chain = list(p)
    sizes = [size(e) for e in chain]
    ends = max(sizes[0], sizes[-1]) if sizes else 0
    return {"events": max(len(chain) - 1, 0), "max_intermediate_size": max(sizes, default=0),
            "sizes": sizes, "exceeds_endpoints": any(x > ends for x in sizes)}
