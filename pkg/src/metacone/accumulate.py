"""Accumulative evolution: statements applied to statements.

Every token is a canonical rule.  An event takes an ordered pair of tokens
(code, data), rewrites one side of the data rule with the code rule, and
yields a new rule.  Tokens carry the step at which they first appeared.

Two conventions decide the counts:

* ``pairing``: ``"frontier"`` pairs only the tokens created on the previous
  step with each other (the first step pairs the axioms); ``"all"`` pairs
  every token derived so far.
* ``conflation``: how ``a <-> b`` and ``b <-> a`` are merged, see
  ``expr.canonical_rule``.  Axioms keep the orientation they were given.

The defaults (``frontier``, ``symbolic``) are the calibrated setting.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .expr import Rule, canonical_rule, leaf_count, pretty, rule_leaf_count, rule_size, to_string
from .rewrite import normalize_kind, positions, rule_results

__all__ = [
    "Token", "TokenEvent", "TokenEventGraph", "evolve", "theorem_census", "fabric",
    "add_lemma", "PAIRINGS",
]

PAIRINGS = ("frontier", "all")


@dataclass(frozen=True)
class Token:
    id: int
    rule: Rule
    step: int


@dataclass(frozen=True)
class TokenEvent:
    """``inputs`` is ``(code_id, data_id)``; ``position`` is ``(side, path)``."""

    id: int
    inputs: tuple
    outputs: tuple
    kind: str
    step: int
    direction: str
    position: tuple


@dataclass
class TokenEventGraph:
    tokens: list = field(default_factory=list)
    events: list = field(default_factory=list)
    index: dict = field(default_factory=dict)
    truncated: bool = False
    truncation: str = ""
    settings: dict = field(default_factory=dict)

    # -- construction -------------------------------------------------------

    def add_token(self, rule: Rule, step: int) -> tuple:
        """Return ``(id, is_new)``."""
        tid = self.index.get(rule)
        if tid is not None:
            return tid, False
        tid = len(self.tokens)
        self.tokens.append(Token(tid, rule, step))
        self.index[rule] = tid
        return tid, True

    def add_event(self, inputs, outputs, kind, step, direction, position) -> TokenEvent:
        ev = TokenEvent(len(self.events), tuple(inputs), tuple(outputs), kind, step,
                        direction, position)
        self.events.append(ev)
        return ev

    # -- queries ------------------------------------------------------------

    @property
    def steps(self) -> int:
        return max((t.step for t in self.tokens), default=0)

    def rules(self, step: int | None = None) -> list:
        if step is None:
            return [t.rule for t in self.tokens]
        return [t.rule for t in self.tokens if t.step == step]

    def counts(self) -> list:
        """Cumulative token counts after each step."""
        per = Counter(t.step for t in self.tokens)
        last = max(per, default=-1)
        out, total = [], 0
        for s in range(last + 1):
            total += per.get(s, 0)
            out.append(total)
        return out

    def token_id(self, rule: Rule) -> int | None:
        return self.index.get(rule)

    def producers(self) -> dict:
        """token id -> list of events producing it."""
        out: dict = {}
        for ev in self.events:
            for o in ev.outputs:
                out.setdefault(o, []).append(ev)
        return out

    def __contains__(self, rule) -> bool:
        return rule in self.index

    def __len__(self) -> int:
        return len(self.tokens)

    # -- export -------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "tokens": [{"id": t.id, "rule": to_string(t.rule), "step": t.step}
                       for t in self.tokens],
            "events": [{"id": e.id, "inputs": list(e.inputs), "outputs": list(e.outputs),
                        "kind": e.kind, "step": e.step} for e in self.events],
            "truncated": self.truncated,
            "settings": self.settings,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, ensure_ascii=False)

    def to_dot(self) -> str:
        lines = ["digraph tokens {"]
        for t in self.tokens:
            label = pretty(t.rule).replace('"', '\\"')
            lines.append(f'  t{t.id} [shape=box,label="{label}"];')
        for e in self.events:
            lines.append(f"  e{e.id} [shape=point];")
            for i in dict.fromkeys(e.inputs):
                lines.append(f"  t{i} -> e{e.id};")
            for o in e.outputs:
                lines.append(f"  e{e.id} -> t{o};")
        lines.append("}")
        return "\n".join(lines)


def _prepare_axioms(axioms: Iterable) -> list:
    # Axioms are renamed but keep the side order they were given in.
    return [canonical_rule(a, "none") for a in axioms]


def evolve(axioms: Iterable[Rule], steps: int, kind: str = "sub", *,
           pairing: str = "frontier", conflation: str = "symbolic",
           max_tokens: int = 2_000_000, max_size: int | None = None,
           max_leaf_count: int | None = None, record_events: bool = True,
           graph: TokenEventGraph | None = None) -> TokenEventGraph:
    """Grow the entailment cone of ``axioms`` for ``steps`` steps.

    ``max_leaf_count`` keeps only theorems whose leaf count (over both
    sides) is below the limit; ``max_size`` does the same with rule size.
    Exceeding ``max_tokens`` stops growth and marks the graph truncated.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    kind = normalize_kind(kind)
    if pairing not in PAIRINGS:
        raise ValueError(f"unknown pairing {pairing!r}")
    g = graph if graph is not None else TokenEventGraph()
    g.settings.update(kind=kind, pairing=pairing, conflation=conflation,
                      max_tokens=max_tokens, max_size=max_size,
                      max_leaf_count=max_leaf_count, steps=steps)
    frontier = []
    for a in _prepare_axioms(axioms):
        tid, new = g.add_token(a, 0)
        if new:
            frontier.append(tid)
    allowed = _size_filter(max_size, max_leaf_count)
    seen_events: set = set()
    for step in range(1, steps + 1):
        pool = frontier if pairing == "frontier" else list(range(len(g.tokens)))
        created = []
        # positions of each data token are computed once per step
        data_pos = {d: [positions(g.tokens[d].rule.lhs), positions(g.tokens[d].rule.rhs)]
                    for d in pool}
        for c in pool:
            code = g.tokens[c].rule
            for d in pool:
                data = g.tokens[d].rule
                for direction, si, path, result in rule_results(code, data, kind,
                                                                data_pos[d], conflation):
                    if allowed is not None and not allowed(result):
                        continue
                    tid, new = g.add_token(result, step)
                    if new:
                        created.append(tid)
                    if record_events:
                        key = (c, d, direction, si, path, tid)
                        if key not in seen_events:
                            seen_events.add(key)
                            g.add_event((c, d), (tid,), kind, step, direction, (si, path))
                    if len(g.tokens) > max_tokens:
                        g.truncated = True
                        g.truncation = f"token cap {max_tokens} exceeded at step {step}"
                        return g
        frontier = created
    return g


def _size_filter(max_size, max_leaf_count) -> Callable | None:
    if max_size is None and max_leaf_count is None:
        return None

    def ok(r: Rule) -> bool:
        if max_leaf_count is not None and rule_leaf_count(r) >= max_leaf_count:
            return False
        if max_size is not None and rule_size(r) > max_size:
            return False
        return True

    return ok


def theorem_census(g: TokenEventGraph, measure: str = "leaf_count") -> dict:
    """``{step: {size: count}}`` over all tokens, sorted.

    ``measure`` is ``"leaf_count"`` (leaves of both sides) or ``"size"``
    (node count of the rule tree, connective included).
    """
    fn = rule_leaf_count if measure == "leaf_count" else rule_size
    table: dict = {}
    for t in g.tokens:
        table.setdefault(t.step, Counter())[fn(t.rule)] += 1
    return {s: dict(sorted(c.items())) for s, c in sorted(table.items())}


def cumulative_census(g: TokenEventGraph, measure: str = "leaf_count") -> dict:
    fn = rule_leaf_count if measure == "leaf_count" else rule_size
    return dict(sorted(Counter(fn(t.rule) for t in g.tokens).items()))


@dataclass
class Fabric:
    graph: TokenEventGraph
    reached_by: dict
    overlap: int


def fabric(seeds: list, local_depth: int, kind: str = "sub", **kwargs) -> Fabric:
    """Union of the entailment cones of each seed, merged on canonical tokens.

    ``reached_by`` maps each token id of the merged graph to the indices of
    the seeds whose cone contains it; ``overlap`` counts tokens reached from
    two or more seeds.
    """
    if not seeds:
        raise ValueError("fabric needs at least one seed")
    merged = TokenEventGraph()
    reached: dict = {}
    for si, seed in enumerate(seeds):
        cone = evolve([seed], local_depth, kind, **kwargs)
        remap = {}
        for t in cone.tokens:
            tid, new = merged.add_token(t.rule, t.step)
            if not new and t.step < merged.tokens[tid].step:
                merged.tokens[tid] = Token(tid, t.rule, t.step)
            remap[t.id] = tid
            reached.setdefault(tid, set()).add(si)
        for e in cone.events:
            merged.add_event(tuple(remap[i] for i in e.inputs), tuple(remap[o] for o in e.outputs),
                             e.kind, e.step, e.direction, e.position)
        merged.truncated |= cone.truncated
    merged.settings = {"seeds": len(seeds), "local_depth": local_depth, "kind": kind}
    overlap = sum(1 for s in reached.values() if len(s) > 1)
    return Fabric(merged, {k: tuple(sorted(v)) for k, v in reached.items()}, overlap)


def add_lemma(rules: list, lemma) -> list:
    """Return ``rules`` extended by ``lemma`` unless an equal rule is there."""
    if lemma in rules:
        return list(rules)
    return [*rules, lemma]


def size_histogram(rules: Iterable[Rule]) -> dict:
    return dict(sorted(Counter(leaf_count(r.lhs) + leaf_count(r.rhs) for r in rules).items()))
