"""Branchial graphs: same-step nodes linked by a shared immediate ancestor."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .accumulate import TokenEventGraph
from .expr import leaf_count
from .multiway import MultiwayGraph, _state_key

__all__ = ["BranchialGraph", "branchial", "components", "density", "adjacency_csv"]


@dataclass(frozen=True)
class BranchialGraph:
    nodes: tuple
    edges: frozenset          # frozensets {u, v}
    step: int
    weights: tuple = ()

    def adjacency(self) -> list:
        idx = {n: i for i, n in enumerate(self.nodes)}
        m = [[0] * len(self.nodes) for _ in self.nodes]
        for e in self.edges:
            u, v = tuple(e)
            m[idx[u]][idx[v]] = m[idx[v]][idx[u]] = 1
        return m

    def neighbors(self, n) -> set:
        out = set()
        for e in self.edges:
            if n in e:
                out |= e - {n}
        return out


def _edges_from_parents(parents: dict) -> frozenset:
    by_parent: dict = {}
    for child, ps in parents.items():
        for p in ps:
            by_parent.setdefault(p, []).append(child)
    edges = set()
    for kids in by_parent.values():
        for u, v in combinations(dict.fromkeys(kids), 2):
            if u != v:
                edges.add(frozenset((u, v)))
    return frozenset(edges)


def branchial(g, step: int, layering: str = "first") -> BranchialGraph:
    """Branchial graph of ``g`` at ``step``.

    For a token-event graph the nodes are the tokens first created at
    ``step``; two are linked when events producing them share an input
    token.  For a multiway graph ``layering`` picks the slice: ``"first"``
    takes the states first reached at ``step`` with parents first reached
    at ``step-1``; ``"walk"`` takes every state reachable in exactly
    ``step`` moves, so a state can recur in several slices.
    """
    if isinstance(g, TokenEventGraph):
        if step < 0 or step > g.steps:
            raise ValueError(f"step {step} outside 0..{g.steps}")
        nodes = tuple(t.id for t in g.tokens if t.step == step)
        members = set(nodes)
        parents: dict = {n: set() for n in nodes}
        for ev in g.events:
            if ev.step != step:
                continue
            for o in ev.outputs:
                if o in members:
                    parents[o].update(ev.inputs)
        weights = tuple(leaf_count(g.tokens[n].rule.lhs) + leaf_count(g.tokens[n].rule.rhs)
                        for n in nodes)
        return BranchialGraph(nodes, _edges_from_parents(parents), step, weights)
    if isinstance(g, MultiwayGraph):
        if step < 0 or step > g.steps:
            raise ValueError(f"step {step} outside 0..{g.steps}")
        if layering == "walk":
            parents = g.parents_in_layer(step)
        elif layering == "first":
            parents = {s: set() for s, k in g.step.items() if k == step}
            for p, k in g.step.items():
                if k == step - 1:
                    for _, c in g.succ.get(p, ()):
                        if c in parents:
                            parents[c].add(p)
        else:
            raise ValueError(f"unknown layering {layering!r}")
        nodes = tuple(sorted(parents, key=_state_key))
        return BranchialGraph(nodes, _edges_from_parents(parents), step)
    raise TypeError("expected a TokenEventGraph or MultiwayGraph")


def components(b: BranchialGraph) -> list:
    """Connected components, largest first, ties by smallest member."""
    adj = {n: set() for n in b.nodes}
    for e in b.edges:
        u, v = tuple(e)
        adj[u].add(v)
        adj[v].add(u)
    order = {n: i for i, n in enumerate(b.nodes)}
    seen, comps = set(), []
    for n in b.nodes:
        if n in seen:
            continue
        comp, stack = [], [n]
        seen.add(n)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        comps.append(sorted(comp, key=order.__getitem__))
    comps.sort(key=lambda c: (-len(c), order[c[0]]))
    return comps


def density(b: BranchialGraph) -> Fraction | None:
    """Edges over ``n choose 2`` as an exact fraction; ``None`` below two nodes."""
    n = len(b.nodes)
    if n < 2:
        return None
    return Fraction(len(b.edges), n * (n - 1) // 2)


def adjacency_csv(b: BranchialGraph, label=str) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow([""] + [label(n) for n in b.nodes])
    for n, row in zip(b.nodes, b.adjacency()):
        w.writerow([label(n)] + row)
    return buf.getvalue()
