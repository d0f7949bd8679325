"""Theorem dependency graphs: closure sizes, axiom depth, unrolled copies."""

from __future__ import annotations

import csv
import io
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from graphlib import CycleError, TopologicalSorter

__all__ = [
    "DependencyGraph", "DependencyCycle", "read_csv", "closure_size", "axiom_profile",
    "unrolled_copies", "census", "census_csv",
]


class DependencyCycle(ValueError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("dependency cycle: " + " -> ".join(map(str, self.cycle)))


@dataclass
class DependencyGraph:
    """``prereqs[n]`` lists what theorem ``n`` uses.  Nodes without a kind
    tag count as axioms when they use nothing."""

    prereqs: dict = field(default_factory=dict)
    kind: dict = field(default_factory=dict)
    area: dict = field(default_factory=dict)

    def add_edge(self, theorem, prerequisite) -> None:
        self.prereqs.setdefault(theorem, [])
        if prerequisite not in self.prereqs[theorem]:
            self.prereqs[theorem].append(prerequisite)
        self.prereqs.setdefault(prerequisite, [])

    def add_node(self, node, kind: str | None = None, area: str | None = None) -> None:
        self.prereqs.setdefault(node, [])
        if kind is not None:
            if kind not in ("axiom", "theorem"):
                raise ValueError(f"unknown kind {kind!r}")
            self.kind[node] = kind
        if area is not None:
            self.area[node] = area

    @property
    def nodes(self) -> list:
        return list(self.prereqs)

    def edges(self) -> list:
        return [(t, p) for t, ps in self.prereqs.items() for p in ps]

    def axioms(self) -> list:
        return [n for n in self.prereqs
                if self.kind.get(n) == "axiom" or (n not in self.kind and not self.prereqs[n])]

    def order(self) -> list:
        """Prerequisites before dependents; raises ``DependencyCycle``."""
        try:
            return list(TopologicalSorter(self.prereqs).static_order())
        except CycleError as exc:
            raise DependencyCycle(exc.args[1]) from None

    def check(self) -> None:
        self.order()
        for n in self.prereqs:
            if self.kind.get(n) == "axiom" and self.prereqs[n]:
                raise ValueError(f"axiom {n!r} has prerequisites")


def read_csv(edges_text: str, nodes_text: str | None = None) -> DependencyGraph:
    """Edges as ``theorem,prerequisite`` rows; optional ``node,kind,area``
    sidecar.  A header row is skipped when its first field is ``theorem`` or
    ``node``."""
    g = DependencyGraph()
    for row in csv.reader(io.StringIO(edges_text)):
        if not row or not "".join(row).strip():
            continue
        if row[0].strip().lower() == "theorem":
            continue
        if len(row) == 1:
            g.add_node(row[0].strip())
            continue
        g.add_edge(row[0].strip(), row[1].strip())
    if nodes_text:
        for row in csv.reader(io.StringIO(nodes_text)):
            if not row or row[0].strip().lower() == "node":
                continue
            kind = row[1].strip() if len(row) > 1 and row[1].strip() else None
            area = row[2].strip() if len(row) > 2 and row[2].strip() else None
            g.add_node(row[0].strip(), kind, area)
    g.check()
    return g


def _require(g: DependencyGraph, node) -> None:
    if node not in g.prereqs:
        raise KeyError(f"unknown node {node!r}")


def _closure(g: DependencyGraph, node) -> set:
    seen, stack = set(), list(g.prereqs[node])
    while stack:
        x = stack.pop()
        if x not in seen:
            seen.add(x)
            stack.extend(g.prereqs[x])
    return seen


def closure_size(g: DependencyGraph, node) -> int:
    """Number of distinct prerequisites reachable from ``node``."""
    _require(g, node)
    g.order()
    return len(_closure(g, node))


def axiom_profile(g: DependencyGraph, node) -> dict:
    """Minimum depth to each axiom reached, and the share of all axioms."""
    _require(g, node)
    g.order()
    axioms = set(g.axioms())
    depth = {node: 0}
    queue = deque([node])
    while queue:
        x = queue.popleft()
        for p in g.prereqs[x]:
            if p not in depth:
                depth[p] = depth[x] + 1
                queue.append(p)
    reached = {a: depth[a] for a in axioms if a in depth and a != node}
    if node in axioms:
        reached = {}
    return {
        "axioms": dict(sorted(reached.items(), key=lambda kv: (kv[1], str(kv[0])))),
        "fraction": Fraction(len(reached), len(axioms)) if axioms else Fraction(0),
        "intermediates": len(_closure(g, node) - axioms),
    }


def unrolled_copies(g: DependencyGraph, node) -> dict:
    """Copies of each axiom in the fully unrolled proof tree of ``node``:
    the number of distinct downward paths from ``node`` to that axiom."""
    _require(g, node)
    order = g.order()
    axioms = set(g.axioms())
    memo: dict = {}
    for n in order:
        if n in axioms:
            memo[n] = Counter({n: 1})
            continue
        c = Counter()
        for p in g.prereqs[n]:
            c.update(memo[p])
        memo[n] = c
    if node in axioms:
        return {}
    return dict(sorted(memo[node].items(), key=lambda kv: str(kv[0])))


def census(g: DependencyGraph) -> dict:
    """Closure-size and axiom-fraction histograms plus an area-by-area edge
    tally."""
    order = g.order()
    axioms = set(g.axioms())
    below: dict = {}
    for n in order:
        s = set()
        for p in g.prereqs[n]:
            s.add(p)
            s |= below[p]
        below[n] = s
    closures = Counter(len(below[n]) for n in g.prereqs)
    fractions = Counter()
    if axioms:
        for n in g.prereqs:
            if n not in axioms:
                fractions[Fraction(len(below[n] & axioms), len(axioms))] += 1
    areas = sorted({g.area.get(n, "") for n in g.prereqs})
    blocks = {a: {b: 0 for b in areas} for a in areas}
    for t, p in g.edges():
        blocks[g.area.get(t, "")][g.area.get(p, "")] += 1
    return {
        "nodes": len(g.prereqs),
        "edges": len(g.edges()),
        "closure_sizes": dict(sorted(closures.items())),
        "axiom_fractions": {str(k): v for k, v in sorted(fractions.items())},
        "areas": areas,
        "area_blocks": blocks,
    }


def census_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["closure_size", "count"])
    for k, v in report["closure_sizes"].items():
        w.writerow([k, v])
    w.writerow([])
    w.writerow(["area"] + report["areas"])
    for a in report["areas"]:
        w.writerow([a] + [report["area_blocks"][a][b] for b in report["areas"]])
    return buf.getvalue()
