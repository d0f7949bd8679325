"""Multiway graphs of states under rewriting, with proof paths and droplets.

A multiway system is given by a successor function ``state -> iterable of
(label, state)``.  Expression systems build one from a list of rules; string
systems and game graphs plug in their own.  ``grow`` expands breadth-first,
merging identical states, and records each state's first step.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable

from .expr import App, OP, Rule, canonicalize, op, pretty, size, sort_key
from .rewrite import substitutions

__all__ = [
    "MultiwayGraph", "ProofPath", "grow", "expr_successors", "find_paths", "shortest_paths",
    "count_paths", "path_of_length", "condense", "Partition", "multiplication_graph", "hanoi_system",
    "words", "comb",
]


@dataclass(frozen=True)
class ProofPath:
    nodes: tuple
    labels: tuple

    def __len__(self) -> int:
        return len(self.labels)


@dataclass
class MultiwayGraph:
    initial: list
    step: dict = field(default_factory=dict)        # state -> first step
    succ: dict = field(default_factory=dict)        # state -> list of (label, state)
    truncated: bool = False
    truncation: str = ""
    undirected: bool = False
    steps: int = 0

    @property
    def nodes(self) -> list:
        return list(self.step)

    def edges(self) -> list:
        return [(s, t, lab) for s, out in self.succ.items() for lab, t in out]

    def neighbors(self, s) -> list:
        seen = dict.fromkeys(t for _, t in self.succ.get(s, ()))
        return list(seen)

    def layers(self, steps: int | None = None) -> list:
        """Multiway layering: layer t holds every state reachable by exactly
        t applications, so a state may appear in several layers."""
        steps = self.steps if steps is None else steps
        out = [list(dict.fromkeys(self.initial))]
        for _ in range(steps):
            nxt = {}
            for s in out[-1]:
                for _, t in self.succ.get(s, ()):
                    nxt.setdefault(t, None)
            out.append(list(nxt))
        return out

    def parents_in_layer(self, t: int) -> dict:
        """child -> set of parents for layer ``t`` (parents from layer t-1)."""
        layers = self.layers(t)
        if t == 0:
            return {s: set() for s in layers[0]}
        out: dict = {s: set() for s in layers[t]}
        for p in layers[t - 1]:
            for _, c in self.succ.get(p, ()):
                if c in out:
                    out[c].add(p)
        return out

    def components(self) -> list:
        """Connected components of the underlying undirected graph."""
        adj: dict = {s: set() for s in self.step}
        for s, t, _ in self.edges():
            if t in adj:
                adj[s].add(t)
                adj[t].add(s)
        seen, comps = set(), []
        for s in self.step:
            if s in seen:
                continue
            comp, queue = [], [s]
            seen.add(s)
            while queue:
                x = queue.pop()
                comp.append(x)
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        queue.append(y)
            comps.append(comp)
        return comps

    def to_json(self, label: Callable = str) -> dict:
        ids = {s: i for i, s in enumerate(self.step)}
        return {
            "nodes": [{"id": ids[s], "label": label(s), "step": k} for s, k in self.step.items()],
            "edges": [{"src": ids[s], "dst": ids[t], "label": str(lab)}
                      for s, t, lab in self.edges() if t in ids],
            "truncated": self.truncated,
        }

    def to_dot(self, label: Callable = str) -> str:
        ids = {s: i for i, s in enumerate(self.step)}
        lines = ["digraph multiway {"]
        for s, i in ids.items():
            lines.append(f'  n{i} [label="{json.dumps(label(s))[1:-1]}"];')
        for s, t, _ in self.edges():
            if t in ids:
                lines.append(f"  n{ids[s]} -> n{ids[t]};")
        lines.append("}")
        return "\n".join(lines)


def _state_key(s):
    try:
        return (0, sort_key(s))
    except TypeError:
        return (1, repr(s))


def expr_successors(rules: Iterable[Rule], max_size: int | None = 64) -> Callable:
    """Successor function applying each rule by substitution everywhere."""
    rules = list(rules)

    def succ(e):
        out = []
        for ri, r in enumerate(rules):
            for ev in substitutions(r, e):
                if max_size is not None and size(ev.result) > max_size:
                    continue
                out.append(((ri, ev.direction, ev.position), ev.result))
        return out

    return succ


def grow(rules_or_successors, initial: Iterable[Hashable], steps: int, *,
         max_nodes: int = 1_000_000, max_size: int | None = 64) -> MultiwayGraph:
    """Breadth-first multiway expansion for ``steps`` steps.

    ``rules_or_successors`` is either a list of rules (expressions are then
    rewritten by substitution, canonicalizing results) or a successor
    function.  States larger than ``max_size`` are dropped and reaching
    ``max_nodes`` stops growth; both are reported on the graph.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if callable(rules_or_successors):
        succ_fn = rules_or_successors
        undirected = False
    else:
        rules = list(rules_or_successors)
        succ_fn = expr_successors(rules, max_size)
        undirected = all(not r.directed for r in rules)
        initial = [canonicalize(e) for e in initial]
    g = MultiwayGraph(initial=list(dict.fromkeys(initial)), undirected=undirected, steps=steps)
    for s in g.initial:
        g.step[s] = 0
    frontier = list(g.initial)
    for t in range(1, steps + 1):
        nxt = []
        for s in frontier:
            out = list(succ_fn(s))
            g.succ[s] = out
            for _, c in out:
                if c not in g.step:
                    if len(g.step) >= max_nodes:
                        g.truncated = True
                        g.truncation = f"node cap {max_nodes} reached at step {t}"
                        continue
                    g.step[c] = t
                    nxt.append(c)
        frontier = nxt
    # the last frontier is not expanded; its outgoing edges stay unknown
    for s in frontier:
        g.succ.setdefault(s, [])
    return g


# ----------------------------------------------------------------------------
# paths


def _adjacency(g: MultiwayGraph, multi: bool = False) -> dict:
    adj: dict = {}
    for s, out in g.succ.items():
        targets = [t for _, t in out if t in g.step]
        adj[s] = targets if multi else list(dict.fromkeys(targets))
    return adj


def shortest_paths(g: MultiwayGraph, src, dst, limit: int | None = None) -> list:
    """All shortest node paths from ``src`` to ``dst`` (as ProofPaths),
    sorted by node order.  Empty if unreachable within ``g``."""
    if src not in g.step or dst not in g.step:
        return []
    if src == dst:
        return [ProofPath((src,), ())]
    adj = _adjacency(g)
    dist = {src: 0}
    preds: dict = {src: []}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        if x == dst:
            break
        for y in adj.get(x, ()):
            if y not in dist:
                dist[y] = dist[x] + 1
                preds[y] = [x]
                queue.append(y)
            elif dist[y] == dist[x] + 1:
                preds[y].append(x)
    if dst not in dist:
        return []
    paths = []

    def back(node, acc):
        if limit is not None and len(paths) >= limit:
            return
        if node == src:
            paths.append(tuple(reversed(acc)))
            return
        for p in preds[node]:
            back(p, acc + [p])

    back(dst, [dst])
    paths.sort(key=lambda p: [_state_key(x) for x in p])
    return [_label_path(g, p) for p in paths]


def _label_path(g: MultiwayGraph, nodes: tuple) -> ProofPath:
    labels = []
    for a, b in zip(nodes, nodes[1:]):
        labs = sorted((lab for lab, t in g.succ.get(a, ()) if t == b), key=repr)
        labels.append(labs[0] if labs else None)
    return ProofPath(tuple(nodes), tuple(labels))


def find_paths(g: MultiwayGraph, src, dst, max_len: int | None = None,
               all: bool = False, multi_edges: bool = False) -> list:
    """One shortest path, or with ``all=True`` every simple path of at most
    ``max_len`` edges.  ``multi_edges`` counts parallel edges (different
    events between the same states) as distinct paths."""
    if not all:
        paths = shortest_paths(g, src, dst, limit=None)
        return paths[:1]
    if src not in g.step or dst not in g.step:
        return []
    adj = _adjacency(g, multi_edges)
    out = []
    stack = [(src, (src,))]
    on_path = {src}

    def dfs(node, path):
        if node == dst:
            out.append(path)
            return
        if max_len is not None and len(path) - 1 >= max_len:
            return
        for y in adj.get(node, ()):
            if y in on_path:
                continue
            on_path.add(y)
            dfs(y, path + (y,))
            on_path.discard(y)

    del stack
    dfs(src, (src,))
    out.sort(key=lambda p: (len(p), [_state_key(x) for x in p]))
    return [_label_path(g, p) for p in out]


def path_of_length(g: MultiwayGraph, src, dst, length: int) -> ProofPath | None:
    """A simple path of exactly ``length`` edges, found by depth-first search
    pruned with distances to ``dst``; ``None`` if there is none in ``g``."""
    if src not in g.step or dst not in g.step:
        return None
    adj = _adjacency(g)
    back: dict = {}
    for a, outs in adj.items():
        for b in outs:
            back.setdefault(b, []).append(a)
    dist = {dst: 0}
    queue = deque([dst])
    while queue:
        x = queue.popleft()
        for y in back.get(x, ()):
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    if dist.get(src, length + 1) > length:
        return None
    on_path = {src}
    path = [src]

    def dfs(node, left):
        if node == dst:
            return left == 0
        for y in sorted(adj.get(node, ()), key=_state_key):
            if y in on_path or dist.get(y, left) > left - 1:
                continue
            if y == dst and left != 1:
                continue
            on_path.add(y)
            path.append(y)
            if dfs(y, left - 1):
                return True
            path.pop()
            on_path.discard(y)
        return False

    if dfs(src, length):
        return _label_path(g, tuple(path))
    return None


def count_paths(g: MultiwayGraph, src, dst, max_len: int | None = None,
                multi_edges: bool = False) -> int:
    return len(find_paths(g, src, dst, max_len, all=True, multi_edges=multi_edges))


# ----------------------------------------------------------------------------
# droplets


def comb(atoms: Iterable) -> object:
    """Left-nested product ``((x1∘x2)∘x3)∘...`` of the given atoms."""
    atoms = list(atoms)
    e = atoms[0]
    for a in atoms[1:]:
        e = op(e, a)
    return e


def words(atoms: Iterable, length: int) -> list:
    """All left-nested words of exactly ``length`` letters."""
    return [comb(w) for w in itertools.product(list(atoms), repeat=length)]


@dataclass
class Partition:
    components: list          # list of lists of states, largest first
    representatives: list
    stable: bool              # component count equals the previous step's
    counts: list              # component count after each step
    graph: MultiwayGraph

    def component_of(self, state) -> int | None:
        for i, comp in enumerate(self.components):
            if state in comp:
                return i
        return None


def _sorted_components(comps: list) -> list:
    comps = [sorted(c, key=_state_key) for c in comps]
    comps.sort(key=lambda c: (-len(c), _state_key(c[0])))
    return comps


def condense(rules: list, seeds: Iterable, steps: int, *, max_size: int = 64,
             max_nodes: int = 1_000_000) -> Partition:
    """Connected components of the union multiway graph grown from ``seeds``.

    ``counts`` lists the component count after 0..steps steps; ``stable``
    tells whether the last two agree.
    """
    seeds = [canonicalize(s) for s in seeds]
    counts = []
    g = None
    for t in range(steps + 1):
        g = grow(rules, seeds, t, max_size=max_size, max_nodes=max_nodes)
        counts.append(len(g.components()))
    comps = _sorted_components(g.components())
    reps = [c[0] for c in comps]
    stable = len(counts) < 2 or counts[-1] == counts[-2]
    return Partition(comps, reps, stable, counts, g)


def multiplication_graph(partition: Partition, generators: Iterable, rules: list | None = None,
                         *, head=OP, extra_steps: int = 4, max_size: int = 64) -> list:
    """Edges ``(i, generator, j)`` with ``rep(i)∘g`` in component ``j``.

    Products not already in the partition are grown with ``rules`` for up
    to ``extra_steps`` steps; if they still meet no component the edge is
    ``(i, g, None)``, an unresolved product.
    """
    index = {}
    for i, comp in enumerate(partition.components):
        for s in comp:
            index[s] = i
    edges = []
    for i, rep in enumerate(partition.representatives):
        for gen in generators:
            prod = canonicalize(App(head, (rep, gen)))
            j = index.get(prod)
            if j is None and rules is not None:
                h = grow(rules, [prod], extra_steps, max_size=max_size)
                hits = {index[s] for s in h.step if s in index}
                if len(hits) == 1:
                    j = hits.pop()
            edges.append((i, gen, j))
    return edges


# ----------------------------------------------------------------------------
# Towers of Hanoi


def hanoi_system(disks: int, pegs: int = 3) -> tuple:
    """``(successors, initial)`` for the Towers of Hanoi game graph.

    A state is a tuple giving the peg of each disk, smallest disk first.
    A move takes the top disk of one peg onto a peg whose top disk is
    larger (or that is empty).
    """
    if disks < 1 or pegs < 3:
        raise ValueError("need at least one disk and three pegs")

    def succ(state):
        tops = {}
        for d, p in enumerate(state):
            tops.setdefault(p, d)
        out = []
        for src, d in sorted(tops.items()):
            for dst in range(pegs):
                if dst == src:
                    continue
                if dst in tops and tops[dst] < d:
                    continue
                new = list(state)
                new[d] = dst
                out.append(((d, src, dst), tuple(new)))
        return out

    return succ, (0,) * disks


def label_of(state) -> str:
    if isinstance(state, (App, str)) or type(state).__name__ in ("Var", "Atom"):
        try:
            return pretty(state)
        except Exception:
            return str(state)
    return str(state)
