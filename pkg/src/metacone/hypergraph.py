"""Hypergraph rewriting, ordinary and accumulative, at desk scale.

A hypergraph is a sorted tuple of hyperedges, each a tuple of small ints.
Rules are pairs of hypergraphs sharing pattern vertices; vertices that only
occur on the right are generated fresh.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import permutations, product

from .accumulate import TokenEventGraph
from .multiway import MultiwayGraph, grow

__all__ = [
    "HypergraphRule", "parse_hypergraph", "parse_hg_rule", "show_hypergraph", "hg_canonical",
    "hg_rule_canonical", "hg_matches", "hg_rewrite", "hg_successors", "hg_multiway",
    "hg_accumulate", "vertices", "MAX_CANONICAL_VERTICES",
]

MAX_CANONICAL_VERTICES = 12


def vertices(h) -> list:
    return sorted({v for e in h for v in e})


def show_hypergraph(h) -> str:
    return "{" + ",".join("{" + ",".join(map(str, e)) + "}" for e in h) + "}"


def parse_hypergraph(text: str, names: dict | None = None):
    """``{{1,2},{2,3}}``; vertex names may be ints or identifiers."""
    names = {} if names is None else names
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ValueError(f"not a hypergraph: {text!r}")
    inner = text[1:-1].strip()
    edges = []
    for m in re.finditer(r"\{([^{}]*)\}", inner):
        e = []
        for tok in m.group(1).split(","):
            tok = tok.strip()
            if not tok:
                raise ValueError("empty vertex name")
            if tok not in names:
                names[tok] = len(names) + 1
            e.append(names[tok])
        edges.append(tuple(e))
    if not edges and inner:
        raise ValueError(f"not a hypergraph: {text!r}")
    return tuple(sorted(edges))


@dataclass(frozen=True)
class HypergraphRule:
    lhs: tuple
    rhs: tuple
    directed: bool = True

    def __str__(self) -> str:
        arrow = "->" if self.directed else "<->"
        return f"{show_hypergraph(self.lhs)} {arrow} {show_hypergraph(self.rhs)}"


def parse_hg_rule(text: str) -> HypergraphRule:
    for arrow, directed in (("<->", False), ("->", True)):
        if arrow in text:
            a, b = text.split(arrow, 1)
            names: dict = {}
            return HypergraphRule(parse_hypergraph(a, names), parse_hypergraph(b, names), directed)
    raise ValueError(f"no arrow in {text!r}")


# ----------------------------------------------------------------------------
# canonical forms


def _relabel(parts, perm: dict):
    return tuple(tuple(sorted(tuple(perm[v] for v in e) for e in h)) for h in parts)


def _colors(parts, vs) -> dict:
    # iterated refinement on (part, edge length, position) incidences
    color = {v: 0 for v in vs}
    for _ in range(len(vs)):
        sig = {}
        for v in vs:
            inc = []
            for pi, h in enumerate(parts):
                for e in h:
                    for i, x in enumerate(e):
                        if x == v:
                            inc.append((pi, len(e), i, tuple(color[y] for y in e)))
            sig[v] = (color[v], tuple(sorted(inc)))
        ranks = {s: r for r, s in enumerate(sorted(set(sig.values())))}
        new = {v: ranks[sig[v]] for v in vs}
        if len(set(new.values())) == len(set(color.values())):
            color = new
            break
        color = new
    return color


def _canonical_parts(parts):
    vs = sorted({v for h in parts for e in h for v in e})
    if len(vs) > MAX_CANONICAL_VERTICES:
        raise ValueError(f"canonicalization limited to {MAX_CANONICAL_VERTICES} vertices")
    if len(vs) <= 8:
        classes = [vs]
    else:
        color = _colors(parts, vs)
        classes = [[v for v in vs if color[v] == c] for c in sorted(set(color.values()))]
    best = None
    for choice in product(*(permutations(c) for c in classes)):
        order = [v for block in choice for v in block]
        perm = {v: i + 1 for i, v in enumerate(order)}
        cand = _relabel(parts, perm)
        if best is None or cand < best:
            best = cand
    return best if best is not None else tuple(() for _ in parts)


def hg_canonical(h):
    """Minimal sorted edge list over all relabelings onto ``1..n``."""
    return _canonical_parts((tuple(h),))[0]


def hg_rule_canonical(r: HypergraphRule) -> HypergraphRule:
    """Joint relabeling of both sides; two-way rules also take the smaller
    orientation."""
    lhs, rhs = _canonical_parts((r.lhs, r.rhs))
    if not r.directed:
        l2, r2 = _canonical_parts((r.rhs, r.lhs))
        if (l2, r2) < (lhs, rhs):
            lhs, rhs = l2, r2
    return HypergraphRule(lhs, rhs, r.directed)


# ----------------------------------------------------------------------------
# matching and rewriting


def hg_matches(pattern, h, injective: bool = False):
    """Yield ``(edge_indices, binding)`` for each way of mapping the pattern
    edges onto distinct edges of ``h``."""
    pattern = list(pattern)
    h = list(h)

    def go(i, used, binding):
        if i == len(pattern):
            yield tuple(used), dict(binding)
            return
        pe = pattern[i]
        for j, e in enumerate(h):
            if j in used or len(e) != len(pe):
                continue
            added = []
            ok = True
            for pv, v in zip(pe, e):
                b = binding.get(pv)
                if b is None:
                    if injective and v in binding.values():
                        ok = False
                        break
                    binding[pv] = v
                    added.append(pv)
                elif b != v:
                    ok = False
                    break
            if ok:
                yield from go(i + 1, used + [j], binding)
            for pv in added:
                del binding[pv]

    yield from go(0, [], {})


def hg_rewrite(src, dst, h, injective: bool = False, reserved: int = 0):
    """All results of replacing a match of ``src`` in ``h`` by ``dst``."""
    base = max([v for e in h for v in e] + [reserved], default=0)
    out = []
    for used, binding in hg_matches(src, h, injective):
        fresh = {}
        b = dict(binding)
        for e in dst:
            for pv in e:
                if pv not in b:
                    fresh[pv] = base + len(fresh) + 1
                    b[pv] = fresh[pv]
        keep = [e for j, e in enumerate(h) if j not in used]
        new = tuple(sorted(keep + [tuple(b[pv] for pv in e) for e in dst]))
        out.append((used, new))
    return out


def _dirs(r: HypergraphRule):
    yield "forward", r.lhs, r.rhs
    if not r.directed:
        yield "backward", r.rhs, r.lhs


def hg_successors(rules, injective: bool = False):
    if isinstance(rules, HypergraphRule):
        rules = [rules]

    def succ(h):
        out = []
        for ri, r in enumerate(rules):
            for direction, src, dst in _dirs(r):
                for used, new in hg_rewrite(src, dst, h, injective):
                    out.append(((ri, direction, used), hg_canonical(new)))
        return out
    return succ


def hg_multiway(rules, initial, steps: int, *, injective: bool = False,
                max_nodes: int = 100_000) -> MultiwayGraph:
    if isinstance(initial, str):
        initial = parse_hypergraph(initial)
    return grow(hg_successors(rules, injective), [hg_canonical(initial)], steps,
                max_nodes=max_nodes)


def hg_accumulate(rules, steps: int, *, injective: bool = False, pairing: str = "all",
                  max_tokens: int = 100_000, max_edges: int = 10) -> TokenEventGraph:
    """Rules applied to rules: the code rule rewrites a subhypergraph of one
    side of the data rule.  Generated vertices get fresh numbers beyond both
    sides of the data rule; tokens are merged up to joint isomorphism."""
    if isinstance(rules, HypergraphRule):
        rules = [rules]
    g = TokenEventGraph()
    g.settings.update(kind="hypergraph", injective=injective, pairing=pairing, steps=steps)
    frontier = []
    for r in rules:
        tid, new = g.add_token(hg_rule_canonical(r), 0)
        if new:
            frontier.append(tid)
    for step in range(1, steps + 1):
        pool = frontier if pairing == "frontier" else list(range(len(g.tokens)))
        created = []
        for c in pool:
            code = g.tokens[c].rule
            for d in pool:
                data = g.tokens[d].rule
                top = max([v for h in (data.lhs, data.rhs) for e in h for v in e], default=0)
                for direction, src, dst in _dirs(code):
                    for si, side in enumerate((data.lhs, data.rhs)):
                        for used, new_side in hg_rewrite(src, dst, side, injective, top):
                            if len(new_side) > max_edges:
                                continue
                            sides = [data.lhs, data.rhs]
                            sides[si] = new_side
                            res = hg_rule_canonical(HypergraphRule(sides[0], sides[1], data.directed))
                            tid, new = g.add_token(res, step)
                            if new:
                                created.append(tid)
                            g.add_event((c, d), (tid,), "hypergraph", step, direction, (si, used))
                            if len(g.tokens) > max_tokens:
                                g.truncated = True
                                g.truncation = f"token cap {max_tokens} exceeded at step {step}"
                                return g
        frontier = created
    return g
