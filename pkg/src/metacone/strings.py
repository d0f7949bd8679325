"""String rewriting: multiway systems, accumulative systems, truth analysis."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .accumulate import PAIRINGS, TokenEventGraph
from .multiway import MultiwayGraph, grow

__all__ = [
    "StringRule", "parse_string_rule", "parse_string_rules", "string_successors",
    "string_multiway", "string_accumulate", "negate", "truth_analysis", "TruthReport",
    "statement", "show_statement",
]


@dataclass(frozen=True)
class StringRule:
    lhs: str
    rhs: str
    directed: bool = False

    def __post_init__(self):
        if not self.lhs:
            raise ValueError("empty left-hand side")

    def __str__(self) -> str:
        return f"{self.lhs} {'->' if self.directed else '<->'} {self.rhs}"


def parse_string_rule(text: str) -> StringRule:
    for arrow, directed in (("<->", False), ("↔", False), ("->", True), ("→", True)):
        if arrow in text:
            lhs, rhs = (s.strip() for s in text.split(arrow, 1))
            return StringRule(lhs, rhs, directed)
    raise ValueError(f"no arrow in {text!r}")


def parse_string_rules(text: str) -> list:
    return [parse_string_rule(line) for line in text.splitlines()
            if line.strip() and not line.lstrip().startswith("#")]


def _occurrences(s: str, sub: str):
    i = s.find(sub)
    while i != -1:
        yield i
        i = s.find(sub, i + 1)


def _rewrites(s: str, src: str, dst: str):
    for i in _occurrences(s, src):
        yield i, s[:i] + dst + s[i + len(src):]


def string_successors(rules: list):
    """Successor function for ``multiway.grow``: every rule, both directions
    for two-way rules, at every position."""
    def succ(s: str) -> list:
        out = []
        for ri, r in enumerate(rules):
            dirs = [("forward", r.lhs, r.rhs)]
            if not r.directed:
                dirs.append(("backward", r.rhs, r.lhs))
            for direction, src, dst in dirs:
                if not src:
                    continue
                for i, t in _rewrites(s, src, dst):
                    out.append(((ri, direction, i), t))
        return out
    return succ


def string_multiway(rules: list, initial, steps: int, *, max_nodes: int = 1_000_000,
                    max_length: int | None = None) -> MultiwayGraph:
    if isinstance(initial, str):
        initial = [initial]
    succ = string_successors(rules)
    if max_length is not None:
        base = succ

        def succ(s):
            return [(lab, t) for lab, t in base(s) if len(t) <= max_length]
    return grow(succ, initial, steps, max_nodes=max_nodes)


def statement(s: str, t: str) -> tuple:
    """Two-way statement with sides ordered by length, then lexicographically."""
    return (s, t) if (len(s), s) <= (len(t), t) else (t, s)


def show_statement(st: tuple) -> str:
    return f"{st[0]}↔{st[1]}"


def string_accumulate(axioms: list, steps: int, *, pairing: str = "all",
                      max_tokens: int = 1_000_000, max_length: int | None = None) -> TokenEventGraph:
    """Accumulative evolution of two-way string statements.

    An event rewrites one occurrence of either side of a code statement, in
    either side of a data statement, into the other side.  Tokens are
    ``statement`` pairs; the axioms count as step-0 theorems.  Unlike
    expression cones, string cones pair every token with every token by
    default; that is the setting under which the closed-form counts hold.
    """
    if pairing not in PAIRINGS:
        raise ValueError(f"unknown pairing {pairing!r}")
    g = TokenEventGraph()
    g.settings.update(kind="string", pairing=pairing, steps=steps, max_tokens=max_tokens)
    frontier = []
    for a in axioms:
        r = a if isinstance(a, StringRule) else parse_string_rule(a)
        tid, new = g.add_token(statement(r.lhs, r.rhs), 0)
        if new:
            frontier.append(tid)
    for step in range(1, steps + 1):
        pool = frontier if pairing == "frontier" else list(range(len(g.tokens)))
        created = []
        seen = set()
        for c in pool:
            u, v = g.tokens[c].rule
            for d in pool:
                sides = g.tokens[d].rule
                for direction, src, dst in (("forward", u, v), ("backward", v, u)):
                    if not src:
                        continue
                    for si in (0, 1):
                        for i, new_side in _rewrites(sides[si], src, dst):
                            other = sides[1 - si]
                            res = statement(new_side, other)
                            if max_length is not None and max(len(res[0]), len(res[1])) > max_length:
                                continue
                            tid, new = g.add_token(res, step)
                            if new:
                                created.append(tid)
                            key = (c, d, direction, si, i, tid)
                            if key not in seen:
                                seen.add(key)
                                g.add_event((c, d), (tid,), "string", step, direction, (si, (i,)))
                            if len(g.tokens) > max_tokens:
                                g.truncated = True
                                g.truncation = f"token cap {max_tokens} exceeded at step {step}"
                                return g
        frontier = created
        if not created:
            break
    return g


def negate(st: tuple) -> tuple:
    """Exchange A and B on both sides."""
    swap = str.maketrans("AB", "BA")
    return statement(st[0].translate(swap), st[1].translate(swap))


@dataclass
class TruthReport:
    derived: frozenset
    inconsistent: bool
    witnesses: tuple          # (statement, negation) pairs both derived
    fractions: dict           # length -> Fraction of statements derived


def truth_analysis(axiom, steps: int, max_len: int = 4, *, pairing: str = "all") -> TruthReport:
    """Derive statements from one two-way axiom over {A, B} and compare each
    with its negation.

    ``fractions[n]`` is the share of unordered pairs ``{s, t}`` (``s == t``
    allowed) with both sides of length at most ``n`` that were derived.
    """
    r = axiom if isinstance(axiom, StringRule) else parse_string_rule(axiom)
    if set(r.lhs + r.rhs) - {"A", "B"}:
        raise ValueError("truth analysis needs the alphabet {A, B}")
    g = string_accumulate([r], steps, pairing=pairing) if steps > 0 else None
    # the axiom counts among the statements reached, as in theorem counts
    derived = frozenset(g.rules(None)) if g is not None else frozenset()
    witnesses = []
    for st in sorted(derived):
        neg = negate(st)
        if neg != st and neg in derived and (neg, st) not in witnesses:
            witnesses.append((st, neg))
    fractions = {}
    for n in range(1, max_len + 1):
        strings = ["".join(p) for k in range(1, n + 1) for p in product("AB", repeat=k)]
        total = len(strings) * (len(strings) + 1) // 2
        hit = sum(1 for st in derived if max(len(st[0]), len(st[1])) <= n)
        fractions[n] = Fraction(hit, total)
    return TruthReport(derived, bool(witnesses), tuple(witnesses), fractions)
