"""Entailment events: substitution, cosubstitution and bisubstitution.

A *code* rule is applied to a *target*, which is either an expression or a
rule (statement).  For a rule target each side is rewritten separately at
every subterm position.

* substitution   -- the code's source side is matched onto the target
  subterm; only the code's variables get bound.
* cosubstitution -- the target subterm is matched onto the code's source
  side; only the target's variables get bound, and the binding is applied
  throughout the target.
* bisubstitution -- the two are unified, so both kinds of variable may be
  bound at once.

Variables appearing only on the produced side of the code rule are
generated afresh for every event, then the result is canonicalized.
"""

from __future__ import annotations

from typing import Iterable, Iterator, NamedTuple

from .expr import App, RULE_HEADS, Rule, Var, canonical_rule, canonicalize

__all__ = [
    "KINDS", "Event", "match", "unify", "apply_binding", "replace_at", "positions",
    "substitutions", "cosubstitutions", "bisubstitutions", "events", "uniquify",
    "rule_results", "expr_results", "is_rule_node",
]

KINDS = ("sub", "cosub", "bisub")
_KIND_ALIASES = {
    "sub": "sub", "substitution": "sub",
    "cosub": "cosub", "cosubstitution": "cosub",
    "bisub": "bisub", "bisubstitution": "bisub",
}

_new_app = tuple.__new__


class Event(NamedTuple):
    """One rewrite: ``rule`` used in ``direction`` at ``position`` of ``target``.

    ``position`` is ``(side, path)`` for rule targets (side 0 = lhs) and
    ``path`` alone for expression targets.  ``result`` is canonical.
    """

    rule: Rule
    direction: str
    target: object
    position: tuple
    kind: str
    result: object


def normalize_kind(kind: str) -> str:
    try:
        return _KIND_ALIASES[kind]
    except KeyError:
        raise ValueError(f"unknown entailment kind {kind!r}") from None


def is_rule_node(e) -> bool:
    return isinstance(e, App) and e[0] in RULE_HEADS


# ----------------------------------------------------------------------------
# matching and unification


def match(pattern, subject, binding: dict | None = None) -> dict | None:
    """One-way syntactic match; variables in ``subject`` are treated as
    opaque constants.  Returns the binding or ``None``.

    A pattern variable never binds to a nested rule node.
    """
    b = {} if binding is None else binding
    return b if _match(pattern, subject, b) else None


def _match(p, s, b: dict) -> bool:
    if type(p) is Var:
        bound = b.get(p)
        if bound is None:
            if type(s) is App and s[0] in RULE_HEADS:
                return False
            b[p] = s
            return True
        return bound == s
    if type(p) is App:
        if type(s) is not App or len(s) != len(p):
            return False
        for x, y in zip(p, s):
            if not _match(x, y, b):
                return False
        return True
    return p == s and type(s) is not Var


def _walk(e, s: dict):
    while type(e) is Var:
        nxt = s.get(e)
        if nxt is None:
            return e
        e = nxt
    return e


def _occurs(v: Var, e, s: dict) -> bool:
    e = _walk(e, s)
    if e == v and type(e) is Var:
        return True
    if type(e) is App:
        for x in e:
            if _occurs(v, x, s):
                return True
    return False


def _unify(a, b, s: dict) -> bool:
    a = _walk(a, s)
    b = _walk(b, s)
    ta, tb = type(a), type(b)
    if ta is Var:
        if tb is Var and a == b:
            return True
        if tb is App and (b[0] in RULE_HEADS or _occurs(a, b, s)):
            return False
        s[a] = b
        return True
    if tb is Var:
        if ta is App and (a[0] in RULE_HEADS or _occurs(b, a, s)):
            return False
        s[b] = a
        return True
    if ta is App:
        if tb is not App or len(a) != len(b):
            return False
        for x, y in zip(a, b):
            if not _unify(x, y, s):
                return False
        return True
    return a == b


def unify(a, b) -> dict | None:
    """Most general unifier of ``a`` and ``b`` (fully resolved), or ``None``."""
    s: dict = {}
    if not _unify(a, b, s):
        return None
    return {v: _resolve(t, s) for v, t in s.items()}


def _resolve(e, s: dict):
    if type(e) is Var:
        t = s.get(e)
        return e if t is None else _resolve(t, s)
    if type(e) is App:
        return _new_app(App, [_resolve(x, s) for x in e])
    return e


def apply_binding(e, binding: dict, fresh: dict | None = None):
    """Instantiate ``e``.  Unbound variables are renamed through ``fresh``
    (a dict filled lazily with new negative indices) or kept as is."""
    if type(e) is Var:
        t = binding.get(e)
        if t is not None:
            return t
        if fresh is None:
            return e
        v = fresh.get(e)
        if v is None:
            v = fresh[e] = Var(-(len(fresh) + 1_000_000))
        return v
    if type(e) is App:
        return _new_app(App, [apply_binding(x, binding, fresh) for x in e])
    return e


def replace_at(e, path: tuple, new):
    if not path:
        return new
    i = path[0]
    items = list(e)
    items[i] = replace_at(e[i], path[1:], new)
    return _new_app(App, items)


def positions(e, path: tuple = ()) -> list:
    """``(path, subterm)`` pairs in pre-order; heads are not positions."""
    out: list = []
    _positions(e, path, out)
    return out


def _positions(e, path, out):
    out.append((path, e))
    if type(e) is App:
        for i in range(1, len(e)):
            _positions(e[i], path + (i,), out)


def _negate(e):
    if type(e) is Var:
        return Var(-abs(int(e)))
    if type(e) is App:
        return _new_app(App, [_negate(x) for x in e])
    return e


def _directions(rule: Rule) -> list:
    dirs = [("forward", rule.lhs, rule.rhs)]
    if not rule.directed:
        dirs.append(("backward", rule.rhs, rule.lhs))
    return dirs


# ----------------------------------------------------------------------------
# raw rewriting over a tuple of sides


def _rewrite_sides(code: Rule, sides: tuple, kind: str, side_positions=None,
                   fresh_generated: bool = True) -> Iterator[tuple]:
    """Yield ``(direction, side, path, new_sides)`` for every event.

    Target variables are positive.  For cosubstitution and bisubstitution
    the code's variables are made negative so the two never collide.
    """
    if side_positions is None:
        side_positions = [positions(s) for s in sides]
    for direction, src, dst in _directions(code):
        if kind == "sub":
            src_head = src[0] if type(src) is App and type(src[0]) is not Var else None
            src_len = len(src) if type(src) is App else 0
            for si, plist in enumerate(side_positions):
                for path, sub in plist:
                    if src_head is not None and (type(sub) is not App or sub[0] != src_head
                                                 or len(sub) != src_len):
                        continue
                    b: dict = {}
                    if not _match(src, sub, b):
                        continue
                    fresh = {} if fresh_generated else None
                    new = apply_binding(dst, b, fresh)
                    out = list(sides)
                    out[si] = replace_at(sides[si], path, new)
                    yield direction, si, path, tuple(out)
        else:
            nsrc, ndst = _negate(src), _negate(dst)
            src_head = nsrc[0] if type(nsrc) is App and type(nsrc[0]) is not Var else None
            for si, plist in enumerate(side_positions):
                for path, sub in plist:
                    tsub = type(sub)
                    if (src_head is not None and tsub is App and type(sub[0]) is not Var
                            and (sub[0] != src_head or len(sub) != len(nsrc))):
                        continue
                    b = {}
                    if kind == "cosub":
                        if tsub is not Var and src_head is None and type(nsrc) is Var:
                            # a bare code variable is rigid under cosubstitution
                            continue
                        if not _match(sub, nsrc, b):
                            continue
                        new_sides = [apply_binding(s, b) for s in sides]
                        new = ndst
                    else:
                        if not _unify(nsrc, sub, b):
                            continue
                        new_sides = [_resolve(s, b) for s in sides]
                        new = _resolve(ndst, b)
                    new_sides[si] = replace_at(new_sides[si], path, new)
                    yield direction, si, path, tuple(new_sides)


def rule_results(code: Rule, data: Rule, kind: str = "sub", side_positions=None,
                 orient: bool = True) -> Iterator[tuple]:
    """Yield ``(direction, side, path, canonical_rule)`` for ``code`` applied
    to ``data``.  ``bisub`` is full unification of the code's source side
    with each subterm."""
    for direction, si, path, (lhs, rhs) in _rewrite_sides(
            code, (data.lhs, data.rhs), kind, side_positions):
        yield direction, si, path, canonical_rule(Rule(lhs, rhs, data.directed), orient)


def expr_results(code: Rule, target, kind: str = "sub",
                 fresh_generated: bool = True) -> Iterator[tuple]:
    for direction, _si, path, (new,) in _rewrite_sides(
            code, (target,), kind, fresh_generated=fresh_generated):
        yield direction, path, canonicalize(new)


# ----------------------------------------------------------------------------
# public event generators


def _events(rule: Rule, target, kind: str, uniquify_generated: bool = True) -> list:
    out = []
    seen = set()
    if isinstance(target, Rule):
        gen = ((d, (si, p), r) for d, si, p, r in rule_results(rule, target, kind))
    else:
        gen = expr_results(rule, target, kind, fresh_generated=uniquify_generated)
    for direction, pos, result in gen:
        key = (direction, pos, result)
        if key in seen:
            continue
        seen.add(key)
        out.append(Event(rule, direction, target, pos, kind, result))
    return out


def substitutions(rule: Rule, target, uniquify_generated: bool = True) -> list:
    """All substitution events of ``rule`` on ``target`` (expression or rule).

    >>> from .expr import parse, to_string
    >>> r = parse("x_ . y_ <-> (y_ . x_) . y_")
    >>> sorted(to_string(e.result) for e in substitutions(r, parse("(a . b) . a")))[0]
    'o[b, a]'
    """
    return _events(rule, target, "sub", uniquify_generated)


def cosubstitutions(rule: Rule, target) -> list:
    """Events that specialize variables of ``target`` so that ``rule``'s
    source side fits at some position."""
    return _events(rule, target, "cosub")


def bisubstitutions(rule: Rule, target) -> list:
    """Events from unifying the rule's source side with each subterm; covers
    every substitution and cosubstitution event."""
    return _events(rule, target, "bisub")


def events(rule: Rule, target, kind: str = "sub") -> list:
    return _events(rule, target, normalize_kind(kind))


def uniquify(result, generated: Iterable, counter) -> object:
    """Give each variable in ``generated`` a fresh index drawn from
    ``counter`` (an iterator of ints), then canonicalize.

    Every occurrence of one generated variable shares its new name, and two
    calls never hand out the same name.
    """
    mapping = {Var(v): Var(-next(counter)) for v in generated}
    if isinstance(result, Rule):
        renamed = Rule(apply_binding(result.lhs, mapping), apply_binding(result.rhs, mapping),
                       result.directed)
    else:
        renamed = apply_binding(result, mapping)
    return canonicalize(renamed)
