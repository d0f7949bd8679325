"""Symbolic expressions: atoms, pattern variables, applications and rules.

Expressions are immutable and hashable.  ``Atom`` is a ``str`` subclass,
``Var`` an ``int`` subclass holding the canonical index, and ``App`` a
``tuple`` subclass laid out as ``(head, *args)``.  Structural equality is
therefore plain tuple equality, which keeps the rewriting loops fast.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence, Union

__all__ = [
    "Atom", "Var", "App", "Rule", "Expr", "QuantifiedStatement",
    "ParseError", "RULE_HEADS", "OP",
    "app", "op", "parse", "parse_expr", "parse_rule", "parse_rules",
    "to_string", "pretty", "size", "leaf_count", "rule_size", "rule_leaf_count",
    "variables", "rule_variables", "sort_key", "rule_key", "compare",
    "canonicalize", "canonical_rule", "is_canonical", "symbolic_key", "CONFLATIONS",
    "skolemize", "compile_schema", "peano_induction",
]


class Atom(str):
    """A literal symbol that stands for itself."""

    __slots__ = ()

    def __repr__(self) -> str:
        return f"Atom({str.__repr__(self)})"


class Var(int):
    """A pattern variable, identified by its integer index.

    Canonical expressions use indices 1, 2, ... in order of first
    occurrence; negative indices are used internally for variables that
    come from a rule being applied.
    """

    __slots__ = ()

    def __repr__(self) -> str:
        return f"Var({int(self)})"

    @property
    def name(self) -> str:
        n = int(self)
        return f"v{n}" if n > 0 else f"w{-n}"


class App(tuple):
    """``head[args...]``, stored as the tuple ``(head, *args)``."""

    __slots__ = ()

    def __new__(cls, head, args: Sequence = ()):
        return tuple.__new__(cls, (head, *args))

    @property
    def head(self):
        return self[0]

    @property
    def args(self) -> tuple:
        return self[1:]

    def __repr__(self) -> str:
        return f"App({self[0]!r}, {list(self[1:])!r})"


Expr = Union[Atom, Var, App]

_new_app = tuple.__new__

# Nested implications inside an expression are App nodes with these heads.
RULE_HEADS = frozenset({Atom("Rule"), Atom("TwoWayRule")})

# Binary head produced by the infix "." / "∘" sugar.
OP = Atom("o")


def app(head, *args) -> App:
    if isinstance(head, str) and not isinstance(head, Atom):
        head = Atom(head)
    return _new_app(App, (head, *args))


def op(a, b) -> App:
    return _new_app(App, (OP, a, b))


class Rule(NamedTuple):
    """A statement ``lhs <-> rhs`` (or ``lhs -> rhs`` when directed)."""

    lhs: Expr
    rhs: Expr
    directed: bool = False

    def __str__(self) -> str:
        return to_string(self)

    def swapped(self) -> "Rule":
        return Rule(self.rhs, self.lhs, self.directed)

    @property
    def arrow(self) -> str:
        return "->" if self.directed else "<->"


@dataclass(frozen=True)
class QuantifiedStatement:
    """``prefix`` is a sequence of ``("forall"|"exists", name)`` pairs; the
    body is the equation ``lhs = rhs`` over atoms named in the prefix."""

    prefix: tuple
    lhs: Expr
    rhs: Expr


# ----------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(
    r"\s*(?:(?P<arrow><->|->|↔|→)|(?P<ident>[^\W_]+)(?P<under>_)?|(?P<blank>_)"
    r"|(?P<punct>[\[\](),.∘]))"
)
_VNAME = re.compile(r"v(\d+)$")


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup) if m.lastgroup != "under" else m.start("ident")
        if m.group("arrow"):
            a = m.group("arrow")
            tokens.append(("arrow", "<->" if a in ("<->", "↔") else "->", start))
        elif m.group("ident"):
            kind = "var" if m.group("under") else "ident"
            tokens.append((kind, m.group("ident"), m.start("ident")))
        elif m.group("blank"):
            tokens.append(("var", None, start))
        else:
            p = m.group("punct")
            tokens.append(("punct", "." if p == "∘" else p, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        names = {t[1] for t in self.tokens if t[0] == "var" and t[1] is not None}
        explicit = {int(m.group(1)) for n in names if (m := _VNAME.match(n))}
        self.next_index = max(explicit, default=0) + 1
        self.var_index: dict = {}

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        tok = self.take()
        if tok[0] != "punct" or tok[1] != value:
            if tok[0] == "end" and value in ")]":
                raise ParseError(f"unbalanced brackets: expected {value!r}", tok[2])
            raise ParseError(f"expected {value!r}", tok[2])

    def var(self, name):
        if name is None:
            idx = self.next_index
            self.next_index += 1
            return Var(idx)
        m = _VNAME.match(name)
        if m:
            return Var(int(m.group(1)))
        if name not in self.var_index:
            self.var_index[name] = self.next_index
            self.next_index += 1
        return Var(self.var_index[name])

    def statement(self):
        lhs = self.expr()
        tok = self.peek()
        if tok[0] != "arrow":
            return lhs
        self.take()
        rhs = self.expr()
        nxt = self.peek()
        if nxt[0] == "arrow":
            raise ParseError("ambiguous rule nesting; parenthesize inner rules", nxt[2])
        return Rule(lhs, rhs, tok[1] == "->")

    def expr(self):
        left = self.postfix()
        while self.peek()[:2] == ("punct", "."):
            self.take()
            left = op(left, self.postfix())
        return left

    def postfix(self):
        e = self.primary()
        while self.peek()[:2] == ("punct", "["):
            self.take()
            args = []
            if self.peek()[:2] != ("punct", "]"):
                args.append(self.expr())
                while self.peek()[:2] == ("punct", ","):
                    self.take()
                    args.append(self.expr())
            self.expect("]")
            e = _new_app(App, (e, *args))
        return e

    def primary(self):
        tok = self.take()
        kind, value, pos = tok
        if kind == "ident":
            return Atom(value)
        if kind == "var":
            return self.var(value)
        if kind == "punct" and value == "(":
            inner = self.statement()
            self.expect(")")
            if isinstance(inner, Rule):
                head = Atom("Rule") if inner.directed else Atom("TwoWayRule")
                return _new_app(App, (head, inner.lhs, inner.rhs))
            return inner
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {value!r}", pos)


def parse(text: str):
    """Parse an expression or a rule.

    >>> to_string(parse("f[x_, y]"))
    'f[v1_, y]'
    """
    if not text.strip():
        raise ParseError("empty input", 0)
    p = _Parser(text)
    result = p.statement()
    tok = p.peek()
    if tok[0] != "end":
        if tok[:2] in (("punct", ")"), ("punct", "]")):
            raise ParseError("unbalanced brackets", tok[2])
        raise ParseError(f"unexpected token {tok[1]!r}", tok[2])
    return result


def parse_expr(text: str) -> Expr:
    e = parse(text)
    if isinstance(e, Rule):
        raise ParseError("expected an expression, got a rule", 0)
    return e


def parse_rule(text: str) -> Rule:
    r = parse(text)
    if not isinstance(r, Rule):
        raise ParseError("expected a rule", len(text))
    return r


def parse_rules(text: str) -> list:
    """One rule per line; ``#`` starts a comment."""
    rules = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rules.append(parse_rule(line))
    return rules


# ----------------------------------------------------------------------------
# printing


def to_string(e) -> str:
    """Functional form, e.g. ``o[v1_, o[v2_, v1_]]``; parses back unchanged."""
    if isinstance(e, Rule):
        return f"{to_string(e.lhs)} {e.arrow} {to_string(e.rhs)}"
    if type(e) is Var:
        return f"{e.name}_"
    if isinstance(e, App):
        return f"{to_string(e[0])}[{', '.join(to_string(a) for a in e[1:])}]"
    return str(e)


_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def pretty(e, names: str = "letters", symbol: str = "∘") -> str:
    """Human-readable infix form with variables shown as letters.

    >>> pretty(parse("x_ . (y_ . x_) <-> y_"))
    'a∘(b∘a) ↔ b'
    """
    def var_name(v: Var) -> str:
        n = int(v)
        if names == "letters" and 0 < n <= len(_LETTERS):
            return _LETTERS[n - 1]
        return v.name

    def go(x, top: bool) -> str:
        if type(x) is Var:
            return var_name(x)
        if isinstance(x, App):
            if x[0] == OP and len(x) == 3:
                s = f"{go(x[1], False)}{symbol}{go(x[2], False)}"
                return s if top else f"({s})"
            return f"{go(x[0], True)}[{', '.join(go(a, True) for a in x[1:])}]"
        return str(x)

    if isinstance(e, Rule):
        arrow = "→" if e.directed else "↔"
        return f"{go(e.lhs, True)} {arrow} {go(e.rhs, True)}"
    return go(e, True)


# ----------------------------------------------------------------------------
# measures


def size(e) -> int:
    """Number of nodes, heads included (``a∘b`` has size 3)."""
    if isinstance(e, App):
        return sum(map(size, e))
    return 1


def leaf_count(e) -> int:
    """Number of leaves of the expression tree (``a∘b`` has 2)."""
    if isinstance(e, App):
        if len(e) == 1:
            return 1
        return sum(map(leaf_count, e[1:]))
    return 1


def rule_size(r: Rule) -> int:
    """Node count of the rule tree, counting the connective itself."""
    return size(r.lhs) + size(r.rhs) + 1


def rule_leaf_count(r: Rule) -> int:
    return leaf_count(r.lhs) + leaf_count(r.rhs)


def variables(e) -> list:
    """Distinct variables in depth-first, left-to-right order."""
    seen: dict = {}
    _collect(e, seen)
    return list(seen)


def _collect(e, seen: dict) -> None:
    if type(e) is Var:
        seen.setdefault(e, None)
    elif isinstance(e, App):
        for x in e:
            _collect(x, seen)


def rule_variables(r: Rule) -> list:
    seen: dict = {}
    _collect(r.lhs, seen)
    _collect(r.rhs, seen)
    return list(seen)


# ----------------------------------------------------------------------------
# ordering


def sort_key(e):
    """Key realising the total order: size, then kind (atom < variable <
    application), then name or index, then head and arguments."""
    if type(e) is Var:
        return (1, 1, int(e))
    if isinstance(e, App):
        keys = tuple(map(sort_key, e))
        return (sum(k[0] for k in keys), 2, len(e), keys)
    return (1, 0, str(e))


def rule_key(r: Rule):
    return (sort_key(r.lhs), sort_key(r.rhs), r.directed)


def _var_label(n: int) -> str:
    n -= 1
    label = _LETTERS[n % 26]
    return label if n < 26 else f"{label}{n // 26}"


_BLANK_KEY = (1, 0, (), (0, "blank", "BLANK"))
_PATTERN_KEY = (0, "pattern", "PATTERN")


def symbolic_key(e):
    """Key for the conventional symbolic ordering of expression trees.

    Symbols come before compound expressions and compare alphabetically.
    Compound expressions compare by argument count, then argument by
    argument, then by head.  A pattern variable counts as the compound
    ``Pattern[name, Blank[]]`` with its canonical letter as name, so the
    order depends on variable names.
    """
    if type(e) is Var:
        label = _var_label(int(e)) if int(e) > 0 else f"w{-int(e)}"
        return (1, 2, ((0, label, label.swapcase()), _BLANK_KEY), _PATTERN_KEY)
    if isinstance(e, App):
        return (1, len(e) - 1, tuple(symbolic_key(x) for x in e[1:]), symbolic_key(e[0]))
    s = str(e)
    return (0, s.lower(), s.swapcase())


def compare(a, b) -> int:
    """-1, 0 or 1 as ``a`` sorts before, equal to, or after ``b``."""
    ka, kb = sort_key(a), sort_key(b)
    return (ka > kb) - (ka < kb)


# ----------------------------------------------------------------------------
# canonicalization


def _rename(e, mapping: dict):
    if type(e) is Var:
        v = mapping.get(e)
        if v is None:
            v = mapping[e] = Var(len(mapping) + 1)
        return v
    if isinstance(e, App):
        return _new_app(App, [_rename(x, mapping) for x in e])
    return e


def canonicalize(e, orient: bool = True):
    """Rename pattern variables to v1, v2, ... by first occurrence.

    For two-way rules both orientations are canonicalized and the smaller
    one (under ``sort_key``) is kept, so ``a <-> b`` and ``b <-> a`` agree.
    Pass ``orient=False`` to keep the given orientation.
    """
    if isinstance(e, Rule):
        return canonical_rule(e, orient)
    return _rename(e, {})


CONFLATIONS = ("symbolic", "full", "none")


def canonical_rule(r: Rule, orient=True) -> Rule:
    """Canonical form of a rule under a side-swap conflation mode.

    ``orient`` is one of

    * ``"full"`` (or ``True``): ``a <-> b`` and ``b <-> a`` always merge; the
      orientation with the smaller ``rule_key`` is kept.
    * ``"symbolic"``: rename, put the sides in ``symbolic_key`` order, rename
      again.  Because the order looks at variable names, some swapped pairs
      stay distinct.  This is the convention that reproduces published
      accumulative-evolution tables.
    * ``"none"`` (or ``False``): keep the given orientation.
    """
    m: dict = {}
    lhs = _rename(r.lhs, m)
    rhs = _rename(r.rhs, m)
    first = Rule(lhs, rhs, r.directed)
    if r.directed or lhs == rhs or orient is False or orient == "none":
        return first
    if orient == "symbolic":
        if symbolic_key(lhs) <= symbolic_key(rhs):
            return first
        m = {}
        rhs2 = _rename(rhs, m)
        return Rule(rhs2, _rename(lhs, m), False)
    if orient is not True and orient != "full":
        raise ValueError(f"unknown conflation mode {orient!r}")
    m = {}
    rhs2 = _rename(r.rhs, m)
    lhs2 = _rename(r.lhs, m)
    second = Rule(rhs2, lhs2, False)
    if second == first:
        return first
    return first if rule_key(first) <= rule_key(second) else second


def is_canonical(e) -> bool:
    return canonicalize(e) == e


# ----------------------------------------------------------------------------
# quantifiers and schemas


class _SkolemNamer:
    """Hands out fresh Skolem head names α1, α2, ...; ``reset`` starts over."""

    def __init__(self):
        self.counter = 0

    def fresh(self) -> Atom:
        self.counter += 1
        return Atom(f"α{self.counter}")

    def reset(self) -> None:
        self.counter = 0


skolem_names = _SkolemNamer()


def skolemize(q: QuantifiedStatement, namer: _SkolemNamer | None = None,
              constants=()) -> Rule:
    """Compile a prenex equation into a two-way rule.

    Universal variables become pattern variables; each existential variable
    becomes a fresh head applied to the universals bound before it.  Atoms
    in the body must be bound by the prefix or listed in ``constants``.
    """
    namer = namer or skolem_names
    constants = set(constants)
    replacement: dict = {}
    universals: list = []
    for quant, name in q.prefix:
        if name in replacement:
            raise ValueError(f"variable {name!r} bound twice")
        if quant in ("forall", "∀"):
            v = Var(-(len(replacement) + 1))
            universals.append(v)
            replacement[name] = v
        elif quant in ("exists", "∃"):
            replacement[name] = _new_app(App, (namer.fresh(), *universals))
        else:
            raise ValueError(f"unknown quantifier {quant!r}")

    def go(e):
        if type(e) is Var:
            raise ValueError("body must use quantified atoms, not pattern variables")
        if isinstance(e, App):
            return _new_app(App, [e[0] if i == 0 and not isinstance(e[0], App) else go(x)
                                  for i, x in enumerate(e)])
        if e in replacement:
            return replacement[e]
        if e == OP or e in RULE_HEADS or e in constants:
            return e
        raise ValueError(f"variable {e!r} is not bound in the prefix")

    return canonical_rule(Rule(go(q.lhs), go(q.rhs), False))


def compile_schema(r: Rule) -> Rule:
    """Canonicalize a rule whose heads may be pattern variables.

    Matching already treats an application head as an ordinary position, so
    a head variable such as ``f_`` in ``f_[a]`` binds to whatever head the
    subject has.  The compiled rule is the canonical form.
    """
    return canonical_rule(r)


def peano_induction() -> Rule:
    """``f_[0, y_] ∧ (f_[x_, y_] → f_[s[x_], y_]) → f_[z_, y_]``."""
    f, x, y, z = Var(1), Var(3), Var(2), Var(4)
    zero, succ, and_ = Atom("0"), Atom("s"), Atom("and")
    step = app("Rule", _new_app(App, (f, x, y)), _new_app(App, (f, app(succ, x), y)))
    lhs = app(and_, _new_app(App, (f, zero, y)), step)
    return compile_schema(Rule(lhs, _new_app(App, (f, z, y)), True))


def subterms(e, path: tuple = ()) -> Iterator[tuple]:
    """Yield ``(path, subterm)`` pre-order; paths index arguments from 1,
    heads are not visited."""
    yield path, e
    if isinstance(e, App):
        for i in range(1, len(e)):
            yield from subterms(e[i], path + (i,))
