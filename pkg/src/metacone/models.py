"""Finite models of equational axioms, expression codes and refutation.

A model over ``{0..k-1}`` gives a table for every operator of a signature:
a ``k×k`` table for binary operators, a length-``k`` table for unary ones
and a single element for constants.  In axioms and expressions, pattern
variables and atoms outside the signature are variables.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .expr import OP, App, Atom, Rule, Var

__all__ = [
    "Model", "Signature", "enumerate_models", "brute_force_models", "satisfies",
    "expr_code", "predict", "model_signature", "infer_signature", "from_id", "evaluate",
    "relabel", "isomorphism_classes",
]

Signature = dict   # operator name -> arity (0, 1 or 2)


@dataclass(frozen=True)
class Model:
    k: int
    tables: tuple            # ((name, table), ...) sorted by name; binary tables are tuples of rows

    def table(self, name: str):
        for n, t in self.tables:
            if n == name:
                return t
        raise KeyError(name)

    @property
    def signature(self) -> dict:
        out = {}
        for n, t in self.tables:
            if isinstance(t, int):
                out[n] = 0
            elif isinstance(t[0], tuple):
                out[n] = 2
            else:
                out[n] = 1
        return out

    @property
    def id(self) -> int:
        """Digits of the flattened binary table in base ``k``, first cell
        most significant.  Uses the operator ``o`` when present, else the
        first binary operator."""
        binary = [(n, t) for n, t in self.tables if self.signature[n] == 2]
        if not binary:
            return 0
        t = dict(binary).get(str(OP), binary[0][1])
        value = 0
        for row in t:
            for x in row:
                value = value * self.k + x
        return value

    def to_json(self) -> dict:
        return {"k": self.k, "tables": {n: t for n, t in self.tables}, "id": self.id}


def from_id(model_id: int, k: int, name: str = "o") -> Model:
    """Inverse of ``Model.id`` for a single binary operator."""
    digits = []
    for _ in range(k * k):
        digits.append(model_id % k)
        model_id //= k
    if model_id:
        raise ValueError("id out of range for this k")
    digits.reverse()
    rows = tuple(tuple(digits[i * k:(i + 1) * k]) for i in range(k))
    return Model(k, ((name, rows),))


# ----------------------------------------------------------------------------
# evaluation


def infer_signature(items: Iterable) -> dict:
    """Operators used as heads, with their arities.

    A bare atom in an item that also has pattern variables is a constant
    (arity 0), like ``e`` in ``a_ . e <-> a_``.  In an item without pattern
    variables, such as ``(a . b) . a``, bare atoms act as variables.
    """
    sig: dict = {}
    consts: set = set()

    def scan(e, out):
        if type(e) is Var:
            out[0] = True
        elif isinstance(e, App):
            for x in e[1:]:
                scan(x, out)
        else:
            out[1].append(str(e))

    def go(e):
        if isinstance(e, App):
            head = e[0]
            if isinstance(head, Atom):
                n = len(e) - 1
                if n > 2:
                    raise ValueError(f"operator {head} has arity {n}; at most 2 is supported")
                if sig.get(str(head), n) != n:
                    raise ValueError(f"operator {head} used with two arities")
                sig[str(head)] = n
            for x in e[1:]:
                go(x)

    for it in items:
        sides = (it.lhs, it.rhs) if isinstance(it, Rule) else (it,)
        found = [False, []]
        for side in sides:
            go(side)
            scan(side, found)
        if found[0]:
            consts.update(found[1])
    for name in consts:
        if sig.setdefault(name, 0) != 0:
            raise ValueError(f"{name} is used both as an operator and as a constant")
    return sig


def _compile(e, sig: dict, var_index: dict):
    """Compile to nested tuples: ("v", i) | ("c", name) | ("u", name, a) | ("b", name, a, b)."""
    if type(e) is Var:
        return ("v", var_index[e])
    if isinstance(e, App):
        name = str(e[0])
        if name not in sig:
            raise ValueError(f"unknown operator {name!r}")
        args = [_compile(x, sig, var_index) for x in e[1:]]
        if len(args) == 0:
            return ("c", name)
        if len(args) == 1:
            return ("u", name, args[0])
        return ("b", name, args[0], args[1])
    name = str(e)
    if name in sig and sig[name] == 0:
        return ("c", name)
    return ("v", var_index[e])


def _variables(e, sig: dict, acc: dict) -> None:
    if type(e) is Var:
        acc.setdefault(e, None)
    elif isinstance(e, App):
        for x in e[1:]:
            _variables(x, sig, acc)
    elif not (str(e) in sig and sig[str(e)] == 0):
        acc.setdefault(e, None)


def _eval(c, tables: dict, env: Sequence):
    """Value of compiled expression ``c`` or ``None`` if a needed cell is unset."""
    tag = c[0]
    if tag == "v":
        return env[c[1]]
    if tag == "c":
        return tables[c[1]]
    if tag == "u":
        a = _eval(c[2], tables, env)
        return None if a is None else tables[c[1]][a]
    a = _eval(c[2], tables, env)
    if a is None:
        return None
    b = _eval(c[3], tables, env)
    if b is None:
        return None
    return tables[c[1]][a][b]


def evaluate(m: Model, e, env: dict) -> int:
    sig = m.signature
    acc: dict = {}
    _variables(e, sig, acc)
    idx = {v: i for i, v in enumerate(acc)}
    tables = {n: (t if not isinstance(t, tuple) or not isinstance(t[0], tuple) else t)
              for n, t in m.tables}
    return _eval(_compile(e, sig, idx), tables, [env[v] for v in acc])


class _Instances:
    """All ground instances of a list of equations over a domain of size k."""

    def __init__(self, axioms: Sequence[Rule], sig: dict, k: int):
        self.items = []
        for r in axioms:
            acc: dict = {}
            _variables(r.lhs, sig, acc)
            _variables(r.rhs, sig, acc)
            idx = {v: i for i, v in enumerate(acc)}
            lhs, rhs = _compile(r.lhs, sig, idx), _compile(r.rhs, sig, idx)
            for env in itertools.product(range(k), repeat=len(acc)):
                self.items.append((lhs, rhs, env))

    def violated(self, tables: dict) -> bool:
        for lhs, rhs, env in self.items:
            a = _eval(lhs, tables, env)
            if a is None:
                continue
            b = _eval(rhs, tables, env)
            if b is not None and a != b:
                return True
        return False

    def all_hold(self, tables: dict) -> bool:
        for lhs, rhs, env in self.items:
            if _eval(lhs, tables, env) != _eval(rhs, tables, env):
                return False
        return True


def _freeze(sig: dict, tables: dict, k: int) -> Model:
    out = []
    for name in sorted(sig):
        t = tables[name]
        if sig[name] == 2:
            out.append((name, tuple(tuple(row) for row in t)))
        elif sig[name] == 1:
            out.append((name, tuple(t)))
        else:
            out.append((name, t))
    return Model(k, tuple(out))


def _cells(sig: dict, k: int) -> list:
    cells = []
    for name in sorted(sig, key=lambda n: (-sig[n], n)):
        if sig[name] == 2:
            cells += [(name, i, j) for i in range(k) for j in range(k)]
        elif sig[name] == 1:
            cells += [(name, i) for i in range(k)]
        else:
            cells.append((name,))
    # constants and unary cells first: they appear inside many binary instances
    cells.sort(key=lambda c: len(c))
    return cells


def _empty_tables(sig: dict, k: int) -> dict:
    tables = {}
    for name, ar in sig.items():
        if ar == 2:
            tables[name] = [[None] * k for _ in range(k)]
        elif ar == 1:
            tables[name] = [None] * k
        else:
            tables[name] = None
    return tables


def _set(tables: dict, cell: tuple, value) -> None:
    if len(cell) == 3:
        tables[cell[0]][cell[1]][cell[2]] = value
    elif len(cell) == 2:
        tables[cell[0]][cell[1]] = value
    else:
        tables[cell[0]] = value


def enumerate_models(axioms: Sequence[Rule], k: int, signature: dict | None = None) -> list:
    """All models of size ``k``, sorted by id then tables.

    Backtracks over table cells; after each assignment every axiom instance
    whose value is already determined is checked.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    sig = dict(signature) if signature is not None else infer_signature(axioms)
    if any(a > 2 for a in sig.values()):
        raise ValueError("operators of arity > 2 are not supported")
    inst = _Instances(axioms, sig, k)
    cells = _cells(sig, k)
    tables = _empty_tables(sig, k)
    found = []

    def rec(i):
        if i == len(cells):
            found.append(_freeze(sig, tables, k))
            return
        cell = cells[i]
        for v in range(k):
            _set(tables, cell, v)
            if not inst.violated(tables):
                rec(i + 1)
        _set(tables, cell, None)

    rec(0)
    found.sort(key=lambda m: (m.id, m.tables))
    return found


def all_tables(sig: dict, k: int) -> Iterable[Model]:
    cells = _cells(sig, k)
    for values in itertools.product(range(k), repeat=len(cells)):
        tables = _empty_tables(sig, k)
        for c, v in zip(cells, values):
            _set(tables, c, v)
        yield tables


def brute_force_models(axioms: Sequence[Rule], k: int, signature: dict | None = None) -> list:
    """Reference enumeration: scan every table and keep the models."""
    sig = dict(signature) if signature is not None else infer_signature(axioms)
    inst = _Instances(axioms, sig, k)
    found = [_freeze(sig, t, k) for t in all_tables(sig, k) if inst.all_hold(t)]
    found.sort(key=lambda m: (m.id, m.tables))
    return found


def _tables_of(m: Model) -> dict:
    return {n: t for n, t in m.tables}


def relabel(m: Model, perm: Sequence[int]) -> Model:
    """The isomorphic model with element ``i`` renamed to ``perm[i]``."""
    inv = [0] * m.k
    for i, p in enumerate(perm):
        inv[p] = i
    out = []
    for name, t in m.tables:
        if isinstance(t, int):
            out.append((name, perm[t]))
        elif isinstance(t[0], tuple):
            out.append((name, tuple(tuple(perm[t[inv[i]][inv[j]]] for j in range(m.k))
                                    for i in range(m.k))))
        else:
            out.append((name, tuple(perm[t[inv[i]]] for i in range(m.k))))
    return Model(m.k, tuple(out))


def isomorphism_classes(models: Iterable[Model]) -> list:
    """One representative per isomorphism class: the least relabelling."""
    seen = set()
    reps = []
    for m in models:
        key = min((relabel(m, p).tables for p in itertools.permutations(range(m.k))))
        if key not in seen:
            seen.add(key)
            reps.append(Model(m.k, key))
    return reps


def _eval_all(c, tables: dict, columns: list, size: int) -> list:
    """Values of compiled ``c`` under every assignment at once."""
    tag = c[0]
    if tag == "v":
        return columns[c[1]]
    if tag == "c":
        return [tables[c[1]]] * size
    if tag == "u":
        t = tables[c[1]]
        return [t[a] for a in _eval_all(c[2], tables, columns, size)]
    t = tables[c[1]]
    xs = _eval_all(c[2], tables, columns, size)
    ys = _eval_all(c[3], tables, columns, size)
    return [t[a][b] for a, b in zip(xs, ys)]


@functools.lru_cache(maxsize=1 << 16)
def _prepared(rule: Rule, sig: tuple, k: int):
    sig = dict(sig)
    acc: dict = {}
    _variables(rule.lhs, sig, acc)
    _variables(rule.rhs, sig, acc)
    idx = {v: i for i, v in enumerate(acc)}
    envs = list(itertools.product(range(k), repeat=len(acc)))
    columns = [[env[i] for env in envs] for i in range(len(acc))]
    return _compile(rule.lhs, sig, idx), _compile(rule.rhs, sig, idx), columns, len(envs)


def satisfies(m: Model, rule: Rule) -> bool:
    lhs, rhs, columns, size = _prepared(rule, tuple(sorted(m.signature.items())), m.k)
    tables = _tables_of(m)
    return _eval_all(lhs, tables, columns, size) == _eval_all(rhs, tables, columns, size)


# ----------------------------------------------------------------------------
# expression codes


def expr_code(m: Model, e, variables: Sequence | None = None) -> int:
    """Values of ``e`` under every assignment, read as a base-``k`` number.

    Assignments run in lexicographic order with the first variable as the
    most significant digit, and the first assignment gives the most
    significant digit of the code.  ``variables`` fixes the variable list
    (atoms or pattern variables); by default it is the expression's own
    variables sorted by name.  Comparing codes needs a shared list.
    """
    sig = m.signature
    if variables is None:
        acc: dict = {}
        _variables(e, sig, acc)
        variables = sorted(acc, key=lambda v: (type(v) is Var, str(v) if type(v) is not Var else int(v)))
    variables = [Atom(v) if isinstance(v, str) and not isinstance(v, Atom) else v for v in variables]
    idx = {v: i for i, v in enumerate(variables)}
    c = _compile(e, sig, idx)
    tables = _tables_of(m)
    code = 0
    for env in itertools.product(range(m.k), repeat=len(variables)):
        code = code * m.k + _eval(c, tables, env)
    return code


def shared_variables(*exprs) -> list:
    acc: dict = {}
    for e in exprs:
        _variables(e, {}, acc)
    return sorted(acc, key=lambda v: (type(v) is Var, str(v) if type(v) is not Var else int(v)))


@dataclass(frozen=True)
class Verdict:
    refuted: bool
    model: Model | None = None
    codes: tuple = ()

    @property
    def label(self) -> str:
        return "refuted" if self.refuted else "possibly-equal"


def predict(models: Sequence[Model], lhs, rhs) -> Verdict:
    """Refuted when some model gives the two sides different codes.
    Agreement in every model is not a proof of equality."""
    if not models:
        raise ValueError("need at least one model")
    for m in models:
        sig = m.signature
        acc: dict = {}
        _variables(lhs, sig, acc)
        _variables(rhs, sig, acc)
        vs = sorted(acc, key=lambda v: (type(v) is Var, str(v) if type(v) is not Var else int(v)))
        a, b = expr_code(m, lhs, vs), expr_code(m, rhs, vs)
        if a != b:
            return Verdict(True, m, (a, b))
    return Verdict(False)


def model_signature(axioms: Sequence[Rule], k_max: int, statements: Sequence[Rule] = (),
                    signature: dict | None = None, max_tables: int = 1 << 20) -> dict:
    """Model counts per ``k`` and, per statement, which of all size-k tables
    satisfy it.

    Returns ``{"counts": {k: n}, "grids": {k: [[ids valid for statement i]]},
    "lost": [(i, j, k)], "partial": bool}``.  ``lost`` lists pairs where a
    model of statement ``i`` fails statement ``j``, for statements listed
    in entailment order by the caller.  Grids are only computed while the
    number of tables stays below ``max_tables``.
    """
    sig = dict(signature) if signature is not None else infer_signature([*axioms, *statements])
    counts, grids, lost, partial = {}, {}, [], False
    for k in range(1, k_max + 1):
        counts[k] = len(enumerate_models(axioms, k, sig))
        n_cells = len(_cells(sig, k))
        if statements and k ** n_cells <= max_tables:
            valid = [set() for _ in statements]
            insts = [_Instances([s], sig, k) for s in statements]
            for t in all_tables(sig, k):
                m = _freeze(sig, t, k)
                for i, inst in enumerate(insts):
                    if inst.all_hold(t):
                        valid[i].add(m.id)
            grids[k] = [sorted(v) for v in valid]
            for i in range(len(statements)):
                for j in range(i + 1, len(statements)):
                    if valid[i] - valid[j]:
                        lost.append((i, j, k))
        elif statements:
            partial = True
    return {"counts": counts, "grids": grids, "lost": lost, "partial": partial}


def dumps_models(models: Sequence[Model]) -> str:
    return json.dumps([m.to_json() for m in models])
