"""S,K combinators: normal-order reduction, integer encodings, logic search.

An expression is a leaf (a string: ``"S"``, ``"K"`` or a free atom) or a
pair ``(f, x)`` meaning ``f[x]``.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass
from itertools import product

__all__ = [
    "S", "K", "app", "parse_sk", "show", "show_compact", "leaves", "reduce", "Reduction",
    "encode_int", "decode_int", "TRUE", "FALSE", "PLUS", "AND", "find_logic", "LogicSearch",
    "enumerate_sk", "codeword", "from_codeword", "reduce_innermost",
]

S, K = "S", "K"


def app(f, *xs):
    for x in xs:
        f = (f, x)
    return f


_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*|[\[\]()])")


def parse_sk(text: str):
    """Parse ``S[S][K]``, ``S(S(KS))(S(KK))`` or a mix.

    In compact form juxtaposition is application and single capital letters
    are separate leaves, so ``KS`` is ``K[S]``.
    """
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"bad character at {pos}: {text[pos:]!r}")
        t = m.group(1)
        if t in "[]()":
            toks.append(t)
        elif re.fullmatch(r"[SK]+", t):
            toks.extend(t)
        else:
            toks.append(t)
        pos = m.end()
    i = 0

    def seq(closer):
        nonlocal i
        e = None
        while i < len(toks) and toks[i] != closer:
            t = toks[i]
            if t in "[(":
                i += 1
                sub = seq("]" if t == "[" else ")")
                if i >= len(toks):
                    raise ValueError("unbalanced brackets")
                i += 1
            elif t in "])":
                raise ValueError("unbalanced brackets")
            else:
                sub = t
                i += 1
            e = sub if e is None else (e, sub)
        if e is None:
            raise ValueError("empty expression")
        return e

    e = seq(None)
    if i != len(toks):
        raise ValueError("trailing input")
    return e


def show(e) -> str:
    """Bracket form, ``S[S][K]``."""
    if isinstance(e, str):
        return e
    f, args = e, []
    while isinstance(f, tuple):
        args.append(f[1])
        f = f[0]
    return f + "".join(f"[{show(a)}]" for a in reversed(args))


def show_compact(e) -> str:
    """Juxtaposition form, ``S(S(KS))(S(KK))``."""
    if isinstance(e, str):
        return e
    f, x = e
    right = show_compact(x)
    if isinstance(x, tuple):
        right = f"({right})"
    return show_compact(f) + right


def leaves(e) -> int:
    n, stack = 0, [e]
    while stack:
        x = stack.pop()
        if isinstance(x, tuple):
            stack.extend(x)
        else:
            n += 1
    return n


# ----------------------------------------------------------------------------
# reduction


@dataclass(frozen=True)
class Reduction:
    expr: object
    steps: int
    normal: bool             # False means the step budget ran out
    trace: tuple = ()


def _step_outer(e):
    """One leftmost-outermost step, or ``None`` at normal form."""
    # unwind the spine
    spine = []
    h = e
    while isinstance(h, tuple):
        spine.append(h[1])
        h = h[0]
    args = spine[::-1]
    if h == "K" and len(args) >= 2:
        return app(args[0], *args[2:])
    if h == "S" and len(args) >= 3:
        x, y, z = args[:3]
        return app(((x, z), (y, z)), *args[3:])
    for i, a in enumerate(args):
        r = _step_outer(a)
        if r is not None:
            return app(h, *args[:i], r, *args[i + 1:])
    return None


def reduce(e, max_steps: int = 1000, trace: bool = False, max_leaves: int = 100_000) -> Reduction:
    """Normal-order reduction with ``S[x][y][z] -> x[z][y[z]]`` and
    ``K[x][y] -> x``.  Running out of budget is reported, not raised."""
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    seen = [e] if trace else []
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20_000))
    try:
        for n in range(max_steps + 1):
            try:
                r = _step_outer(e)
            except RecursionError:
                return Reduction(e, n, False, tuple(seen))
            if r is None:
                return Reduction(e, n, True, tuple(seen))
            if n == max_steps or leaves(r) > max_leaves:
                return Reduction(e, n, False, tuple(seen))
            e = r
            if trace:
                seen.append(e)
    finally:
        sys.setrecursionlimit(limit)
    return Reduction(e, max_steps, False, tuple(seen))


def _step_inner(e):
    """One rightmost-innermost step."""
    if not isinstance(e, tuple):
        return None
    f, x = e
    r = _step_inner(x)
    if r is not None:
        return (f, r)
    r = _step_inner(f)
    if r is not None:
        return (r, x)
    spine, h = [], e
    while isinstance(h, tuple):
        spine.append(h[1])
        h = h[0]
    args = spine[::-1]
    if h == "K" and len(args) == 2:
        return args[0]
    if h == "S" and len(args) == 3:
        a, b, c = args
        return ((a, c), (b, c))
    return None


def reduce_innermost(e, max_steps: int = 1000, max_leaves: int = 100_000) -> Reduction:
    """Applicative-order reduction, used to cross-check normal forms."""
    for n in range(max_steps + 1):
        try:
            r = _step_inner(e)
        except RecursionError:
            return Reduction(e, n, False)
        if r is None:
            return Reduction(e, n, True)
        if n == max_steps or leaves(r) > max_leaves:
            return Reduction(e, n, False)
        e = r
    return Reduction(e, max_steps, False)


# ----------------------------------------------------------------------------
# integers and truth values

TRUE = K
FALSE = (S, K)
AND = parse_sk("S[S][K]")
PLUS = parse_sk("S[K[S]][S[K[S[K[S]]]][S[K[K]]]]")
_SUCC = parse_sk("S[S[K[S]][K]]")


def encode_int(n: int):
    """``n`` successor wrappers ``S[S[K[S]][K]][...]`` around ``S[K]``, the
    nested form as it is displayed for small ``n``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    e = FALSE
    for _ in range(n):
        e = (_SUCC, e)
    return e


def decode_int(e, max_steps: int = 10_000):
    """Apply to ``[S][K]``, reduce, and count the S's of the output chain
    ``S[S[...S[K]]]`` (``K`` alone is 0).  Returns ``None`` when the output
    has another shape, or the unfinished ``Reduction`` on timeout."""
    r = reduce(app(e, S, K), max_steps)
    if not r.normal:
        return r
    out, n = r.expr, 0
    while isinstance(out, tuple) and out[0] == "S":
        out = out[1]
        n += 1
    return n if out == "K" else None


# ----------------------------------------------------------------------------
# search


def enumerate_sk(n_leaves: int):
    """All S,K trees with ``n_leaves`` leaves, in a fixed lexicographic order
    (left subtree size ascending, then S before K)."""
    if n_leaves == 1:
        yield S
        yield K
        return
    for left in range(1, n_leaves):
        lefts = list(enumerate_sk(left))
        rights = list(enumerate_sk(n_leaves - left))
        for a in lefts:
            for b in rights:
                yield (a, b)


@dataclass
class LogicSearch:
    solutions: list
    size: int | None
    tried: int
    timeouts: int


def find_logic(table, true=TRUE, false=FALSE, max_size: int = 6,
               max_steps: int = 200, all_minimal: bool = True) -> LogicSearch:
    """Smallest combinators ``f`` with ``f[x]...`` reducing to the encoding of
    ``table(x, ...)`` for every input row.

    ``table`` is a dict from boolean tuples to booleans, or a callable taking
    booleans; its arity is 1 or 2.
    """
    if callable(table):
        import inspect
        arity = len(inspect.signature(table).parameters)
        rows = {bits: bool(table(*bits)) for bits in product((True, False), repeat=arity)}
    else:
        rows = {tuple(k): bool(v) for k, v in table.items()}
        arity = len(next(iter(rows)))
        if len(rows) != 2 ** arity:
            raise ValueError("truth table must be total")
    if arity not in (1, 2):
        raise ValueError("arity must be 1 or 2")
    enc_t = reduce(true, max_steps).expr
    enc_f = reduce(false, max_steps).expr
    tried = timeouts = 0
    for n in range(1, max_size + 1):
        found = []
        for cand in enumerate_sk(n):
            tried += 1
            ok = True
            for bits, out in rows.items():
                r = reduce(app(cand, *[true if b else false for b in bits]), max_steps,
                           max_leaves=5_000)
                if not r.normal:
                    timeouts += 1
                    ok = False
                    break
                if r.expr != (enc_t if out else enc_f):
                    ok = False
                    break
            if ok:
                found.append(cand)
                if not all_minimal:
                    return LogicSearch(found, n, tried, timeouts)
        if found:
            return LogicSearch(found, n, tried, timeouts)
    return LogicSearch([], None, tried, timeouts)


# ----------------------------------------------------------------------------
# bit codewords: preorder, 1 for an application, 00 for S, 01 for K


def codeword(e) -> str:
    out, stack = [], [e]
    while stack:
        x = stack.pop()
        if isinstance(x, tuple):
            out.append("1")
            stack.append(x[1])
            stack.append(x[0])
        elif x == "S":
            out.append("00")
        elif x == "K":
            out.append("01")
        else:
            raise ValueError(f"free atom {x!r} has no codeword")
    return "".join(out)


def from_codeword(bits: str):
    pos = 0

    def go():
        nonlocal pos
        if pos >= len(bits):
            raise ValueError("truncated codeword")
        if bits[pos] == "1":
            pos += 1
            f = go()
            return (f, go())
        leaf = bits[pos:pos + 2]
        pos += 2
        if leaf == "00":
            return S
        if leaf == "01":
            return K
        raise ValueError("truncated codeword")

    e = go()
    if pos != len(bits):
        raise ValueError("trailing bits")
    return e
