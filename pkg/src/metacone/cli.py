"""Command-line front end.

Every subcommand prints a JSON run report to standard output and writes any
requested artifacts (``--out``) to files.  Exit codes: 0 success, 1 internal
error, 2 bad input or configuration, 3 truncated by a cap under ``--strict``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction

from . import accumulate, branchial as br, combinators as sk, empirics, hypergraph as hg
from . import models as mdl, multiway as mw, prover, strings
from .expr import CONFLATIONS, ParseError, parse_expr, parse_rule, parse_rules, pretty, to_string
from .rewrite import normalize_kind

REPORT_VERSION = 1
DEFAULT_CALIBRATION = {
    "axiom_counting": "axioms counted as theorems",
    "branchial_extra_iteration": False,
    "path_truncation_margin": 0,
}


class ConfigError(ValueError):
    pass


def stable_id(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc.strerror}") from None


def _axioms(args) -> list:
    rules = []
    if getattr(args, "axioms", None):
        rules += parse_rules(_read(args.axioms))
    for text in getattr(args, "axiom", None) or ():
        rules.append(parse_rule(text))
    if not rules:
        raise ConfigError("no axioms given (use --axioms FILE or --axiom RULE)")
    return rules


def _positive(name):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if v <= 0:
            raise argparse.ArgumentTypeError(f"{name} must be positive")
        return v
    return conv


def _nonneg(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _jsonable(x):
    if isinstance(x, Fraction):
        return {"num": x.numerator, "den": x.denominator, "value": float(x)}
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in x]
    return x


# ----------------------------------------------------------------------------
# DOT writers with stable ids


def tokens_dot(g: accumulate.TokenEventGraph, show=to_string) -> str:
    ids = {t.id: stable_id(show(t.rule)) for t in g.tokens}
    lines = ["digraph tokens {"]
    for t in g.tokens:
        label = show(t.rule).replace('"', '\\"')
        lines.append(f'  "{ids[t.id]}" [shape=box,label="{label}"];')
    for e in g.events:
        eid = stable_id(f"{e.inputs}:{e.outputs}:{e.direction}:{e.position}")
        lines.append(f'  "e{eid}" [shape=point];')
        for i in dict.fromkeys(e.inputs):
            lines.append(f'  "{ids[i]}" -> "e{eid}";')
        for o in e.outputs:
            lines.append(f'  "e{eid}" -> "{ids[o]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def multiway_dot(g: mw.MultiwayGraph, show=mw.label_of) -> str:
    lines = ["digraph multiway {"]
    for s in sorted(g.step, key=mw._state_key):
        label = show(s).replace('"', '\\"')
        lines.append(f'  "{stable_id(show(s))}" [label="{label}"];')
    for a, _, b in g.edges():
        lines.append(f'  "{stable_id(show(a))}" -> "{stable_id(show(b))}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------------
# subcommands; each returns (result dict, truncated flag)


def cmd_cone(args):
    g = accumulate.evolve(_axioms(args), args.steps, args.kind, pairing=args.pairing,
                          conflation=args.conflation, max_tokens=args.max_tokens,
                          max_size=args.max_size, max_leaf_count=args.max_leaf_count,
                          record_events=bool(args.out))
    if args.out:
        _write(args.out, tokens_dot(g) if args.format == "dot" else g.dumps())
    result = {"theorems": len(g), "counts": g.counts()}
    if args.out:
        result["events"] = len(g.events)
    if args.list:
        result["statements"] = [pretty(r) for r in g.rules()]
    return result, g.truncated, g.truncation


def cmd_census(args):
    g = accumulate.evolve(_axioms(args), args.steps, args.kind, pairing=args.pairing,
                          conflation=args.conflation, max_tokens=args.max_tokens,
                          max_leaf_count=args.max_leaf_count, record_events=False)
    table = accumulate.theorem_census(g, args.measure)
    if args.out:
        rows = ["step,size,count"] + [f"{s},{k},{v}" for s, c in table.items() for k, v in c.items()]
        _write(args.out, "\n".join(rows) + "\n")
    return {"theorems": len(g), "census": table}, g.truncated, g.truncation


def cmd_multiway(args):
    rules = _axioms(args)
    initial = [parse_expr(t) for t in args.initial]
    g = mw.grow(rules, initial, args.steps, max_nodes=args.max_nodes, max_size=args.max_size)
    result = {"nodes": len(g.step), "edges": len(g.edges()),
              "per_step": [sum(1 for k in g.step.values() if k == t) for t in range(args.steps + 1)]}
    if args.target:
        src = next(iter(g.initial))
        from .expr import canonicalize
        dst = canonicalize(parse_expr(args.target))
        paths = mw.shortest_paths(g, src, dst)
        result["shortest_paths"] = len(paths)
        result["proof_length"] = len(paths[0].nodes) - 1 if paths else None
        result["paths"] = [[pretty(n) for n in p.nodes] for p in paths[:10]]
    if args.out:
        _write(args.out, multiway_dot(g, pretty) if args.format == "dot" else json.dumps(g.to_json()))
    return result, g.truncated, g.truncation


def cmd_branchial(args):
    if args.hanoi:
        succ, init = mw.hanoi_system(args.hanoi)
        depth = args.steps if args.step is None else max(args.steps, args.step)
        g = mw.grow(succ, [init], depth)
        slices = range(0, depth + 1) if args.step is None else [args.step]
        out = []
        for t in slices:
            b = br.branchial(g, t, args.layering)
            out.append({"step": t, "nodes": len(b.nodes), "edges": len(b.edges),
                        "components": len(br.components(b)) if b.nodes else 0})
        return {"hanoi": args.hanoi, "states": len(g.step), "slices": out}, g.truncated, g.truncation
    g = accumulate.evolve(_axioms(args), args.steps, args.kind, pairing=args.pairing,
                          conflation=args.conflation, max_tokens=args.max_tokens)
    step = args.steps if args.step is None else args.step
    b = br.branchial(g, step)
    if args.out:
        _write(args.out, br.adjacency_csv(b, lambda n: pretty(g.tokens[n].rule)))
    return {"step": step, "nodes": len(b.nodes), "edges": len(b.edges), "density": br.density(b),
            "components": len(br.components(b))}, g.truncated, g.truncation


def cmd_models(args):
    axioms = _axioms(args)
    finder = mdl.brute_force_models if args.brute else mdl.enumerate_models
    ms = finder(axioms, args.k)
    if args.out:
        _write(args.out, mdl.dumps_models(ms))
    result = {"k": args.k, "count": len(ms), "ids": sorted(m.id for m in ms)}
    if args.statement:
        lhs_rhs = parse_rule(args.statement)
        v = mdl.predict(ms, lhs_rhs.lhs, lhs_rhs.rhs)
        result["prediction"] = v.label
        result["refuting_model"] = v.model.id if v.model is not None else None
    return result, False, ""


def cmd_prove(args):
    axioms = _axioms(args)
    goal = parse_rule(args.goal)
    if args.tautology:
        p = prover.prove_to_tautology(axioms, goal, args.budget)
    else:
        p = prover.prove(axioms, goal, args.kind, args.budget, conflation=args.conflation,
                         preflight_models=args.preflight)
    if not p:
        return {"found": False, "reason": p.reason, "stats": p.stats,
                "refuted": p.refuted_by is not None}, False, ""
    result = {"found": True, "events": len(p), "replays": prover.replay(p), "proof": p.to_json()}
    if args.unroll and p.style == "forward":
        try:
            chain = prover.unroll(p, axioms)
            result["unrolled"] = [pretty(e) for e in chain]
            result["unrolled_metrics"] = prover.proof_metrics(chain)
        except ValueError as exc:
            result["unrolled"] = str(exc)
    if args.out:
        _write(args.out, json.dumps(p.to_json(), ensure_ascii=False, indent=1))
    return result, False, ""


_LOGIC = {
    "and": (2, lambda a, b: a and b), "or": (2, lambda a, b: a or b),
    "nand": (2, lambda a, b: not (a and b)), "nor": (2, lambda a, b: not (a or b)),
    "xor": (2, lambda a, b: a != b), "implies": (2, lambda a, b: (not a) or b),
    "not": (1, lambda a: not a), "identity": (1, lambda a: a),
}


def cmd_sk(args):
    result = {}
    if args.reduce:
        r = sk.reduce(sk.parse_sk(args.reduce), args.max_steps)
        result.update(normal_form=sk.show(r.expr), steps=r.steps, normal=r.normal)
    if args.encode is not None:
        result["encoding"] = sk.show(sk.encode_int(args.encode))
    if args.decode:
        d = sk.decode_int(sk.parse_sk(args.decode), args.max_steps)
        result["decoded"] = d if not isinstance(d, sk.Reduction) else "timeout"
    if args.find:
        if args.find not in _LOGIC:
            raise ConfigError(f"unknown function {args.find!r}; choose from {sorted(_LOGIC)}")
        s = sk.find_logic(_LOGIC[args.find][1], max_size=args.max_size)
        result.update(solutions=[sk.show(x) for x in s.solutions], size=s.size, tried=s.tried)
    if args.codeword:
        result["codeword"] = sk.codeword(sk.parse_sk(args.codeword))
    if not result:
        raise ConfigError("sk needs one of --reduce, --encode, --decode, --find, --codeword")
    return result, False, ""


def cmd_strings(args):
    rules = strings.parse_string_rules(_read(args.rules)) if args.rules else []
    rules += [strings.parse_string_rule(t) for t in args.rule or ()]
    if not rules:
        raise ConfigError("no string rules given")
    if args.truth:
        rep = strings.truth_analysis(rules[0], args.steps, args.max_len)
        return {"derived": sorted(map(strings.show_statement, rep.derived)),
                "inconsistent": rep.inconsistent,
                "witnesses": [[strings.show_statement(a), strings.show_statement(b)]
                              for a, b in rep.witnesses],
                "fractions": rep.fractions}, False, ""
    if args.initial:
        g = strings.string_multiway(rules, args.initial, args.steps, max_nodes=args.max_nodes,
                                    max_length=args.max_length)
        result = {"nodes": len(g.step), "edges": len(g.edges())}
        if args.target:
            result["first_reached"] = g.step.get(args.target)
            if args.target in g.step:
                paths = mw.find_paths(g, args.initial, args.target, all=True)
                result["paths"] = len(paths)
        if args.out:
            _write(args.out, multiway_dot(g, str))
        return result, g.truncated, g.truncation
    g = strings.string_accumulate(rules, args.steps, max_length=args.max_length)
    if args.out:
        _write(args.out, tokens_dot(g, strings.show_statement))
    return {"theorems": len(g), "counts": g.counts(),
            "statements": sorted(map(strings.show_statement, g.rules()))
            if args.list else None}, g.truncated, g.truncation


def cmd_hypergraph(args):
    rule = hg.parse_hg_rule(args.rule)
    if args.initial:
        g = hg.hg_multiway(rule, args.initial, args.steps, injective=args.injective)
        return {"nodes": len(g.step),
                "per_step": [sum(1 for k in g.step.values() if k == t)
                             for t in range(args.steps + 1)]}, g.truncated, g.truncation
    g = hg.hg_accumulate(rule, args.steps, injective=args.injective, max_edges=args.max_edges)
    if args.out:
        _write(args.out, tokens_dot(g, str))
    return {"theorems": len(g), "counts": g.counts()}, g.truncated, g.truncation


def cmd_empirics(args):
    g = empirics.read_csv(_read(args.edges), _read(args.nodes) if args.nodes else None)
    if args.node:
        if args.node not in g.prereqs:
            raise ConfigError(f"unknown node {args.node!r}")
        # copy counts grow exponentially; strings keep them exact for any JSON reader
        return {"node": args.node, "closure_size": empirics.closure_size(g, args.node),
                "profile": empirics.axiom_profile(g, args.node),
                "copies": {k: str(v) for k, v in empirics.unrolled_copies(g, args.node).items()}}, \
            False, ""
    rep = empirics.census(g)
    if args.out:
        _write(args.out, empirics.census_csv(rep))
    return rep, False, ""


# ----------------------------------------------------------------------------
# parser


def _cone_opts(p, steps=True):
    p.add_argument("--axioms", help="file with one rule per line")
    p.add_argument("--axiom", action="append", help="rule text, repeatable")
    if steps:
        p.add_argument("--steps", type=_nonneg, default=1)
    p.add_argument("--kind", default="sub", type=normalize_kind)
    p.add_argument("--pairing", choices=accumulate.PAIRINGS, default="frontier")
    p.add_argument("--conflation", choices=CONFLATIONS, default="symbolic")
    p.add_argument("--max-tokens", type=_positive("--max-tokens"), default=2_000_000)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="metacone", description=__doc__.splitlines()[0])
    ap.add_argument("--strict", action="store_true", help="exit 3 when a cap truncated the run")
    ap.add_argument("--threads", type=_positive("--threads"), default=os.cpu_count() or 1)
    # the same two options are accepted after the subcommand as well
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--strict", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--threads", type=_positive("--threads"), default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cone", parents=[common], help="accumulative entailment cone")
    _cone_opts(p)
    p.add_argument("--max-size", type=_positive("--max-size"))
    p.add_argument("--max-leaf-count", type=_positive("--max-leaf-count"))
    p.add_argument("--list", action="store_true", help="include every statement in the report")
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.set_defaults(fn=cmd_cone)

    p = sub.add_parser("census", parents=[common], help="theorem counts by size and step")
    _cone_opts(p)
    p.add_argument("--max-leaf-count", type=_positive("--max-leaf-count"))
    p.add_argument("--measure", choices=("leaf_count", "size"), default="leaf_count")
    p.add_argument("--out", help="CSV file")
    p.set_defaults(fn=cmd_census)

    p = sub.add_parser("multiway", parents=[common], help="multiway graph of expressions")
    p.add_argument("--axioms")
    p.add_argument("--axiom", action="append")
    p.add_argument("--initial", action="append", required=True)
    p.add_argument("--steps", type=_nonneg, default=3)
    p.add_argument("--target", help="report shortest proofs to this expression")
    p.add_argument("--max-nodes", type=_positive("--max-nodes"), default=1_000_000)
    p.add_argument("--max-size", type=_positive("--max-size"), default=64)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "dot"), default="dot")
    p.set_defaults(fn=cmd_multiway)

    p = sub.add_parser("branchial", parents=[common], help="branchial slices of a cone or the Hanoi game")
    _cone_opts(p)
    p.add_argument("--step", type=_nonneg)
    p.add_argument("--hanoi", type=_positive("--hanoi"), help="number of disks")
    p.add_argument("--layering", choices=("first", "walk"), default="first")
    p.add_argument("--out", help="adjacency CSV")
    p.set_defaults(fn=cmd_branchial)

    p = sub.add_parser("models", parents=[common], help="finite models of axioms")
    p.add_argument("--axioms")
    p.add_argument("--axiom", action="append")
    p.add_argument("--k", type=_positive("--k"), required=True)
    p.add_argument("--brute", action="store_true", help="exhaustive table enumeration")
    p.add_argument("--statement", help="predict whether this statement can follow")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_models)

    p = sub.add_parser("prove", parents=[common], help="search for a proof")
    _cone_opts(p, steps=False)
    p.add_argument("--goal", required=True)
    p.add_argument("--budget", type=_positive("--budget"), default=3)
    p.add_argument("--tautology", action="store_true", help="rewrite the goal to x <-> x")
    p.add_argument("--preflight", action="store_true", help="try finite-model refutation first")
    p.add_argument("--unroll", action="store_true")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_prove)

    p = sub.add_parser("sk", parents=[common], help="S,K combinators")
    p.add_argument("--reduce")
    p.add_argument("--encode", type=_nonneg)
    p.add_argument("--decode")
    p.add_argument("--find", help="and|or|nand|nor|xor|implies|not|identity")
    p.add_argument("--codeword")
    p.add_argument("--max-size", type=_positive("--max-size"), default=6)
    p.add_argument("--max-steps", type=_nonneg, default=1000)
    p.set_defaults(fn=cmd_sk)

    p = sub.add_parser("strings", parents=[common], help="string rewriting")
    p.add_argument("--rules")
    p.add_argument("--rule", action="append")
    p.add_argument("--steps", type=_nonneg, default=2)
    p.add_argument("--initial", help="grow a multiway system from this string")
    p.add_argument("--target")
    p.add_argument("--truth", action="store_true", help="negation and consistency analysis")
    p.add_argument("--max-len", type=_positive("--max-len"), default=4)
    p.add_argument("--max-length", type=_positive("--max-length"))
    p.add_argument("--max-nodes", type=_positive("--max-nodes"), default=1_000_000)
    p.add_argument("--list", action="store_true")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_strings)

    p = sub.add_parser("hypergraph", parents=[common], help="hypergraph rewriting")
    p.add_argument("--rule", required=True)
    p.add_argument("--steps", type=_nonneg, default=1)
    p.add_argument("--initial")
    p.add_argument("--injective", action="store_true")
    p.add_argument("--max-edges", type=_positive("--max-edges"), default=10)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_hypergraph)

    p = sub.add_parser("empirics", parents=[common], help="dependency-graph metrics")
    p.add_argument("--edges", required=True, help="CSV theorem,prerequisite")
    p.add_argument("--nodes", help="CSV node,kind,area")
    p.add_argument("--node")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_empirics)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        result, truncated, reason = args.fn(args)
    except (ConfigError, ParseError, ValueError, KeyError) as exc:
        print(json.dumps({"report_version": REPORT_VERSION, "command": args.command,
                          "error": str(exc)}), file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(json.dumps({"report_version": REPORT_VERSION, "command": args.command,
                          "error": f"internal error: {exc!r}"}), file=sys.stderr)
        return 1
    calibration = dict(DEFAULT_CALIBRATION)
    for key in ("pairing", "conflation", "layering"):
        if hasattr(args, key):
            calibration[key] = getattr(args, key)
    report = {
        "report_version": REPORT_VERSION,
        "command": args.command,
        "calibration": calibration,
        "threads": args.threads,
        "truncated": bool(truncated),
        "truncation": reason,
        "wall_time_s": round(time.perf_counter() - start, 3),
        "result": _jsonable(result),
    }
    print(json.dumps(report, ensure_ascii=False, indent=1))
    if truncated and args.strict:
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
