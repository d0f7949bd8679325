"""Term rewriting, multiway and entailment-cone machinery for exploring
axiom systems: cones, token-event and branchial graphs, proofs, finite
models, combinators, strings, hypergraphs and dependency-graph metrics."""

from .expr import App, Atom, Rule, Var, canonical_rule, canonicalize, parse, parse_rule, pretty
from .accumulate import evolve
from .multiway import grow

__version__ = "0.1.0"

__all__ = ["App", "Atom", "Rule", "Var", "canonical_rule", "canonicalize", "parse",
           "parse_rule", "pretty", "evolve", "grow", "__version__"]
