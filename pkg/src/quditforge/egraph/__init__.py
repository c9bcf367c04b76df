"""Equality-saturation simplifier for scalar expression sets.

A gate's unitary and gradient scalars are inserted into one e-graph,
saturated under a rewrite-rule file, and extracted together with a greedy
bottom-up heuristic that zeroes the cost of everything already extracted,
so later roots reuse earlier subexpressions. The result is a shared DAG
ready for compilation into a flat register program.
"""

from quditforge.egraph.cost import CostModel
from quditforge.egraph.extract import MissingRootError, SharedDag, extract_shared
from quditforge.egraph.graph import EGraph, SaturationLimits, SaturationReport, saturate
from quditforge.egraph.pattern import Rule, load_rules, parse_rule
from quditforge.egraph.simplify import default_rules, simplify_unitary

__all__ = [
    "CostModel",
    "EGraph",
    "MissingRootError",
    "Rule",
    "SaturationLimits",
    "SaturationReport",
    "SharedDag",
    "default_rules",
    "extract_shared",
    "load_rules",
    "parse_rule",
    "saturate",
    "simplify_unitary",
]
