"""Extraction cost model.

Cheap arithmetic versus expensive transcendentals is the dominant
separation: extraction mainly tries to trade sin/cos/exp for
multiplications against already-extracted subexpressions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from quditforge.symbolic import scalar as sc

DEFAULT_COSTS: dict[str, float] = {
    sc.PI: 0.0,
    sc.VAR: 0.0,
    sc.CONST: 0.5,
    sc.NEG: 1.0,
    sc.ADD: 1.0,
    sc.SUB: 1.0,
    sc.MUL: 5.0,
    sc.DIV: 5.0,
    sc.SQRT: 50.0,
    sc.SIN: 50.0,
    sc.COS: 50.0,
    sc.EXP: 100.0,
    sc.LN: 100.0,
    sc.POW: 100.0,
}


@dataclass(frozen=True)
class CostModel:
    costs: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_COSTS))

    def node_cost(self, op: str) -> float:
        return self.costs[op]
