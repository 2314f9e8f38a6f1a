"""
Quasigroups, i.e. Latin squares on I_n: the cancellation axioms for one
binary operation, the kills of reduced squares, and the count of all
squares from the reduced ones.

A Latin square is reduced when its first row and first column read
0, 1, ..., n-1. Permuting rows and then the columns other than 0 maps the
reduced squares onto all squares exactly n!(n-1)! to one.
"""

import logging
from dataclasses import dataclass
from math import factorial
from typing import Dict, List, Tuple

from src.bitengine.engine import make_engine
from src.boolcore.reduction import kill
from src.boolcore.terms import Assignment
from src.fol.letters import function_letter
from src.fol.syntax import Eq, FImplies, FolFormula, FuncApp, Signature, TermVar, forall
from src.fol.translate import ground_theory

logger = logging.getLogger(__name__)


def quasigroup_signature(symbol: str = "M") -> Signature:
    return Signature(functions={symbol: 2})


def quasigroup_theory(symbol: str = "M") -> List[Tuple[str, FolFormula]]:
    """Left and right cancellation."""
    x, y, z = TermVar("x"), TermVar("y"), TermVar("z")

    def op(a, b):
        return FuncApp(symbol, (a, b))

    return [
        ("left_cancel", forall(["x", "y", "z"], FImplies(Eq(op(x, y), op(x, z)), Eq(y, z)))),
        ("right_cancel", forall(["x", "y", "z"], FImplies(Eq(op(y, x), op(z, x)), Eq(y, z)))),
    ]


def reduced_latin_kills(n: int, symbol: str = "M") -> Assignment:
    """
    M(0,j) = j and M(i,0) = i, every letter of those cells fixed. Inside,
    M(i,j) can be neither i nor j.
    """
    if n < 1:
        raise ValueError("Latin squares need n >= 1.")
    kills: Assignment = {}
    for i in range(n):
        for v in range(n):
            kills[function_letter(symbol, (0, i), v)] = int(v == i)
            kills[function_letter(symbol, (i, 0), v)] = int(v == i)
    for i in range(1, n):
        for j in range(1, n):
            kills[function_letter(symbol, (i, j), i)] = 0
            kills[function_letter(symbol, (i, j), j)] = 0
    return kills


def latin_normalization_factor(n: int) -> int:
    return factorial(n) * factorial(n - 1)


@dataclass(frozen=True)
class LatinCount:
    n: int
    reduced: int
    free_letters: int

    @property
    def total(self) -> int:
        return latin_normalization_factor(self.n) * self.reduced


def count_latin_squares(n: int, config: Dict = None, symbol: str = "M") -> LatinCount:
    config = dict(config or {})
    engine = make_engine(config.pop("backend", "bitparallel"), config)
    theory = ground_theory(quasigroup_theory(symbol), n, quasigroup_signature(symbol))
    kills = reduced_latin_kills(n, symbol)
    free = tuple(name for name in theory.letters if name not in kills)
    reduced, _ = engine.count_models(kill(theory.theta, kills), free)
    logger.info("Latin Squares: n=%d, %d free letters, %d reduced squares.", n, len(free), reduced)
    return LatinCount(n=n, reduced=reduced, free_letters=len(free))
