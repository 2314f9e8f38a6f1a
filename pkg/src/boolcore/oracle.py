from typing import Mapping

from src.boolcore.terms import (
    And,
    BoolTerm,
    Const,
    Iff,
    Implies,
    Letter,
    Not,
    Or,
    Var,
    Xor,
)
from src.common.errors import UnboundLetterError


def eval_naive(t: BoolTerm, valuation: Mapping[Letter, int]) -> int:
    """
    Two-valued evaluation of t under a valuation total over its letters.
    This is the reference semantics the bit-parallel engine is tested against.
    """
    if isinstance(t, Var):
        try:
            return int(valuation[t.name]) & 1
        except KeyError:
            raise UnboundLetterError(t.name) from None
    if isinstance(t, Const):
        return t.bit
    if isinstance(t, Not):
        return 1 - eval_naive(t.child, valuation)
    if isinstance(t, And):
        return int(all(eval_naive(c, valuation) for c in t.children))
    if isinstance(t, Or):
        return int(any(eval_naive(c, valuation) for c in t.children))

    left = eval_naive(t.left, valuation)
    right = eval_naive(t.right, valuation)
    if isinstance(t, Xor):
        # x + y = x'y v xy'
        return left ^ right
    if isinstance(t, Implies):
        return int((not left) or right)
    if isinstance(t, Iff):
        return int(left == right)
    raise TypeError(f"Unknown term node {type(t).__name__}.")
