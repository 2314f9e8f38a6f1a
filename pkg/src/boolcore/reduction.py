"""
Constant reduction and substitution.

Substitution is the mechanism behind killing variables: letters fixed by
assumptions, definable constants or partition orientations are replaced by
constants, and reduce_constants then propagates them away.
"""

import logging
from typing import Mapping

from src.boolcore.terms import (
    FALSE,
    TRUE,
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
    conj,
    disj,
)

logger = logging.getLogger(__name__)


def _negate(t: BoolTerm) -> BoolTerm:
    if isinstance(t, Const):
        return Const(1 - t.bit)
    if isinstance(t, Not):
        return t.child
    return Not(t)


def reduce_constants(t: BoolTerm) -> BoolTerm:
    """
    Propagates Const nodes through all seven connectives and removes double
    negations. The result contains no Const unless it is Const 0 or Const 1.
    No other simplification is done.
    """
    if isinstance(t, (Var, Const)):
        return t

    if isinstance(t, Not):
        return _negate(reduce_constants(t.child))

    if isinstance(t, (And, Or)):
        absorbing = 0 if isinstance(t, And) else 1
        kept = []
        for child in t.children:
            r = reduce_constants(child)
            if isinstance(r, Const):
                if r.bit == absorbing:
                    return Const(absorbing)
                continue
            kept.append(r)
        return conj(kept) if isinstance(t, And) else disj(kept)

    left = reduce_constants(t.left)
    right = reduce_constants(t.right)

    if isinstance(t, Xor):
        if isinstance(left, Const) and isinstance(right, Const):
            return Const(left.bit ^ right.bit)
        if isinstance(left, Const):
            return right if left.bit == 0 else _negate(right)
        if isinstance(right, Const):
            return left if right.bit == 0 else _negate(left)
        return Xor(left, right)

    if isinstance(t, Implies):
        if isinstance(left, Const):
            return right if left.bit == 1 else TRUE
        if isinstance(right, Const):
            return TRUE if right.bit == 1 else _negate(left)
        return Implies(left, right)

    if isinstance(t, Iff):
        if isinstance(left, Const) and isinstance(right, Const):
            return Const(int(left.bit == right.bit))
        if isinstance(left, Const):
            return right if left.bit == 1 else _negate(right)
        if isinstance(right, Const):
            return left if right.bit == 1 else _negate(left)
        return Iff(left, right)

    raise TypeError(f"Unknown term node {type(t).__name__}.")


def substitute(t: BoolTerm, assignment: Mapping[Letter, int]) -> BoolTerm:
    """Replaces every bound letter with its constant; performs no reduction."""
    if not assignment:
        return t
    return _substitute(t, assignment)


def _substitute(t: BoolTerm, assignment: Mapping[Letter, int]) -> BoolTerm:
    if isinstance(t, Var):
        if t.name in assignment:
            return TRUE if assignment[t.name] else FALSE
        return t
    if isinstance(t, Const):
        return t
    if isinstance(t, Not):
        child = _substitute(t.child, assignment)
        return t if child is t.child else Not(child)
    if isinstance(t, (And, Or)):
        children = tuple(_substitute(c, assignment) for c in t.children)
        if all(new is old for new, old in zip(children, t.children)):
            return t
        return type(t)(children)
    left = _substitute(t.left, assignment)
    right = _substitute(t.right, assignment)
    if left is t.left and right is t.right:
        return t
    return type(t)(left, right)


def kill(t: BoolTerm, assignment: Mapping[Letter, int]) -> BoolTerm:
    """substitute followed by reduce_constants."""
    reduced = reduce_constants(substitute(t, assignment))
    logger.debug(
        "Reduction: killed %d letters, result is %s.",
        len(assignment),
        type(reduced).__name__,
    )
    return reduced


def merge_assignments(*assignments: Mapping[Letter, int]) -> dict:
    """Later assignments override earlier ones, in the order given."""
    merged = {}
    for assignment in assignments:
        for name, bit in assignment.items():
            merged[name] = int(bit)
    return merged
