"""
Compiles a BoolTerm into a postfix program over free-vector positions.

n-ary And/Or are folded left-associatively, so the program has one binary
operation per binarized node and its length tracks node_count.
"""

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from src.bitengine.free_vectors import ALL_ONES, FreeVectorScheme, words_per_chunk
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

PUSH_VAR = "var"
PUSH_CONST = "const"
NOT = "not"
AND = "and"
OR = "or"
XOR = "xor"
IMPLIES = "implies"
IFF = "iff"

_BINARY = {Xor: XOR, Implies: IMPLIES, Iff: IFF}


@dataclass(frozen=True)
class Program:
    instructions: Tuple[Tuple[str, int], ...]
    v: int

    @property
    def positions(self) -> Tuple[int, ...]:
        return tuple(sorted({arg for op, arg in self.instructions if op == PUSH_VAR}))


def compile_term(t: BoolTerm, order: Sequence[Letter]) -> Program:
    positions: Dict[Letter, int] = {name: pos + 1 for pos, name in enumerate(order)}
    out: List[Tuple[str, int]] = []

    def emit(node: BoolTerm):
        if isinstance(node, Var):
            if node.name not in positions:
                raise UnboundLetterError(node.name)
            out.append((PUSH_VAR, positions[node.name]))
        elif isinstance(node, Const):
            out.append((PUSH_CONST, node.bit))
        elif isinstance(node, Not):
            emit(node.child)
            out.append((NOT, 0))
        elif isinstance(node, (And, Or)):
            op = AND if isinstance(node, And) else OR
            emit(node.children[0])
            for child in node.children[1:]:
                emit(child)
                out.append((op, 0))
        else:
            emit(node.left)
            emit(node.right)
            out.append((_BINARY[type(node)], 0))

    emit(t)
    return Program(tuple(out), len(order))


def run_program(program: Program, chunk_index: int, k: int) -> np.ndarray:
    """
    Evaluates the program over chunk chunk_index of size 2^k. Bits beyond the
    chunk inside a short word are left unmasked; callers mask the result.
    """
    scheme = FreeVectorScheme(program.v)
    count = words_per_chunk(k)
    rows = {pos: scheme.chunk_words(pos, chunk_index, k) for pos in program.positions}
    stack: List[np.ndarray] = []
    for op, arg in program.instructions:
        if op == PUSH_VAR:
            stack.append(rows[arg])
        elif op == PUSH_CONST:
            fill = ALL_ONES if arg else np.uint64(0)
            stack.append(np.full(count, fill, dtype=np.uint64))
        elif op == NOT:
            stack.append(np.invert(stack.pop()))
        else:
            right = stack.pop()
            left = stack.pop()
            if op == AND:
                stack.append(left & right)
            elif op == OR:
                stack.append(left | right)
            elif op == XOR:
                stack.append(left ^ right)
            elif op == IMPLIES:
                stack.append(np.invert(left) | right)
            else:
                stack.append(np.invert(left ^ right))
    result = stack.pop()
    if stack:
        raise RuntimeError("Malformed program: stack not empty after evaluation.")
    return result
