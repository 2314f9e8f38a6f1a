"""
Propositional letters of a grounded signature.

p-letters code function graphs: p_{F a1..ak b} is true iff F(a1..ak) = b.
q-letters code relations: q_{R a1..ak} is true iff R(a1..ak).
As boolcore letters both are (symbol, index) with the value b appended for p.
"""

from dataclasses import dataclass
from itertools import product
from typing import Optional, Tuple

from src.boolcore.terms import Letter
from src.fol.syntax import Signature

FUNCTION_KIND = "p"
RELATION_KIND = "q"


@dataclass(frozen=True)
class PropLetter:
    kind: str
    symbol: str
    args: Tuple[int, ...]
    value: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if self.kind == FUNCTION_KIND and self.value is None:
            raise ValueError("A p-letter carries a value element.")
        if self.kind == RELATION_KIND and self.value is not None:
            raise ValueError("A q-letter carries no value element.")
        if self.kind not in (FUNCTION_KIND, RELATION_KIND):
            raise ValueError(f"Unknown letter kind '{self.kind}'.")

    @property
    def letter(self) -> Letter:
        if self.kind == FUNCTION_KIND:
            return Letter(self.symbol, self.args + (self.value,))
        return Letter(self.symbol, self.args)


def function_letter(symbol: str, args: Tuple[int, ...], value: int) -> Letter:
    return Letter(symbol, tuple(args) + (value,))


def relation_letter(symbol: str, args: Tuple[int, ...]) -> Letter:
    return Letter(symbol, tuple(args))


def prop_letter(name: Letter, signature: Signature) -> PropLetter:
    """Inverse of PropLetter.letter under a signature."""
    if signature.is_function(name.family):
        return PropLetter(FUNCTION_KIND, name.family, name.index[:-1], name.index[-1])
    if signature.is_relation(name.family):
        return PropLetter(RELATION_KIND, name.family, name.index)
    raise KeyError(f"Letter '{name}' belongs to no symbol of the signature.")


def all_letters(signature: Signature, n: int) -> Tuple[Letter, ...]:
    """Every letter derivable from the signature over I_n, in canonical order."""
    letters = []
    for symbol, arity in signature.functions:
        for args in product(range(n), repeat=arity):
            for value in range(n):
                letters.append(function_letter(symbol, args, value))
    for symbol, arity in signature.relations:
        for args in product(range(n), repeat=arity):
            letters.append(relation_letter(symbol, args))
    return tuple(sorted(letters))


def letter_in_range(name: Letter, signature: Signature, n: int) -> bool:
    try:
        parsed = prop_letter(name, signature)
    except KeyError:
        return False
    expected = signature.arity(parsed.symbol)
    if len(parsed.args) != expected:
        return False
    values = parsed.args + ((parsed.value,) if parsed.value is not None else ())
    return all(0 <= v < n for v in values)
