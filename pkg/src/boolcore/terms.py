"""
Propositional terms over named letters.

Terms are immutable trees. And/Or are n-ary (grounded theories produce very
wide conjunctions); every consumer that needs a binary tree folds them
left-associatively, which is also how node_count measures a term.
"""

from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple, Union


@dataclass(frozen=True, order=True)
class Letter:
    """
    A propositional letter: a family name plus an index tuple.
    The dataclass ordering is the canonical letter order: by family name,
    then by the index tuple componentwise.
    """

    family: str
    index: Tuple[int, ...] = ()

    def __str__(self) -> str:
        if not self.index:
            return self.family
        return f"{self.family}({','.join(str(i) for i in self.index)})"


Assignment = Dict[Letter, int]


class BoolTerm:
    """Marker base class for every term node."""

    __slots__ = ()


@dataclass(frozen=True)
class Var(BoolTerm):
    name: Letter


@dataclass(frozen=True)
class Const(BoolTerm):
    bit: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise ValueError(f"Const bit must be 0 or 1, got {self.bit!r}.")


@dataclass(frozen=True)
class Not(BoolTerm):
    child: BoolTerm


@dataclass(frozen=True)
class And(BoolTerm):
    children: Tuple[BoolTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ValueError("And needs at least two children; use conj().")


@dataclass(frozen=True)
class Or(BoolTerm):
    children: Tuple[BoolTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ValueError("Or needs at least two children; use disj().")


@dataclass(frozen=True)
class Xor(BoolTerm):
    left: BoolTerm
    right: BoolTerm


@dataclass(frozen=True)
class Implies(BoolTerm):
    left: BoolTerm
    right: BoolTerm


@dataclass(frozen=True)
class Iff(BoolTerm):
    left: BoolTerm
    right: BoolTerm


TRUE = Const(1)
FALSE = Const(0)


def letter(family: str, *index: int) -> Letter:
    return Letter(family, tuple(index))


def var(family: str, *index: int) -> Var:
    return Var(Letter(family, tuple(index)))


def conj(terms: Iterable[BoolTerm]) -> BoolTerm:
    """Finite conjunction; the empty conjunction is Const 1."""
    items = list(terms)
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return And(tuple(items))


def disj(terms: Iterable[BoolTerm]) -> BoolTerm:
    """Finite disjunction; the empty disjunction is Const 0."""
    items = list(terms)
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return Or(tuple(items))


def children_of(t: BoolTerm) -> Tuple[BoolTerm, ...]:
    if isinstance(t, (Var, Const)):
        return ()
    if isinstance(t, Not):
        return (t.child,)
    if isinstance(t, (And, Or)):
        return t.children
    return (t.left, t.right)


def variables(t: BoolTerm) -> Tuple[Letter, ...]:
    """The letters of t in canonical order, each once."""
    found = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            found.add(node.name)
        else:
            stack.extend(children_of(node))
    return tuple(sorted(found))


def node_count(t: BoolTerm) -> int:
    """
    Number of nodes once n-ary And/Or are binarized left-associatively:
    an And with c children contributes c - 1 binary nodes.
    """
    total = 0
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, (And, Or)):
            total += len(node.children) - 1
        else:
            total += 1
        stack.extend(children_of(node))
    return total


@dataclass(frozen=True)
class Valuation(Mapping):
    """
    A total valuation over an ordered letter set, stored as its index.
    Letter i (0-based, canonical order) takes bit (index >> (v - 1 - i)) & 1,
    so the first letter is the most significant bit.
    """

    order: Tuple[Letter, ...]
    index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        if not 0 <= self.index < (1 << len(self.order)):
            raise ValueError(
                f"Valuation index {self.index} out of range for {len(self.order)} letters."
            )

    @cached_property
    def _positions(self) -> Dict[Letter, int]:
        return {name: pos for pos, name in enumerate(self.order)}

    def __getitem__(self, name: Letter) -> int:
        pos = self._positions[name]
        return (self.index >> (len(self.order) - 1 - pos)) & 1

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.order)

    def __len__(self) -> int:
        return len(self.order)

    def __hash__(self):
        return hash((self.order, self.index))

    def __eq__(self, other):
        if isinstance(other, Valuation):
            return self.order == other.order and self.index == other.index
        return Mapping.__eq__(self, other)

    def bits(self) -> str:
        if not self.order:
            return ""
        return format(self.index, f"0{len(self.order)}b")

    def as_dict(self) -> Assignment:
        return {name: self[name] for name in self.order}

    @classmethod
    def from_mapping(
        cls, order: Sequence[Letter], mapping: Mapping
    ) -> "Valuation":
        index = 0
        for name in order:
            if name not in mapping:
                raise KeyError(f"Letter '{name}' has no value in the mapping.")
            index = (index << 1) | (int(mapping[name]) & 1)
        return cls(tuple(order), index)


def format_term(t: BoolTerm) -> str:
    """Fully parenthesised rendering in the script operator syntax."""
    if isinstance(t, Var):
        return str(t.name)
    if isinstance(t, Const):
        return str(t.bit)
    if isinstance(t, Not):
        return f"~{format_term(t.child)}"
    if isinstance(t, And):
        return "(" + " & ".join(format_term(c) for c in t.children) + ")"
    if isinstance(t, Or):
        return "(" + " | ".join(format_term(c) for c in t.children) + ")"
    symbol = {Xor: "^", Implies: "->", Iff: "<->"}[type(t)]
    return f"({format_term(t.left)} {symbol} {format_term(t.right)})"
