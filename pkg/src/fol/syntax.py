"""First-order signatures, terms and formulas over finite domains I_n."""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Tuple

from src.common.errors import ArityError


@dataclass(frozen=True)
class Signature:
    """
    Function symbols (constants are 0-ary functions) and relation symbols
    with their arities. Names are unique across both kinds.
    """

    functions: Tuple[Tuple[str, int], ...] = ()
    relations: Tuple[Tuple[str, int], ...] = ()

    def __init__(self, functions: Dict[str, int] = None, relations: Dict[str, int] = None):
        functions = dict(functions or {})
        relations = dict(relations or {})
        clash = set(functions) & set(relations)
        if clash:
            raise ValueError(f"Symbol names used twice in the signature: {sorted(clash)}.")
        for name, arity in list(functions.items()) + list(relations.items()):
            if arity < 0:
                raise ValueError(f"Symbol '{name}' has a negative arity.")
        object.__setattr__(self, "functions", tuple(sorted(functions.items())))
        object.__setattr__(self, "relations", tuple(sorted(relations.items())))

    @property
    def function_arities(self) -> Dict[str, int]:
        return dict(self.functions)

    @property
    def relation_arities(self) -> Dict[str, int]:
        return dict(self.relations)

    @property
    def constants(self) -> Tuple[str, ...]:
        return tuple(name for name, arity in self.functions if arity == 0)

    def is_function(self, name: str) -> bool:
        return name in self.function_arities

    def is_relation(self, name: str) -> bool:
        return name in self.relation_arities

    def arity(self, name: str) -> int:
        arities = {**self.function_arities, **self.relation_arities}
        if name not in arities:
            raise KeyError(f"Unknown symbol '{name}'.")
        return arities[name]

    def check_arity(self, name: str, actual: int):
        expected = self.arity(name)
        if expected != actual:
            raise ArityError(name, expected, actual)


# --- terms -----------------------------------------------------------------


class FolTerm:
    __slots__ = ()


@dataclass(frozen=True)
class Element(FolTerm):
    """The name a-underlined of a domain element."""

    value: int


@dataclass(frozen=True)
class TermVar(FolTerm):
    name: str


@dataclass(frozen=True)
class FuncApp(FolTerm):
    symbol: str
    args: Tuple[FolTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


# --- formulas --------------------------------------------------------------


class FolFormula:
    __slots__ = ()


@dataclass(frozen=True)
class Truth(FolFormula):
    value: bool


@dataclass(frozen=True)
class Eq(FolFormula):
    left: FolTerm
    right: FolTerm


@dataclass(frozen=True)
class Rel(FolFormula):
    symbol: str
    args: Tuple[FolTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class FNot(FolFormula):
    body: FolFormula


@dataclass(frozen=True)
class FAnd(FolFormula):
    parts: Tuple[FolFormula, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


@dataclass(frozen=True)
class FOr(FolFormula):
    parts: Tuple[FolFormula, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


@dataclass(frozen=True)
class FImplies(FolFormula):
    left: FolFormula
    right: FolFormula


@dataclass(frozen=True)
class FIff(FolFormula):
    left: FolFormula
    right: FolFormula


@dataclass(frozen=True)
class FXor(FolFormula):
    left: FolFormula
    right: FolFormula


@dataclass(frozen=True)
class ForAll(FolFormula):
    var: str
    body: FolFormula


@dataclass(frozen=True)
class Exists(FolFormula):
    var: str
    body: FolFormula


def forall(names: Iterable[str], body: FolFormula) -> FolFormula:
    for name in reversed(list(names)):
        body = ForAll(name, body)
    return body


def exists(names: Iterable[str], body: FolFormula) -> FolFormula:
    for name in reversed(list(names)):
        body = Exists(name, body)
    return body


def rel(symbol: str, *args) -> Rel:
    """Rel with str arguments read as variables and ints as element names."""
    return Rel(symbol, tuple(_as_term(a) for a in args))


def _as_term(value) -> FolTerm:
    if isinstance(value, FolTerm):
        return value
    if isinstance(value, int):
        return Element(value)
    return TermVar(str(value))


def term_variables(t: FolTerm) -> FrozenSet[str]:
    if isinstance(t, TermVar):
        return frozenset({t.name})
    if isinstance(t, FuncApp):
        found = frozenset()
        for arg in t.args:
            found |= term_variables(arg)
        return found
    return frozenset()


def free_variables(phi: FolFormula) -> FrozenSet[str]:
    if isinstance(phi, Truth):
        return frozenset()
    if isinstance(phi, Eq):
        return term_variables(phi.left) | term_variables(phi.right)
    if isinstance(phi, Rel):
        found = frozenset()
        for arg in phi.args:
            found |= term_variables(arg)
        return found
    if isinstance(phi, FNot):
        return free_variables(phi.body)
    if isinstance(phi, (FAnd, FOr)):
        found = frozenset()
        for part in phi.parts:
            found |= free_variables(part)
        return found
    if isinstance(phi, (FImplies, FIff, FXor)):
        return free_variables(phi.left) | free_variables(phi.right)
    if isinstance(phi, (ForAll, Exists)):
        return free_variables(phi.body) - {phi.var}
    raise TypeError(f"Unknown formula node {type(phi).__name__}.")


def is_sentence(phi: FolFormula) -> bool:
    return not free_variables(phi)
