"""
Labeled models over I_n and the correspondence h between valuations of the
ground letters and labeled models.
"""

import logging
from dataclasses import dataclass
from itertools import product
from typing import Dict, FrozenSet, Iterable, Mapping, Sequence, Tuple

from src.boolcore.terms import Letter, Valuation
from src.common.errors import FunctionalityError
from src.fol.letters import all_letters
from src.fol.syntax import Signature

logger = logging.getLogger(__name__)

Permutation = Tuple[int, ...]
FunctionTable = Mapping[Tuple[int, ...], int]


def identity(n: int) -> Permutation:
    return tuple(range(n))


def check_permutation(pi: Sequence[int], n: int) -> Permutation:
    pi = tuple(pi)
    if sorted(pi) != list(range(n)):
        raise ValueError(f"{pi} is not a permutation of I_{n}.")
    return pi


def inverse(pi: Permutation) -> Permutation:
    result = [0] * len(pi)
    for i, image in enumerate(pi):
        result[image] = i
    return tuple(result)


def compose(pi: Permutation, rho: Permutation) -> Permutation:
    """(pi o rho)(i) = pi(rho(i))."""
    return tuple(pi[rho[i]] for i in range(len(rho)))


@dataclass(frozen=True, eq=False)
class LabeledModel:
    """
    A finite structure with domain I_n. Function tables are total maps from
    argument tuples to elements; constants are 0-ary functions keyed by ().
    """

    n: int
    signature: Signature
    functions: Mapping[str, FunctionTable]
    relations: Mapping[str, FrozenSet[Tuple[int, ...]]]

    def __post_init__(self):
        functions = {name: dict(table) for name, table in self.functions.items()}
        relations = {name: frozenset(map(tuple, rows)) for name, rows in self.relations.items()}
        for name in self.signature.relation_arities:
            relations.setdefault(name, frozenset())
        object.__setattr__(self, "functions", functions)
        object.__setattr__(self, "relations", relations)
        self._validate()

    def _validate(self):
        n = self.n
        if n < 1:
            raise ValueError("Labeled models need n >= 1.")
        if set(self.functions) != set(self.signature.function_arities):
            raise ValueError("Function tables do not match the signature.")
        if set(self.relations) != set(self.signature.relation_arities):
            raise ValueError("Relations do not match the signature.")
        for name, arity in self.signature.functions:
            table = self.functions[name]
            if set(table) != set(product(range(n), repeat=arity)):
                raise ValueError(f"Table of '{name}' is not total over I_{n}^{arity}.")
            if any(not 0 <= value < n for value in table.values()):
                raise ValueError(f"Table of '{name}' has values outside I_{n}.")
        for name, arity in self.signature.relations:
            for row in self.relations[name]:
                if len(row) != arity or any(not 0 <= a < n for a in row):
                    raise ValueError(f"Tuple {row} does not belong to '{name}' over I_{n}.")

    @property
    def key(self):
        return (
            self.n,
            self.signature,
            tuple((name, tuple(sorted(t.items()))) for name, t in sorted(self.functions.items())),
            tuple((name, tuple(sorted(rows))) for name, rows in sorted(self.relations.items())),
        )

    def __eq__(self, other):
        if not isinstance(other, LabeledModel):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def apply(self, symbol: str, *args: int) -> int:
        return self.functions[symbol][tuple(args)]

    def constant(self, symbol: str) -> int:
        return self.functions[symbol][()]

    def holds(self, symbol: str, *args: int) -> bool:
        return tuple(args) in self.relations[symbol]

    def __repr__(self):
        return f"LabeledModel(n={self.n}, {format_model(self)!r})"


def relational_model(n: int, **relations: Iterable[Tuple[int, ...]]) -> LabeledModel:
    """Convenience constructor for relation-only models; arities are read from the tuples."""
    arities = {}
    for name, rows in relations.items():
        rows = list(rows)
        relations[name] = rows
        arities[name] = len(rows[0]) if rows else 2
    return LabeledModel(n, Signature(relations=arities), {}, relations)


def decode_model(mu: Mapping[Letter, int], theory) -> LabeledModel:
    """The model h(mu): relations from q-letters, function tables from p-letters."""
    signature, n = theory.signature, theory.n
    values: Dict[str, Dict[Tuple[int, ...], list]] = {
        name: {args: [] for args in product(range(n), repeat=arity)}
        for name, arity in signature.functions
    }
    relations: Dict[str, set] = {name: set() for name in signature.relation_arities}
    for name in theory.letters:
        if not mu[name]:
            continue
        if name.family in values:
            values[name.family][name.index[:-1]].append(name.index[-1])
        else:
            relations[name.family].add(name.index)

    functions = {}
    for symbol, table in values.items():
        functions[symbol] = {}
        for args, found in table.items():
            if len(found) != 1:
                raise FunctionalityError(symbol, args, tuple(found))
            functions[symbol][args] = found[0]
    return LabeledModel(n, signature, functions, relations)


def model_letters(A: LabeledModel) -> Tuple[Letter, ...]:
    return all_letters(A.signature, A.n)


def encode_valuation(A: LabeledModel, letters: Sequence[Letter] = None) -> Valuation:
    """mu_A over the given letter order (by default every letter of A's signature)."""
    order = tuple(letters) if letters is not None else model_letters(A)
    index = 0
    for name in order:
        if name.family in A.functions:
            bit = A.functions[name.family][name.index[:-1]] == name.index[-1]
        else:
            bit = name.index in A.relations[name.family]
        index = (index << 1) | int(bit)
    return Valuation(order, index)


def relabel(A: LabeledModel, pi: Sequence[int]) -> LabeledModel:
    """
    A_pi: R holds at i-bar iff R^A holds at pi(i-bar); F^{A_pi}(i-bar) is
    pi^-1(F^A(pi(i-bar))); a constant c becomes pi^-1(c^A).
    """
    pi = check_permutation(pi, A.n)
    back = inverse(pi)
    relations = {
        name: {tuple(back[a] for a in row) for row in rows}
        for name, rows in A.relations.items()
    }
    functions = {
        name: {tuple(back[a] for a in args): back[value] for args, value in table.items()}
        for name, table in A.functions.items()
    }
    return LabeledModel(A.n, A.signature, functions, relations)


def format_model(A: LabeledModel) -> str:
    """Row-major text: binary symbols as n x n matrices, others as listings."""
    lines = [f"n = {A.n}"]
    n = A.n
    for name, arity in A.signature.functions:
        table = A.functions[name]
        if arity == 0:
            lines.append(f"{name} = {table[()]}")
        elif arity == 1:
            lines.append(f"{name}: " + " ".join(str(table[(i,)]) for i in range(n)))
        elif arity == 2:
            lines.append(f"{name}:")
            for i in range(n):
                lines.append("  " + " ".join(str(table[(i, j)]) for j in range(n)))
        else:
            lines.append(f"{name}:")
            for args in sorted(table):
                lines.append(f"  {args} -> {table[args]}")
    for name, arity in A.signature.relations:
        rows = A.relations[name]
        if arity == 1:
            lines.append(f"{name}: " + " ".join("1" if (i,) in rows else "0" for i in range(n)))
        elif arity == 2:
            lines.append(f"{name}:")
            for i in range(n):
                lines.append("  " + " ".join("1" if (i, j) in rows else "0" for j in range(n)))
        else:
            lines.append(f"{name}: " + " ".join(str(row) for row in sorted(rows)))
    return "\n".join(lines)
