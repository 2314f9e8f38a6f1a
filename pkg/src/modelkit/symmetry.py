"""
Isomorphisms, automorphisms and canonical forms of labeled models.

All searches are exhaustive over permutations of I_n and are refused above
MAX_SEARCH_N. The isomorphism search assigns pi(0), pi(1), ... in turn,
prunes candidates by per-element degree profiles and checks every relation
and function entry as soon as all of its elements are assigned.
"""

import logging
import math
from itertools import permutations, product
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from src.common.errors import SearchGuardError
from src.modelkit.models import (
    LabeledModel,
    Permutation,
    model_letters,
    relabel,
)

logger = logging.getLogger(__name__)

MAX_SEARCH_N = 10


def _guard(n: int):
    if n > MAX_SEARCH_N:
        raise SearchGuardError(
            f"Permutation search over I_{n} refused; the guard allows n <= {MAX_SEARCH_N}."
        )


def _profiles(A: LabeledModel) -> List[Tuple]:
    """Per-element invariants preserved by every isomorphism."""
    n = A.n
    profiles = []
    for e in range(n):
        parts = []
        for name, arity in A.signature.relations:
            rows = A.relations[name]
            parts.append(tuple(sum(1 for row in rows if row[p] == e) for p in range(arity)))
            parts.append(((e,) * arity) in rows)
        for name, arity in A.signature.functions:
            table = A.functions[name]
            parts.append(sum(1 for value in table.values() if value == e))
            parts.append(table[(e,) * arity] == e)
        profiles.append(tuple(parts))
    return profiles


def _isomorphisms(A: LabeledModel, B: LabeledModel) -> Iterator[Permutation]:
    """Every pi with relabel(A, pi) == B, in lexicographic order."""
    n = A.n
    profile_a, profile_b = _profiles(A), _profiles(B)
    candidates = [[a for a in range(n) if profile_a[a] == profile_b[i]] for i in range(n)]
    if any(not options for options in candidates):
        return
    relations = [(name, arity) for name, arity in A.signature.relations if arity > 0]
    functions = list(A.signature.functions)
    pi: List[Optional[int]] = [None] * n
    used = set()

    def consistent(i: int) -> bool:
        for name, arity in relations:
            rows_a, rows_b = A.relations[name], B.relations[name]
            for t in product(range(i + 1), repeat=arity):
                if i not in t:
                    continue
                if (t in rows_b) != (tuple(pi[x] for x in t) in rows_a):
                    return False
        for name, arity in functions:
            table_a, table_b = A.functions[name], B.functions[name]
            for t in product(range(i + 1), repeat=arity):
                value_b = table_b[t]
                if i not in t and value_b != i:
                    continue
                value_a = table_a[tuple(pi[x] for x in t)]
                if value_b <= i:
                    if pi[value_b] != value_a:
                        return False
                elif value_a in used:
                    return False
        return True

    def extend(i: int) -> Iterator[Permutation]:
        if i == n:
            yield tuple(pi)
            return
        for a in candidates[i]:
            if a in used:
                continue
            pi[i] = a
            used.add(a)
            if consistent(i):
                yield from extend(i + 1)
            used.discard(a)
            pi[i] = None

    yield from extend(0)


def automorphisms(A: LabeledModel) -> List[Permutation]:
    _guard(A.n)
    return list(_isomorphisms(A, A))


def is_isomorphic(A: LabeledModel, B: LabeledModel) -> Optional[Permutation]:
    """Some pi with relabel(A, pi) == B, or None."""
    if A.n != B.n or A.signature != B.signature:
        return None
    _guard(A.n)
    return next(_isomorphisms(A, B), None)


def _relabeled_index(A: LabeledModel, letters, pi: Sequence[int]) -> int:
    """encode_valuation(relabel(A, pi)).index without building the model."""
    index = 0
    for name in letters:
        if name.family in A.functions:
            args = tuple(pi[a] for a in name.index[:-1])
            bit = A.functions[name.family][args] == pi[name.index[-1]]
        else:
            bit = tuple(pi[a] for a in name.index) in A.relations[name.family]
        index = (index << 1) | int(bit)
    return index


def _best_relabeling(A: LabeledModel) -> Tuple[int, Permutation]:
    _guard(A.n)
    letters = model_letters(A)
    return min((_relabeled_index(A, letters, pi), pi) for pi in permutations(range(A.n)))


def canonical_key(A: LabeledModel) -> int:
    """Minimal encoded index over all relabelings; equal exactly on isomorphic models."""
    return _best_relabeling(A)[0]


def canonical_form(A: LabeledModel) -> LabeledModel:
    return relabel(A, _best_relabeling(A)[1])


def is_absolutely_invariant(A: LabeledModel, X: Iterable[int]) -> bool:
    X = set(X)
    if any(not 0 <= x < A.n for x in X):
        raise ValueError(f"Subset {sorted(X)} is not contained in I_{A.n}.")
    return all({f[x] for x in X} <= X for f in automorphisms(A))


def burnside_labeled_count(unlabeled: Iterable[LabeledModel]) -> int:
    """Sum of n!/|Aut(A)| over pairwise non-isomorphic models."""
    return sum(math.factorial(A.n) // len(automorphisms(A)) for A in unlabeled)


def isomorphism_classes(models: Iterable[LabeledModel]) -> Dict[int, LabeledModel]:
    """First representative of each class, keyed by canonical_key."""
    classes: Dict[int, LabeledModel] = {}
    for A in models:
        classes.setdefault(canonical_key(A), A)
    return classes
