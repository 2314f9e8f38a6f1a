"""Direct first-order satisfaction in a labeled model."""

from typing import Mapping

from src.common.errors import FreeVariableError, TranslationError
from src.fol.syntax import (
    Element,
    Eq,
    Exists,
    FAnd,
    FIff,
    FImplies,
    FNot,
    FolFormula,
    FolTerm,
    FOr,
    ForAll,
    FuncApp,
    FXor,
    Rel,
    TermVar,
    Truth,
)
from src.modelkit.models import LabeledModel


def evaluate_term(A: LabeledModel, t: FolTerm, env: Mapping[str, int]) -> int:
    if isinstance(t, Element):
        if not 0 <= t.value < A.n:
            raise TranslationError(f"Element name {t.value} outside I_{A.n}.")
        return t.value
    if isinstance(t, TermVar):
        if t.name not in env:
            raise FreeVariableError(t.name)
        return env[t.name]
    if isinstance(t, FuncApp):
        A.signature.check_arity(t.symbol, len(t.args))
        args = tuple(evaluate_term(A, arg, env) for arg in t.args)
        return A.functions[t.symbol][args]
    raise TypeError(f"Unknown term node {type(t).__name__}.")


def satisfies(A: LabeledModel, phi: FolFormula, env: Mapping[str, int] = None) -> bool:
    """A |= phi[env], quantifiers ranging over I_n."""
    env = dict(env or {})
    if isinstance(phi, Truth):
        return phi.value
    if isinstance(phi, Eq):
        return evaluate_term(A, phi.left, env) == evaluate_term(A, phi.right, env)
    if isinstance(phi, Rel):
        A.signature.check_arity(phi.symbol, len(phi.args))
        return tuple(evaluate_term(A, arg, env) for arg in phi.args) in A.relations[phi.symbol]
    if isinstance(phi, FNot):
        return not satisfies(A, phi.body, env)
    if isinstance(phi, FAnd):
        return all(satisfies(A, part, env) for part in phi.parts)
    if isinstance(phi, FOr):
        return any(satisfies(A, part, env) for part in phi.parts)
    if isinstance(phi, FImplies):
        return not satisfies(A, phi.left, env) or satisfies(A, phi.right, env)
    if isinstance(phi, FIff):
        return satisfies(A, phi.left, env) == satisfies(A, phi.right, env)
    if isinstance(phi, FXor):
        return satisfies(A, phi.left, env) != satisfies(A, phi.right, env)
    if isinstance(phi, ForAll):
        return all(satisfies(A, phi.body, {**env, phi.var: a}) for a in range(A.n))
    if isinstance(phi, Exists):
        return any(satisfies(A, phi.body, {**env, phi.var: a}) for a in range(A.n))
    raise TypeError(f"Unknown formula node {type(phi).__name__}.")
