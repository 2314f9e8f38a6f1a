"""
Grounding of first-order sentences over I_n into propositional terms.

A sentence becomes a BoolTerm over p-letters (function graphs) and q-letters
(relations). Quantifiers unfold into finite conjunctions and disjunctions.
A nested term s equal to an element b is coded by (s = b)*, the conjunction
over all argument values of "arguments take these values => head letter".
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Mapping, Sequence, Tuple, Union

from src.boolcore.terms import (
    FALSE,
    TRUE,
    Assignment,
    BoolTerm,
    Letter,
    Not,
    Var,
    conj,
    disj,
)
from src.common.errors import FreeVariableError, TranslationError
from src.fol.letters import all_letters, function_letter, letter_in_range, relation_letter
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
    Signature,
    TermVar,
    Truth,
    free_variables,
)

logger = logging.getLogger(__name__)

Env = Mapping[str, int]


def _implies(condition: BoolTerm, head: BoolTerm) -> BoolTerm:
    if condition == TRUE:
        return head
    return disj([Not(condition), head])


class _Translator:
    def __init__(self, n: int, signature: Signature):
        if n < 1:
            raise TranslationError("Domains I_n need n >= 1.")
        self.n = n
        self.signature = signature

    # -- terms --------------------------------------------------------------

    def _simple_value(self, t: FolTerm, env: Env):
        """Element denoted by a name or bound variable, None for function terms."""
        if isinstance(t, Element):
            if not 0 <= t.value < self.n:
                raise TranslationError(f"Element name {t.value} outside I_{self.n}.")
            return t.value
        if isinstance(t, TermVar):
            if t.name not in env:
                raise FreeVariableError(t.name)
            return env[t.name]
        if isinstance(t, FuncApp):
            return None
        raise TypeError(f"Unknown term node {type(t).__name__}.")

    def _candidates(self, t: FolTerm, env: Env) -> List[Tuple[int, BoolTerm]]:
        """Pairs (b, (t = b)*); a simple term has a single unconditional pair."""
        value = self._simple_value(t, env)
        if value is not None:
            return [(value, TRUE)]
        return [(b, self.equals(t, b, env)) for b in range(self.n)]

    def equals(self, t: FolTerm, b: int, env: Env) -> BoolTerm:
        """(t = b)* for an element b."""
        value = self._simple_value(t, env)
        if value is not None:
            return TRUE if value == b else FALSE
        if not self.signature.is_function(t.symbol):
            raise TranslationError(f"'{t.symbol}' is not a function symbol.")
        self.signature.check_arity(t.symbol, len(t.args))
        options = [self._candidates(arg, env) for arg in t.args]
        clauses = []
        for combo in product(*options):
            args = tuple(value for value, _ in combo)
            condition = conj([cond for _, cond in combo if cond != TRUE])
            head = Var(function_letter(t.symbol, args, b))
            clauses.append(_implies(condition, head))
        return conj(clauses)

    # -- formulas -----------------------------------------------------------

    def formula(self, phi: FolFormula, env: Env) -> BoolTerm:
        if isinstance(phi, Truth):
            return TRUE if phi.value else FALSE
        if isinstance(phi, Eq):
            return self._equation(phi.left, phi.right, env)
        if isinstance(phi, Rel):
            return self._relation(phi, env)
        if isinstance(phi, FNot):
            return Not(self.formula(phi.body, env))
        if isinstance(phi, FAnd):
            return conj([self.formula(part, env) for part in phi.parts])
        if isinstance(phi, FOr):
            return disj([self.formula(part, env) for part in phi.parts])
        if isinstance(phi, FImplies):
            left = self.formula(phi.left, env)
            return disj([Not(left), self.formula(phi.right, env)])
        if isinstance(phi, (FIff, FXor)):
            left = self.formula(phi.left, env)
            right = self.formula(phi.right, env)
            if isinstance(phi, FIff):
                return conj([disj([Not(left), right]), disj([Not(right), left])])
            return conj([disj([left, right]), disj([Not(left), Not(right)])])
        if isinstance(phi, (ForAll, Exists)):
            parts = [self.formula(phi.body, {**env, phi.var: a}) for a in range(self.n)]
            return conj(parts) if isinstance(phi, ForAll) else disj(parts)
        raise TypeError(f"Unknown formula node {type(phi).__name__}.")

    def _equation(self, left: FolTerm, right: FolTerm, env: Env) -> BoolTerm:
        right_value = self._simple_value(right, env)
        if right_value is not None:
            return self.equals(left, right_value, env)
        left_value = self._simple_value(left, env)
        if left_value is not None:
            return self.equals(right, left_value, env)
        # F(...) = G(...): both sides take the same value.
        return conj(
            [
                _implies(self.equals(left, b, env), self.equals(right, b, env))
                for b in range(self.n)
            ]
        )

    def _relation(self, phi: Rel, env: Env) -> BoolTerm:
        if not self.signature.is_relation(phi.symbol):
            raise TranslationError(f"'{phi.symbol}' is not a relation symbol.")
        self.signature.check_arity(phi.symbol, len(phi.args))
        options = [self._candidates(arg, env) for arg in phi.args]
        clauses = []
        for combo in product(*options):
            args = tuple(value for value, _ in combo)
            condition = conj([cond for _, cond in combo if cond != TRUE])
            clauses.append(_implies(condition, Var(relation_letter(phi.symbol, args))))
        return conj(clauses)


def translate_sentence(phi: FolFormula, n: int, sig: Signature) -> BoolTerm:
    unbound = free_variables(phi)
    if unbound:
        raise FreeVariableError(min(unbound))
    return _Translator(n, sig).formula(phi, {})


def functionality_axioms(sig: Signature, n: int) -> List[BoolTerm]:
    axioms = []
    for symbol, arity in sig.functions:
        for args in product(range(n), repeat=arity):
            letters = [Var(function_letter(symbol, args, b)) for b in range(n)]
            at_most_one = [
                Not(conj([letters[b], letters[c]]))
                for b in range(n)
                for c in range(b + 1, n)
            ]
            axioms.append(conj([disj(letters)] + at_most_one))
    return axioms


@dataclass
class PropTheory:
    """T* over I_n: named ground sentences, assumptions and the letter order."""

    n: int
    signature: Signature
    sentences: List[Tuple[str, BoolTerm]] = field(default_factory=list)
    assumptions: Assignment = field(default_factory=dict)
    letters: Tuple[Letter, ...] = ()

    def __post_init__(self):
        if not self.letters:
            self.letters = all_letters(self.signature, self.n)
        self.letters = tuple(self.letters)
        stray = [
            name
            for name in self.letters + tuple(self.assumptions)
            if not letter_in_range(name, self.signature, self.n)
        ]
        if stray:
            raise TranslationError(f"Letter '{min(stray)}' is outside the theory's letters.")
        known = set(self.letters)
        missing = [name for name in self.assumptions if name not in known]
        if missing:
            raise TranslationError(f"Assumed letter '{min(missing)}' is not in the letter order.")

    @property
    def theta(self) -> BoolTerm:
        return conj([term for _, term in self.sentences])


NamedSentences = Union[Sequence[FolFormula], Sequence[Tuple[str, FolFormula]]]


def ground_theory(
    T: NamedSentences,
    n: int,
    sig: Signature,
    assumptions: Dict[Letter, int] = None,
) -> PropTheory:
    sentences = []
    for position, item in enumerate(T):
        if isinstance(item, tuple):
            name, phi = item
        else:
            name, phi = f"axiom{position + 1}", item
        sentences.append((name, translate_sentence(phi, n, sig)))
    functional = [
        (f"functional:{symbol}", axiom)
        for (symbol, arity) in sig.functions
        for axiom in functionality_axioms(Signature(functions={symbol: arity}), n)
    ]
    theory = PropTheory(
        n=n,
        signature=sig,
        sentences=sentences + functional,
        assumptions=dict(assumptions or {}),
    )
    logger.info(
        "Grounder: %d sentences (%d functionality axioms) over %d letters at n=%d.",
        len(theory.sentences),
        len(functional),
        len(theory.letters),
        n,
    )
    return theory
