"""Expansion of a parsed script into theta, its assumptions and its letter namespace."""

import logging
from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, List, Mapping, Set, Tuple

from src.boolcore.terms import (
    Assignment,
    BoolTerm,
    Iff,
    Implies,
    Letter,
    Not,
    Var,
    Xor,
    conj,
    disj,
    variables,
)
from src.common.errors import ExpansionError, ScriptError
from src.shell.script_parser import (
    AssumeComprehension,
    AssumptionsDef,
    BinOp,
    DomainDef,
    DomainExpr,
    DomainRef,
    FormulaDef,
    IntExpr,
    LetterRef,
    Name,
    Neg,
    Num,
    ParamDef,
    PermDomain,
    Quantifier,
    RangeDomain,
    SAnd,
    Script,
    SetDomain,
    SIff,
    SImplies,
    SNot,
    SOr,
    SXor,
    Template,
)

logger = logging.getLogger(__name__)

Tuples = List[Tuple[int, ...]]


@dataclass
class LetterNamespace:
    """Letter families with their arities and every letter the script mentions."""

    families: Dict[str, int] = field(default_factory=dict)
    letters: Tuple[Letter, ...] = ()

    def __post_init__(self):
        self.letters = tuple(sorted(set(self.letters)))
        for name in self.letters:
            arity = self.families.setdefault(name.family, len(name.index))
            if arity != len(name.index):
                raise ScriptError(f"arity mismatch: letter '{name}' in family of arity {arity}")
        self._members = frozenset(self.letters)

    def __contains__(self, name: Letter) -> bool:
        return name in self._members

    def __len__(self) -> int:
        return len(self.letters)


def evaluate_int(expr: IntExpr, env: Mapping[str, int], line: int = None) -> int:
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Name):
        if expr.name not in env:
            raise ScriptError(f"unknown identifier '{expr.name}'", line)
        return env[expr.name]
    if isinstance(expr, Neg):
        return -evaluate_int(expr.operand, env, line)
    left = evaluate_int(expr.left, env, line)
    right = evaluate_int(expr.right, env, line)
    if expr.op == "+":
        return left + right
    if expr.op == "-":
        return left - right
    if expr.op == "*":
        return left * right
    if right == 0:
        raise ExpansionError("modulo by zero", line)
    return left % right


class _Expander:
    def __init__(self, script: Script):
        self.script = script
        self.params: Dict[str, int] = {}
        self.domains: Dict[str, Tuples] = {}
        self.universe: Set[int] = set()

    def domain(self, expr: DomainExpr, line: int) -> Tuples:
        if isinstance(expr, RangeDomain):
            size = evaluate_int(expr.size, self.params, line)
            if size < 0:
                raise ExpansionError(f"range({size}) has a negative size", line)
            return [(i,) for i in range(size)]
        if isinstance(expr, SetDomain):
            return [(v,) for v in sorted(set(expr.values))]
        if isinstance(expr, DomainRef):
            return self.domains[expr.name]
        if isinstance(expr, PermDomain):
            base = [t[0] for t in self.domain(expr.base, line)]
            return list(permutations(base, expr.r))
        raise TypeError(f"Unknown domain node {type(expr).__name__}.")

    def letter(self, ref: LetterRef, env: Mapping[str, int], line: int) -> Letter:
        index = tuple(evaluate_int(arg, env, line) for arg in ref.args)
        if self.domains:
            outside = [i for i in index if i not in self.universe]
            if outside:
                raise ExpansionError(
                    f"index {outside[0]} of {ref.family}{index} lies outside every declared domain",
                    line,
                )
        return Letter(ref.family, index)

    def template(self, node: Template, env: Mapping[str, int], line: int) -> BoolTerm:
        if isinstance(node, LetterRef):
            return Var(self.letter(node, env, line))
        if isinstance(node, SNot):
            return Not(self.template(node.body, env, line))
        if isinstance(node, SAnd):
            return conj([self.template(part, env, line) for part in node.parts])
        if isinstance(node, SOr):
            return disj([self.template(part, env, line) for part in node.parts])
        build = {SXor: Xor, SImplies: Implies, SIff: Iff}[type(node)]
        return build(self.template(node.left, env, line), self.template(node.right, env, line))

    def quantified(
        self, quantifiers: Tuple[Quantifier, ...], body: Template, env: Dict[str, int], line: int
    ) -> BoolTerm:
        if not quantifiers:
            return self.template(body, env, line)
        head, rest = quantifiers[0], quantifiers[1:]
        parts = []
        for element in self.domains[head.domain]:
            inner = {**env, **dict(zip(head.names, element))}
            parts.append(self.quantified(rest, body, inner, line))
        return conj(parts) if head.kind == "A" else disj(parts)

    def assumptions(self, statement: AssumptionsDef) -> Assignment:
        body = statement.body
        if isinstance(body, AssumeComprehension):
            fixed = {}
            for element in self.domains[body.domain]:
                env = {**self.params, **dict(zip(body.names, element))}
                fixed[self.letter(body.letter, env, statement.line)] = body.bit
            return fixed
        return {
            self.letter(ref, self.params, statement.line): bit for ref, bit in body.entries
        }

    def run(self) -> Tuple[BoolTerm, Assignment, LetterNamespace]:
        formulas: List[BoolTerm] = []
        assumptions: Assignment = {}
        for statement in self.script.statements:
            if isinstance(statement, ParamDef):
                self.params[statement.name] = evaluate_int(statement.expr, self.params, statement.line)
            elif isinstance(statement, DomainDef):
                elements = self.domain(statement.domain, statement.line)
                self.domains[statement.name] = elements
                self.universe.update(i for element in elements for i in element)
            elif isinstance(statement, FormulaDef):
                term = self.quantified(
                    statement.quantifiers, statement.body, dict(self.params), statement.line
                )
                formulas.append(term)
                logger.debug("Expander: %s grounded over %d letters.", statement.name, len(variables(term)))
            else:
                fixed = self.assumptions(statement)
                if statement.mode == "set":
                    assumptions = dict(fixed)
                else:
                    assumptions.update(fixed)
        theta = conj(formulas)
        namespace = LetterNamespace(letters=tuple(variables(theta)) + tuple(assumptions))
        return theta, assumptions, namespace


def expand_script(s: Script) -> Tuple[BoolTerm, Assignment, LetterNamespace]:
    theta, assumptions, namespace = _Expander(s).run()
    logger.info(
        "Expander: %d formulas, %d letters, %d assumptions.",
        len(s.formulas),
        len(namespace),
        len(assumptions),
    )
    return theta, assumptions, namespace
