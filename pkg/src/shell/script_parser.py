"""
Parser for the script DSL.

A script is line oriented: integer parameters, finite domains, named
formulas with a prenex prefix of bounded quantifiers, and assumption
dictionaries that kill letters. Example:

    n = 6
    S = range(n)
    S2 = perm(range(n), 2)
    f1 = A[i,j:S2] (~p(i,j) | ~p(j,i))
    f3 = E[i:S].A[j:S] (p(i,j) | p(j,i))
    assumptions = {p(i,i): 1 for i in S}

The statement head is split off per line; bodies are parsed with pyparsing.
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Tuple, Union

import pyparsing as pp

from src.common.errors import ScriptError, ScriptSyntaxError

logger = logging.getLogger(__name__)

pp.ParserElement.enable_packrat()

# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "IntExpr"
    right: "IntExpr"


@dataclass(frozen=True)
class Neg:
    operand: "IntExpr"


IntExpr = Union[Num, Name, BinOp, Neg]


@dataclass(frozen=True)
class RangeDomain:
    size: IntExpr


@dataclass(frozen=True)
class PermDomain:
    base: "DomainExpr"
    r: int


@dataclass(frozen=True)
class SetDomain:
    values: Tuple[int, ...]


@dataclass(frozen=True)
class DomainRef:
    name: str


DomainExpr = Union[RangeDomain, PermDomain, SetDomain, DomainRef]


@dataclass(frozen=True)
class LetterRef:
    family: str
    args: Tuple[IntExpr, ...] = ()


@dataclass(frozen=True)
class SNot:
    body: "Template"


@dataclass(frozen=True)
class SAnd:
    parts: Tuple["Template", ...]


@dataclass(frozen=True)
class SOr:
    parts: Tuple["Template", ...]


@dataclass(frozen=True)
class SXor:
    left: "Template"
    right: "Template"


@dataclass(frozen=True)
class SImplies:
    left: "Template"
    right: "Template"


@dataclass(frozen=True)
class SIff:
    left: "Template"
    right: "Template"


Template = Union[LetterRef, SNot, SAnd, SOr, SXor, SImplies, SIff]


@dataclass(frozen=True)
class Quantifier:
    kind: str  # "A" or "E"
    names: Tuple[str, ...]
    domain: str


@dataclass(frozen=True)
class ParamDef:
    name: str
    expr: IntExpr
    line: int


@dataclass(frozen=True)
class DomainDef:
    name: str
    domain: DomainExpr
    line: int


@dataclass(frozen=True)
class FormulaDef:
    name: str
    quantifiers: Tuple[Quantifier, ...]
    body: Template
    line: int


@dataclass(frozen=True)
class AssumeEntries:
    entries: Tuple[Tuple[LetterRef, int], ...]


@dataclass(frozen=True)
class AssumeComprehension:
    letter: LetterRef
    bit: int
    names: Tuple[str, ...]
    domain: str


@dataclass(frozen=True)
class AssumptionsDef:
    mode: str  # "set" replaces, "update" merges
    body: Union[AssumeEntries, AssumeComprehension]
    line: int


Statement = Union[ParamDef, DomainDef, FormulaDef, AssumptionsDef]


@dataclass
class Script:
    statements: List[Statement] = field(default_factory=list)

    @property
    def params(self) -> Dict[str, ParamDef]:
        return {s.name: s for s in self.statements if isinstance(s, ParamDef)}

    @property
    def domains(self) -> Dict[str, DomainDef]:
        return {s.name: s for s in self.statements if isinstance(s, DomainDef)}

    @property
    def formulas(self) -> List[FormulaDef]:
        return [s for s in self.statements if isinstance(s, FormulaDef)]

    @property
    def assumptions(self) -> List[AssumptionsDef]:
        return [s for s in self.statements if isinstance(s, AssumptionsDef)]


# --- grammar ---------------------------------------------------------------


def fold_left(tokens, build):
    items = tokens[0]
    acc = items[0]
    for i in range(1, len(items), 2):
        acc = build(items[i], acc, items[i + 1])
    return acc


def fold_right(tokens, build):
    items = tokens[0]
    acc = items[-1]
    for i in range(len(items) - 2, 0, -2):
        acc = build(items[i], items[i - 1], acc)
    return acc


def fold_unary(tokens, build):
    items = tokens[0]
    acc = items[-1]
    for _ in range(len(items) - 1):
        acc = build(acc)
    return acc


def flat(tokens, node_type):
    return node_type(tuple(tokens[0][0::2]))


LPAR, RPAR, LBRACK, RBRACK, LBRACE, RBRACE, COMMA, COLON = map(pp.Suppress, "()[]{},:")

IDENT = pp.Word(pp.alphas + "_", pp.alphanums + "_")
NATURAL = pp.Word(pp.nums).set_parse_action(lambda t: int(t[0]))
BIT = pp.one_of("0 1").set_parse_action(lambda t: int(t[0]))

INT_EXPR = pp.infix_notation(
    NATURAL.copy().add_parse_action(lambda t: Num(t[0])) | IDENT.copy().set_parse_action(lambda t: Name(t[0])),
    [
        (pp.Literal("-"), 1, pp.OpAssoc.RIGHT, lambda t: fold_unary(t, Neg)),
        (pp.one_of("* %"), 2, pp.OpAssoc.LEFT, lambda t: fold_left(t, lambda op, a, b: BinOp(op, a, b))),
        (pp.one_of("+ -"), 2, pp.OpAssoc.LEFT, lambda t: fold_left(t, lambda op, a, b: BinOp(op, a, b))),
    ],
)

DOM_EXPR = pp.Forward()
RANGE_DOM = (pp.Keyword("range").suppress() + LPAR + INT_EXPR + RPAR).set_parse_action(
    lambda t: RangeDomain(t[0])
)
SET_DOM = (LBRACE + pp.DelimitedList(NATURAL) + RBRACE).set_parse_action(
    lambda t: SetDomain(tuple(t))
)
DOM_REF = IDENT.copy().set_parse_action(lambda t: DomainRef(t[0]))
PERM_DOM = (
    pp.Keyword("perm").suppress() + LPAR + (DOM_EXPR | DOM_REF) + COMMA + NATURAL + RPAR
).set_parse_action(lambda t: PermDomain(t[0], t[1]))
DOM_EXPR <<= RANGE_DOM | PERM_DOM | SET_DOM

LETTER_REF = (IDENT + pp.Opt(LPAR + pp.DelimitedList(INT_EXPR) + RPAR)).set_parse_action(
    lambda t: LetterRef(t[0], tuple(t[1:]))
)

BOOL_EXPR = pp.infix_notation(
    LETTER_REF,
    [
        (pp.Literal("~"), 1, pp.OpAssoc.RIGHT, lambda t: fold_unary(t, SNot)),
        (pp.Literal("&"), 2, pp.OpAssoc.LEFT, lambda t: flat(t, SAnd)),
        (pp.Literal("^"), 2, pp.OpAssoc.LEFT, lambda t: fold_left(t, lambda op, a, b: SXor(a, b))),
        (pp.Literal("|"), 2, pp.OpAssoc.LEFT, lambda t: flat(t, SOr)),
        (pp.Literal("->"), 2, pp.OpAssoc.RIGHT, lambda t: fold_right(t, lambda op, a, b: SImplies(a, b))),
        (pp.Literal("<->"), 2, pp.OpAssoc.LEFT, lambda t: fold_left(t, lambda op, a, b: SIff(a, b))),
    ],
)

QUANTIFIER = (
    pp.one_of("A E")
    + LBRACK
    + pp.Group(pp.DelimitedList(IDENT))
    + COLON
    + IDENT
    + RBRACK
    + pp.Opt(pp.Suppress("."))
).set_parse_action(lambda t: Quantifier(t[0], tuple(t[1]), t[2]))

FORMULA_PREFIX = pp.Group(pp.ZeroOrMore(QUANTIFIER))
FORMULA = FORMULA_PREFIX + BOOL_EXPR

ASSUME_ENTRY = pp.Group(LETTER_REF + COLON + BIT)
ASSUME_DICT = (LBRACE + pp.Opt(pp.DelimitedList(ASSUME_ENTRY)) + RBRACE).set_parse_action(
    lambda t: AssumeEntries(tuple((entry[0], entry[1]) for entry in t))
)
ASSUME_COMP = (
    LBRACE
    + LETTER_REF
    + COLON
    + BIT
    + pp.Keyword("for").suppress()
    + pp.Group(pp.DelimitedList(IDENT))
    + pp.Keyword("in").suppress()
    + IDENT
    + RBRACE
).set_parse_action(lambda t: AssumeComprehension(t[0], t[1], tuple(t[2]), t[3]))
ASSUME_BODY = ASSUME_COMP | ASSUME_DICT

_ASSIGN = re.compile(r"^(\s*)([A-Za-z_]\w*)(\s*=\s*)(.*?)\s*$")
_UPDATE = re.compile(r"^(\s*assumptions\s*\.\s*update\s*\()(.*)\)\s*$")
_QUANTIFIER_START = re.compile(r"(?<![\w)])[AE]\s*\[")

RESERVED = {"assumptions", "range", "perm", "for", "in", "A", "E"}


def _parse_part(parser: pp.ParserElement, text: str, line: int, offset: int):
    try:
        return parser.parse_string(text, parse_all=True)
    except pp.ParseException as exc:
        raise ScriptSyntaxError(exc.msg, line, offset + exc.col) from None


def _parses(parser: pp.ParserElement, text: str) -> bool:
    try:
        parser.parse_string(text, parse_all=True)
    except pp.ParseException:
        return False
    return True


# --- semantic checks -------------------------------------------------------


class _Checker:
    """Definition-before-use, arity and scoping rules, applied statement by statement."""

    def __init__(self):
        self.params: Dict[str, int] = {}
        self.domain_arity: Dict[str, int] = {}
        self.formulas = set()
        self.families: Dict[str, int] = {}

    def int_names(self, expr: IntExpr, allowed, line: int):
        if isinstance(expr, Name):
            if expr.name not in allowed:
                raise ScriptError(f"unknown identifier '{expr.name}'", line)
        elif isinstance(expr, BinOp):
            self.int_names(expr.left, allowed, line)
            self.int_names(expr.right, allowed, line)
        elif isinstance(expr, Neg):
            self.int_names(expr.operand, allowed, line)

    def arity_of(self, domain: DomainExpr, line: int) -> int:
        if isinstance(domain, RangeDomain):
            self.int_names(domain.size, self.params, line)
            return 1
        if isinstance(domain, SetDomain):
            return 1
        if isinstance(domain, DomainRef):
            if domain.name not in self.domain_arity:
                raise ScriptError(f"unknown domain '{domain.name}'", line)
            return self.domain_arity[domain.name]
        base = self.arity_of(domain.base, line)
        if base != 1:
            raise ScriptError("perm() needs a domain of single elements", line)
        if domain.r < 1:
            raise ScriptError("perm() needs a tuple length r >= 1", line)
        return domain.r

    def fresh(self, names, bound, line: int):
        for name in names:
            if name in self.params or name in self.domain_arity or name in bound:
                raise ScriptError(f"index variable '{name}' shadows an existing name", line)
        if len(set(names)) != len(names):
            raise ScriptError("index variables of one quantifier must be distinct", line)

    def bind(self, names, domain: str, bound, line: int):
        if domain not in self.domain_arity:
            raise ScriptError(f"unknown domain '{domain}'", line)
        self.fresh(names, bound, line)
        if len(names) != self.domain_arity[domain]:
            raise ScriptError(
                f"arity mismatch: {len(names)} index variables over domain '{domain}' "
                f"of {self.domain_arity[domain]}-tuples",
                line,
            )
        return set(bound) | set(names)

    def letter(self, ref: LetterRef, bound, line: int):
        arity = len(ref.args)
        known = self.families.setdefault(ref.family, arity)
        if known != arity:
            raise ScriptError(
                f"arity mismatch: letter family '{ref.family}' used with {arity} and {known} indices",
                line,
            )
        allowed = set(bound) | set(self.params)
        for arg in ref.args:
            self.int_names(arg, allowed, line)

    def template(self, node: Template, bound, line: int):
        if isinstance(node, LetterRef):
            self.letter(node, bound, line)
        elif isinstance(node, SNot):
            self.template(node.body, bound, line)
        elif isinstance(node, (SAnd, SOr)):
            for part in node.parts:
                self.template(part, bound, line)
        else:
            self.template(node.left, bound, line)
            self.template(node.right, bound, line)

    def define(self, name: str, line: int):
        if name in RESERVED:
            raise ScriptError(f"'{name}' is reserved", line)
        if name in self.params or name in self.domain_arity or name in self.formulas:
            raise ScriptError(f"'{name}' is defined twice", line)

    def statement(self, s: Statement):
        if isinstance(s, ParamDef):
            self.define(s.name, s.line)
            self.int_names(s.expr, self.params, s.line)
            self.params[s.name] = 1
        elif isinstance(s, DomainDef):
            self.define(s.name, s.line)
            self.domain_arity[s.name] = self.arity_of(s.domain, s.line)
        elif isinstance(s, FormulaDef):
            self.define(s.name, s.line)
            bound = set()
            for quantifier in s.quantifiers:
                bound = self.bind(quantifier.names, quantifier.domain, bound, s.line)
            self.template(s.body, bound, s.line)
            self.formulas.add(s.name)
        else:
            body = s.body
            if isinstance(body, AssumeComprehension):
                bound = self.bind(body.names, body.domain, set(), s.line)
                self.letter(body.letter, bound, s.line)
            else:
                for ref, _ in body.entries:
                    self.letter(ref, set(), s.line)


def _definition(name: str, rhs: str, line: int, offset: int, checker: _Checker) -> Statement:
    if _parses(DOM_EXPR, rhs):
        domain = DOM_EXPR.parse_string(rhs, parse_all=True)[0]
        return DomainDef(name, domain, line)
    if _parses(INT_EXPR, rhs):
        expr = INT_EXPR.parse_string(rhs, parse_all=True)[0]
        # a bare name is a parameter alias only when that parameter exists
        if not isinstance(expr, Name) or expr.name in checker.params:
            return ParamDef(name, expr, line)
    try:
        parsed = FORMULA.parse_string(rhs, parse_all=True)
    except pp.ParseException as exc:
        prefix = FORMULA_PREFIX.parse_string(rhs)
        consumed = len(prefix[0]) if prefix else 0
        matches = list(_QUANTIFIER_START.finditer(rhs))
        if len(matches) > consumed:
            raise ScriptError("non-prenex formula: quantifiers must all precede the body", line) from None
        raise ScriptSyntaxError(exc.msg, line, offset + exc.col) from None
    return FormulaDef(name, tuple(parsed[0]), parsed[1], line)


def parse_script(text: str) -> Script:
    script = Script()
    checker = _Checker()
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        update = _UPDATE.match(line)
        if update:
            body = _parse_part(ASSUME_BODY, update.group(2), number, len(update.group(1)))[0]
            statement = AssumptionsDef("update", body, number)
        else:
            assign = _ASSIGN.match(line)
            if not assign:
                raise ScriptSyntaxError("expected '<name> = ...' or 'assumptions.update(...)'", number, 1)
            lead, name, eq, rhs = assign.groups()
            offset = len(lead) + len(name) + len(eq)
            if not rhs:
                raise ScriptSyntaxError("missing right-hand side", number, offset + 1)
            if name == "assumptions":
                body = _parse_part(ASSUME_BODY, rhs, number, offset)[0]
                statement = AssumptionsDef("set", body, number)
            else:
                statement = _definition(name, rhs, number, offset, checker)
        checker.statement(statement)
        script.statements.append(statement)
    logger.debug(
        "Script Parser: %d parameters, %d domains, %d formulas, %d assumption blocks.",
        len(script.params),
        len(script.domains),
        len(script.formulas),
        len(script.assumptions),
    )
    return script
