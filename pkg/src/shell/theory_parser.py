"""
Parser for first-order theory files, the input of the `tba` subcommand.

    # bounded posets
    rel R 2
    n = 4
    axiom reflexive: A[x] R(x,x)
    axiom antisymmetric: A[x,y] (R(x,y) & R(y,x) -> x = y)
    axiom transitive: A[x,y,z] (R(x,y) & R(y,z) -> R(x,z))
    axiom least: E[x] A[y] R(x,y)
    axiom greatest: E[x] A[y] R(y,x)
    partition poset_layers
    assume poset_base

Custom partitions are written as a block:

    partition
      layer source(x): A[y] ~R(y,x) | y = x
      layer rest(x): E[y] (R(y,x) & y != x)
      orient 1 2 ~R(y,x)
    end

See docs/GRAMMAR.md for the full grammar.
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

import pyparsing as pp

from src.boolcore.terms import Assignment
from src.common.errors import ScriptError, ScriptSyntaxError, TBAError
from src.countlab.killing import (
    GoodPartitionSpec,
    Orientation,
    definable_constants_factor,
    whole_domain_spec,
)
from src.countlab.posets import poset_base_kills, poset_layer_spec
from src.fol.letters import function_letter, relation_letter
from src.fol.syntax import (
    Element,
    Eq,
    FAnd,
    FIff,
    FImplies,
    FNot,
    FolFormula,
    ForAll,
    FolTerm,
    FOr,
    FuncApp,
    FXor,
    Rel,
    Signature,
    TermVar,
    Truth,
    exists,
    forall,
)
from src.fol.translate import PropTheory, ground_theory
from src.shell.script_parser import flat, fold_left, fold_right, fold_unary

logger = logging.getLogger(__name__)

pp.ParserElement.enable_packrat()

RESERVED = {"A", "E", "true", "false"}

# --- formula grammar -------------------------------------------------------


@dataclass(frozen=True)
class _QuantHead:
    kind: str
    names: Tuple[str, ...]


def _quantified(tokens):
    items = tokens[0]
    body = items[-1]
    for head in reversed(items[:-1]):
        body = forall(head.names, body) if head.kind == "A" else exists(head.names, body)
    return body


def _equation(tokens):
    left, op, right = tokens
    return Eq(left, right) if op == "=" else FNot(Eq(left, right))


LPAR, RPAR, LBRACK, RBRACK = map(pp.Suppress, "()[]")

IDENT = pp.Word(pp.alphas + "_", pp.alphanums + "_").add_condition(lambda t: t[0] not in RESERVED)
NATURAL = pp.Word(pp.nums).set_parse_action(lambda t: int(t[0]))

TERM = pp.Forward()
TERM <<= (
    NATURAL.copy().add_parse_action(lambda t: Element(t[0]))
    | (IDENT + LPAR + pp.DelimitedList(TERM) + RPAR).set_parse_action(
        lambda t: FuncApp(t[0], tuple(t[1:]))
    )
    | IDENT.copy().set_parse_action(lambda t: TermVar(t[0]))
)

TRUTH = (pp.Keyword("true") | pp.Keyword("false")).set_parse_action(lambda t: Truth(t[0] == "true"))
EQUATION = (TERM + pp.one_of("= !=") + TERM).set_parse_action(_equation)
REL_ATOM = (IDENT + pp.Opt(LPAR + pp.DelimitedList(TERM) + RPAR)).set_parse_action(
    lambda t: Rel(t[0], tuple(t[1:]))
)
QUANT_HEAD = (
    pp.one_of("A E") + LBRACK + pp.Group(pp.DelimitedList(IDENT)) + RBRACK + pp.Opt(pp.Suppress("."))
).set_parse_action(lambda t: _QuantHead(t[0], tuple(t[1])))

FOL_FORMULA = pp.infix_notation(
    TRUTH | EQUATION | REL_ATOM,
    [
        (pp.Literal("~"), 1, pp.OpAssoc.RIGHT, lambda t: fold_unary(t, FNot)),
        (pp.Literal("&"), 2, pp.OpAssoc.LEFT, lambda t: flat(t, FAnd)),
        (pp.Literal("^"), 2, pp.OpAssoc.LEFT, lambda t: fold_left(t, lambda op, a, b: FXor(a, b))),
        (pp.Literal("|"), 2, pp.OpAssoc.LEFT, lambda t: flat(t, FOr)),
        (pp.Literal("->"), 2, pp.OpAssoc.RIGHT, lambda t: fold_right(t, lambda op, a, b: FImplies(a, b))),
        (pp.Literal("<->"), 2, pp.OpAssoc.LEFT, lambda t: fold_left(t, lambda op, a, b: FIff(a, b))),
        (QUANT_HEAD, 1, pp.OpAssoc.RIGHT, _quantified),
    ],
)

_REL = re.compile(r"^rel\s+([A-Za-z_]\w*)\s+(\d+)$")
_FUN = re.compile(r"^fun\s+([A-Za-z_]\w*)\s+(\d+)$")
_CONST = re.compile(r"^const\s+([A-Za-z_]\w*)$")
_SIZE = re.compile(r"^n\s*=\s*(\d+)$")
_DEFINABLE = re.compile(r"^definable\s+(\d+)$")
_DEFINABLE_CONST = re.compile(r"^definable\s+([A-Za-z_]\w*)(?:\s+at\s+(\d+))?$")
_DEFINABLE_FORMULA = re.compile(
    r"^(definable\s+([A-Za-z_]\w*)\s*\(\s*([A-Za-z_]\w*)\s*\)(?:\s+at\s+(\d+))?\s*:\s*)(.*)$"
)
_AXIOM = re.compile(r"^(axiom\s+([A-Za-z_][\w:]*)\s*:\s*)(.*)$")
_PARTITION = re.compile(r"^partition(?:\s+([A-Za-z_]\w*))?$")
_LAYER = re.compile(r"^(layer\s+([A-Za-z_]\w*)\s*\(\s*([A-Za-z_]\w*)\s*\)\s*:\s*)(.*)$")
_ORIENT = re.compile(r"^orient\s+(\d+)\s+(\d+)\s+(.+)$")
_ORIENTATION = re.compile(r"^(~?)([A-Za-z_]\w*)\(([xy]),([xy])\)$")
_ASSUME_PRESET = re.compile(r"^assume\s+([A-Za-z_]\w*)$")
_ASSUME = re.compile(r"^(assume\s+)(.*?)\s*=\s*(\d+)$")

PARTITION_PRESETS = ("poset_layers",)
ASSUMPTION_PRESETS = ("poset_base",)


@dataclass
class TheoryFile:
    signature: Signature
    n: int
    sentences: List[Tuple[str, FolFormula]] = field(default_factory=list)
    spec: Optional[GoodPartitionSpec] = None
    assumptions: Assignment = field(default_factory=dict)
    definables: List[Tuple[str, int]] = field(default_factory=list)

    @property
    def constants_factor(self) -> int:
        return definable_constants_factor(len(self.definables), self.n)

    @property
    def counting_spec(self) -> Optional[GoodPartitionSpec]:
        """The declared partition, or the one-layer partition when only definables reduce."""
        if self.spec is None and self.definables:
            return whole_domain_spec()
        return self.spec

    def ground(self) -> PropTheory:
        return ground_theory(self.sentences, self.n, self.signature, self.assumptions)


class _Resolver:
    """Binds parsed names against the signature: constants, variables, symbols and arities."""

    def __init__(self, signature: Signature, free: Set[str] = frozenset()):
        self.signature = signature
        self.free = set(free)

    def term(self, t: FolTerm, bound: Set[str]) -> FolTerm:
        if isinstance(t, Element):
            return t
        if isinstance(t, TermVar):
            if t.name in bound or t.name in self.free:
                return t
            if t.name in self.signature.constants:
                return FuncApp(t.name, ())
            raise ScriptError(f"unknown identifier '{t.name}'")
        if not self.signature.is_function(t.symbol):
            raise ScriptError(f"unknown function symbol '{t.symbol}'")
        self.signature.check_arity(t.symbol, len(t.args))
        return FuncApp(t.symbol, tuple(self.term(arg, bound) for arg in t.args))

    def formula(self, phi: FolFormula, bound: Set[str]) -> FolFormula:
        if isinstance(phi, Truth):
            return phi
        if isinstance(phi, Eq):
            return Eq(self.term(phi.left, bound), self.term(phi.right, bound))
        if isinstance(phi, Rel):
            if not self.signature.is_relation(phi.symbol):
                raise ScriptError(f"unknown relation symbol '{phi.symbol}'")
            self.signature.check_arity(phi.symbol, len(phi.args))
            return Rel(phi.symbol, tuple(self.term(arg, bound) for arg in phi.args))
        if isinstance(phi, FNot):
            return FNot(self.formula(phi.body, bound))
        if isinstance(phi, (FAnd, FOr)):
            return type(phi)(tuple(self.formula(part, bound) for part in phi.parts))
        if isinstance(phi, (FImplies, FIff, FXor)):
            return type(phi)(self.formula(phi.left, bound), self.formula(phi.right, bound))
        if phi.var in self.signature.constants:
            raise ScriptError(f"quantified variable '{phi.var}' shadows a constant")
        return type(phi)(phi.var, self.formula(phi.body, bound | {phi.var}))


class _TheoryReader:
    def __init__(self):
        self.functions: Dict[str, int] = {}
        self.relations: Dict[str, int] = {}
        self.n: Optional[int] = None
        self.sentences: List[Tuple[str, FolFormula]] = []
        self.spec: Optional[GoodPartitionSpec] = None
        self.assumptions: Assignment = {}
        self.definables: List[Tuple[str, int]] = []
        self.block: Optional[Dict] = None

    @property
    def signature(self) -> Signature:
        return Signature(functions=self.functions, relations=self.relations)

    def declare(self, name: str, arity: int, kind: str):
        if name in RESERVED or name == "n":
            raise ScriptError(f"'{name}' is reserved")
        if name in self.functions or name in self.relations:
            raise ScriptError(f"symbol '{name}' is declared twice")
        if self.sentences:
            raise ScriptError("symbols must be declared before the first sentence")
        (self.functions if kind == "fun" else self.relations)[name] = arity

    def formula(self, text: str, line: int, offset: int, free: Set[str] = frozenset()) -> FolFormula:
        try:
            parsed = FOL_FORMULA.parse_string(text, parse_all=True)[0]
        except pp.ParseException as exc:
            raise ScriptSyntaxError(exc.msg, line, offset + exc.col) from None
        return _Resolver(self.signature, free).formula(parsed, set())

    def size(self, line: int) -> int:
        if self.n is None:
            raise ScriptError("'n = <size>' must come first", line)
        return self.n

    def binary_relation(self) -> str:
        binary = [name for name, arity in self.relations.items() if arity == 2]
        if self.functions or len(self.relations) != 1 or not binary:
            raise ScriptError("a partition needs a signature of exactly one binary relation")
        return binary[0]

    def orientation(self, text: str, relation: str) -> Orientation:
        cleaned = "".join(text.split())
        if cleaned == "none":
            return Orientation.NONE
        match = _ORIENTATION.match(cleaned)
        if not match or match.group(2) != relation or match.group(3) == match.group(4):
            raise ScriptError(f"unknown orientation '{text}'")
        negated, _, first, second = match.groups()
        return Orientation.parse(f"{negated}R({first},{second})")

    def assumption(self, lhs: str, bit: int, line: int, offset: int):
        try:
            target = TERM.parse_string(lhs, parse_all=True)[0]
        except pp.ParseException as exc:
            raise ScriptSyntaxError(exc.msg, line, offset + exc.col) from None
        symbol = target.name if isinstance(target, TermVar) else target.symbol
        args = () if isinstance(target, TermVar) else target.args
        if not all(isinstance(arg, Element) for arg in args):
            raise ScriptError("assumptions take element names only", line)
        values = tuple(arg.value for arg in args)
        if symbol in self.relations:
            self.signature.check_arity(symbol, len(values))
            if bit not in (0, 1):
                raise ScriptError(f"relation assumptions are 0 or 1, got {bit}", line)
            name = relation_letter(symbol, values)
            fixed = {name: bit}
        elif symbol in self.functions:
            self.signature.check_arity(symbol, len(values))
            fixed = {function_letter(symbol, values, bit): 1}
        else:
            raise ScriptError(f"unknown symbol '{symbol}'", line)
        self.assumptions.update(fixed)

    def definable_position(self, name: str, at: Optional[str], line: int) -> int:
        """Element a definable is pinned to: its declaration index unless 'at' says otherwise."""
        n = self.size(line)
        position = len(self.definables) if at is None else int(at)
        if not 0 <= position < n:
            raise ScriptError(f"definable '{name}' pinned to {position}, outside I_{n}", line)
        for other, taken in self.definables:
            if other == name:
                raise ScriptError(f"definable '{name}' is declared twice", line)
            if taken == position:
                raise ScriptError(f"definables '{other}' and '{name}' share the element {position}", line)
        self.definables.append((name, position))
        return position

    def block_line(self, text: str, line: int):
        if text == "end":
            self.close_block(line)
            return
        layer = _LAYER.match(text)
        if layer:
            lead, name, variable, body = layer.groups()
            phi = self.formula(body, line, len(lead) + 1, {variable})
            self.block["layers"].append((name, variable, phi))
            return
        orient = _ORIENT.match(text)
        if orient:
            k, l, raw = int(orient.group(1)), int(orient.group(2)), orient.group(3)
            if not 1 <= k <= l:
                raise ScriptError(f"orientation ({k},{l}) must satisfy 1 <= k <= l", line)
            self.block["orient"][(k - 1, l - 1)] = self.orientation(raw, self.block["relation"])
            return
        raise ScriptSyntaxError("expected 'layer', 'orient' or 'end' inside a partition block", line, 1)

    def close_block(self, line: int):
        layers = self.block["layers"]
        if not layers:
            raise ScriptError("a partition block needs at least one layer", line)
        variables = {variable for _, variable, _ in layers}
        if len(variables) != 1:
            raise ScriptError("all layers must use the same free variable", line)
        try:
            self.spec = GoodPartitionSpec(
                relation=self.block["relation"],
                layers=[phi for _, _, phi in layers],
                orientation=self.block["orient"],
                variable=variables.pop(),
                names=tuple(name for name, _, _ in layers),
            )
        except ValueError as exc:
            raise ScriptError(str(exc), line) from None
        self.block = None

    def feed(self, text: str, line: int):
        if self.block is not None:
            self.block_line(text, line)
            return
        for pattern, kind in ((_REL, "rel"), (_FUN, "fun")):
            match = pattern.match(text)
            if match:
                self.declare(match.group(1), int(match.group(2)), kind)
                return
        match = _CONST.match(text)
        if match:
            self.declare(match.group(1), 0, "fun")
            return
        match = _SIZE.match(text)
        if match:
            if self.n is not None:
                raise ScriptError("'n' is set twice", line)
            self.n = int(match.group(1))
            if self.n < 1:
                raise ScriptError("the domain size n must be at least 1", line)
            return
        if _DEFINABLE.match(text):
            raise ScriptError(
                "definable constants must be named: 'definable c' or 'definable NAME(x): formula'", line
            )
        match = _DEFINABLE_FORMULA.match(text)
        if match:
            lead, name, variable, at, body = match.groups()
            position = self.definable_position(name, at, line)
            if variable in self.signature.constants:
                raise ScriptError(f"variable '{variable}' shadows a constant", line)
            phi = self.formula(body, line, len(lead) + 1, {variable})
            pinned = ForAll(variable, FImplies(Eq(TermVar(variable), Element(position)), phi))
            self.sentences.append((f"definable:{name}", pinned))
            return
        match = _DEFINABLE_CONST.match(text)
        if match:
            name, at = match.groups()
            if name not in self.signature.constants:
                raise ScriptError(f"'{name}' is not a declared constant", line)
            position = self.definable_position(name, at, line)
            for b in range(self.n):
                self.assumptions[function_letter(name, (), b)] = int(b == position)
            return
        match = _AXIOM.match(text)
        if match:
            lead, name, body = match.groups()
            self.sentences.append((name, self.formula(body, line, len(lead) + 1)))
            return
        match = _PARTITION.match(text)
        if match:
            if self.spec is not None:
                raise ScriptError("only one partition is allowed", line)
            relation = self.binary_relation()
            preset = match.group(1)
            if preset is None:
                self.block = {"relation": relation, "layers": [], "orient": {}}
            elif preset in PARTITION_PRESETS:
                self.spec = poset_layer_spec(self.size(line), relation)
            else:
                raise ScriptError(f"unknown partition preset '{preset}'", line)
            return
        match = _ASSUME_PRESET.match(text)
        if match:
            if match.group(1) not in ASSUMPTION_PRESETS:
                raise ScriptError(f"unknown assumption preset '{match.group(1)}'", line)
            self.assumptions.update(poset_base_kills(self.size(line), self.binary_relation()))
            return
        match = _ASSUME.match(text)
        if match:
            lead, lhs, bit = match.groups()
            self.assumption(lhs, int(bit), line, len(lead) + 1)
            return
        self.sentences.append((f"sentence{len(self.sentences) + 1}", self.formula(text, line, 1)))

    def finish(self) -> TheoryFile:
        if self.block is not None:
            raise ScriptError("partition block is missing its 'end'")
        if self.n is None:
            raise ScriptError("missing 'n = <size>'")
        if self.definables and self.spec is not None:
            raise ScriptError("definable constants cannot be combined with a partition")
        bad = [name for name in self.assumptions if any(i >= self.n for i in name.index)]
        if bad:
            raise ScriptError(f"assumption on {min(bad)} lies outside I_{self.n}")
        return TheoryFile(
            signature=self.signature,
            n=self.n,
            sentences=list(self.sentences),
            spec=self.spec,
            assumptions=dict(self.assumptions),
            definables=list(self.definables),
        )


def parse_theory(text: str) -> TheoryFile:
    reader = _TheoryReader()
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            reader.feed(line, number)
        except ScriptError as exc:
            if exc.line is not None:
                raise
            raise ScriptError(str(exc), number) from None
        except (TBAError, ValueError) as exc:
            raise ScriptError(str(exc), number) from None
    theory = reader.finish()
    logger.debug(
        "Theory Parser: n=%d, %d sentences, partition=%s, %d assumptions.",
        theory.n,
        len(theory.sentences),
        "yes" if theory.spec else "no",
        len(theory.assumptions),
    )
    return theory


def is_theory_text(text: str) -> bool:
    """A theory file declares its signature with rel, fun or const lines."""
    return any(
        re.match(r"^\s*(rel|fun|const)\s+[A-Za-z_]", raw.split("#", 1)[0]) for raw in text.splitlines()
    )