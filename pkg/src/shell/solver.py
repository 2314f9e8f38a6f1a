"""
The solve pipeline and the solution file writer.

substitute -> reduce_constants -> engine pass over the free letters -> rows
with the killed letters reinstated at their assumed values.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from opentelemetry import trace

from src.bitengine.engine import make_engine
from src.boolcore.reduction import kill
from src.boolcore.terms import Assignment, BoolTerm, Const, Letter
from src.common.errors import CapExceededError
from src.fol.translate import PropTheory
from src.modelkit.models import LabeledModel, decode_model
from src.shell.expand import LetterNamespace, expand_script
from src.shell.script_parser import parse_script
from src.shell.theory_parser import TheoryFile, is_theory_text, parse_theory

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)

SOLUTION_HEADER = "# tba-solutions v1"


def _names_line(key: str, names: Sequence[Letter]) -> str:
    return f"# {key}:" + "".join(f" {name}" for name in names)


@dataclass
class SolutionFile:
    letters: Tuple[Letter, ...]
    free: Tuple[Letter, ...]
    count: int
    rows: List[str] = field(default_factory=list)

    def render(self) -> str:
        lines = [
            SOLUTION_HEADER,
            _names_line("letters", self.letters),
            _names_line("free", self.free),
            f"# count: {self.count}",
        ]
        lines.extend(self.rows)
        return "\n".join(lines) + "\n"

    def write(self, path) -> Path:
        path = Path(path)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(self.render())
        logger.info("Solver: wrote %d rows to %s.", len(self.rows), path)
        return path

    def assignments(self) -> List[Dict[Letter, int]]:
        return [{name: int(bit) for name, bit in zip(self.letters, row)} for row in self.rows]


@dataclass
class LoadedInput:
    """A solvable problem read from a script or a theory file."""

    theta: BoolTerm
    assumptions: Assignment
    namespace: LetterNamespace
    theory: Optional[PropTheory] = None
    source: Optional[TheoryFile] = None


def solve(
    theta: BoolTerm,
    assumptions: Assignment,
    namespace: LetterNamespace,
    options: Dict = None,
) -> SolutionFile:
    """
    Options: backend, chunk_bits, workers, max_vars, and count_only (skip the
    rows and stream popcounts instead).
    """
    options = dict(options or {})
    count_only = bool(options.pop("count_only", False))
    engine = make_engine(options.pop("backend", "bitparallel"), options)

    letters = namespace.letters
    fixed = {name: bit for name, bit in assumptions.items() if name in namespace}
    free = tuple(name for name in letters if name not in fixed)

    with tracer.start_as_current_span("shell.solve") as span:
        span.set_attribute("tba.letters", len(letters))
        span.set_attribute("tba.free", len(free))
        if len(free) > engine.max_vars:
            raise CapExceededError(engine.max_vars, len(free), "free letters after killing")
        reduced = kill(theta, fixed)
        rows: List[str] = []
        if reduced == Const(0):
            logger.warning("Solver: the assumptions contradict the theory; no models.")
            count = 0
        elif count_only:
            count, _ = engine.count_models(reduced, free)
        else:
            for mu in engine.iter_models(reduced, free):
                full = {**fixed, **mu}
                rows.append("".join(str(full[name]) for name in letters))
            count = len(rows)
        span.set_attribute("tba.model_count", count)

    logger.info(
        "Solver: %d letters, %d killed, %d free, %d models.",
        len(letters),
        len(fixed),
        len(free),
        count,
    )
    return SolutionFile(letters=letters, free=free, count=count, rows=rows)


def load_input(path) -> LoadedInput:
    """Reads a script, or a theory file (suffix .thy or rel/fun/const declarations)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".thy" or is_theory_text(text):
        source = parse_theory(text)
        theory = source.ground()
        return LoadedInput(
            theta=theory.theta,
            assumptions=dict(theory.assumptions),
            namespace=LetterNamespace(letters=theory.letters),
            theory=theory,
            source=source,
        )
    theta, assumptions, namespace = expand_script(parse_script(text))
    return LoadedInput(theta=theta, assumptions=assumptions, namespace=namespace)


def solve_input(loaded: LoadedInput, options: Dict = None) -> SolutionFile:
    return solve(loaded.theta, loaded.assumptions, loaded.namespace, options)


def decode_rows(solution: SolutionFile, theory: PropTheory) -> List[LabeledModel]:
    return [decode_model(row, theory) for row in solution.assignments()]
