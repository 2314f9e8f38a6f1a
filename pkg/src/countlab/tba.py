"""
The TBA counting procedure.

For every admissible c-partition X: kill letters by the partition's
orientations on top of the base assumptions, reduce, enumerate the models of
the reduced theory, keep those whose layers are exactly X (the family K_X),
and count their isomorphism classes. Totals are
l = sum_X prod binom(beta_i, alpha_i) |K_X| and kappa = sum_X kappa_X.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

import pandas as pd
from opentelemetry import trace

from src.bitengine.engine import make_engine
from src.boolcore.reduction import kill, merge_assignments
from src.boolcore.terms import Const, Letter, Valuation
from src.common.errors import CapExceededError
from src.countlab.killing import GoodPartitionSpec, kill_for_partition
from src.countlab.partitions import CPartition, enumerate_c_partitions
from src.fol.translate import PropTheory
from src.modelkit.models import LabeledModel, decode_model
from src.modelkit.semantics import satisfies
from src.modelkit.symmetry import canonical_key

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)

REPORT_COLUMNS = ["sizes", "blocks", "free", "models", "classes", "multiplicity", "contribution"]


@dataclass
class PartitionRecord:
    partition: CPartition
    free_letters: int
    models: int
    classes: int
    conflict: bool = False
    representatives: List[LabeledModel] = field(default_factory=list, repr=False)

    @property
    def multiplicity(self) -> int:
        return self.partition.multiplicity

    @property
    def contribution(self) -> int:
        return self.multiplicity * self.models


@dataclass
class CountReport:
    n: int
    records: List[PartitionRecord]
    labeled_total: int
    unlabeled_total: int
    constants_factor: int = 1
    elapsed: float = 0.0

    def check(self) -> bool:
        """Totals agree with the per-partition rows."""
        labeled = sum(record.contribution for record in self.records) * self.constants_factor
        unlabeled = sum(record.classes for record in self.records)
        return labeled == self.labeled_total and unlabeled == self.unlabeled_total

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                "sizes": " ".join(str(size) for size in record.partition.sizes),
                "blocks": record.partition.describe(),
                "free": record.free_letters,
                "models": record.models,
                "classes": record.classes,
                "multiplicity": record.multiplicity,
                "contribution": record.contribution,
            }
            for record in self.records
        ]
        # object dtype keeps arbitrary-precision integers intact
        return pd.DataFrame(rows, columns=REPORT_COLUMNS, dtype=object)

    def to_table(self) -> str:
        lines = [self.to_frame().to_string(index=False)]
        if self.constants_factor != 1:
            lines.append(f"definable constants factor = {self.constants_factor}")
        lines.append(f"labeled = {self.labeled_total}")
        lines.append(f"unlabeled = {self.unlabeled_total}")
        return "\n".join(lines) + "\n"


def model_components(A: LabeledModel, spec: GoodPartitionSpec) -> Optional[Tuple[int, ...]]:
    """
    Component of every element by evaluating the layer formulas, or None
    when some element satisfies no layer or several.
    """
    components = []
    for e in range(A.n):
        hits = [
            k for k, layer in enumerate(spec.layers) if satisfies(A, layer, {spec.variable: e})
        ]
        if len(hits) != 1:
            return None
        components.append(hits[0])
    return tuple(components)


def _components(A: LabeledModel, spec: GoodPartitionSpec) -> Optional[Tuple[int, ...]]:
    if spec.classifier is not None:
        return tuple(spec.classifier(A))
    return model_components(A, spec)


def _count_partition(
    theory: PropTheory,
    spec: GoodPartitionSpec,
    base: Mapping[Letter, int],
    X: CPartition,
    engine,
) -> PartitionRecord:
    with tracer.start_as_current_span("countlab.partition") as span:
        span.set_attribute("tba.sizes", list(X.sizes))
        kills = kill_for_partition(spec, X, theory)
        clashes = [name for name, bit in kills.items() if name in base and base[name] != bit]
        assignment = merge_assignments(base, kills)
        free = tuple(name for name in theory.letters if name not in assignment)
        if clashes:
            logger.debug("TBA Counter: %s clashes with the base kills at %s.", X.describe(), min(clashes))
            return PartitionRecord(X, len(free), 0, 0, conflict=True)
        if len(free) > engine.max_vars:
            raise CapExceededError(engine.max_vars, len(free), f"c-partition {X.sizes}")

        reduced = kill(theory.theta, assignment)
        if reduced == Const(0):
            return PartitionRecord(X, len(free), 0, 0)

        expected = X.component_of
        kept: Dict[int, LabeledModel] = {}
        models = 0
        for mu in engine.iter_models(reduced, free):
            full = Valuation.from_mapping(theory.letters, {**assignment, **mu.as_dict()})
            A = decode_model(full, theory)
            if _components(A, spec) != expected:
                continue
            models += 1
            kept.setdefault(canonical_key(A), A)
        span.set_attribute("tba.models", models)
        logger.debug(
            "TBA Counter: %s has %d free letters, |K_X| = %d, %d classes.",
            X.describe(),
            len(free),
            models,
            len(kept),
        )
        return PartitionRecord(
            X, len(free), models, len(kept), representatives=[kept[key] for key in sorted(kept)]
        )


def tba_count(
    theory: PropTheory,
    spec: GoodPartitionSpec,
    base_assumptions: Mapping[Letter, int] = None,
    config: Dict = None,
    jobs: int = 1,
    constants_factor: int = 1,
) -> CountReport:
    config = dict(config or {})
    engine = make_engine(config.pop("backend", "bitparallel"), config)
    base = merge_assignments(theory.assumptions, base_assumptions or {})
    partitions = [
        X
        for X in enumerate_c_partitions(theory.n, spec.m)
        if spec.admissible is None or spec.admissible(X.sizes)
    ]
    logger.info(
        "TBA Counter: n=%d, %d layers, %d c-partitions, %d base kills.",
        theory.n,
        spec.m,
        len(partitions),
        len(base),
    )

    with tracer.start_as_current_span("countlab.tba_count") as span:
        started = time.perf_counter()
        span.set_attribute("tba.n", theory.n)
        span.set_attribute("tba.partitions", len(partitions))
        if jobs > 1 and len(partitions) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                records = list(
                    pool.map(lambda X: _count_partition(theory, spec, base, X, engine), partitions)
                )
        else:
            records = [_count_partition(theory, spec, base, X, engine) for X in partitions]
        labeled = sum(record.contribution for record in records) * constants_factor
        unlabeled = sum(record.classes for record in records)
        elapsed = time.perf_counter() - started
        span.set_attribute("tba.labeled", str(labeled))
        span.set_attribute("tba.unlabeled", str(unlabeled))

    logger.info(
        "TBA Counter: labeled = %d, unlabeled = %d in %.3fs.", labeled, unlabeled, elapsed
    )
    return CountReport(
        n=theory.n,
        records=records,
        labeled_total=labeled,
        unlabeled_total=unlabeled,
        constants_factor=constants_factor,
        elapsed=elapsed,
    )
