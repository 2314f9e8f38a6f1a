"""
Killing variables through good definable partitions and definable constants.

A good partition is a sequence of layer formulas theta_1(x)..theta_m(x)
together with an orientation S_kl for every k <= l such that
(theta_k(x) & theta_l(y)) => S_kl(x, y) holds in every model. Under a fixed
c-partition X the orientations fix relation letters outright. On a diagonal
block S_kk constrains distinct x, y only; R(x,x) is left to the axioms.
"""

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

from src.boolcore.terms import Assignment
from src.common.errors import SignatureShapeError
from src.countlab.partitions import CPartition
from src.fol.letters import relation_letter
from src.fol.syntax import FolFormula, Truth

logger = logging.getLogger(__name__)


class Orientation(enum.Enum):
    R_XY = "R(x,y)"
    R_YX = "R(y,x)"
    NOT_R_XY = "~R(x,y)"
    NOT_R_YX = "~R(y,x)"
    NONE = "none"

    @classmethod
    def parse(cls, text: str) -> "Orientation":
        cleaned = "".join(text.split()).replace("¬", "~")
        for orientation in cls:
            if orientation.value == cleaned:
                return orientation
        raise ValueError(f"Unknown orientation '{text}'.")

    def fixed_letter(self, relation: str, x: int, y: int) -> Optional[Tuple]:
        """(letter, bit) forced at x, y; None when unconstrained."""
        if self is Orientation.NONE:
            return None
        if self in (Orientation.R_XY, Orientation.NOT_R_XY):
            args = (x, y)
        else:
            args = (y, x)
        bit = 1 if self in (Orientation.R_XY, Orientation.R_YX) else 0
        return relation_letter(relation, args), bit


@dataclass
class GoodPartitionSpec:
    """
    Layers theta_1..theta_m (formulas in the free variable `variable`) and an
    orientation table keyed by 0-based (k, l) with k <= l. Missing entries
    are unconstrained.

    `admissible` optionally restricts the c-partitions that are tried;
    `classifier` optionally computes each element's component directly and
    must agree with evaluating the layer formulas.
    """

    relation: str
    layers: Sequence[FolFormula]
    orientation: Dict[Tuple[int, int], Orientation] = field(default_factory=dict)
    variable: str = "x"
    names: Sequence[str] = ()
    admissible: Optional[Callable[[Tuple[int, ...]], bool]] = None
    classifier: Optional[Callable] = None

    def __post_init__(self):
        self.layers = tuple(self.layers)
        m = len(self.layers)
        if m < 1:
            raise ValueError("A good partition needs at least one layer.")
        for (k, l) in self.orientation:
            if not 0 <= k <= l < m:
                raise ValueError(
                    f"Orientation ({k + 1},{l + 1}) lies outside the upper triangle of {m} layers."
                )
        table = {(k, l): Orientation.NONE for k in range(m) for l in range(k, m)}
        table.update(self.orientation)
        self.orientation = table
        if not self.names:
            self.names = tuple(f"theta{k}" for k in range(m))

    @property
    def m(self) -> int:
        return len(self.layers)


def _check_shape(spec: GoodPartitionSpec, theory):
    if all(o is Orientation.NONE for o in spec.orientation.values()):
        return
    signature = theory.signature
    if signature.functions or signature.relations != ((spec.relation, 2),):
        raise SignatureShapeError(
            f"Partition killing needs exactly one binary relation '{spec.relation}' "
            f"and no functions; got {signature}."
        )


def kill_for_partition(spec: GoodPartitionSpec, X: CPartition, theory) -> Assignment:
    _check_shape(spec, theory)
    if X.m != spec.m:
        raise ValueError(f"c-partition has {X.m} components but {spec.m} layers are defined.")
    blocks = X.blocks
    kills: Assignment = {}
    for (k, l), orientation in spec.orientation.items():
        for x in blocks[k]:
            for y in blocks[l]:
                if k == l and x == y:
                    continue
                fixed = orientation.fixed_letter(spec.relation, x, y)
                if fixed is not None:
                    letter, bit = fixed
                    kills[letter] = bit
    logger.debug("Killer: %s kills %d letters.", X.describe(), len(kills))
    return kills


def whole_domain_spec() -> GoodPartitionSpec:
    """
    The one-layer partition: every element in one component, nothing killed.
    Used when only definable constants reduce the search.
    """
    return GoodPartitionSpec(relation="", layers=[Truth(True)], variable="x", names=("all",))


def definable_constants_factor(k: int, n: int) -> int:
    """n (n-1) ... (n-k+1): placements of k distinct definable constants in I_n."""
    if not 0 <= k <= n:
        raise ValueError(f"Need 0 <= k <= n, got k={k}, n={n}.")
    total = 1
    for i in range(k):
        total *= n - i
    return total
