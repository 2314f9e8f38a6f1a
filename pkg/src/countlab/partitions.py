"""
c-partitions: weak compositions of n into m parts laid out as consecutive
blocks X_1 = {0..a_1-1}, X_2 = {a_1..a_1+a_2-1}, ... of I_n.
"""

from dataclasses import dataclass
from math import comb
from typing import Dict, Iterator, Tuple


@dataclass(frozen=True)
class CPartition:
    n: int
    sizes: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(self.sizes))
        if any(size < 0 for size in self.sizes):
            raise ValueError(f"Negative component size in {self.sizes}.")
        if sum(self.sizes) != self.n:
            raise ValueError(f"Sizes {self.sizes} do not sum to n={self.n}.")

    @property
    def m(self) -> int:
        return len(self.sizes)

    @property
    def blocks(self) -> Tuple[Tuple[int, ...], ...]:
        blocks, start = [], 0
        for size in self.sizes:
            blocks.append(tuple(range(start, start + size)))
            start += size
        return tuple(blocks)

    @property
    def component_of(self) -> Tuple[int, ...]:
        """Component index of every element of I_n."""
        return tuple(k for k, size in enumerate(self.sizes) for _ in range(size))

    @property
    def multiplicity(self) -> int:
        """prod binom(beta_i, alpha_i) with beta_1 = n and beta_{i+1} = beta_i - alpha_i."""
        total, remaining = 1, self.n
        for size in self.sizes:
            total *= comb(remaining, size)
            remaining -= size
        return total

    def describe(self) -> str:
        return "(" + ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + ")"


def _compositions(n: int, m: int) -> Iterator[Tuple[int, ...]]:
    if m == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, m - 1):
            yield (first,) + rest


def enumerate_c_partitions(n: int, m: int) -> Iterator[CPartition]:
    """All weak compositions of n into m parts, in lexicographic order of sizes."""
    if n < 1 or m < 1:
        raise ValueError("c-partitions need n >= 1 and m >= 1.")
    for sizes in _compositions(n, m):
        yield CPartition(n, sizes)


def count_c_partitions(n: int, m: int) -> int:
    if n < 1 or m < 1:
        raise ValueError("c-partitions need n >= 1 and m >= 1.")
    return sum(comb(m, k) * comb(n - 1, k - 1) for k in range(1, m + 1))


def layered_shape(sizes: Tuple[int, ...]) -> bool:
    """
    Sizes of the layer partition of a bounded poset: a singleton bottom,
    nonempty middle layers, a singleton top, then only empty components.
    """
    filled = [size for size in sizes if size]
    if len(filled) < 2 or filled[0] != 1 or filled[-1] != 1:
        return False
    used = len(filled)
    return all(sizes[:used]) and not any(sizes[used:])


def _positive_compositions(total: int) -> Iterator[Tuple[int, ...]]:
    if total == 0:
        yield ()
        return
    for first in range(1, total + 1):
        for rest in _positive_compositions(total - first):
            yield (first,) + rest


def poset_layer_partitions(n: int) -> Iterator[CPartition]:
    """
    The layered c-partitions of bounded posets on I_n, m = n components each.
    Same set as filtering enumerate_c_partitions(n, n) by layered_shape.
    """
    if n < 2:
        raise ValueError("Bounded posets with distinct bounds need n >= 2.")
    for middle in _positive_compositions(n - 2):
        sizes = (1,) + middle + (1,)
        yield CPartition(n, sizes + (0,) * (n - len(sizes)))


def poset_cpartition_count(n: int) -> int:
    """2^{n-3} for n >= 3: compositions of the n-2 middle elements."""
    if n < 2:
        raise ValueError("Bounded posets with distinct bounds need n >= 2.")
    if n == 2:
        return 1
    return 1 << (n - 3)

