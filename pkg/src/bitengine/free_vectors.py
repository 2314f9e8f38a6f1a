"""
Free Boolean vectors.

Row i of the v x 2^v matrix M whose columns are the binary expansions of
0..2^v-1 (zero padded on the left) is the free vector b_i. The rows are
never stored: each chunk of a row is synthesised from the chunk index.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from src.common.errors import ChunkSizeError, IndependenceInputError

WORD_BITS = 64
LOG_WORD_BITS = 6
ALL_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)

# Within one 64-bit word, bit r of row shift s is (r >> s) & 1.
PERIODIC_WORDS = (
    0xAAAAAAAAAAAAAAAA,
    0xCCCCCCCCCCCCCCCC,
    0xF0F0F0F0F0F0F0F0,
    0xFF00FF00FF00FF00,
    0xFFFF0000FFFF0000,
    0xFFFFFFFF00000000,
)


def words_per_chunk(k: int) -> int:
    return max(1, (1 << k) >> LOG_WORD_BITS)


def tail_mask(k: int) -> np.uint64:
    """Mask of the meaningful bits of a chunk word when the chunk is shorter than a word."""
    if k >= LOG_WORD_BITS:
        return ALL_ONES
    return np.uint64((1 << (1 << k)) - 1)


@dataclass(frozen=True)
class FreeVectorScheme:
    v: int

    def __post_init__(self):
        if self.v < 0:
            raise ValueError("A free vector scheme needs v >= 0.")

    @property
    def length(self) -> int:
        return 1 << self.v

    def bit(self, i: int, j: int) -> int:
        return free_vector_bit(self, i, j)

    def row(self, i: int) -> str:
        """Row b_i as a bit string over j = 0..2^v-1 (small v only)."""
        return "".join(str(self.bit(i, j)) for j in range(self.length))

    def chunk_words(self, i: int, chunk_index: int, k: int) -> np.ndarray:
        """
        Words of chunk chunk_index (size 2^k) of row i. Bit r of the chunk is
        the bit of valuation index chunk_index * 2^k + r, LSB first in each word.
        """
        if k > self.v:
            raise ChunkSizeError(f"Chunk size 2^{k} exceeds 2^{self.v} valuations.")
        shift = self.v - i
        count = words_per_chunk(k)
        if shift >= k:
            if (chunk_index >> (shift - k)) & 1:
                words = np.full(count, ALL_ONES, dtype=np.uint64)
            else:
                words = np.zeros(count, dtype=np.uint64)
        elif shift < LOG_WORD_BITS:
            words = np.full(count, np.uint64(PERIODIC_WORDS[shift]), dtype=np.uint64)
        else:
            index = np.arange(count, dtype=np.uint64)
            selected = (index >> np.uint64(shift - LOG_WORD_BITS)) & np.uint64(1)
            words = np.where(selected == 1, ALL_ONES, np.uint64(0)).astype(np.uint64)
        return words & tail_mask(k)


def free_vector_bit(scheme: FreeVectorScheme, i: int, j: int) -> int:
    if not 1 <= i <= scheme.v:
        raise ValueError(f"Variable position {i} outside 1..{scheme.v}.")
    if not 0 <= j < scheme.length:
        raise ValueError(f"Valuation index {j} outside 0..{scheme.length - 1}.")
    return (j >> (scheme.v - i)) & 1


def _as_bit_array(vector: Union[str, Sequence[int]]) -> np.ndarray:
    if isinstance(vector, str):
        return np.array([int(ch) for ch in vector], dtype=np.uint8)
    return np.asarray(vector, dtype=np.uint8)


def is_independent(vectors: Sequence[Union[str, Sequence[int]]]) -> bool:
    """
    True iff every signed meet b_1^a1 & ... & b_n^an is nonzero. Equivalently
    the columns of the stacked vectors realise all 2^n sign patterns.
    """
    if not vectors:
        raise IndependenceInputError("is_independent needs a nonempty list.")
    rows = [_as_bit_array(vector) for vector in vectors]
    length = len(rows[0])
    if any(len(row) != length for row in rows):
        raise IndependenceInputError("All vectors must have the same length.")
    n = len(rows)
    if length < (1 << n):
        return False
    codes = np.zeros(length, dtype=np.int64)
    for row in rows:
        codes = (codes << 1) | row.astype(np.int64)
    return len(np.unique(codes)) == (1 << n)


def count_free_generating_sets(n: int) -> int:
    """(2^n)! / n!, the number of free generating sets of the free algebra on n generators."""
    if n < 1:
        raise ValueError("count_free_generating_sets needs n >= 1.")
    return math.factorial(1 << n) // math.factorial(n)
