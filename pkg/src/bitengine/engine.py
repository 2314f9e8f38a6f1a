"""
Chunked, word-parallel evaluation of a term over all 2^v valuations.

The valuation space is cut into 2^(v-k) consecutive chunks of 2^k valuations.
Each chunk d_j = t(b_1j, ..., b_vj) is a pure function of (term, order, j, k),
so chunks are farmed out to a worker pool and merged by ascending j. The
concatenation d_1 d_2 ... is the DnfVector: bit mu is 1 iff mu satisfies t.
"""

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from opentelemetry import trace

from src.bitengine.compiler import Program, compile_term, run_program
from src.bitengine.free_vectors import (
    LOG_WORD_BITS,
    WORD_BITS,
    tail_mask,
    words_per_chunk,
)
from src.boolcore.oracle import eval_naive
from src.boolcore.terms import BoolTerm, Letter, Valuation, node_count, variables
from src.common.errors import (
    CapExceededError,
    ChunkSizeError,
    MaterializationError,
    UnboundLetterError,
)

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)

# One 64-bit word times a block factor of 2^10 words.
DEFAULT_CHUNK_BITS = LOG_WORD_BITS + 10
DEFAULT_MAX_VARS = 30
HARD_MAX_VARS = 40
DEFAULT_MATERIALIZE_LIMIT = 28


def max_workers() -> int:
    return os.cpu_count() or 1


def _popcount(words: np.ndarray) -> int:
    if words.size == 0:
        return 0
    as_bytes = words.astype("<u8").view(np.uint8)
    return int(np.unpackbits(as_bytes).sum(dtype=np.int64))


def _set_bits(words: np.ndarray) -> np.ndarray:
    """Positions of the 1-bits of an LSB-first word array, ascending."""
    as_bytes = words.astype("<u8").view(np.uint8)
    return np.flatnonzero(np.unpackbits(as_bytes, bitorder="little"))


@dataclass(frozen=True)
class Chunk:
    chunk_index: int
    k: int
    words: np.ndarray

    @property
    def size(self) -> int:
        return 1 << self.k

    @property
    def popcount(self) -> int:
        return _popcount(self.words)

    def bit(self, r: int) -> int:
        return int((int(self.words[r >> LOG_WORD_BITS]) >> (r & (WORD_BITS - 1))) & 1)

    def bits(self) -> str:
        return "".join(str(self.bit(r)) for r in range(self.size))

    def ones(self) -> Iterator[int]:
        """Valuation indices of the models inside this chunk, ascending."""
        base = self.chunk_index << self.k
        for r in _set_bits(self.words):
            if r < self.size:
                yield base + int(r)


@dataclass
class EngineStats:
    node_count: int
    v: int
    k: int
    chunk_count: int
    estimated_ops: int
    elapsed: float = 0.0
    workers: int = 1


def estimate_cycles(
    node_count: int, v: int, k: int, elapsed: float = 0.0, workers: int = 1
) -> EngineStats:
    """
    Diagnostic cost model: one bitwise pass per node per chunk, i.e.
    node_count * 2^(v-k) word-vector operations. The node count is used as
    measured, not rounded up to a power of two.
    """
    k = min(k, v)
    chunk_count = 1 << (v - k)
    return EngineStats(
        node_count=node_count,
        v=v,
        k=k,
        chunk_count=chunk_count,
        estimated_ops=node_count * chunk_count,
        elapsed=elapsed,
        workers=workers,
    )


@dataclass
class DnfVector:
    """
    The 2^v-bit vector coding the full DNF of a term: bit mu (LSB first within
    64-bit words) is 1 iff valuation mu satisfies the term.
    """

    order: Tuple[Letter, ...]
    words: np.ndarray
    model_count: int

    @property
    def v(self) -> int:
        return len(self.order)

    @property
    def length(self) -> int:
        return 1 << self.v

    def bit(self, index: int) -> int:
        if not 0 <= index < self.length:
            raise IndexError(f"Valuation index {index} out of range.")
        return int((int(self.words[index >> LOG_WORD_BITS]) >> (index & (WORD_BITS - 1))) & 1)

    def ones(self) -> Iterator[int]:
        for index in _set_bits(self.words):
            if index >= self.length:
                break
            yield int(index)

    def to_bitstring(self) -> str:
        bits = np.unpackbits(self.words.astype("<u8").view(np.uint8), bitorder="little")
        return "".join("1" if b else "0" for b in bits[: self.length])


def enumerate_models(d: DnfVector, limit: Optional[int] = None) -> Iterator[Valuation]:
    """Models coded by d in ascending valuation-index order, at most limit of them."""
    emitted = 0
    for index in d.ones():
        if limit is not None and emitted >= limit:
            return
        yield Valuation(d.order, index)
        emitted += 1


def eval_chunk(t: BoolTerm, order: Sequence[Letter], j: int, k: int) -> Chunk:
    """Chunk j (size 2^k) of the DnfVector of t under the given letter order."""
    v = len(order)
    if k > v:
        raise ChunkSizeError(f"Chunk bits k={k} exceed the variable count v={v}.")
    if not 0 <= j < (1 << (v - k)):
        raise ValueError(f"Chunk index {j} outside 0..{(1 << (v - k)) - 1}.")
    program = compile_term(t, tuple(order))
    return _program_chunk(program, j, k)


def _program_chunk(program: Program, j: int, k: int) -> Chunk:
    words = run_program(program, j, k) & tail_mask(k)
    return Chunk(chunk_index=j, k=k, words=words)


class _EngineBase:
    """Shared chunk scheduling, materialisation and streaming."""

    name = "engine"

    def __init__(self, config: Dict = None):
        self.config = config or {}
        self.chunk_bits = int(self.config.get("chunk_bits", DEFAULT_CHUNK_BITS))
        self.workers = self._resolve_workers(self.config.get("workers", 1))
        self.max_vars = int(self.config.get("max_vars", DEFAULT_MAX_VARS))
        self.materialize_limit = int(
            self.config.get("materialize_limit", DEFAULT_MATERIALIZE_LIMIT)
        )
        if self.chunk_bits < 0:
            raise ChunkSizeError("chunk_bits must be non-negative.")
        if not 0 <= self.max_vars <= HARD_MAX_VARS:
            raise CapExceededError(HARD_MAX_VARS, self.max_vars, "configured max_vars")

    @staticmethod
    def _resolve_workers(workers) -> int:
        if workers in (None, "max"):
            return max_workers()
        return max(1, int(workers))

    # Subclasses provide the per-chunk evaluation.
    def _prepare(self, t: BoolTerm, order: Tuple[Letter, ...]):
        raise NotImplementedError

    def _chunk(self, prepared, j: int, k: int) -> Chunk:
        raise NotImplementedError

    def eval_chunk(self, t: BoolTerm, order: Sequence[Letter], j: int, k: int) -> Chunk:
        order = tuple(order)
        if k > len(order):
            raise ChunkSizeError(f"Chunk bits k={k} exceed the variable count v={len(order)}.")
        return self._chunk(self._prepare(t, order), j, k)

    def _check_cap(self, v: int):
        if v > self.max_vars:
            raise CapExceededError(self.max_vars, v)

    def _effective_k(self, v: int, k: Optional[int]) -> int:
        k = self.chunk_bits if k is None else int(k)
        if k < 0:
            raise ChunkSizeError("Chunk bits must be non-negative.")
        return min(k, v)

    def _chunks(self, prepared, v: int, k: int, workers: int) -> Iterator[Chunk]:
        """All chunks of the valuation space in ascending index order."""
        chunk_count = 1 << (v - k)
        if workers == 1 or chunk_count == 1:
            for j in range(chunk_count):
                yield self._chunk(prepared, j, k)
            return

        window = workers * 4
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pending = []
            next_j = 0
            while next_j < chunk_count and len(pending) < window:
                pending.append(pool.submit(self._chunk, prepared, next_j, k))
                next_j += 1
            while pending:
                chunk = pending.pop(0).result()
                if next_j < chunk_count:
                    pending.append(pool.submit(self._chunk, prepared, next_j, k))
                    next_j += 1
                yield chunk

    def _start(self, t, order, k, workers):
        order = tuple(order)
        self._check_cap(len(order))
        missing = set(variables(t)) - set(order)
        if missing:
            raise UnboundLetterError(min(missing))
        k = self._effective_k(len(order), k)
        workers = self.workers if workers is None else self._resolve_workers(workers)
        stats = estimate_cycles(node_count(t), len(order), k, workers=workers)
        return order, k, workers, stats

    def eval_full(
        self,
        t: BoolTerm,
        order: Sequence[Letter],
        k: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> Tuple[DnfVector, EngineStats]:
        order, k, workers, stats = self._start(t, order, k, workers)
        v = len(order)
        if v > self.materialize_limit:
            raise MaterializationError(
                f"A DnfVector over {v} variables is not materialised "
                f"(limit {self.materialize_limit}); use count_models or iter_models."
            )

        with tracer.start_as_current_span("bitengine.eval_full") as span:
            span.set_attribute("tba.v", v)
            span.set_attribute("tba.k", k)
            span.set_attribute("tba.chunk_count", stats.chunk_count)
            span.set_attribute("tba.workers", workers)
            started = time.perf_counter()
            prepared = self._prepare(t, order)
            total_words = max(1, (1 << v) >> LOG_WORD_BITS)
            words = np.zeros(total_words, dtype=np.uint64)
            model_count = 0
            step = words_per_chunk(k)
            for chunk in self._chunks(prepared, v, k, workers):
                model_count += chunk.popcount
                if k >= LOG_WORD_BITS:
                    words[chunk.chunk_index * step:(chunk.chunk_index + 1) * step] = chunk.words
                else:
                    offset = chunk.chunk_index << k
                    words[offset >> LOG_WORD_BITS] |= chunk.words[0] << np.uint64(
                        offset & (WORD_BITS - 1)
                    )
            stats.elapsed = time.perf_counter() - started
            span.set_attribute("tba.model_count", model_count)

        logger.info(
            "%s: evaluated %d nodes over v=%d (k=%d, %d chunks, %d workers) in %.3fs; %d models.",
            self.name,
            stats.node_count,
            v,
            k,
            stats.chunk_count,
            workers,
            stats.elapsed,
            model_count,
        )
        return DnfVector(order=order, words=words, model_count=model_count), stats

    def count_models(
        self,
        t: BoolTerm,
        order: Sequence[Letter],
        k: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> Tuple[int, EngineStats]:
        """Model count by streaming chunk popcounts; valid up to the cap."""
        order, k, workers, stats = self._start(t, order, k, workers)
        with tracer.start_as_current_span("bitengine.count_models") as span:
            started = time.perf_counter()
            prepared = self._prepare(t, order)
            total = 0
            for chunk in self._chunks(prepared, len(order), k, workers):
                total += chunk.popcount
            stats.elapsed = time.perf_counter() - started
            span.set_attribute("tba.v", len(order))
            span.set_attribute("tba.chunk_count", stats.chunk_count)
            span.set_attribute("tba.model_count", total)
        logger.info("%s: counted %d models over v=%d in %.3fs.", self.name, total, len(order), stats.elapsed)
        return total, stats

    def iter_models(
        self,
        t: BoolTerm,
        order: Sequence[Letter],
        limit: Optional[int] = None,
        k: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> Iterator[Valuation]:
        """Streams models in ascending valuation-index order without materialising d."""
        order, k, workers, _ = self._start(t, order, k, workers)
        prepared = self._prepare(t, order)
        emitted = 0
        for chunk in self._chunks(prepared, len(order), k, workers):
            for index in chunk.ones():
                if limit is not None and emitted >= limit:
                    return
                yield Valuation(order, index)
                emitted += 1


class BitParallelEngine(_EngineBase):
    """Evaluates compiled terms over numpy uint64 words, 64 valuations per word op."""

    name = "Bit Engine"

    def _prepare(self, t: BoolTerm, order: Tuple[Letter, ...]) -> Program:
        return compile_term(t, order)

    def _chunk(self, prepared: Program, j: int, k: int) -> Chunk:
        chunk_count = 1 << (prepared.v - k)
        if not 0 <= j < chunk_count:
            raise ValueError(f"Chunk index {j} outside 0..{chunk_count - 1}.")
        return _program_chunk(prepared, j, k)


class NaiveEngine(_EngineBase):
    """Oracle backend: every bit comes from eval_naive on one valuation."""

    name = "Naive Engine"

    def _prepare(self, t: BoolTerm, order: Tuple[Letter, ...]):
        return t, order

    def _chunk(self, prepared, j: int, k: int) -> Chunk:
        t, order = prepared
        size = 1 << k
        if not 0 <= j < (1 << (len(order) - k)):
            raise ValueError(f"Chunk index {j} outside the valuation space.")
        acc = 0
        for r in range(size):
            if eval_naive(t, Valuation(order, (j << k) + r)):
                acc |= 1 << r
        count = words_per_chunk(k)
        words = np.array(
            [(acc >> (WORD_BITS * w)) & 0xFFFFFFFFFFFFFFFF for w in range(count)],
            dtype=np.uint64,
        )
        return Chunk(chunk_index=j, k=k, words=words)


BACKENDS = {"bitparallel": BitParallelEngine, "naive": NaiveEngine}


def make_engine(backend: str = "bitparallel", config: Dict = None) -> _EngineBase:
    try:
        return BACKENDS[backend](config)
    except KeyError:
        raise ValueError(
            f"Unknown backend '{backend}'; expected one of {sorted(BACKENDS)}."
        ) from None


def eval_full(
    t: BoolTerm,
    order: Sequence[Letter],
    k: int = DEFAULT_CHUNK_BITS,
    workers: int = 1,
    max_vars: int = DEFAULT_MAX_VARS,
) -> Tuple[DnfVector, EngineStats]:
    engine = BitParallelEngine({"chunk_bits": k, "workers": workers, "max_vars": max_vars})
    return engine.eval_full(t, order)
