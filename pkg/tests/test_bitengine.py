import random
import time
from itertools import combinations

import pytest
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import SimpleSpanProcessor
from opentelemetry.sdk.trace.export.in_memory_span_exporter import InMemorySpanExporter

# Add src to path to allow direct import
import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.bitengine import engine as engine_module
from src.bitengine.engine import (
    BitParallelEngine,
    NaiveEngine,
    enumerate_models,
    estimate_cycles,
    eval_chunk,
    eval_full,
    make_engine,
)
from src.bitengine.free_vectors import (
    FreeVectorScheme,
    count_free_generating_sets,
    free_vector_bit,
    is_independent,
)
from src.boolcore.oracle import eval_naive
from src.boolcore.terms import (
    And,
    Const,
    Iff,
    Implies,
    Letter,
    Not,
    Or,
    Valuation,
    Var,
    Xor,
    conj,
    var,
)
from src.common.errors import (
    CapExceededError,
    ChunkSizeError,
    IndependenceInputError,
    MaterializationError,
    UnboundLetterError,
)


def letters(v):
    return tuple(Letter("p", (i,)) for i in range(v))


def random_term(rng, names, depth):
    if depth == 0 or rng.random() < 0.35:
        if rng.random() < 0.05:
            return Const(rng.randint(0, 1))
        return Var(rng.choice(names))
    kind = rng.choice(["not", "and", "or", "xor", "implies", "iff"])
    if kind == "not":
        return Not(random_term(rng, names, depth - 1))
    if kind in ("and", "or"):
        parts = tuple(random_term(rng, names, depth - 1) for _ in range(rng.randint(2, 3)))
        return And(parts) if kind == "and" else Or(parts)
    build = {"xor": Xor, "implies": Implies, "iff": Iff}[kind]
    return build(random_term(rng, names, depth - 1), random_term(rng, names, depth - 1))


@pytest.fixture
def ba_equations():
    """x + y + ~z + u = 1 and ~((x | yz) + u) = 1 over canonical order u, x, y, z."""
    x, y, z, u = var("x"), var("y"), var("z"), var("u")
    e1 = Xor(Xor(Xor(x, y), Not(z)), u)
    e2 = Not(Xor(Or((x, And((y, z)))), u))
    return And((e1, e2)), (Letter("u"), Letter("x"), Letter("y"), Letter("z"))


def test_free_vectors_for_three_variables():
    """The rows of the 3 x 8 matrix of binary expansions."""
    scheme = FreeVectorScheme(3)
    rows = [scheme.row(i) for i in (1, 2, 3)]
    assert rows == ["00001111", "00110011", "01010101"]
    assert is_independent(rows)


def test_is_independent_detects_dependence():
    assert not is_independent(["0011", "0011"])
    assert not is_independent(["01", "01", "01"])
    with pytest.raises(IndependenceInputError):
        is_independent([])
    with pytest.raises(IndependenceInputError):
        is_independent(["01", "011"])


def test_free_generating_sets_match_brute_force():
    """Independent 2-element sets of subsets of a 4-set: (2^2)!/2! = 12."""
    vectors = [format(code, "04b") for code in range(16)]
    found = sum(1 for a, b in combinations(vectors, 2) if is_independent([a, b]))
    assert found == count_free_generating_sets(2) == 12
    assert count_free_generating_sets(3) == 6720


def test_chunk_words_agree_with_the_bit_formula():
    scheme = FreeVectorScheme(8)
    for i in range(1, 9):
        for k in (0, 3, 6, 8):
            for chunk_index in range(1 << (8 - k)):
                words = scheme.chunk_words(i, chunk_index, k)
                for r in range(1 << k):
                    bit = (int(words[r >> 6]) >> (r & 63)) & 1
                    assert bit == scheme.bit(i, (chunk_index << k) + r)


def test_eval_full_matches_the_naive_oracle_on_random_terms():
    """Every bit of the DNF vector equals eval_naive at that valuation index."""
    rng = random.Random(2024)
    for _ in range(200):
        v = rng.randint(1, 12)
        order = letters(v)
        t = random_term(rng, order, 8)
        d, stats = eval_full(t, order, k=rng.choice([0, 3, 6, 8, 16]))
        expected = [eval_naive(t, Valuation(order, j)) for j in range(1 << v)]
        assert [d.bit(j) for j in range(1 << v)] == expected
        assert d.model_count == sum(expected)
        assert stats.v == v


def test_eval_full_is_identical_across_chunk_sizes_and_workers():
    rng = random.Random(99)
    v = 10
    order = letters(v)
    for _ in range(20):
        t = random_term(rng, order, 7)
        reference, _ = eval_full(t, order, k=6, workers=1)
        for k in (6, 9, v, 3):
            for workers in (1, 2, "max"):
                d, _ = eval_full(t, order, k=k, workers=workers)
                assert d.to_bitstring() == reference.to_bitstring()
                assert d.model_count == reference.model_count


def test_eval_chunk_is_a_slice_of_the_full_vector():
    order = (Letter("x"), Letter("y"), Letter("z"))
    t = Or((var("x"), And((var("y"), var("z")))))
    d, _ = eval_full(t, order, k=3)
    assert d.to_bitstring() == "00011111"
    assert eval_chunk(t, order, 0, 2).bits() == "0001"
    assert eval_chunk(t, order, 1, 2).bits() == "1111"
    with pytest.raises(ChunkSizeError):
        eval_chunk(t, order, 0, 4)


def test_boolean_equations_have_three_solutions(ba_equations):
    t, order = ba_equations
    d, _ = eval_full(t, order)
    assert [mu.bits() for mu in enumerate_models(d)] == ["0000", "1100", "1111"]
    assert d.model_count == 3


def test_count_and_iter_models_agree_with_eval_full():
    rng = random.Random(5)
    order = letters(9)
    engine = BitParallelEngine({"chunk_bits": 4, "workers": 2})
    for _ in range(10):
        t = random_term(rng, order, 6)
        d, _ = engine.eval_full(t, order)
        count, _ = engine.count_models(t, order)
        streamed = [mu.index for mu in engine.iter_models(t, order)]
        assert count == d.model_count
        assert streamed == list(d.ones())
        assert [mu.index for mu in engine.iter_models(t, order, limit=2)] == streamed[:2]


def test_naive_backend_matches_bit_parallel_backend(ba_equations):
    rng = random.Random(17)
    order = letters(7)
    naive = make_engine("naive", {"chunk_bits": 4})
    fast = make_engine("bitparallel", {"chunk_bits": 4})
    assert isinstance(naive, NaiveEngine)
    for _ in range(15):
        t = random_term(rng, order, 6)
        assert naive.eval_full(t, order)[0].to_bitstring() == fast.eval_full(t, order)[0].to_bitstring()
    t, ba_order = ba_equations
    assert naive.count_models(t, ba_order)[0] == 3


def test_constant_terms_and_zero_variables():
    d, _ = eval_full(Const(1), letters(2))
    assert d.to_bitstring() == "1111"
    d, _ = eval_full(Const(0), ())
    assert d.model_count == 0
    d, _ = eval_full(Const(1), ())
    assert d.model_count == 1


def test_cap_and_materialisation_limits():
    wide = conj(Var(name) for name in letters(31))
    with pytest.raises(CapExceededError) as excinfo:
        eval_full(wide, letters(31))
    assert excinfo.value.cap == 30
    assert excinfo.value.actual == 31

    engine = BitParallelEngine({"max_vars": 30})
    with pytest.raises(MaterializationError):
        engine.eval_full(conj(Var(name) for name in letters(29)), letters(29))

    with pytest.raises(CapExceededError):
        BitParallelEngine({"max_vars": 41})
    with pytest.raises(ValueError):
        make_engine("gpu")


def test_unbound_letters_are_rejected():
    with pytest.raises(UnboundLetterError):
        eval_full(And((var("a"), var("b"))), (Letter("a"),))


def test_estimate_cycles_counts_word_operations():
    stats = estimate_cycles(node_count=100, v=24, k=16)
    assert stats.chunk_count == 256
    assert stats.estimated_ops == 25600
    assert estimate_cycles(10, v=4, k=16).chunk_count == 1


def test_throughput_smoke_for_24_variables():
    """A 100-node term over 24 variables with every worker; timing is recorded, not gated tightly."""
    rng = random.Random(3)
    order = letters(24)
    parts = []
    for i in range(0, 24, 2):
        a, b = Var(order[i]), Var(order[i + 1])
        parts.append(Or((Xor(a, b), And((Not(a), Var(order[rng.randrange(24)]))))))
    t = Or((conj(parts[:6]), conj(parts[6:]), Iff(Var(order[0]), Var(order[23]))))
    started = time.perf_counter()
    count, stats = BitParallelEngine({"workers": "max"}).count_models(t, order)
    elapsed = time.perf_counter() - started
    assert 0 < count < (1 << 24)
    assert stats.node_count >= 80
    assert elapsed < 10


def test_estimate_cycles_examples():
    assert estimate_cycles(7, v=4, k=4).estimated_ops == 7
    assert estimate_cycles(3, v=10, k=5).estimated_ops == 96
    assert count_free_generating_sets(1) == 2


def test_free_vector_bit_reads_binary_expansions():
    assert free_vector_bit(FreeVectorScheme(3), 3, 1) == 1
    assert free_vector_bit(FreeVectorScheme(1), 1, 0) == 0
    with pytest.raises(ValueError):
        free_vector_bit(FreeVectorScheme(3), 4, 0)


@pytest.fixture
def spans(monkeypatch):
    """Spans opened by the engine, captured in memory."""
    exporter = InMemorySpanExporter()
    provider = TracerProvider()
    provider.add_span_processor(SimpleSpanProcessor(exporter))
    monkeypatch.setattr(engine_module, "tracer", provider.get_tracer("test"))
    return exporter


def test_engine_spans_carry_the_chunk_count(spans):
    engine = BitParallelEngine({"chunk_bits": 6, "workers": 2})
    t = Or((var("p", 0), And((var("p", 1), var("p", 9)))))
    engine.eval_full(t, letters(10))
    engine.count_models(t, letters(10))
    finished = {span.name: span for span in spans.get_finished_spans()}
    for name in ("bitengine.eval_full", "bitengine.count_models"):
        attributes = finished[name].attributes
        assert attributes["tba.chunk_count"] == 1 << (10 - 6)
        assert attributes["tba.v"] == 10
    assert finished["bitengine.eval_full"].attributes["tba.k"] == 6
    assert finished["bitengine.count_models"].attributes["tba.model_count"] == 512 + 128
