import random
from itertools import permutations, product

import networkx as nx
import pytest

# Add src to path to allow direct import
import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.bitengine.engine import BitParallelEngine
from src.boolcore.oracle import eval_naive
from src.boolcore.terms import Letter, Valuation
from src.common.errors import FunctionalityError, SearchGuardError
from src.countlab.posets import poset_signature, poset_theory
from src.fol.syntax import Eq, ForAll, FuncApp, Signature, TermVar
from src.fol.translate import ground_theory
from src.modelkit.models import (
    LabeledModel,
    compose,
    decode_model,
    encode_valuation,
    format_model,
    identity,
    inverse,
    relabel,
    relational_model,
)
from src.modelkit.semantics import satisfies
from src.modelkit.symmetry import (
    automorphisms,
    burnside_labeled_count,
    canonical_form,
    canonical_key,
    is_absolutely_invariant,
    is_isomorphic,
    isomorphism_classes,
)


def chain(n):
    return relational_model(n, R=[(i, j) for i in range(n) for j in range(n) if i <= j])


def diamond():
    """0 below 1 and 2, both below 3."""
    rows = [(i, i) for i in range(4)] + [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)]
    return relational_model(4, R=rows)


def labeled_posets(n):
    theory = ground_theory(poset_theory(), n, poset_signature())
    engine = BitParallelEngine({"chunk_bits": 10})
    return [decode_model(mu, theory) for mu in engine.iter_models(theory.theta, theory.letters)]


def random_digraph(rng, n):
    return relational_model(n, R=[cell for cell in product(range(n), repeat=2) if rng.random() < 0.4])


def test_permutation_helpers():
    pi, rho = (1, 2, 0), (2, 1, 0)
    assert compose(pi, inverse(pi)) == identity(3)
    assert compose(pi, rho) == (0, 2, 1)


def test_relabel_composes():
    """Relabeling by pi then rho equals relabeling by pi o rho."""
    rng = random.Random(8)
    A = random_digraph(rng, 4)
    for pi in permutations(range(4)):
        rho = tuple(rng.sample(range(4), 4))
        assert relabel(relabel(A, pi), rho) == relabel(A, compose(pi, rho))
    assert relabel(A, identity(4)) == A


def test_relabel_moves_function_values():
    sig = Signature(functions={"f": 1, "c": 0})
    A = LabeledModel(3, sig, {"f": {(0,): 1, (1,): 2, (2,): 2}, "c": {(): 0}}, {})
    B = relabel(A, (2, 0, 1))
    # B's element 1 plays A's 0, 2 plays 1, 0 plays 2
    assert B.constant("c") == 1
    assert B.apply("f", 1) == 2
    assert B.apply("f", 0) == 0


def test_labeled_model_validates_tables():
    sig = Signature(functions={"f": 1})
    with pytest.raises(ValueError):
        LabeledModel(2, sig, {"f": {(0,): 1}}, {})
    with pytest.raises(ValueError):
        LabeledModel(2, sig, {"f": {(0,): 1, (1,): 5}}, {})
    with pytest.raises(ValueError):
        relational_model(2, R=[(0, 3)])


def test_decode_inverts_encode():
    theory = ground_theory(poset_theory(), 4, poset_signature())
    A = diamond()
    mu = encode_valuation(A, theory.letters)
    assert decode_model(mu, theory) == A


def test_decode_rejects_non_functional_valuations():
    sig = Signature(functions={"f": 1})
    theory = ground_theory([], 2, sig)
    mu = {name: 1 for name in theory.letters}
    with pytest.raises(FunctionalityError) as excinfo:
        decode_model(mu, theory)
    assert excinfo.value.values == (0, 1)
    mu = {name: 0 for name in theory.letters}
    with pytest.raises(FunctionalityError):
        decode_model(mu, theory)


def test_satisfies_evaluates_function_terms():
    sig = Signature(functions={"f": 1})
    swap = LabeledModel(2, sig, {"f": {(0,): 1, (1,): 0}}, {})
    involution = ForAll("x", Eq(FuncApp("f", (FuncApp("f", (TermVar("x"),)),)), TermVar("x")))
    assert satisfies(swap, involution)
    assert not satisfies(swap, ForAll("x", Eq(FuncApp("f", (TermVar("x"),)), TermVar("x"))))


def test_automorphism_groups():
    assert automorphisms(chain(3)) == [identity(3)]
    assert len(automorphisms(relational_model(3, R=[]))) == 6
    assert sorted(automorphisms(diamond())) == [(0, 1, 2, 3), (0, 2, 1, 3)]


def test_is_isomorphic_returns_a_witness():
    A = diamond()
    B = relabel(A, (3, 1, 0, 2))
    pi = is_isomorphic(A, B)
    assert pi is not None
    assert relabel(A, pi) == B
    assert is_isomorphic(A, chain(4)) is None


def test_isomorphism_agrees_with_networkx():
    """Digraph isomorphism, self-loops included, checked against networkx."""
    rng = random.Random(21)
    for _ in range(60):
        A, B = random_digraph(rng, 4), random_digraph(rng, 4)
        if rng.random() < 0.5:
            B = relabel(A, tuple(rng.sample(range(4), 4)))
        GA, GB = nx.DiGraph(), nx.DiGraph()
        GA.add_nodes_from(range(4))
        GB.add_nodes_from(range(4))
        GA.add_edges_from(A.relations["R"])
        GB.add_edges_from(B.relations["R"])
        expected = nx.is_isomorphic(GA, GB)
        assert (is_isomorphic(A, B) is not None) == expected
        assert (canonical_key(A) == canonical_key(B)) == expected


def test_canonical_form_is_a_class_invariant():
    A = diamond()
    for pi in permutations(range(4)):
        assert canonical_form(relabel(A, pi)) == canonical_form(A)


@pytest.mark.parametrize("n, labeled, classes", [(2, 3, 2), (3, 19, 5), (4, 219, 16)])
def test_burnside_identity_for_posets(n, labeled, classes):
    """Labeled count = sum of n!/|Aut(A)| over isomorphism types."""
    models = labeled_posets(n)
    assert len(models) == labeled
    representatives = isomorphism_classes(models)
    assert len(representatives) == classes
    assert burnside_labeled_count(representatives.values()) == labeled


def test_burnside_terms_on_three_points():
    """19 = 1 + 6 + 3 + 3 + 6."""
    representatives = isomorphism_classes(labeled_posets(3)).values()
    terms = sorted(6 // len(automorphisms(A)) for A in representatives)
    assert terms == [1, 3, 3, 6, 6]


def test_absolutely_invariant_subsets():
    A = diamond()
    assert is_absolutely_invariant(A, {0})
    assert is_absolutely_invariant(A, {1, 2})
    assert not is_absolutely_invariant(A, {1})
    with pytest.raises(ValueError):
        is_absolutely_invariant(A, {7})


def test_search_guard():
    big = relational_model(11, R=[])
    with pytest.raises(SearchGuardError):
        canonical_key(big)
    with pytest.raises(SearchGuardError):
        automorphisms(big)


def test_format_model_prints_matrices():
    text = format_model(chain(2))
    assert text.splitlines() == ["n = 2", "R:", "  1 1", "  0 1"]
    assert Letter("R", (0, 1)) in encode_valuation(chain(2))


def assert_labelings_collide_exactly_on_automorphisms(A):
    """relabel(A, alpha) == relabel(A, beta) iff alpha o beta^-1 is an automorphism of A."""
    perms = list(permutations(range(A.n)))
    group = set(automorphisms(A))
    images = {alpha: relabel(A, alpha) for alpha in perms}
    for alpha in perms:
        for beta in perms:
            same = images[alpha] == images[beta]
            assert same == (compose(alpha, inverse(beta)) in group)
    assert len(set(images.values())) * len(group) == len(perms)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_labelings_of_every_binary_relation(n):
    for code in range(1 << (n * n)):
        cells = list(product(range(n), repeat=2))
        rows = [cell for bit, cell in enumerate(cells) if (code >> bit) & 1]
        assert_labelings_collide_exactly_on_automorphisms(relational_model(n, R=rows))


@pytest.mark.parametrize("n", [2, 3])
def test_labelings_of_every_unary_function_with_a_constant(n):
    sig = Signature(functions={"F": 1, "c": 0})
    for values in product(range(n), repeat=n):
        for c in range(n):
            table = {(i,): value for i, value in enumerate(values)}
            assert_labelings_collide_exactly_on_automorphisms(
                LabeledModel(n, sig, {"F": table, "c": {(): c}}, {})
            )


def test_labelings_of_random_digraphs_on_four_points():
    rng = random.Random(404)
    for _ in range(25):
        assert_labelings_collide_exactly_on_automorphisms(random_digraph(rng, 4))
    assert_labelings_collide_exactly_on_automorphisms(diamond())


@pytest.mark.parametrize("n", [2, 3])
def test_functional_valuations_and_models_correspond(n):
    """Every valuation meeting the functionality axioms decodes, and encodes back to itself."""
    sig = Signature(functions={"F": 1, "c": 0})
    theory = ground_theory([], n, sig)
    models = set()
    for index in range(1 << len(theory.letters)):
        mu = Valuation(theory.letters, index)
        if not eval_naive(theory.theta, mu):
            with pytest.raises(FunctionalityError):
                decode_model(mu, theory)
            continue
        A = decode_model(mu, theory)
        assert encode_valuation(A, theory.letters) == mu
        models.add(A)
    assert len(models) == n ** n * n
