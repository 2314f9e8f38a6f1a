"""
Bounded partial orders: axioms, layer formulas of k-minimal elements,
the base kills fixed by the least and greatest element, and the layer
classifier used to check decoded models.
"""

from typing import Dict, List, Tuple

import networkx as nx

from src.boolcore.terms import Assignment
from src.countlab.killing import GoodPartitionSpec, Orientation
from src.countlab.partitions import layered_shape
from src.fol.letters import relation_letter
from src.fol.syntax import (
    Eq,
    FAnd,
    FImplies,
    FNot,
    FolFormula,
    FOr,
    ForAll,
    Signature,
    TermVar,
    exists,
    forall,
    rel,
)
from src.modelkit.models import LabeledModel


def poset_signature(relation: str = "R") -> Signature:
    return Signature(relations={relation: 2})


def poset_theory(relation: str = "R") -> List[Tuple[str, FolFormula]]:
    """Reflexive, antisymmetric and transitive."""
    return [
        ("reflexive", ForAll("x", rel(relation, "x", "x"))),
        (
            "antisymmetric",
            forall(
                ["x", "y"],
                FImplies(
                    FAnd((rel(relation, "x", "y"), rel(relation, "y", "x"))),
                    Eq(TermVar("x"), TermVar("y")),
                ),
            ),
        ),
        (
            "transitive",
            forall(
                ["x", "y", "z"],
                FImplies(
                    FAnd((rel(relation, "x", "y"), rel(relation, "y", "z"))),
                    rel(relation, "x", "z"),
                ),
            ),
        ),
    ]


def bounded_poset_theory(relation: str = "R") -> List[Tuple[str, FolFormula]]:
    return poset_theory(relation) + [
        ("least", exists(["x"], ForAll("y", rel(relation, "x", "y")))),
        ("greatest", exists(["x"], ForAll("y", rel(relation, "y", "x")))),
    ]


def poset_layer_formula(k: int, var: str = "x", relation: str = "R") -> FolFormula:
    """
    theta_k(var): var is k-minimal. theta_0 says var is below everything;
    theta_{k+1} says var lies in no earlier layer and every element strictly
    below var does. Bound variables are y0, y1, ... with theta_k binding y_k
    only, so substituting a y_j with j > k for var never captures.
    """
    if k < 0:
        raise ValueError("Layer index must be non-negative.")
    bound = f"y{k}"
    if bound == var:
        raise ValueError(f"Layer variable '{var}' clashes with the bound name '{bound}'.")
    if k == 0:
        return ForAll(bound, rel(relation, var, bound))
    earlier_at_y = [poset_layer_formula(i, bound, relation) for i in range(k)]
    earlier_at_var = [FNot(poset_layer_formula(i, var, relation)) for i in range(k)]
    below_var_is_earlier = ForAll(
        bound,
        FOr(
            tuple(earlier_at_y)
            + (FNot(rel(relation, bound, var)), Eq(TermVar(bound), TermVar(var)))
        ),
    )
    return FAnd((below_var_is_earlier,) + tuple(earlier_at_var))


def classify_layers(A: LabeledModel, relation: str = "R") -> Tuple[int, ...]:
    """
    Layer index of every element: topological generations of the strict order.
    Elements on a cycle (not an order) get no generation and are marked -1.
    """
    rows = A.relations[relation]
    graph = nx.DiGraph()
    graph.add_nodes_from(range(A.n))
    graph.add_edges_from((i, j) for (i, j) in rows if i != j)
    layers = [-1] * A.n
    if not nx.is_directed_acyclic_graph(graph):
        return tuple(layers)
    for depth, generation in enumerate(nx.topological_generations(graph)):
        for node in generation:
            layers[node] = depth
    return tuple(layers)


def poset_layer_spec(n: int, relation: str = "R") -> GoodPartitionSpec:
    """
    n layers theta_0..theta_{n-1}. For k < l nothing in a later layer lies
    below an element of an earlier one: S_kl = ~R(y,x). Each layer is an
    antichain, so S_kk = ~R(x,y) for distinct x, y.
    """
    if n < 2:
        raise ValueError("Bounded posets with distinct bounds need n >= 2.")
    orientation: Dict[Tuple[int, int], Orientation] = {
        (k, l): Orientation.NOT_R_YX for k in range(n) for l in range(k + 1, n)
    }
    orientation.update({(k, k): Orientation.NOT_R_XY for k in range(n)})
    return GoodPartitionSpec(
        relation=relation,
        layers=[poset_layer_formula(k, "x", relation) for k in range(n)],
        orientation=orientation,
        variable="x",
        names=tuple(f"theta{k}" for k in range(n)),
        admissible=layered_shape,
        classifier=lambda A: classify_layers(A, relation),
    )


def poset_base_kills(n: int, relation: str = "R") -> Assignment:
    """Letters fixed by 0 being least, n-1 greatest, and reflexivity: 5n-6 of them."""
    if n < 2:
        raise ValueError("Bounded posets with distinct bounds need n >= 2.")
    top = n - 1
    kills: Assignment = {}
    for i in range(n):
        kills[relation_letter(relation, (0, i))] = 1
        kills[relation_letter(relation, (i, top))] = 1
        kills[relation_letter(relation, (i, i))] = 1
    for j in range(1, n):
        kills[relation_letter(relation, (j, 0))] = 0
    for k in range(top):
        kills[relation_letter(relation, (top, k))] = 0
    return kills
