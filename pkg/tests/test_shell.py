import pytest

# Add src to path to allow direct import
import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.boolcore.oracle import eval_naive
from src.boolcore.terms import TRUE, Letter, Valuation, Var, letter, variables
from src.common.errors import ExpansionError, ScriptError, ScriptSyntaxError
from src.countlab.killing import Orientation
from src.countlab.tba import tba_count
from src.fol.syntax import Eq, Element, FAnd, ForAll, FuncApp, FNot
from src.shell.expand import LetterNamespace, expand_script
from src.shell.script_parser import (
    AssumeComprehension,
    LetterRef,
    PermDomain,
    SNot,
    SXor,
    parse_script,
)
from src.shell.solver import decode_rows, load_input, solve, solve_input
from src.shell.theory_parser import is_theory_text, parse_theory

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def fixture_text(name):
    with open(os.path.join(FIXTURES, name), encoding="utf-8") as handle:
        return handle.read()


@pytest.fixture
def so2():
    """The special-element order script at n = 2."""
    return parse_script(fixture_text("SO2.txt"))


def test_parse_special_order_script():
    script = parse_script(fixture_text("SO.txt"))
    assert [f.name for f in script.formulas] == ["f1", "f2", "f3"]
    assert isinstance(script.domains["S2"].domain, PermDomain)
    (assume,) = script.assumptions
    assert assume.mode == "set"
    assert isinstance(assume.body, AssumeComprehension)
    assert assume.body.names == ("i",) and assume.body.domain == "S"
    f3 = script.formulas[2]
    assert [q.kind for q in f3.quantifiers] == ["E", "A"]


def test_parse_xor_chain_is_left_associative():
    script = parse_script(fixture_text("BAequ4_in.txt"))
    e1 = script.formulas[0].body
    x, y, z, u = (LetterRef(name) for name in "xyzu")
    assert e1 == SXor(SXor(SXor(x, y), SNot(z)), u)


@pytest.mark.parametrize(
    "text, message",
    [
        ("f = A[i:T] p(i)", "unknown domain"),
        ("S2 = perm(range(2), 2)\nf = A[i:S2] p(i)", "arity mismatch"),
        ("f = p(0) & p(0,1)", "arity mismatch"),
        ("S = range(2)\nf = p(0) & A[i:S] p(i)", "non-prenex"),
        ("n = 2\nS = range(n)\nf = A[n:S] p(n)", "shadows"),
        ("S = range(2)\nf = A[i:S] p(j)", "unknown identifier"),
        ("range = 3", "reserved"),
        ("S = range(2)\nS = range(3)", "defined twice"),
    ],
)
def test_script_semantic_errors(text, message):
    with pytest.raises(ScriptError, match=message) as excinfo:
        parse_script(text)
    assert excinfo.value.line == text.count("\n") + 1


def test_script_syntax_error_carries_line_and_column():
    with pytest.raises(ScriptSyntaxError) as excinfo:
        parse_script("n = 2\nf = p(0) &")
    assert excinfo.value.line == 2
    assert excinfo.value.column > len("f = ")
    with pytest.raises(ScriptSyntaxError):
        parse_script("just some words")


def test_expand_special_order_at_two(so2):
    theta, assumptions, namespace = expand_script(so2)
    p = lambda i, j: letter("p", i, j)
    assert namespace.letters == (p(0, 0), p(0, 1), p(1, 0), p(1, 1))
    assert namespace.families == {"p": 2}
    assert assumptions == {p(0, 0): 1, p(1, 1): 1}
    assert set(variables(theta)) == set(namespace.letters)


def test_expand_updates_merge_in_order():
    script = parse_script(
        "f = p(0) | p(1)\n"
        "assumptions = {p(0): 0, p(1): 0}\n"
        "assumptions.update({p(0): 1})\n"
    )
    _, assumptions, _ = expand_script(script)
    assert assumptions == {letter("p", 0): 1, letter("p", 1): 0}
    script = parse_script("f = p(0)\nassumptions = {p(1): 1}\nassumptions = {p(0): 0}\n")
    assert expand_script(script)[1] == {letter("p", 0): 0}


def test_expansion_errors():
    with pytest.raises(ExpansionError, match="outside"):
        expand_script(parse_script("S = range(2)\nf = A[i:S] p(i + 1)"))
    with pytest.raises(ExpansionError, match="modulo"):
        expand_script(parse_script("n = 0\nS = range(2)\nf = A[i:S] p(i % n)"))
    with pytest.raises(ExpansionError, match="negative"):
        expand_script(parse_script("n = 0 - 1\nS = range(n)\nf = A[i:S] p(i)"))


def test_empty_domains_give_the_neutral_elements():
    theta, _, _ = expand_script(parse_script("S = range(0)\nf = A[i:S] p(i)"))
    assert theta == TRUE


def test_solve_boolean_equations():
    theta, assumptions, namespace = expand_script(parse_script(fixture_text("BAequ4_in.txt")))
    solution = solve(theta, assumptions, namespace)
    assert [str(name) for name in solution.letters] == ["u", "x", "y", "z"]
    assert solution.rows == ["0000", "1100", "1111"]
    assert solution.count == 3


def test_solve_reinstates_killed_letters(so2):
    solution = solve(*expand_script(so2))
    assert solution.free == (letter("p", 0, 1), letter("p", 1, 0))
    assert solution.rows == ["1011", "1101"]
    assert solution.assignments()[0][letter("p", 1, 0)] == 1


def test_solve_tautology_and_contradiction():
    a, b = Letter("a"), Letter("b")
    solution = solve(TRUE, {}, LetterNamespace(letters=(a, b)))
    assert solution.rows == ["00", "01", "10", "11"]
    solution = solve(Var(a), {a: 0}, LetterNamespace(letters=(a,)))
    assert solution.count == 0
    assert solution.rows == []
    assert solution.render().endswith("# count: 0\n")


def test_count_only_agrees_with_rows_and_backends():
    loaded = load_input(os.path.join(FIXTURES, "SO4.txt"))
    rows = solve_input(loaded, {"chunk_bits": 3})
    counted = solve_input(loaded, {"count_only": True, "workers": 2, "chunk_bits": 4})
    naive = solve_input(loaded, {"count_only": True, "backend": "naive"})
    assert rows.count == len(rows.rows) == counted.count == naive.count > 0
    assert counted.rows == []


def test_parse_bounded_poset_theory():
    source = parse_theory(fixture_text("bounded_posets.thy"))
    assert source.n == 4
    assert [name for name, _ in source.sentences] == [
        "reflexive",
        "antisymmetric",
        "transitive",
        "least",
        "greatest",
    ]
    assert source.spec.m == 4
    assert len(source.assumptions) == 5 * 4 - 6
    assert source.constants_factor == 1


def test_parse_partition_block_and_count():
    source = parse_theory(fixture_text("acyclic_layers.thy"))
    spec = source.spec
    assert tuple(spec.names) == ("source", "inner")
    assert spec.orientation[(0, 0)] is Orientation.NOT_R_XY
    assert spec.orientation[(0, 1)] is Orientation.NOT_R_YX
    assert spec.orientation[(1, 1)] is Orientation.NONE
    report = tba_count(source.ground(), spec)
    assert (report.labeled_total, report.unlabeled_total) == (19, 5)


def test_theory_directives():
    source = parse_theory(
        "rel R 2\nfun F 1\nconst c\nn = 3\ndefinable c at 1\n"
        "assume R(0,1) = 1\nassume F(2) = 0\n"
        "c != 0\n"
    )
    assert source.signature.constants == ("c",)
    assert source.definables == [("c", 1)]
    assert source.assumptions == {
        Letter("c", (0,)): 0,
        Letter("c", (1,)): 1,
        Letter("c", (2,)): 0,
        Letter("R", (0, 1)): 1,
        Letter("F", (2, 0)): 1,
    }
    assert source.sentences == [("sentence1", FNot(Eq(FuncApp("c"), Element(0))))]
    assert source.constants_factor == 3


@pytest.mark.parametrize(
    "text, message",
    [
        ("rel R 2\nn = 2\nS(0)", "unknown relation"),
        ("rel R 2\nn = 2\nR(0)", "expects 2"),
        ("rel R 2\nn = 0", "at least 1"),
        ("rel R 2\nR(0,0)", "missing 'n"),
        ("rel R 2\nn = 2\npartition\n  layer a(x): R(x,x)", "missing its 'end'"),
        ("rel R 2\nn = 2\ndefinable 1", "must be named"),
        ("rel R 2\nn = 2\ndefinable c", "not a declared constant"),
        ("const c\nn = 2\ndefinable c at 2", "outside"),
        ("const c\nconst d\nn = 2\ndefinable c\ndefinable d at 0", "share the element 0"),
        ("rel R 2\nn = 2\ndefinable top(x): A[y] R(y,x)\ndefinable top(x) at 1: true", "declared twice"),
        ("rel R 2\nn = 3\ndefinable top(x): A[y] R(y,x)\npartition poset_layers", "cannot be combined"),
        ("rel R 2\nn = 2\nR(0,0)\nrel S 1", "before the first sentence"),
        ("rel R 2\nn = 2\nassume R(0,5) = 1", "outside"),
        ("fun F 1\nn = 2\npartition poset_layers", "exactly one binary relation"),
        ("const c\nn = 2\nA[c] c = c", "shadows a constant"),
        ("rel R 2\nn = 2\nA[x] R(x,y)", "unknown identifier"),
        ("rel R 2\nn = 2\npartition\n  orient 2 1 none\nend", "1 <= k <= l"),
    ],
)
def test_theory_errors(text, message):
    with pytest.raises(ScriptError, match=message):
        parse_theory(text)


def test_theory_syntax_error_has_a_line():
    with pytest.raises(ScriptSyntaxError) as excinfo:
        parse_theory("rel R 2\nn = 2\nA[x] R(x,")
    assert excinfo.value.line == 3



def test_quantifier_after_a_connective_needs_parentheses():
    with pytest.raises(ScriptSyntaxError) as excinfo:
        parse_theory("rel R 2\nn = 2\nR(0,0) & A[x] R(x,x)")
    assert excinfo.value.line == 3
    source = parse_theory("rel R 2\nn = 2\nR(0,0) & (A[x] R(x,x))")
    [(name, phi)] = source.sentences
    assert name == "sentence1"
    assert isinstance(phi, FAnd) and isinstance(phi.parts[1], ForAll)


def test_load_input_dispatches_on_content(tmp_path):
    theory_path = tmp_path / "orders.txt"
    theory_path.write_text(fixture_text("posets.thy"), encoding="utf-8")
    assert is_theory_text(fixture_text("posets.thy"))
    assert not is_theory_text(fixture_text("SO2.txt"))

    loaded = load_input(theory_path)
    assert loaded.theory is not None and loaded.source.n == 3
    solution = solve_input(loaded)
    assert solution.count == 19
    models = decode_rows(solution, loaded.theory)
    assert len(models) == 19 and all(A.n == 3 for A in models)

    script = load_input(os.path.join(FIXTURES, "BAequ4_in.txt"))
    assert script.theory is None
    assert len(script.namespace) == 4


def test_expand_full_special_order_script():
    theta, assumptions, namespace = expand_script(parse_script(fixture_text("SO.txt")))
    assert len(assumptions) == 6
    assert len(namespace) == 36
    assert len(namespace) - len(assumptions) == 30


def test_every_row_satisfies_theta_and_the_assumptions():
    loaded = load_input(os.path.join(FIXTURES, "SO4.txt"))
    solution = solve_input(loaded, {"workers": 2})
    for row in solution.assignments():
        assert eval_naive(loaded.theta, row) == 1
        assert all(row[name] == bit for name, bit in loaded.assumptions.items())


def test_definable_elements_are_pinned_and_scale_the_count():
    """Least at 0 and greatest at 3: 3 pinned orders times 4 * 3 placements give all 36."""
    source = parse_theory(fixture_text("pinned_bounded_posets.thy"))
    assert source.definables == [("least", 0), ("greatest", 3)]
    assert source.constants_factor == 12
    assert source.spec is None
    assert [name for name, _ in source.sentences][-2:] == ["definable:least", "definable:greatest"]
    theory = source.ground()
    pinned = solve_input(load_input(os.path.join(FIXTURES, "pinned_bounded_posets.thy")))
    assert pinned.count == 3
    report = tba_count(theory, source.counting_spec, constants_factor=source.constants_factor)
    assert (report.labeled_total, report.unlabeled_total) == (36, 2)
    layered = parse_theory(fixture_text("bounded_posets.thy"))
    full = tba_count(layered.ground(), layered.spec)
    assert report.labeled_total == full.labeled_total


def test_counting_spec_needs_a_partition_or_definables():
    assert parse_theory(fixture_text("posets.thy")).counting_spec is None
    assert parse_theory(fixture_text("bounded_posets.thy")).counting_spec.m == 4


def test_quasigroup_theory_file_counts_latin_squares():
    loaded = load_input(os.path.join(FIXTURES, "quasigroups.thy"))
    assert loaded.source.signature.functions == (("M", 2),)
    solution = solve_input(loaded, {"count_only": True, "workers": 2, "chunk_bits": 20})
    assert solution.count == 12


def test_shidoku_has_one_completion():
    loaded = load_input(os.path.join(FIXTURES, "shidoku.txt"))
    assert len(loaded.namespace) == 64
    solution = solve_input(loaded)
    assert len(solution.free) == 24
    assert solution.count == 1
    (row,) = solution.assignments()
    grid = [[next(v for v in range(4) if row[letter("p", i, j, v)]) for j in range(4)] for i in range(4)]
    assert grid == [[0, 1, 2, 3], [2, 3, 0, 1], [1, 0, 3, 2], [3, 2, 1, 0]]


def brute_force_count(loaded):
    """Models by evaluating theta on every extension of the assumptions."""
    free = tuple(name for name in loaded.namespace.letters if name not in loaded.assumptions)
    total = 0
    for index in range(1 << len(free)):
        mu = {**loaded.assumptions, **Valuation(free, index).as_dict()}
        total += eval_naive(loaded.theta, mu)
    return total


@pytest.mark.parametrize("text, expected", [("SO2", 2), ("SO3", 12), ("SO4", 116)])
def test_special_order_counts_match_brute_force(tmp_path, text, expected):
    if text == "SO3":
        path = tmp_path / "SO3.txt"
        path.write_text(fixture_text("SO.txt").replace("n = 6", "n = 3"), encoding="utf-8")
    else:
        path = os.path.join(FIXTURES, f"{text}.txt")
    loaded = load_input(path)
    counted = solve_input(loaded, {"count_only": True, "workers": 2})
    assert counted.count == brute_force_count(loaded) == expected
