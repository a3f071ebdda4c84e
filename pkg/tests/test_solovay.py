"""Single-occurrence compression and iterated definitions."""

import itertools

import pytest

from presburger_speedup import BudgetExceeded, parse, parse_template
from presburger_speedup.logic import (
    FALSE,
    And,
    Eq,
    Not,
    Or,
    Rel,
    Var,
    disj,
    free_vars,
    node_count,
    numeral,
    subformulas,
)
from presburger_speedup.oracle import Budget, eval_bounded
from presburger_speedup.pra_families import MUL_BASE, mul_definition
from presburger_speedup.solovay import (
    IteratedDefinition,
    Template,
    compress,
    occurrences,
    plug,
    prenex,
)

B = Budget(witness_bound=10)


def interpret(f, subset):
    """Replace R(t) by the finite set `subset` as a definable predicate."""
    defn = disj(Eq(Var("u"), numeral(s)) for s in sorted(subset)) if subset else FALSE
    return plug(f, "R", ("u",), defn)


def all_subsets(n):
    return itertools.chain.from_iterable(itertools.combinations(range(n), k) for k in range(n + 1))


def check_compression(text, names, bound=5):
    body = parse_template(text)
    comp = compress(body)
    assert len(occurrences(comp)) == 1
    for subset in all_subsets(6):
        f, g = interpret(body, subset), interpret(comp, subset)
        for vals in itertools.product(range(bound + 1), repeat=len(names)):
            env = dict(zip(names, vals))
            a, b = eval_bounded(f, env, B), eval_bounded(g, env, B)
            assert not a.is_unknown and not b.is_unknown
            assert a.value == b.value, (subset, env)


def test_compress_two_occurrences():
    check_compression("R(x) & R(y)", ["x", "y"])


def test_compress_negative_occurrence():
    check_compression("~R(x + 1) | R(x)", ["x"])


def test_compress_bound_arguments_prenexes():
    check_compression("E v. v <= x & R(v) & ~R(v + 1)", ["x"])


def test_compress_single_occurrence_is_a_wrapper():
    comp = compress(parse_template("R(x)"))
    assert len(occurrences(comp)) == 1
    assert free_vars(comp) == {"x"}


def test_compress_rejects_nothing_to_do():
    with pytest.raises(ValueError):
        compress(parse("x = 0"))


def test_template_validation():
    with pytest.raises(ValueError):
        Template(("x",), parse("x = 0"), parse_template("R(x, x)"))
    with pytest.raises(ValueError):
        Template(("x",), parse_template("R(x)"), parse_template("R(x)"))
    with pytest.raises(ValueError):
        Template(("x",), parse("x = 0"), parse("x = 1"))


def test_flags_are_two_valued():
    comp = compress(parse_template("R(x) & R(y) & ~R(z)"))
    for e in ("e1", "e2", "e3"):
        assert Or(Eq(Var(e), numeral(0)), Eq(Var(e), numeral(1))) in set(subformulas(comp))


def test_prenex_keeps_meaning():
    f = parse("(E y. y <= x & y =_2 1) & ~(A z. z <= 2 -> z != x)")
    prefix, matrix = prenex(f)
    assert [q.__name__ for q, _ in prefix] == ["Exists", "Exists"]
    g = matrix
    for q, v in reversed(prefix):
        g = q(v, g)
    for x in range(8):
        assert eval_bounded(f, {"x": x}, B).value == eval_bounded(g, {"x": x}, B).value


def test_iterate_base_and_linear_growth():
    d = mul_definition()
    assert d.iterate(0) == parse(MUL_BASE)
    sizes = [node_count(d.iterate(n)) for n in range(11)]
    steps = {b - a for a, b in zip(sizes[1:], sizes[2:])}
    assert len(steps) == 1
    assert len(occurrences(d.compressed_body)) == 1


def test_naive_mul_has_four_copies_of_base():
    # each copy of the base carries exactly one ~(y != 0 & ...) guard
    naive = mul_definition().expand_naive(1)
    guards = [g for g in subformulas(naive) if isinstance(g, Not) and isinstance(g.arg, And)]
    assert len(guards) == 4


def test_naive_growth_at_least_four_fold():
    d = mul_definition()
    sizes = [node_count(d.expand_naive(n)) for n in range(4)]
    assert all(b >= 4 * a for a, b in zip(sizes, sizes[1:]))
    assert d.expand_naive(0) == d.template.base


def test_naive_budget():
    with pytest.raises(BudgetExceeded):
        mul_definition().expand_naive(3, node_budget=1000)


def test_small_template_compressed_matches_naive():
    t = Template.from_text("x", "x <= 1", "R(x) | R(x + 1) & x =_2 0")
    d = IteratedDefinition(t)
    for n in range(3):
        for x in range(11):
            a = eval_bounded(d.iterate(n), {"x": x}, B)
            b = eval_bounded(d.expand_naive(n), {"x": x}, B)
            assert a.value == b.value and not a.is_unknown


def test_mul_compressed_matches_naive_small_grid():
    d = mul_definition()
    f, g = d.iterate(1), d.expand_naive(1)
    for x, y, z in itertools.product(range(5), range(7), range(13)):
        env = {"x": x, "y": y, "z": z}
        a, b = eval_bounded(f, env, B), eval_bounded(g, env, B)
        assert a.value == b.value and not a.is_unknown, env


def test_plug_checks_free_variables():
    with pytest.raises(ValueError):
        plug(parse_template("R(x)"), "R", ("u",), parse("u = w"))
    out = plug(parse_template("E u. R(u + x)"), "R", ("v",), parse("E u. u + u = v"))
    assert not any(isinstance(g, Rel) for g in subformulas(out))
    assert free_vars(out) == {"x"}
