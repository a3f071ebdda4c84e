"""Grounding of finitely bounded quantifiers."""

import pytest

from presburger_speedup import parse
from presburger_speedup.grounding import Grounder, decide_grounded, ground
from presburger_speedup.logic import free_vars, is_quantifier_free
from presburger_speedup.oracle import Budget, equiv_on_grid
from presburger_speedup.pra_families import gen_mul
from presburger_speedup.qe import decide

B = Budget(witness_bound=30)


def test_one_point_rule():
    assert ground(parse("E v. v = x + 1 & v <= y")) == parse("x + 1 <= y")


def test_finite_candidates_become_disjunction():
    f = parse("E e. (e = 0 | e = 1) & (e = 1 -> x = 3)")
    g = ground(f)
    assert is_quantifier_free(g)
    assert equiv_on_grid(f, g, ["x"], 8, B)


def test_guard_instances_become_conjunction():
    f = parse("A u. A f. (u = x & f = 1 | u = y & f = 0) -> (f = 1 <-> u <= 3)")
    gr = Grounder()
    g = gr.ground(f)
    assert gr.expanded == 1
    assert is_quantifier_free(g)
    assert equiv_on_grid(f, g, ["x", "y"], 7, B)


def test_unbounded_quantifier_is_left_for_qe():
    f = parse("E x. x + x = y")
    g = ground(f)
    assert free_vars(g) == {"y"}
    assert equiv_on_grid(f, g, ["y"], 10, B)


def test_mul1_grounds_to_quantifier_free():
    g = ground(gen_mul(1))
    assert is_quantifier_free(g)
    assert free_vars(g) == {"x", "y", "z"}


def test_mul1_grounded_matches_oracle():
    f = gen_mul(1)
    g = ground(f)
    assert equiv_on_grid(f, g, ["x", "y", "z"], 5, Budget(witness_bound=10))


@pytest.mark.parametrize(
    "text, value",
    [("A x. E y. x = y + y | x = y + y + 1", True), ("E x. (x = 2 | x = 5) & x =_2 1", True), ("E x. x + x = 1", False)],
)
def test_decide_grounded_agrees_with_decide(text, value):
    f = parse(text)
    assert decide_grounded(f) is value is decide(f)


def test_decide_grounded_rejects_open_formula():
    with pytest.raises(ValueError):
        decide_grounded(parse("x = 0"))
