"""Pow, Hyp and Root over the reals, and the field axiom schemata."""

import itertools
from fractions import Fraction

import pytest

from presburger_speedup import parse, render, size
from presburger_speedup.logic import Forall, Implies, free_vars, node_count
from presburger_speedup.rcf_families import (
    RATIONAL_GRID,
    eval_rcf_qf,
    gen_hyp_rcf,
    gen_lub_instance,
    gen_odd_degree_axiom,
    gen_pow,
    gen_rcf_axiom,
    gen_root,
    gen_sqrt_axiom,
    handle_count,
    hyp_rcf_conjuncts,
    pow0_holds,
    root_template,
)

XS = RATIONAL_GRID


@pytest.mark.parametrize("x, y", list(itertools.product(XS, [0, 1, 2])))
def test_pow0_grid(x, y):
    assert pow0_holds(x, y, x**y)
    assert not pow0_holds(x, y, x**y + 1)


@pytest.mark.parametrize("y", [Fraction(3), Fraction(1, 2), Fraction(-1)])
def test_pow0_false_outside_range(y):
    for x, z in itertools.product(XS, XS):
        assert not pow0_holds(x, y, z)


def test_pow0_examples():
    assert pow0_holds(3, 2, 9)
    assert not any(pow0_holds(3, 3, z) for z in range(30))


@pytest.mark.parametrize("make", [gen_pow, gen_hyp_rcf, gen_root])
def test_linear_growth(make):
    sizes = [node_count(make(n)) for n in range(7)]
    deltas = [b - a for a, b in zip(sizes, sizes[1:])]
    assert len(set(deltas[1:])) == 1
    assert all(d > 0 for d in deltas)


def test_naive_pow_blows_up():
    sizes = [node_count(gen_pow(n, compressed=False)) for n in range(3)]
    assert sizes[0] == node_count(gen_pow(0))
    assert all(b > 4 * a for a, b in zip(sizes, sizes[1:]))


@pytest.mark.parametrize("make", [gen_pow, gen_hyp_rcf, gen_root])
def test_round_trip(make):
    for n in range(3):
        f = make(n)
        assert parse(render(f), rcf=True) == f


def test_free_variables():
    assert free_vars(gen_pow(2)) == {"x", "y", "z"}
    assert free_vars(gen_hyp_rcf(2)) == {"y"}
    assert free_vars(gen_root(2)) == set()


def test_hyp_conjunct_shapes():
    first, second, third = hyp_rcf_conjuncts(0)
    assert render(first) == (
        "E x. E z. (1 <= x & 1 != x) & ((y = 0 -> z = 1) & (y = 1 -> z = x) & (y = 1 + 1 -> z = x * x)"
        " & ~(y != 0 & y != 1 & y != 1 + 1)) & z <= 1 + 1"
    )
    assert isinstance(second, Forall) and isinstance(third, Forall)


def test_root_template_has_two_handles():
    assert handle_count(root_template()) == 2
    assert handle_count(gen_root(0)) == 0


def test_root0_size():
    s = size(gen_root(0), rcf=True)
    assert (s.node_count, s.paper_symbols) == (385, 487)


def test_sqrt_axiom():
    f = gen_sqrt_axiom()
    assert render(f) == "A z. 0 <= z -> (E x. x * x = z)"
    assert gen_rcf_axiom("sqrt") == f


def test_odd_degree_axiom():
    assert render(gen_odd_degree_axiom(1)) == "A a0. E x. x + a0 = 0"
    assert render(gen_odd_degree_axiom(3)) == "A a0. A a1. A a2. E x. x * x * x + a2 * (x * x) + a1 * x + a0 = 0"
    got = [size(gen_odd_degree_axiom(m), rcf=True).paper_symbols for m in (1, 3, 5, 7, 9)]
    assert got == [9, 27, 53, 87, 129]
    assert gen_rcf_axiom("odd", 5) == gen_odd_degree_axiom(5)


@pytest.mark.parametrize("m", [0, 2, 4, -1])
def test_odd_degree_rejects_even(m):
    with pytest.raises(ValueError):
        gen_odd_degree_axiom(m)


def test_rcf_axiom_kind_errors():
    with pytest.raises(ValueError):
        gen_rcf_axiom("odd")
    with pytest.raises(ValueError):
        gen_rcf_axiom("lub")


def test_lub_instance_shape():
    phi = parse("x * x <= 1 + 1", rcf=True)
    f = gen_lub_instance(phi, "x")
    assert render(f) == (
        "(E d. d * d <= 1 + 1) & (E b. A x. x * x <= 1 + 1 -> x <= b)"
        " -> (E c. (A x. x * x <= 1 + 1 -> x <= c) & (A b. (A x. x * x <= 1 + 1 -> x <= b) -> c <= b))"
    )
    assert isinstance(f, Implies) and not free_vars(f)


def test_lub_instance_avoids_clashes():
    phi = parse("x <= b + c & d <= x", rcf=True)
    f = gen_lub_instance(phi, "x")
    assert free_vars(f) == {"b", "c", "d"}
    assert parse(render(f), rcf=True) == f
    with pytest.raises(ValueError):
        gen_lub_instance(phi, "y")


def test_eval_rcf_qf_rejects_quantifiers():
    with pytest.raises(ValueError):
        eval_rcf_qf(gen_sqrt_axiom(), {})
