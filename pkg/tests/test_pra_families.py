"""Mul, Hyp, Div and the axiom schemata over the naturals."""

import itertools

import pytest

from presburger_speedup import parse, render, size
from presburger_speedup.grounding import decide_grounded
from presburger_speedup.logic import free_vars, node_count, numeral, substitute
from presburger_speedup.oracle import Budget, eval_bounded
from presburger_speedup.pra_families import (
    gen_div,
    gen_hyp,
    gen_induction_instance,
    gen_mul,
    gen_pra_alt_axiom,
    hyp_at,
    mul_at,
    pra_alt_axiom_nodes,
    pra_alt_axiom_symbols,
    pra_minus_axioms,
    prime_window,
)
from presburger_speedup.qe import decide

B = Budget(witness_bound=60)


def holds(f, env=None):
    v = eval_bounded(f, env or {}, B)
    assert not v.is_unknown, v.reason
    return v.value


# ------------------------------------------------------------ Mul


@pytest.mark.parametrize("a, b, c, expected", [(3, 2, 6, True), (3, 2, 5, False), (0, 2, 0, True), (7, 3, 21, False)])
def test_mul0_examples(a, b, c, expected):
    assert holds(mul_at(0, a, b, c)) is expected


@pytest.mark.parametrize("a, b, c, expected", [(3, 4, 12, True), (3, 5, 15, False), (5, 3, 15, True), (2, 4, 7, False)])
def test_mul1_examples(a, b, c, expected):
    assert holds(mul_at(1, a, b, c)) is expected


@pytest.mark.parametrize("n", [0, 1])
def test_mul_functional_below_bound(n):
    top = 2 ** (2**n)
    xs = range(7) if n == 0 else range(4)
    f = gen_mul(n)
    for x, y in itertools.product(xs, range(top + 2)):
        zs = [z for z in range(25) if holds(f, {"x": x, "y": y, "z": z})]
        assert zs == ([x * y] if y <= top else []), (x, y)


def test_mul_free_variables():
    for n in range(4):
        assert free_vars(gen_mul(n)) == {"x", "y", "z"}
    with pytest.raises(ValueError):
        gen_mul(-1)


def test_mul_linear_size():
    sizes = [node_count(gen_mul(n)) for n in range(8)]
    deltas = {b - a for a, b in zip(sizes[1:], sizes[2:])}
    assert len(deltas) == 1


def test_mul_round_trip():
    f = gen_mul(2)
    assert parse(render(f)) == f


# ------------------------------------------------------------ Hyp and Div


@pytest.mark.parametrize("k", range(5))
def test_hyp0_exact(k):
    assert decide_grounded(hyp_at(0, k)) is (k <= 2)


@pytest.mark.parametrize("k", [0, 4, 5])
def test_hyp1_exact(k):
    assert decide_grounded(hyp_at(1, k)) is (k <= 4)


def test_hyp_shape():
    f = gen_hyp(1)
    assert free_vars(f) == {"y"}
    assert parse(render(f)) == f


def test_div0_on_small_values():
    f = gen_div(0)
    assert free_vars(f) == {"x"}
    for x in range(8):
        assert decide_grounded(substitute(f, "x", numeral(x))) is True


def test_div0_universal_closure():
    from presburger_speedup.logic import Forall

    assert decide_grounded(Forall("x", gen_div(0))) is True


# ------------------------------------------------------------ axioms


def test_pra_alt_axiom_p2():
    assert gen_pra_alt_axiom(2) == parse("A x. (x =_2 0 | x =_2 1)")
    assert decide(gen_pra_alt_axiom(2)) is True


def test_pra_alt_axiom_p3_symbols():
    assert size(gen_pra_alt_axiom(3)).paper_symbols == 71


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13, 31, 97])
def test_pra_alt_axiom_analytic_size(p):
    s = size(gen_pra_alt_axiom(p))
    assert s.paper_symbols == pra_alt_axiom_symbols(p)
    assert s.node_count == pra_alt_axiom_nodes(p)


@pytest.mark.parametrize("p", [0, 1, 4, 9, 91])
def test_pra_alt_axiom_rejects_composites(p):
    with pytest.raises(ValueError):
        gen_pra_alt_axiom(p)


def test_pra_minus_axioms_are_true():
    axioms = pra_minus_axioms()
    assert len(axioms) == 7
    assert all(not free_vars(a) for a in axioms)
    assert all(decide(a) is True for a in axioms)


@pytest.mark.parametrize("phi", ["x = x", "x =_2 0 | x =_2 1", "x + y = y + x"])
def test_induction_instances_are_true(phi):
    inst = gen_induction_instance(parse(phi), "x")
    assert not free_vars(inst)
    assert decide(inst) is True


def test_induction_instance_with_false_conclusion_still_true():
    # phi(0) fails, so the implication holds vacuously
    assert decide(gen_induction_instance(parse("x =_2 1"), "x")) is True


def test_induction_needs_free_variable():
    with pytest.raises(ValueError):
        gen_induction_instance(parse("y = 0"), "x")


def test_prime_window_values():
    got = [prime_window(n) for n in range(1, 7)]
    assert got == [3, 11, 131, 32771, 2147483659, 9223372036854775837]
    for n, k in enumerate(got, start=1):
        assert 2 ** (2**n - 1) < k < 2 ** (2**n)


@pytest.mark.parametrize("n", [0, 7])
def test_prime_window_range(n):
    with pytest.raises(ValueError):
        prime_window(n)
