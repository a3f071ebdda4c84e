"""The nonstandard models M_p."""

import itertools
import random
from fractions import Fraction

import pytest

from presburger_speedup import parse
from presburger_speedup.logic import And, Or
from presburger_speedup.mp_model import (
    Mp,
    Nat,
    Poly,
    RestrictedRational,
    check_residue_axiom,
    parse_elem,
)


@pytest.fixture
def m5():
    return Mp(5)


def elements(model, k=25, seed=0):
    rng = random.Random(seed)
    return [Nat(0), Nat(1), Nat(7), model.X] + [model.sample(rng) for _ in range(k)]


def test_restricted_rational():
    r = RestrictedRational.of(Fraction(5, 12), 5)
    assert r.factors == ((2, 2), (3, 1)) and r.denominator == 12
    assert r.value == Fraction(5, 12)
    assert str(r) == "5/2^2*3"
    with pytest.raises(ValueError):
        RestrictedRational.of(Fraction(1, 5), 5)
    with pytest.raises(ValueError):
        RestrictedRational.of(0, 5)


def test_constructors(m5):
    assert str(m5.poly(Fraction(1, 3), -4)) == "1/3 X - 4"
    assert str(m5.X) == "X"
    with pytest.raises(ValueError):
        Nat(-1)
    with pytest.raises(ValueError):
        Mp(6)


@pytest.mark.parametrize(
    "p, text, m, expected",
    [(5, "X", 3, 0), (5, "X", 5, None), (5, "7", 3, 1), (5, "1/3 X + 1", 3, 1), (7, "1/2*3 X", 2, 0), (3, "X - 4", 2, 0)],
)
def test_residue_examples(p, text, m, expected):
    model = Mp(p)
    assert model.divisible_with_remainder(parse_elem(text, model), m) == expected


def test_parse_elem(m5):
    assert parse_elem("12", m5) == Nat(12)
    assert parse_elem("1/3^2*2 X + 4", m5) == m5.poly(Fraction(1, 18), 4)
    assert parse_elem("X - 2", m5) == m5.poly(1, -2)
    with pytest.raises(ValueError):
        parse_elem("1/5 X", m5)
    with pytest.raises(ValueError):
        parse_elem("Y + 1", m5)


def test_order_examples(m5):
    x = m5.X
    assert m5.leq(Nat(10**6), x)
    assert not m5.leq(x, Nat(10**6))
    assert m5.leq(m5.poly(1, -3), x)
    assert m5.leq(x, m5.poly(Fraction(3, 2), -100))
    assert m5.difference(x, Nat(3)) == m5.poly(1, -3)


@pytest.mark.parametrize(
    "axiom",
    [
        "x + (y + z) = (x + y) + z",
        "x + y = y + x",
        "x + 0 = x",
        "~(x + z = y + z) | x = y",
        "x + 1 != 0",
        "x <= y | y <= x",
        "~(x <= y) | ~(y <= x) | x = y",
        "~(x <= y) | ~(y <= z) | x <= z",
        "~(x <= y) | x + z <= y + z",
    ],
)
def test_pra_minus_laws_on_samples(axiom, m5):
    f = parse(axiom)
    lits = _literals(f)
    for x, y, z in itertools.product(elements(m5, 6), repeat=3):
        env = {"x": x, "y": y, "z": z}
        vals = {lit: m5.eval_literal(lit, env) for lit in lits}
        assert _eval_with(f, vals), env


def _literals(f):
    if isinstance(f, (And, Or)):
        return _literals(f.left) + _literals(f.right)
    return [f]


def _eval_with(f, vals):
    if isinstance(f, And):
        return _eval_with(f.left, vals) and _eval_with(f.right, vals)
    if isinstance(f, Or):
        return _eval_with(f.left, vals) or _eval_with(f.right, vals)
    return vals[f]


def test_predecessor_axiom(m5):
    for x in elements(m5, 40):
        if x != Nat(0):
            y = m5.difference(x, Nat(1))
            assert y is not None and m5.add(y, Nat(1)) == x


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_residue_axiom_below_p_holds(p):
    for m in (q for q in (2, 3, 5, 7) if q < p):
        res = check_residue_axiom(p, m, 80, seed=p)
        assert res.holds and res.complete == res.samples


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_residue_axiom_fails_at_p(p):
    res = check_residue_axiom(p, p, 80, seed=p)
    assert not res.holds
    assert Mp(p).X in res.missing


def test_solve_linear_is_sound(m5):
    for m in (1, 2, 3, 4, 6):
        for s, t in itertools.product(elements(m5, 12, seed=1), repeat=2):
            z = m5.solve_linear(m, s, t)
            if z is not None:
                assert m5.add(m5.times(m, z), s) == t


def test_times_and_mod_literals(m5):
    x = m5.X
    assert m5.times(3, m5.poly(Fraction(1, 3))) == x
    assert m5.eval_literal(parse("x =_3 0"), {"x": x})
    assert not m5.eval_literal(parse("x =_5 0"), {"x": x})
    assert m5.eval_literal(parse("~(2*x <= x)"), {"x": x})
    with pytest.raises(ValueError):
        m5.eval_literal(parse("E y. y = x"), {"x": x})


def test_poly_str_and_type():
    m = Mp(7)
    e = m.poly(Fraction(2, 9), 5)
    assert isinstance(e, Poly) and str(e) == "2/3^2 X + 5"
