"""Bounded brute-force semantics over the naturals.

This is the test oracle.  It is deliberately not a decision procedure:
a quantifier whose range cannot be cut down to a finite set is searched
on 0..witness_bound, and when that search is inconclusive the verdict
is Unknown.  A verdict of True or False is always exact.

Ways a search becomes exhaustive (all of them sound):

* guard-aware candidate inference (``Budget.guard_aware``): facts the
  body entails about the quantified variable, such as ``x <= t``, a
  solved equation, or an equality guard ``u = t -> ...`` under a
  universal prefix, restrict it to finitely many values;
* the closed-literal shortcut: when each literal mentioning the variable
  is settled for every value by the literal rules (``0 <= t``,
  ``t+1 = 0`` false, ``t+1 <= 0`` false), the body is constant;
* periodicity certificates (``Budget.certify``): a quantifier-free body
  in one unknown is constant-then-periodic beyond an explicit threshold,
  so scanning one period past the threshold settles it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import lcm
from typing import Iterable, Mapping

from .logic import (
    ZERO,
    Add,
    And,
    BudgetExceeded,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Le,
    LinearTerm,
    Mod,
    Mul,
    Not,
    Or,
    Rel,
    Scale,
    Term,
    Var,
    atom_terms,
    eval_term,
    flatten,
    free_vars,
    is_quantifier_free,
    linearize,
    nnf,
    substitute_many,
    subformulas,
    term_vars,
    closed_literal_rules,
)


@dataclass(frozen=True)
class Verdict:
    """True, False, or Unknown with the reason the search gave up."""

    value: bool | None
    reason: str = ""

    @property
    def is_true(self) -> bool:
        return self.value is True

    @property
    def is_false(self) -> bool:
        return self.value is False

    @property
    def is_unknown(self) -> bool:
        return self.value is None

    def negate(self) -> Verdict:
        if self.value is None:
            return self
        return TRUE if self.value is False else FALSE

    def __str__(self) -> str:
        if self.value is None:
            return f"Unknown({self.reason})"
        return "True" if self.value else "False"


TRUE = Verdict(True)
FALSE = Verdict(False)


def unknown(reason: str) -> Verdict:
    return Verdict(None, reason)


def _verdict(b: bool) -> Verdict:
    return TRUE if b else FALSE


@dataclass(frozen=True)
class Budget:
    witness_bound: int = 60
    guard_aware: bool = True
    node_budget: int = 50_000_000
    certify: bool = False

    def __post_init__(self) -> None:
        if self.witness_bound < 1:
            raise ValueError("witness_bound must be >= 1")


# ------------------------------------------------------------ term helpers


@lru_cache(maxsize=200_000)
def _lin(t: Term) -> LinearTerm | None:
    try:
        return linearize(t)
    except ValueError:
        return None


def _value(t: Term, env: Mapping[str, int]) -> int:
    lin = _lin(t)
    if lin is None:
        return eval_term(t, env)
    v = lin.constant
    for name, c in lin.coeffs:
        v += c * env[name]
    return v


def _partial(t: Term, known: Mapping[str, int]) -> tuple[dict[str, int], int] | None:
    """Linear form of t over the unknown variables, or None if nonlinear in them."""
    lin = _lin(t)
    if lin is not None:
        coeffs: dict[str, int] = {}
        c = lin.constant
        for name, k in lin.coeffs:
            if name in known:
                c += k * known[name]
            else:
                coeffs[name] = k
        return coeffs, c
    match t:
        case Add(l, r):
            pl, pr = _partial(l, known), _partial(r, known)
            if pl is None or pr is None:
                return None
            d = dict(pl[0])
            for n, k in pr[0].items():
                d[n] = d.get(n, 0) + k
            return d, pl[1] + pr[1]
        case Scale(k, s):
            ps = _partial(s, known)
            if ps is None:
                return None
            return {n: k * c for n, c in ps[0].items()}, k * ps[1]
        case Mul(l, r):
            pl, pr = _partial(l, known), _partial(r, known)
            if pl is None or pr is None:
                return None
            if not pl[0]:
                return {n: pl[1] * c for n, c in pr[0].items() if pl[1] * c}, pl[1] * pr[1]
            if not pr[0]:
                return {n: pr[1] * c for n, c in pl[0].items() if pr[1] * c}, pl[1] * pr[1]
            return None
    raise TypeError(f"not a term: {t!r}")


def eval_atom(f: Formula, env: Mapping[str, int]) -> bool:
    match f:
        case Eq(l, r):
            return _value(l, env) == _value(r, env)
        case Le(l, r):
            return _value(l, env) <= _value(r, env)
        case Mod(m, l, r):
            return (_value(l, env) - _value(r, env)) % m == 0
    raise TypeError(f"cannot evaluate {f!r}")


# ------------------------------------------------- closed literal rules


def eval_closed_qf(f: Formula) -> bool:
    """Exact truth of a closed quantifier-free formula."""
    if free_vars(f):
        raise ValueError(f"formula has free variables {sorted(free_vars(f))}")
    if not is_quantifier_free(f):
        raise ValueError("formula is not quantifier-free")
    return _eval_closed(f)


def _eval_closed(f: Formula) -> bool:
    match f:
        case Eq() | Le() | Mod():
            return closed_literal_rules(f)[0]
        case Not(a):
            return not _eval_closed(a)
        case And(l, r):
            return _eval_closed(l) and _eval_closed(r)
        case Or(l, r):
            return _eval_closed(l) or _eval_closed(r)
        case Implies(l, r):
            return (not _eval_closed(l)) or _eval_closed(r)
        case Iff(l, r):
            return _eval_closed(l) == _eval_closed(r)
    raise TypeError(f"cannot evaluate {f!r}")


# ------------------------------------------------- compiled QF formulas

_MAX_NESTING = 80


def _term_src(t: Term) -> str:
    lin = _lin(t)
    if lin is not None:
        parts = [f"{c}*e[{v!r}]" if c != 1 else f"e[{v!r}]" for v, c in lin.coeffs]
        if lin.constant or not parts:
            parts.append(str(lin.constant))
        return "(" + "+".join(parts) + ")"
    match t:
        case Add(l, r):
            return f"({_term_src(l)}+{_term_src(r)})"
        case Scale(k, s):
            return f"({k}*{_term_src(s)})"
        case Mul(l, r):
            return f"({_term_src(l)}*{_term_src(r)})"
    raise TypeError(f"not a term: {t!r}")


def _formula_src(f: Formula, depth: int) -> str:
    if depth > _MAX_NESTING:
        raise RecursionError
    match f:
        case Eq(l, r):
            return f"({_term_src(l)}=={_term_src(r)})"
        case Le(l, r):
            return f"({_term_src(l)}<={_term_src(r)})"
        case Mod(m, l, r):
            return f"(({_term_src(l)}-{_term_src(r)})%{m}==0)"
        case Not(a):
            return f"(not {_formula_src(a, depth + 1)})"
        case And() | Or():
            op = " and " if isinstance(f, And) else " or "
            return "(" + op.join(_formula_src(g, depth + 1) for g in flatten(f, type(f))) + ")"
        case Implies(l, r):
            return f"((not {_formula_src(l, depth + 1)}) or {_formula_src(r, depth + 1)})"
        case Iff(l, r):
            return f"({_formula_src(l, depth + 1)}=={_formula_src(r, depth + 1)})"
    raise TypeError(f"cannot compile {f!r}")


@lru_cache(maxsize=50_000)
def _compiled(f: Formula):
    """A Python function evaluating a QF formula, or None if unsuitable."""
    if any(isinstance(g, Rel) for g in subformulas(f)):
        return None
    try:
        src = _formula_src(f, 0)
        return eval(compile(f"lambda e: {src}", "<formula>", "eval"), {})
    except (RecursionError, SyntaxError, MemoryError):
        return None


# ------------------------------------------------------------ evaluator

_Cands = frozenset | range | None
_EMPTY: frozenset = frozenset()


def _intersect(a: _Cands, b: _Cands) -> _Cands:
    if a is None:
        return b
    if b is None:
        return a
    if isinstance(a, range) and isinstance(b, range):
        return range(max(a.start, b.start), max(max(a.start, b.start), min(a.stop, b.stop)))
    if isinstance(a, range):
        a, b = b, a
    return frozenset(x for x in a if x in b)


def _union(a: _Cands, b: _Cands) -> _Cands:
    if a is None or b is None:
        return None
    if isinstance(a, range) and isinstance(b, range) and a.start == b.start == 0:
        return a if len(a) >= len(b) else b
    return frozenset(a) | frozenset(b)


class Evaluator:
    """Three-valued evaluation of formulas over the naturals."""

    def __init__(self, budget: Budget | None = None):
        self.budget = budget or Budget()
        self.steps = 0

    def _tick(self) -> None:
        self.steps += 1
        if self.steps > self.budget.node_budget:
            raise BudgetExceeded(f"oracle exceeded {self.budget.node_budget} evaluation steps")

    def eval(self, f: Formula, env: Mapping[str, int]) -> Verdict:
        self._tick()
        if not isinstance(f, (Exists, Forall)) and is_quantifier_free(f):
            fn = _compiled(f)
            if fn is not None:
                try:
                    return _verdict(fn(env))
                except KeyError as e:
                    raise ValueError(f"unbound variable {e.args[0]}") from None
        match f:
            case Eq() | Le() | Mod():
                try:
                    return _verdict(eval_atom(f, env))
                except KeyError as e:
                    raise ValueError(f"unbound variable {e.args[0]}") from None
            case Rel(name, _):
                raise ValueError(f"uninterpreted relation {name}")
            case Not(a):
                return self.eval(a, env).negate()
            case And(l, r):
                a = self.eval(l, env)
                if a.is_false:
                    return FALSE
                b = self.eval(r, env)
                if b.is_false:
                    return FALSE
                return TRUE if a.is_true and b.is_true else unknown(a.reason or b.reason)
            case Or(l, r):
                a = self.eval(l, env)
                if a.is_true:
                    return TRUE
                b = self.eval(r, env)
                if b.is_true:
                    return TRUE
                return FALSE if a.is_false and b.is_false else unknown(a.reason or b.reason)
            case Implies(l, r):
                a = self.eval(l, env)
                if a.is_false:
                    return TRUE
                b = self.eval(r, env)
                if b.is_true:
                    return TRUE
                return FALSE if a.is_true and b.is_false else unknown(a.reason or b.reason)
            case Iff(l, r):
                a = self.eval(l, env)
                b = self.eval(r, env)
                if a.is_unknown or b.is_unknown:
                    return unknown(a.reason or b.reason)
                return _verdict(a.value == b.value)
            case Exists() | Forall():
                names, body = _block(f)
                if isinstance(f, Exists):
                    return self._search(names, body, dict(env), "witness")
                return self._search(names, _negated(body), dict(env), "counterexample").negate()
        raise TypeError(f"not a formula: {f!r}")

    # -- quantifier blocks

    def _search(self, remaining: tuple[str, ...], body: Formula, env: dict[str, int], what: str) -> Verdict:
        """Does some assignment of `remaining` make body true (given env)?"""
        if not remaining:
            return self.eval(body, env)
        known = {k: v for k, v in env.items() if k not in remaining}
        choice: tuple[str, _Cands] | None = None
        if self.budget.guard_aware:
            for v in remaining:
                c = self._candidates(body, v, known)
                if c is not None and (choice is None or len(c) < len(choice[1])):
                    choice = (v, c)
                    if len(c) <= 1:
                        break
        bound = self.budget.witness_bound
        if choice is None:
            v, cands, exact = remaining[0], range(bound + 1), False
        else:
            v, cands, exact = choice[0], choice[1], True
        rest = tuple(n for n in remaining if n != v)
        reason = ""
        for val in sorted(cands) if not isinstance(cands, range) else cands:
            env[v] = val
            r = self._search(rest, body, env, what)
            if r.is_true:
                del env[v]
                return TRUE
            if r.is_unknown:
                reason = reason or r.reason
        env.pop(v, None)
        if exact:
            return unknown(reason) if reason else FALSE
        if len(remaining) == 1 and is_quantifier_free(body):
            settled = self._literal_shortcut(body, v, known)
            if settled is not None:
                return settled
            if self.budget.certify:
                certified = self._certify(body, v, known)
                if certified is not None:
                    return certified
        return unknown(reason or f"no {what} for {v} in 0..{bound}")

    def _literal_shortcut(self, body: Formula, v: str, known: Mapping[str, int]) -> Verdict | None:
        """Kleene evaluation with v unknown; literals on v settled only by rules 2, 3, 5, 6."""

        def lit(a: Formula) -> bool | None:
            if v not in free_vars(a):
                return eval_atom(a, known)
            match a:
                case Le(l, r):
                    if l == ZERO:
                        return True
                    lr, ll = _lin(r), _lin(l)
                    if r == ZERO and ll is not None and ll.constant >= 1:
                        return False
                case Eq(l, r):
                    ll, lr = _lin(l), _lin(r)
                    if ll is not None and lr is not None:
                        if (l == ZERO and lr.constant >= 1) or (r == ZERO and ll.constant >= 1):
                            return False
            return None

        def go(g: Formula) -> bool | None:
            match g:
                case Eq() | Le() | Mod():
                    return lit(g)
                case Not(a):
                    x = go(a)
                    return None if x is None else not x
                case And(l, r):
                    a, b = go(l), go(r)
                    if a is False or b is False:
                        return False
                    return True if a and b else None
                case Or(l, r):
                    a, b = go(l), go(r)
                    if a is True or b is True:
                        return True
                    return False if a is False and b is False else None
                case Implies(l, r):
                    a, b = go(l), go(r)
                    if a is False or b is True:
                        return True
                    return False if a is True and b is False else None
                case Iff(l, r):
                    a, b = go(l), go(r)
                    return None if a is None or b is None else a == b
            return None

        try:
            out = go(body)
        except (KeyError, TypeError):
            return None
        return None if out is None else _verdict(out)

    def _certify(self, body: Formula, v: str, known: Mapping[str, int]) -> Verdict | None:
        """Exact answer for a QF body in one unknown via eventual periodicity.

        Each literal a*v + s REL b*v + u is constant in v once v exceeds
        |u - s| (Eq, Le), and =_m literals have period m, so the body's
        truth is periodic with period lcm(m) from threshold max|u-s|+1 on.
        """
        threshold, period = 0, 1
        for g in subformulas(body):
            if isinstance(g, Rel):
                return None
            if not isinstance(g, (Eq, Le, Mod)):
                continue
            l, r = atom_terms(g)
            pl, pr = _partial(l, known), _partial(r, known)
            if pl is None or pr is None or set(pl[0]) - {v} or set(pr[0]) - {v}:
                return None
            if isinstance(g, Mod):
                period = lcm(period, g.m)
            else:
                threshold = max(threshold, abs(pr[1] - pl[1]) + 1)
        env = dict(known)
        start = self.budget.witness_bound + 1
        for val in range(start, threshold + period):
            env[v] = val
            if self.eval(body, env).is_true:
                return TRUE
        return FALSE

    # -- candidate inference

    def _candidates(self, f: Formula, v: str, known: Mapping[str, int]) -> _Cands:
        """Finite superset of the values of v under which f can hold, or None."""
        if v not in free_vars(f):
            return None
        match f:
            case Eq() | Le():
                return self._atom_candidates(f, v, known)
            case Not(Le()):
                return self._candidates(nnf(f), v, known)
            case Not(And() | Or() | Implies() | Iff() | Not()):
                return self._candidates(_negated(f.arg), v, known)
            case And():
                return self._and_candidates(flatten(f, And), v, known)
            case Or():
                out: _Cands = _EMPTY
                for d in flatten(f, Or):
                    if self._known_qf(d, known):
                        if self.eval(d, known).is_true:
                            return None
                        continue
                    out = _union(out, self._candidates(d, v, known))
                    if out is None:
                        return None
                return out
            case Implies(a, b):
                if self._known_qf(a, known):
                    return self._candidates(b, v, known) if self.eval(a, known).is_true else None
                return None
            case Iff(a, b):
                for x, y in ((a, b), (b, a)):
                    if self._known_qf(x, known):
                        if self.eval(x, known).is_true:
                            return self._candidates(y, v, known)
                        return self._candidates(nnf(Not(y)), v, known)
                return None
            case Exists(w, b):
                if w == v:
                    return None
                inner = {k: x for k, x in known.items() if k != w}
                return self._candidates(b, v, inner)
            case Forall():
                names, body = _block(f)
                if v in names:
                    return None
                inner = {k: x for k, x in known.items() if k not in names}
                out = self._candidates(body, v, inner)
                for inst in _guard_instances(names, body):
                    out = _intersect(out, self._candidates(inst, v, inner))
                return out
        return None

    def _known_qf(self, f: Formula, known: Mapping[str, int]) -> bool:
        return free_vars(f) <= known.keys() and is_quantifier_free(f) and not any(
            isinstance(g, Rel) for g in subformulas(f)
        )

    def _atom_candidates(self, f: Formula, v: str, known: Mapping[str, int]) -> _Cands:
        l, r = atom_terms(f)
        pl, pr = _partial(l, known), _partial(r, known)
        if pl is None or pr is None:
            return None
        (dl, cl), (dr, cr) = pl, pr
        if dl.get(v) and dr.get(v):
            # no cancellation here: that is the decision procedure's business
            return None
        net = dl.get(v, 0) - dr.get(v, 0)
        others_l = any(n != v for n in dl)
        others_r = any(n != v for n in dr)
        if isinstance(f, Eq):
            if not others_l and not others_r:
                if net == 0:
                    return None if cl == cr else _EMPTY
                q, rem = divmod(cr - cl, net)
                return frozenset((q,)) if rem == 0 and q >= 0 else _EMPTY
            if net > 0 and not others_r:
                return range(0, max(0, (cr - cl) // net + 1))
            if net < 0 and not others_l:
                return range(0, max(0, (cl - cr) // (-net) + 1))
            return None
        # Le: net*v + (rest of left) <= right
        if net > 0 and not others_r:
            return range(0, max(0, (cr - cl) // net + 1))
        return None

    def _and_candidates(self, parts: list[Formula], v: str, known: Mapping[str, int]) -> _Cands:
        local = dict(known)
        changed = True
        while changed:
            changed = False
            for p in parts:
                if not isinstance(p, (Eq, Le, Mod, Not)) or not is_quantifier_free(p):
                    continue
                fv = free_vars(p)
                if any(isinstance(g, Rel) for g in subformulas(p)):
                    continue
                if fv <= local.keys():
                    if not self.eval(p, local).is_true:
                        return _EMPTY
                    continue
                if isinstance(p, Eq):
                    unknowns = fv - local.keys()
                    if len(unknowns) == 1:
                        (w,) = unknowns
                        c = self._atom_candidates(p, w, local)
                        if isinstance(c, frozenset) and len(c) <= 1:
                            if not c:
                                return _EMPTY
                            local[w] = next(iter(c))
                            changed = True
        if v in local:
            return frozenset((local[v],))
        out: _Cands = None
        for p in parts:
            out = _intersect(out, self._candidates(p, v, local))
            if out is not None and len(out) == 0:
                return _EMPTY
        return out


def _block(f: Formula) -> tuple[tuple[str, ...], Formula]:
    kind = type(f)
    names: list[str] = []
    while isinstance(f, kind):
        if f.var in names:
            # an inner rebinding shadows the outer one; stop the block here
            break
        names.append(f.var)
        f = f.body
    return tuple(names), f


@lru_cache(maxsize=20_000)
def _negated(f: Formula) -> Formula:
    return nnf(Not(f))


@lru_cache(maxsize=20_000)
def _guard_instances(names: tuple[str, ...], body: Formula) -> tuple[Formula, ...]:
    """Instances of a universal block `A names. guard -> C` at each guard solution.

    Only applies when every disjunct of the guard is a conjunction of
    equations pinning each name exactly once to a term free of the names;
    then the block is equivalent to the conjunction of the instances.
    """
    if not isinstance(body, Implies):
        return ()
    guard, conclusion = body.left, body.right
    out: list[Formula] = []
    for d in flatten(guard, Or):
        pins: dict[str, Term] = {}
        for c in flatten(d, And):
            if not isinstance(c, Eq):
                return ()
            for a, b in ((c.left, c.right), (c.right, c.left)):
                if isinstance(a, Var) and a.name in names and a.name not in pins and not (term_vars(b) & set(names)):
                    pins[a.name] = b
                    break
            else:
                return ()
        if set(pins) != set(names):
            return ()
        out.append(substitute_many(conclusion, pins))
    return tuple(out)


def eval_bounded(f: Formula, env: Mapping[str, int], b: Budget | None = None) -> Verdict:
    missing = free_vars(f) - env.keys()
    if missing:
        raise ValueError(f"unbound variables {sorted(missing)}")
    return Evaluator(b).eval(f, env)


@dataclass
class GridReport:
    """Outcome of comparing two formulas on every grid point."""

    points: int = 0
    disagreements: list[dict[str, int]] = field(default_factory=list)
    unknowns: list[tuple[dict[str, int], str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements and not self.unknowns


def grid_report(
    f: Formula,
    g: Formula,
    variables: Iterable[str],
    value_bound: int,
    b: Budget | None = None,
) -> GridReport:
    variables = list(variables)
    missing = (free_vars(f) | free_vars(g)) - set(variables)
    if missing:
        raise ValueError(f"variables {sorted(missing)} not on the grid")
    ev = Evaluator(b)
    rep = GridReport()
    for values in itertools.product(range(value_bound + 1), repeat=len(variables)):
        env = dict(zip(variables, values))
        rep.points += 1
        a, c = ev.eval(f, env), ev.eval(g, env)
        if a.is_unknown or c.is_unknown:
            which = "left" if a.is_unknown else "right"
            rep.unknowns.append((env, which, a.reason or c.reason))
        elif a.value != c.value:
            rep.disagreements.append(env)
    return rep


def equiv_on_grid(
    f: Formula,
    g: Formula,
    variables: Iterable[str],
    value_bound: int,
    b: Budget | None = None,
) -> bool:
    return grid_report(f, g, variables, value_bound, b).ok
