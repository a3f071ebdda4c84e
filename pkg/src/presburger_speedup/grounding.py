"""Exact decisions by grounding bounded quantifiers, then QE.

Formulas built by Solovay compression carry many quantifiers whose range
is finite for syntactic reasons: two-valued flags, lookup blocks
``A u. (u = t1 | ... | u = tk) -> C`` and variables that the body pins
to a few values.  Cooper elimination on such formulas blows up, while
the bounded oracle cannot settle their unbounded quantifiers.  Grounding
rewrites every such quantifier into a finite conjunction or disjunction,
each rewrite an equivalence over the naturals:

* ``A u. guard -> C`` with an equational guard becomes the conjunction
  of the guard instances of C;
* ``E v. (v = t & B)`` becomes ``B[v := t]`` (one-point rule);
* ``E v. B`` becomes ``B[v := c1] | ... | B[v := ck]`` when the oracle's
  candidate inference shows that B can only hold for v in {c1..ck},
  whatever the values of the other variables;
* ``A v. B`` is treated as ``~E v. ~B``.

What is left is handed to Cooper elimination.
"""

from __future__ import annotations

from .logic import (
    And,
    Eq,
    Exists,
    Forall,
    Formula,
    Not,
    conj,
    disj,
    flatten,
    free_vars,
    linearize,
    numeral,
    substitute,
    term_vars,
)
from .oracle import Budget, Evaluator, _block, _guard_instances
from .qe import DEFAULT_NODE_BUDGET, decide, simplify, _children, _rebuild

MAX_CANDIDATES = 64


class Grounder:
    def __init__(self, max_candidates: int = MAX_CANDIDATES):
        self.max_candidates = max_candidates
        self.oracle = Evaluator(Budget())
        self.expanded = 0

    def ground(self, f: Formula) -> Formula:
        match f:
            case Forall():
                names, body = _block(f)
                inst = _guard_instances(names, body)
                if inst:
                    self.expanded += 1
                    return self.ground(conj(inst))
                return simplify(Not(self._exists(f.var, Not(self.ground(f.body)))))
            case Exists(v, b):
                return self._exists(v, self.ground(b))
        kids = _children(f)
        if not kids:
            return simplify(f)
        return simplify(_rebuild(f, tuple(self.ground(k) for k in kids)))

    def _exists(self, v: str, body: Formula) -> Formula:
        body = simplify(body)
        if v not in free_vars(body):
            return body
        t = _one_point(body, v)
        if t is not None:
            return self.ground(substitute(body, v, t))
        cands = self.oracle._candidates(body, v, {})
        if cands is not None and len(cands) <= self.max_candidates:
            self.expanded += 1
            return simplify(disj(self.ground(substitute(body, v, numeral(c))) for c in sorted(cands)))
        return Exists(v, body)


def _one_point(body: Formula, v: str):
    for c in flatten(body, And):
        if not isinstance(c, Eq):
            continue
        for a, b in ((c.left, c.right), (c.right, c.left)):
            if v in term_vars(b):
                continue
            try:
                la = linearize(a)
            except ValueError:
                continue
            if la.constant == 0 and la.coeffs == ((v, 1),):
                return b
    return None


def ground(f: Formula, max_candidates: int = MAX_CANDIDATES) -> Formula:
    """Equivalent formula with every finitely-bounded quantifier expanded."""
    return Grounder(max_candidates).ground(f)


def decide_grounded(sentence: Formula, node_budget: int | None = DEFAULT_NODE_BUDGET) -> bool:
    """Truth of a closed sentence: ground bounded quantifiers, then eliminate the rest."""
    if free_vars(sentence):
        raise ValueError(f"not a sentence: free variables {sorted(free_vars(sentence))}")
    return decide(ground(sentence), node_budget)


__all__ = ["Grounder", "decide_grounded", "ground"]

