"""Presburger arithmetic and real-closed-field speedup constructions.

Modules:

* ``logic`` / ``grammar``: formula AST, text syntax, sizes
* ``qe``: Cooper-style quantifier elimination and ground decision
* ``oracle``: bounded brute-force semantics used for testing
* ``grounding``: exact decisions for syntactically bounded quantifiers
* ``corpus``: seeded random formulas
* ``solovay``: Solovay compression of recursive definitions
* ``pra_families`` / ``rcf_families``: Mul, Hyp, Div, Pow, Root, axioms
* ``mp_model``: the nonstandard models M_p
* ``bench``, ``cli``: growth benchmark and command line
"""

import sys

# compressed definitions nest thousands of levels deep
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)

from .grammar import ParseError, parse, parse_template, parse_term, render, render_term  # noqa: E402
from .logic import BudgetExceeded, SizeReport, size  # noqa: E402

__all__ = [
    "BudgetExceeded",
    "ParseError",
    "SizeReport",
    "parse",
    "parse_template",
    "parse_term",
    "render",
    "render_term",
    "size",
]
