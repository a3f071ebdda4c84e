"""Canonical ASCII text syntax: parsing and rendering.

Formulas::

    t = u     t <= u     t < u     t != u     t =_m u     R(t1, ..., tk)
    ~F    F & G    F | G    F -> G    F <-> G    E x. F    A x. F

Binding strength ~ > & > | > -> > <->; the binary connectives associate
to the right; a quantifier body extends as far right as possible.

Terms are built from 0, 1, variables, decimal numerals and +.  In the
Presburger dialect ``k*t`` with a numeral k is the k-fold sum of t; in
the RCF dialect ``*`` is field multiplication and ``t < u`` means
``t <= u & t != u``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .logic import (
    ONE,
    ZERO,
    Add,
    And,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Le,
    Mod,
    Mul,
    Not,
    Num,
    Or,
    Rel,
    Scale,
    Term,
    Var,
    numeral,
    scale,
)


class ParseError(ValueError):
    pass


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<mod>=_(?P<modulus>\d+))
  | (?P<op><->|->|<=|!=|[=<~&|+*(),.])
  | (?P<num>\d+)
  | (?P<ident>[a-z][a-zA-Z0-9_]*)
  | (?P<upper>[A-Z][a-zA-Z0-9_]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(src: str) -> list[Token]:
    out: list[Token] = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r} at {pos}")
        kind = m.lastgroup
        if kind == "modulus":
            kind = "mod"
        if kind != "ws":
            out.append(Token(kind, m.group(kind if kind != "mod" else "mod"), pos))
        pos = m.end()
    out.append(Token("eof", "", pos))
    return out


class _Parser:
    def __init__(self, src: str, rcf: bool, allow_rel: bool):
        self.toks = tokenize(src)
        self.i = 0
        self.rcf = rcf
        self.allow_rel = allow_rel

    # token helpers
    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind in ("op", "upper") and t.text == text

    def take(self, text: str | None = None, kind: str | None = None) -> Token:
        t = self.peek()
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = text or kind
            raise ParseError(f"expected {want!r} at {t.pos}, found {t.text or 'end of input'!r}")
        self.i += 1
        return t

    # formulas
    def formula(self) -> Formula:
        left = self.implication()
        if self.at("<->"):
            self.take("<->")
            return Iff(left, self.formula())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.at("->"):
            self.take("->")
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        if self.at("|"):
            self.take("|")
            return Or(left, self.disjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        if self.at("&"):
            self.take("&")
            return And(left, self.conjunction())
        return left

    def unary(self) -> Formula:
        if self.at("~"):
            self.take("~")
            return Not(self.unary())
        if self.at("E") or self.at("A"):
            q = self.take().text
            name = self.take(kind="ident").text
            self.take(".")
            body = self.formula()
            return Exists(name, body) if q == "E" else Forall(name, body)
        return self.primary()

    def primary(self) -> Formula:
        t = self.peek()
        if t.kind == "upper":
            return self.relation()
        if self.at("("):
            # either a parenthesized formula or an atom whose left term starts with "("
            save = self.i
            try:
                return self.atom()
            except ParseError:
                self.i = save
            self.take("(")
            f = self.formula()
            self.take(")")
            return f
        return self.atom()

    def relation(self) -> Formula:
        name = self.take(kind="upper").text
        if not self.allow_rel:
            raise ParseError(f"relation symbol {name!r} not allowed here")
        self.take("(")
        args = [self.term()]
        while self.at(","):
            self.take(",")
            args.append(self.term())
        self.take(")")
        return Rel(name, tuple(args))

    def atom(self) -> Formula:
        left = self.term()
        t = self.peek()
        if t.kind == "mod":
            if self.rcf:
                raise ParseError("=_m atoms are not part of the RCF language")
            self.i += 1
            m = int(t.text[2:])
            if m < 1:
                raise ParseError("modulus must be >= 1")
            return Mod(m, left, self.term())
        if t.kind != "op" or t.text not in ("=", "<=", "<", "!="):
            raise ParseError(f"expected a relation at {t.pos}, found {t.text or 'end of input'!r}")
        self.i += 1
        right = self.term()
        match t.text:
            case "=":
                return Eq(left, right)
            case "<=":
                return Le(left, right)
            case "!=":
                return Not(Eq(left, right))
        if self.rcf:
            return And(Le(left, right), Not(Eq(left, right)))
        return Le(Add(left, ONE), right)

    # terms
    def term(self) -> Term:
        out = self.product()
        while self.at("+"):
            self.take("+")
            out = Add(out, self.product())
        return out

    def product(self) -> Term:
        tok = self.peek()
        out = self.factor()
        while self.at("*"):
            self.take("*")
            rhs = self.factor()
            if self.rcf:
                out = Mul(out, rhs)
            else:
                if tok.kind != "num" or not isinstance(out, (type(ZERO), type(ONE), Num)):
                    raise ParseError(f"left factor of * must be a numeral at {tok.pos}")
                out = scale(_value(out), rhs)
                tok = Token("done", "", tok.pos)
        return out

    def factor(self) -> Term:
        t = self.peek()
        if t.kind == "num":
            self.i += 1
            return numeral(int(t.text))
        if t.kind == "ident":
            self.i += 1
            return Var(t.text)
        if self.at("("):
            self.take("(")
            out = self.term()
            self.take(")")
            return out
        raise ParseError(f"expected a term at {t.pos}, found {t.text or 'end of input'!r}")


def _value(t: Term) -> int:
    if isinstance(t, Num):
        return t.value
    return 1 if t == ONE else 0


def parse(src: str, rcf: bool = False, allow_rel: bool = False) -> Formula:
    p = _Parser(src, rcf, allow_rel)
    f = p.formula()
    if p.peek().kind != "eof":
        raise ParseError(f"trailing input at {p.peek().pos}: {p.peek().text!r}")
    return f


def parse_term(src: str, rcf: bool = False) -> Term:
    p = _Parser(src, rcf, False)
    t = p.term()
    if p.peek().kind != "eof":
        raise ParseError(f"trailing input at {p.peek().pos}")
    return t


def parse_template(src: str, rcf: bool = False) -> Formula:
    """Parse a formula that may contain relation atoms such as R(x, y)."""
    return parse(src, rcf=rcf, allow_rel=True)


# ------------------------------------------------------------ rendering

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_SYM = {Iff: "<->", Implies: "->", Or: "|", And: "&"}


def render_term(t: Term) -> str:
    match t:
        case Var(name):
            return name
        case Num(k):
            return str(k)
        case Add(l, r):
            rs = render_term(r)
            if isinstance(r, Add):
                rs = f"({rs})"
            return f"{render_term(l)} + {rs}"
        case Mul(l, r):
            ls, rs = render_term(l), render_term(r)
            if isinstance(l, (Add, Scale)):
                ls = f"({ls})"
            if isinstance(r, (Add, Mul, Scale)):
                rs = f"({rs})"
            return f"{ls} * {rs}"
        case Scale(k, s):
            ss = render_term(s)
            if isinstance(s, (Add, Mul, Scale)):
                ss = f"({ss})"
            return f"{k}*{ss}"
    return "0" if t == ZERO else "1"


def render(f: Formula) -> str:
    """Canonical text of f; parse(render(f)) == f."""
    parts: list[str] = []
    _render(f, parts, top=True)
    return "".join(parts)


def _render(f: Formula, out: list[str], top: bool = False) -> None:
    match f:
        case Eq(l, r):
            out.append(f"{render_term(l)} = {render_term(r)}")
        case Le(l, r):
            out.append(f"{render_term(l)} <= {render_term(r)}")
        case Mod(m, l, r):
            out.append(f"{render_term(l)} =_{m} {render_term(r)}")
        case Rel(name, args):
            out.append(f"{name}({', '.join(render_term(a) for a in args)})")
        case Not(Eq(l, r)):
            out.append(f"{render_term(l)} != {render_term(r)}")
        case Not(a):
            out.append("~")
            _operand(a, out, 5)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            p = _PREC[type(f)]
            _operand(l, out, p + 1)
            out.append(f" {_SYM[type(f)]} ")
            _operand(r, out, p)
        case Exists(v, b) | Forall(v, b):
            q = "E" if isinstance(f, Exists) else "A"
            if not top:
                out.append("(")
            out.append(f"{q} {v}. ")
            _render(b, out, top=True)
            if not top:
                out.append(")")
        case _:
            raise TypeError(f"not a formula: {f!r}")


def _operand(g: Formula, out: list[str], min_prec: int) -> None:
    prec = _PREC.get(type(g), 6)
    if isinstance(g, (Exists, Forall)):
        _render(g, out, top=False)
    elif prec < min_prec:
        out.append("(")
        _render(g, out, top=True)
        out.append(")")
    else:
        _render(g, out)
