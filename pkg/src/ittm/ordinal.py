"""Ordinals below epsilon_0 in Cantor normal form.

Text syntax (``w`` stands for omega)::

    expr     := term ("+" term)*
    term     := "w" ("^" exponent)? ("*" nat)? | nat
    exponent := nat | "w" ("^" exponent)? | "(" expr ")"

so ``w^w+w`` is omega^omega + omega and ``w^(w+1)*3`` needs the parentheses.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

DEFAULT_MAX_DEPTH = 16


class OrdinalSyntaxError(ValueError):
    pass


@dataclass(frozen=True)
class Ordinal:
    """An ordinal as a tuple of (exponent, coefficient) pairs, exponents decreasing."""

    terms: tuple[tuple["Ordinal", int], ...] = ()

    def __post_init__(self):
        prev = None
        for exp, coef in self.terms:
            if not isinstance(coef, int) or coef < 1:
                raise ValueError(f"coefficient must be a positive integer, got {coef!r}")
            if prev is not None and not exp < prev:
                raise ValueError("exponents must be strictly decreasing")
            prev = exp

    @classmethod
    def _trusted(cls, terms: tuple) -> "Ordinal":
        # arithmetic results are in normal form by construction; skip the check
        o = object.__new__(cls)
        object.__setattr__(o, "terms", terms)
        return o

    # -- constructors -----------------------------------------------------
    @classmethod
    def of(cls, n: int) -> "Ordinal":
        if n < 0:
            raise ValueError("ordinals are non-negative")
        return ZERO if n == 0 else cls._trusted(((ZERO, n),))

    @classmethod
    def omega_power(cls, exponent: "Ordinal | int", coefficient: int = 1) -> "Ordinal":
        if isinstance(exponent, int):
            exponent = cls.of(exponent)
        if not isinstance(coefficient, int) or coefficient < 1:
            raise ValueError(f"coefficient must be a positive integer, got {coefficient!r}")
        return cls._trusted(((exponent, coefficient),))

    # -- order ------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int):
            other = Ordinal.of(other) if other >= 0 else None
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __lt__(self, other):
        if isinstance(other, int):
            other = Ordinal.of(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return compare(self, other) < 0

    def __le__(self, other):
        if isinstance(other, int):
            other = Ordinal.of(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return compare(self, other) <= 0

    def __gt__(self, other):
        if isinstance(other, int):
            other = Ordinal.of(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return compare(self, other) > 0

    def __ge__(self, other):
        if isinstance(other, int):
            other = Ordinal.of(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return compare(self, other) >= 0

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, int):
            other = Ordinal.of(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return add(self, other)

    def __radd__(self, other):
        if isinstance(other, int):
            return add(Ordinal.of(other), self)
        return NotImplemented

    # -- inspection -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_finite(self) -> bool:
        return all(exp.is_zero() for exp, _ in self.terms)

    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0].is_zero()

    def is_limit(self) -> bool:
        return bool(self.terms) and not self.terms[-1][0].is_zero()

    def finite_value(self) -> int:
        if not self.is_finite():
            raise ValueError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    def depth(self) -> int:
        """Nesting depth of exponents; finite ordinals have depth 0 or 1."""
        if not self.terms:
            return 0
        return 1 + max(exp.depth() for exp, _ in self.terms)

    def __str__(self):
        return format_ordinal(self)

    def __repr__(self):
        return f"Ordinal({format_ordinal(self)!r})"


ZERO = Ordinal()
ONE = Ordinal(((ZERO, 1),))
OMEGA = Ordinal(((ONE, 1),))


def compare(a: Ordinal, b: Ordinal) -> int:
    """-1, 0 or 1 by lexicographic comparison of the term sequences."""
    if a is b:
        return 0
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = compare(ea, eb)
        if c:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    la, lb = len(a.terms), len(b.terms)
    return (la > lb) - (la < lb)


def ord_compare(a: Ordinal, b: Ordinal) -> str:
    return {-1: "less", 0: "equal", 1: "greater"}[compare(a, b)]


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    if not b.terms:
        return a
    lead_exp, lead_coef = b.terms[0]
    kept = []
    for exp, coef in a.terms:
        c = compare(exp, lead_exp)
        if c > 0:
            kept.append((exp, coef))
        elif c == 0:
            lead_coef += coef
            break
        else:
            break
    return Ordinal._trusted(tuple(kept) + ((lead_exp, lead_coef),) + b.terms[1:])


class Classification(NamedTuple):
    kind: str  # "zero" | "successor" | "limit"
    predecessor: Ordinal | None = None


def classify(a: Ordinal) -> Classification:
    if not a.terms:
        return Classification("zero")
    exp, coef = a.terms[-1]
    if exp.is_zero():
        rest = a.terms[:-1] + (((ZERO, coef - 1),) if coef > 1 else ())
        return Classification("successor", Ordinal(rest))
    return Classification("limit")


# -- text form ----------------------------------------------------------------

def format_ordinal(a: Ordinal) -> str:
    if not a.terms:
        return "0"
    return "+".join(_format_term(exp, coef) for exp, coef in a.terms)


def _format_term(exp: Ordinal, coef: int) -> str:
    if exp.is_zero():
        return str(coef)
    if exp == ONE:
        head = "w"
    else:
        inner = format_ordinal(exp)
        bare = len(exp.terms) == 1 and exp.terms[0][1] == 1 or exp.is_finite()
        head = f"w^{inner}" if bare else f"w^({inner})"
    return head if coef == 1 else f"{head}*{coef}"


_TOKEN = re.compile(r"\s*(?:(\d+)|(.))")


class _Parser:
    def __init__(self, text: str, max_depth: int):
        self.tokens = []
        for m in _TOKEN.finditer(text):
            if m.group(1) is not None:
                self.tokens.append(("nat", int(m.group(1))))
            elif m.group(2) is not None and not m.group(2).isspace():
                self.tokens.append(("sym", m.group(2)))
        self.pos = 0
        self.max_depth = max_depth

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, sym=None):
        tok = self.peek()
        if tok is None:
            raise OrdinalSyntaxError("unexpected end of ordinal expression")
        if sym is not None and tok != ("sym", sym):
            raise OrdinalSyntaxError(f"expected {sym!r}, found {tok[1]!r}")
        self.pos += 1
        return tok

    def nat(self) -> int:
        kind, val = self.take()
        if kind != "nat":
            raise OrdinalSyntaxError(f"expected a natural number, found {val!r}")
        return val

    def expr(self, depth: int) -> Ordinal:
        if depth > self.max_depth:
            raise OrdinalSyntaxError(f"exponent nesting exceeds limit {self.max_depth}")
        result = self.term(depth)
        while self.peek() == ("sym", "+"):
            self.take("+")
            result = add(result, self.term(depth))
        return result

    def term(self, depth: int) -> Ordinal:
        tok = self.peek()
        if tok is not None and tok[0] == "nat":
            n = self.nat()
            return Ordinal.of(n)
        self.take("w")
        exp = ONE
        if self.peek() == ("sym", "^"):
            self.take("^")
            exp = self.exponent(depth + 1)
        coef = 1
        if self.peek() == ("sym", "*"):
            self.take("*")
            coef = self.nat()
            if coef == 0:
                raise OrdinalSyntaxError("coefficient 0 is not allowed")
        return Ordinal(((exp, coef),))

    def exponent(self, depth: int) -> Ordinal:
        if depth > self.max_depth:
            raise OrdinalSyntaxError(f"exponent nesting exceeds limit {self.max_depth}")
        tok = self.peek()
        if tok is not None and tok[0] == "nat":
            return Ordinal.of(self.nat())
        if tok == ("sym", "("):
            self.take("(")
            inner = self.expr(depth)
            self.take(")")
            return inner
        self.take("w")
        exp = ONE
        if self.peek() == ("sym", "^"):
            self.take("^")
            exp = self.exponent(depth + 1)
        return Ordinal(((exp, 1),))


def parse_ordinal(text: str, max_depth: int = DEFAULT_MAX_DEPTH) -> Ordinal:
    if not text.strip():
        raise OrdinalSyntaxError("empty ordinal expression")
    p = _Parser(text, max_depth)
    value = p.expr(0)
    if p.peek() is not None:
        raise OrdinalSyntaxError(f"trailing input at {p.peek()[1]!r}")
    return value


def left_difference(b: Ordinal, a: Ordinal) -> Ordinal:
    """The unique d with a + d == b, for a <= b."""
    if compare(a, b) > 0:
        raise ValueError(f"{a} exceeds {b}")
    for idx, ((ea, ca), (eb, cb)) in enumerate(zip(a.terms, b.terms)):
        if ea == eb and ca == cb:
            continue
        if ea == eb:
            return Ordinal(((eb, cb - ca),) + b.terms[idx + 1:])
        return Ordinal(b.terms[idx:])
    return Ordinal(b.terms[len(a.terms):])
