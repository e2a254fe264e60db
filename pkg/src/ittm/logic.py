"""First-order syntax: languages, terms, formulas and their Goedel codes.

Goedel codes are token sequences in Polish notation::

    0 "="   1 "not"   2 "and"   3 "or"   4 "->"   5 "<->"   6 "forall"   7 "exists"
    8 + 2*i      the variable v_i
    9 + 2*s      the language symbol with code s

A quantifier token is followed by its variable token, function and relation
tokens by their arguments.  :func:`sequence_number` folds a token sequence into
one natural number bijectively: ``() -> 0`` and ``(a, *rest) -> 1 + <a, code(rest)>``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

from .seqreal import cantor_pair, cantor_unpair

EQ, NOT, AND, OR, IMPLIES, IFF, FORALL, EXISTS = range(8)
BINARY = {AND: "&", OR: "|", IMPLIES: "->", IFF: "<->"}


class FormulaError(ValueError):
    pass


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str  # "function" | "relation" | "constant"
    arity: int = 0


@dataclass(frozen=True)
class Language:
    symbols: Mapping[int, Symbol]

    def __post_init__(self):
        names = [s.name for s in self.symbols.values()]
        if len(set(names)) != len(names):
            raise ValueError("symbol names must be distinct")
        for code, s in self.symbols.items():
            if code < 0:
                raise ValueError("Goedel codes are natural numbers")
            if s.kind not in ("function", "relation", "constant"):
                raise ValueError(f"unknown symbol kind {s.kind!r}")
            if s.kind == "constant" and s.arity != 0:
                raise ValueError("constants have arity 0")
            if s.kind != "constant" and s.arity < 1:
                raise ValueError(f"{s.kind} symbols need arity >= 1")

    @classmethod
    def build(cls, *specs: tuple) -> "Language":
        """``Language.build(("<", "relation", 2), ("c", "constant"))`` numbers symbols 0, 1, ..."""
        return cls({i: Symbol(*spec) for i, spec in enumerate(specs)})

    def code_of(self, name: str) -> int:
        for code, s in self.symbols.items():
            if s.name == name:
                return code
        raise KeyError(name)

    def by_name(self, name: str) -> Symbol | None:
        for s in self.symbols.values():
            if s.name == name:
                return s
        return None

    def __hash__(self):
        return hash(tuple(sorted(self.symbols.items())))

    def with_constants(self, names) -> "Language":
        base = max(self.symbols, default=-1) + 1
        extra = {base + k: Symbol(n, "constant") for k, n in enumerate(names)}
        return Language({**self.symbols, **extra})


# -- terms and formulas ---------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    index: int

    def __str__(self):
        return f"v{self.index}"


@dataclass(frozen=True)
class App:
    """A function application; constants are applications with no arguments."""

    name: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(map(str, self.args))})"


Term = Union[Var, App]


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Bin:
    op: int  # AND | OR | IMPLIES | IFF
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Quant:
    op: int  # FORALL | EXISTS
    var: int
    body: "Formula"


Formula = Union[Eq, Rel, Not, Bin, Quant]


def And(a, b):
    return Bin(AND, a, b)


def Or(a, b):
    return Bin(OR, a, b)


def Implies(a, b):
    return Bin(IMPLIES, a, b)


def Iff(a, b):
    return Bin(IFF, a, b)


def Forall(v, body):
    return Quant(FORALL, v, body)


def Exists(v, body):
    return Quant(EXISTS, v, body)


def conjunction(parts):
    parts = list(parts)
    if not parts:
        raise ValueError("empty conjunction")
    acc = parts[-1]
    for p in reversed(parts[:-1]):
        acc = And(p, acc)
    return acc


def term_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset({t.index})
    return frozenset().union(*map(term_vars, t.args)) if t.args else frozenset()


def free_vars(phi: Formula) -> frozenset:
    if isinstance(phi, Eq):
        return term_vars(phi.left) | term_vars(phi.right)
    if isinstance(phi, Rel):
        return frozenset().union(*map(term_vars, phi.args)) if phi.args else frozenset()
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, Bin):
        return free_vars(phi.left) | free_vars(phi.right)
    return free_vars(phi.body) - {phi.var}


def is_sentence(phi: Formula) -> bool:
    return not free_vars(phi)


def term_constants(t: Term) -> set:
    if isinstance(t, Var):
        return set()
    out = {t.name} if not t.args else set()
    for a in t.args:
        out |= term_constants(a)
    return out


def constants_of(phi: Formula) -> set:
    if isinstance(phi, Eq):
        return term_constants(phi.left) | term_constants(phi.right)
    if isinstance(phi, Rel):
        return set().union(*map(term_constants, phi.args)) if phi.args else set()
    if isinstance(phi, Not):
        return constants_of(phi.body)
    if isinstance(phi, Bin):
        return constants_of(phi.left) | constants_of(phi.right)
    return constants_of(phi.body)


def subst_term(t: Term, v: int, s: Term) -> Term:
    if isinstance(t, Var):
        return s if t.index == v else t
    return App(t.name, tuple(subst_term(a, v, s) for a in t.args))


def substitute(phi: Formula, v: int, s: Term) -> Formula:
    """Replace free occurrences of v_v by the term s (s must be closed or not captured)."""
    if isinstance(phi, Eq):
        return Eq(subst_term(phi.left, v, s), subst_term(phi.right, v, s))
    if isinstance(phi, Rel):
        return Rel(phi.name, tuple(subst_term(a, v, s) for a in phi.args))
    if isinstance(phi, Not):
        return Not(substitute(phi.body, v, s))
    if isinstance(phi, Bin):
        return Bin(phi.op, substitute(phi.left, v, s), substitute(phi.right, v, s))
    if phi.var == v:
        return phi
    if phi.var in term_vars(s):
        raise FormulaError("substitution would capture a variable")
    return Quant(phi.op, phi.var, substitute(phi.body, v, s))


def is_quantifier_free(phi: Formula) -> bool:
    if isinstance(phi, (Eq, Rel)):
        return True
    if isinstance(phi, Not):
        return is_quantifier_free(phi.body)
    if isinstance(phi, Bin):
        return is_quantifier_free(phi.left) and is_quantifier_free(phi.right)
    return False


def depth(phi: Formula) -> int:
    """Quantifier depth."""
    if isinstance(phi, (Eq, Rel)):
        return 0
    if isinstance(phi, Not):
        return depth(phi.body)
    if isinstance(phi, Bin):
        return max(depth(phi.left), depth(phi.right))
    return 1 + depth(phi.body)


def subformulas(phi: Formula) -> tuple:
    if isinstance(phi, (Eq, Rel)):
        return ()
    if isinstance(phi, Not):
        return (phi.body,)
    if isinstance(phi, Bin):
        return (phi.left, phi.right)
    return (phi.body,)


# -- printing ---------------------------------------------------------------------

def format_formula(phi: Formula) -> str:
    if isinstance(phi, Eq):
        return f"{phi.left} = {phi.right}"
    if isinstance(phi, Rel):
        if len(phi.args) == 2 and not phi.name[0].isalpha():
            return f"{phi.args[0]} {phi.name} {phi.args[1]}"
        return f"{phi.name}({', '.join(map(str, phi.args))})"
    if isinstance(phi, Not):
        return f"~{_wrap(phi.body)}"
    if isinstance(phi, Bin):
        return f"{_wrap(phi.left)} {BINARY[phi.op]} {_wrap(phi.right)}"
    word = "forall" if phi.op == FORALL else "exists"
    return f"{word} v{phi.var}. {format_formula(phi.body)}"


def _wrap(phi: Formula) -> str:
    text = format_formula(phi)
    return f"({text})" if isinstance(phi, (Bin, Quant, Eq)) or (
        isinstance(phi, Rel) and len(phi.args) == 2 and not phi.name[0].isalpha()) else text


# -- parsing ----------------------------------------------------------------------

_TOKENS = re.compile(r"\s*(<->|->|!=|[()~&|=,.]|[A-Za-z_][A-Za-z_0-9']*|[<>≤∈+*^-][<>≤∈+*^=-]*|\S)")


class _FormulaParser:
    """Grammar, loosest first: ``<->``, ``->`` (right assoc.), ``|``, ``&``, ``~``,
    quantifiers ``forall x. phi`` / ``exists x. phi`` (scope extends right), atoms
    ``t = t``, ``t != t``, ``t R t`` for symbolic binary relations, ``R(t, ..)``."""

    def __init__(self, text: str, language: Language):
        self.toks = [m.group(1) for m in _TOKENS.finditer(text) if m.group(1)]
        self.i = 0
        self.lang = language
        self.varmap: dict[str, int] = {}
        reserved = {int(t[1:]) for t in self.toks if re.fullmatch(r"v\d+", t)}
        self.reserved = reserved

    def var_index(self, name: str) -> int:
        if re.fullmatch(r"v\d+", name):
            return int(name[1:])
        if name not in self.varmap:
            k = 0
            used = self.reserved | set(self.varmap.values())
            while k in used:
                k += 1
            self.varmap[name] = k
        return self.varmap[name]

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise FormulaError(f"expected {expected or 'more input'}, found {tok!r}")
        self.i += 1
        return tok

    def formula(self):
        left = self.implication()
        if self.peek() == "<->":
            self.take()
            return Iff(left, self.formula())
        return left

    def implication(self):
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        left = self.conjunct()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.conjunct())
        return left

    def conjunct(self):
        left = self.unary()
        while self.peek() == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self):
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok in ("forall", "exists"):
            self.take()
            v = self.var_index(self.take())
            self.take(".")
            body = self.formula()
            return Quant(FORALL if tok == "forall" else EXISTS, v, body)
        if tok == "(":
            save = self.i
            self.take()
            try:
                inner = self.formula()
                self.take(")")
                if self.peek() in ("=", "!=") or self._is_binary_rel(self.peek()):
                    raise FormulaError("parenthesized term")
                return inner
            except FormulaError:
                self.i = save
        return self.atom()

    def _is_binary_rel(self, tok):
        s = self.lang.by_name(tok) if tok else None
        return s is not None and s.kind == "relation" and s.arity == 2 and not tok[0].isalpha()

    def atom(self):
        tok = self.peek()
        s = self.lang.by_name(tok) if tok else None
        if s is not None and s.kind == "relation" and (tok[0].isalpha() or tok == "∈") and self._next_is("("):
            self.take()
            args = self.arguments()
            if len(args) != s.arity:
                raise FormulaError(f"{tok} takes {s.arity} arguments")
            return Rel(tok, tuple(args))
        left = self.term()
        op = self.take()
        if op in ("=", "!="):
            right = self.term()
            return Eq(left, right) if op == "=" else Not(Eq(left, right))
        rs = self.lang.by_name(op)
        if rs is None or rs.kind != "relation" or rs.arity != 2:
            raise FormulaError(f"expected a binary relation, found {op!r}")
        return Rel(op, (left, self.term()))

    def _next_is(self, tok):
        return self.i + 1 < len(self.toks) and self.toks[self.i + 1] == tok

    def arguments(self):
        self.take("(")
        args = [self.term()]
        while self.peek() == ",":
            self.take()
            args.append(self.term())
        self.take(")")
        return args

    def term(self):
        tok = self.take()
        if tok == "(":
            t = self.term()
            self.take(")")
            return t
        s = self.lang.by_name(tok)
        if s is None:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9']*", tok):
                raise FormulaError(f"unexpected token {tok!r}")
            return Var(self.var_index(tok))
        if s.kind == "constant":
            return App(tok)
        if s.kind == "function":
            args = self.arguments()
            if len(args) != s.arity:
                raise FormulaError(f"{tok} takes {s.arity} arguments")
            return App(tok, tuple(args))
        raise FormulaError(f"relation symbol {tok!r} used as a term")


def parse_formula(text: str, language: Language) -> Formula:
    p = _FormulaParser(text, language)
    phi = p.formula()
    if p.peek() is not None:
        raise FormulaError(f"trailing input at {p.peek()!r}")
    return phi


# -- Goedel codes -----------------------------------------------------------------------

def encode_formula(phi: Formula, language: Language) -> tuple[int, ...]:
    out: list[int] = []
    _encode(phi, language, out)
    return tuple(out)


def _sym_token(name: str, language: Language) -> int:
    return 9 + 2 * language.code_of(name)


def _encode_term(t: Term, language: Language, out: list):
    if isinstance(t, Var):
        out.append(8 + 2 * t.index)
        return
    out.append(_sym_token(t.name, language))
    for a in t.args:
        _encode_term(a, language, out)


def _encode(phi: Formula, language: Language, out: list):
    if isinstance(phi, Eq):
        out.append(EQ)
        _encode_term(phi.left, language, out)
        _encode_term(phi.right, language, out)
    elif isinstance(phi, Rel):
        out.append(_sym_token(phi.name, language))
        for a in phi.args:
            _encode_term(a, language, out)
    elif isinstance(phi, Not):
        out.append(NOT)
        _encode(phi.body, language, out)
    elif isinstance(phi, Bin):
        out.append(phi.op)
        _encode(phi.left, language, out)
        _encode(phi.right, language, out)
    else:
        out += [phi.op, 8 + 2 * phi.var]
        _encode(phi.body, language, out)


class _Decoder:
    def __init__(self, code, language: Language):
        self.code = tuple(code)
        self.i = 0
        self.lang = language

    def next(self) -> int:
        if self.i >= len(self.code):
            raise FormulaError("truncated code")
        tok = self.code[self.i]
        if not isinstance(tok, int) or tok < 0:
            raise FormulaError(f"invalid token {tok!r}")
        self.i += 1
        return tok

    def symbol(self, tok) -> Symbol:
        s = self.lang.symbols.get((tok - 9) // 2)
        if s is None:
            raise FormulaError(f"token {tok} names no symbol of the language")
        return s

    def term(self) -> Term:
        tok = self.next()
        if tok >= 8 and tok % 2 == 0:
            return Var((tok - 8) // 2)
        if tok < 8:
            raise FormulaError(f"logical token {tok} where a term was expected")
        s = self.symbol(tok)
        if s.kind == "relation":
            raise FormulaError(f"relation {s.name} where a term was expected")
        return App(s.name, tuple(self.term() for _ in range(s.arity)))

    def formula(self) -> Formula:
        tok = self.next()
        if tok == EQ:
            return Eq(self.term(), self.term())
        if tok == NOT:
            return Not(self.formula())
        if tok in BINARY:
            return Bin(tok, self.formula(), self.formula())
        if tok in (FORALL, EXISTS):
            v = self.next()
            if v < 8 or v % 2:
                raise FormulaError("quantifier must be followed by a variable")
            return Quant(tok, (v - 8) // 2, self.formula())
        if tok % 2 == 0:
            raise FormulaError("variable where a formula was expected")
        s = self.symbol(tok)
        if s.kind != "relation":
            raise FormulaError(f"{s.kind} {s.name} where a formula was expected")
        return Rel(s.name, tuple(self.term() for _ in range(s.arity)))


def decode_formula(code, language: Language) -> Formula:
    d = _Decoder(code, language)
    phi = d.formula()
    if d.i != len(d.code):
        raise FormulaError("trailing tokens after formula")
    return phi


def subformula_codes(code, language: Language) -> tuple:
    """Codes of the immediate subformulas, read off the token sequence."""
    return tuple(encode_formula(s, language) for s in subformulas(decode_formula(code, language)))


def sequence_number(seq) -> int:
    n = 0
    for a in reversed(tuple(seq)):
        n = 1 + cantor_pair(a, n)
    return n


def sequence_from_number(n: int) -> tuple[int, ...]:
    out = []
    while n:
        a, n = cantor_unpair(n - 1)
        out.append(a)
    return tuple(out)

