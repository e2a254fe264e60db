"""Finite structures, Tarski truth, atomic diagrams and writable codes.

A :class:`Structure` lists its domain in order; for writable structures the
elements are the real rows ``r[1..n]`` of a code ``r`` whose row 0 holds the
atomic diagram.  Diagram sentences live in the language expanded by a constant
for each element: the element in row ``n`` gets Goedel code ``2n - 1`` and an
original symbol with code ``s`` moves to ``2s``.  Only unnested atomic
sentences are listed (``R(a..)``, ``f(a..) = b``, ``c = b``, ``a = b``), each
either plainly or under one negation.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from .logic import (
    App, Bin, Eq, EXISTS, FORALL, Formula, Language, Not, Quant, Rel, Symbol, Var,
    AND, IFF, IMPLIES, OR, conjunction, encode_formula, free_vars, sequence_number,
)
from .seqreal import (
    FiniteSupport, SeqReal, format_seqreal, parse_seqreal, row_extract, rows_to_real,
)


class StructureError(ValueError):
    pass


class UnboundVariable(KeyError):
    pass


@dataclass(frozen=True)
class Structure:
    language: Language
    domain: tuple
    constants: Mapping[str, Hashable] = field(default_factory=dict)
    functions: Mapping[str, Mapping[tuple, Hashable]] = field(default_factory=dict)
    relations: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        dom = set(self.domain)
        if len(dom) != len(self.domain):
            raise StructureError("domain elements must be distinct")
        if not self.domain:
            raise StructureError("empty domain")
        for s in self.language.symbols.values():
            if s.kind == "constant":
                if self.constants.get(s.name, _MISSING) not in dom:
                    raise StructureError(f"constant {s.name} is not interpreted in the domain")
            elif s.kind == "function":
                table = self.functions.get(s.name)
                if table is None:
                    raise StructureError(f"function {s.name} has no table")
                for args in itertools.product(self.domain, repeat=s.arity):
                    if table.get(args, _MISSING) not in dom:
                        raise StructureError(f"function {s.name} is undefined or leaves the domain at {args}")
            else:
                rel = self.relations.get(s.name, frozenset())
                if any(len(t) != s.arity or not set(t) <= dom for t in rel):
                    raise StructureError(f"relation {s.name} has a bad tuple")

    @property
    def size(self) -> int:
        return len(self.domain)


_MISSING = object()

WritableStructure = Structure


def make_structure(language: Language, domain: Sequence, constants=None, functions=None,
                   relations=None) -> Structure:
    rels = {name: frozenset(map(tuple, tuples)) for name, tuples in (relations or {}).items()}
    for s in language.symbols.values():
        if s.kind == "relation":
            rels.setdefault(s.name, frozenset())
    funs = {name: dict(table) for name, table in (functions or {}).items()}
    return Structure(language, tuple(domain), dict(constants or {}), funs, rels)


# -- evaluation ------------------------------------------------------------------

def term_eval(S: Structure, t, assignment: Mapping[int, Hashable]):
    if isinstance(t, Var):
        if t.index not in assignment:
            raise UnboundVariable(f"v{t.index} is unbound")
        return assignment[t.index]
    if not t.args:
        return S.constants[t.name]
    return S.functions[t.name][tuple(term_eval(S, a, assignment) for a in t.args)]


def tarski_eval(S: Structure, phi: Formula, assignment: Mapping[int, Hashable] | None = None) -> bool:
    assignment = dict(assignment or {})
    missing = free_vars(phi) - assignment.keys()
    if missing:
        raise UnboundVariable(f"v{min(missing)} is unbound")
    return _truth(S, phi, assignment)


def _truth(S: Structure, phi: Formula, env: dict) -> bool:
    if isinstance(phi, Eq):
        return term_eval(S, phi.left, env) == term_eval(S, phi.right, env)
    if isinstance(phi, Rel):
        return tuple(term_eval(S, a, env) for a in phi.args) in S.relations[phi.name]
    if isinstance(phi, Not):
        return not _truth(S, phi.body, env)
    if isinstance(phi, Bin):
        a = _truth(S, phi.left, env)
        if phi.op == AND:
            return a and _truth(S, phi.right, env)
        if phi.op == OR:
            return a or _truth(S, phi.right, env)
        if phi.op == IMPLIES:
            return not a or _truth(S, phi.right, env)
        return a == _truth(S, phi.right, env)
    saved = env.get(phi.var, _MISSING)
    want = phi.op == EXISTS
    result = not want
    for d in S.domain:
        env[phi.var] = d
        if _truth(S, phi.body, env) == want:
            result = want
            break
    if saved is _MISSING:
        env.pop(phi.var, None)
    else:
        env[phi.var] = saved
    return result


# -- diagrams and writable codes -------------------------------------------------

def diagram_language(language: Language, size: int) -> Language:
    symbols = {2 * code: s for code, s in language.symbols.items()}
    for n in range(1, size + 1):
        symbols[2 * n - 1] = Symbol(f"@{n}", "constant")
    return Language(symbols)


def _element_const(n: int) -> App:
    return App(f"@{n}")


def basic_atomic_sentences(language: Language, size: int):
    """Every unnested atomic sentence about elements 1..size, in a fixed order."""
    els = [_element_const(n) for n in range(1, size + 1)]
    for a in els:
        for b in els:
            yield Eq(a, b)
    for code in sorted(language.symbols):
        s = language.symbols[code]
        if s.kind == "constant":
            for b in els:
                yield Eq(App(s.name), b)
        elif s.kind == "function":
            for args in itertools.product(els, repeat=s.arity):
                for b in els:
                    yield Eq(App(s.name, args), b)
        else:
            for args in itertools.product(els, repeat=s.arity):
                yield Rel(s.name, args)


def _diagram_structure(S: Structure) -> Structure:
    """S expanded by its element constants, so diagram sentences can be evaluated."""
    lang = diagram_language(S.language, S.size)
    consts = dict(S.constants)
    consts.update({f"@{n}": d for n, d in enumerate(S.domain, 1)})
    return Structure(lang, S.domain, consts, S.functions, S.relations)


def atomic_diagram(S: Structure) -> list[Formula]:
    """The unnested atomic diagram: each basic sentence or its negation, whichever holds."""
    expanded = _diagram_structure(S)
    out = []
    for phi in basic_atomic_sentences(S.language, S.size):
        out.append(phi if _truth(expanded, phi, {}) else Not(phi))
    return out


def sentence_number(phi: Formula, language: Language) -> int:
    return sequence_number(encode_formula(phi, language))


def diagram_row(S: Structure) -> FiniteSupport:
    lang = diagram_language(S.language, S.size)
    return FiniteSupport(frozenset(sentence_number(phi, lang) for phi in atomic_diagram(S)))


def writable_code(S: Structure) -> SeqReal:
    """The real whose row 0 is the diagram and whose rows 1..n are the domain."""
    rows = {0: diagram_row(S)}
    for n, d in enumerate(S.domain, 1):
        if not isinstance(d, FiniteSupport):
            raise StructureError("only finite-support domain rows can be interleaved into one real")
        rows[n] = d
    return rows_to_real(rows)


def validate_writable(r: SeqReal, rows: int, language: Language) -> Structure:
    """Rebuild the structure coded by r, whose rows 1..rows name the domain."""
    if rows < 1:
        raise StructureError("a writable structure needs at least one domain row")
    domain = tuple(row_extract(r, n) for n in range(1, rows + 1))
    if len(set(domain)) != len(domain):
        first = next(n for n in range(rows) if domain[n] in domain[:n])
        raise StructureError(f"duplicate domain rows: row {first + 1} repeats an earlier row")
    diagram = row_extract(r, 0)
    if not isinstance(diagram, FiniteSupport):
        raise StructureError("the diagram row has infinitely many set bits")
    lang = diagram_language(language, rows)
    listed = set(diagram.ones)
    known: dict[int, tuple[Formula, bool]] = {}
    for phi in basic_atomic_sentences(language, rows):
        known[sentence_number(phi, lang)] = (phi, True)
        known[sentence_number(Not(phi), lang)] = (phi, False)
    stray = listed - known.keys()
    if stray:
        raise StructureError(f"diagram row holds {len(stray)} code(s) outside the atomic diagram")
    facts: dict[Formula, bool] = {}
    for z in listed:
        phi, truth = known[z]
        if facts.setdefault(phi, truth) != truth:
            raise StructureError(f"diagram asserts both {phi} and its negation")
    n_of = lambda c: int(c.name[1:]) - 1

    def value(phi):
        if phi not in facts:
            raise StructureError(f"diagram decides neither {phi} nor its negation")
        return facts[phi]

    for phi in basic_atomic_sentences(language, rows):
        if isinstance(phi, Eq) and isinstance(phi.left, App) and phi.left.name.startswith("@"):
            # distinct rows are distinct elements, so these facts may go unlisted
            if facts.setdefault(phi, phi.left == phi.right) != (phi.left == phi.right):
                raise StructureError("diagram equality disagrees with distinct domain rows")
        value(phi)
    constants, functions, relations = {}, {}, {}
    for s in language.symbols.values():
        if s.kind == "relation":
            relations[s.name] = frozenset(
                tuple(domain[n_of(a)] for a in phi.args)
                for phi in basic_atomic_sentences(language, rows)
                if isinstance(phi, Rel) and phi.name == s.name and facts[phi])
            continue
        values: dict = {}
        for phi in basic_atomic_sentences(language, rows):
            if isinstance(phi, Eq) and phi.left.name == s.name and facts[phi]:
                key = tuple(domain[n_of(a)] for a in phi.left.args)
                if key in values:
                    raise StructureError(f"{s.name}{key and list(key)} has two values")
                values[key] = domain[n_of(phi.right)]
        if s.kind == "constant":
            if () not in values:
                raise StructureError(f"constant {s.name} has no value")
            constants[s.name] = values[()]
        else:
            functions[s.name] = values
    return Structure(language, domain, constants, functions, relations)


# -- files ----------------------------------------------------------------------

def language_from_json(data) -> Language:
    return Language({int(code): Symbol(s["name"], s["kind"], int(s.get("arity", 0)))
                     for code, s in data.items()})


def structure_from_json(data: dict) -> Structure:
    """Tables refer to elements by their 0-based position in ``domain``."""
    language = language_from_json(data.get("language", {}))
    domain = tuple(parse_seqreal(t) for t in data["domain"])
    el = lambda i: domain[int(i)]
    constants = {k: el(v) for k, v in data.get("constants", {}).items()}
    functions = {k: {tuple(map(el, args)): el(v) for args, v in rows}
                 for k, rows in data.get("functions", {}).items()}
    relations = {k: [tuple(map(el, t)) for t in rows] for k, rows in data.get("relations", {}).items()}
    return make_structure(language, domain, constants, functions, relations)


def structure_to_json(S: Structure) -> dict:
    idx = {d: i for i, d in enumerate(S.domain)}
    lang = {str(c): {"name": s.name, "kind": s.kind, "arity": s.arity} for c, s in S.language.symbols.items()}
    return {
        "language": lang,
        "domain": [format_seqreal(d) for d in S.domain],
        "constants": {k: idx[v] for k, v in S.constants.items()},
        "functions": {k: sorted([[idx[a] for a in args], idx[v]] for args, v in t.items())
                      for k, t in S.functions.items()},
        "relations": {k: sorted([idx[a] for a in t] for t in rel) for k, rel in S.relations.items()},
    }


def load_structure(path) -> Structure:
    with open(path) as fh:
        return structure_from_json(json.load(fh))


# -- isomorphism ---------------------------------------------------------------------

def is_isomorphism(S: Structure, T: Structure, pi: Mapping) -> bool:
    if len(set(pi.values())) != S.size or set(pi) != set(S.domain) or set(pi.values()) != set(T.domain):
        return False
    for s in S.language.symbols.values():
        if s.kind == "constant":
            if pi[S.constants[s.name]] != T.constants[s.name]:
                return False
        elif s.kind == "function":
            for args, v in S.functions[s.name].items():
                if T.functions[s.name][tuple(pi[a] for a in args)] != pi[v]:
                    return False
        else:
            if {tuple(pi[a] for a in t) for t in S.relations[s.name]} != set(T.relations[s.name]):
                return False
    return True


def find_isomorphism(S: Structure, T: Structure) -> dict | None:
    """Brute force over bijections; meant for small structures."""
    if S.language != T.language or S.size != T.size:
        return None
    for perm in itertools.permutations(T.domain):
        pi = dict(zip(S.domain, perm))
        if is_isomorphism(S, T, pi):
            return pi
    return None


# -- quotients -----------------------------------------------------------------------

@dataclass(frozen=True)
class NotEquivalence(StructureError):
    property: str
    elements: tuple

    def __str__(self):
        return f"not an equivalence relation: {self.property} fails at {self.elements}"


@dataclass(frozen=True)
class NotCongruence(StructureError):
    symbol: str
    left: tuple
    right: tuple

    def __str__(self):
        return f"not a congruence for {self.symbol}: {self.left} ~ {self.right} but the images differ"


def equivalence_check(domain: Sequence, E) -> None:
    E = set(E)
    for a in domain:
        if (a, a) not in E:
            raise NotEquivalence("reflexivity", (a,))
    for a, b in E:
        if (b, a) not in E:
            raise NotEquivalence("symmetry", (a, b))
    for a, b in E:
        for c in domain:
            if (b, c) in E and (a, c) not in E:
                raise NotEquivalence("transitivity", (a, b, c))


def quotient_presentation(S: Structure, E) -> Structure:
    """The quotient by E on least representatives, least meaning earliest in the domain order."""
    E = frozenset(map(tuple, E))
    if any(a not in S.domain or b not in S.domain for a, b in E):
        raise StructureError("E relates elements outside the domain")
    equivalence_check(S.domain, E)
    least = {a: next(b for b in S.domain if (a, b) in E) for a in S.domain}
    for s in S.language.symbols.values():
        if s.kind == "constant":
            continue
        for xs in itertools.product(S.domain, repeat=s.arity):
            for k in range(s.arity):
                for y in S.domain:
                    if y == xs[k] or (xs[k], y) not in E:
                        continue
                    ys = xs[:k] + (y,) + xs[k + 1:]
                    if s.kind == "function":
                        same = (S.functions[s.name][xs], S.functions[s.name][ys]) in E
                    else:
                        same = (xs in S.relations[s.name]) == (ys in S.relations[s.name])
                    if not same:
                        raise NotCongruence(s.name, xs, ys)
    reps = tuple(a for a in S.domain if least[a] == a)
    constants = {k: least[v] for k, v in S.constants.items()}
    functions = {k: {args: least[v] for args, v in t.items() if all(least[a] == a for a in args)}
                 for k, t in S.functions.items()}
    relations = {k: frozenset(t for t in rel if all(least[a] == a for a in t)) for k, rel in S.relations.items()}
    return Structure(S.language, reps, constants, functions, relations)


# -- Tarski-Vaught ----------------------------------------------------------------

@dataclass(frozen=True)
class TVResult:
    holds: bool
    formula: Formula | None = None  # phi(v0; v1..vm), with ∃v0 phi true but unwitnessed
    parameters: tuple = ()

    def __bool__(self):
        return self.holds


def _atomic_facts(S: Structure, slots: tuple) -> list[tuple[Formula, bool]]:
    """Unnested atomic formulas over variables v0..v(k-1) naming ``slots``."""
    vs = [Var(i) for i in range(len(slots))]
    out = []
    for i, j in itertools.combinations(range(len(slots)), 2):
        out.append((Eq(vs[i], vs[j]), slots[i] == slots[j]))
    for code in sorted(S.language.symbols):
        s = S.language.symbols[code]
        if s.kind == "constant":
            for i in range(len(slots)):
                out.append((Eq(App(s.name), vs[i]), S.constants[s.name] == slots[i]))
        elif s.kind == "function":
            for idx in itertools.product(range(len(slots)), repeat=s.arity):
                value = S.functions[s.name][tuple(slots[i] for i in idx)]
                for j in range(len(slots)):
                    out.append((Eq(App(s.name, tuple(vs[i] for i in idx)), vs[j]), value == slots[j]))
        else:
            for idx in itertools.product(range(len(slots)), repeat=s.arity):
                out.append((Rel(s.name, tuple(vs[i] for i in idx)), tuple(slots[i] for i in idx) in S.relations[s.name]))
    return out


class _Types:
    """Depth-j types of tuples over fixed parameters, by back-and-forth refinement."""

    def __init__(self, S: Structure, params: tuple):
        self.S, self.params = S, params
        self.cache: dict = {}

    def type(self, tup: tuple, j: int):
        key = (tup, j)
        if key not in self.cache:
            atomic = tuple(v for _, v in _atomic_facts(self.S, tup + self.params))
            if j == 0:
                self.cache[key] = atomic
            else:
                self.cache[key] = (atomic, frozenset(self.type(tup + (b,), j - 1) for b in self.S.domain))
        return self.cache[key]

    def formula(self, tup: tuple, j: int) -> Formula:
        """A formula in v(k), .., v(k+len(tup)-1) plus parameter variables that isolates the type."""
        k = len(tup)
        slots = tup + self.params
        lits = [phi if truth else Not(phi) for phi, truth in _atomic_facts(self.S, slots)]
        # atomic facts use v0.. for slots; shift so the tuple sits at v(P)..v(P+k-1) and params at v(0..P-1)
        P = len(self.params)
        perm = {i: P + i for i in range(k)}
        perm.update({k + i: i for i in range(P)})
        # facts not involving the newest variable were fixed one level up, or concern parameters only
        newest = P + k - 1
        parts = [r for r in (_rename(l, perm) for l in lits) if newest in free_vars(r)]
        parts = parts or [Eq(Var(newest), Var(newest))]
        if j > 0:
            seen: dict = {}
            for b in self.S.domain:
                seen.setdefault(self.type(tup + (b,), j - 1), b)
            new = P + k
            succ = [self.formula(tup + (b,), j - 1) for b in seen.values()]
            parts += [Quant(EXISTS, new, f) for f in succ]
            disj = succ[-1]
            for f in reversed(succ[:-1]):
                disj = Bin(OR, f, disj)
            parts.append(Quant(FORALL, new, disj))
        return conjunction(parts)


def _rename_term(t, perm):
    if isinstance(t, Var):
        return Var(perm.get(t.index, t.index))
    return App(t.name, tuple(_rename_term(a, perm) for a in t.args))


def _rename(phi, perm):
    if isinstance(phi, Eq):
        return Eq(_rename_term(phi.left, perm), _rename_term(phi.right, perm))
    if isinstance(phi, Rel):
        return Rel(phi.name, tuple(_rename_term(a, perm) for a in phi.args))
    if isinstance(phi, Not):
        return Not(_rename(phi.body, perm))
    if isinstance(phi, Bin):
        return Bin(phi.op, _rename(phi.left, perm), _rename(phi.right, perm))
    raise ValueError("renaming is only applied to quantifier-free formulas")


def tarski_vaught_check(subset: Sequence, S: Structure, depth: int = 1) -> TVResult:
    """Tarski-Vaught for unnested formulas ``∃x phi`` of quantifier depth <= depth.

    Parameters range over the whole subset.  On failure the witness formula
    has its existential variable at ``v(m)`` where ``m`` is the number of
    parameters, which occupy ``v0 .. v(m-1)``.
    """
    subset = tuple(dict.fromkeys(subset))
    if not subset:
        raise StructureError("the subset must be nonempty")
    if any(a not in S.domain for a in subset):
        raise StructureError("subset elements must come from the domain")
    if depth < 1:
        return TVResult(True)
    types = _Types(S, subset)
    inside = {types.type((b,), depth - 1) for b in subset}
    for b in S.domain:
        if types.type((b,), depth - 1) not in inside:
            return TVResult(False, types.formula((b,), depth - 1), subset)
    return TVResult(True)
