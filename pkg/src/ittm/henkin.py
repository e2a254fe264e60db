"""Henkin completion against a decision oracle, and the term model it yields.

Sentence enumeration.  Henkin constants ``h0, h1, ..`` get Goedel codes just
above the language's.  Sentences are grouped by the largest Henkin constant
they mention (class -1 for none); inside a class they are ordered by weight
(token count plus variable indices) and then by token sequence.  Index
``k = <M + 1, j>`` (Cantor pairing) is the j-th sentence of class M.  Every
sentence of class M mentions h_M, and a sentence from class M' > M sits at
``<M' + 1, j'> > <M + 1, 0>``, so h_m first occurs exactly at index ``<m + 1, 0>``.
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .logic import (
    AND, EXISTS, FORALL, IFF, IMPLIES, OR, App, Bin, Eq, Formula, FormulaError, Language, Not,
    Quant, Rel, Symbol, Var, conjunction, constants_of, decode_formula, depth, encode_formula,
    format_formula, free_vars, is_quantifier_free, parse_formula, sequence_from_number,
    sequence_number, substitute,
)
from .modelkit import Structure, _truth
from .seqreal import cantor_pair, cantor_unpair

FRESH = "h"
_FRESH_NAME = re.compile(rf"^{FRESH}(\d+)$")


class ConsistencyUnknown(RuntimeError):
    def __init__(self, query: Formula):
        super().__init__(f"oracle could not decide: {format_formula(query)}")
        self.query = query


class InconsistentOracle(RuntimeError):
    pass


class InsufficientlyProcessed(ValueError):
    pass


# -- the sentence space -------------------------------------------------------------

def fresh_index(name: str) -> int | None:
    m = _FRESH_NAME.match(name)
    return int(m.group(1)) if m else None


class SentenceSpace:
    """Sentences of a language expanded by the Henkin constants."""

    def __init__(self, language: Language):
        for s in language.symbols.values():
            if fresh_index(s.name) is not None:
                raise ValueError(f"symbol name {s.name!r} collides with the Henkin constants")
        self.language = language
        self.base = max(language.symbols, default=-1) + 1
        self._classes: dict[int, _ClassEnumerator] = {}

    def expanded(self, M: int) -> Language:
        return self.language.with_constants([f"{FRESH}{m}" for m in range(M + 1)])

    def max_fresh(self, phi: Formula) -> int:
        return max((fresh_index(c) for c in constants_of(phi) if fresh_index(c) is not None), default=-1)

    def encode(self, phi: Formula) -> tuple[int, ...]:
        return encode_formula(phi, self.expanded(self.max_fresh(phi)))

    def code(self, phi: Formula) -> int:
        return sequence_number(self.encode(phi))

    def decode(self, tokens) -> Formula:
        if isinstance(tokens, int):
            tokens = sequence_from_number(tokens)
        tokens = tuple(tokens)
        top = max(((t - 9) // 2 for t in tokens if t >= 9 and t % 2), default=-1)
        return decode_formula(tokens, self.expanded(max(top - self.base, -1)))

    def weight(self, phi: Formula) -> int:
        """Token count plus the indices of the variable tokens."""
        return sum(1 + ((t - 8) // 2 if t >= 8 and t % 2 == 0 else 0) for t in self.encode(phi))

    def _class(self, M: int) -> "_ClassEnumerator":
        if M not in self._classes:
            self._classes[M] = _ClassEnumerator(self, M)
        return self._classes[M]

    def sentence(self, k: int) -> Formula:
        a, j = cantor_unpair(k)
        return self._class(a - 1).get(j)

    def index_of(self, phi: Formula) -> int:
        if free_vars(phi):
            raise FormulaError("only sentences are enumerated")
        M = self.max_fresh(phi)
        return cantor_pair(M + 1, self._class(M).position(phi))

    def first_occurrence(self, m: int) -> int:
        return cantor_pair(m + 1, 0)


def enumerate_sentences(language: Language, k: int) -> Formula:
    return SentenceSpace(language).sentence(k)


class _ClassEnumerator:
    """Formulas over the language plus h0..hM, generated weight by weight."""

    def __init__(self, space: SentenceSpace, M: int):
        self.space, self.M = space, M
        lang = space.language
        self.consts = [s.name for _, s in sorted(lang.symbols.items()) if s.kind == "constant"]
        self.consts += [f"{FRESH}{m}" for m in range(M + 1)]
        self.funcs = [s for _, s in sorted(lang.symbols.items()) if s.kind == "function"]
        self.rels = [s for _, s in sorted(lang.symbols.items()) if s.kind == "relation"]
        self.lang = space.expanded(M)
        self.terms: dict[int, list] = {}
        self.formulas: dict[int, list] = {}
        self.members: list[Formula] = []
        self.weight_done = 0
        self.offsets: dict[int, int] = {}

    # each entry is (term or formula, free variables, largest Henkin index)
    def _terms(self, w: int) -> list:
        if w not in self.terms:
            out = []
            if w >= 1:
                out.append((Var(w - 1), frozenset({w - 1}), -1))
            if w == 1:
                out += [(App(c), frozenset(), fresh_index(c) if fresh_index(c) is not None else -1)
                        for c in self.consts]
            for f in self.funcs:
                for args in self._tuples(self._terms, f.arity, w - 1):
                    out.append((App(f.name, tuple(a for a, _, _ in args)),
                                frozenset().union(*(v for _, v, _ in args)), max(m for _, _, m in args)))
            self.terms[w] = out
        return self.terms[w]

    def _tuples(self, source, n: int, w: int):
        if n == 0:
            if w == 0:
                yield ()
            return
        for w1 in range(1, w - n + 2):
            for first in source(w1):
                for rest in self._tuples(source, n - 1, w - w1):
                    yield (first,) + rest

    def _formulas(self, w: int) -> list:
        if w not in self.formulas:
            out = []
            for l, r in self._tuples(self._terms, 2, w - 1):
                out.append((Eq(l[0], r[0]), l[1] | r[1], max(l[2], r[2])))
            for R in self.rels:
                for args in self._tuples(self._terms, R.arity, w - 1):
                    out.append((Rel(R.name, tuple(a for a, _, _ in args)),
                                frozenset().union(*(v for _, v, _ in args)), max(m for _, _, m in args)))
            if w >= 2:
                out += [(Not(p), v, m) for p, v, m in self._formulas(w - 1)]
            for op in (AND, OR, IMPLIES, IFF):
                for l, r in self._tuples(self._formulas, 2, w - 1):
                    out.append((Bin(op, l[0], r[0]), l[1] | r[1], max(l[2], r[2])))
            for i in range(0, w - 2):
                for q in (FORALL, EXISTS):
                    for body, v, m in self._formulas(w - 2 - i):
                        out.append((Quant(q, i, body), v - {i}, m))
            self.formulas[w] = out
        return self.formulas[w]

    def _weight_of(self, phi: Formula) -> int:
        return self.space.weight(phi)

    def _extend(self):
        w = self.weight_done + 1
        batch = [p for p, v, m in self._formulas(w) if not v and m == self.M]
        batch.sort(key=lambda p: encode_formula(p, self.lang))
        self.offsets[w] = len(self.members)
        self.members += batch
        self.weight_done = w

    def get(self, j: int) -> Formula:
        while len(self.members) <= j:
            self._extend()
        return self.members[j]

    def position(self, phi: Formula) -> int:
        w = self._weight_of(phi)
        while self.weight_done < w:
            self._extend()
        start = self.offsets[w]
        end = self.offsets.get(w + 1, len(self.members)) if self.weight_done > w else len(self.members)
        for j in range(start, end):
            if self.members[j] == phi:
                return j
        raise FormulaError(f"sentence not found in its class: {format_formula(phi)}")


# -- oracles --------------------------------------------------------------------------

PROVES, REFUTES, INDEPENDENT, UNKNOWN = "proves", "refutes", "independent", "unknown"


def _goals(phi: Formula, positive: bool = True) -> list:
    """Split into conjuncts, pushing negation through the connectives."""
    if isinstance(phi, Not):
        return _goals(phi.body, not positive)
    if isinstance(phi, Bin):
        if positive and phi.op == AND:
            return _goals(phi.left) + _goals(phi.right)
        if not positive and phi.op == OR:
            return _goals(phi.left, False) + _goals(phi.right, False)
        if not positive and phi.op == IMPLIES:
            return _goals(phi.left) + _goals(phi.right, False)
    return [phi if positive else Not(phi)]


def _split(phi: Formula):
    """Alternatives of a goal that is a disjunction in disguise, else None."""
    positive = True
    while isinstance(phi, Not) and isinstance(phi.body, Not):
        phi = phi.body.body
    if isinstance(phi, Not):
        positive, phi = False, phi.body
    if not isinstance(phi, Bin):
        return None
    a, b = phi.left, phi.right
    if positive and phi.op == OR:
        return [_goals(a), _goals(b)]
    if positive and phi.op == IMPLIES:
        return [_goals(a, False), _goals(b)]
    if not positive and phi.op == AND:
        return [_goals(a, False), _goals(b, False)]
    if phi.op == IFF:
        if positive:
            return [_goals(a) + _goals(b), _goals(a, False) + _goals(b, False)]
        return [_goals(a) + _goals(b, False), _goals(a, False) + _goals(b)]
    return None


class TableOracle:
    """Decides T |- phi by checking every listed model and every reading of the constants.

    ``models`` lists the finite models of T up to the constants, as
    structures for the relation and function symbols; pass ``None`` for a
    pure-equality language, where sentences with quantifier depth r and k
    constants are settled by the sizes 1 .. r + k.
    """

    def __init__(self, language: Language, axioms: Sequence[Formula] = (), models: Sequence[Structure] | None = None):
        self.language = language
        self.space = SentenceSpace(language)
        self.axioms = tuple(axioms)
        self.models = None if models is None else tuple(models)
        if self.models is None and any(s.kind != "constant" for s in language.symbols.values()):
            raise ValueError("listed models are required unless the language is pure equality")
        self.queries = 0

    def _models_for(self, phi: Formula):
        if self.models is not None:
            return [(m, _pure(m)) for m in self.models]
        goals = [phi, *self.axioms]
        bound = max(map(depth, goals)) + len(set().union(*map(constants_of, goals)))
        base = Language({c: s for c, s in self.language.symbols.items() if s.kind != "constant"})
        return [(Structure(base, tuple(range(n))), True) for n in range(1, max(bound, 1) + 1)]

    def satisfiable(self, phi: Formula) -> bool:
        goals = list(self.axioms) + [phi]
        for model, symmetric in self._models_for(phi):
            if _search(model, goals, symmetric):
                return True
        return False

    def decide(self, phi) -> str:
        if not isinstance(phi, (Eq, Rel, Not, Bin, Quant)):
            phi = self.space.decode(phi)
        self.queries += 1
        can_fail = self.satisfiable(Not(phi))
        can_hold = self.satisfiable(phi)
        if not can_fail and not can_hold:
            raise InconsistentOracle("the theory has no model among those listed")
        return PROVES if not can_fail else REFUTES if not can_hold else INDEPENDENT


def _pure(m: Structure) -> bool:
    return not m.relations and not m.functions


def _search(model: Structure, goals: list, symmetric: bool) -> bool:
    """Is there a reading of the constants making every goal true in the model?"""
    flat = [g for goal in goals for g in _goals(goal)]
    # goals sharing no constants can be satisfied independently
    parent: dict = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    consts = [sorted(constants_of(g)) for g in flat]
    for cs in consts:
        for c in cs[1:]:
            parent[find(c)] = find(cs[0])
    groups: dict = {}
    for g, cs in zip(flat, consts):
        groups.setdefault(find(cs[0]) if cs else None, []).append(g)
    for key, gs in groups.items():
        S = Structure(model.language, model.domain, {}, model.functions, model.relations)
        if not _dfs(S, _order(gs), {}, symmetric):
            return False
    return True


def _order(goals: list) -> list:
    """Goals reordered so each shares constants with those before it where possible."""
    rest = list(goals)
    out, seen = [], set()
    while rest:
        k = next((i for i, g in enumerate(rest) if constants_of(g) & seen), None)
        if k is None:
            k = min(range(len(rest)), key=lambda i: len(constants_of(rest[i])))
        g = rest.pop(k)
        out.append(g)
        seen |= constants_of(g)
    return out


def _dfs(S: Structure, goals: list, env: dict, symmetric: bool) -> bool:
    """Depth-first search over readings, with an explicit stack; goals form a cons list."""
    todo_list = None
    for g in reversed(goals):
        todo_list = (g, todo_list)
    stack = [(todo_list, dict(env))]
    while stack:
        cell, env = stack.pop()
        if cell is None:
            return True
        g, rest = cell
        alts = _split(g)
        if alts is not None:
            for alt in reversed(alts):
                cons = rest
                for h in reversed(alt):
                    cons = (h, cons)
                stack.append((cons, env))
            continue
        todo = sorted(c for c in constants_of(g) if c not in env)
        found = []
        for ext in _extensions(S, todo, env, symmetric):
            S.constants.clear()
            S.constants.update(ext)
            if _truth(S, g, {}):
                found.append(ext)
        stack.extend((rest, ext) for ext in reversed(found))
    return False


def _extensions(S: Structure, todo: list, env: dict, symmetric: bool):
    if not todo:
        yield env
        return
    c, more = todo[0], todo[1:]
    if symmetric:
        used = set(env.values())
        fresh = next((d for d in S.domain if d not in used), None)
        options = [d for d in S.domain if d in used] + ([fresh] if fresh is not None else [])
    else:
        options = S.domain
    for d in options:
        yield from _extensions(S, more, {**env, c: d}, symmetric)


class ProverOracle:
    """A tableau prover with a bound on constants per branch; it may answer ``unknown``.

    Proofs come from closed tableaux; non-theorems from open branches that
    saturate (every universal instantiated at every constant), which describe
    a model.  Relational languages with constants only.
    """

    def __init__(self, language: Language, axioms: Sequence[Formula] = (), depth: int = 6, max_steps: int = 200_000):
        if any(s.kind == "function" for s in language.symbols.values()):
            raise ValueError("the prover backend handles relational languages only")
        self.language = language
        self.space = SentenceSpace(language)
        self.axioms = tuple(axioms)
        self.depth = depth
        self.max_steps = max_steps
        self.queries = 0

    def satisfiable(self, phi: Formula) -> str:
        """'sat', 'unsat' or 'unknown'."""
        return _Tableau(self.depth, self.max_steps).run(list(self.axioms) + [phi])

    def decide(self, phi) -> str:
        if not isinstance(phi, (Eq, Rel, Not, Bin, Quant)):
            phi = self.space.decode(phi)
        self.queries += 1
        fail = self.satisfiable(Not(phi))
        hold = self.satisfiable(phi)
        if fail == "unsat" and hold == "unsat":
            raise InconsistentOracle("the axioms are contradictory")
        if fail == "unsat":
            return PROVES
        if hold == "unsat":
            return REFUTES
        if fail == "sat" and hold == "sat":
            return INDEPENDENT
        return UNKNOWN


def _nnf(phi: Formula, positive: bool = True) -> Formula:
    if isinstance(phi, Not):
        return _nnf(phi.body, not positive)
    if isinstance(phi, Bin):
        a, b = phi.left, phi.right
        if phi.op == IMPLIES:
            return _nnf(Bin(OR, Not(a), b), positive)
        if phi.op == IFF:
            return _nnf(Bin(OR, Bin(AND, a, b), Bin(AND, Not(a), Not(b))), positive)
        op = phi.op if positive else (OR if phi.op == AND else AND)
        return Bin(op, _nnf(a, positive), _nnf(b, positive))
    if isinstance(phi, Quant):
        op = phi.op if positive else (EXISTS if phi.op == FORALL else FORALL)
        return Quant(op, phi.var, _nnf(phi.body, positive))
    return phi if positive else Not(phi)


class _Tableau:
    def __init__(self, depth: int, max_steps: int):
        self.depth, self.max_steps, self.steps = depth, max_steps, 0

    def run(self, formulas: list) -> str:
        consts = set().union(*map(constants_of, formulas)) if formulas else set()
        return self.branch([_nnf(f) for f in formulas], [], [], consts, {}, 0)

    def branch(self, pending, lits, gammas, consts, done, fresh) -> str:
        pending, lits, gammas, consts = list(pending), list(lits), list(gammas), set(consts)
        done = {k: set(v) for k, v in done.items()}
        unknown = False
        while True:
            while pending:
                self.steps += 1
                if self.steps > self.max_steps:
                    return "unknown"
                f = pending.pop()
                if isinstance(f, Bin) and f.op == AND:
                    pending += [f.right, f.left]
                elif isinstance(f, Bin):
                    results = [self.branch(pending + [alt], lits, gammas, consts, done, fresh)
                               for alt in (f.left, f.right)]
                    if "sat" in results:
                        return "sat"
                    return "unknown" if "unknown" in results else "unsat"
                elif isinstance(f, Quant) and f.op == EXISTS:
                    if len(consts) >= self.depth:
                        return "unknown"
                    while f"_t{fresh}" in consts:
                        fresh += 1
                    c = f"_t{fresh}"
                    consts.add(c)
                    pending.append(substitute(f.body, f.var, App(c)))
                elif isinstance(f, Quant):
                    gammas.append(f)
                    done.setdefault(f, set())
                else:
                    lits.append(f)
                    if _closed(lits):
                        return "unsat"
            if not consts and gammas:
                consts.add("_t_any")
            added = False
            for g in gammas:
                for c in sorted(consts - done[g]):
                    done[g].add(c)
                    pending.append(substitute(g.body, g.var, App(c)))
                    added = True
            if not added:
                return "sat"


def _closed(lits: list) -> bool:
    parent: dict = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            x = parent[x]
        return x

    for l in lits:
        if isinstance(l, Eq):
            parent[find(l.left.name)] = find(l.right.name)
    pos, neg = set(), []
    for l in lits:
        if isinstance(l, Rel):
            pos.add((l.name, tuple(find(a.name) for a in l.args)))
    for l in lits:
        if isinstance(l, Not):
            a = l.body
            if isinstance(a, Eq) and find(a.left.name) == find(a.right.name):
                return True
            if isinstance(a, Rel) and (a.name, tuple(find(t.name) for t in a.args)) in pos:
                return True
    return False


# -- the Henkin construction ----------------------------------------------------------

@dataclass(frozen=True)
class Commitment:
    sentence: Formula
    index: int | None  # enumeration index, or None for a witness commitment
    positive: bool = True

    @property
    def formula(self) -> Formula:
        return self.sentence if self.positive else Not(self.sentence)


@dataclass(frozen=True)
class HenkinState:
    processed: int = 0
    commitments: tuple = ()
    witnesses: tuple = ()  # (enumeration index, Henkin index)
    constants_used: frozenset = frozenset()

    def formulas(self) -> list[Formula]:
        return [c.formula for c in self.commitments]


def _henkin_indices(phi: Formula) -> set:
    return {fresh_index(c) for c in constants_of(phi) if fresh_index(c) is not None}


def henkin_step(state: HenkinState, oracle, space: SentenceSpace | None = None) -> HenkinState:
    space = space or getattr(oracle, "space", None) or SentenceSpace(oracle.language)
    n = state.processed
    sigma = space.sentence(n)
    used = set(state.constants_used) | _henkin_indices(sigma)
    prior = state.formulas()
    query = Implies_(prior, Not(sigma))
    verdict = oracle.decide(query)
    if verdict == UNKNOWN:
        raise ConsistencyUnknown(query)
    positive = verdict != PROVES
    commitments = state.commitments + (Commitment(sigma, n, positive),)
    witnesses = state.witnesses
    if positive and isinstance(sigma, Quant) and sigma.op == EXISTS:
        m = next(k for k in itertools.count() if k not in used)
        used.add(m)
        commitments += (Commitment(substitute(sigma.body, sigma.var, App(f"{FRESH}{m}")), None),)
        witnesses += ((n, m),)
    return HenkinState(n + 1, commitments, witnesses, frozenset(used))


def Implies_(premises: list, conclusion: Formula) -> Formula:
    return Bin(IMPLIES, conjunction(premises), conclusion) if premises else conclusion


def henkin_run(oracle, N: int, state: HenkinState | None = None) -> HenkinState:
    if N < 1:
        raise ValueError("N must be at least 1")
    space = getattr(oracle, "space", None) or SentenceSpace(oracle.language)
    state = state or HenkinState()
    for _ in range(N):
        state = henkin_step(state, oracle, space)
    return state


# -- term model -------------------------------------------------------------------

@dataclass(frozen=True)
class TermModel:
    structure: Structure  # domain: least representative constant names
    classes: dict  # representative -> tuple of constants
    unsettled: tuple  # constants whose equality with the representatives is not decided
    incomplete: tuple  # (symbol, argument tuple) entries the commitments leave open


def _constant_order(space: SentenceSpace, names) -> list:
    lang_consts = {s.name: c for c, s in space.language.symbols.items() if s.kind == "constant"}
    key = lambda n: lang_consts[n] if n in lang_consts else space.base + fresh_index(n)
    return sorted(names, key=key)


def term_model(state: HenkinState, oracle) -> TermModel:
    """Classes of constants under provable equality, on least representatives.

    A constant is unsettled when the committed theory neither proves nor
    refutes its equality with some representative; those are reported, not
    placed.  Relations hold on representatives when the committed theory
    proves them; entries it leaves open are listed as incomplete.
    """
    if state.processed == 0:
        raise InsufficientlyProcessed("no sentences processed")
    space = getattr(oracle, "space", None) or SentenceSpace(oracle.language)
    prior = state.formulas()
    lang = oracle.language
    names = set().union(*(constants_of(f) for f in prior)) if prior else set()
    names |= {s.name for s in lang.symbols.values() if s.kind == "constant"}
    if not names:
        raise InsufficientlyProcessed("the commitments mention no constants")

    def proves(phi):
        v = oracle.decide(Implies_(prior, phi))
        if v == UNKNOWN:
            raise ConsistencyUnknown(Implies_(prior, phi))
        return v == PROVES

    reps: list[str] = []
    classes: dict[str, list] = {}
    unsettled = []
    for d in _constant_order(space, names):
        home, open_pair = None, False
        for c in reps:
            if proves(Eq(App(c), App(d))):
                home = c
                break
            if not proves(Not(Eq(App(c), App(d)))):
                open_pair = True
        if home is not None:
            classes[home].append(d)
        elif open_pair:
            unsettled.append(d)
        else:
            reps.append(d)
            classes[d] = [d]
    if not reps:
        raise InsufficientlyProcessed("no constant has a settled class")
    constants, functions, relations, incomplete = {}, {}, {}, []
    for s in lang.symbols.values():
        if s.kind == "constant":
            if s.name in unsettled:
                incomplete.append((s.name, ()))
            else:
                constants[s.name] = next(r for r, cl in classes.items() if s.name in cl)
        elif s.kind == "relation":
            rows = set()
            for args in itertools.product(reps, repeat=s.arity):
                atom = Rel(s.name, tuple(App(a) for a in args))
                if proves(atom):
                    rows.add(args)
                elif not proves(Not(atom)):
                    incomplete.append((s.name, args))
            relations[s.name] = frozenset(rows)
        else:
            table = {}
            for args in itertools.product(reps, repeat=s.arity):
                term = App(s.name, tuple(App(a) for a in args))
                value = next((r for r in reps if proves(Eq(term, App(r)))), None)
                if value is None:
                    incomplete.append((s.name, args))
                    value = reps[0]
                table[args] = value
            functions[s.name] = table
    structure = Structure(lang, tuple(reps), constants, functions, relations)
    return TermModel(structure, {r: tuple(cl) for r, cl in classes.items()}, tuple(unsettled), tuple(incomplete))


def model_assignment(model: TermModel) -> dict:
    """Constant name -> representative, for evaluating committed sentences."""
    return {c: r for r, cl in model.classes.items() for c in cl}


def holds_in_term_model(model: TermModel, phi: Formula) -> bool | None:
    """Truth of a sentence in the term model; None if it mentions unsettled constants."""
    where = model_assignment(model)
    if not constants_of(phi) <= where.keys():
        return None
    S = model.structure
    env = dict(S.constants)
    env.update(where)
    T = Structure(Language({c: s for c, s in S.language.symbols.items() if s.kind != "constant"}),
                  S.domain, env, S.functions, S.relations)
    return _truth(T, phi, {})


# -- theory files -----------------------------------------------------------------

@dataclass(frozen=True)
class TheorySpec:
    language: Language
    axioms: tuple
    backend: str = "table"
    depth: int = 6
    models: tuple | None = None


def theory_from_json(data: dict) -> TheorySpec:
    from .modelkit import language_from_json, make_structure
    language = language_from_json(data.get("language", {}))
    axioms = tuple(parse_formula(t, language) for t in data.get("axioms", []))
    oracle = data.get("oracle", {})
    backend = oracle.get("backend", "table")
    if backend not in ("table", "prover"):
        raise ValueError(f"unknown oracle backend {backend!r}")
    models = None
    if "models" in oracle:
        base = Language({c: s for c, s in language.symbols.items() if s.kind != "constant"})
        models = tuple(
            make_structure(base, range(m["size"]),
                           functions={k: {tuple(a): v for a, v in rows} for k, rows in m.get("functions", {}).items()},
                           relations=m.get("relations", {}))
            for m in oracle["models"])
    elif "sizes" in oracle:
        base = Language({c: s for c, s in language.symbols.items() if s.kind != "constant"})
        models = tuple(Structure(base, tuple(range(n))) for n in oracle["sizes"])
    return TheorySpec(language, axioms, backend, int(oracle.get("depth", 6)), models)


def load_theory(path) -> TheorySpec:
    with open(path) as fh:
        return theory_from_json(json.load(fh))


def make_oracle(spec: TheorySpec):
    if spec.backend == "prover":
        return ProverOracle(spec.language, spec.axioms, spec.depth)
    return TableOracle(spec.language, spec.axioms, spec.models)


PURE_EQUALITY = Language({})
EXACTLY_TWO = parse_formula("exists x. exists y. (~(x = y) & forall z. (z = x | z = y))", PURE_EQUALITY)


def exactly_two_oracle() -> TableOracle:
    return TableOracle(PURE_EQUALITY, [EXACTLY_TWO], [Structure(PURE_EQUALITY, (0, 1))])
