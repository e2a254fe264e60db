"""Codes of hereditarily finite sets.

An HC code is a point together with a relation whose edge ``(a, b)`` says that
``a`` is an element of ``b``.  The point may be an isolated node, which is how
the empty set gets a code.  Collapsed values are nested frozensets.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from .logic import OR, Bin, Eq, Formula, Language, Not, Symbol, Var
from .modelkit import Structure, _truth, tarski_eval
from .wellorder import RelationCode, relation_from_json

HFValue = frozenset
EMPTY: HFValue = frozenset()
MEMBERSHIP = Language({0: Symbol("∈", "relation", 2)})


class InvalidCode(ValueError):
    pass


@dataclass(frozen=True)
class HCCode:
    point: int
    relation: RelationCode

    @property
    def nodes(self) -> frozenset:
        return self.relation.field | {self.point}

    @cached_property
    def _preds(self) -> dict:
        out: dict = {n: set() for n in self.nodes}
        for a, b in self.relation.edges:
            out[b].add(a)
        return {n: frozenset(v) for n, v in out.items()}

    def predecessors(self, b: int) -> frozenset:
        return self._preds.get(b, frozenset())

    def to_json(self) -> dict:
        return {"point": self.point, **self.relation.to_json()}

    @classmethod
    def of(cls, point: int, edges=(), isolated=()) -> "HCCode":
        return cls(int(point), RelationCode.of(edges, isolated))


def code_from_json(data: dict) -> HCCode:
    return HCCode(int(data["point"]), relation_from_json(data))


def load_code(path) -> HCCode:
    with open(path) as fh:
        return code_from_json(json.load(fh))


# -- validity ------------------------------------------------------------------------

def _acyclic(nodes, edges) -> bool:
    preds: dict = {n: [] for n in nodes}
    for a, b in edges:
        preds[b].append(a)
    state: dict = {}

    for root in nodes:
        if root in state:
            continue
        state[root] = 1
        stack = [(root, iter(preds[root]))]
        while stack:
            n, it = stack[-1]
            a = next(it, None)
            if a is None:
                state[n] = 2
                stack.pop()
            elif state.get(a) == 1:
                return False
            elif a not in state:
                state[a] = 1
                stack.append((a, iter(preds[a])))
    return True


def extensionality_violation(c: HCCode) -> tuple | None:
    seen: dict = {}
    for n in sorted(c.nodes):
        key = c.predecessors(n)
        if key in seen:
            return seen[key], n
        seen[key] = n
    return None


def is_hc_code(c: HCCode) -> bool:
    return _acyclic(c.nodes, c.relation.edges) and extensionality_violation(c) is None


def _require(*codes: HCCode):
    for c in codes:
        if not _acyclic(c.nodes, c.relation.edges):
            raise InvalidCode("the relation has a cycle")
        bad = extensionality_violation(c)
        if bad:
            raise InvalidCode(f"extensionality fails: nodes {bad[0]} and {bad[1]} have the same elements")


# -- collapse ------------------------------------------------------------------------

def collapse_all(c: HCCode) -> dict[int, HFValue]:
    """The Mostowski collapse of every node."""
    _require(c)
    out: dict[int, HFValue] = {}

    def value(n):
        if n not in out:
            out[n] = frozenset(value(a) for a in c.predecessors(n))
        return out[n]

    for n in c.nodes:
        value(n)
    return out


def collapse(c: HCCode) -> HFValue:
    return collapse_all(c)[c.point]


def hf_literal(v: HFValue) -> str:
    return "{" + ", ".join(sorted(hf_literal(u) for u in v)) + "}"


def parse_hf(text: str) -> HFValue:
    text = text.replace(" ", "")
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(text) or text[pos] != "{":
            raise ValueError(f"expected '{{' at offset {pos}")
        pos += 1
        items = []
        if pos < len(text) and text[pos] == "}":
            pos += 1
            return frozenset()
        while True:
            items.append(parse())
            if pos < len(text) and text[pos] == ",":
                pos += 1
                continue
            if pos < len(text) and text[pos] == "}":
                pos += 1
                return frozenset(items)
            raise ValueError(f"expected ',' or '}}' at offset {pos}")

    v = parse()
    if pos != len(text):
        raise ValueError("trailing input after set literal")
    return v


def hf_rank(v: HFValue) -> int:
    return 1 + max(map(hf_rank, v)) if v else 0


def transitive_closure(v: HFValue) -> frozenset:
    out, todo = set(), list(v)
    while todo:
        u = todo.pop()
        if u not in out:
            out.add(u)
            todo.extend(u)
    return frozenset(out)


def code_of(v: HFValue) -> HCCode:
    """A code of v whose nodes are tc({v}), numbered by rank then literal."""
    members = sorted(transitive_closure(v) | {v}, key=lambda u: (hf_rank(u), hf_literal(u)))
    index = {u: i for i, u in enumerate(members)}
    edges = [(index[a], index[b]) for b in members for a in b]
    return HCCode.of(index[v], edges, [index[v]])


# -- equivalence and membership via isomorphism -----------------------------------

def below(c: HCCode, n: int) -> frozenset:
    """n together with everything E-below it."""
    out, todo = set(), [n]
    while todo:
        m = todo.pop()
        if m not in out:
            out.add(m)
            todo.extend(c.predecessors(m))
    return frozenset(out)


def _pointed_isomorphic(x: HCCode, n: int, y: HCCode, m: int) -> bool:
    A, B = below(x, n), below(y, m)
    if len(A) != len(B):
        return False
    ea = {(a, b) for a, b in x.relation.edges if a in A and b in A}
    eb = {(a, b) for a, b in y.relation.edges if a in B and b in B}
    if len(ea) != len(eb):
        return False
    indeg = lambda nodes, edges: {v: sum(1 for _, b in edges if b == v) for v in nodes}
    da, db = indeg(A, ea), indeg(B, eb)
    order = sorted(A, key=lambda v: (v != n, -da[v]))
    pi: dict = {}
    used: set = set()

    def extend(k):
        if k == len(order):
            return True
        a = order[k]
        options = [m] if a == n else [b for b in B if b not in used and db[b] == da[a] and b != m]
        for b in options:
            ok = all(((a, a2) in ea) == ((b, pi[a2]) in eb) and ((a2, a) in ea) == ((pi[a2], b) in eb)
                     for a2 in pi)
            if ok:
                pi[a] = b
                used.add(b)
                if extend(k + 1):
                    return True
                del pi[a]
                used.discard(b)
        return False

    return extend(0)


def hc_equiv(x: HCCode, y: HCCode) -> bool:
    _require(x, y)
    return _pointed_isomorphic(x, x.point, y, y.point)


def hc_elem(x: HCCode, y: HCCode) -> bool:
    _require(x, y)
    return any(_pointed_isomorphic(x, x.point, y, m) for m in y.predecessors(y.point))


# -- satisfaction and L-levels ------------------------------------------------------

def as_structure(c: HCCode) -> Structure:
    """The structure <nodes, E> over the membership language."""
    nodes = tuple(sorted(c.nodes))
    return Structure(MEMBERSHIP, nodes, {}, {}, {"∈": frozenset(c.relation.edges)})


def hc_satisfies(c: HCCode, phi: Formula, assignment: Mapping[int, int] | None = None) -> bool:
    _require(c)
    assignment = dict(assignment or {})
    stray = [v for v in assignment.values() if v not in c.nodes]
    if stray:
        raise InvalidCode(f"assignment uses {stray[0]}, which is not a node of the code")
    return tarski_eval(as_structure(c), phi, assignment)


def structure_code(nodes, edges) -> RelationCode:
    """A code of a whole transitive set: every node is an element."""
    return RelationCode(frozenset(edges), frozenset(nodes))


def collapse_structure(code: RelationCode) -> frozenset:
    """The transitive set coded by a structure code."""
    nodes = code.field
    if not nodes:
        return frozenset()
    values = collapse_all(HCCode(min(nodes), code))
    return frozenset(values[n] for n in nodes)


def _equality_disjunction(params: tuple) -> Formula:
    """x = p1 or ... or x = pk, with x as v0 and p_i as v_i; the empty case is x != x."""
    if not params:
        return Not(Eq(Var(0), Var(0)))
    phi = Eq(Var(0), Var(len(params)))
    for i in range(len(params) - 1, 0, -1):
        phi = Bin(OR, Eq(Var(0), Var(i)), phi)
    return phi


def build_L_level(level: RelationCode) -> RelationCode:
    """The next L-level of a code of a finite transitive set.

    Every subset of a finite structure is defined by an equality disjunction
    whose parameters are its own elements, so running over those formulas
    and all parameter sets yields every definable subset.  Each subset is
    read off by evaluating the formula at every element.
    """
    nodes = sorted(level.field)
    if nodes:
        probe = HCCode(nodes[0], level)
        if not _acyclic(probe.nodes, level.edges):
            raise InvalidCode("not a transitive set code: the relation has a cycle")
        bad = extensionality_violation(probe)
        if bad:
            raise InvalidCode(f"not a transitive set code: nodes {bad[0]} and {bad[1]} have the same elements")
    S = Structure(MEMBERSHIP, tuple(nodes) or (None,), {}, {}, {"∈": frozenset(level.edges)})
    extension = {n: frozenset(a for a, b in level.edges if b == n) for n in nodes}
    existing = {ext: n for n, ext in extension.items()}
    fresh = max(nodes, default=-1) + 1
    new_edges = set(level.edges)
    new_nodes = set(nodes)
    for k in range(len(nodes) + 1):
        phi = _equality_disjunction(tuple(range(k)))
        for params in itertools.combinations(nodes, k):
            env = {i + 1: p for i, p in enumerate(params)}
            subset = frozenset(a for a in nodes if _truth(S, phi, {**env, 0: a}))
            if subset in existing:
                continue
            existing[subset] = fresh
            new_nodes.add(fresh)
            new_edges.update((a, fresh) for a in subset)
            fresh += 1
    return structure_code(new_nodes, new_edges)


def L_level(n: int) -> RelationCode:
    level = structure_code((), ())
    for _ in range(n):
        level = build_L_level(level)
    return level
