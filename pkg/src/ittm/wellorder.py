"""Relation codes and well-order decisions.

Orders are strict throughout: ``i < j`` is the edge ``(i, j)`` and no element
is related to itself.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Union

from .assemble import INPUT, OUTPUT, SCRATCH, Set, Stop, Test, compile_flowchart
from .ordinal import Ordinal
from .seqreal import FiniteSupport, SeqReal, cantor_pair, cantor_unpair


@dataclass(frozen=True)
class RelationCode:
    edges: frozenset = frozenset()
    isolated: frozenset = frozenset()

    @classmethod
    def of(cls, edges: Iterable, isolated: Iterable = ()) -> "RelationCode":
        return cls(frozenset((int(i), int(j)) for i, j in edges), frozenset(map(int, isolated)))

    @property
    def field(self) -> frozenset:
        return frozenset(x for e in self.edges for x in e) | self.isolated

    def holds(self, i: int, j: int) -> bool:
        return (i, j) in self.edges

    def to_json(self) -> dict:
        return {"edges": sorted(map(list, self.edges)), "isolated": sorted(self.isolated)}


def relation_from_json(data: dict) -> RelationCode:
    return RelationCode.of(data.get("edges", []), data.get("isolated", []))


def load_relation(path) -> RelationCode:
    with open(path) as fh:
        return relation_from_json(json.load(fh))


def relation_to_real(r: RelationCode) -> FiniteSupport:
    return FiniteSupport(frozenset(cantor_pair(i, j) for i, j in r.edges))


def relation_from_real(x: SeqReal, field_bound: int | None = None) -> RelationCode:
    """Edges (i, j) with i, j below ``field_bound`` whose pair bit is set."""
    if not isinstance(x, FiniteSupport):
        raise ValueError("field not finitely bounded: the real has infinitely many set bits")
    pairs = [cantor_unpair(z) for z in x.ones]
    if field_bound is None:
        field_bound = 1 + max((max(p) for p in pairs), default=-1)
    if any(max(p) >= field_bound for p in pairs):
        raise ValueError(f"field not finitely bounded: set bits reach beyond {field_bound}")
    return RelationCode(frozenset(pairs))


# -- native decision ---------------------------------------------------------------

@dataclass(frozen=True)
class WellOrder:
    order_type: Ordinal


@dataclass(frozen=True)
class NotLinear:
    violation: tuple  # (kind, *elements)


@dataclass(frozen=True)
class IllFounded:
    cycle: tuple


Decision = Union[WellOrder, NotLinear, IllFounded]


def linearity_violation(r: RelationCode) -> tuple | None:
    dom = sorted(r.field)
    for a in dom:
        if r.holds(a, a):
            return ("reflexive", a)
    for a in dom:
        for b in dom:
            if not r.holds(a, b):
                continue
            for c in dom:
                if r.holds(b, c) and not r.holds(a, c):
                    return ("transitivity", a, b, c)
    for a in dom:
        for b in dom:
            if a < b and not r.holds(a, b) and not r.holds(b, a):
                return ("totality", a, b)
    return None


def _least(r: RelationCode, dom) -> int | None:
    for a in sorted(dom):
        if not any(r.holds(b, a) for b in dom):
            return a
    return None


def _descending_cycle(r: RelationCode, dom) -> tuple:
    # every element has a predecessor, so walking predecessors must revisit one
    path, seen = [], {}
    a = min(dom)
    while a not in seen:
        seen[a] = len(path)
        path.append(a)
        a = min(b for b in dom if r.holds(b, a))
    return tuple(path[seen[a]:])


def decide_well_order(r: RelationCode) -> Decision:
    bad = linearity_violation(r)
    if bad:
        return NotLinear(bad)
    remaining = set(r.field)
    count = 0
    while remaining:
        least = _least(r, remaining)
        if least is None:
            return IllFounded(_descending_cycle(r, remaining))
        remaining.discard(least)
        count += 1
    return WellOrder(Ordinal.of(count))


def same_order_type(r1: RelationCode, r2: RelationCode) -> bool:
    d1, d2 = decide_well_order(r1), decide_well_order(r2)
    if not isinstance(d1, WellOrder) or not isinstance(d2, WellOrder):
        raise ValueError("both relations must be well-orders")
    return d1.order_type == d2.order_type


def erase_least(r: RelationCode) -> RelationCode:
    if not r.field:
        raise ValueError("cannot erase from an empty relation")
    if linearity_violation(r):
        raise ValueError("erase_least needs a linear order")
    least = _least(r, r.field)
    if least is None:
        raise ValueError("relation has no least element")
    edges = frozenset(e for e in r.edges if least not in e)
    # elements left without edges stay in the field as isolated points
    left = r.field - {least} - {x for e in edges for x in e}
    return RelationCode(edges, frozenset(left))


def chain(elements) -> RelationCode:
    """The strict linear order listing ``elements`` from least to greatest."""
    elements = list(elements)
    edges = {(a, b) for k, a in enumerate(elements) for b in elements[k + 1:]}
    return RelationCode(frozenset(edges), frozenset(elements) if len(elements) == 1 else frozenset())


def linear_orders(field_elements) -> list[RelationCode]:
    return [chain(p) for p in permutations(field_elements)]


# -- the machine version --------------------------------------------------------------

WO_WINDOW = 4  # the program inspects relations on {0, .., WO_WINDOW - 1}
_FLAG = 0


def _guess_cell(e: int) -> int:
    return 1 + e


def _reject_conditions(n: int) -> list[list[tuple[int, int, int]]]:
    """Conjunctions of (i, j, bit) literals, any of which refutes linearity."""
    conds = [[(i, i, 1)] for i in range(n)]
    conds += [[(i, j, 1), (j, i, 1)] for i in range(n) for j in range(i + 1, n)]
    conds += [[(i, j, 1), (j, k, 1), (i, k, 0)]
              for i in range(n) for j in range(n) for k in range(n) if len({i, j, k}) == 3]
    for i in range(n):
        for j in range(i + 1, n):
            others = [k for k in range(n) if k not in (i, j)]
            touch_i = [(i, k) for k in others] + [(k, i) for k in others]
            touch_j = [(j, k) for k in others] + [(k, j) for k in others]
            for a in touch_i:
                for b in touch_j:
                    conds.append([(i, j, 0), (j, i, 0), (*a, 1), (*b, 1)])
    return conds


def build_wo_program(n: int = WO_WINDOW):
    """ITTM program deciding well-orderedness of relations on {0, .., n-1}.

    After a finite linearity check it repeatedly searches for the least
    element, cycling through candidates forever and flashing a flag whenever
    the guess (kept one-hot on the scratch tape) improves.  At each limit a
    lit flag means the guess never settled; otherwise the settled guess is
    erased from the input and the search restarts.  An empty field accepts.
    """
    conds = _reject_conditions(n)
    rel = lambda i, j: cantor_pair(i, j)

    def touching(e):
        return [(e, k) for k in range(n) if k != e] + [(k, e) for k in range(n) if k != e]

    def next_candidate(g, c):
        c = (c + 1) % n
        return ("loop", g, (c + 1) % n if c == g else c)

    def expand(key):
        tag = key[0]
        if tag == "check":
            ci, li = key[1], key[2]
            if ci == len(conds):
                return expand(("field", 0, 0))
            i, j, bit = conds[ci][li]
            holds = ("reject",) if li + 1 == len(conds[ci]) else ("check", ci, li + 1)
            fails = ("check", ci + 1, 0)
            return Test(INPUT, rel(i, j), *((holds, fails) if bit == 0 else (fails, holds)))
        if tag == "field":
            e, k = key[1], key[2]
            if e == n:
                return expand(("accept",))
            edges = touching(e)
            skip = ("field", e + 1, 0)
            more = ("field", e, k + 1) if k + 1 < len(edges) else skip
            return Test(INPUT, rel(*edges[k]), more, ("init", e))
        if tag == "init":
            e = key[1]
            return Set(SCRATCH, _guess_cell(e), 1, next_candidate(e, e))
        if tag == "loop":
            g, c = key[1], key[2]
            return Test(INPUT, rel(c, g), next_candidate(g, c), ("switch", g, c, 0))
        if tag == "switch":
            g, c, s = key[1], key[2], key[3]
            after = ("switch", g, c, s + 1)
            if s == 0:
                return Set(SCRATCH, _guess_cell(g), 0, after)
            if s == 1:
                return Set(SCRATCH, _guess_cell(c), 1, after)
            if s == 2:
                return Set(SCRATCH, _FLAG, 1, after)
            return Set(SCRATCH, _FLAG, 0, next_candidate(c, c))
        if tag == "onlimit":
            return Test(SCRATCH, _FLAG, ("find", 0), ("reject",))
        if tag == "find":
            e = key[1]
            if e == n:
                return expand(("reject",))
            return Test(SCRATCH, _guess_cell(e), ("find", e + 1), ("erase", e, 0))
        if tag == "erase":
            e, k = key[1], key[2]
            edges = touching(e)
            if k == len(edges):
                return Set(SCRATCH, _guess_cell(e), 0, ("field", 0, 0))
            return Set(INPUT, rel(*edges[k]), 0, ("erase", e, k + 1))
        if tag == "reject":
            return Set(OUTPUT, 0, 0, ("stop",))
        if tag == "accept":
            return Set(OUTPUT, 0, 1, ("stop",))
        if tag == "stop":
            return Stop()
        raise KeyError(key)

    return compile_flowchart(expand, ("check", 0, 0), ("onlimit",))


def vm_decide_well_order(r: RelationCode, budget: Ordinal | None = None, burst_limit: int = 10_000):
    """Run the shipped decider on r: True, False, or the run outcome if it did not halt."""
    from .ordinal import parse_ordinal
    from .vm import Halted, run, shipped_program
    from .seqreal import bit_at
    if any(e >= WO_WINDOW for e in r.field):
        raise ValueError(f"the shipped decider reads fields inside {{0..{WO_WINDOW - 1}}}")
    budget = budget or parse_ordinal(f"w*{len(r.field) + 2}")
    outcome = run(shipped_program("wo"), relation_to_real(r), budget, burst_limit)
    if isinstance(outcome, Halted):
        return bool(bit_at(outcome.output, 0))
    return outcome
