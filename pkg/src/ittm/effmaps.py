"""Reductions, and the back-and-forth bijections of Cantor-Schroeder-Bernstein and Myhill.

Injections carry their inverse and range test with them.  For a in A the
zig-zag chain is ``a, g^-1(a), f^-1 g^-1(a), g^-1 f^-1 g^-1(a), ...``; a
lies in A0 when the chain stops at a point of B outside the range of f.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping

from .seqreal import format_seqreal, parse_seqreal


class HypothesisError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class EffectiveInjection:
    """A finite injective table; ``universe`` is its intended domain."""

    universe: frozenset
    table: Mapping

    def __post_init__(self):
        seen: dict = {}
        for x, y in self.table.items():
            if y in seen:
                raise HypothesisError(f"not injective: {seen[y]!r} and {x!r} both map to {y!r}", (seen[y], x))
            seen[y] = x
        object.__setattr__(self, "_inverse", seen)

    @classmethod
    def of(cls, universe: Iterable, table: Mapping) -> "EffectiveInjection":
        return cls(frozenset(universe), dict(table))

    def __call__(self, x):
        return self.table[x]

    def in_domain(self, x) -> bool:
        return x in self.table

    def in_range(self, y) -> bool:
        return y in self._inverse

    def inverse(self, y):
        return self._inverse[y]

    @property
    def finite(self) -> bool:
        return True

    def total_on(self, xs) -> Hashable | None:
        """An element of xs without an image, if any."""
        return next((x for x in xs if x not in self.table), None)


@dataclass(frozen=True)
class FunctionInjection:
    """An injection given by procedures, for universes that are not listed."""

    forward: Callable
    backward: Callable  # returns None off the range

    def __call__(self, x):
        return self.forward(x)

    def in_range(self, y) -> bool:
        return self.backward(y) is not None

    def inverse(self, y):
        x = self.backward(y)
        if x is None:
            raise KeyError(y)
        return x

    @property
    def finite(self) -> bool:
        return False


# -- reductions ----------------------------------------------------------------------

@dataclass(frozen=True)
class ReductionCheck:
    holds: bool
    counterexample: Hashable | None = None

    def __bool__(self):
        return self.holds


def verify_reduction(universe: Iterable, A, B, f) -> ReductionCheck:
    """Whether x in A <-> f(x) in B across the universe; A and B are sets or predicates."""
    inA = A if callable(A) else A.__contains__
    inB = B if callable(B) else B.__contains__
    for x in universe:
        if bool(inA(x)) != bool(inB(f(x))):
            return ReductionCheck(False, x)
    return ReductionCheck(True)


# -- the zig-zag --------------------------------------------------------------------

@dataclass(frozen=True)
class InA0:
    length: int  # number of g^-1 steps taken


@dataclass(frozen=True)
class NotInA0:
    reason: str  # "dies" (left ran(g) in A) | "cycle"


@dataclass(frozen=True)
class Unknown:
    steps: int


def zigzag_classify(a, f, g, step_bound: int | None = None, A: Iterable | None = None):
    if A is not None and a not in A:
        raise HypothesisError(f"{a!r} is not in A", a)
    finite = getattr(f, "finite", False) and getattr(g, "finite", False)
    seen = set()
    x, length = a, 0
    while True:
        if not g.in_range(x):
            return NotInA0("dies")
        y = g.inverse(x)
        length += 1
        if not f.in_range(y):
            return InA0(length)
        x = f.inverse(y)
        if x in seen or x == a:
            return NotInA0("cycle")
        seen.add(x)
        # on listed universes the chain repeats before it can run long, so the bound never bites
        if not finite and step_bound is not None and length >= step_bound:
            return Unknown(length)


def a0_set(A: Iterable, f, g) -> frozenset:
    return frozenset(a for a in A if isinstance(zigzag_classify(a, f, g), InA0))


# -- Cantor-Schroeder-Bernstein -------------------------------------------------------

@dataclass(frozen=True)
class Bijection:
    forward: Mapping
    backward: Mapping

    def __call__(self, x):
        return self.forward[x]

    def inverse(self, y):
        return self.backward[y]


def _check_injection(name: str, h, source, target):
    missing = h.total_on(source)
    if missing is not None:
        raise HypothesisError(f"{name} is not total: no image for {missing!r}", missing)
    for x in source:
        if h(x) not in target:
            raise HypothesisError(f"{name} maps {x!r} outside its target", x)


def csb_bijection(A: Iterable, B: Iterable, f: EffectiveInjection, g: EffectiveInjection) -> Bijection:
    """h = g^-1 on A0 and f off it; the inverse is g on B0 = g^-1 A0 and f^-1 off it."""
    A, B = frozenset(A), frozenset(B)
    _check_injection("f", f, A, B)
    _check_injection("g", g, B, A)
    A0 = a0_set(A, f, g)
    h = {a: (g.inverse(a) if a in A0 else f(a)) for a in A}
    B0 = frozenset(g.inverse(a) for a in A0)
    h_inv = {b: (g(b) if b in B0 else f.inverse(b)) for b in B}
    return Bijection(h, h_inv)


@dataclass(frozen=True)
class LazyBijection:
    """h and h^-1 evaluated on demand, for injections on unlisted universes."""

    f: object
    g: object
    step_bound: int | None = None

    def _in_a0(self, a) -> bool:
        verdict = zigzag_classify(a, self.f, self.g, self.step_bound)
        if isinstance(verdict, Unknown):
            raise HypothesisError(f"zig-zag from {a!r} undecided after {verdict.steps} steps", a)
        return isinstance(verdict, InA0)

    def __call__(self, a):
        return self.g.inverse(a) if self._in_a0(a) else self.f(a)

    def inverse(self, b):
        # b lies in B0 = g^-1 A0 exactly when g(b) lies in A0
        a = self.g(b)
        return a if self._in_a0(a) else self.f.inverse(b)


def csb_functions(f, g, step_bound: int | None = None) -> LazyBijection:
    return LazyBijection(f, g, step_bound)


def myhill_permutation(A: Iterable, B: Iterable, f: EffectiveInjection, g: EffectiveInjection,
                       universe: Iterable) -> Bijection:
    """pi = g^-1 on A0 and f elsewhere, a permutation of the universe carrying A onto B."""
    U = frozenset(universe)
    A, B = frozenset(A), frozenset(B)
    if not A <= U or not B <= U:
        raise HypothesisError("A and B must lie in the universe")
    _check_injection("f", f, U, U)
    _check_injection("g", g, U, U)
    for name, h, src, dst in (("f", f, A, B), ("g", g, B, A)):
        bad = verify_reduction(U, src, dst, h)
        if not bad:
            raise HypothesisError(f"{name} is not a reduction: fails at {bad.counterexample!r}",
                                  bad.counterexample)
    A0 = a0_set(U, f, g)
    pi = {x: (g.inverse(x) if x in A0 else f(x)) for x in U}
    B0 = frozenset(g.inverse(x) for x in A0)
    pi_inv = {y: (g(y) if y in B0 else f.inverse(y)) for y in U}
    return Bijection(pi, pi_inv)


def is_bijection(h: Bijection, A: Iterable, B: Iterable) -> bool:
    A, B = frozenset(A), frozenset(B)
    return (set(h.forward) == A and set(h.forward.values()) == B and len(set(h.forward.values())) == len(A)
            and all(h.backward[h.forward[a]] == a for a in A)
            and all(h.forward[h.backward[b]] == b for b in B))


# -- files -------------------------------------------------------------------------

def _element(v):
    return parse_seqreal(v) if isinstance(v, str) else v


def _render(v):
    try:
        return format_seqreal(v)
    except Exception:
        return v


@dataclass(frozen=True)
class Instance:
    A: frozenset
    B: frozenset
    f: EffectiveInjection
    g: EffectiveInjection
    universe: frozenset | None = None


def instance_from_json(data: dict) -> Instance:
    """Elements are SeqReal text (``fs:{..}``, ``ep:../..``) or plain integers."""
    A = frozenset(map(_element, data["A"]))
    B = frozenset(map(_element, data["B"]))
    U = frozenset(map(_element, data["universe"])) if "universe" in data else None
    table = lambda rows: {_element(x): _element(y) for x, y in rows}
    f = EffectiveInjection(U if U is not None else A, table(data["f"]))
    g = EffectiveInjection(U if U is not None else B, table(data["g"]))
    return Instance(A, B, f, g, U)


def load_instance(path) -> Instance:
    with open(path) as fh:
        return instance_from_json(json.load(fh))


def bijection_to_json(h: Bijection) -> dict:
    key = lambda kv: str(_render(kv[0]))
    return {
        "forward": [[_render(x), _render(y)] for x, y in sorted(h.forward.items(), key=key)],
        "inverse": [[_render(x), _render(y)] for x, y in sorted(h.backward.items(), key=key)],
    }
