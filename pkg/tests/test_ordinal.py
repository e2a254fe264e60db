"""Cantor normal form arithmetic, checked against a limit-based oracle below w^w."""
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ittm.ordinal import (
    OMEGA, ONE, ZERO, Ordinal, OrdinalSyntaxError, add, classify, compare, format_ordinal,
    left_difference, ord_compare, parse_ordinal,
)
from conftest import ordinals


def to_vec(a: Ordinal, width: int = 6) -> list[int]:
    v = [0] * width
    for e, c in a.terms:
        v[e.finite_value()] = c
    return v


def from_vec(v) -> Ordinal:
    return Ordinal(tuple((Ordinal.of(e), c) for e, c in reversed(list(enumerate(v))) if c))


def oracle_plus_power(v, e):
    """v + w^e from the successor and supremum clauses alone."""
    v = list(v)
    if e == 0:
        v[0] += 1
        return v
    # a + w^e = sup_n (a + w^(e-1) * n); the coordinate e-1 is the one that grows
    s = v
    seq = []
    for _ in range(3):
        s = oracle_plus_power(s, e - 1)
        seq.append(s)
    grow = max(i for i in range(len(v)) if seq[2][i] > seq[1][i])
    out = [0] * len(v)
    for i in range(grow + 1, len(v)):
        out[i] = seq[2][i]
    out[grow + 1] += 1
    return out


def oracle_add(a, b):
    v = to_vec(a)
    for e, c in b.terms:
        for _ in range(c):
            v = oracle_plus_power(v, e.finite_value())
    return from_vec(v)


finite_exp = ordinals(max_depth=1, max_terms=3, max_coef=3)


@pytest.mark.parametrize("text,terms", [
    ("0", ()),
    ("w*2+3", ((ONE, 2), (ZERO, 3))),
    ("w^w+w", ((OMEGA, 1), (ONE, 1))),
])
def test_parse_examples(text, terms):
    assert parse_ordinal(text).terms == terms


@pytest.mark.parametrize("bad", ["", "w*0", "w+", "w^", "3w", "w*2*3x", "(w"])
def test_parse_rejects(bad):
    with pytest.raises(OrdinalSyntaxError):
        parse_ordinal(bad)


def test_depth_limit():
    deep = "w^" * 17 + "1"
    with pytest.raises(OrdinalSyntaxError):
        parse_ordinal(deep)
    assert parse_ordinal(deep, max_depth=20).depth() > 16


@pytest.mark.parametrize("a,b,want", [("w", "3", "greater"), ("w+1", "w+1", "equal"), ("w*2", "w^2", "less")])
def test_compare_examples(a, b, want):
    assert ord_compare(parse_ordinal(a), parse_ordinal(b)) == want


@pytest.mark.parametrize("a,b,want", [("1", "w", "w"), ("w", "1", "w+1"), ("w^2+w", "w+1", "w^2+w*2+1")])
def test_add_examples(a, b, want):
    assert format_ordinal(add(parse_ordinal(a), parse_ordinal(b))) == want


def test_classify_examples():
    assert classify(ZERO).kind == "zero"
    c = classify(parse_ordinal("w+4"))
    assert c.kind == "successor" and format_ordinal(c.predecessor) == "w+3"
    assert classify(parse_ordinal("w^2")).kind == "limit"


@given(finite_exp, finite_exp)
def test_add_matches_limit_oracle(a, b):
    assert add(a, b) == oracle_add(a, b)


@given(finite_exp, finite_exp)
def test_compare_matches_vector_order(a, b):
    va, vb = to_vec(a)[::-1], to_vec(b)[::-1]
    assert compare(a, b) == (va > vb) - (va < vb)


@given(ordinals(), ordinals(), ordinals())
def test_add_associative(a, b, c):
    assert add(add(a, b), c) == add(a, add(b, c))


@given(ordinals())
def test_successor_is_larger_and_classified(a):
    s = add(a, ONE)
    assert ord_compare(a, s) == "less"
    c = classify(s)
    assert c.kind == "successor" and c.predecessor == a


@given(ordinals(), ordinals(), ordinals())
def test_left_monotone(a, b, c):
    lo, hi = sorted([a, b], key=lambda o: to_key(o))
    assert compare(add(c, lo), add(c, hi)) <= 0


def to_key(o):
    from functools import cmp_to_key
    return cmp_to_key(compare)(o)


@given(ordinals())
def test_round_trip(a):
    text = format_ordinal(a)
    assert parse_ordinal(text) == a
    assert format_ordinal(parse_ordinal(text)) == text


@given(ordinals(), ordinals())
def test_left_difference(a, b):
    if compare(a, b) <= 0:
        d = left_difference(b, a)
        assert add(a, d) == b


@pytest.mark.parametrize("text,canon", [("w+w", "w*2"), ("3+w", "w"), ("w^1", "w"), ("w^0*5", "5"), ("2+3", "5")])
def test_normalizes_text(text, canon):
    assert format_ordinal(parse_ordinal(text)) == canon
