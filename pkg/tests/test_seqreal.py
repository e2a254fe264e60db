import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ittm.seqreal import (
    EventuallyPeriodic, FiniteSupport, bit_at, canonicalize, cantor_pair, cantor_unpair, decode_nat,
    encode_nat, eventual_form, finite_support, format_seqreal, parse_seqreal, row_extract, seq_or,
    with_bit,
)
from conftest import bitstrings, seqreals


def expand(prefix: str, period: str, n: int) -> str:
    out = prefix
    while len(out) < n:
        out += period
    return out[:n]


def diagonal_pairs(limit):
    """(i, j) listed diagonal by diagonal, j increasing within a diagonal."""
    out = []
    for s in itertools.count():
        for j in range(s + 1):
            out.append((s - j, j))
            if len(out) == limit:
                return out


def test_bit_at_examples():
    x = finite_support({0, 2})
    assert bit_at(x, 2) == 1 and bit_at(x, 5) == 0
    y = canonicalize("10", "01")
    assert bit_at(y, 7) == int(expand("10", "01", 64)[7]) == 1


@pytest.mark.parametrize("prefix,period,want", [
    ("1", "00", FiniteSupport(frozenset({0}))),
    ("", "0101", EventuallyPeriodic("", "01")),
    ("101", "01", EventuallyPeriodic("", "10")),
])
def test_canonicalize_examples(prefix, period, want):
    assert canonicalize(prefix, period) == want


def test_canonicalize_example_by_brute_force():
    # the shortest description agreeing on 2*(|prefix|+|period|) bits
    target = expand("101", "01", 10)
    cands = [(p, q) for lp in range(4) for lq in range(1, 3)
             for p in map("".join, itertools.product("01", repeat=lp))
             for q in map("".join, itertools.product("01", repeat=lq))
             if expand(p, q, 10) == target]
    best = min(cands, key=lambda pq: (len(pq[1]), len(pq[0])))
    assert canonicalize("101", "01") == EventuallyPeriodic(*best)
    # the listed form (1, 01) describes the same bits but is not prefix-minimal
    assert expand("1", "01", 40) == expand(*best, 40)


def test_cantor_pair_examples():
    pairs = diagonal_pairs(10)
    assert cantor_pair(0, 0) == 0 == pairs.index((0, 0))
    assert cantor_pair(1, 0) == 1 == pairs.index((1, 0))
    assert cantor_pair(0, 2) == 5 == pairs.index((0, 2))


def test_cantor_pair_injective_and_matches_diagonals():
    pairs = [(i, s - i) for s in range(201) for i in range(s + 1)]
    codes = {cantor_pair(i, j) for i, j in pairs}
    assert len(codes) == len(pairs)
    for k, (i, j) in enumerate(diagonal_pairs(3000)):
        assert cantor_pair(i, j) == k and cantor_unpair(k) == (i, j)


def test_row_extract_examples():
    x = finite_support({cantor_pair(3, 5)})
    assert row_extract(x, 3) == finite_support({5})
    assert row_extract(x, 2) == finite_support(())
    ones = canonicalize("", "1")
    row = row_extract(ones, 0)
    assert all(bit_at(row, m) == 1 for m in range(256))


def test_encode_nat():
    assert encode_nat(0) == finite_support(())
    assert encode_nat(3) == finite_support({0, 1, 2})
    assert decode_nat(encode_nat(7)) == 7


@given(seqreals, st.integers(0, 6))
def test_row_extract_bits(x, n):
    row = row_extract(x, n)
    for m in range(60):
        assert bit_at(row, m) == bit_at(x, cantor_pair(n, m))


@given(bitstrings(), bitstrings(1, 6))
def test_canonicalize_same_sequence_idempotent(prefix, period):
    x = canonicalize(prefix, period)
    p, q = eventual_form(x)
    bound = 2 * (len(prefix) + len(period)) + 2 * (len(p) + len(q))
    assert expand(p, q, bound) == expand(prefix, period, bound)
    assert canonicalize(p, q) == x


@given(bitstrings(), bitstrings(1, 4), bitstrings(), bitstrings(1, 4))
def test_equal_iff_same_bits(p1, q1, p2, q2):
    bound = 2 * (len(p1) + len(q1) + len(p2) + len(q2))
    same = expand(p1, q1, bound) == expand(p2, q2, bound)
    assert same == (canonicalize(p1, q1) == canonicalize(p2, q2))


@given(seqreals)
def test_text_round_trip(x):
    assert parse_seqreal(format_seqreal(x)) == x


@given(seqreals, st.integers(0, 50), st.integers(0, 1))
def test_with_bit(x, n, b):
    y = with_bit(x, n, b)
    assert all(bit_at(y, m) == (b if m == n else bit_at(x, m)) for m in range(80))


@given(seqreals, seqreals)
def test_or_bitwise(x, y):
    z = seq_or(x, y)
    assert all(bit_at(z, m) == bit_at(x, m) | bit_at(y, m) for m in range(80))


@pytest.mark.parametrize("bad", ["fs:{a}", "ep:01/", "ep:2/1", "xs:{}", "fs:{-1}"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_seqreal(bad)
