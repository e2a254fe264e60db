"""Finitely describable infinite binary sequences.

Two canonical forms exist: :class:`FiniteSupport` (eventually zero) and
:class:`EventuallyPeriodic` (minimal prefix and period, period not all zero).
Constructors do not canonicalize; go through :func:`canonicalize`,
:func:`finite_support` or :func:`parse_seqreal` to get comparable values.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Union


@dataclass(frozen=True)
class FiniteSupport:
    ones: frozenset[int] = frozenset()

    def __str__(self):
        return "fs:{" + ",".join(map(str, sorted(self.ones))) + "}"


@dataclass(frozen=True)
class EventuallyPeriodic:
    prefix: str
    period: str

    def __str__(self):
        return f"ep:{self.prefix}/{self.period}"


SeqReal = Union[FiniteSupport, EventuallyPeriodic]

ZERO_SEQ = FiniteSupport()


def finite_support(ones: Iterable[int]) -> FiniteSupport:
    s = frozenset(ones)
    if any(i < 0 for i in s):
        raise ValueError("bit positions are natural numbers")
    return FiniteSupport(s)


def bit_at(x: SeqReal, n: int) -> int:
    if isinstance(x, FiniteSupport):
        return 1 if n in x.ones else 0
    if n < len(x.prefix):
        return int(x.prefix[n])
    return int(x.period[(n - len(x.prefix)) % len(x.period)])


def first_bits(x: SeqReal, k: int) -> str:
    return "".join(str(bit_at(x, i)) for i in range(k))


def _minimal_period(period: str) -> str:
    n = len(period)
    for d in range(1, n + 1):
        if n % d == 0 and period[:d] * (n // d) == period:
            return period[:d]
    return period


def canonicalize(prefix: str, period: str) -> SeqReal:
    """Canonical value of the sequence ``prefix`` followed by ``period`` repeated."""
    if not period:
        raise ValueError("period must be nonempty")
    if set(prefix + period) - {"0", "1"}:
        raise ValueError("bits must be 0 or 1")
    period = _minimal_period(period)
    while prefix and prefix[-1] == period[-1]:
        prefix = prefix[:-1]
        period = period[-1] + period[:-1]
    if "1" not in period:
        return FiniteSupport(frozenset(i for i, b in enumerate(prefix) if b == "1"))
    return EventuallyPeriodic(prefix, period)


def normalize(x: SeqReal) -> SeqReal:
    if isinstance(x, FiniteSupport):
        return x
    return canonicalize(x.prefix, x.period)


def eventual_form(x: SeqReal) -> tuple[str, str]:
    """(prefix, period) description of any sequence, finite supports included."""
    if isinstance(x, EventuallyPeriodic):
        return x.prefix, x.period
    top = max(x.ones) + 1 if x.ones else 0
    return first_bits(x, top), "0"


def with_bit(x: SeqReal, n: int, b: int) -> SeqReal:
    if bit_at(x, n) == b:
        return x
    if isinstance(x, FiniteSupport):
        return FiniteSupport(x.ones | {n} if b else x.ones - {n})
    prefix, period = x.prefix, x.period
    if n >= len(prefix):
        reps = (n - len(prefix)) // len(period) + 1
        prefix = prefix + period * reps
    prefix = prefix[:n] + str(b) + prefix[n + 1:]
    return canonicalize(prefix, period)


def cantor_pair(i: int, j: int) -> int:
    s = i + j
    return s * (s + 1) // 2 + j


def cantor_unpair(z: int) -> tuple[int, int]:
    s = (math.isqrt(8 * z + 1) - 1) // 2
    j = z - s * (s + 1) // 2
    return s - j, j


def row_extract(x: SeqReal, n: int) -> SeqReal:
    """The n-th row: bit m of the result is bit <n,m> of x."""
    if isinstance(x, FiniteSupport):
        ones = set()
        for z in x.ones:
            i, j = cantor_unpair(z)
            if i == n:
                ones.add(j)
        return FiniteSupport(frozenset(ones))
    # positions <n,m> are eventually beyond the prefix; past that, their residues
    # modulo the period length repeat with period 2*len(period)
    m0 = 0
    while cantor_pair(n, m0) < len(x.prefix):
        m0 += 1
    head = "".join(str(bit_at(x, cantor_pair(n, m))) for m in range(m0))
    cycle = "".join(str(bit_at(x, cantor_pair(n, m))) for m in range(m0, m0 + 2 * len(x.period)))
    return canonicalize(head, cycle)


def rows_to_real(rows: dict[int, SeqReal]) -> SeqReal:
    """Interleave finitely many finite-support rows into one real."""
    ones = set()
    for n, row in rows.items():
        if not isinstance(row, FiniteSupport):
            raise ValueError("only finite-support rows can be interleaved")
        ones.update(cantor_pair(n, m) for m in row.ones)
    return FiniteSupport(frozenset(ones))


def encode_nat(n: int) -> FiniteSupport:
    return FiniteSupport(frozenset(range(n)))


def decode_nat(x: SeqReal) -> int:
    """Count the leading ones (inverse of :func:`encode_nat`)."""
    n = 0
    while bit_at(x, n) == 1:
        n += 1
        if isinstance(x, EventuallyPeriodic) and "0" not in x.period and n >= len(x.prefix):
            raise ValueError("sequence is eventually all ones")
    return n


_FS = re.compile(r"^fs:\{\s*((?:\d+\s*(?:,\s*\d+\s*)*)?)\}$")
_EP = re.compile(r"^ep:([01]*)/([01]+)$")


def parse_seqreal(text: str) -> SeqReal:
    text = text.strip()
    m = _FS.match(text)
    if m:
        body = m.group(1).strip()
        return finite_support(int(t) for t in body.split(",")) if body else ZERO_SEQ
    m = _EP.match(text)
    if m:
        return canonicalize(m.group(1), m.group(2))
    raise ValueError(f"not a sequence literal: {text!r}")


def format_seqreal(x: SeqReal) -> str:
    return str(x)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def bitwise(x: SeqReal, y: SeqReal, op) -> SeqReal:
    """Apply a bit operation ``op(a, b) -> int`` position-wise."""
    if isinstance(x, FiniteSupport) and isinstance(y, FiniteSupport) and op(0, 0) == 0:
        top = max(max(x.ones, default=-1), max(y.ones, default=-1)) + 1
        return FiniteSupport(frozenset(i for i in range(top) if op(bit_at(x, i), bit_at(y, i))))
    px, qx = eventual_form(x)
    py, qy = eventual_form(y)
    start = max(len(px), len(py))
    period = _lcm(len(qx), len(qy))
    bits = [str(op(bit_at(x, i), bit_at(y, i))) for i in range(start + period)]
    return canonicalize("".join(bits[:start]), "".join(bits[start:]))


def seq_or(x: SeqReal, y: SeqReal) -> SeqReal:
    if isinstance(x, FiniteSupport) and isinstance(y, FiniteSupport):
        return FiniteSupport(x.ones | y.ones)
    return bitwise(x, y, lambda a, b: a | b)
