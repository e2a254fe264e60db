"""Presentations of real points and exact arithmetic on them.

A presentation C reads as a sign bit ``C(0)``, integer bits ``C(2n+1)`` worth
``2**n`` and fraction bits ``C(2n)`` worth ``2**-n`` for n >= 1.  Only
eventually periodic presentations are handled, so every point is rational.

Internally a magnitude is ``(integer, prefix, period)`` where prefix and period
are tuples of fraction digits starting at digit 1.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Protocol

from .seqreal import SeqReal, bit_at, canonicalize, eventual_form, format_seqreal, parse_seqreal

Mag = tuple  # (int, tuple, tuple)


class PresentationError(ValueError):
    pass


class ZeroDivision(ArithmeticError):
    pass


class EmbedError(ValueError):
    pass


# -- digit sequences ---------------------------------------------------------------

def _minimal(per: tuple) -> tuple:
    n = len(per)
    for d in range(1, n + 1):
        if n % d == 0 and per == per[:d] * (n // d):
            return per[:d]
    return per


def _canon(pre: tuple, per: tuple) -> tuple[tuple, tuple]:
    per = _minimal(tuple(per) or (0,))
    pre = tuple(pre)
    while pre and pre[-1] == per[-1]:
        pre, per = pre[:-1], (per[-1],) + per[:-1]
    return pre, per


def _digit(pre: tuple, per: tuple, j: int) -> int:
    """Digit j >= 1."""
    if j <= len(pre):
        return pre[j - 1]
    return per[(j - len(pre) - 1) % len(per)]


def _normalize(m: Mag) -> Mag:
    """Remove an all-ones tail by carrying it into the prefix."""
    i, pre, per = m
    pre, per = _canon(pre, per)
    if per != (1,):
        return i, pre, per
    digits = list(pre)
    carry = 1
    for j in range(len(digits) - 1, -1, -1):
        s = digits[j] + carry
        digits[j], carry = s % 2, s // 2
    pre, per = _canon(tuple(digits), (0,))
    return i + carry, pre, per


def _span(*mags) -> tuple[int, int]:
    P = max(len(m[1]) for m in mags)
    L = 1
    for m in mags:
        L = L * len(m[2]) // math.gcd(L, len(m[2]))
    return P, L


def _assemble(i: int, digits, P: int, L: int) -> Mag:
    """Digits is a function of j >= 1, periodic with period L beyond P."""
    pre = tuple(digits(j) for j in range(1, P + 1))
    per = tuple(digits(j) for j in range(P + 1, P + L + 1))
    pre, per = _canon(pre, per)
    return i, pre, per


# -- the magnitude algorithms ---------------------------------------------------------

def _add_mag(x: Mag, y: Mag) -> Mag:
    a = lambda j: _digit(x[1], x[2], j)
    b = lambda j: _digit(y[1], y[2], j)
    P, L = _span(x, y)
    agree_late = [j for j in range(P + 1, P + L + 1) if a(j) == b(j)]
    if not agree_late:
        # finitely many agreements: beyond the last one, k, the digits complement
        k = max((j for j in range(1, P + 1) if a(j) == b(j)), default=0)
        digits: dict[int, int] = {}
        carry = 0
        for j in range(k, 0, -1):
            s = a(j) + b(j) + carry
            digits[j], carry = s % 2, s // 2
        raw = _assemble(x[0] + y[0] + carry, lambda j: digits.get(j, 1), max(P, k), 1)
        return _normalize(raw)

    def next_agreement(j):
        # least m >= j with a(m) == b(m); one exists within P + L past any point
        while a(j) != b(j):
            j += 1
        return j

    def carry_out(j):
        return a(next_agreement(j))

    raw = _assemble(x[0] + y[0] + carry_out(1),
                    lambda j: (a(j) + b(j) + carry_out(j + 1)) % 2, P, L)
    return _normalize(raw)


def _sub_mag(x: Mag, y: Mag) -> Mag:
    """x - y for magnitudes with x >= y, borrowing from the right."""
    a = lambda j: _digit(x[1], x[2], j)
    b = lambda j: _digit(y[1], y[2], j)
    P, L = _span(x, y)

    def borrow_out(j):
        # decided at the least m >= j where the digits differ; identical tails borrow nothing
        end = max(j, P) + L
        while a(j) == b(j):
            if j > end:
                return 0
            j += 1
        return b(j)

    i = x[0] - y[0] - borrow_out(1)
    if i < 0:
        raise ValueError("subtrahend exceeds minuend")
    return _normalize(_assemble(i, lambda j: (a(j) - b(j) - borrow_out(j + 1)) % 2, P, L))


def _shift(x: Mag, s: int) -> Mag:
    """x * 2**s."""
    i, pre, per = x
    if s >= 0:
        moved = [_digit(pre, per, j) for j in range(1, s + 1)]
        i = (i << s) + sum(d << (s - 1 - k) for k, d in enumerate(moved))
        rest = tuple(_digit(pre, per, j) for j in range(s + 1, s + 1 + max(len(pre) - s, 0)))
        phase = max(s - len(pre), 0) % len(per)
        return (i,) + _canon(rest, per[phase:] + per[:phase])
    s = -s
    low = tuple((i >> (s - 1 - k)) & 1 for k in range(s))
    return (i >> s,) + _canon(low + pre, per)


def _compare_mag(x: Mag, y: Mag) -> int:
    if x[0] != y[0]:
        return -1 if x[0] < y[0] else 1
    P, L = _span(x, y)
    for j in range(1, P + L + 1):
        a, b = _digit(x[1], x[2], j), _digit(y[1], y[2], j)
        if a != b:
            return -1 if a < b else 1
    return 0


def _mul_int(x: Mag, n: int) -> Mag:
    acc: Mag = (0, (), (0,))
    k = 0
    while n >> k:
        if (n >> k) & 1:
            acc = _add_mag(acc, _shift(x, k))
        k += 1
    return acc


def _div_int(x: Mag, d: int) -> Mag:
    """Long division of x by a positive integer; (period phase, remainder) pairs recur."""
    if d <= 0:
        raise ValueError("divisor must be a positive integer")
    i, pre, per = x
    q, r = divmod(i, d)
    out: list[int] = []
    seen: dict = {}
    j = 1
    while True:
        if j > len(pre):
            state = ((j - len(pre) - 1) % len(per), r)
            if state in seen:
                start = seen[state]
                return _normalize((q,) + _canon(tuple(out[:start]), tuple(out[start:])))
            seen[state] = len(out)
        r = 2 * r + _digit(pre, per, j)
        out.append(r // d)
        r %= d
        j += 1


def _mag_fraction(x: Mag) -> Fraction:
    i, pre, per = x
    value = lambda ds: int("".join(map(str, ds)) or "0", 2)
    P, L = len(pre), len(per)
    return i + Fraction(value(pre), 2 ** P) + Fraction(value(per), (2 ** L - 1) * 2 ** P)


def _mag_of_fraction(q: Fraction) -> Mag:
    q = abs(Fraction(q))
    return _div_int((q.numerator, (), (0,)), q.denominator)


def _mul_mag(x: Mag, y: Mag) -> Mag:
    """Shifted copies of x for each set digit of y; the repeating block of y sums as a geometric series."""
    i, pre, per = y
    acc = _mul_int(x, i)
    for j, d in enumerate(pre, 1):
        if d:
            acc = _add_mag(acc, _shift(x, -j))
    if any(per):
        P, L = len(pre), len(per)
        block: Mag = (0, (), (0,))
        for t, d in enumerate(per, 1):
            if d:
                block = _add_mag(block, _shift(x, -(P + t)))
        # block * (1 + 2^-L + 2^-2L + ...) = block * 2^L / (2^L - 1)
        acc = _add_mag(acc, _div_int(_shift(block, L), 2 ** L - 1))
    return acc


# -- presentations -------------------------------------------------------------------

@dataclass(frozen=True)
class PointPresentation:
    bits: SeqReal

    @property
    def sign(self) -> int:
        return bit_at(self.bits, 0)

    @property
    def magnitude(self) -> Mag:
        return _decompose(self.bits)[1]

    def __str__(self):
        return format_seqreal(self.bits)


def _stride(x: SeqReal, offset: int, step: int) -> tuple[tuple, tuple]:
    """The subsequence x(offset + step*n), n >= 0, as prefix and period."""
    prefix, period = eventual_form(x)
    n0 = 0
    while offset + step * n0 < len(prefix):
        n0 += 1
    head = tuple(bit_at(x, offset + step * n) for n in range(n0))
    cycle = tuple(bit_at(x, offset + step * n) for n in range(n0, n0 + len(period)))
    return head, cycle


def _decompose(C: SeqReal) -> tuple[int, Mag]:
    ipre, iper = _stride(C, 1, 2)
    if any(iper):
        raise PresentationError("infinite integer part: odd slots are not eventually zero")
    fpre, fper = _canon(*_stride(C, 2, 2))
    if fper == (1,):
        raise PresentationError("all-ones fractional tail: even slots are eventually all 1")
    integer = sum(b << n for n, b in enumerate(ipre))
    sign = bit_at(C, 0)
    if sign and integer == 0 and not any(fpre) and not any(fper):
        raise PresentationError("the excluded second presentation of 0")
    return sign, (integer, fpre, fper)


def _compose(sign: int, m: Mag) -> PointPresentation:
    i, pre, per = m
    if i == 0 and not any(pre) and not any(per):
        sign = 0
    ibits = [(i >> n) & 1 for n in range(i.bit_length())]
    N = max(len(ibits), len(pre) + 1)
    C = [sign]
    for n in range(N):
        if n:
            C.append(_digit(pre, per, n))
        C.append(ibits[n] if n < len(ibits) else 0)
    period = []
    for t in range(len(per)):
        period += [_digit(pre, per, N + t), 0]
    return PointPresentation(canonicalize("".join(map(str, C)), "".join(map(str, period))))


def validate_presentation(C: SeqReal) -> PointPresentation:
    sign, m = _decompose(C)
    return _compose(sign, m)


def to_rational(P: PointPresentation) -> Fraction:
    sign, m = _decompose(P.bits)
    v = _mag_fraction(m)
    return -v if sign else v


def from_rational(q) -> PointPresentation:
    q = Fraction(q)
    return _compose(int(q < 0), _mag_of_fraction(q))


def compare_points(P: PointPresentation, Q: PointPresentation) -> str:
    sp, mp = _decompose(P.bits)
    sq, mq = _decompose(Q.bits)
    if sp != sq:
        c = 1 if sq else -1
    else:
        c = _compare_mag(mp, mq)
        if sp:
            c = -c
    return {-1: "less", 0: "equal", 1: "greater"}[c]


def negate(P: PointPresentation) -> PointPresentation:
    sign, m = _decompose(P.bits)
    return _compose(1 - sign, m)


def add_points(P: PointPresentation, Q: PointPresentation) -> PointPresentation:
    sp, mp = _decompose(P.bits)
    sq, mq = _decompose(Q.bits)
    if sp == sq:
        return _compose(sp, _add_mag(mp, mq))
    # opposite signs: subtract the smaller magnitude from the larger
    if _compare_mag(mp, mq) >= 0:
        return _compose(sp, _sub_mag(mp, mq))
    return _compose(sq, _sub_mag(mq, mp))


def subtract_points(P: PointPresentation, Q: PointPresentation) -> PointPresentation:
    return add_points(P, negate(Q))


def multiply_points(P: PointPresentation, Q: PointPresentation) -> PointPresentation:
    sp, mp = _decompose(P.bits)
    sq, mq = _decompose(Q.bits)
    return _compose(sp ^ sq, _mul_mag(mp, mq))


def divide_points(P: PointPresentation, Q: PointPresentation) -> PointPresentation:
    """P / Q by long division: Q = a/b exactly, so P/Q = (P*b)/a."""
    sp, mp = _decompose(P.bits)
    sq, mq = _decompose(Q.bits)
    q = _mag_fraction(mq)
    if q == 0:
        raise ZeroDivision("division by the zero point")
    return _compose(sp ^ sq, _div_int(_mul_int(mp, q.denominator), q.numerator))


# -- text --------------------------------------------------------------------------

_RAT = re.compile(r"^rat:(-?\d+)(?:/(\d+))?$")


def parse_point(text: str) -> PointPresentation:
    m = _RAT.match(text.strip())
    if m:
        den = int(m.group(2) or 1)
        if den == 0:
            raise PresentationError("zero denominator")
        return from_rational(Fraction(int(m.group(1)), den))
    return validate_presentation(parse_seqreal(text))


# -- embedding an ordered field --------------------------------------------------------

class FieldHandle(Protocol):
    def compare_dyadic(self, m: int, n: int) -> int:
        """Sign of (element - m / 2**n)."""

    def denominator_bound(self) -> int:
        """An upper bound on the element's reduced denominator."""


@dataclass(frozen=True)
class RationalHandle:
    value: Fraction

    def compare_dyadic(self, m: int, n: int) -> int:
        d = Fraction(self.value) - Fraction(m, 2 ** n)
        return (d > 0) - (d < 0)

    def denominator_bound(self) -> int:
        return Fraction(self.value).denominator


def embed_field(handle) -> PointPresentation:
    """The presentation of a field element, digit by digit by dyadic bisection.

    With reduced denominator q = 2**e * r (r odd) at most Q, the fraction
    digits repeat after at most ``log2 Q`` digits with a period dividing the
    order of 2 mod r.  Two rationals with denominators at most Q differ by at
    least 1/Q**2, so once the bisection interval is narrower than 1/(2Q**2)
    the element is the unique such rational in it, and its expansion gives the
    preperiod and period that the remaining digits must follow.
    """
    try:
        Q = int(handle.denominator_bound())
    except Exception as exc:
        raise EmbedError(f"no periodicity certificate: {exc}") from exc
    if Q < 1:
        raise EmbedError("no periodicity certificate: denominator bound must be positive")

    def cmp(m, n):
        try:
            c = handle.compare_dyadic(m, n)
        except Exception as exc:
            raise EmbedError(f"handle refused the comparison with {m}/2^{n}: {exc}") from exc
        if c not in (-1, 0, 1):
            raise EmbedError(f"handle answered {c!r} comparing with {m}/2^{n}")
        return c

    sign = int(cmp(0, 0) < 0)
    flip = -1 if sign else 1
    above = lambda m, n: flip * cmp(flip * m, n)  # sign of |x| - m/2^n
    hi = 1
    while above(hi, 0) >= 0:
        hi *= 2
    lo = 0
    while hi - lo > 1:  # integer part: lo <= |x| < hi
        mid = (lo + hi) // 2
        if above(mid, 0) >= 0:
            lo = mid
        else:
            hi = mid
    integer = lo
    digits: list[int] = []
    num = integer  # |x| lies in [num / 2^n, (num + 1) / 2^n)

    def bisect():
        nonlocal num
        n = len(digits) + 1
        bit = int(above(2 * num + 1, n) >= 0)
        digits.append(bit)
        num = 2 * num + bit

    while 2 ** len(digits) <= 2 * Q * Q:
        bisect()
    candidate = Fraction(num, 2 ** len(digits)).limit_denominator(Q)
    i, pre, per = _mag_of_fraction(candidate)
    if candidate.denominator > Q or i != integer:
        raise EmbedError("no periodicity certificate: bisection disagrees with the denominator bound")
    while len(digits) < len(pre) + len(per):
        bisect()
    for j, d in enumerate(digits, 1):
        if d != _digit(pre, per, j):
            raise EmbedError("no periodicity certificate: digits leave the certified period")
    body = tuple(digits[:len(pre)]), tuple(digits[len(pre):len(pre) + len(per)])
    return _compose(sign, (integer,) + _canon(*body))
