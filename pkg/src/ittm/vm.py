"""Infinite time Turing machine interpreter.

Tapes are ``(input, scratch, output)``; a program row reads the three bits
under the head and writes three bits, moves ``L`` or ``R``, and changes state.

Transfinite runs are computed from exact repeats only.  A level-``k`` block
covers the stages ``[s, s + w^k)`` and is the concatenation of omega many
level-``k-1`` blocks; once two of those blocks start from the same
configuration the run is periodic, and the configuration at ``s + w^k`` is
the limsup over one period (a cell is 1 iff it holds 1 somewhere in the
period).  Level 0 blocks are single steps.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence, Union

from .ordinal import (
    ONE,
    ZERO,
    Ordinal,
    classify,
    format_ordinal,
    left_difference,
    parse_ordinal,
)
from .seqreal import ZERO_SEQ, SeqReal, bit_at, parse_seqreal, seq_or, with_bit

TRIPLES = tuple(f"{a}{b}{c}" for a in "01" for b in "01" for c in "01")
DEFAULT_BURST = 10_000
DEFAULT_LEVEL_CAP = 3

Tapes = tuple  # (input, scratch, output) SeqReals


class ProgramError(ValueError):
    pass


class CertificateFormatError(ValueError):
    pass


class UncertifiedLimit(ValueError):
    pass


# -- programs -------------------------------------------------------------------

@dataclass(frozen=True)
class Program:
    rows: Mapping[tuple[str, str], tuple[str, str, str]]
    start: str = "start"
    limit: str = "limit"
    halt: str = "halt"

    @property
    def states(self) -> frozenset[str]:
        names = {self.start, self.limit, self.halt}
        for (state, _), (_, _, nxt) in self.rows.items():
            names.add(state)
            names.add(nxt)
        return frozenset(names)

    def effective_states(self) -> frozenset[str]:
        """States reachable from the start state through transitions alone."""
        seen, todo = {self.start}, [self.start]
        while todo:
            s = todo.pop()
            if s == self.halt:
                continue
            for t in TRIPLES:
                nxt = self.rows[s, t][2]
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return frozenset(seen)

    def __hash__(self):
        return hash(tuple(sorted(self.rows.items())))


_ROW = re.compile(r"^(\S+)\s+([01*]{3})\s*->\s*([01*]{3})\s+([LR])\s+(\S+)$")


def parse_program(text: str) -> Program:
    """Parse program text; later lines only fill rows earlier lines left open."""
    rows: dict[tuple[str, str], tuple[str, str, str]] = {}
    mentioned: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _ROW.match(line)
        if not m:
            raise ProgramError(f"line {lineno}: syntax error: {raw.strip()!r}")
        state, read, write, move, nxt = m.groups()
        mentioned += [state, nxt]
        for triple in TRIPLES:
            if all(r in ("*", b) for r, b in zip(read, triple)):
                out = "".join(b if w == "*" else w for w, b in zip(write, triple))
                rows.setdefault((state, triple), (out, move, nxt))
    sources = {s for s, _ in rows}
    if "halt" in sources:
        raise ProgramError("the halt state has outgoing transitions")
    if "limit" not in sources:
        raise ProgramError("missing limit state")
    if "start" not in sources:
        raise ProgramError("missing start state")
    if "halt" not in mentioned:
        raise ProgramError("missing halt state")
    for s in dict.fromkeys(mentioned):
        if s == "halt":
            continue
        missing = [t for t in TRIPLES if (s, t) not in rows]
        if missing:
            raise ProgramError(f"incomplete table: state {s!r} lacks reads {', '.join(missing)}")
    return Program(rows)


def _compress(rows: list[tuple[str, tuple[str, str, str]]]) -> list[tuple[str, str, str, str]] | None:
    """Express (triple -> row) pairs as wildcard lines if they agree on move/next."""
    if len({(mv, nx) for _, (_, mv, nx) in rows}) != 1:
        return None
    write = []
    for pos in range(3):
        if all(out[pos] == t[pos] for t, (out, _, _) in rows):
            write.append("*")
        elif len({out[pos] for _, (out, _, _) in rows}) == 1:
            write.append(rows[0][1][0][pos])
        else:
            return None
    _, (_, mv, nx) = rows[0]
    return "".join(write), mv, nx


def format_program(p: Program) -> str:
    order = [p.start, p.limit] + sorted(s for s in {s for s, _ in p.rows} if s not in (p.start, p.limit))
    lines = []
    for s in order:
        full = [(t, p.rows[s, t]) for t in TRIPLES]
        whole = _compress(full)
        if whole:
            lines.append(f"{s} *** -> {whole[0]} {whole[1]} {whole[2]}")
            continue
        for pos in range(3):
            halves = [[(t, r) for t, r in full if t[pos] == b] for b in "01"]
            parts = [_compress(h) for h in halves]
            if all(parts):
                for b, (w, mv, nx) in zip("01", parts):
                    pattern = "".join(b if i == pos else "*" for i in range(3))
                    lines.append(f"{s} {pattern} -> {w} {mv} {nx}")
                break
        else:
            for t, (w, mv, nx) in full:
                lines.append(f"{s} {t} -> {w} {mv} {nx}")
    return "\n".join(lines) + "\n"


# -- configurations ---------------------------------------------------------------

@dataclass(frozen=True)
class Configuration:
    state: str
    head: int
    tapes: tuple

    def __str__(self):
        return f"state {self.state} head {self.head} tapes " + " ".join(map(str, self.tapes))


def initial_configuration(p: Program, x: SeqReal) -> Configuration:
    return Configuration(p.start, 0, (x, ZERO_SEQ, ZERO_SEQ))


def step(p: Program, c: Configuration) -> Configuration | None:
    """One successor step; ``None`` when the head falls off the left end."""
    if c.state == p.halt:
        raise ValueError("a halted machine takes no steps")
    read = "".join(str(bit_at(t, c.head)) for t in c.tapes)
    write, move, nxt = p.rows[c.state, read]
    if move == "L" and c.head == 0:
        return None
    tapes = c.tapes
    if write != read:
        tapes = tuple(with_bit(t, c.head, int(w)) if w != r else t
                      for t, w, r in zip(c.tapes, write, read))
    return Configuration(nxt, c.head + (1 if move == "R" else -1), tapes)


def or_tapes(a: Tapes, b: Tapes) -> Tapes:
    return tuple(seq_or(x, y) for x, y in zip(a, b))


def limit_configuration(window: Sequence[Configuration], masks: Sequence[Tapes] | None = None,
                        limit_state: str = "limit") -> Configuration:
    """Configuration at the limit of a certified repeating window.

    ``window`` runs from the first occurrence of a configuration to its verbatim
    repeat.  ``masks`` gives, per block of the window (all but the last entry),
    the cells that held 1 during that block; by default the block is the single
    configuration itself.
    """
    if len(window) < 2 or window[0] != window[-1]:
        raise UncertifiedLimit("window does not end in a verbatim repeat")
    if masks is None:
        masks = [c.tapes for c in window[:-1]]
    if len(masks) != len(window) - 1:
        raise UncertifiedLimit("one mask per block of the window is required")
    flash = masks[0]
    for m in masks[1:]:
        flash = or_tapes(flash, m)
    return Configuration(limit_state, 0, tuple(flash))


# -- outcomes ---------------------------------------------------------------------

@dataclass(frozen=True)
class LoopWitness:
    level: int
    start: Ordinal
    period: int
    flash: tuple


@dataclass(frozen=True)
class Certificate:
    entries: tuple  # of (Ordinal, Configuration)
    witnesses: Mapping[Ordinal, LoopWitness] = field(default_factory=dict)

    def __hash__(self):
        return hash(self.entries)


@dataclass(frozen=True)
class Halted:
    output: SeqReal
    stage: Ordinal
    certificate: Certificate


@dataclass(frozen=True)
class NoOutput:
    stage: Ordinal


@dataclass(frozen=True)
class BudgetExceeded:
    stage: Ordinal
    configuration: Configuration | None = None


@dataclass(frozen=True)
class LimitUnresolved:
    stage: Ordinal
    reason: str = ""


RunOutcome = Union[Halted, NoOutput, BudgetExceeded, LimitUnresolved]


class _Stop(Exception):
    def __init__(self, outcome):
        self.outcome = outcome


def _block_start(sigma: Ordinal, level: int, n: int) -> Ordinal:
    return sigma if n == 0 else sigma + Ordinal.omega_power(level, n)


class _Runner:
    def __init__(self, program, budget, burst_limit, level_cap, accelerate, trace):
        self.p = program
        self.budget = budget
        self.burst = burst_limit
        self.level_cap = level_cap
        self.accelerate = accelerate
        self.trace = trace
        self.entries: list = []
        self.witnesses: dict = {}

    def arrive(self, c: Configuration, stage: Ordinal, record=True):
        if record:
            self.entries.append((stage, c))
        if self.trace is not None:
            self.trace(stage, c)
        if c.state == self.p.halt:
            cert = Certificate(tuple(self.entries), dict(self.witnesses))
            raise _Stop(Halted(c.tapes[2], stage, cert))
        if stage == self.budget:
            raise _Stop(BudgetExceeded(stage, c))

    def block(self, c: Configuration, sigma: Ordinal, k: int):
        """Run [sigma, sigma + w^k) from c; return the end configuration and its flash mask."""
        if k == 0:
            nxt = step(self.p, c)
            if nxt is None:
                raise _Stop(NoOutput(sigma))
            self.arrive(nxt, sigma + ONE)
            return nxt, c.tapes

        fits = sigma + Ordinal.omega_power(k) <= self.budget
        starts = [c]
        seen = {c: 0}
        masks = []
        cur = c
        n = 0
        while True:
            stage_n = _block_start(sigma, k - 1, n)
            if not fits and not stage_n + Ordinal.omega_power(k - 1) <= self.budget:
                self.block(cur, stage_n, k - 1)
                raise AssertionError("partial block ended without stopping")
            if fits and n >= self.burst:
                raise _Stop(LimitUnresolved(stage_n, f"no repeat within {self.burst} level-{k - 1} blocks"))
            cur, mask = self.block(cur, stage_n, k - 1)
            masks.append(mask)
            n += 1
            if cur not in seen:
                seen[cur] = n
                starts.append(cur)
                continue
            i = seen[cur]
            if fits:
                if k > self.level_cap:
                    raise _Stop(LimitUnresolved(_block_start(sigma, k - 1, n),
                                                f"limit of level {k} exceeds level cap {self.level_cap}"))
                return self._take_limit(sigma, k, i, n, masks)
            if self.accelerate:
                return self._skip_to_budget(sigma, k, i, n, starts)
            starts.append(cur)

    def _take_limit(self, sigma, k, i, j, masks):
        flash = masks[i]
        for m in masks[i + 1:j]:
            flash = or_tapes(flash, m)
        whole = masks[0]
        for m in masks[1:j]:
            whole = or_tapes(whole, m)
        stage = sigma + Ordinal.omega_power(k)
        self.witnesses[stage] = LoopWitness(k, _block_start(sigma, k - 1, i), j - i, flash)
        lim = Configuration(self.p.limit, 0, flash)
        self.arrive(lim, stage)
        return lim, whole

    def _skip_to_budget(self, sigma, k, i, j, starts):
        remaining = left_difference(self.budget, sigma)
        lead_exp, lead_coef = remaining.terms[0] if remaining.terms else (ZERO, 0)
        full = lead_coef if lead_exp == Ordinal.of(k - 1) else 0
        period = j - i
        target = starts[i + (full - i) % period]
        stage = _block_start(sigma, k - 1, full)
        self.arrive(target, stage, record=False)
        self.block(target, stage, k - 1)
        raise AssertionError("partial block ended without stopping")


def run(p: Program, x: SeqReal, budget: Ordinal, burst_limit: int = DEFAULT_BURST, *,
        level_cap: int = DEFAULT_LEVEL_CAP, accelerate: bool = True,
        trace: Callable[[Ordinal, Configuration], None] | None = None) -> RunOutcome:
    """Run ``p`` on input ``x`` through every stage up to ``budget``."""
    if burst_limit < 1:
        raise ValueError("burst_limit must be at least 1")
    runner = _Runner(p, budget, burst_limit, level_cap, accelerate, trace)
    start = initial_configuration(p, x)
    try:
        runner.arrive(start, ZERO)
        runner.block(start, ZERO, level_cap + 1)
    except _Stop as stop:
        return stop.outcome
    raise AssertionError("run ended without an outcome")


def run_steps(p: Program, x: SeqReal, n: int) -> Configuration | None:
    """Plain n-fold stepping without any loop detection (halted machines stay put)."""
    c = initial_configuration(p, x)
    for _ in range(n):
        if c.state == p.halt:
            break
        c = step(p, c)
        if c is None:
            return None
    return c


# -- certificates -----------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    accepted: bool
    clause: str = ""
    reason: str = ""
    index: int = -1

    def __bool__(self):
        return self.accepted


def validate_certificate(p: Program, x: SeqReal, cert: Certificate) -> Verdict:
    """Check a run record clause by clause; report the first failure.

    Clauses: (i) the start snapshot, (ii) successor snapshots, (iii) limit
    snapshots against their loop witnesses, (iv) the final snapshot halted.
    """
    entries = cert.entries
    if not entries:
        return Verdict(False, "i", "empty certificate", 0)
    stage0, c0 = entries[0]
    if stage0 != ZERO or c0 != initial_configuration(p, x):
        return Verdict(False, "i", "first snapshot is not the start configuration", 0)
    by_stage = {}
    by_stage[stage0] = 0
    for t in range(1, len(entries)):
        (prev_stage, prev), (stage, cur) = entries[t - 1], entries[t]
        kind = classify(stage)
        if kind.kind != "limit":
            if kind.predecessor != prev_stage:
                return Verdict(False, "ii", f"stage {stage} does not follow {prev_stage}", t)
            if prev.state == p.halt:
                return Verdict(False, "ii", "snapshot after the machine halted", t)
            if step(p, prev) != cur:
                return Verdict(False, "ii", f"snapshot at {stage} is not the step of its predecessor", t)
        else:
            problem = _check_limit(p, entries, by_stage, t, cert.witnesses.get(stage))
            if problem:
                return Verdict(False, "iii", problem, t)
        by_stage[stage] = t
    if entries[-1][1].state != p.halt:
        return Verdict(False, "iv", "final snapshot is not halted", len(entries) - 1)
    return Verdict(True)


def _check_limit(p, entries, by_stage, t, w: LoopWitness | None) -> str:
    (prev_stage, prev), (stage, cur) = entries[t - 1], entries[t]
    if w is None:
        return f"no loop witness for limit stage {stage}"
    if w.level < 1 or w.period < 1:
        return "malformed loop witness"
    if w.start + Ordinal.omega_power(w.level) != stage:
        return f"witness window at {w.start} does not close at {stage}"
    repeat = w.start + Ordinal.omega_power(w.level - 1, w.period)
    if repeat != prev_stage:
        return "limit snapshot does not directly follow the repeat"
    if prev.state == p.halt:
        return "limit after the machine halted"
    first = by_stage.get(w.start)
    if first is None or entries[first][1] != prev:
        return "window does not repeat verbatim"
    try:
        expected = limit_configuration([entries[first][1], prev],
                                       [_or_all(entries[first:t - 1])], p.limit)
    except UncertifiedLimit as exc:
        return str(exc)
    if tuple(w.flash) != expected.tapes:
        return "flash summary disagrees with the window"
    if cur != expected:
        return "limit snapshot disagrees with the limsup of its window"
    return ""


def _or_all(entries) -> Tapes:
    acc = entries[0][1].tapes
    for _, c in entries[1:]:
        acc = or_tapes(acc, c.tapes)
    return acc


# -- certificate files --------------------------------------------------------------

def format_certificate(cert: Certificate) -> str:
    lines = ["# ittm certificate"]
    for stage, c in cert.entries:
        lines.append(f"entry stage {format_ordinal(stage)} {c}")
        w = cert.witnesses.get(stage)
        if w is not None:
            lines.append(f"witness stage {format_ordinal(stage)} level {w.level} start "
                         f"{format_ordinal(w.start)} period {w.period} flash "
                         + " ".join(map(str, w.flash)))
    return "\n".join(lines) + "\n"


_ENTRY = re.compile(r"^entry stage (\S+) state (\S+) head (\d+) tapes (\S+) (\S+) (\S+)$")
_WITNESS = re.compile(r"^witness stage (\S+) level (\d+) start (\S+) period (\d+) flash (\S+) (\S+) (\S+)$")


def parse_certificate(text: str) -> Certificate:
    entries, witnesses = [], {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            m = _ENTRY.match(line)
            if m:
                stage, state, head, *tapes = m.groups()
                entries.append((parse_ordinal(stage),
                                Configuration(state, int(head), tuple(map(parse_seqreal, tapes)))))
                continue
            m = _WITNESS.match(line)
            if m:
                stage, level, start, period, *flash = m.groups()
                witnesses[parse_ordinal(stage)] = LoopWitness(
                    int(level), parse_ordinal(start), int(period), tuple(map(parse_seqreal, flash)))
                continue
        except ValueError as exc:
            raise CertificateFormatError(f"line {lineno}: {exc}") from exc
        raise CertificateFormatError(f"line {lineno}: unrecognized record {raw.strip()!r}")
    return Certificate(tuple(entries), witnesses)


def load_program(path) -> Program:
    with open(path) as fh:
        return parse_program(fh.read())


def shipped_program(name: str) -> Program:
    """A program from the bundled corpus, by file name (``flip.itm``) or stem."""
    from importlib.resources import files
    if not name.endswith(".itm"):
        name += ".itm"
    res = files("ittm") / "programs" / name
    if not res.is_file():
        raise FileNotFoundError(f"no shipped program named {name}")
    return parse_program(res.read_text())
