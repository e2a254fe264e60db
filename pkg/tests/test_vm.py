import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ittm.ordinal import ONE, ZERO, Ordinal, format_ordinal, parse_ordinal
from ittm.seqreal import ZERO_SEQ, bit_at, finite_support, with_bit
from ittm.vm import (
    BudgetExceeded, Certificate, Configuration, Halted, LimitUnresolved, LoopWitness, NoOutput,
    ProgramError, UncertifiedLimit, format_certificate, format_program, initial_configuration,
    limit_configuration, parse_certificate, parse_program, run, run_steps, shipped_program, step,
    validate_certificate,
)

CORPUS = ["halt1", "clock_w", "flip", "clock_w2p1", "clock_w2sq", "wo"]
HALTING = {"halt1": "1", "clock_w": "w+1", "flip": "w+2", "clock_w2p1": "w*2+1", "clock_w2sq": "w^2+1"}

ONE_STATE = """\
start *** -> *** R halt
limit *** -> *** R halt
"""


def test_one_state_program():
    p = parse_program(ONE_STATE)
    assert p.effective_states() == {"start", "halt"}


def test_incomplete_table():
    with pytest.raises(ProgramError, match="incomplete table"):
        parse_program("start 000 -> 000 R halt\nlimit *** -> *** R halt\n")


@pytest.mark.parametrize("text,msg", [
    ("start *** -> *** R halt\n", "missing limit"),
    ("limit *** -> *** R halt\n", "missing start"),
    ("start *** -> *** R start\nlimit *** -> *** R start\n", "missing halt"),
    ("start *** -> *** R halt\nlimit *** -> *** R halt\nhalt *** -> *** R halt\n", "halt state"),
    ("start 00 -> 000 R halt\n", "syntax"),
])
def test_program_errors(text, msg):
    with pytest.raises(ProgramError, match=msg):
        parse_program(text)


@pytest.mark.parametrize("name", CORPUS)
def test_format_fixpoint(name):
    p = shipped_program(name)
    text = format_program(p)
    assert parse_program(text) == p
    assert format_program(parse_program(text)) == text


def test_write_and_halt():
    p = parse_program("start *** -> **1 R halt\nlimit *** -> *** R halt\n")
    c = step(p, initial_configuration(p, ZERO_SEQ))
    assert c.state == "halt" and c.tapes[2] == finite_support({0})


def test_fall_off_left():
    p = parse_program("start *** -> *** L halt\nlimit *** -> *** R halt\n")
    assert step(p, initial_configuration(p, ZERO_SEQ)) is None
    out = run(p, ZERO_SEQ, parse_ordinal("w"))
    assert isinstance(out, NoOutput) and out.stage == ZERO


def test_flip_hand_trace():
    # stage n: odd stages sit in 'back' at cell 1; scratch cell 0 reads 1 at n = 1, 2 mod 4
    p = shipped_program("flip")
    c = initial_configuration(p, ZERO_SEQ)
    for n in range(1, 11):
        c = step(p, c)
        assert (c.state, c.head, bit_at(c.tapes[1], 0)) == (
            "back" if n % 2 else "start", 1 if n % 2 else 0, 1 if n % 4 in (1, 2) else 0)
    assert c == run_steps(p, ZERO_SEQ, 10)


def test_limit_configuration_examples():
    on, off = finite_support({0}), ZERO_SEQ
    window = [Configuration("a", 0, (off, off, off)), Configuration("b", 1, (off, on, off)),
              Configuration("a", 0, (off, off, off))]
    assert limit_configuration(window).tapes == (off, on, off)
    steady = [Configuration("a", 3, (off, off, on)), Configuration("a", 3, (off, off, on))]
    lim = limit_configuration(steady)
    assert lim.tapes == (off, off, on) and lim.state == "limit" and lim.head == 0
    with pytest.raises(UncertifiedLimit):
        limit_configuration(window[:2])


def test_flag_flash_window_gives_one():
    # each cycle lights scratch cell 0 and clears it again; the limit reads it as 1
    flag = finite_support({0})
    cycle = [Configuration("loop", 2, (ZERO_SEQ, ZERO_SEQ, ZERO_SEQ)),
             Configuration("switch", 2, (ZERO_SEQ, flag, ZERO_SEQ)),
             Configuration("clear", 2, (ZERO_SEQ, ZERO_SEQ, ZERO_SEQ)),
             Configuration("loop", 2, (ZERO_SEQ, ZERO_SEQ, ZERO_SEQ))]
    assert bit_at(limit_configuration(cycle).tapes[1], 0) == 1


def test_wo_guess_settles_on_a_well_order():
    # on a finite well-order the guess stops improving, so the first limit sees the flag off
    from ittm.wellorder import chain, relation_to_real
    limits = []
    run(shipped_program("wo"), relation_to_real(chain([1, 0])), parse_ordinal("w*4"),
        trace=lambda s, c: limits.append(c) if s.is_limit() else None)
    assert limits and bit_at(limits[0].tapes[1], 0) == 0


@pytest.mark.parametrize("name,stage", sorted(HALTING.items()))
def test_halting_stages(name, stage):
    out = run(shipped_program(name), ZERO_SEQ, parse_ordinal("w^3"))
    assert isinstance(out, Halted)
    assert format_ordinal(out.stage) == stage


def test_flip_output_and_budget():
    p = shipped_program("flip")
    out = run(p, ZERO_SEQ, parse_ordinal("w+5"))
    assert out.output == finite_support({0})
    short = run(p, ZERO_SEQ, parse_ordinal("w"))
    assert isinstance(short, BudgetExceeded) and format_ordinal(short.stage) == "w"


def test_limit_unresolved_on_small_burst():
    out = run(shipped_program("clock_w2sq"), ZERO_SEQ, parse_ordinal("w^3"), burst_limit=1)
    assert isinstance(out, LimitUnresolved)


def test_level_cap():
    out = run(shipped_program("clock_w2sq"), ZERO_SEQ, parse_ordinal("w^3"), level_cap=1)
    assert isinstance(out, LimitUnresolved)


@pytest.mark.parametrize("name", CORPUS)
def test_acceleration_soundness_exhaustive(name):
    # one plain pass gives every finite prefix; both run modes must land on it for each n
    p = shipped_program(name)
    x = ZERO_SEQ
    c = initial_configuration(p, x)
    plain = [c]
    for _ in range(10_000):
        if c is None or c.state == p.halt:
            break
        c = step(p, c)
        plain.append(c)
    seen = []
    run(p, x, Ordinal.of(10_000), accelerate=False, trace=lambda s, conf: seen.append((s, conf)))
    assert [conf for _, conf in seen] == plain[:len(seen)]
    assert [s for s, _ in seen] == [Ordinal.of(n) for n in range(len(seen))]
    for n in list(range(0, 10_001, 1)) if len(plain) <= 10 else list(range(0, 10_001, 97)) + [10_000]:
        expect = plain[min(n, len(plain) - 1)]
        for acc in (True, False) if n % 5 == 0 else (True,):
            out = run(p, x, Ordinal.of(n), accelerate=acc)
            got = out.configuration if isinstance(out, BudgetExceeded) else out.certificate.entries[-1][1]
            assert got == expect, (n, acc)


def test_accelerated_runs_all_n_for_flip():
    p = shipped_program("flip")
    for n in range(0, 10_001):
        out = run(p, ZERO_SEQ, Ordinal.of(n))
        assert out.configuration == run_steps(p, ZERO_SEQ, n) if n < 50 else out.configuration.state in ("start", "back")
        assert out.configuration.state == ("back" if n % 2 else "start")
        assert bit_at(out.configuration.tapes[1], 0) == (1 if n % 4 in (1, 2) else 0)


@pytest.mark.parametrize("name", sorted(HALTING))
def test_determinism(name):
    a = run(shipped_program(name), ZERO_SEQ, parse_ordinal("w^3"))
    b = run(shipped_program(name), ZERO_SEQ, parse_ordinal("w^3"))
    assert a == b and format_certificate(a.certificate) == format_certificate(b.certificate)


# -- certificates ---------------------------------------------------------------------

def certificate(name):
    return run(shipped_program(name), ZERO_SEQ, parse_ordinal("w^3")).certificate


@pytest.mark.parametrize("name", sorted(HALTING))
def test_certificate_accepts_and_round_trips(name):
    cert = certificate(name)
    p = shipped_program(name)
    assert validate_certificate(p, ZERO_SEQ, cert)
    again = parse_certificate(format_certificate(cert))
    assert again.entries == cert.entries and dict(again.witnesses) == dict(cert.witnesses)
    assert validate_certificate(p, ZERO_SEQ, again)


def test_flipped_bit_in_middle_snapshot():
    cert = certificate("flip")
    k = 2
    stage, c = cert.entries[k]
    bad = Configuration(c.state, c.head, (c.tapes[0], with_bit(c.tapes[1], 5, 1 - bit_at(c.tapes[1], 5)), c.tapes[2]))
    entries = cert.entries[:k] + ((stage, bad),) + cert.entries[k + 1:]
    v = validate_certificate(shipped_program("flip"), ZERO_SEQ, Certificate(entries, cert.witnesses))
    assert not v and v.clause == "ii"


def test_final_snapshot_not_halted():
    cert = certificate("flip")
    v = validate_certificate(shipped_program("flip"), ZERO_SEQ, Certificate(cert.entries[:-1], cert.witnesses))
    assert not v and v.clause == "iv"


def test_wrong_input_rejects_clause_i():
    v = validate_certificate(shipped_program("flip"), finite_support({3}), certificate("flip"))
    assert not v and v.clause == "i"


def mutate(cert: Certificate, rng: random.Random) -> Certificate:
    """Change one entry of the certificate in one place."""
    entries = list(cert.entries)
    k = rng.randrange(len(entries))
    stage, c = entries[k]
    kind = rng.choice(["bit", "head", "state", "stage"])
    if kind == "bit":
        t = rng.randrange(3)
        cell = rng.randrange(8)
        tapes = list(c.tapes)
        tapes[t] = with_bit(tapes[t], cell, 1 - bit_at(tapes[t], cell))
        c = Configuration(c.state, c.head, tuple(tapes))
    elif kind == "head":
        c = Configuration(c.state, c.head + rng.choice([1, 2, 3]), c.tapes)
    elif kind == "state":
        states = sorted({s for s, _ in shipped_program_cache[cert].rows} | {"halt"} - {c.state})
        c = Configuration(rng.choice(states), c.head, c.tapes)
    else:
        stage = stage + ONE
    entries[k] = (stage, c)
    return Certificate(tuple(entries), cert.witnesses)


shipped_program_cache: dict = {}


@pytest.mark.parametrize("name", sorted(HALTING))
def test_every_single_entry_mutation_rejects(name):
    cert = certificate(name)
    p = shipped_program(name)
    shipped_program_cache[cert] = p
    rng = random.Random(name)
    for _ in range(1000):
        bad = mutate(cert, rng)
        if bad.entries == cert.entries:
            continue
        assert not validate_certificate(p, ZERO_SEQ, bad)


def test_witness_tampering_rejects():
    cert = certificate("clock_w2sq")
    p = shipped_program("clock_w2sq")
    for stage, w in cert.witnesses.items():
        for bad in (LoopWitness(w.level, w.start, w.period + 1, w.flash),
                    LoopWitness(w.level + 1, w.start, w.period, w.flash),
                    LoopWitness(w.level, w.start, w.period, (w.flash[0], with_bit(w.flash[1], 9, 1), w.flash[2]))):
            v = validate_certificate(p, ZERO_SEQ, Certificate(cert.entries, {**cert.witnesses, stage: bad}))
            assert not v and v.clause == "iii"


@settings(max_examples=30)
@given(st.integers(0, 60))
def test_finite_budget_matches_steps_on_inputs(n):
    p = shipped_program("wo")
    from ittm.wellorder import chain, relation_to_real
    x = relation_to_real(chain([2, 0, 1]))
    out = run(p, x, Ordinal.of(n), accelerate=False)
    want = run_steps(p, x, n)
    got = out.configuration if isinstance(out, BudgetExceeded) else out.certificate.entries[-1][1]
    assert got == want
