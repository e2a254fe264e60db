import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ittm.logic import (
    AND, EXISTS, FORALL, IFF, IMPLIES, OR, App, Bin, Eq, FormulaError, Language, Not, Quant, Rel,
    Var, decode_formula, encode_formula, parse_formula, sequence_from_number, sequence_number,
    subformula_codes, subformulas,
)
from ittm.modelkit import (
    NotCongruence, NotEquivalence, StructureError, UnboundVariable, atomic_diagram, diagram_row,
    find_isomorphism, is_isomorphism, make_structure, quotient_presentation, structure_from_json,
    structure_to_json, tarski_eval, tarski_vaught_check, term_eval, validate_writable, writable_code,
)
from ittm.seqreal import finite_support, rows_to_real

LANG = Language.build(("<", "relation", 2), ("f", "function", 1), ("c", "constant"), ("g", "function", 2))
ORDER = Language.build(("<=", "relation", 2), ("<", "relation", 2))
EMPTY_LANG = Language({})


def rand_term(rng, nvars, depth):
    if depth == 0 or rng.random() < 0.4:
        return Var(rng.randrange(nvars)) if rng.random() < 0.7 else App("c")
    if rng.random() < 0.5:
        return App("f", (rand_term(rng, nvars, depth - 1),))
    return App("g", (rand_term(rng, nvars, depth - 1), rand_term(rng, nvars, depth - 1)))


def rand_formula(rng, nvars=3, depth=3):
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            return Eq(rand_term(rng, nvars, 2), rand_term(rng, nvars, 2))
        return Rel("<", (rand_term(rng, nvars, 2), rand_term(rng, nvars, 2)))
    r = rng.random()
    if r < 0.2:
        return Not(rand_formula(rng, nvars, depth - 1))
    if r < 0.6:
        op = rng.choice((AND, OR, IMPLIES, IFF))
        return Bin(op, rand_formula(rng, nvars, depth - 1), rand_formula(rng, nvars, depth - 1))
    return Quant(rng.choice((FORALL, EXISTS)), rng.randrange(nvars), rand_formula(rng, nvars, depth - 1))


def rand_structure(rng, n):
    dom = tuple(finite_support({i}) for i in range(n))
    rel = [t for t in itertools.product(dom, repeat=2) if rng.random() < 0.4]
    f = {(a,): rng.choice(dom) for a in dom}
    g = {ab: rng.choice(dom) for ab in itertools.product(dom, repeat=2)}
    return make_structure(LANG, dom, {"c": rng.choice(dom)}, {"f": f, "g": g}, {"<": rel})


def chain(n):
    dom = tuple(finite_support({i}) for i in range(n))
    le = [(dom[i], dom[j]) for i in range(n) for j in range(n) if i <= j]
    lt = [(dom[i], dom[j]) for i in range(n) for j in range(n) if i < j]
    return make_structure(ORDER, dom, relations={"<=": le, "<": lt})


# -- coding -----------------------------------------------------------------------------

def test_simple_round_trip():
    phi = Eq(Var(0), Var(1))
    assert encode_formula(phi, LANG) == (0, 8, 10)
    assert decode_formula(encode_formula(phi, LANG), LANG) == phi


def test_round_trip_500_random():
    rng = random.Random(7)
    for _ in range(500):
        phi = rand_formula(rng)
        code = encode_formula(phi, LANG)
        assert decode_formula(code, LANG) == phi
        # nested pairing squares at every token, so only short codes get numbered
        if len(code) <= 8:
            assert sequence_from_number(sequence_number(code)) == code


def test_truncated_code_rejected():
    rng = random.Random(8)
    for _ in range(100):
        code = encode_formula(rand_formula(rng), LANG)
        for cut in range(len(code)):
            with pytest.raises(FormulaError):
                decode_formula(code[:cut], LANG)
        with pytest.raises(FormulaError):
            decode_formula(code + (0,), LANG)


def test_subformula_codes_match_children():
    rng = random.Random(9)
    for _ in range(200):
        phi = rand_formula(rng)
        code = encode_formula(phi, LANG)
        assert subformula_codes(code, LANG) == tuple(encode_formula(s, LANG) for s in subformulas(phi))


def test_parse_then_code():
    phi = parse_formula("exists x. forall y. x <= y", ORDER)
    assert phi == Quant(EXISTS, 0, Quant(FORALL, 1, Rel("<=", (Var(0), Var(1)))))
    assert decode_formula(encode_formula(phi, ORDER), ORDER) == phi


# -- evaluation --------------------------------------------------------------------------

def naive_term(S, t, env):
    # second evaluator, written against the tables directly
    if type(t).__name__ == "Var":
        return env[t.index]
    vals = [naive_term(S, a, env) for a in t.args]
    return S.constants[t.name] if not vals else S.functions[t.name][tuple(vals)]


def test_term_eval_basic():
    rng = random.Random(1)
    S = rand_structure(rng, 3)
    assert term_eval(S, App("c"), {}) == S.constants["c"]
    dom = S.domain
    ident = make_structure(LANG, dom, {"c": dom[0]}, {"f": {(a,): a for a in dom}, "g": S.functions["g"]},
                           {"<": []})
    assert term_eval(ident, App("f", (App("f", (Var(0),)),)), {0: dom[2]}) == dom[2]
    with pytest.raises(UnboundVariable):
        term_eval(S, Var(5), {0: dom[0]})


def test_term_eval_vs_independent():
    rng = random.Random(2)
    for _ in range(50):
        S = rand_structure(rng, rng.randint(1, 4))
        for _ in range(20):
            t = rand_term(rng, 3, 4)
            env = {i: rng.choice(S.domain) for i in range(3)}
            assert term_eval(S, t, env) == naive_term(S, t, env)


def test_tarski_order_examples():
    S = chain(3)
    assert tarski_eval(S, parse_formula("exists x. forall y. x <= y", ORDER))
    assert not tarski_eval(S, parse_formula("forall x. exists y. y < x", ORDER))
    with pytest.raises(UnboundVariable):
        tarski_eval(S, parse_formula("v0 <= v1", ORDER), {0: S.domain[0]})


def test_tarski_isomorphism_invariance():
    rng = random.Random(3)
    for _ in range(100):
        S = rand_structure(rng, rng.randint(1, 4))
        perm = list(range(100, 100 + S.size))
        rng.shuffle(perm)
        pi = {a: finite_support({p}) for a, p in zip(S.domain, perm)}
        T = make_structure(LANG, [pi[a] for a in S.domain], {"c": pi[S.constants["c"]]},
                           {k: {tuple(pi[x] for x in args): pi[v] for args, v in t.items()}
                            for k, t in S.functions.items()},
                           {"<": [(pi[a], pi[b]) for a, b in S.relations["<"]]})
        assert is_isomorphism(S, T, pi)
        phi = rand_formula(rng)
        env = {i: rng.choice(S.domain) for i in range(3)}
        assert tarski_eval(S, phi, env) == tarski_eval(T, phi, {i: pi[a] for i, a in env.items()})


def test_atomic_formulas_agree_with_diagram():
    rng = random.Random(4)
    S = rand_structure(rng, 3)
    from ittm.modelkit import _diagram_structure
    D = _diagram_structure(S)
    for lit in atomic_diagram(S):
        assert tarski_eval(D, lit)


# -- writable structures -------------------------------------------------------------

def test_two_element_structure_validates():
    a, b = finite_support({0}), finite_support({1, 3})
    S = make_structure(LANG, (a, b), {"c": b}, {"f": {(a,): b, (b,): a},
                                                "g": {(x, y): x for x in (a, b) for y in (a, b)}},
                       {"<": [(a, b)]})
    r = writable_code(S)
    T = validate_writable(r, 2, LANG)
    assert T == S
    assert tarski_eval(T, parse_formula("exists x. x < f(x)", LANG))
    assert not tarski_eval(T, parse_formula("forall x. x < f(x)", LANG))


def test_duplicate_rows_rejected():
    row = finite_support({2})
    r = rows_to_real({0: finite_support(()), 1: row, 2: row})
    with pytest.raises(StructureError, match="duplicate"):
        validate_writable(r, 2, EMPTY_LANG)


def test_empty_diagram_one_row():
    r = rows_to_real({0: finite_support(()), 1: finite_support({5})})
    S = validate_writable(r, 1, EMPTY_LANG)
    assert S.domain == (finite_support({5}),)
    assert tarski_eval(S, parse_formula("forall x. forall y. x = y", EMPTY_LANG))


def test_contradictory_diagram_rejected():
    a, b = finite_support({0}), finite_support({1})
    L = Language.build(("P", "relation", 1))
    S = make_structure(L, (a, b), relations={"P": [(a,)]})
    row = set(diagram_row(S).ones)
    from ittm.modelkit import diagram_language, sentence_number
    lang = diagram_language(L, 2)
    row.add(sentence_number(Rel("P", (App("@1"),)), lang))
    row.add(sentence_number(Not(Rel("P", (App("@1"),))), lang))
    r = rows_to_real({0: finite_support(row), 1: a, 2: b})
    with pytest.raises(StructureError, match="negation"):
        validate_writable(r, 2, L)


def test_structure_json_round_trip():
    rng = random.Random(5)
    S = rand_structure(rng, 3)
    assert structure_from_json(structure_to_json(S)) == S


# -- quotients ---------------------------------------------------------------------------

SUCC = Language.build(("s", "function", 1), ("z", "constant"))


def cyclic(n):
    dom = tuple(finite_support({i}) for i in range(n))
    return make_structure(SUCC, dom, {"z": dom[0]}, {"s": {(dom[i],): dom[(i + 1) % n] for i in range(n)}})


def test_identity_quotient():
    S = cyclic(5)
    Q = quotient_presentation(S, [(a, a) for a in S.domain])
    assert Q == S


def test_mod_three():
    S = cyclic(9)
    E = [(S.domain[i], S.domain[j]) for i in range(9) for j in range(9) if i % 3 == j % 3]
    Q = quotient_presentation(S, E)
    assert Q.size == 3
    assert Q.domain == S.domain[:3]
    assert find_isomorphism(Q, cyclic(3)) is not None
    assert find_isomorphism(Q, cyclic(4)) is None


def test_non_congruence_witness():
    S = cyclic(4)
    d = S.domain
    E = [(a, a) for a in d] + [(d[0], d[1]), (d[1], d[0])]
    with pytest.raises(NotCongruence) as exc:
        quotient_presentation(S, E)
    w = exc.value
    assert w.symbol == "s"
    xs, ys = w.left, w.right
    assert (S.functions["s"][xs], S.functions["s"][ys]) not in set(E)


def test_non_equivalence():
    S = cyclic(3)
    d = S.domain
    with pytest.raises(NotEquivalence):
        quotient_presentation(S, [(d[0], d[0]), (d[1], d[1])])
    with pytest.raises(NotEquivalence):
        quotient_presentation(S, [(a, a) for a in d] + [(d[0], d[1])])


def partitions(xs):
    if not xs:
        yield []
        return
    head, rest = xs[0], xs[1:]
    for p in partitions(rest):
        yield [[head]] + p
        for i in range(len(p)):
            yield p[:i] + [[head] + p[i]] + p[i + 1:]


def set_quotient(S, blocks):
    cls = {a: frozenset(b) for b in blocks for a in b}
    dom = tuple(dict.fromkeys(cls[a] for a in S.domain))
    funs = {k: {tuple(cls[x] for x in args): cls[v] for args, v in t.items()} for k, t in S.functions.items()}
    rels = {k: [tuple(cls[x] for x in t) for t in r] for k, r in S.relations.items()}
    consts = {k: cls[v] for k, v in S.constants.items()}
    return make_structure(S.language, dom, consts, funs, rels)


def is_congruence(S, cls):
    for k, t in S.functions.items():
        for args, v in t.items():
            for args2, v2 in t.items():
                if all(cls[a] == cls[b] for a, b in zip(args, args2)) and cls[v] != cls[v2]:
                    return False
    for k, r in S.relations.items():
        keys = {tuple(cls[x] for x in t) for t in r}
        arity = S.language.by_name(k).arity
        for t in itertools.product(S.domain, repeat=arity):
            if (t in r) != (tuple(cls[x] for x in t) in keys):
                return False
    return True


@pytest.mark.parametrize("seed", range(4))
def test_quotient_matches_set_quotient(seed):
    rng = random.Random(seed)
    L = Language.build(("s", "function", 1), ("P", "relation", 1), ("z", "constant"))
    n = rng.randint(2, 6) if seed else 6
    dom = tuple(finite_support({i}) for i in range(n))
    # a map with a small image makes congruences plentiful
    img = rng.sample(dom, min(2, n))
    S = make_structure(L, dom, {"z": dom[0]}, {"s": {(a,): rng.choice(img) for a in dom}},
                       {"P": [(a,) for a in dom if rng.random() < 0.5]})
    seen = 0
    for blocks in partitions(list(dom)):
        cls = {a: frozenset(b) for b in blocks for a in b}
        E = [(a, b) for a in dom for b in dom if cls[a] == cls[b]]
        if not is_congruence(S, cls):
            with pytest.raises(NotCongruence):
                quotient_presentation(S, E)
            continue
        seen += 1
        Q = quotient_presentation(S, E)
        assert find_isomorphism(Q, set_quotient(S, blocks)) is not None
    assert seen >= 1


# -- Tarski-Vaught -------------------------------------------------------------------------

def test_tv_full_domain():
    rng = random.Random(6)
    for _ in range(10):
        S = rand_structure(rng, rng.randint(1, 3))
        assert tarski_vaught_check(S.domain, S, 1)


def test_tv_missing_minimum():
    S = chain(3)
    res = tarski_vaught_check(S.domain[1:], S, 1)
    assert not res.holds
    m = len(res.parameters)
    env = {i: p for i, p in enumerate(res.parameters)}
    assert tarski_eval(S, Quant(EXISTS, m, res.formula), env)
    assert not any(tarski_eval(S, res.formula, {**env, m: b}) for b in res.parameters)


def test_tv_pure_equality():
    one = make_structure(EMPTY_LANG, (finite_support({0}),))
    assert tarski_vaught_check(one.domain, one, 1)
    two = make_structure(EMPTY_LANG, (finite_support({0}), finite_support({1})))
    res = tarski_vaught_check(two.domain[:1], two, 1)
    assert not res.holds
    assert tarski_vaught_check(two.domain[:1], two, 0)


def partial_iso_extends(S, params, a, b):
    # b and a realize the same quantifier-free type over params
    # iff fixing params and sending b to a is a partial isomorphism (relational S)
    src, dst = params + (b,), params + (a,)
    if any((src[i] == src[j]) != (dst[i] == dst[j]) for i in range(len(src)) for j in range(len(src))):
        return False
    for k, r in S.relations.items():
        arity = S.language.by_name(k).arity
        for idx in itertools.product(range(len(src)), repeat=arity):
            if (tuple(src[i] for i in idx) in r) != (tuple(dst[i] for i in idx) in r):
                return False
    return True


@given(st.integers(1, 4), st.data())
def test_tv_depth_one_vs_partial_isomorphisms(n, data):
    L = Language.build(("R", "relation", 2))
    dom = tuple(range(n))
    rel = data.draw(st.sets(st.tuples(st.sampled_from(dom), st.sampled_from(dom))))
    S = make_structure(L, dom, relations={"R": rel})
    sub = tuple(sorted(data.draw(st.sets(st.sampled_from(dom), min_size=1))))
    expected = all(any(partial_iso_extends(S, sub, a, b) for a in sub) for b in dom)
    assert tarski_vaught_check(sub, S, 1).holds == expected


@given(st.integers(2, 4), st.integers(1, 2), st.data())
def test_tv_witness_is_a_real_counterexample(n, depth, data):
    L = Language.build(("R", "relation", 2))
    dom = tuple(range(n))
    rel = data.draw(st.sets(st.tuples(st.sampled_from(dom), st.sampled_from(dom))))
    S = make_structure(L, dom, relations={"R": rel})
    sub = tuple(sorted(data.draw(st.sets(st.sampled_from(dom), min_size=1, max_size=n - 1))))
    res = tarski_vaught_check(sub, S, depth)
    if res.holds:
        return
    m = len(res.parameters)
    env = dict(enumerate(res.parameters))
    assert tarski_eval(S, Quant(EXISTS, m, res.formula), env)
    assert not any(tarski_eval(S, res.formula, {**env, m: a}) for a in sub)
