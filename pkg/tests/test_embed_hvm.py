import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from embedcert.embed_hvm import (HvmParams, count_schema, derive_conj_step, derive_d_conjugation, derive_law_instance,
                                 derive_relatively_free_trivial, derive_sigma_trivial, gen_G, gen_H, lambda_word,
                                 sigma_word)
from embedcert.presentations import conjugate_product_word, to_conjugate_product, verify_trace
from embedcert.verbal import VerbalWitness, witness_search
from embedcert.words import LawError, free_reduce, invert, parse_law, substitute

CUBE = parse_law("x1^3")
COMM = parse_law("[x1,x2]")


def random_values(rng, p, total):
    X = [[] for _ in range(p.k)]
    for _ in range(total):
        x = X[rng.randrange(p.k)]
        c = rng.choice((1, -1)) * rng.randint(1, p.m)
        if x and x[-1] == -c:
            x.pop()
        else:
            x.append(c)
    return tuple(tuple(x) for x in X)


def check(trace):
    rep = verify_trace(trace)
    if not trace.end:
        assert conjugate_product_word(trace.presentation, to_conjugate_product(trace)) == free_reduce(trace.start)
    return rep


def test_counts_cube_m2():
    p = HvmParams(CUBE, 2)
    G, H = gen_G(p), gen_H(p)
    assert (len(G.alphabet), len(G.relators)) == (37, 71)
    assert (len(H.alphabet), len(H.relators)) == (41, 124)
    c = count_schema(p)
    assert (c["G"]["generators"], sum(c["G"]["relatorsByTag"].values())) == (37, 71)
    assert (c["H"]["generators"], sum(c["H"]["relatorsByTag"].values())) == (41, 124)
    assert G.tags() == c["G"]["relatorsByTag"] and H.tags() == c["H"]["relatorsByTag"]


def test_counts_commutator_m1():
    p = HvmParams(COMM, 1)
    G = gen_G(p)
    assert (len(G.alphabet), len(G.relators)) == (37, 71)


def test_G_is_prefix_of_H():
    for law, m in ((CUBE, 2), (COMM, 1), (parse_law("x1^2 x2^-1 x1 x2"), 2)):
        p = HvmParams(law, m)
        G, H = gen_G(p), gen_H(p)
        assert H.alphabet.names[:len(G.alphabet)] == G.alphabet.names
        assert H.relators[:len(G.relators)] == G.relators


def test_H_relators():
    p = HvmParams(CUBE, 2)
    H = gen_H(p)
    rel = {w for w, _ in H.relators}
    for j in (1, 2):
        for ell in (1, 2):
            assert (p.b(j), p.a(ell), -p.b(j), -p.a(ell)) in rel
    bletters = {p.b(1), p.b(2)}
    assert not any(all(abs(x) in bletters for x in w) for w in rel)
    assert not any(tag == "2.15" for _, tag in H.relators)


def test_relation_2_1_form():
    p = HvmParams(CUBE, 1)
    r, a = p.r(1, 1), p.a(1)
    rel = {w for w, _ in gen_G(p).relators}
    for t in (2, 3, 4):
        q = p.q(t)
        assert (-r, q, r, -q, -a) in rel
    assert (-r, p.q(1), r, -p.q(1)) in rel


def test_hub():
    p = HvmParams(CUBE, 2)
    (hub,) = [w for w, tag in gen_G(p).relators if tag == "2.6"]
    assert gen_G(p).alphabet.format(hub) == " ".join(f"k{i} q1 q2 q3 q4" for i in range(1, 30))
    assert hub == sigma_word(p, ((),))


def test_words():
    p = HvmParams(CUBE, 1)
    alpha = gen_G(p).alphabet
    assert alpha.format(lambda_word(p, ((),))) == "q1 q2 q3 q4"
    assert alpha.format(lambda_word(p, ((1,),))) == "q1 a1 q2 a1 q3 a1 q4"
    p2 = HvmParams(COMM, 2)
    assert gen_G(p2).alphabet.format(lambda_word(p2, ((1,), (2,)))) == "q1 a1 q2 a2 q3 a1^-1 q4 a2^-1 q5"


def test_bad_params():
    with pytest.raises(ValueError):
        HvmParams(CUBE, 1, N=10)
    assert len(gen_G(HvmParams(CUBE, 1, N=7, allow_small_N=True)).alphabet) == 1 + 4 + 7 + 1
    with pytest.raises(ValueError):
        HvmParams(CUBE, 0)
    with pytest.raises(LawError):
        parse_law("x1 x1^-1")


def test_conj_step_minimal_law():
    p = HvmParams(parse_law("x1"), 1)
    t = derive_conj_step(p, (1, 1), "+", ((),))
    assert check(t).area == 2
    assert t.end == lambda_word(p, ((1,),))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["x1^3", "[x1,x2]", "x1^2 x2^-1 x1 x2"]), st.sampled_from("+-"))
def test_conj_step_random(seed, law, direction):
    rng = random.Random(seed)
    p = HvmParams(parse_law(law), 2)
    X = random_values(rng, p, rng.randint(0, 10))
    j, ell = rng.randint(1, 2), rng.randint(1, p.k)
    t = derive_conj_step(p, (j, ell), direction, X)
    rep = check(t)
    e = 1 if direction == "+" else -1
    Xp = list(X)
    Xp[ell - 1] = free_reduce(X[ell - 1] + (e * j,))
    assert t.end == lambda_word(p, Xp)
    lam = lambda_word(p, X)
    # one cell per letter of the longer of the two Lambda words
    assert rep.area == (len(lam) if direction == "+" else len(lambda_word(p, Xp)))
    tags = {t.presentation.relators[s.rel][1] for s in t.steps if s.kind == "ApplyRelator"}
    assert tags <= {"2.1", "2.2", "2.3", "2.4"}


def test_conj_steps_compose_to_lambda():
    p = HvmParams(COMM, 2)
    X = [(), ()]
    target = ((1, 2, 1), (-2, -1))
    for ell, word in enumerate(target, start=1):
        for c in word:
            t = derive_conj_step(p, (abs(c), ell), "+" if c > 0 else "-", tuple(X))
            assert t.start[1:-1] == lambda_word(p, X)
            X[ell - 1] = free_reduce(X[ell - 1] + (c,))
            assert t.end == lambda_word(p, X)
    assert tuple(X) == target


def test_sigma_trivial_examples():
    p = HvmParams(CUBE, 1)
    assert check(derive_sigma_trivial(p, ((),))).area == 1
    assert check(derive_sigma_trivial(p, ((1,),))).area == 146
    p2 = HvmParams(CUBE, 2)
    for X in (((1, -2, 1, 1),), ((-1, -1, 2, 2, 1, 1, 2, -1, 2, 1),)):
        t = derive_sigma_trivial(p2, X)
        assert check(t).area > 0 and t.start == sigma_word(p2, X) and t.end == ()


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["x1^3", "[x1,x2]"]))
def test_sigma_trivial_random(seed, law):
    rng = random.Random(seed)
    p = HvmParams(parse_law(law), 2)
    X = random_values(rng, p, rng.randint(0, 8))
    t = derive_sigma_trivial(p, X)
    check(t)
    tags = {t.presentation.relators[s.rel][1] for s in t.steps if s.kind == "ApplyRelator"}
    assert tags <= {"2.1", "2.2", "2.3", "2.4", "2.5", "2.6"}


def test_d_conjugation():
    p = HvmParams(CUBE, 1)
    assert check(derive_d_conjugation(p, ((),))).area == p.M
    t = derive_d_conjugation(p, ((1,),))
    b1 = p.b(1)
    lam = lambda_word(p, ((1,),))
    assert t.start[len(lam) + 2:len(lam) + 5] == (-b1, -b1, -b1)
    assert check(t).area == 16


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_d_conjugation_random(seed):
    rng = random.Random(seed)
    p = HvmParams(COMM, 2)
    t = derive_d_conjugation(p, random_values(rng, p, rng.randint(0, 8)))
    check(t)
    tags = {t.presentation.relators[s.rel][1] for s in t.steps if s.kind == "ApplyRelator"}
    assert tags <= {"2.11", "2.12", "2.13", "2.14"}


def test_law_instance_cube():
    p = HvmParams(CUBE, 1)
    b1 = p.b(1)
    areas = []
    for t in range(6):
        tr = derive_law_instance(p, ((b1,) * t,))
        assert tr.start == (b1,) * (3 * t) and tr.end == ()
        areas.append(check(tr).area)
    assert areas == [0, 540, 1112, 1867, 2805, 3926]


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_law_instance_random(seed):
    rng = random.Random(seed)
    p = HvmParams(COMM, 2)
    X = random_values(rng, p, rng.randint(0, 5))
    Y = tuple(p.a_to_b(x) for x in X)
    t = derive_law_instance(p, Y)
    assert t.start == substitute(p.v, Y)
    check(t)


def test_relatively_free_examples():
    p = HvmParams(COMM, 2)
    w = (p.b(1), p.b(2), -p.b(1), -p.b(2))
    wit = witness_search(COMM, (1, 2, -1, -2), 4, 2)
    assert wit.factorCount == 1
    t = derive_relatively_free_trivial(p, w, wit)
    assert check(t).area == 1131
    sq = HvmParams(parse_law("x1^2"), 1)
    w = (sq.b(1),) * 2
    t = derive_relatively_free_trivial(sq, w, witness_search(sq.v, (1, 1), 4, 2))
    assert check(t).area == check(derive_law_instance(sq, ((sq.b(1),),))).area
    p4 = HvmParams(COMM, 4)
    w1, w2 = (1, 2, -1, -2), (3, 4, -3, -4)
    wit1, wit2 = witness_search(COMM, w1, 4, 2), witness_search(COMM, w2, 4, 2)
    both = derive_relatively_free_trivial(p4, p4.a_to_b(w1 + w2), VerbalWitness(COMM, wit1.factors + wit2.factors))
    one = derive_relatively_free_trivial(p4, p4.a_to_b(w1), wit1)
    two = derive_relatively_free_trivial(p4, p4.a_to_b(w2), wit2)
    assert check(both).area <= check(one).area + check(two).area


def test_relatively_free_rejects_bad_witness():
    p = HvmParams(COMM, 2)
    wit = witness_search(COMM, (1, 2, -1, -2), 4, 2)
    with pytest.raises(ValueError):
        derive_relatively_free_trivial(p, (p.b(2), p.b(1), -p.b(2), -p.b(1)), wit)
    with pytest.raises(ValueError):
        derive_relatively_free_trivial(HvmParams(CUBE, 2), (p.b(1),), wit)
