import random
from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from embedcert.presentations import (APPLY, CANCEL, INSERT, DerivationTrace, GroupPresentation, Step, TraceBuilder,
                                     TraceError, apply_step, concat_traces, conjugate_product_word, conjugate_trace,
                                     empty_trace, invert_trace, presentation_from_json, presentation_to_json,
                                     reverse_trace, to_conjugate_product, trace_from_json, trace_to_json,
                                     verify_trace)
from embedcert.words import Alphabet, concat, free_reduce, invert
from strategies import raw_words

AB = Alphabet(["a", "b"])
BS12 = GroupPresentation(AB, ((AB.parse("b^-1 a b a^-2"), "bs"),))
TWO = GroupPresentation(AB, ((AB.parse("b^-1 a b a^-2"), "bs"), (AB.parse("a b a^-1 b^-1"), "comm")))


def naive_apply(word, step, pres):
    """Name-level recomputation of a relator application."""
    names = pres.alphabet.names
    text = [names[abs(x) - 1] + ("" if x > 0 else "'") for x in pres.relators[step.rel][0]]
    if step.exp == -1:
        text = [t[:-1] if t.endswith("'") else t + "'" for t in reversed(text)]
    d = deque(text)
    d.rotate(-step.rot)
    rot = list(d)
    p, tail = rot[:step.split], rot[step.split:]
    q = [t[:-1] if t.endswith("'") else t + "'" for t in reversed(tail)]
    cur = [names[abs(x) - 1] + ("" if x > 0 else "'") for x in word]
    assert cur[step.pos:step.pos + len(p)] == p
    out = cur[:step.pos] + q + cur[step.pos + len(p):]
    return tuple(pres.alphabet.gen(t.rstrip("'")) * (-1 if t.endswith("'") else 1) for t in out)


def random_trace(pres, seed, start=None, nsteps=12):
    rng = random.Random(seed)
    start = start if start is not None else free_reduce(rng.choice((1, -1, 2, -2)) for _ in range(rng.randint(0, 6)))
    b = TraceBuilder(pres, start)
    for _ in range(nsteps):
        choice = rng.random()
        w = b.word
        pairs = [i for i in range(len(w) - 1) if w[i] == -w[i + 1]]
        if choice < 0.3 and pairs:
            b.cancel(rng.choice(pairs))
        elif choice < 0.5:
            b.insert(rng.randint(0, len(w)), rng.choice((1, -1, 2, -2)))
        else:
            rel = rng.randrange(len(pres.relators))
            exp = rng.choice((1, -1))
            R = pres.relators[rel][0]
            R = R if exp == 1 else invert(R)
            rot = rng.randrange(len(R))
            split = rng.randint(0, len(R))
            r = R[rot:] + R[:rot]
            p, q = r[:split], invert(r[split:])
            pos = rng.randint(0, len(w))
            b.insert_word(pos, p)
            b.steps.append(Step(APPLY, pos, rel, rot, exp, split))
            b.word[pos:pos + len(p)] = q
            b._grow()
    return b.finish()


def test_insert_into_empty():
    assert apply_step((), Step(INSERT, 0, letter=1), BS12) == (1, -1)


def test_single_cell_read_two_ways():
    w = AB.parse("b^-1 a b")
    assert apply_step(w, Step(APPLY, 0, 0, 0, 1, 3), BS12) == AB.parse("a a")
    assert apply_step(AB.parse("a a"), Step(APPLY, 0, 0, 0, -1, 2), BS12) == w


@settings(max_examples=200)
@given(st.integers(0, 10**6))
def test_apply_matches_naive_oracle(seed):
    rng = random.Random(seed)
    pres = TWO
    rel = rng.randrange(2)
    exp = rng.choice((1, -1))
    R = pres.relators[rel][0] if exp == 1 else invert(pres.relators[rel][0])
    rot, split = rng.randrange(len(R)), rng.randint(0, len(R))
    p = (R[rot:] + R[:rot])[:split]
    pre = tuple(rng.choice((1, -1, 2, -2)) for _ in range(rng.randint(0, 4)))
    word = pre + p + (2, 1)
    step = Step(APPLY, len(pre), rel, rot, exp, split)
    assert apply_step(word, step, pres) == naive_apply(word, step, pres)


def test_errors_name_the_step():
    t = random_trace(BS12, 3, nsteps=6)
    bad = list(t.steps)
    i = next(j for j, s in enumerate(bad) if s.kind == APPLY)
    bad[i] = bad[i]._replace(rel=5)
    with pytest.raises(TraceError) as exc:
        verify_trace(DerivationTrace(BS12, t.start, tuple(bad), t.end))
    assert exc.value.step_index == i
    with pytest.raises(TraceError):
        apply_step((1,), Step(CANCEL, 0), BS12)
    with pytest.raises(TraceError):
        apply_step((1, 2), Step(APPLY, 1, 0, 0, 1, 3), BS12)
    with pytest.raises(TraceError):
        verify_trace(DerivationTrace(BS12, (1,), (), (2,)))


def test_relators_must_be_cyclically_reduced():
    with pytest.raises(ValueError):
        GroupPresentation(AB, (((1, 2, -1), "x"),))


def test_empty_trace_ok():
    rep = verify_trace(empty_trace(BS12))
    assert (rep.area, rep.stepCount, rep.maxIntermediateLength) == (0, 0, 0)
    assert to_conjugate_product(empty_trace(BS12)) == []


def test_single_relator_factor():
    R = BS12.relators[0][0]
    t = DerivationTrace(BS12, R, (Step(APPLY, 0, 0, 0, 1, len(R)),), ())
    verify_trace(t)
    assert to_conjugate_product(t) == [((), 0, 1)]


@settings(max_examples=100)
@given(st.integers(0, 10**6), raw_words(ngens=2, max_size=6))
def test_trace_algebra(seed, u):
    t = random_trace(TWO, seed)
    rep = verify_trace(t)
    assert rep.area == t.area <= rep.stepCount
    assert conjugate_trace((), t) is t
    ct = conjugate_trace(u, t)
    assert verify_trace(ct).area == t.area and ct.start == tuple(u) + t.start + invert(u)
    it = invert_trace(t)
    assert verify_trace(it).area == t.area and it.start == invert(t.start) and it.end == invert(t.end)
    rt = reverse_trace(t)
    assert verify_trace(rt).area == t.area and (rt.start, rt.end) == (t.end, t.start)
    t2 = random_trace(TWO, seed + 1, start=t.end)
    both = concat_traces(t, t2)
    assert verify_trace(both).area == t.area + t2.area
    with pytest.raises(TraceError):
        concat_traces(t, DerivationTrace(TWO, t.end + (1,), (), t.end + (1,)))


@settings(max_examples=100)
@given(st.integers(0, 10**6))
def test_conjugate_product_reconstructs_start(seed):
    t = random_trace(TWO, seed, start=())
    # run the walk backwards to reach the empty word
    back = reverse_trace(t)
    factors = to_conjugate_product(back)
    assert len(factors) == back.area
    assert conjugate_product_word(TWO, factors) == free_reduce(back.start)


def test_conjugate_product_needs_empty_end():
    with pytest.raises(TraceError):
        to_conjugate_product(DerivationTrace(BS12, (1,), (), (1,)))


def test_builder_helpers():
    b = TraceBuilder(BS12, AB.parse("b^-1 a b"))
    b.rewrite(0, AB.parse("b^-1 a b"), AB.parse("a a"))
    b.insert_word(2, AB.parse("a^-2"))
    b.reduce()
    b.morph(0, 0, AB.parse("b b^-1"))
    t = b.finish()
    assert t.end == AB.parse("b b^-1 a a") and verify_trace(t).area == 1


@settings(max_examples=50)
@given(st.integers(0, 10**6))
def test_json_roundtrip(seed):
    t = random_trace(TWO, seed)
    data = trace_to_json(t)
    back = trace_from_json(data)
    assert back.steps == t.steps and back.start == t.start and back.end == t.end
    assert back.presentation == t.presentation
    ref = trace_to_json(t, presentation_ref="two.json")
    assert "presentation" not in ref and ref["presentationRef"] == "two.json"
    assert trace_from_json(ref, TWO).steps == t.steps
    with pytest.raises(TraceError):
        trace_from_json(ref)
    assert presentation_from_json(presentation_to_json(TWO)) == TWO
