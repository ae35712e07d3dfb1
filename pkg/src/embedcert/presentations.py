"""Finite presentations and replayable derivation traces.

A :class:`DerivationTrace` is the certificate that stands in for a van
Kampen diagram: a start word, a list of elementary steps and an end word.
Only relator applications count towards the area.  Free insertions and
cancellations are explicit steps, and the verifier never reduces on its own.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

from .words import Alphabet, Word, canonical_cyclic, invert, is_cyclically_reduced

APPLY = "ApplyRelator"
CANCEL = "FreeCancel"
INSERT = "FreeInsert"


class TraceError(ValueError):
    def __init__(self, message, step_index=None):
        super().__init__(message if step_index is None else f"step {step_index}: {message}")
        self.step_index = step_index


class Step(NamedTuple):
    kind: str
    pos: int
    rel: int = -1
    rot: int = 0
    exp: int = 1
    split: int = 0
    letter: int = 0


@dataclass(frozen=True)
class GroupPresentation:
    alphabet: Alphabet
    relators: tuple  # of (word, tag)

    def __post_init__(self):
        rels = tuple((tuple(w), str(tag)) for w, tag in self.relators)
        object.__setattr__(self, "relators", rels)
        n = len(self.alphabet)
        for w, tag in rels:
            if not w or not is_cyclically_reduced(w):
                raise ValueError(f"relator {self.alphabet.format(w)!r} ({tag}) is not cyclically reduced")
            if any(not 0 < abs(x) <= n for x in w):
                raise ValueError(f"relator ({tag}) uses a letter outside the alphabet")

    @property
    def generators(self):
        return self.alphabet.names

    def tags(self):
        counts = {}
        for _, tag in self.relators:
            counts[tag] = counts.get(tag, 0) + 1
        return counts

    def relator_text(self, i):
        return self.alphabet.format(self.relators[i][0])

    @cached_property
    def _rotations(self):
        index = {}
        for i, (w, _) in enumerate(self.relators):
            for e, v in ((1, w), (-1, invert(w))):
                for rot in range(len(v)):
                    index.setdefault(v[rot:] + v[:rot], (i, e, rot))
        return index

    @cached_property
    def _pieces(self):
        return {}

    def locate(self, cyclic: Sequence[int]):
        """``(rel, exp, rot)`` such that ``cyclic`` is that rotation of ``relator**exp``."""
        try:
            return self._rotations[tuple(cyclic)]
        except KeyError:
            raise TraceError(f"{self.alphabet.format(cyclic)!r} is not a rotation of any relator") from None

    def pieces(self, rel, exp, rot, split):
        """``(P, Q)`` with ``P Q^-1`` the rotated relator, cached."""
        key = (rel, exp, rot, split)
        cache = self._pieces
        got = cache.get(key)
        if got is None:
            if not 0 <= rel < len(self.relators):
                raise TraceError(f"relator index {rel} out of range")
            if exp not in (1, -1):
                raise TraceError(f"exponent must be +1 or -1, got {exp}")
            w = self.relators[rel][0]
            if exp == -1:
                w = invert(w)
            if not 0 <= rot < len(w) or not 0 <= split <= len(w):
                raise TraceError("rotation or split point out of range")
            r = w[rot:] + w[:rot]
            got = cache[key] = (list(r[:split]), list(invert(r[split:])))
        return got

    def canonical_relators(self):
        """Relators as sorted name-level cyclic words (rotation/inversion invariant)."""
        names = self.alphabet.names
        out = []
        for w, _ in self.relators:
            named = [(names[abs(x) - 1], 1 if x > 0 else -1) for x in w]
            out.append(_canonical_named(named))
        return sorted(out)


def _canonical_named(named):
    inv = [(n, -s) for n, s in reversed(named)]
    cands = []
    for v in (named, inv):
        cands.extend(tuple(v[i:] + v[:i]) for i in range(len(v)))
    return min(cands)


def same_relators(p1: GroupPresentation, p2: GroupPresentation) -> bool:
    """Multiset equality of relators, up to rotation and inversion, by generator name."""
    return p1.canonical_relators() == p2.canonical_relators()


@dataclass(frozen=True)
class AreaReport:
    area: int
    maxIntermediateLength: int
    stepCount: int


@dataclass(frozen=True)
class DerivationTrace:
    presentation: GroupPresentation
    start: Word
    steps: tuple
    end: Word
    max_len: int = field(default=-1, compare=False)

    @property
    def area(self):
        return sum(1 for s in self.steps if s.kind == APPLY)


def _apply_inplace(w: list, step: Step, pres: GroupPresentation):
    pos = step.pos
    kind = step.kind
    if kind == APPLY:
        p, q = pres.pieces(step.rel, step.exp, step.rot, step.split)
        if pos < 0 or pos + len(p) > len(w):
            raise TraceError("position out of range")
        if w[pos:pos + len(p)] != p:
            raise TraceError("subword does not match the relator piece")
        w[pos:pos + len(p)] = q
    elif kind == CANCEL:
        if pos < 0 or pos + 1 >= len(w):
            raise TraceError("position out of range")
        if w[pos] != -w[pos + 1]:
            raise TraceError("letters are not mutually inverse")
        del w[pos:pos + 2]
    elif kind == INSERT:
        if pos < 0 or pos > len(w) or step.letter == 0:
            raise TraceError("bad insertion")
        w[pos:pos] = (step.letter, -step.letter)
    else:
        raise TraceError(f"unknown step kind {kind!r}")


def apply_step(word: Sequence[int], step: Step, pres: GroupPresentation) -> tuple:
    w = list(word)
    _apply_inplace(w, step, pres)
    return tuple(w)


def verify_trace(trace: DerivationTrace) -> AreaReport:
    pres = trace.presentation
    w = list(trace.start)
    longest = len(w)
    area = 0
    for i, step in enumerate(trace.steps):
        try:
            _apply_inplace(w, step, pres)
        except TraceError as exc:
            raise TraceError(str(exc), i) from None
        if step.kind == APPLY:
            area += 1
        if len(w) > longest:
            longest = len(w)
    if tuple(w) != tuple(trace.end):
        raise TraceError("replay does not end at the stated end word")
    return AreaReport(area, longest, len(trace.steps))


def _replay_info(trace):
    """Per-step (length before, payload) where payload is the cancelled letter or (P, Q)."""
    pres = trace.presentation
    w = list(trace.start)
    info = []
    for step in trace.steps:
        if step.kind == CANCEL:
            info.append((len(w), w[step.pos]))
        elif step.kind == APPLY:
            info.append((len(w), pres.pieces(step.rel, step.exp, step.rot, step.split)))
        else:
            info.append((len(w), None))
        _apply_inplace(w, step, pres)
    return info


def _apply_step_for(pres, pos, old, new):
    rel, exp, rot = pres.locate(list(old) + list(invert(new)))
    return Step(APPLY, pos, rel, rot, exp, len(old))


def conjugate_trace(u: Sequence[int], t: DerivationTrace) -> DerivationTrace:
    """Trace of ``u start u^-1 -> u end u^-1`` (literal concatenations)."""
    u = tuple(u)
    if not u:
        return t
    off = len(u)
    steps = tuple(s._replace(pos=s.pos + off) for s in t.steps)
    return DerivationTrace(t.presentation, u + tuple(t.start) + invert(u), steps,
                           u + tuple(t.end) + invert(u), _shift_max(t, 2 * off))


def _shift_max(t, extra):
    return t.max_len + extra if t.max_len >= 0 else -1


def concat_traces(t1: DerivationTrace, t2: DerivationTrace) -> DerivationTrace:
    if t1.presentation is not t2.presentation and t1.presentation != t2.presentation:
        raise TraceError("traces use different presentations")
    if tuple(t1.end) != tuple(t2.start):
        raise TraceError("end of the first trace differs from start of the second")
    m = max(t1.max_len, t2.max_len) if min(t1.max_len, t2.max_len) >= 0 else -1
    return DerivationTrace(t1.presentation, t1.start, tuple(t1.steps) + tuple(t2.steps), t2.end, m)


def invert_trace(t: DerivationTrace) -> DerivationTrace:
    """Mirror image: a trace from ``start^-1`` to ``end^-1`` with the same area."""
    pres = t.presentation
    steps = []
    for step, (n, payload) in zip(t.steps, _replay_info(t)):
        if step.kind == CANCEL:
            steps.append(Step(CANCEL, n - step.pos - 2))
        elif step.kind == INSERT:
            steps.append(Step(INSERT, n - step.pos, letter=step.letter))
        else:
            p, q = payload
            steps.append(_apply_step_for(pres, n - step.pos - len(p), invert(p), invert(q)))
    return DerivationTrace(pres, invert(t.start), tuple(steps), invert(t.end), t.max_len)


def reverse_trace(t: DerivationTrace) -> DerivationTrace:
    """The same derivation read backwards, from ``end`` to ``start``."""
    pres = t.presentation
    steps = []
    for step, (_, payload) in zip(reversed(t.steps), reversed(_replay_info(t))):
        if step.kind == CANCEL:
            steps.append(Step(INSERT, step.pos, letter=payload))
        elif step.kind == INSERT:
            steps.append(Step(CANCEL, step.pos))
        else:
            p, q = payload
            steps.append(_apply_step_for(pres, step.pos, q, p))
    return DerivationTrace(pres, t.end, tuple(steps), t.start, t.max_len)


def to_conjugate_product(t: DerivationTrace) -> list:
    """Factors ``(u, rel, exp)`` with ``prod u R^exp u^-1`` freely equal to ``t.start``."""
    if t.end:
        raise TraceError("trace does not end at the empty word")
    from .words import free_reduce
    pres = t.presentation
    w = list(t.start)
    out = []
    for step in t.steps:
        if step.kind == APPLY:
            rel = pres.relators[step.rel][0]
            r = rel if step.exp == 1 else invert(rel)
            u = free_reduce(tuple(w[:step.pos]) + invert(r[:step.rot]))
            out.append((u, step.rel, step.exp))
        _apply_inplace(w, step, pres)
    return out


def conjugate_product_word(pres: GroupPresentation, factors) -> Word:
    from .words import free_reduce
    out = []
    for u, rel, exp in factors:
        r = pres.relators[rel][0]
        out.extend(u)
        out.extend(r if exp == 1 else invert(r))
        out.extend(invert(u))
    return free_reduce(out)


class TraceBuilder:
    """Mutable helper that records steps while rewriting a working word."""

    def __init__(self, pres: GroupPresentation, start: Sequence[int]):
        self.pres = pres
        self.start = tuple(start)
        self.word = list(start)
        self.steps = []
        self.max_len = len(self.word)

    def __len__(self):
        return len(self.word)

    def _grow(self):
        if len(self.word) > self.max_len:
            self.max_len = len(self.word)

    def insert(self, pos, letter):
        self.steps.append(Step(INSERT, pos, letter=letter))
        self.word[pos:pos] = (letter, -letter)
        self._grow()

    def insert_word(self, pos, u):
        """Insert ``u u^-1`` at ``pos``."""
        for i, x in enumerate(u):
            self.insert(pos + i, x)

    def cancel(self, pos):
        w = self.word
        if w[pos] != -w[pos + 1]:
            raise TraceError(f"cannot cancel at {pos}")
        self.steps.append(Step(CANCEL, pos))
        del w[pos:pos + 2]

    def rewrite(self, pos, old, new):
        """Replace ``old`` at ``pos`` by ``new``; ``old new^-1`` must be a relator rotation."""
        old = list(old)
        if self.word[pos:pos + len(old)] != old:
            raise TraceError(f"expected {self.pres.alphabet.format(old)!r} at {pos}")
        self.steps.append(_apply_step_for(self.pres, pos, old, new))
        self.word[pos:pos + len(old)] = new
        self._grow()

    def reduce(self, lo=0, hi=None):
        """Freely reduce ``word[lo:hi]`` with explicit cancellations; returns new ``hi``."""
        w = self.word
        hi = len(w) if hi is None else hi
        stack = []
        steps = self.steps
        for x in w[lo:hi]:
            if stack and stack[-1] == -x:
                steps.append(Step(CANCEL, lo + len(stack) - 1))
                stack.pop()
            else:
                stack.append(x)
        w[lo:hi] = stack
        return lo + len(stack)

    def morph(self, lo, hi, target):
        """Free-group-only rewrite of ``word[lo:hi]`` into ``target``."""
        target = list(target)
        hi = self.reduce(lo, hi)
        stack, undo = [], []
        for x in target:
            if stack and stack[-1] == -x:
                undo.append((len(stack) - 1, stack[-1]))
                stack.pop()
            else:
                stack.append(x)
        if self.word[lo:hi] != stack:
            raise TraceError("target is not freely equal to the current subword")
        for p, x in reversed(undo):
            self.insert(lo + p, x)
        return lo + len(target)

    def run(self, trace: DerivationTrace, pos: int):
        """Splice a (verified) trace in at ``pos``."""
        n = len(trace.start)
        if self.word[pos:pos + n] != list(trace.start):
            raise TraceError("subtrace start does not match the working word")
        if pos:
            self.steps.extend(s._replace(pos=s.pos + pos) for s in trace.steps)
        else:
            self.steps.extend(trace.steps)
        inner = trace.max_len if trace.max_len >= 0 else max(n, len(trace.end))
        self.max_len = max(self.max_len, len(self.word) - n + inner)
        self.word[pos:pos + n] = trace.end
        return pos + len(trace.end)

    def finish(self) -> DerivationTrace:
        return DerivationTrace(self.pres, self.start, tuple(self.steps), tuple(self.word), self.max_len)


def empty_trace(pres, word=()):
    return DerivationTrace(pres, tuple(word), (), tuple(word), len(word))


# -- JSON -------------------------------------------------------------------

def presentation_to_json(pres: GroupPresentation) -> dict:
    return {
        "schema": "presentation.v1",
        "generators": list(pres.alphabet.names),
        "relators": [{"word": pres.alphabet.format(w), "tag": tag} for w, tag in pres.relators],
    }


def presentation_from_json(data: dict) -> GroupPresentation:
    alpha = Alphabet(data["generators"])
    return GroupPresentation(alpha, tuple((alpha.parse(r["word"]), r.get("tag", "")) for r in data["relators"]))


def trace_to_json(trace: DerivationTrace, presentation_ref: str | None = None) -> dict:
    fmt = trace.presentation.alphabet.format
    alpha = trace.presentation.alphabet
    steps = []
    for s in trace.steps:
        if s.kind == APPLY:
            steps.append({"kind": s.kind, "pos": s.pos, "rel": s.rel, "rot": s.rot, "exp": s.exp, "split": s.split})
        elif s.kind == CANCEL:
            steps.append({"kind": s.kind, "pos": s.pos})
        else:
            steps.append({"kind": s.kind, "pos": s.pos, "letter": fmt([s.letter])})
    out = {"schema": "trace.v1"}
    if presentation_ref is not None:
        out["presentationRef"] = presentation_ref
    else:
        out["presentation"] = presentation_to_json(trace.presentation)
    out.update(start=fmt(trace.start), steps=steps, end=fmt(trace.end))
    del alpha
    return out


def trace_from_json(data: dict, presentation: GroupPresentation | None = None) -> DerivationTrace:
    if presentation is None:
        if "presentation" not in data:
            raise TraceError("trace has no inline presentation and none was supplied")
        presentation = presentation_from_json(data["presentation"])
    alpha = presentation.alphabet
    steps = []
    for s in data["steps"]:
        kind = s["kind"]
        if kind == APPLY:
            steps.append(Step(APPLY, s["pos"], s["rel"], s["rot"], s["exp"], s["split"]))
        elif kind == CANCEL:
            steps.append(Step(CANCEL, s["pos"]))
        elif kind == INSERT:
            (letter,) = alpha.parse(s["letter"])
            steps.append(Step(INSERT, s["pos"], letter=letter))
        else:
            raise TraceError(f"unknown step kind {kind!r}")
    return DerivationTrace(presentation, alpha.parse(data["start"]), tuple(steps), alpha.parse(data["end"]))


def dump_json(obj, path):
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=1, sort_keys=False)
        fh.write("\n")


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


__all__ = [
    "APPLY", "CANCEL", "INSERT", "AreaReport", "DerivationTrace", "GroupPresentation", "Step",
    "TraceBuilder", "TraceError", "apply_step", "canonical_cyclic", "concat_traces",
    "conjugate_product_word", "conjugate_trace", "empty_trace", "invert_trace", "reverse_trace",
    "same_relators", "to_conjugate_product", "verify_trace",
]
