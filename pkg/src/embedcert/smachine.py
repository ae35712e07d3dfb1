"""S-machines: admissible words, symmetric rule application, bounded search.

Rule application follows the group reading of a rule part ``U -> V``:
state letters are matched by class index, the tape words strictly inside
``U`` must match exactly, and tape letters hanging off the outer ends of
``U`` or ``V`` are multiplied onto the neighbouring tapes and freely reduced.
With this reading every rule is invertible and corresponds to the relator
``r^-1 U r V^-1``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .presentations import GroupPresentation
from .words import Alphabet, LawWord, concat, invert

MIN_N = 29


class MachineError(ValueError):
    pass


@dataclass(frozen=True)
class AdmissibleWord:
    states: tuple  # one letter per Q class
    tapes: tuple   # k reduced words

    @property
    def length(self):
        return len(self.states) + self.tape_length

    @property
    def tape_length(self):
        return sum(len(t) for t in self.tapes)

    def word(self):
        out = [self.states[0]]
        for t, q in zip(self.tapes, self.states[1:]):
            out.extend(t)
            out.append(q)
        return tuple(out)


@dataclass(frozen=True)
class SRule:
    name: str
    parts: tuple  # of (U, V) words

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple((tuple(u), tuple(v)) for u, v in self.parts))


def inverse_rule(rule: SRule) -> SRule:
    name = rule.name[:-4] if rule.name.endswith("^inv") else rule.name + "^inv"
    return SRule(name, tuple((v, u) for u, v in rule.parts))


class _Part(NamedTuple):
    lo: int          # first class index (0-based)
    hi: int          # last class index
    pre: tuple       # tape letters before the first state letter
    states: tuple
    inner: tuple     # tapes strictly between the state letters
    suf: tuple


@dataclass(frozen=True)
class SMachine:
    alphabet: Alphabet
    Q: tuple          # tuple of tuples of state letters
    Y: tuple          # tuple of tuples of tape letters, one per tape
    rules: tuple      # positive rules
    W0: AdmissibleWord

    def __post_init__(self):
        object.__setattr__(self, "Q", tuple(tuple(c) for c in self.Q))
        object.__setattr__(self, "Y", tuple(frozenset(c) for c in self.Y))
        if len(self.Y) != len(self.Q) - 1:
            raise MachineError("need exactly one tape alphabet per gap between state classes")
        seen = set()
        for c in self.Q:
            if not c or seen & set(c):
                raise MachineError("state classes must be non-empty and disjoint")
            seen |= set(c)
        if seen & set().union(*self.Y):
            raise MachineError("state and tape letters must be disjoint")
        if not is_admissible(self, self.W0):
            raise MachineError("accept word is not admissible")

    @property
    def k(self):
        return len(self.Y)

    def class_of(self, letter):
        return self._classes.get(abs(letter))

    @property
    def _classes(self):
        cache = self.__dict__.get("_cls")
        if cache is None:
            cache = {q: i for i, c in enumerate(self.Q) for q in c}
            object.__setattr__(self, "_cls", cache)
        return cache

    def symmetric_rules(self):
        return [r for rule in self.rules for r in (rule, inverse_rule(rule))]

    def parse_word(self, text: str) -> AdmissibleWord:
        return from_word(self, self.alphabet.parse(text))

    def format(self, w: AdmissibleWord) -> str:
        return self.alphabet.format(w.word())


def from_word(machine: SMachine, w: Sequence[int]) -> AdmissibleWord:
    states, tapes, cur = [], [], []
    for x in w:
        if x > 0 and machine.class_of(x) is not None:
            if states:
                tapes.append(tuple(cur))
            elif cur:
                raise MachineError("tape letters before the first state letter")
            states.append(x)
            cur = []
        elif machine.class_of(x) is not None:
            raise MachineError("inverse state letters are not admissible")
        else:
            cur.append(x)
    if cur or not states:
        raise MachineError("word must end with a state letter")
    adm = AdmissibleWord(tuple(states), tuple(tapes))
    if not is_admissible(machine, adm):
        raise MachineError(f"{machine.alphabet.format(w)!r} is not admissible")
    return adm


def is_admissible(machine: SMachine, w: AdmissibleWord) -> bool:
    if len(w.states) != len(machine.Q) or len(w.tapes) != machine.k:
        return False
    if any(machine.class_of(q) != i for i, q in enumerate(w.states)):
        return False
    for tape, y in zip(w.tapes, machine.Y):
        if any(abs(x) not in y for x in tape) or concat(tape) != tuple(tape):
            return False
    return True


def _split_part(machine, side):
    """Decompose a part side; raises MachineError if the state letters are not consecutive classes."""
    idx = [i for i, x in enumerate(side) if machine.class_of(x) is not None]
    if not idx:
        raise MachineError("part side has no state letter")
    if any(side[i] < 0 for i in idx):
        raise MachineError("part side uses an inverse state letter")
    classes = [machine.class_of(side[i]) for i in idx]
    if classes != list(range(classes[0], classes[0] + len(classes))):
        raise MachineError("state letters must be one per class, in class order")
    inner = tuple(tuple(side[a + 1:b]) for a, b in zip(idx, idx[1:]))
    return _Part(classes[0], classes[-1], tuple(side[:idx[0]]), tuple(side[i] for i in idx),
                 inner, tuple(side[idx[-1] + 1:]))


def validate_rule(machine: SMachine, rule: SRule) -> list:
    """Every violated condition, as human-readable strings (empty means valid)."""
    errs = []
    last = len(machine.Q) - 1
    prev_hi = -1
    if not rule.parts:
        return ["rule has no parts"]
    for n, (u, v) in enumerate(rule.parts):
        sides = []
        for label, side in (("U", u), ("V", v)):
            try:
                sides.append(_split_part(machine, side))
            except MachineError as exc:
                errs.append(f"part {n + 1} {label}: {exc}")
        if len(sides) != 2:
            continue
        pu, pv = sides
        if (pu.lo, pu.hi) != (pv.lo, pv.hi):
            errs.append(f"part {n + 1}: V must use exactly the classes Q{pu.lo + 1}..Q{pu.hi + 1} of U")
        if pu.lo <= prev_hi:
            errs.append(f"part {n + 1}: class range overlaps the previous part")
        prev_hi = pu.hi
        for label, p in (("U", pu), ("V", pv)):
            if p.lo == 0 and p.pre:
                errs.append(f"part {n + 1} {label}: must start with a Q1-letter")
            if p.hi == last and p.suf:
                errs.append(f"part {n + 1} {label}: must end with a Q{last + 1}-letter")
            tapes = [(p.lo - 1, p.pre)] + [(p.lo + i, t) for i, t in enumerate(p.inner)] + [(p.hi, p.suf)]
            for ti, t in tapes:
                if t and 0 <= ti < machine.k and any(abs(x) not in machine.Y[ti] for x in t):
                    errs.append(f"part {n + 1} {label}: tape letter outside Y{ti + 1}")
    return errs


def _compiled(machine, rule):
    cache = machine.__dict__.setdefault("_compiled_rules", {})
    got = cache.get(rule)
    if got is None:
        got = cache[rule] = [(_split_part(machine, u), _split_part(machine, v)) for u, v in rule.parts]
    return got


def apply_rule(machine: SMachine, w: AdmissibleWord, rule: SRule):
    """The rewritten admissible word, or ``None`` if the rule is inapplicable."""
    states = list(w.states)
    tapes = list(w.tapes)
    for pu, pv in _compiled(machine, rule):
        if tuple(states[pu.lo:pu.hi + 1]) != pu.states:
            return None
        if tuple(tapes[pu.lo:pu.hi]) != pu.inner:
            return None
    for pu, pv in _compiled(machine, rule):
        states[pu.lo:pu.hi + 1] = pv.states
        tapes[pu.lo:pu.hi] = pv.inner
        if pu.lo > 0:
            tapes[pu.lo - 1] = concat(tapes[pu.lo - 1], invert(pu.pre), pv.pre)
        if pu.hi < machine.k:
            tapes[pu.hi] = concat(pv.suf, invert(pu.suf), tapes[pu.hi])
    return AdmissibleWord(tuple(states), tuple(tapes))


@dataclass(frozen=True)
class Computation:
    words: tuple   # Z, Z_1, ..., Z_n = W0
    rules: tuple   # rule names applied at each step

    @property
    def area(self):
        return sum(z.length for z in self.words)


@dataclass(frozen=True)
class SearchResult:
    accepted: bool
    computation: Computation | None
    status: str    # "accepted", "closed" or "bounded-exhaustion"
    explored: int


def accepts(machine: SMachine, w: AdmissibleWord, max_tape_len: int, max_steps: int = 10**6) -> SearchResult:
    """Breadth-first search from ``w`` to ``W0`` over the symmetric rule set.

    ``closed`` means every reachable word was explored, which proves non-acceptance.
    """
    rules = machine.symmetric_rules()
    target = machine.W0
    parent = {w: None}
    queue = deque([w])
    pruned = False
    while queue:
        z = queue.popleft()
        if z == target:
            words, names = [], []
            while z is not None:
                words.append(z)
                link = parent[z]
                if link is not None:
                    names.append(link[1])
                    z = link[0]
                else:
                    z = None
            comp = Computation(tuple(reversed(words)), tuple(reversed(names)))
            return SearchResult(True, comp, "accepted", len(parent))
        if len(parent) >= max_steps:
            pruned = True
            break
        for rule in rules:
            nz = apply_rule(machine, z, rule)
            if nz is None or nz in parent:
                continue
            if nz.tape_length > max_tape_len:
                pruned = True
                continue
            parent[nz] = (z, rule.name)
            queue.append(nz)
    return SearchResult(False, None, "bounded-exhaustion" if pruned else "closed", len(parent))


def reachable(machine: SMachine, start: AdmissibleWord, max_tape_len: int, rules=None) -> set:
    rules = machine.symmetric_rules() if rules is None else rules
    seen = {start}
    queue = deque([start])
    while queue:
        z = queue.popleft()
        for rule in rules:
            nz = apply_rule(machine, z, rule)
            if nz is not None and nz not in seen and nz.tape_length <= max_tape_len:
                seen.add(nz)
                queue.append(nz)
    return seen


# -- the machine of a law ---------------------------------------------------

def law_alphabet(v: LawWord, m: int) -> Alphabet:
    return Alphabet([f"q{t}" for t in range(1, v.M + 1)] + [f"a{j}" for j in range(1, m + 1)])


def rule_name(j: int, ell: int) -> str:
    return f"r{j}_{ell}"


def build_machine_for_law(v: LawWord, m: int) -> SMachine:
    """One positive rule per (letter a_j, variable x_l): q_{s+1} -> a_j q_{s+1} where y_s = x_l,
    and q_s -> q_s a_j^-1 where y_s = x_l^-1."""
    if m < 1:
        raise MachineError("rank must be positive")
    alpha = law_alphabet(v, m)
    M = v.M
    q = list(range(1, M + 1))
    a = [M + j for j in range(1, m + 1)]
    rules = []
    for j in range(1, m + 1):
        for ell in range(1, v.k + 1):
            parts = []
            for t in range(1, M + 1):
                left = t >= 2 and v.body[t - 2] == ell
                right = t <= M - 1 and v.body[t - 1] == -ell
                if left and right:
                    raise MachineError("law is not freely reduced")
                if left:
                    parts.append(((q[t - 1],), (a[j - 1], q[t - 1])))
                elif right:
                    parts.append(((q[t - 1],), (q[t - 1], -a[j - 1])))
            rules.append(SRule(rule_name(j, ell), tuple(parts)))
    tape = frozenset(a)
    W0 = AdmissibleWord(tuple(q), tuple(() for _ in range(M - 1)))
    return SMachine(alpha, tuple((x,) for x in q), tuple(tape for _ in range(M - 1)), tuple(rules), W0)


def matches_law_pattern(v: LawWord, w: AdmissibleWord) -> bool:
    """Whether the tapes read ``X_{|y_1|}^{+-1}, ..., X_{|y_{M-1}|}^{+-1}`` for some values X."""
    values = {}
    for y, tape in zip(v.body, w.tapes):
        x = tuple(tape) if y > 0 else invert(tape)
        if values.setdefault(abs(y), x) != x:
            return False
    return True


@dataclass(frozen=True)
class MainPropertyReport:
    checked: int
    accepted: int
    mismatches: tuple

    @property
    def ok(self):
        return not self.mismatches


def admissible_words(machine: SMachine, max_tape_len: int):
    """All admissible words with the machine's accept states and total tape length at most the bound."""
    ngens_per_tape = [sorted(y) for y in machine.Y]
    k = machine.k

    def tape_words(y, n):
        letters = [g for x in y for g in (x, -x)]
        out = [()]
        frontier = [()]
        for _ in range(n):
            frontier = [w + (x,) for w in frontier for x in letters if not w or w[-1] != -x]
            out.extend(frontier)
        return out

    per_tape = [tape_words(y, max_tape_len) for y in ngens_per_tape]
    states = machine.W0.states

    def rec(i, budget, acc):
        if i == k:
            yield AdmissibleWord(states, tuple(acc))
            return
        for t in per_tape[i]:
            if len(t) <= budget:
                acc.append(t)
                yield from rec(i + 1, budget - len(t), acc)
                acc.pop()

    yield from rec(0, max_tape_len, [])


def main_property_check(v: LawWord, m: int, len_bound: int) -> MainPropertyReport:
    machine = build_machine_for_law(v, m)
    reach = reachable(machine, machine.W0, len_bound)
    checked = accepted = 0
    bad = []
    for w in admissible_words(machine, len_bound):
        checked += 1
        got = w in reach
        accepted += got
        if got != matches_law_pattern(v, w):
            bad.append(machine.format(w))
    return MainPropertyReport(checked, accepted, tuple(bad))


# -- compiling a machine into a presentation --------------------------------

def check_N(N: int, allow_small_N: bool = False):
    if N < 1 or (N < MIN_N and not allow_small_N):
        raise MachineError(f"N must be at least {MIN_N} (got {N}); pass allow_small_N to override")


def machine_to_presentation(machine: SMachine, N: int = MIN_N, allow_small_N: bool = False) -> GroupPresentation:
    check_N(N, allow_small_N)
    names = machine.alphabet.names
    state_names = [names[q - 1] for c in machine.Q for q in c]
    tape_letters = sorted(set().union(*machine.Y))
    tape_names = [names[x - 1] for x in tape_letters]
    gens = state_names + tape_names + [f"k{j}" for j in range(1, N + 1)] + [r.name for r in machine.rules]
    alpha = Alphabet(gens)
    tr = {i + 1: alpha.gen(n) for i, n in enumerate(names)}

    def lift(w):
        return tuple(tr[x] if x > 0 else -tr[-x] for x in w)

    ks = [alpha.gen(f"k{j}") for j in range(1, N + 1)]
    rels = []
    for rule in machine.rules:
        r = alpha.gen(rule.name)
        touched = set()
        for u, vv in rule.parts:
            pu = _split_part(machine, u)
            touched.update(range(pu.lo, pu.hi + 1))
            rels.append(((-r,) + lift(u) + (r,) + invert(lift(vv)), "transition"))
        for ci, cls in enumerate(machine.Q):
            if ci not in touched:
                for qq in cls:
                    x = tr[qq]
                    rels.append(((-r, x, r, -x), "q-commute"))
        for x in [tr[y] for y in tape_letters] + ks:
            rels.append(((r, x, -r, -x), "auxiliary"))
    hub = []
    for kk in ks:
        hub.append(kk)
        hub.extend(lift(machine.W0.word()))
    rels.append((tuple(hub), "hub"))
    return GroupPresentation(alpha, tuple(rels))


# -- JSON -------------------------------------------------------------------

def machine_to_json(machine: SMachine) -> dict:
    f = machine.alphabet.format
    names = machine.alphabet.names
    return {
        "schema": "smachine.v1",
        "k": machine.k,
        "Q": [[names[q - 1] for q in c] for c in machine.Q],
        "Y": [[names[y - 1] for y in sorted(c)] for c in machine.Y],
        "rules": [[{"U": f(u), "V": f(v)} for u, v in r.parts] for r in machine.rules],
        "ruleNames": [r.name for r in machine.rules],
        "W0": f(machine.W0.word()),
    }


def machine_from_json(data: dict) -> SMachine:
    seen = []
    for c in list(data["Q"]) + list(data["Y"]):
        for n in c:
            if n not in seen:
                seen.append(n)
    alpha = Alphabet(seen)
    Q = tuple(tuple(alpha.gen(n) for n in c) for c in data["Q"])
    Y = tuple(tuple(alpha.gen(n) for n in c) for c in data["Y"])
    names = data.get("ruleNames") or [f"rule{i + 1}" for i in range(len(data["rules"]))]
    rules = tuple(SRule(name, tuple((alpha.parse(p["U"]), alpha.parse(p["V"])) for p in parts))
                  for name, parts in zip(names, data["rules"]))
    proto = SMachine(alpha, Q, Y, (), AdmissibleWord(tuple(c[0] for c in Q), tuple(() for _ in Y)))
    W0 = from_word(proto, alpha.parse(data["W0"]))
    return SMachine(alpha, Q, Y, rules, W0)


__all__ = [
    "AdmissibleWord", "Computation", "MachineError", "MainPropertyReport", "SMachine", "SRule", "SearchResult",
    "accepts", "admissible_words", "apply_rule", "build_machine_for_law", "check_N", "from_word", "inverse_rule",
    "is_admissible", "machine_from_json", "machine_to_json", "machine_to_presentation", "main_property_check",
    "matches_law_pattern", "reachable", "validate_rule",
]
