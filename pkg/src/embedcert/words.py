"""Free-group words.

A letter is a nonzero int: ``+i`` is the ``i``-th generator of an
:class:`Alphabet` (1-based) and ``-i`` its inverse.  A word is a plain
tuple of letters.  Every function here is pure and returns new tuples.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Word = tuple

_BAD_NAME = re.compile(r"[\^\-\s\[\]]")


class WordError(ValueError):
    pass


class LawError(ValueError):
    pass


@dataclass(frozen=True)
class Alphabet:
    """Ordered generator names; a generator's identity is its position."""

    names: tuple
    _index: dict = field(init=False, repr=False, compare=False)

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if not names:
            raise WordError("alphabet must not be empty")
        for name in names:
            if not isinstance(name, str) or not name or _BAD_NAME.search(name):
                raise WordError(f"invalid generator name {name!r}")
        if len(set(names)) != len(names):
            raise WordError("generator names must be unique")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_index", {n: i + 1 for i, n in enumerate(names)})

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self._index

    def gen(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise WordError(f"unknown generator {name!r}") from None

    def name(self, letter: int) -> str:
        return self.names[abs(letter) - 1]

    def parse(self, text: str) -> Word:
        """Parse ``"a1 b2^-1 q3^2"``; the result is *not* reduced."""
        out = []
        for tok in text.split():
            name, _, power = tok.partition("^")
            g = self.gen(name)
            if power:
                try:
                    e = int(power)
                except ValueError:
                    raise WordError(f"bad exponent in {tok!r}") from None
            else:
                e = 1
            out.extend([g if e > 0 else -g] * abs(e))
        return tuple(out)

    def format(self, w: Sequence[int]) -> str:
        return " ".join(self.names[x - 1] if x > 0 else self.names[-x - 1] + "^-1" for x in w)


def letter_inverse(x: int) -> int:
    return -x


def free_reduce(raw: Iterable[int]) -> Word:
    stack = []
    for x in raw:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def is_reduced(w: Sequence[int]) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def invert(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def concat(*words: Sequence[int]) -> Word:
    out = []
    for w in words:
        for x in w:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


def conjugate(u: Sequence[int], w: Sequence[int]) -> Word:
    """``u w u^-1``, reduced."""
    return concat(u, w, invert(u))


def power(w: Sequence[int], n: int) -> Word:
    if n < 0:
        return power(invert(w), -n)
    return free_reduce(tuple(w) * n)


def commutator(u: Sequence[int], w: Sequence[int]) -> Word:
    return concat(u, w, invert(u), invert(w))


def cyclic_reduce(w: Sequence[int]) -> tuple[Word, Word]:
    """Return ``(core, conjugator)`` with ``w == conjugator core conjugator^-1`` freely."""
    w = free_reduce(w)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return w[i:j + 1], w[:i]


def is_cyclically_reduced(w: Sequence[int]) -> bool:
    return is_reduced(w) and (len(w) < 2 or w[0] != -w[-1])


def exponent_sum(w: Sequence[int], g: int) -> int:
    if g <= 0:
        raise WordError("generator index must be positive")
    return sum(1 if x == g else -1 for x in w if abs(x) == g)


def letter_map(w: Sequence[int], mapping: dict) -> Word:
    """Apply a generator -> generator relabelling (positive letters as keys)."""
    return tuple(mapping[x] if x > 0 else -mapping[-x] for x in w)


def canonical_cyclic(w: Sequence[int]) -> Word:
    """Least rotation of ``w`` or ``w^-1``; equal for relators defining the same cell."""
    w = tuple(w)
    if not w:
        return w
    cands = []
    for v in (w, invert(w)):
        cands.extend(v[i:] + v[:i] for i in range(len(v)))
    return min(cands)


def reduced_words(ngens: int, length: int):
    """All freely reduced words of exactly ``length`` letters, in lexicographic order."""
    letters = [g for i in range(1, ngens + 1) for g in (i, -i)]

    def grow(prefix):
        if len(prefix) == length:
            yield tuple(prefix)
            return
        for x in letters:
            if prefix and prefix[-1] == -x:
                continue
            prefix.append(x)
            yield from grow(prefix)
            prefix.pop()

    yield from grow([])


# -- laws -------------------------------------------------------------------

@dataclass(frozen=True)
class LawWord:
    """A cyclically reduced law ``v(x_1..x_k)``; letters index the variables."""

    k: int
    body: Word

    def __post_init__(self):
        body = tuple(self.body)
        object.__setattr__(self, "body", body)
        if not body:
            raise LawError("the empty law is degenerate")
        if not is_cyclically_reduced(body):
            raise LawError("law must be cyclically reduced")
        used = {abs(x) for x in body}
        if max(used) > self.k:
            raise LawError("law mentions a variable beyond k")
        missing = sorted(set(range(1, self.k + 1)) - used)
        if missing:
            raise LawError(f"variable x{missing[0]} does not occur in the law")

    @property
    def M(self) -> int:
        return len(self.body) + 1

    def variables(self) -> Alphabet:
        return Alphabet(f"x{i}" for i in range(1, self.k + 1))

    def __str__(self):
        return self.variables().format(self.body)

    def exponent_sums(self) -> list:
        return [exponent_sum(self.body, i) for i in range(1, self.k + 1)]


def substitute(v: LawWord, X: Sequence[Sequence[int]]) -> Word:
    """``v(X_1, ..., X_k)``, reduced."""
    if len(X) != v.k:
        raise LawError(f"law has {v.k} variables, got {len(X)} values")
    inv = [invert(x) for x in X]
    out = []
    for y in v.body:
        for x in (X[y - 1] if y > 0 else inv[-y - 1]):
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


_TOKEN = re.compile(r"\s*(?:(x)(\d+)|(\^)\s*(-?\d+)|([\[\],()]))")


def _tokenize(expr):
    pos, toks = 0, []
    expr = expr.rstrip()
    while pos < len(expr):
        m = _TOKEN.match(expr, pos)
        if not m:
            raise LawError(f"syntax error at {expr[pos:]!r}")
        if m.group(1):
            toks.append(("var", int(m.group(2))))
        elif m.group(3):
            toks.append(("pow", int(m.group(4))))
        else:
            toks.append((m.group(5), None))
        pos = m.end()
    return toks


def parse_law(expr: str) -> LawWord:
    """Parse juxtaposition, ``^n`` powers, ``[u,w]`` commutators and ``x1..xk``.

    The expansion is checked, not reduced: ``"x1 x1^-1"`` is rejected.
    """
    toks = _tokenize(expr)
    pos = 0

    def peek():
        return toks[pos][0] if pos < len(toks) else None

    def expression(stop):
        nonlocal pos
        out = []
        while peek() not in stop:
            out.extend(factor())
        return out

    def factor():
        nonlocal pos
        kind, val = toks[pos] if pos < len(toks) else (None, None)
        if kind == "var":
            if val < 1:
                raise LawError("variables are numbered from 1")
            pos += 1
            base = [val]
        elif kind == "[":
            pos += 1
            left = expression({",", None})
            if peek() != ",":
                raise LawError("expected ',' in commutator")
            pos += 1
            right = expression({"]", None})
            if peek() != "]":
                raise LawError("expected ']'")
            pos += 1
            base = left + right + list(invert(left)) + list(invert(right))
        elif kind == "(":
            pos += 1
            base = expression({")", None})
            if peek() != ")":
                raise LawError("expected ')'")
            pos += 1
        else:
            raise LawError(f"unexpected token {kind!r}")
        if peek() == "pow":
            n = toks[pos][1]
            pos += 1
            base = list(invert(base)) * -n if n < 0 else base * n
        return base

    body = expression({None, "]", ")", ","})
    if pos != len(toks):
        raise LawError(f"unexpected token {toks[pos][0]!r}")
    if not body:
        raise LawError("empty law")
    if not is_reduced(body):
        raise LawError("law is not freely reduced")
    return LawWord(max(abs(x) for x in body), tuple(body))
