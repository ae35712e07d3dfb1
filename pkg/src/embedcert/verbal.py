"""Verbal subgroups: witnesses ``w = prod u_i v(X_i)^e_i u_i^-1``, their cost, and bounded minimal search.

Words here are over generic generators ``1..n``.  The cost of a witness is the
total length of the substituted values; conjugators are free.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .words import (LawWord, canonical_cyclic, concat, cyclic_reduce, exponent_sum, free_reduce, invert,
                    parse_law, reduced_words, substitute)


@dataclass(frozen=True)
class VerbalWitness:
    law: LawWord
    factors: tuple  # of (u, X, eps)

    def __post_init__(self):
        fs = tuple((tuple(u), tuple(tuple(x) for x in X), int(e)) for u, X, e in self.factors)
        object.__setattr__(self, "factors", fs)

    @property
    def cost(self):
        return sum(len(x) for _, X, _ in self.factors for x in X)

    @property
    def factorCount(self):
        return len(self.factors)

    def product(self):
        out = ()
        for u, X, e in self.factors:
            val = substitute(self.law, X)
            out = concat(out, u, val if e == 1 else invert(val), invert(u))
        return out


def witness_verify(w, witness: VerbalWitness):
    """``(ok, cost)``; raises ValueError on arity mismatch."""
    for _, X, e in witness.factors:
        if len(X) != witness.law.k:
            raise ValueError(f"factor has {len(X)} values, law needs {witness.law.k}")
        if e not in (1, -1):
            raise ValueError("factor exponent must be +1 or -1")
    return witness.product() == free_reduce(w), witness.cost


def _gens_of(w):
    return tuple(sorted({abs(x) for x in w}))


def _words_over(gens, length):
    letters = [s * g for g in gens for s in (1, -1)]
    if length == 0:
        return [()]
    out = [(x,) for x in letters]
    for _ in range(length - 1):
        out = [w + (x,) for w in out for x in letters if w[-1] != -x]
    return out


def _words_upto(gens, n):
    return [w for L in range(n + 1) for w in _words_over(gens, L)]


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class _Tables:
    """Law values over a generator set, grouped by cost and by conjugacy class of their cyclic core."""

    def __init__(self, law, gens, conj_bound):
        self.law, self.gens, self.conj_bound = law, gens, conj_bound
        self.levels = []        # levels[c] = list of (val, X) with cost c, distinct nonempty values
        self.best = {}          # val -> cost
        self.by_class = {}      # canonical core -> list of (cost, val, X)
        self.max_core = []      # max cyclic core length with cost <= c
        self.conjugators = _words_upto(gens, conj_bound)
        self._factors = {}

    def upto(self, c):
        while len(self.levels) <= c:
            cost = len(self.levels)
            level = []
            for sizes in _compositions(cost, self.law.k):
                for X in _product_words(self.gens, sizes):
                    val = substitute(self.law, X)
                    if val and val not in self.best:
                        self.best[val] = cost
                        level.append((val, X))
                        core, _ = cyclic_reduce(val)
                        self.by_class.setdefault(canonical_cyclic(core), []).append((cost, val, X))
            self.levels.append(level)
            prev = self.max_core[-1] if self.max_core else 0
            self.max_core.append(max([prev] + [len(cyclic_reduce(v)[0]) for v, _ in level]))

    def min_cost(self, limit):
        for c in range(limit + 1):
            self.upto(c)
            if self.levels[c]:
                return c
        return None

    def single(self, target, budget):
        """Cheapest ``(cost, u, X, eps)`` with ``u v(X)^eps u^-1 == target``, or None."""
        self.upto(budget)
        core2, c2 = cyclic_reduce(target)
        best = None
        for cost, val, X in self.by_class.get(canonical_cyclic(core2), ()):
            if cost > budget or (best is not None and cost > best[0]):
                continue
            core1, c1 = cyclic_reduce(val)
            for eps in (1, -1):
                c = core1 if eps == 1 else invert(core1)
                L = len(c)
                for i in range(L):
                    if c[i:] + c[:i] != core2:
                        continue
                    for u in (concat(c2, invert(c[:i]), invert(c1)), concat(c2, c[i:], invert(c1))):
                        if len(u) <= self.conj_bound:
                            cand = (cost, len(u), u, X, eps)
                            if best is None or cand[:2] < best[:2]:
                                best = cand
        if best is None:
            return None
        cost, _, u, X, eps = best
        return cost, u, X, eps

    def factors(self, budget):
        """All single factors of cost at most ``budget``: element -> (cost, u, X, eps), cheapest kept."""
        got = self._factors.get(budget)
        if got is None:
            self.upto(budget)
            got = {}
            for cost in range(budget + 1):
                for val, X in self.levels[cost]:
                    for eps in (1, -1):
                        g = val if eps == 1 else invert(val)
                        for u in self.conjugators:
                            f = concat(u, g, invert(u))
                            if f not in got:
                                got[f] = (cost, u, X, eps)
            self._factors[budget] = got
        return got


def _product_words(gens, sizes):
    if not sizes:
        yield ()
        return
    for w in _words_over(gens, sizes[0]):
        for rest in _product_words(gens, sizes[1:]):
            yield (w,) + rest


@lru_cache(maxsize=64)
def _tables(law, gens, conj_bound):
    return _Tables(law, gens, conj_bound)


def witness_search(law: LawWord, w, cost_bound: int, conj_bound: int, gens=None):
    """Minimum-cost witness within the bounds, or None (which is not a proof of non-membership).

    Values and conjugators range over the generators occurring in ``w`` unless ``gens`` is given;
    deleting other generators maps any witness to one at most as expensive.
    """
    w = free_reduce(w)
    if not w:
        return VerbalWitness(law, ())
    gens = tuple(sorted(gens)) if gens is not None else _gens_of(w)
    T = _tables(law, gens, conj_bound)
    minc = T.min_cost(cost_bound)
    if minc is None:
        return None
    if membership_precheck(law, w) == "out":
        return None

    def search(target, budget):
        if not target:
            return []
        one = T.single(target, budget)
        if one is not None:
            return [one]
        if budget < 2 * minc:
            return None
        for f, (c1, u, X, eps) in T.factors(budget - minc).items():
            rest = concat(invert(f), target)
            if len(cyclic_reduce(rest)[0]) > T.max_core[budget - c1] and budget - c1 < 2 * minc:
                continue
            sub = search(rest, budget - c1)
            if sub is not None:
                return [(c1, u, X, eps)] + sub
        return None

    for c in range(minc, cost_bound + 1):
        found = search(w, c)
        if found is not None:
            return VerbalWitness(law, tuple((u, X, eps) for _, u, X, eps in found))
    return None


def abelian_witness(w) -> VerbalWitness:
    """Witness for the commutator law by sorting letters, one ``[x, y]`` factor per adjacent swap."""
    law = parse_law("[x1,x2]")
    w = free_reduce(w)
    for g in _gens_of(w):
        if exponent_sum(w, g):
            raise ValueError(f"exponent sum of generator {g} is not zero")
    cur = list(w)
    factors = []
    for i in range(len(cur)):
        j = i
        while j > 0 and abs(cur[j - 1]) > abs(cur[j]):
            x, y = cur[j - 1], cur[j]
            factors.append((free_reduce(cur[:j - 1]), ((x,), (y,)), 1))
            cur[j - 1], cur[j] = y, x
            j -= 1
    if free_reduce(cur):
        raise AssertionError("sorted word did not reduce")
    return VerbalWitness(law, tuple(factors))


def law_modulus(law: LawWord) -> int:
    """gcd of the law's exponent sums; every value has all exponent sums divisible by it (0: all zero)."""
    g = 0
    for e in law.exponent_sums():
        g = gcd(g, abs(e))
    return g


def membership_precheck(law: LawWord, w, witness: VerbalWitness | None = None) -> str:
    w = free_reduce(w)
    g = law_modulus(law)
    for x in _gens_of(w):
        e = exponent_sum(w, x)
        if (g == 0 and e != 0) or (g and e % g):
            return "out"
    if witness is not None and witness.law == law and witness_verify(w, witness)[0]:
        return "in"
    return "unknown"


@dataclass(frozen=True)
class DehnRow:
    n: int
    fhat: int
    exact: bool
    witnessCount: int
    maxFactorCount: int


@dataclass(frozen=True)
class VerbalDehnTable:
    law: LawWord
    ngens: int
    rows: tuple
    witnesses: dict

    def fhat(self, n):
        return self.rows[n].fhat


def verbal_dehn_estimate(law: LawWord, n_max: int, ngens: int = 2, cost_bound: int = 8,
                         conj_bound: int = 3) -> VerbalDehnTable:
    """Exhaustive over all reduced words of length up to ``n_max`` on ``ngens`` generators."""
    rows, witnesses = [], {}
    fhat, exact, count, fmax = 0, True, 0, 0
    gens = tuple(range(1, ngens + 1))
    for n in range(n_max + 1):
        for w in reduced_words(ngens, n):
            if membership_precheck(law, w) == "out":
                continue
            wit = witness_search(law, w, cost_bound, conj_bound, gens=gens)
            if wit is None:
                exact = False
                continue
            witnesses[w] = wit
            count += 1
            fhat = max(fhat, wit.cost)
            fmax = max(fmax, wit.factorCount)
        rows.append(DehnRow(n, fhat, exact, count, fmax))
    return VerbalDehnTable(law, ngens, tuple(rows), witnesses)


def kill_generators(word, keep) -> tuple:
    return free_reduce(x for x in word if abs(x) in keep)


def project_witness(witness: VerbalWitness, keep) -> VerbalWitness:
    """Image of a witness under the retraction deleting generators outside ``keep``."""
    keep = set(keep)
    return VerbalWitness(witness.law, tuple(
        (kill_generators(u, keep), tuple(kill_generators(x, keep) for x in X), e) for u, X, e in witness.factors))


@dataclass(frozen=True)
class SuperadditivityReport:
    w1: tuple
    w2: tuple
    cost1: int
    cost2: int
    cost12: int | None
    cheaper_found: bool
    projections_ok: bool

    @property
    def ok(self):
        return (not self.cheaper_found and self.cost12 is not None and self.cost12 >= self.cost1 + self.cost2
                and self.projections_ok)


def superadditivity_check(law: LawWord, w1, w2, cost_bound: int = 8, conj_bound: int = 2) -> SuperadditivityReport:
    """Check ``mincost(w1 w2) >= mincost(w1) + mincost(w2)`` for w1, w2 over disjoint generators."""
    w1, w2 = free_reduce(w1), free_reduce(w2)
    g1, g2 = set(_gens_of(w1)), set(_gens_of(w2))
    if g1 & g2:
        raise ValueError("words must use disjoint generators")
    wit1 = witness_search(law, w1, cost_bound, conj_bound)
    wit2 = witness_search(law, w2, cost_bound, conj_bound)
    if wit1 is None or wit2 is None:
        raise ValueError("could not find witnesses for the parts within the bounds")
    c1, c2 = wit1.cost, wit2.cost
    w12 = concat(w1, w2)
    cheaper = False
    if c1 + c2 > 0:
        cheaper = witness_search(law, w12, c1 + c2 - 1, conj_bound) is not None
    joint = VerbalWitness(law, wit1.factors + wit2.factors)
    cost12 = joint.cost if witness_verify(w12, joint)[0] else None
    candidates = [joint]
    if law == parse_law("[x1,x2]"):
        candidates.append(abelian_witness(w12))
    proj_ok = True
    for wit in candidates:
        p1, p2 = project_witness(wit, g1), project_witness(wit, g2)
        proj_ok &= witness_verify(w1, p1)[0] and witness_verify(w2, p2)[0]
        proj_ok &= p1.cost + p2.cost <= wit.cost
        proj_ok &= p1.cost >= c1 and p2.cost >= c2
    return SuperadditivityReport(w1, w2, c1, c2, cost12, cheaper, proj_ok)


# -- JSON -------------------------------------------------------------------

def witness_to_json(witness: VerbalWitness, alphabet) -> dict:
    f = alphabet.format
    return {"schema": "witness.v1", "law": str(witness.law),
            "factors": [{"u": f(u), "X": [f(x) for x in X], "eps": e} for u, X, e in witness.factors]}


def witness_from_json(data: dict, alphabet) -> VerbalWitness:
    return VerbalWitness(parse_law(data["law"]), tuple(
        (alphabet.parse(fc["u"]), tuple(alphabet.parse(x) for x in fc["X"]), fc["eps"]) for fc in data["factors"]))


__all__ = [
    "DehnRow", "SuperadditivityReport", "VerbalDehnTable", "VerbalWitness", "abelian_witness", "law_modulus",
    "membership_precheck", "project_witness", "superadditivity_check", "verbal_dehn_estimate",
    "witness_from_json", "witness_search", "witness_to_json", "witness_verify",
]
