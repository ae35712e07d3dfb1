"""Presentations G(v, m) and H(v, m) for a law v, plus constructive derivations.

Letters are numbered so that the alphabet of G is a prefix of the alphabet of
H and the relators of G are a prefix of those of H; a trace over G is
therefore also a trace over H after swapping the presentation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

from .presentations import (DerivationTrace, GroupPresentation, TraceBuilder, TraceError, invert_trace,
                            reverse_trace)
from .smachine import MIN_N, check_N
from .words import Alphabet, LawWord, free_reduce, invert, substitute


@dataclass(frozen=True)
class HvmParams:
    v: LawWord
    m: int
    N: int = MIN_N
    allow_small_N: bool = False

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("rank m must be at least 1")
        check_N(self.N, self.allow_small_N)

    @property
    def k(self):
        return self.v.k

    @property
    def M(self):
        return self.v.M

    # letter numbering
    def a(self, j):
        return j

    def q(self, t):
        return self.m + t

    def kk(self, i):
        return self.m + self.M + i

    def r(self, j, ell):
        return self.m + self.M + self.N + (j - 1) * self.k + ell

    @property
    def _h0(self):
        return self.m + self.M + self.N + self.m * self.k

    @property
    def rho(self):
        return self._h0 + 1

    @property
    def d(self):
        return self._h0 + 2

    def b(self, j):
        return self._h0 + 2 + j

    @cached_property
    def alphabet_G(self):
        names = [f"a{j}" for j in range(1, self.m + 1)] + [f"q{t}" for t in range(1, self.M + 1)]
        names += [f"k{i}" for i in range(1, self.N + 1)]
        names += [f"r{j}_{ell}" for j in range(1, self.m + 1) for ell in range(1, self.k + 1)]
        return Alphabet(names)

    @cached_property
    def alphabet_H(self):
        return Alphabet(self.alphabet_G.names + ("rho", "d") + tuple(f"b{j}" for j in range(1, self.m + 1)))

    def q_kind(self, ell, t):
        """Relation schema binding r_(j,ell) and q_t."""
        body, M = self.v.body, self.M
        left = t >= 2 and body[t - 2] == ell
        right = t <= M - 1 and body[t - 1] == -ell
        if left and right:
            raise ValueError("law is not freely reduced")
        return "2.1" if left else "2.2" if right else "2.3"

    def a_to_b(self, w):
        off = self._h0 + 2
        return tuple(x + off if x > 0 else x - off for x in w)

    def b_to_a(self, w):
        off = self._h0 + 2
        out = []
        for x in w:
            if not 0 < abs(x) - off <= self.m:
                raise ValueError("word must use only b-letters")
            out.append(x - off if x > 0 else x + off)
        return tuple(out)


def _check_a_words(p, X):
    if len(X) != p.k:
        raise ValueError(f"expected {p.k} words, got {len(X)}")
    out = []
    for x in X:
        x = tuple(x)
        if any(not 0 < abs(c) <= p.m for c in x):
            raise ValueError("values must be words over a_1..a_m")
        if free_reduce(x) != x:
            raise ValueError("values must be freely reduced")
        out.append(x)
    return tuple(out)


@lru_cache(maxsize=None)
def gen_G(p: HvmParams) -> GroupPresentation:
    rels = []
    for j in range(1, p.m + 1):
        for ell in range(1, p.k + 1):
            r = p.r(j, ell)
            for t in range(1, p.M + 1):
                q = p.q(t)
                kind = p.q_kind(ell, t)
                if kind == "2.1":
                    rels.append(((-r, q, r, -q, -p.a(j)), kind))
                elif kind == "2.2":
                    rels.append(((-r, q, r, p.a(j), -q), kind))
                else:
                    rels.append(((-r, q, r, -q), kind))
    idx = [(j, ell) for j in range(1, p.m + 1) for ell in range(1, p.k + 1)]
    for j, ell in idx:
        for jj in range(1, p.m + 1):
            rels.append(((-p.r(j, ell), p.a(jj), p.r(j, ell), -p.a(jj)), "2.4"))
    for j, ell in idx:
        for i in range(1, p.N + 1):
            rels.append(((-p.r(j, ell), p.kk(i), p.r(j, ell), -p.kk(i)), "2.5"))
    rels.append((sigma_word(p, ((),) * p.k), "2.6"))
    return GroupPresentation(p.alphabet_G, tuple(rels))


@lru_cache(maxsize=None)
def gen_H(p: HvmParams) -> GroupPresentation:
    rho, d = p.rho, p.d
    rels = list(gen_G(p).relators)
    k1, k2 = p.kk(1), p.kk(2)
    rels.append(((-rho, k1, rho, d, -k1), "2.7"))
    rels.append(((-rho, k2, rho, -k2, -d), "2.7"))
    rels += [((-rho, p.kk(i), rho, -p.kk(i)), "2.8") for i in range(3, p.N + 1)]
    rels += [((-rho, p.q(t), rho, -p.q(t)), "2.9") for t in range(1, p.M + 1)]
    rels += [((-rho, p.a(j), rho, -p.a(j)), "2.10") for j in range(1, p.m + 1)]
    rels += [((-d, p.a(j), d, -p.b(j), -p.a(j)), "2.11") for j in range(1, p.m + 1)]
    rels += [((-d, p.q(t), d, -p.q(t)), "2.12") for t in range(1, p.M + 1)]
    rels += [((p.b(j), p.a(ell), -p.b(j), -p.a(ell)), "2.13")
             for j in range(1, p.m + 1) for ell in range(1, p.m + 1)]
    rels += [((p.b(j), p.q(t), -p.b(j), -p.q(t)), "2.14")
             for j in range(1, p.m + 1) for t in range(1, p.M + 1)]
    return GroupPresentation(p.alphabet_H, tuple(rels))


def count_schema(p: HvmParams) -> dict:
    """Closed-form generator and relator counts for G and H."""
    m, k, M, N = p.m, p.k, p.M, p.N
    pos = sum(1 for y in p.v.body if y > 0)
    neg = len(p.v.body) - pos
    g = {"2.1": m * pos, "2.2": m * neg, "2.3": m * (k * M - pos - neg),
         "2.4": m * k * m, "2.5": m * k * N, "2.6": 1}
    g = {t: c for t, c in g.items() if c}
    h = dict(g)
    h.update({"2.7": 2, "2.8": N - 2, "2.9": M, "2.10": m, "2.11": m, "2.12": M, "2.13": m * m, "2.14": m * M})
    return {"G": {"generators": m + M + N + m * k, "relatorsByTag": g},
            "H": {"generators": m + M + N + m * k + 2 + m, "relatorsByTag": h}}


def lambda_word(p: HvmParams, X) -> tuple:
    X = _check_a_words(p, X)
    out = [p.q(1)]
    for t, y in enumerate(p.v.body, start=2):
        out.extend(X[y - 1] if y > 0 else invert(X[-y - 1]))
        out.append(p.q(t))
    return tuple(out)


def sigma_word(p: HvmParams, X) -> tuple:
    lam = lambda_word(p, X)
    out = []
    for i in range(1, p.N + 1):
        out.append(p.kk(i))
        out.extend(lam)
    return tuple(out)


def _on_H(p, t: DerivationTrace) -> DerivationTrace:
    return DerivationTrace(gen_H(p), t.start, t.steps, t.end, t.max_len)


@lru_cache(maxsize=4096)
def derive_conj_step(p: HvmParams, i, direction: str, X) -> DerivationTrace:
    """``r^-1 L(X) r -> L(X')`` with ``X'_l = X_l a_j`` ("+"), or ``r L(X) r^-1`` with ``X_l a_j^-1`` ("-")."""
    j, ell = i
    X = _check_a_words(p, X)
    r, a = p.r(j, ell), p.a(j)
    lam = lambda_word(p, X)
    qs = {p.q(t): p.q_kind(ell, t) for t in range(1, p.M + 1)}
    if direction == "+":
        b = TraceBuilder(gen_G(p), (-r,) + lam + (r,))
        pos = 0
        for x in lam:
            kind = qs.get(x)
            if kind == "2.1":
                b.rewrite(pos, (-r, x), (a, x, -r))
                pos += 2
            elif kind == "2.2":
                b.rewrite(pos, (-r, x), (x, -a, -r))
                pos += 2
            else:
                b.rewrite(pos, (-r, x), (x, -r))
                pos += 1
    elif direction == "-":
        # the "+" step for X' read backwards, conjugated by r
        Xp = list(X)
        Xp[ell - 1] = free_reduce(X[ell - 1] + (-a,))
        back = reverse_trace(derive_conj_step(p, i, "+", tuple(Xp)))
        b = TraceBuilder(gen_G(p), (r,) + lam + (-r,))
        b.run(back, 1)
        b.cancel(0)
        b.cancel(len(b.word) - 2)
        return b.finish()
    else:
        raise ValueError("direction must be '+' or '-'")
    b.cancel(pos)
    b.reduce()
    e = 1 if direction == "+" else -1
    Xp = list(X)
    Xp[ell - 1] = free_reduce(X[ell - 1] + (e * a,))
    if tuple(b.word) != lambda_word(p, Xp):
        raise TraceError("conjugation step did not produce the expected word")
    return b.finish()


@lru_cache(maxsize=256)
def _peel_trace(p, i, X):
    return reverse_trace(derive_conj_step(p, i, "+", X))


@lru_cache(maxsize=1024)
def derive_sigma_trivial(p: HvmParams, X) -> DerivationTrace:
    """``Sigma(X) -> empty`` over G: strip X letter by letter through all N blocks, then the hub."""
    X = list(_check_a_words(p, X))
    b = TraceBuilder(gen_G(p), sigma_word(p, X))
    pre = 0
    N = p.N
    for ell in range(1, p.k + 1):
        while X[ell - 1]:
            last = X[ell - 1][-1]
            j = abs(last)
            r = p.r(j, ell)
            Xp = list(X)
            Xp[ell - 1] = X[ell - 1][:-1]
            old_len = len(lambda_word(p, X))
            new_len = len(lambda_word(p, Xp))
            if last < 0:
                t = derive_conj_step(p, (j, ell), "+", tuple(X))
                b.insert(pre, r)
                pos = pre + 1
                for blk in range(1, N + 1):
                    kb = p.kk(blk)
                    b.rewrite(pos, (-r, kb), (kb, -r))
                    pos += 1
                    b.insert(pos + 1 + old_len, r)
                    b.run(t, pos)
                    pos += new_len
            else:
                t = _peel_trace(p, (j, ell), tuple(Xp))
                pos = pre
                b.run(t, pos + 1)
                b.rewrite(pos, (p.kk(1), -r), (-r, p.kk(1)))
                pos += 2 + new_len
                for blk in range(2, N + 1):
                    kb = p.kk(blk)
                    b.rewrite(pos, (r, kb), (kb, r))
                    b.run(t, pos + 2)
                    b.cancel(pos + 1)
                    pos += 1 + new_len
            pre += 1
            X = Xp
    b.rewrite(pre, sigma_word(p, X), ())
    b.reduce()
    return b.finish()


@lru_cache(maxsize=1024)
def derive_d_conjugation(p: HvmParams, X) -> DerivationTrace:
    """``d^-1 L(X) d (L(X) v(Y))^-1 -> empty`` over H, Y the b-copies of X."""
    X = _check_a_words(p, X)
    lam = lambda_word(p, X)
    vY = substitute(p.v, [p.a_to_b(x) for x in X])
    d = p.d
    b = TraceBuilder(gen_H(p), (-d,) + lam + (d,) + invert(lam + vY))
    pos = 0
    for x in lam:
        if abs(x) <= p.m:
            bx = p.b(abs(x))
            if x > 0:
                b.rewrite(pos, (-d, x), (x, bx, -d))
            else:
                b.rewrite(pos, (-d, x), (-bx, x, -d))
            pos += 2
        else:
            b.rewrite(pos, (-d, x), (x, -d))
            pos += 1
    b.cancel(pos)
    _collect_right(b, 0, pos, lambda x: abs(x) > p.b(0))
    b.reduce()
    return b.finish()


def _collect_right(b: TraceBuilder, lo: int, hi: int, is_mobile):
    """Move every mobile letter of ``word[lo:hi]`` to the right end, keeping their order."""
    dest = hi
    w = b.word
    for idx in range(hi - 1, lo - 1, -1):
        x = w[idx]
        if is_mobile(x):
            for s in range(idx, dest - 1):
                b.rewrite(s, (x, w[s + 1]), (w[s + 1], x))
            dest -= 1


def _ascent_trace(p, X):
    """``rho^-1 Sigma(X) rho -> A v(Y) B`` where ``Sigma(X) = A B`` and ``A = k_1 L(X)``."""
    rho, d = p.rho, p.d
    sig = sigma_word(p, X)
    lam = lambda_word(p, X)
    b = TraceBuilder(gen_H(p), (-rho,) + sig + (rho,))
    k1, k2 = p.kk(1), p.kk(2)
    pos = 0
    for x in sig:
        if x == k1:
            b.rewrite(pos, (-rho, x), (x, -d, -rho))
            pos += 2
        elif x == k2:
            b.rewrite(pos, (-rho, x), (d, x, -rho))
            pos += 2
        else:
            b.rewrite(pos, (-rho, x), (x, -rho))
            pos += 1
    b.cancel(pos)
    dc = derive_d_conjugation(p, X)
    vY = substitute(p.v, [p.a_to_b(x) for x in X])
    b.insert_word(len(lam) + 3, invert(lam + vY))
    b.run(dc, 1)
    return b.finish(), vY


@lru_cache(maxsize=256)
def derive_law_instance(p: HvmParams, Y) -> DerivationTrace:
    """``v(Y) -> empty`` over H for Y the b-copies of a-words."""
    Y = tuple(tuple(y) for y in Y)
    X = tuple(p.b_to_a(y) for y in Y)
    X = _check_a_words(p, X)
    vY = substitute(p.v, Y)
    H = gen_H(p)
    if not vY:
        return DerivationTrace(H, (), (), (), 0)
    asc, vy2 = _ascent_trace(p, X)
    assert vy2 == vY
    sig = sigma_word(p, X)
    A = (p.kk(1),) + lambda_word(p, X)
    B = sig[len(A):]
    st = _on_H(p, derive_sigma_trivial(p, X))
    b = TraceBuilder(H, vY)
    b.insert_word(0, invert(A))
    b.insert_word(len(b.word), B)
    b.run(reverse_trace(asc), len(A))
    b.run(st, len(A) + 1)
    b.cancel(len(A))
    b.insert_word(len(b.word), invert(A))
    b.run(invert_trace(st), len(A))
    b.reduce()
    return b.finish()


def derive_relatively_free_trivial(p: HvmParams, w, witness) -> DerivationTrace:
    """``w -> empty`` over H for a b-word w, following a verbal witness over generators 1..m."""
    from .verbal import witness_verify
    w = tuple(w)
    if witness.law != p.v:
        raise ValueError("witness is for a different law")
    generic = p.b_to_a(w)
    ok, _ = witness_verify(generic, witness)
    if not ok:
        raise ValueError("witness does not verify")
    pieces = []
    target = []
    for u, X, eps in witness.factors:
        bu = p.a_to_b(u)
        vY = substitute(p.v, [p.a_to_b(x) for x in X])
        core = vY if eps == 1 else invert(vY)
        pieces.append((len(bu), tuple(tuple(x) for x in X), eps, len(core)))
        target.extend(bu + core + invert(bu))
    b = TraceBuilder(gen_H(p), w)
    b.morph(0, len(w), target)
    pos = 0
    for ulen, X, eps, clen in pieces:
        if clen:
            t = derive_law_instance(p, tuple(p.a_to_b(free_reduce(x)) for x in X))
            b.run(t if eps == 1 else invert_trace(t), pos + ulen)
        b.reduce(pos, pos + 2 * ulen)
    b.reduce()
    return b.finish()


__all__ = [
    "HvmParams", "count_schema", "derive_conj_step", "derive_d_conjugation", "derive_law_instance",
    "derive_relatively_free_trivial", "derive_sigma_trivial", "gen_G", "gen_H", "lambda_word", "sigma_word",
]
