"""Embedding BS(k,1) = <b1, b2 | b1 b2 b1^-1 = b2^k> into a finitely presented group.

Includes the words Sigma_s and W_n, quadratic-area derivations for them, a
general derivation for every trivial word in b1, b2, and two independent
solutions of the word problem in BS(k,1) used as oracles.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

from .presentations import DerivationTrace, GroupPresentation, TraceBuilder, invert_trace, reverse_trace
from .smachine import MIN_N, check_N
from .words import Alphabet, commutator, free_reduce, invert

A1, A2, C = 1, 2, 3
Q1, Q2, Q3, Q4, Q5 = 4, 5, 6, 7, 8
_Q_MULT = {Q1: A1, Q2: -A1, Q3: A1, Q4: -A1, Q5: C}


class NotTrivialError(ValueError):
    pass


@dataclass(frozen=True)
class BsParams:
    k: int = 2
    N: int = MIN_N
    allow_small_N: bool = False

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        check_N(self.N, self.allow_small_N)

    def kk(self, i):
        return 8 + i

    @property
    def r(self):
        return 9 + self.N

    @property
    def b1(self):
        return 10 + self.N

    @property
    def b2(self):
        return 11 + self.N

    @property
    def rho(self):
        return 12 + self.N

    @cached_property
    def alphabet_G(self):
        return Alphabet(["a1", "a2", "c", "q1", "q2", "q3", "q4", "q5"]
                        + [f"k{i}" for i in range(1, self.N + 1)] + ["r"])

    @cached_property
    def alphabet_H(self):
        return Alphabet(self.alphabet_G.names + ("b1", "b2", "rho"))

    def bs_word(self, text: str) -> tuple:
        """Parse a word over b1, b2 into letters of H."""
        return self.alphabet_H.parse(text)


def relator_bs(p: BsParams) -> tuple:
    return (p.b1, p.b2, -p.b1) + (-p.b2,) * p.k


@lru_cache(maxsize=None)
def gen_G_bs(p: BsParams) -> GroupPresentation:
    r = p.r
    rels = [((r, q, -r, -x, -q), "7.1") for q, x in _Q_MULT.items()]
    rels += [((r, p.kk(i), -r, -p.kk(i)), "7.2") for i in range(1, p.N + 1)]
    rels += [((r, x, -r, -x), "7.3") for x in (A1, A2, C)]
    rels.append((sigma_s(p, 0), "7.4"))
    return GroupPresentation(p.alphabet_G, tuple(rels))


@lru_cache(maxsize=None)
def gen_H_bs(p: BsParams) -> GroupPresentation:
    rho, b = p.rho, (p.b1, p.b2)
    rels = list(gen_G_bs(p).relators)
    rels += [((rho, a, -rho, -bj, -a), "7.5") for a, bj in zip((A1, A2), b)]
    rels.append(((rho, C, -rho, -C), "7.6"))
    rels += [((rho, q, -rho, -q), "7.7") for q in (Q1, Q2, Q3, Q4, Q5)]
    rels += [((rho, p.kk(i), -rho, -p.kk(i)), "7.8") for i in range(1, p.N + 1)]
    rels += [((bj, a, -bj, -a), "7.9") for bj in b for a in (A1, A2)]
    rels += [((bj, q, -bj, -q), "7.10") for bj in b for q in (Q1, Q2, Q3, Q4)]
    rels.append((relator_bs(p), "7.11"))
    return GroupPresentation(p.alphabet_H, tuple(rels))


def count_schema(p: BsParams) -> dict:
    N = p.N
    g = {"7.1": 5, "7.2": N, "7.3": 3, "7.4": 1}
    h = dict(g)
    h.update({"7.5": 2, "7.6": 1, "7.7": 5, "7.8": N, "7.9": 4, "7.10": 8, "7.11": 1})
    return {"G": {"generators": N + 9, "relatorsByTag": g},
            "H": {"generators": N + 12, "relatorsByTag": h}}


def lambda_s(s: int) -> tuple:
    return ((Q1,) + (A1,) * s + (A2, Q2) + (-A1,) * s + (A2, Q3) + (A1,) * s + (-A2, Q4)
            + (-A1,) * s + (-A2,))


def rest_s(p: BsParams, s: int) -> tuple:
    out = []
    for i in range(1, p.N + 1):
        out += [p.kk(i), Q5] + [C] * s
    return tuple(out)


def sigma_s(p: BsParams, s: int) -> tuple:
    if s < 0:
        raise ValueError("s must be non-negative")
    return lambda_s(s) + rest_s(p, s)


def wn(p: BsParams, n: int) -> tuple:
    """``(b1^n b2 b1^-n) b2 (b1^n b2^-1 b1^-n) b2^-1``, literally."""
    if n < 0:
        raise ValueError("n must be non-negative")
    b1, b2 = p.b1, p.b2
    return (b1,) * n + (b2,) + (-b1,) * n + (b2,) + (b1,) * n + (-b2,) + (-b1,) * n + (-b2,)


@lru_cache(maxsize=512)
def derive_sigma_s(p: BsParams, s: int) -> DerivationTrace:
    """``Sigma_s -> empty`` over G: peel one r-conjugation per round, then the hub."""
    r = p.r
    b = TraceBuilder(gen_G_bs(p), sigma_s(p, s))
    pre = 0
    for t in range(s, 0, -1):
        b.insert(pre, r)
        pos = pre + 1
        w = b.word
        for _ in range(len(sigma_s(p, t - 1))):
            x = w[pos + 1]
            if x in _Q_MULT:
                b.rewrite(pos, (-r, x, _Q_MULT[x]), (x, -r))
            else:
                b.rewrite(pos, (-r, x), (x, -r))
            pos += 1
        pre += 1
    b.rewrite(pre, sigma_s(p, 0), ())
    b.reduce()
    return b.finish()


def _on_H(p, t):
    return DerivationTrace(gen_H_bs(p), t.start, t.steps, t.end, t.max_len)


def _is_b(p, x):
    return abs(x) in (p.b1, p.b2)


def _lift_trace(p, n):
    """``rho Sigma_n rho^-1 -> L_n W_n R_n`` by pushing rho and collecting b-letters."""
    rho = p.rho
    sig = sigma_s(p, n)
    bmap = {A1: p.b1, A2: p.b2}
    b = TraceBuilder(gen_H_bs(p), (rho,) + sig + (-rho,))
    pos = 0
    for x in sig:
        if abs(x) in bmap:
            bx = bmap[abs(x)]
            b.rewrite(pos, (rho, x), (x, bx, rho) if x > 0 else (-bx, x, rho))
            pos += 2
        else:
            b.rewrite(pos, (rho, x), (x, rho))
            pos += 1
    b.cancel(pos)
    end = len(lambda_s(n)) + 4 * n + 4
    dest = end
    w = b.word
    for idx in range(end - 1, -1, -1):
        x = w[idx]
        if _is_b(p, x):
            for s in range(idx, dest - 1):
                b.rewrite(s, (x, w[s + 1]), (w[s + 1], x))
            dest -= 1
    return b.finish()


@lru_cache(maxsize=512)
def derive_wn(p: BsParams, n: int) -> DerivationTrace:
    """``W_n -> empty`` over H with O(n^2) relator applications."""
    H = gen_H_bs(p)
    if n == 0:
        b = TraceBuilder(H, wn(p, 0))
        b.reduce()
        return b.finish()
    lam, rest = lambda_s(n), rest_s(p, n)
    ts = _on_H(p, derive_sigma_s(p, n))
    b = TraceBuilder(H, wn(p, n))
    b.insert_word(0, invert(lam))
    b.insert_word(len(b.word), rest)
    b.run(reverse_trace(_lift_trace(p, n)), len(lam))
    b.run(ts, len(lam) + 1)
    b.cancel(len(lam))
    b.insert_word(len(b.word), invert(lam))
    b.run(invert_trace(ts), len(lam))
    b.reduce()
    return b.finish()


def _factor(p, s, e):
    return (p.b1,) * s + (e * p.b2,) + (-p.b1,) * s


@lru_cache(maxsize=4096)
def derive_commutator(p: BsParams, s1: int, e1: int, s2: int, e2: int) -> DerivationTrace:
    """``[b1^s1 b2^e1 b1^-s1, b1^s2 b2^e2 b1^-s2] -> empty`` through a conjugate of ``W_|s1-s2|^+-1``."""
    if min(s1, s2) < 0 or e1 not in (1, -1) or e2 not in (1, -1):
        raise ValueError("levels must be non-negative and signs +-1")
    x, y = _factor(p, s1, e1), _factor(p, s2, e2)
    start = commutator(x, y)
    if s1 == s2:
        b = TraceBuilder(gen_H_bs(p), start)
        b.reduce()
        return b.finish()
    if s1 < s2:
        return invert_trace(derive_commutator(p, s2, e2, s1, e1))
    d = s1 - s2
    X, Y = _factor(p, d, 1), (p.b2,)
    u, sign = {(1, 1): ((), 1), (-1, 1): (invert(X), -1), (1, -1): (invert(Y), -1),
               (-1, -1): (invert(X + Y), 1)}[(e1, e2)]
    u = (p.b1,) * s2 + u
    core = derive_wn(p, d)
    if sign == -1:
        core = invert_trace(core)
    b = TraceBuilder(gen_H_bs(p), start)
    b.morph(0, len(start), u + core.start + invert(u))
    b.run(core, len(u))
    b.reduce()
    return b.finish()


def factor_levels(p: BsParams, w) -> list:
    """``(P_i, e_i)`` with ``w`` freely equal to ``prod b1^P_i b2^e_i b1^-P_i``."""
    level, out = 0, []
    for x in w:
        if x == p.b1:
            level += 1
        elif x == -p.b1:
            level -= 1
        elif abs(x) == p.b2:
            out.append((level, 1 if x > 0 else -1))
        else:
            raise ValueError("word must be over b1, b2")
    if level != 0:
        raise NotTrivialError("exponent sum of b1 is not zero")
    return out


def derive_bs_trivial(p: BsParams, w) -> DerivationTrace:
    """``w -> empty`` over H for any w trivial in BS(k,1)."""
    w = tuple(w)
    if oracle_affine(p, w) != "trivial" or oracle_britton(p, w).verdict != "trivial":
        raise NotTrivialError("word is not trivial in BS(k,1)")
    fac = factor_levels(p, w)
    sigma = max(0, -min((s for s, _ in fac), default=0))
    F = [(s + sigma, e) for s, e in fac]
    b = TraceBuilder(gen_H_bs(p), w)
    if sigma:
        b.insert_word(0, (-p.b1,) * sigma)
        b.insert_word(len(b.word), (-p.b1,) * sigma)
    lo = sigma
    b.morph(lo, len(b.word) - sigma, [x for s, e in F for x in _factor(p, s, e)])

    def offset(i):
        return lo + sum(2 * s + 1 for s, _ in F[:i])

    def swap(i):
        (sa, ea), (sb, eb) = F[i], F[i + 1]
        pos = offset(i)
        A, B = _factor(p, sa, ea), _factor(p, sb, eb)
        t = derive_commutator(p, sa, ea, sb, eb)
        b.morph(pos, pos + len(A) + len(B), t.start + B + A)
        b.run(t, pos)
        F[i], F[i + 1] = F[i + 1], F[i]

    while F:
        s = min(x for x, _ in F)
        idx = [i for i, (x, _) in enumerate(F) if x == s]
        pair = next(((i, j) for i, j in zip(idx, idx[1:]) if F[i][1] != F[j][1]), None)
        if pair is not None:
            i, j = pair
            for t in range(j - 1, i, -1):
                swap(t)
            pos = offset(i)
            b.reduce(pos, pos + 2 * (2 * s + 1))
            del F[i:i + 2]
            continue
        ell, e = len(idx), F[idx[0]][1]
        if ell % p.k:
            raise AssertionError(f"{ell} factors at the lowest level is not a multiple of k={p.k}")
        dest = len(F)
        for i in reversed(idx):
            for t in range(i, dest - 1):
                swap(t)
            dest -= 1
        for c in reversed(range(dest, len(F), p.k)):
            pos = offset(c)
            b.morph(pos, pos + p.k * (2 * s + 1), (p.b1,) * s + (e * p.b2,) * p.k + (-p.b1,) * s)
            b.rewrite(pos + s, (e * p.b2,) * p.k, (p.b1, e * p.b2, -p.b1))
        F[dest:] = [(s + 1, e)] * (ell // p.k)
    b.reduce()
    return b.finish()


# -- word problem oracles ---------------------------------------------------

def affine_image(p: BsParams, w) -> tuple:
    """``(scale, shift)`` of the map ``x -> scale*x + shift`` representing ``w``."""
    k = Fraction(p.k)
    scale, shift = Fraction(1), Fraction(0)
    gens = {p.b1: (k, Fraction(0)), -p.b1: (1 / k, Fraction(0)), p.b2: (Fraction(1), Fraction(1)),
            -p.b2: (Fraction(1), Fraction(-1))}
    for x in w:
        try:
            s2, t2 = gens[x]
        except KeyError:
            raise ValueError("word must be over b1, b2") from None
        scale, shift = scale * s2, scale * t2 + shift
    return scale, shift


def oracle_affine(p: BsParams, w) -> str:
    return "trivial" if affine_image(p, w) == (1, 0) else "nontrivial"


@dataclass(frozen=True)
class PinchForm:
    syllables: tuple  # ("b1", +-1) and ("b2", t) items in order

    @property
    def verdict(self):
        return "nontrivial" if self.syllables else "trivial"


def oracle_britton(p: BsParams, w) -> PinchForm:
    """Stack-based Britton reduction with stable letter b1."""
    k = p.k
    st = []

    def push_power(t):
        if st and st[-1][0] == "b2":
            t += st.pop()[1]
        if t:
            st.append(("b2", t))

    for x in w:
        if abs(x) == p.b2:
            push_power(1 if x > 0 else -1)
        elif abs(x) == p.b1:
            e = 1 if x > 0 else -1
            if st and st[-1] == ("b1", -e):
                st.pop()
            elif len(st) >= 2 and st[-1][0] == "b2" and st[-2] == ("b1", -e):
                t = st[-1][1]
                if e == -1:
                    st.pop()
                    st.pop()
                    push_power(k * t)
                elif t % k == 0:
                    st.pop()
                    st.pop()
                    push_power(t // k)
                else:
                    st.append(("b1", e))
            else:
                st.append(("b1", e))
        else:
            raise ValueError("word must be over b1, b2")
    return PinchForm(tuple(st))


def random_trivial_word(p: BsParams, n: int, rng: random.Random, max_tries: int = 1000) -> tuple:
    """Freely reduced product of random conjugates of the relator, nonempty and of length at most n."""
    R = relator_bs(p)
    if n < len(R):
        raise ValueError(f"no nontrivial relator product has length at most {n}; need n >= {len(R)}")
    letters = (p.b1, -p.b1, p.b2, -p.b2)
    for _ in range(max_tries):
        out = []
        for _ in range(rng.randint(1, max(1, n // len(R)))):
            u = []
            for _ in range(rng.randint(0, n // 4)):
                x = rng.choice(letters)
                if u and u[-1] == -x:
                    u.pop()
                else:
                    u.append(x)
            core = R if rng.random() < 0.5 else invert(R)
            out.extend(tuple(u) + core + invert(u))
        w = free_reduce(out)
        if 0 < len(w) <= n:
            return w
    raise RuntimeError("could not generate a word within the length bound")


__all__ = [
    "BsParams", "NotTrivialError", "PinchForm", "affine_image", "count_schema", "derive_bs_trivial",
    "derive_commutator", "derive_sigma_s", "derive_wn", "factor_levels", "gen_G_bs", "gen_H_bs", "lambda_s",
    "oracle_affine", "oracle_britton", "random_trivial_word", "relator_bs", "rest_s", "sigma_s", "wn",
]
