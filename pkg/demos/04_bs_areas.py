"""Solving the word problem of BS(1,k) inside the embedding group, with two independent oracles."""

import random

from embedcert import embed_bs as bs
from embedcert.fitting import loglog_fit
from embedcert.presentations import verify_trace

p = bs.BsParams(2)
print("relator:", p.alphabet_H.format(bs.relator_bs(p)))

# %% The two oracles agree: an exact affine image and a Britton reduction.
for text in ("b1 b2 b1^-1 b2^-2", "b1 b2 b1^-1 b2^-1", "b1^2 b2 b1^-2 b2^-4"):
    w = p.bs_word(text)
    print(f"{text:24s} affine: {bs.oracle_affine(p, w):10s} britton: {bs.oracle_britton(p, w).verdict}")

# %% The commutator family w_n has quadratic area.
ns = [8, 16, 32, 64]
areas = [verify_trace(bs.derive_wn(p, n)).area for n in ns]
fit = loglog_fit(ns, areas)
print("w_n areas:", dict(zip(ns, areas)), f"slope {fit.slope:.2f}")

# %% Random trivial words stay well inside the quartic bound.
rng = random.Random(1)
lens, areas = [], []
for _ in range(60):
    w = bs.random_trivial_word(p, rng.randint(8, 48), rng)
    lens.append(len(w))
    areas.append(verify_trace(bs.derive_bs_trivial(p, w)).area)
fit = loglog_fit(lens, areas)
print(f"random words: lengths {min(lens)}..{max(lens)}, max area {max(areas)}, slope {fit.slope:.2f}")
