"""Certified derivations in the embedding group for a law, and how their areas grow."""

import random

from embedcert import embed_hvm as hvm
from embedcert.cli import random_values
from embedcert.fitting import loglog_fit
from embedcert.presentations import verify_trace
from embedcert.verbal import witness_search
from embedcert.words import parse_law

law = parse_law("x1^3")
p = hvm.HvmParams(law, 2)
G, H = hvm.gen_G(p), hvm.gen_H(p)
print(f"G: {len(G.alphabet)} generators, {len(G.relators)} relators")
print(f"H: {len(H.alphabet)} generators, {len(H.relators)} relators")

# %% The accept-loop word for a fixed tuple of values is trivial; the checker confirms each step.
X = ((p.a(1), p.a(2)),)
t = hvm.derive_sigma_trivial(p, X)
print("sigma word of length", len(t.start), "-> empty with area", verify_trace(t).area)

# %% Every instance of the law among the b letters dies without any law relator in H.
for n in range(1, 4):
    t = hvm.derive_law_instance(p, ((p.b(1), p.b(2)) * n,))
    print(f"(b1 b2)^{n} cubed: length {len(t.start)}, area {verify_trace(t).area}")

# %% Areas of the sigma words grow roughly quadratically in the total value length.
Ls = list(range(4, 33, 4))
areas = [hvm.derive_sigma_trivial(p, random_values(random.Random(L), p.k, p.m, L)).area for L in Ls]
fit = loglog_fit(Ls, areas)
print("areas:", areas)
print(f"log-log slope {fit.slope:.2f}, R2 {fit.r2:.4f}")

# %% The commutator [a^2, b] is a single law value, so its image among the b letters dies in H.
q = hvm.HvmParams(parse_law("[x1,x2]"), 2)
generic = (1, 1, 2, -1, -1, -2)
wit = witness_search(q.v, generic, 4, 2)
t = hvm.derive_relatively_free_trivial(q, q.a_to_b(generic), wit)
print("witness cost", wit.cost, "with", wit.factorCount, "factors; H area", verify_trace(t).area)
