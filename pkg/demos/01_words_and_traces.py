"""Free words, relators and a hand-built derivation that the checker replays."""

from embedcert.presentations import (GroupPresentation, TraceBuilder, conjugate_product_word, to_conjugate_product,
                                     verify_trace)
from embedcert.words import Alphabet, commutator, free_reduce

# %% Words are tuples of signed generator indices.
ab = Alphabet(["a", "b"])
w = ab.parse("a b b^-1 a^-1 b")
print("raw:", ab.format(w), "  reduced:", ab.format(free_reduce(w)))
print("[a,b] =", ab.format(commutator(ab.parse("a"), ab.parse("b"))))

# %% A presentation of Z^2 with a single commutator relator.
z2 = GroupPresentation(ab, ((ab.parse("a b a^-1 b^-1"), "comm"),))

# %% Show that b a b^-1 a^-1 is trivial: swap "b a" to "a b" with one relator, then cancel freely.
start = ab.parse("b a b^-1 a^-1")
builder = TraceBuilder(z2, start)
builder.rewrite(0, ab.parse("b a"), ab.parse("a b"))
builder.reduce()
trace = builder.finish()
report = verify_trace(trace)
print("steps:", len(trace.steps), " area:", report.area, " max length:", report.maxIntermediateLength)

# %% Every closed trace reads off as a product of conjugated relators.
factors = to_conjugate_product(trace)
print("conjugate product factors:", [(ab.format(u), rel, exp) for u, rel, exp in factors])
assert conjugate_product_word(z2, factors) == free_reduce(start)
