"""Minimal verbal witnesses and the verbal Dehn function of a law on small words."""

from embedcert.verbal import (abelian_witness, membership_precheck, superadditivity_check, verbal_dehn_estimate,
                              witness_search, witness_verify)
from embedcert.words import parse_law

comm = parse_law("[x1,x2]")

# %% A witness writes w as a product of conjugated law values; its cost is the total value length.
w = (1, 1, 2, -1, -1, -2)
wit = witness_search(comm, w, 6, 2)
print("a^2 b a^-2 b^-1: cost", wit.cost, "factors", wit.factors)
print("bubble-sort witness cost:", witness_verify(w, abelian_witness(w))[1])

# %% Exponent sums rule out membership cheaply.
print("x1^2 contains a b?", membership_precheck(parse_law("x1^2"), (1, 2)))

# %% The exact table of minimal costs over all words of length n.
table = verbal_dehn_estimate(comm, 6)
for row in table.rows:
    print(f"n={row.n}: fhat={row.fhat} exact={row.exact} witnesses={row.witnessCount}")

# %% Words on disjoint generators never combine into a cheaper witness.
rep = superadditivity_check(comm, (1, 2, -1, -2), (3, 3, 4, -3, -3, -4))
print("superadditive:", rep.ok, "costs", rep.cost1, "+", rep.cost2, "=", rep.cost12)
