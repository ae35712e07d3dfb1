"""The S-machine that accepts exactly the instances of a law, checked exhaustively."""

from embedcert.smachine import accepts, build_machine_for_law, machine_to_presentation, main_property_check
from embedcert.words import parse_law

law = parse_law("x1^3")
machine = build_machine_for_law(law, 1)
print("law:", law, " tape letters: 1  rules:", len(machine.rules))

# %% An instance of the law is accepted; the computation ends at the accept word.
word = machine.parse_word("q1 a1 q2 a1 q3 a1 q4")
res = accepts(machine, word, 12)
print("accepted:", res.accepted, " area:", res.computation.area, " via", " ".join(res.computation.rules))
for z in res.computation.words:
    print("   ", machine.format(z))

# %% A non-instance: the bounded search runs dry without reaching the accept word.
res = accepts(machine, machine.parse_word("q1 a1 q2 q3 a1 q4"), 6)
print("non-instance:", res.status, "after", res.explored, "words")

# %% Acceptance coincides with the law pattern on every admissible word up to a tape bound.
rep = main_property_check(law, 1, 6)
print("checked", rep.checked, "words,", rep.accepted, "accepted,", len(rep.mismatches), "mismatches")

# %% The machine becomes a finite presentation.
pres = machine_to_presentation(machine)
print("presentation:", len(pres.alphabet), "generators,", len(pres.relators), "relators", pres.tags())
