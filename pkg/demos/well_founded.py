"""
What counts as a definition
===========================

Clauses here are read as inductive definitions: an atom is true exactly
when some rule derives it, and circular justification counts for
nothing.  The well-founded evaluation makes that reading precise, and
its three-valued verdict is how the package tells good definitions from
broken ones.
"""

from alp import build_theory, parse_text, well_founded

FALSE, UNDEF, TRUE = 0, 1, 2
LABEL = {FALSE: "false", UNDEF: "undefined", TRUE: "true"}


def evaluate(title, named_clauses):
    """named_clauses: list of (head, positive body, negative body) over names."""
    names = sorted({h for h, _, _ in named_clauses}
                   | {a for _, pos, neg in named_clauses for a in pos + neg})
    index = {n: i for i, n in enumerate(names)}
    clauses = [
        (index[h], tuple(index[a] for a in pos), tuple(index[a] for a in neg))
        for h, pos, neg in named_clauses
    ]
    truth, trace = well_founded(clauses, (), len(names))
    verdicts = ", ".join(f"{n}={LABEL[truth[index[n]]]}" for n in names)
    print(f"{title:<28} {verdicts}   (rounds: {len(trace.true_sizes)})")


# A definite program: derivation is plain forward chaining.
evaluate("chain", [("p", ("q",), ()), ("q", (), ()), ("r", ("s",), ())])

# Negation as "provably not derivable": q has no rule, so p holds.
evaluate("default negation", [("p", (), ("q",))])

# A positive loop derives nothing. p and q only support each other, and
# self-support is exactly what the semantics refuses to count.
evaluate("positive loop", [("p", ("q",), ()), ("q", ("p",), ())])

# An even negation loop has two stable readings, so neither is forced:
# both atoms come out undefined rather than arbitrarily picked.
evaluate("even negation loop", [("p", (), ("q",)), ("q", (), ("p",))])

# The odd loop p :- not p has no coherent reading at all.
evaluate("odd negation loop", [("p", (), ("p",))])

# Undefinedness is contagious only where it matters: the rest of this
# program still settles.
evaluate("odd loop plus chain",
         [("p", (), ("p",)), ("a", (), ()), ("b", ("a",), ()), ("c", (), ("b",))])

# The solver applies the same test to every candidate hypothesis set.
# Here the loop only wakes up when the abducible is assumed, so exactly
# one of the two candidates survives.
source = "abducible a/0.\np :- not p, a.\n"
theory = build_theory(parse_text(source, "guarded"))
from alp import SolveOptions, check_delta, solve

print()
print(source.strip())
print("check {}:      ", type(check_delta(theory, ())).__name__)
print("check {a}:     ", type(check_delta(theory, tuple(theory.universe))).__name__)
print("solve emits:   ", [[str(theory.atoms.atom(i)) for i in s] for s in solve(theory, SolveOptions()).solutions])
