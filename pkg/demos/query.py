"""
Queries as constraints
======================

There is no query evaluator in this package, and none is needed.  Asking
"which solutions satisfy Q" compiles into the same machinery that
already runs: a rule making the query mandatory, plus a fresh assumable
marker and a denial wiring the marker to the query.  Solving the
extended program yields exactly the solutions of the original one in
which Q holds.
"""

import importlib.resources

from alp import (
    Atom,
    IntConst,
    SolveOptions,
    Var,
    apply_const_overrides,
    build_theory,
    parse_text,
    pretty_print,
    solve,
    translate_query,
)

source = (importlib.resources.files("alp") / "programs" / "queens.alp").read_text()
program = apply_const_overrides(parse_text(source, "queens.alp"), {"size": 6})


def count(prog):
    return len(solve(build_theory(prog), SolveOptions()).solutions)


def show_tail(prog, lines):
    print()
    print("\n".join(pretty_print(prog).strip().splitlines()[-lines:]))
    print()


# Unfiltered: the 6x6 board has four placements.
print(f"all solutions: {count(program)}")

# Ask for boards with a queen at row 1, column 2.  The translation is
# ordinary source text; print the tail of the program to see what was
# appended.
asked = translate_query([Atom("position", (IntConst(1), IntConst(2)))], program)
show_tail(asked, 4)
print(f"with position(1,2): {count(asked)}")

# A query with variables gets a marker of matching arity, and the marker
# inherits the variables' types.  D appears in both argument positions,
# so it is typed as a row and as a column.  The answer is a small fact
# about the puzzle: no 6x6 placement touches the main diagonal.
asked = translate_query([Atom("position", (Var("D"), Var("D")))], program)
show_tail(asked, 6)
print(f"with a queen on the main diagonal: {count(asked)}")

# Richer conditions are expressed the way any derived notion is: define
# a predicate for the condition, then query it.  "The queens of rows 1
# and 2 stand two columns apart":
stepped = source + "\nstepped :- position(1,C), position(2,D), abs(D - C) = 2.\n"
program = apply_const_overrides(parse_text(stepped, "queens+step.alp"), {"size": 6})
asked = translate_query([Atom("stepped", ())], program)

theory = build_theory(asked)
report = solve(theory, SolveOptions())
print(f"with a two-column step from row 1 to row 2: {len(report.solutions)}")
for sol in report.solutions:
    facts = sorted(theory.atoms.atom(i).args for i in sol)
    print(" ", " ".join(f"({r},{c})" for r, c in facts))
