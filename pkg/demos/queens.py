"""
Board search from three rules
=============================

The n-queens program bundled with the package says nothing about how to
search.  It declares position/2 as assumable, demands one queen per row,
and forbids shared columns and diagonals.  Everything printed below is
the solver filling in the rest.
"""

import importlib.resources

from alp import SolveOptions, apply_const_overrides, build_theory, parse_text, solve

source = (importlib.resources.files("alp") / "programs" / "queens.alp").read_text()
print(source)

# The file fixes size == 8, but the constant is just a declaration and
# can be rewritten, the same rewrite the command line does for -c size=n.
program = parse_text(source, "queens.alp")

for n in (4, 5, 6):
    sized = apply_const_overrides(program, {"size": n})
    theory = build_theory(sized)
    report = solve(theory, SolveOptions())
    print(f"{n} x {n} board: {len(report.solutions)} placements")

# Draw the first 6x6 solution.  A solution is a tuple of atom ids; the
# theory's atom table turns ids back into position(row, column) facts.
theory = build_theory(apply_const_overrides(program, {"size": 6}))
report = solve(theory, SolveOptions())
first = report.solutions[0]
board = dict(theory.atoms.atom(i).args for i in first)
print()
for row in range(1, 7):
    print(" ".join("Q" if board[row] == col else "." for col in range(1, 7)))
print()

# The same engine answers "is this placement admissible" directly:
# check_delta evaluates one hypothesis set without any search.
from alp import GroundAtom, check_delta


def placement(config):
    return [theory.atoms.get(GroundAtom("position", (r, c))) for r, c in config.items()]


print("known solution:", type(check_delta(theory, placement(board))).__name__)

# Shift one queen onto a neighboring column and the verdict names the
# first rule instance the placement breaks.
board[1] = board[2]
verdict = check_delta(theory, placement(board))
print("clashing columns:", verdict.rendered)
