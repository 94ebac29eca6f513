"""
Planning without a planner
==========================

The blocks-world program describes physics, not strategy: moving a block
puts it somewhere at the next step, a fact persists until something
terminates it, a covered block cannot move, two grippers work per step.
The goal configuration is stated as constraints on time 3.  Asking for
hypothesis sets over move/3 and initially_on/2 is then already planning.
"""

import importlib.resources

from alp import SolveOptions, build_theory, parse_text, solve
from alp.oracles import simulate_plan

source = (importlib.resources.files("alp") / "programs" / "blocks.alp").read_text()
program = parse_text(source, "blocks.alp")
theory = build_theory(program)
print(f"candidate facts: {len(theory.universe)}, forced by the initial state: {len(theory.forced)}")

report = solve(theory, SolveOptions())
print(f"solutions: {len(report.solutions)}")

# Every solution carries the same six moves; the count above 1 comes from
# initially_on/2 being assumable too, so the solver is free to posit
# redundant "block already on the table" facts that change nothing.
plans = set()
for sol in report.solutions:
    atoms = [theory.atoms.atom(i) for i in sol]
    plans.add(frozenset(a.args for a in atoms if a.pred == "move"))
print(f"distinct move sequences: {len(plans)}")

(plan,) = plans
for b, target, t in sorted(plan, key=lambda m: (m[2], m[0])):
    print(f"  t={t}: move block {b} onto {target}")

# An independent simulator executes the moves step by step, enforcing the
# gripper and clearance rules, and reports the final configuration.
initial = {1: 2, 2: "table", 3: 4, 4: "table", 5: 6, 6: "table"}
final = simulate_plan(initial, plan, horizon=3)
print("\nafter running the plan:")
for block in sorted(final):
    print(f"  on({block},{final[block]})")

# Sabotage: move block 2 while block 1 still sits on it.
broken = {(2, 1, 0)} | {m for m in plan if m[2] > 0}
print("\nillegal variant:", simulate_plan(initial, broken, horizon=3))
