"""Independent reference oracles for testing the engine.

Everything in this module is deliberately written from the problem
statements themselves, not from the engine: queens by permutation
enumeration, planning by direct state simulation, and the well-founded
model by the textbook operator with the greatest unfounded set found
through subset enumeration.  None of it shares evaluation code with the
parser, grounder, or solver, so agreement between the two sides is
meaningful evidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Mapping, Sequence

# Truth encoding shared by convention with the engine: 0 false, 1
# undefined, 2 true.
FALSE = 0
UNDEF = 1
TRUE = 2

_WFS_BRUTE_MAX_ATOMS = 12


# ---------------------------------------------------------------------------
# n-queens


def queens_brute(n: int) -> tuple[int, list[tuple[int, ...]]]:
    """All n-queens solutions as column tuples indexed by row, in
    lexicographic order, plus their count."""
    solutions = []
    for perm in permutations(range(1, n + 1)):
        ok = True
        for r1 in range(n):
            for r2 in range(r1 + 1, n):
                if abs(perm[r1] - perm[r2]) == r2 - r1:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            solutions.append(perm)
    return len(solutions), solutions


def queens_check(n: int, facts: Iterable[tuple[int, int]]) -> bool:
    """Whether a set of (row, column) placements is a valid n-queens
    solution: one queen per row, all within the board, none attacking."""
    placed: dict[int, int] = {}
    for r, c in facts:
        if not (1 <= r <= n and 1 <= c <= n):
            return False
        if r in placed and placed[r] != c:
            return False
        placed[r] = c
    if len(placed) != n:
        return False
    rows = sorted(placed)
    for i, r1 in enumerate(rows):
        for r2 in rows[i + 1 :]:
            c1, c2 = placed[r1], placed[r2]
            if c1 == c2 or abs(c1 - c2) == r2 - r1:
                return False
    return True


# ---------------------------------------------------------------------------
# blocks-world plan simulation

Location = int | str  # a block number or "table"
BoardConfig = dict[int, Location]  # block -> what it rests on


@dataclass(frozen=True)
class Violation:
    time: int
    rule: str
    detail: str

    def __str__(self) -> str:
        return f"violation at t={self.time} [{self.rule}]: {self.detail}"


def board_violation(config: Mapping[int, Location]) -> str | None:
    """Structural fault in a board state, or None if it is well formed.

    A state is well formed when no block carries two blocks and no block
    supports itself directly or through a chain.
    """
    carried: dict[Location, int] = {}
    for b, loc in sorted(config.items()):
        if isinstance(loc, int) and loc in carried:
            return f"blocks {carried[loc]} and {b} are both on block {loc}"
        carried[loc] = b
    for b in sorted(config):
        seen = {b}
        loc = config[b]
        while isinstance(loc, int):
            if loc in seen:
                return f"block {b} transitively supports itself"
            seen.add(loc)
            loc = config.get(loc, "table")
    return None


def simulate_plan(
    initial: Mapping[int, Location],
    moves: Iterable[tuple[int, Location, int]],
    horizon: int,
) -> BoardConfig | Violation:
    """Execute move(block, target, time) steps against a board state.

    Rules checked before each step: a moved block must be clear, a block
    target must not itself be moving, no block goes to two targets, and
    at most two moves (two grippers) share a step.  After each step no
    block may carry two blocks.  Returns the final configuration, or the
    first Violation.
    """
    fault = board_violation(initial)
    if fault is not None:
        return Violation(0, "bad-state", fault)
    by_time: dict[int, list[tuple[int, Location]]] = {}
    for b, loc, t in moves:
        by_time.setdefault(t, []).append((b, loc))
    current: BoardConfig = dict(initial)
    for t in range(horizon):
        # keys sort ints before symbols so mixed targets stay orderable
        step = sorted(by_time.get(t, ()), key=lambda m: (m[0], isinstance(m[1], str), m[1]))
        targets: dict[int, Location] = {}
        for b, loc in step:
            if b in targets and targets[b] != loc:
                return Violation(t, "two-targets", f"block {b} moved to {targets[b]} and {loc}")
            targets[b] = loc
        if len(targets) > 2:
            return Violation(t, "gripper-capacity", f"{len(targets)} moves in one step")
        occupied = {loc for loc in current.values() if isinstance(loc, int)}
        for b, loc in sorted(targets.items()):
            if b in occupied:
                return Violation(t, "clear", f"block {b} is moved while another block is on it")
            if isinstance(loc, int) and loc in targets:
                return Violation(t, "moving-target", f"block {b} is moved onto moving block {loc}")
        for b, loc in targets.items():
            current[b] = loc
        fault = board_violation(current)
        if fault is not None:
            return Violation(t + 1, "two-on-block", fault)
    return current


# ---------------------------------------------------------------------------
# well-founded model, by definition


def _is_unfounded(
    subset: set[int],
    by_head: Mapping[int, list[tuple[tuple[int, ...], tuple[int, ...]]]],
    true_set: set[int],
    false_set: set[int],
) -> bool:
    """Unfounded set test: every clause for every member is defused either
    by a positive body atom inside the subset or by a body literal already
    false in the partial interpretation."""
    for a in subset:
        for pos, neg in by_head.get(a, ()):
            defused = (
                any(p in subset for p in pos)
                or any(p in false_set for p in pos)
                or any(nn in true_set for nn in neg)
            )
            if not defused:
                return False
    return True


def wfs_brute(clauses: Sequence[tuple], n_atoms: int) -> list[int]:
    """Well-founded model of a ground normal program, computed literally.

    Alternates immediate consequences with the greatest unfounded set,
    where the latter is found as the union of all unfounded subsets of
    the not-yet-false atoms.  Exponential by design; refuses more than
    12 atoms.
    """
    if n_atoms > _WFS_BRUTE_MAX_ATOMS:
        raise ValueError(f"wfs_brute handles at most {_WFS_BRUTE_MAX_ATOMS} atoms, got {n_atoms}")
    by_head: dict[int, list[tuple[tuple[int, ...], tuple[int, ...]]]] = {}
    for h, pos, neg in clauses:
        by_head.setdefault(h, []).append((tuple(pos), tuple(neg)))
    true_set: set[int] = set()
    false_set: set[int] = set()
    while True:
        derived = set(true_set)
        for h, pos, neg in clauses:
            if all(p in true_set for p in pos) and all(nn in false_set for nn in neg):
                derived.add(h)
        candidates = [a for a in range(n_atoms) if a not in false_set]
        unfounded = set(false_set)
        for mask in range(1 << len(candidates)):
            subset = {candidates[i] for i in range(len(candidates)) if mask >> i & 1}
            if subset and _is_unfounded(subset, by_head, true_set, false_set):
                unfounded |= subset
        if derived == true_set and unfounded == false_set:
            break
        true_set, false_set = derived, unfounded
    truth = [UNDEF] * n_atoms
    for a in true_set:
        truth[a] = TRUE
    for a in false_set:
        truth[a] = FALSE
    return truth
