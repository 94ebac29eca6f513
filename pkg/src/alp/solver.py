"""Abductive solver: enumerate hypothesis sets that satisfy a theory.

A solution is a set of universe atoms whose addition to the definition
layer yields a total well-founded model satisfying every constraint.
The search is a trail-based DPLL over the abducible candidates.  Unit
propagation runs on a clause database built from two sources:

  * every ground constraint, as the disjunction of its head verdicts
    and negated body literals, and
  * a supported-model (completion) encoding of the definition layer,
    with one auxiliary variable per multi-literal clause body.

Any two-valued well-founded model extends to a total assignment of this
database, so propagation and conflict pruning never lose a solution;
the converse does not hold in the presence of positive cycles, which is
why every surviving leaf is verified with the reference check before it
is emitted.  On acyclic definition layers, which cover the common case,
propagation alone decides every derived atom, and it also regresses
goals backwards through the rules, which is what makes the planning
workload tractable.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import wfs
from .ground import GroundConstraint, GroundTheory
from .syntax import (
    AbducibleDecl,
    Atom,
    Clause,
    Constraint,
    Declarations,
    IntConst,
    Pos,
    PredKind,
    Program,
    ProgramError,
    SolveError,
    SymConst,
    Var,
    classify_predicates,
    normalize,
)

# ---------------------------------------------------------------------------
# reference semantics: check one candidate


@dataclass(frozen=True)
class Sat:
    trace: wfs.FixpointTrace | None = field(default=None, compare=False)


@dataclass(frozen=True)
class UnsatConstraint:
    instance: GroundConstraint = field(compare=False)
    rendered: str = ""
    trace: wfs.FixpointTrace | None = field(default=None, compare=False)


@dataclass(frozen=True)
class NotTwoValued:
    atoms: tuple[int, ...]
    trace: wfs.FixpointTrace | None = field(default=None, compare=False)


CheckResult = Sat | UnsatConstraint | NotTwoValued


def check_delta(theory: GroundTheory, delta: Iterable[int]) -> CheckResult:
    """Decide one hypothesis set against the reference semantics.

    Computes the well-founded model of definitions plus delta, requires
    it to be total, and then tests every ground constraint.  The delta
    must stay inside universe plus forced atoms.
    """
    dset = set(delta)
    allowed = set(theory.universe) | set(theory.forced)
    stray = sorted(dset - allowed)
    if stray:
        names = ", ".join(theory.atoms.render(i) for i in stray[:5])
        raise SolveError(f"delta atoms outside the abducible universe: {names}")
    truth, trace = wfs.well_founded(
        [(c.head, c.pos, c.neg) for c in theory.clauses], dset, theory.n_atoms
    )
    two_valued, undef = wfs.is_two_valued(truth)
    if not two_valued:
        return NotTwoValued(tuple(undef), trace)
    TRUE = wfs.TRUE
    for gc in theory.constraints:
        body = all(truth[a] == TRUE for a in gc.pos) and not any(
            truth[a] == TRUE for a in gc.neg
        )
        if not body:
            continue
        if gc.heads and any((truth[a] == TRUE) == wanted for a, wanted in gc.heads):
            continue
        return UnsatConstraint(gc, theory.render_constraint(gc), trace)
    return Sat(trace)


def _violated_strict(theory: GroundTheory, truth: Sequence[int]) -> GroundConstraint | None:
    """First constraint whose body is definitely true and heads all
    definitely fail; used when undefined atoms are tolerated."""
    TRUE, FALSE = wfs.TRUE, wfs.FALSE
    for gc in theory.constraints:
        body = all(truth[a] == TRUE for a in gc.pos) and all(
            truth[a] == FALSE for a in gc.neg
        )
        if not body:
            continue
        ok = False
        for a, wanted in gc.heads:
            if (truth[a] == TRUE) if wanted else (truth[a] == FALSE):
                ok = True
                break
        if not ok:
            return gc
    return None


# ---------------------------------------------------------------------------
# options and reports


class BranchOrder(enum.Enum):
    """Child order at decisions: LEX_ASC tries the branch atom absent
    first, LEX_DESC present first.  Either way the emission order of
    solutions is a deterministic function of the theory."""

    LEX_ASC = "lex-asc"
    LEX_DESC = "lex-desc"


@dataclass
class SolveOptions:
    max_models: int | None = None  # None enumerates every solution
    minimal_only: bool = False
    require_two_valued: bool = True
    branch_order: BranchOrder = BranchOrder.LEX_ASC


@dataclass
class SolveStats:
    nodes: int = 0
    propagations: int = 0
    pruned: int = 0
    checks: int = 0
    models: int = 0
    wall_time: float = 0.0


@dataclass
class SolveReport:
    solutions: list[tuple[int, ...]]
    stats: SolveStats
    warnings: list[str] = field(default_factory=list)
    unsat_reason: str | None = None


# ---------------------------------------------------------------------------
# clause database


class _ClauseDb:
    """CNF over atom ids plus auxiliaries, with per-clause counters.

    Literal encoding: 2*v is "v true", 2*v+1 is "v false".  sat_count
    tracks disjuncts currently satisfied, unk_count disjuncts not yet
    falsified; both are reversible by plain decrements.
    """

    def __init__(self, theory: GroundTheory):
        self.theory = theory
        self.n_atoms = theory.n_atoms
        self.nvars = theory.n_atoms
        self.clauses: list[tuple[int, ...]] = []
        self.origins: list[tuple[str, int]] = []
        self.is_denial: list[bool] = []
        self._index: dict[tuple[int, ...], int] = {}

        candidates = list(theory.universe)
        in_universe = set(theory.universe)
        candidates += [i for i in theory.forced if i not in in_universe]
        self.branch_vars = sorted(candidates, key=lambda i: theory.atoms.atom(i).sort_key)
        self.is_candidate = bytearray(self.n_atoms)
        for v in self.branch_vars:
            self.is_candidate[v] = 1

        for ci, gc in enumerate(theory.constraints):
            lits = [2 * a + (0 if wanted else 1) for a, wanted in gc.heads]
            lits += [2 * a + 1 for a in gc.pos]
            lits += [2 * a for a in gc.neg]
            self._add(lits, ("constraint", ci), denial=not gc.heads)
        self._add_completion()

        self.occ: list[list[int]] = [[] for _ in range(2 * self.nvars)]
        for idx, cl in enumerate(self.clauses):
            for lit in cl:
                self.occ[lit].append(idx)

    def _new_aux(self) -> int:
        v = self.nvars
        self.nvars += 1
        return v

    def _add(self, lits: list[int], origin: tuple[str, int], denial: bool = False):
        uniq = set(lits)
        key = tuple(sorted(uniq))
        for lit in key:
            if lit ^ 1 in uniq:
                return  # tautology
        prev = self._index.get(key)
        if prev is not None:
            self.is_denial[prev] = self.is_denial[prev] or denial
            return
        self._index[key] = len(self.clauses)
        self.clauses.append(key)
        self.origins.append(origin)
        self.is_denial.append(denial)

    def _add_completion(self):
        bodies_by_head: dict[int, list[tuple[tuple[int, ...], tuple[int, ...]]]] = {}
        order: list[int] = []
        for gc in self.theory.clauses:
            if gc.head not in bodies_by_head:
                bodies_by_head[gc.head] = []
                order.append(gc.head)
            entry = (gc.pos, gc.neg)
            if entry not in bodies_by_head[gc.head]:
                bodies_by_head[gc.head].append(entry)
        for head in order:
            bodies = bodies_by_head[head]
            if any(not pos and not neg for pos, neg in bodies):
                self._add([2 * head], ("completion", head))
                continue
            support = [2 * head + 1]
            for pos, neg in bodies:
                lits = [2 * a for a in pos] + [2 * a + 1 for a in neg]
                if len(lits) == 1:
                    dj = lits[0]
                else:
                    aux = self._new_aux()
                    dj = 2 * aux
                    for lit in lits:
                        self._add([dj ^ 1, lit], ("completion", head))
                    self._add([dj] + [lit ^ 1 for lit in lits], ("completion", head))
                self._add([dj ^ 1, 2 * head], ("completion", head))
                support.append(dj)
            self._add(support, ("completion", head))
        # Atoms that are neither derivable nor assumable are simply false.
        for a in range(self.n_atoms):
            if a not in bodies_by_head and not self.is_candidate[a]:
                self._add([2 * a + 1], ("completion", a))

    def describe_origin(self, idx: int) -> str:
        kind, ref = self.origins[idx]
        if kind == "constraint":
            return self.theory.render_constraint(self.theory.constraints[ref])
        return f"definition of {self.theory.atoms.render(ref)}"


# ---------------------------------------------------------------------------
# the search engine


class _Search:
    def __init__(self, theory: GroundTheory, options: SolveOptions, stats: SolveStats):
        self.theory = theory
        self.options = options
        self.stats = stats
        self.db = _ClauseDb(theory)
        n = self.db.nvars
        self.status = [-1] * n
        self.sat_count = [0] * len(self.db.clauses)
        self.unk_count = [len(cl) for cl in self.db.clauses]
        self.trail: list[int] = []
        self.score = [0] * n
        for idx, cl in enumerate(self.db.clauses):
            if self.db.is_denial[idx]:
                for lit in cl:
                    v = lit >> 1
                    if v < self.db.n_atoms and self.db.is_candidate[v]:
                        self.score[v] += 1
        self.solutions: list[tuple[int, ...]] = []
        self.conflict_origin: str | None = None

    # -- assignment machinery -------------------------------------------

    def _apply(self, var: int, val: int) -> int | None:
        """Set one variable and update counters; returns a conflicting
        clause index if some clause just lost its last disjunct."""
        db = self.db
        self.status[var] = val
        self.trail.append(var)
        tlit = 2 * var + (0 if val else 1)
        occ = db.occ
        sat_count = self.sat_count
        unk_count = self.unk_count
        for ci in occ[tlit]:
            was = sat_count[ci]
            sat_count[ci] = was + 1
            if was == 0 and db.is_denial[ci]:
                for lit in db.clauses[ci]:
                    v = lit >> 1
                    if v < db.n_atoms and db.is_candidate[v]:
                        self.score[v] -= 1
        conflict = None
        for ci in occ[tlit ^ 1]:
            unk_count[ci] -= 1
            if conflict is None and sat_count[ci] == 0 and unk_count[ci] == 0:
                conflict = ci
        return conflict

    def _unapply(self, var: int):
        db = self.db
        val = self.status[var]
        tlit = 2 * var + (0 if val else 1)
        for ci in db.occ[tlit]:
            now = self.sat_count[ci] - 1
            self.sat_count[ci] = now
            if now == 0 and db.is_denial[ci]:
                for lit in db.clauses[ci]:
                    v = lit >> 1
                    if v < db.n_atoms and db.is_candidate[v]:
                        self.score[v] += 1
        for ci in db.occ[tlit ^ 1]:
            self.unk_count[ci] += 1
        self.status[var] = -1

    def undo_to(self, mark: int):
        while len(self.trail) > mark:
            self._unapply(self.trail.pop())

    def propagate(self, var: int, val: int) -> int | None:
        """Assign and run unit propagation to fixpoint; on conflict the
        offending clause index comes back and the caller unwinds."""
        conflict = self._apply(var, val)
        if conflict is not None:
            return conflict
        db = self.db
        status = self.status
        qi = len(self.trail) - 1
        while qi < len(self.trail):
            v = self.trail[qi]
            qi += 1
            flit = 2 * v + (1 if status[v] else 0)
            for ci in db.occ[flit]:
                if self.sat_count[ci] != 0 or self.unk_count[ci] != 1:
                    continue
                unit = None
                for lit in db.clauses[ci]:
                    if status[lit >> 1] == -1:
                        unit = lit
                        break
                if unit is None:  # pragma: no cover - counters keep this exact
                    continue
                self.stats.propagations += 1
                conflict = self._apply(unit >> 1, 0 if unit & 1 else 1)
                if conflict is not None:
                    return conflict
        return None

    def propagate_pending(self) -> int | None:
        """Initial propagation: fire all unit and empty clauses."""
        for ci, cl in enumerate(self.db.clauses):
            if self.sat_count[ci] != 0:
                continue
            if self.unk_count[ci] == 0:
                return ci
            if self.unk_count[ci] == 1:
                unit = None
                for lit in cl:
                    if self.status[lit >> 1] == -1:
                        unit = lit
                        break
                if unit is None:
                    continue
                self.stats.propagations += 1
                conflict = self.propagate(unit >> 1, 0 if unit & 1 else 1)
                if conflict is not None:
                    return conflict
        return None

    # -- branching --------------------------------------------------------

    def pick(self) -> int | None:
        best = None
        best_score = -1
        status = self.status
        score = self.score
        for v in self.db.branch_vars:
            if status[v] == -1 and score[v] > best_score:
                best = v
                best_score = score[v]
        return best

    def run(self) -> bool:
        """DFS; returns False when the model cap stopped the search."""
        var = self.pick()
        if var is None:
            return self._leaf()
        first = 0 if self.options.branch_order is BranchOrder.LEX_ASC else 1
        for val in (first, 1 - first):
            self.stats.nodes += 1
            mark = len(self.trail)
            conflict = self.propagate(var, val)
            if conflict is None:
                more = self.run()
                self.undo_to(mark)
                if not more:
                    return False
            else:
                self.stats.pruned += 1
                self.undo_to(mark)
        return True

    def _leaf(self) -> bool:
        delta = tuple(v for v in self.db.branch_vars if self.status[v] == 1)
        self.stats.checks += 1
        result = check_delta(self.theory, delta)
        accept = isinstance(result, Sat)
        if (
            not accept
            and not self.options.require_two_valued
            and isinstance(result, NotTwoValued)
        ):
            truth, _ = wfs.well_founded(
                [(c.head, c.pos, c.neg) for c in self.theory.clauses],
                set(delta),
                self.theory.n_atoms,
            )
            accept = _violated_strict(self.theory, truth) is None
        if accept:
            self.solutions.append(delta)
            self.stats.models += 1
            cap = self.options.max_models
            if cap is not None and self.stats.models >= cap:
                return False
        return True


# ---------------------------------------------------------------------------
# stratification warning


def _stratification_warning(theory: GroundTheory) -> str | None:
    """Detect negative dependencies inside a strongly connected component
    of the ground definition layer."""
    adj: dict[int, list[tuple[int, bool]]] = {}
    for gc in theory.clauses:
        edges = adj.setdefault(gc.head, [])
        edges.extend((b, False) for b in gc.pos)
        edges.extend((b, True) for b in gc.neg)
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    comp: dict[int, int] = {}
    counter = [0]
    comps = [0]
    stack: list[int] = []
    on_stack: set[int] = set()

    def strongconnect(root: int):
        work = [(root, iter(adj.get(root, ())))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w, _negedge in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                cid = comps[0]
                comps[0] += 1
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp[w] = cid
                    if w == v:
                        break

    for v in adj:
        if v not in index:
            strongconnect(v)
    for gc in theory.clauses:
        for b in gc.neg:
            if comp.get(gc.head) is not None and comp.get(gc.head) == comp.get(b):
                return (
                    "definition layer is not stratified "
                    f"(negative loop through {theory.atoms.render(gc.head)}); "
                    "leaf checks fall back to full well-founded evaluation"
                )
    return None


# ---------------------------------------------------------------------------
# public entry points


def solve(theory: GroundTheory, options: SolveOptions | None = None) -> SolveReport:
    """Enumerate admissible hypothesis sets in deterministic order.

    Every emitted solution has been re-verified against check_delta, so
    the report is sound by construction; completeness comes from the
    propagation clauses being satisfied by every solution's model.
    """
    options = options or SolveOptions()
    stats = SolveStats()
    t0 = time.perf_counter()
    search = _Search(theory, options, stats)
    report = SolveReport([], stats)
    warning = _stratification_warning(theory)
    if warning:
        report.warnings.append(warning)
    conflict = search.propagate_pending()
    if conflict is not None:
        report.unsat_reason = (
            "constraints are contradictory before any hypothesis: "
            + search.db.describe_origin(conflict)
        )
        stats.wall_time = time.perf_counter() - t0
        return report
    search.run()
    solutions = search.solutions
    if options.minimal_only:
        sets = [frozenset(s) for s in solutions]
        solutions = [
            s
            for i, s in enumerate(solutions)
            if not any(j != i and sets[j] < sets[i] for j in range(len(sets)))
        ]
    report.solutions = solutions
    stats.wall_time = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# query translation


def _fresh_name(base: str, used: set[str]) -> str:
    if base not in used:
        return base
    i = 1
    while f"{base}{i}" in used:
        i += 1
    return f"{base}{i}"


def translate_query(query: Sequence[Atom], program: Program) -> Program:
    """Reduce query answering to solving.

    Adds a fresh abducible marker x over the query's variables, the
    denial ``false <- Q1,...,Qm, x(V1,...,Vk)``, and a forcing constraint
    through a fresh defined predicate that requires the query to hold,
    so the solutions of the translated program are exactly the original
    solutions in which the query is true.  An empty query returns the
    program unchanged.
    """
    if not query:
        return program
    normalized = normalize(program)
    kinds = classify_predicates(normalized)
    used = {name for name, _arity in kinds}
    used |= {c.name for c in program.decls.constants}
    used |= {d.name for d in program.decls.domains}

    seen_vars: list[str] = []
    for atom in query:
        if atom.key not in kinds or kinds[atom.key] is PredKind.BUILTIN:
            raise ProgramError(
                f"query atom {atom} is not a defined or abducible predicate"
            )
        for arg in atom.args:
            if isinstance(arg, Var):
                if arg.name not in seen_vars:
                    seen_vars.append(arg.name)
            elif not isinstance(arg, (IntConst, SymConst)):
                raise ProgramError(f"query arguments must be constants or variables: {atom}")

    from .ground import _typing_positions  # typing mirrors universe extraction

    domain_names: dict[str, str] = {}
    typing_preds: dict[str, list[str]] = {}
    decl_by_pred = {d.pred: d for d in program.decls.abducibles}
    for atom in query:
        for i, arg in enumerate(atom.args):
            if not isinstance(arg, Var):
                continue
            decl = decl_by_pred.get(atom.pred)
            if decl is not None and decl.arg_domains is not None:
                domain_names.setdefault(arg.name, decl.arg_domains[i])
                continue
            for d in _typing_positions(normalized, atom.pred, atom.arity).get(i, ()):
                typing_preds.setdefault(arg.name, [])
                if d not in typing_preds[arg.name]:
                    typing_preds[arg.name].append(d)

    for v in seen_vars:
        if v not in domain_names and v not in typing_preds:
            raise ProgramError(f"cannot infer a domain for query variable {v}")
        if v in domain_names and v in typing_preds:
            raise ProgramError(
                f"query variable {v} mixes declared domains with typing constraints"
            )
    use_domains = bool(seen_vars) and all(v in domain_names for v in seen_vars)
    if seen_vars and not use_domains and any(v in domain_names for v in seen_vars):
        raise ProgramError("query variables mix declared domains with typing constraints")

    x_name = _fresh_name("x", used)
    used.add(x_name)
    holds_name = _fresh_name("query_holds", used)

    var_terms = tuple(Var(v) for v in seen_vars)
    x_atom = Atom(x_name, var_terms)
    query_lits = tuple(Pos(a) for a in query)

    x_decl = AbducibleDecl(
        x_name,
        len(seen_vars),
        tuple(domain_names[v] for v in seen_vars) if use_domains else None,
    )
    new_definitions = (Clause(Atom(holds_name, ()), query_lits),)
    new_constraints = [Constraint((), query_lits + (Pos(x_atom),))]
    if seen_vars and not use_domains:
        for v in seen_vars:
            for d in typing_preds[v]:
                new_constraints.append(
                    Constraint((Pos(Atom(d, (Var(v),))),), (Pos(x_atom),))
                )
    if seen_vars:
        new_constraints.append(Constraint((), (Pos(x_atom),)))
    new_constraints.append(Constraint((Pos(Atom(holds_name, ())),), ()))

    decls = Declarations(
        program.decls.abducibles + (x_decl,),
        program.decls.constants,
        program.decls.domains,
    )
    return Program(
        decls,
        program.definitions + new_definitions,
        program.constraints + tuple(new_constraints),
    )
