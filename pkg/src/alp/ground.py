"""Grounding: from programs with variables to finite propositional theories.

The grounder works against the possible-extension overestimate: starting
from the abducible candidate universe and the abducible-independent base
definitions, it closes the definition layer under rule application, so a
ground atom is instantiated exactly when some hypothesis set could make
it true.  Builtins are evaluated away during instantiation; negative
literals never bind variables and are grounded after the positive part.

Head arithmetic such as ``on(B,L,T+1)`` can chain without bound, so the
closure clips derivation at the integer hull: the interval spanned by
every integer literal in the program, its declarations, and the
universe.  A derived head atom with an integer argument outside the hull
is interned together with its clause but is not fed back as a body
candidate.  Atoms beyond the hull can never reach a constraint, because
constraints are instantiated from in-hull candidates only, so the
truncation does not change which hypothesis sets are admissible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import wfs
from .syntax import (
    INT_MAX,
    INT_MIN,
    ArithExpr,
    Atom,
    Builtin,
    Clause,
    Constraint,
    Declarations,
    Diagnostic,
    GroundError,
    IntConst,
    Literal,
    Neg,
    Pos,
    PredKind,
    Program,
    Range,
    SourceSpan,
    SymConst,
    Term,
    Var,
    classify_predicates,
    normalize,
    term_variables,
)

Value = int | str

_DOMAIN_CAP = 1_000_000
_ATOM_CAP = 2_000_000


def value_key(v: Value):
    """Sort key for domain elements: integers first, then symbols."""
    if isinstance(v, int):
        return (0, v, "")
    return (1, 0, v)


def render_value(v: Value) -> str:
    return str(v)


# ---------------------------------------------------------------------------
# ground atoms and theories


@dataclass(frozen=True)
class GroundAtom:
    pred: str
    args: tuple[Value, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(render_value(a) for a in self.args)})"

    @property
    def sort_key(self):
        return (self.pred, len(self.args), tuple(value_key(a) for a in self.args))


class AtomTable:
    """Interning table mapping ground atoms to dense integer ids."""

    def __init__(self):
        self._ids: dict[GroundAtom, int] = {}
        self._atoms: list[GroundAtom] = []

    def intern(self, atom: GroundAtom) -> int:
        i = self._ids.get(atom)
        if i is None:
            i = len(self._atoms)
            self._ids[atom] = i
            self._atoms.append(atom)
        return i

    def get(self, atom: GroundAtom) -> int | None:
        return self._ids.get(atom)

    def atom(self, i: int) -> GroundAtom:
        return self._atoms[i]

    def render(self, i: int) -> str:
        return str(self._atoms[i])

    def __len__(self) -> int:
        return len(self._atoms)

    def __iter__(self):
        return iter(self._atoms)


@dataclass(frozen=True)
class GroundClause:
    head: int
    pos: tuple[int, ...] = ()
    neg: tuple[int, ...] = ()


@dataclass(frozen=True)
class GroundConstraint:
    """Ground integrity constraint.

    heads holds (atom id, wanted) disjuncts: wanted True means the
    constraint is satisfied when the atom is true, False when it is
    false (a negative head literal).  Builtin heads were folded away
    during grounding.  origin indexes the source constraint.
    """

    heads: tuple[tuple[int, bool], ...]
    pos: tuple[int, ...] = ()
    neg: tuple[int, ...] = ()
    origin: int = -1


@dataclass
class GroundTheory:
    atoms: AtomTable
    clauses: list[GroundClause]
    constraints: list[GroundConstraint]
    universe: tuple[int, ...]
    forced: tuple[int, ...]

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    def render_clause(self, gc: GroundClause) -> str:
        head = self.atoms.render(gc.head)
        if not gc.pos and not gc.neg:
            return f"{head}."
        body = [self.atoms.render(a) for a in gc.pos]
        body += [f"not {self.atoms.render(a)}" for a in gc.neg]
        return f"{head} :- {', '.join(body)}."

    def render_constraint(self, gc: GroundConstraint) -> str:
        if gc.heads:
            heads = " ; ".join(
                self.atoms.render(a) if wanted else f"not {self.atoms.render(a)}"
                for a, wanted in gc.heads
            )
        else:
            heads = "false"
        body = [self.atoms.render(a) for a in gc.pos]
        body += [f"not {self.atoms.render(a)}" for a in gc.neg]
        return f"{heads} <- {', '.join(body) if body else 'true'}."

    def render_delta(self, delta) -> list[str]:
        ranked = sorted(delta, key=lambda i: self.atoms.atom(i).sort_key)
        return [f"{self.atoms.render(i)}." for i in ranked]

    def dump(self) -> str:
        """Deterministic text form of the whole theory."""
        out = [
            f"% atoms={self.n_atoms} clauses={len(self.clauses)} "
            f"constraints={len(self.constraints)} universe={len(self.universe)} "
            f"forced={len(self.forced)}"
        ]
        out.append(f"% universe ({len(self.universe)})")
        out.extend(f"{self.atoms.render(i)}." for i in self.universe)
        out.append(f"% forced ({len(self.forced)})")
        out.extend(f"{self.atoms.render(i)}." for i in self.forced)
        out.append(f"% clauses ({len(self.clauses)})")
        out.extend(self.render_clause(c) for c in self.clauses)
        out.append(f"% constraints ({len(self.constraints)})")
        out.extend(self.render_constraint(c) for c in self.constraints)
        return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# declarations


@dataclass
class DomainTable:
    constants: dict[str, int] = field(default_factory=dict)
    domains: dict[str, tuple[int, ...]] = field(default_factory=dict)


def _eval_const_expr(t: Term, env: dict[str, Term], memo: dict[str, int], visiting: set[str], span) -> int:
    if isinstance(t, IntConst):
        return t.value
    if isinstance(t, SymConst):
        name = t.name
        if name in memo:
            return memo[name]
        if name not in env:
            raise GroundError(f"unknown constant {name}", [Diagnostic(t.span or span, f"unknown constant {name}")])
        if name in visiting:
            raise GroundError(
                f"cyclic constant definition involving {name}",
                [Diagnostic(t.span or span, f"cyclic constant definition involving {name}")],
            )
        visiting.add(name)
        val = _eval_const_expr(env[name], env, memo, visiting, span)
        visiting.discard(name)
        memo[name] = val
        return val
    if isinstance(t, ArithExpr):
        vals = [_eval_const_expr(a, env, memo, visiting, span) for a in t.args]
        return _apply_arith(t.op, vals, t.span or span)
    raise GroundError(
        "variables are not allowed in constant expressions",
        [Diagnostic(getattr(t, "span", None) or span, "variables are not allowed in constant expressions")],
    )


def _apply_arith(op: str, vals: list[int], span) -> int:
    if op == "abs":
        out = abs(vals[0])
    elif op == "+":
        out = vals[0] + vals[1]
    elif op == "-":
        out = vals[0] - vals[1]
    elif op == "*":
        out = vals[0] * vals[1]
    else:
        raise GroundError(f"unknown arithmetic operator {op}")
    if out < INT_MIN or out > INT_MAX:
        raise GroundError(
            "integer overflow in arithmetic",
            [Diagnostic(span, "integer overflow in arithmetic")],
        )
    return out


def eval_declarations(decls: Declarations) -> DomainTable:
    """Evaluate constant and domain declarations to concrete values.

    Constants may reference each other in any order; cycles, unknown
    names, and empty domains (low above high) are errors.
    """
    env: dict[str, Term] = {}
    table = DomainTable()
    for c in decls.constants:
        if c.name in env:
            raise GroundError(
                f"duplicate constant {c.name}", [Diagnostic(c.span, f"duplicate constant {c.name}")]
            )
        env[c.name] = c.expr
    memo: dict[str, int] = {}
    for c in decls.constants:
        table.constants[c.name] = _eval_const_expr(SymConst(c.name), env, memo, set(), c.span)
    for d in decls.domains:
        if d.name in table.domains:
            raise GroundError(
                f"duplicate domain {d.name}", [Diagnostic(d.span, f"duplicate domain {d.name}")]
            )
        lo = _eval_const_expr(d.lo, env, memo, set(), d.span)
        hi = _eval_const_expr(d.hi, env, memo, set(), d.span)
        if lo > hi:
            raise GroundError(
                f"empty domain {d.name}: {lo}..{hi}",
                [Diagnostic(d.span, f"empty domain {d.name}: {lo}..{hi}")],
            )
        if hi - lo + 1 > _DOMAIN_CAP:
            raise GroundError(
                f"domain {d.name} exceeds {_DOMAIN_CAP} values",
                [Diagnostic(d.span, f"domain {d.name} exceeds {_DOMAIN_CAP} values")],
            )
        table.domains[d.name] = tuple(range(lo, hi + 1))
    return table


# ---------------------------------------------------------------------------
# term and builtin evaluation


class _Unbound(Exception):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name


def _eval_value(t: Term, binding: dict[str, Value], constants: dict[str, int]) -> Value:
    """Evaluate a term to a domain value.

    A bare symbol denotes itself; inside arithmetic, a symbol must name a
    declared constant.
    """
    if isinstance(t, Var):
        if t.name not in binding:
            raise _Unbound(t.name)
        return binding[t.name]
    if isinstance(t, IntConst):
        return t.value
    if isinstance(t, SymConst):
        return t.name
    return _eval_int(t, binding, constants)


def _eval_int(t: Term, binding: dict[str, Value], constants: dict[str, int]) -> int:
    if isinstance(t, Var):
        if t.name not in binding:
            raise _Unbound(t.name)
        v = binding[t.name]
        if not isinstance(v, int):
            raise GroundError(
                f"type error: symbol {v} used in arithmetic",
                [Diagnostic(t.span, f"type error: symbol {v} used in arithmetic")],
            )
        return v
    if isinstance(t, IntConst):
        return t.value
    if isinstance(t, SymConst):
        if t.name in constants:
            return constants[t.name]
        raise GroundError(
            f"type error: symbol {t.name} used in arithmetic",
            [Diagnostic(t.span, f"type error: symbol {t.name} used in arithmetic")],
        )
    vals = [_eval_int(a, binding, constants) for a in t.args]
    return _apply_arith(t.op, vals, t.span)


def eval_builtin(
    lit: Builtin, binding: dict[str, Value], constants: dict[str, int] | None = None
) -> bool | list[dict[str, Value]]:
    """Evaluate a builtin literal under a variable binding.

    Test mode returns True or False.  Generator mode returns the list of
    extended bindings: ``X in L..H`` with X unbound yields one binding
    per integer in the interval, and ``X = expr`` with X unbound and expr
    ground yields a single binding.  An unbound variable anywhere else is
    an insufficiently-instantiated error, as is an ordering comparison on
    symbols.
    """
    constants = constants or {}
    op = lit.op
    try:
        if op == "in":
            rng = lit.rhs
            assert isinstance(rng, Range)
            if isinstance(lit.lhs, Var) and lit.lhs.name not in binding:
                lo = _eval_int(rng.lo, binding, constants)
                hi = _eval_int(rng.hi, binding, constants)
                if hi - lo + 1 > _DOMAIN_CAP:
                    raise GroundError(f"interval {lo}..{hi} exceeds {_DOMAIN_CAP} values")
                name = lit.lhs.name
                return [dict(binding, **{name: v}) for v in range(lo, hi + 1)]
            v = _eval_value(lit.lhs, binding, constants)
            lo = _eval_int(rng.lo, binding, constants)
            hi = _eval_int(rng.hi, binding, constants)
            return isinstance(v, int) and lo <= v <= hi
        assert not isinstance(lit.rhs, Range)
        if op == "=":
            if isinstance(lit.lhs, Var) and lit.lhs.name not in binding:
                rv = _eval_value(lit.rhs, binding, constants)
                return [dict(binding, **{lit.lhs.name: rv})]
            return _eval_value(lit.lhs, binding, constants) == _eval_value(
                lit.rhs, binding, constants
            )
        if op == "\\=":
            return _eval_value(lit.lhs, binding, constants) != _eval_value(
                lit.rhs, binding, constants
            )
        lv = _eval_value(lit.lhs, binding, constants)
        rv = _eval_value(lit.rhs, binding, constants)
        if not isinstance(lv, int) or not isinstance(rv, int):
            raise GroundError(
                f"type error: ordering comparison {op} on symbols",
                [Diagnostic(lit.span, f"type error: ordering comparison {op} on symbols")],
            )
        if op == "<":
            return lv < rv
        if op == ">":
            return lv > rv
        if op == "=<":
            return lv <= rv
        return lv >= rv
    except _Unbound as ub:
        raise GroundError(
            f"insufficiently instantiated builtin {lit}: variable {ub.name} is unbound",
            [Diagnostic(lit.span, f"insufficiently instantiated builtin {lit}: variable {ub.name} is unbound")],
        ) from None


# ---------------------------------------------------------------------------
# per-rule instantiation plans


@dataclass
class _Plan:
    """Fixed evaluation order for one rule body.

    steps is a list of ("pos", literal) and ("builtin", literal, binds)
    entries; negative literals always run last since they never bind.
    """

    steps: list
    negs: list[Neg]
    span: SourceSpan | None
    label: str


def _builtin_placeable(lit: Builtin, bound: set[str]) -> tuple[bool, str | None]:
    """Whether the builtin can run once `bound` variables have values;
    returns the variable it binds in generator mode, if any."""
    if lit.op == "in":
        rng = lit.rhs
        rng_vars = term_variables(rng.lo) | term_variables(rng.hi)
        if isinstance(lit.lhs, Var) and lit.lhs.name not in bound:
            return rng_vars <= bound, lit.lhs.name
        return term_variables(lit.lhs) | rng_vars <= bound, None
    if lit.op == "=":
        if isinstance(lit.lhs, Var) and lit.lhs.name not in bound:
            return term_variables(lit.rhs) <= bound, lit.lhs.name
        return term_variables(lit.lhs) | term_variables(lit.rhs) <= bound, None
    vars_all = term_variables(lit.lhs) | term_variables(lit.rhs)
    return vars_all <= bound, None


def _plan_rule(body: tuple[Literal, ...], head_vars: set[str], span, label: str) -> _Plan:
    """Order one rule body for instantiation and check safety.

    Every variable must be bound by a positive relational literal or a
    generator builtin before anything needs its value; violations are
    reported against the rule.
    """
    steps: list = []
    negs: list[Neg] = []
    pending: list[Builtin] = []
    bound: set[str] = set()

    def place_ready():
        progress = True
        while progress:
            progress = False
            for lit in list(pending):
                ok, binds = _builtin_placeable(lit, bound)
                if ok:
                    pending.remove(lit)
                    steps.append(("builtin", lit))
                    if binds is not None:
                        bound.add(binds)
                    progress = True

    for lit in body:
        if isinstance(lit, Pos):
            for arg in lit.atom.args:
                if isinstance(arg, ArithExpr):
                    raise GroundError(
                        f"arithmetic is not allowed in body atom arguments: {lit.atom} in {label}",
                        [Diagnostic(span, f"arithmetic is not allowed in body atom arguments: {lit.atom} in {label}")],
                    )
            steps.append(("pos", lit))
            bound |= {a.name for a in lit.atom.args if isinstance(a, Var)}
            place_ready()
        elif isinstance(lit, Neg):
            for arg in lit.atom.args:
                if isinstance(arg, ArithExpr):
                    raise GroundError(
                        f"arithmetic is not allowed in body atom arguments: {lit.atom} in {label}",
                        [Diagnostic(span, f"arithmetic is not allowed in body atom arguments: {lit.atom} in {label}")],
                    )
            negs.append(lit)
        else:
            pending.append(lit)
            place_ready()
    place_ready()
    if pending:
        lit = pending[0]
        missing = sorted(v for v in (term_variables(lit.lhs) | (term_variables(lit.rhs.lo) | term_variables(lit.rhs.hi) if isinstance(lit.rhs, Range) else term_variables(lit.rhs))) if v not in bound)
        raise GroundError(
            f"builtin {lit} in {label} cannot be evaluated: variable "
            f"{missing[0] if missing else '?'} is never bound",
            [Diagnostic(span, f"builtin {lit} in {label} cannot be evaluated: variable {missing[0] if missing else '?'} is never bound")],
        )
    for lit in negs:
        loose = sorted(v for v in _atom_vars(lit.atom) if v not in bound)
        if loose:
            raise GroundError(
                f"unbounded variable {loose[0]} in negative literal {lit} in {label}",
                [Diagnostic(span, f"unbounded variable {loose[0]} in negative literal {lit} in {label}")],
            )
    loose = sorted(v for v in head_vars if v not in bound)
    if loose:
        raise GroundError(
            f"unbounded variable {loose[0]} in the head of {label}",
            [Diagnostic(span, f"unbounded variable {loose[0]} in the head of {label}")],
        )
    return _Plan(steps, negs, span, label)


def _atom_vars(atom: Atom) -> set[str]:
    out: set[str] = set()
    for a in atom.args:
        out |= term_variables(a)
    return out


def _head_item_vars(lit: Literal) -> set[str]:
    if isinstance(lit, (Pos, Neg)):
        return _atom_vars(lit.atom)
    out = term_variables(lit.lhs)
    if isinstance(lit.rhs, Range):
        out |= term_variables(lit.rhs.lo) | term_variables(lit.rhs.hi)
    else:
        out |= term_variables(lit.rhs)
    return out


def _match_args(pattern: tuple[Term, ...], values: tuple[Value, ...], binding: dict) -> dict | None:
    """Extend a binding by matching constant or variable argument patterns
    against a candidate value tuple."""
    nb = binding
    copied = False
    for pat, val in zip(pattern, values):
        if isinstance(pat, Var):
            have = nb.get(pat.name, _MISSING)
            if have is _MISSING:
                if not copied:
                    nb = dict(nb)
                    copied = True
                nb[pat.name] = val
            elif have != val:
                return None
        elif isinstance(pat, IntConst):
            if val != pat.value:
                return None
        elif isinstance(pat, SymConst):
            if val != pat.name:
                return None
        else:  # pragma: no cover - excluded by _plan_rule
            return None
    return nb


_MISSING = object()


def _enumerate_plan(plan: _Plan, candidates_for, constants: dict[str, int]):
    """Yield (binding, pos_ids) for every way to satisfy the body."""

    steps = plan.steps

    def rec(i: int, binding: dict, pos_ids: tuple):
        if i == len(steps):
            yield binding, pos_ids
            return
        kind, lit = steps[i]
        if kind == "pos":
            pattern = lit.atom.args
            for values, atom_id in candidates_for(lit.atom):
                nb = _match_args(pattern, values, binding)
                if nb is not None:
                    yield from rec(i + 1, nb, pos_ids + (atom_id,))
        else:
            res = eval_builtin(lit, binding, constants)
            if res is True:
                yield from rec(i + 1, binding, pos_ids)
            elif res is False:
                return
            else:
                for nb in res:
                    yield from rec(i + 1, nb, pos_ids)

    yield from rec(0, {}, ())


# ---------------------------------------------------------------------------
# ground atom construction


def _subst_atom(atom: Atom, binding: dict[str, Value], constants: dict[str, int]) -> GroundAtom:
    args = []
    for t in atom.args:
        args.append(_eval_value(t, binding, constants))
    return GroundAtom(atom.pred, tuple(args))


def _int_hull(program: Program, domains: DomainTable, universe=()) -> tuple[int, int] | None:
    ints: list[int] = list(domains.constants.values())
    for vals in domains.domains.values():
        if vals:
            ints.append(vals[0])
            ints.append(vals[-1])

    def scan_term(t: Term):
        if isinstance(t, IntConst):
            ints.append(t.value)
        elif isinstance(t, ArithExpr):
            for a in t.args:
                scan_term(a)

    def scan_lit(lit):
        if isinstance(lit, (Pos, Neg)):
            for a in lit.atom.args:
                scan_term(a)
        else:
            scan_term(lit.lhs)
            if isinstance(lit.rhs, Range):
                scan_term(lit.rhs.lo)
                scan_term(lit.rhs.hi)
            else:
                scan_term(lit.rhs)

    for cl in program.definitions:
        for a in cl.head.args:
            scan_term(a)
        for lit in cl.body:
            scan_lit(lit)
    for con in program.constraints:
        for lit in con.heads:
            scan_lit(lit)
        for lit in con.body:
            scan_lit(lit)
    for ga in universe:
        for v in ga.args:
            if isinstance(v, int):
                ints.append(v)
    if not ints:
        return None
    return min(ints), max(ints)


def _within_hull(atom: GroundAtom, hull: tuple[int, int] | None) -> bool:
    if hull is None:
        return not any(isinstance(v, int) for v in atom.args)
    lo, hi = hull
    return all(lo <= v <= hi for v in atom.args if isinstance(v, int))


# ---------------------------------------------------------------------------
# definition closure


def _close_definitions(
    definitions: list[Clause],
    plans: list[_Plan],
    kinds: dict,
    table: AtomTable,
    abd_candidates: dict,
    constants: dict[str, int],
    hull: tuple[int, int] | None,
):
    """Least closure of the definition layer over possible extensions.

    Returns the ground clause instances plus the per-predicate possible
    sets (args tuple -> atom id).  Clause instances are deduplicated per
    rule and ground body; naive rounds re-run every rule until no new
    atom becomes possible.
    """
    possible: dict[tuple[str, int], dict[tuple, int]] = {}
    for key in kinds:
        if kinds[key] is PredKind.DEFINED:
            possible[key] = {}

    clauses: list[GroundClause] = []
    seen: set[tuple] = set()

    def candidates_for(atom: Atom):
        key = atom.key
        if key in abd_candidates:
            return abd_candidates[key]
        return snapshot.get(key, ())

    grew = True
    while grew:
        grew = False
        snapshot = {k: list(v.items()) for k, v in possible.items()}
        for idx, cl in enumerate(definitions):
            plan = plans[idx]
            for binding, pos_ids in _enumerate_plan(plan, candidates_for, constants):
                neg_ids = tuple(
                    table.intern(_subst_atom(n.atom, binding, constants)) for n in plan.negs
                )
                head_atom = _subst_atom(cl.head, binding, constants)
                head_id = table.intern(head_atom)
                key = (idx, head_id, pos_ids, neg_ids)
                if key in seen:
                    continue
                seen.add(key)
                clauses.append(GroundClause(head_id, pos_ids, neg_ids))
                if len(table) > _ATOM_CAP:
                    raise GroundError(f"grounding exceeded {_ATOM_CAP} atoms")
                pkey = cl.head.key
                if _within_hull(head_atom, hull):
                    ext = possible[pkey]
                    if head_atom.args not in ext:
                        ext[head_atom.args] = head_id
                        grew = True
    return clauses, possible


# ---------------------------------------------------------------------------
# base model and universe


def _abducible_dependent(program: Program, kinds: dict) -> set[tuple[str, int]]:
    """Predicates whose definitions reach an abducible, directly or not."""
    dependent = {k for k, v in kinds.items() if v is PredKind.ABDUCIBLE}
    changed = True
    while changed:
        changed = False
        for cl in program.definitions:
            if cl.head.key in dependent:
                continue
            for lit in cl.body:
                if isinstance(lit, (Pos, Neg)) and lit.atom.key in dependent:
                    dependent.add(cl.head.key)
                    changed = True
                    break
    return dependent


@dataclass
class BaseModel:
    """Well-founded evaluation of the abducible-independent definitions.

    extensions holds the true instances per predicate; undefined_preds
    names predicates with at least one undefined instance, whose
    extensions cannot be trusted for typing.  Undefinedness here is not
    an error by itself: it resurfaces per candidate as NotTwoValued when
    those atoms matter.
    """

    extensions: dict[str, list[tuple[Value, ...]]]
    undefined_preds: set[str]


def base_model(program: Program, domains: DomainTable) -> BaseModel:
    """Evaluate the part of the program independent of any hypothesis."""
    program = normalize(program)
    kinds = classify_predicates(program)
    dependent = _abducible_dependent(program, kinds)
    fragment = [cl for cl in program.definitions if cl.head.key not in dependent]
    plans = [
        _plan_rule(cl.body, _atom_vars(cl.head), cl.span, f"clause {cl}") for cl in fragment
    ]
    domains_constants = domains.constants
    table = AtomTable()
    hull = _int_hull(program, domains)
    clauses, _possible = _close_definitions(
        fragment, plans, kinds, table, {}, domains_constants, hull
    )
    truth, _trace = wfs.well_founded(
        [(c.head, c.pos, c.neg) for c in clauses], (), len(table)
    )
    out: dict[str, list[tuple[Value, ...]]] = {}
    undefined: set[str] = set()
    for i in range(len(table)):
        if truth[i] == wfs.TRUE:
            atom = table.atom(i)
            out.setdefault(atom.pred, []).append(atom.args)
        elif truth[i] == wfs.UNDEF:
            undefined.add(table.atom(i).pred)
    for pred in out:
        out[pred].sort(key=lambda args: tuple(value_key(v) for v in args))
    return BaseModel(out, undefined)


def _typing_positions(program: Program, pred: str, arity: int) -> dict[int, list[str]]:
    """Typing constraints ``d(Vi) <- p(V1,...,Vn)`` keyed by argument slot."""
    out: dict[int, list[str]] = {}
    for con in program.constraints:
        if len(con.heads) != 1 or len(con.body) != 1:
            continue
        head = con.heads[0]
        body = con.body[0]
        if not isinstance(head, Pos) or not isinstance(body, Pos):
            continue
        if body.atom.pred != pred or body.atom.arity != arity or head.atom.arity != 1:
            continue
        args = body.atom.args
        if not all(isinstance(a, Var) for a in args):
            continue
        names = [a.name for a in args]
        if len(set(names)) != len(names):
            continue
        hv = head.atom.args[0]
        if not isinstance(hv, Var) or hv.name not in names:
            continue
        out.setdefault(names.index(hv.name), []).append(head.atom.pred)
    return out


def abducible_universe(
    program: Program, domains: DomainTable, base: BaseModel
) -> list[GroundAtom]:
    """Candidate ground atoms for every declared abducible, sorted.

    Argument domains come from the declaration when it lists them, and
    otherwise from typing constraints ``d(Vi) <- p(...,Vi,...)`` whose
    typing predicate d is abducible independent; several typing
    constraints on one slot intersect.
    """
    program = normalize(program)
    atoms: list[GroundAtom] = []
    for decl in program.decls.abducibles:
        if decl.arity == 0:
            atoms.append(GroundAtom(decl.pred, ()))
            continue
        per_arg: list[list[Value]] = []
        if decl.arg_domains is not None:
            for name in decl.arg_domains:
                if name not in domains.domains:
                    raise GroundError(
                        f"unknown domain {name} in declaration of {decl.pred}",
                        [Diagnostic(decl.span, f"unknown domain {name} in declaration of {decl.pred}")],
                    )
                per_arg.append(list(domains.domains[name]))
        else:
            typing = _typing_positions(program, decl.pred, decl.arity)
            for i in range(decl.arity):
                preds = typing.get(i)
                if not preds:
                    raise GroundError(
                        f"cannot bound argument {i + 1} of abducible {decl.pred}/{decl.arity}: "
                        "no declared domain and no typing constraint",
                        [Diagnostic(decl.span, f"cannot bound argument {i + 1} of abducible {decl.pred}/{decl.arity}: no declared domain and no typing constraint")],
                    )
                values: list[Value] | None = None
                for d in preds:
                    if d in base.undefined_preds:
                        raise GroundError(
                            f"typing predicate {d} for {decl.pred}/{decl.arity} is not "
                            "two-valued in the base definitions",
                            [Diagnostic(decl.span, f"typing predicate {d} for {decl.pred}/{decl.arity} is not two-valued in the base definitions")],
                        )
                    if d not in base.extensions:
                        raise GroundError(
                            f"typing predicate {d} for {decl.pred}/{decl.arity} depends on "
                            "abducibles or is empty",
                            [Diagnostic(decl.span, f"typing predicate {d} for {decl.pred}/{decl.arity} depends on abducibles or is empty")],
                        )
                    ext = [t[0] for t in base.extensions[d]]
                    values = ext if values is None else [v for v in values if v in set(ext)]
                per_arg.append(sorted(values or [], key=value_key))
        tuples = [()]
        for vals in per_arg:
            tuples = [t + (v,) for t in tuples for v in vals]
        atoms.extend(GroundAtom(decl.pred, t) for t in tuples)
    atoms.sort(key=lambda a: a.sort_key)
    return atoms


# ---------------------------------------------------------------------------
# forced facts


def collect_forced(program: Program, kinds: dict, constants: dict[str, int]) -> list[GroundAtom]:
    """Ground abducible facts stated unconditionally: ``a <- true.``"""
    forced: list[GroundAtom] = []
    seen: set[GroundAtom] = set()
    for con in program.constraints:
        if con.body or len(con.heads) != 1:
            continue
        head = con.heads[0]
        if not isinstance(head, Pos):
            continue
        if kinds.get(head.atom.key) is not PredKind.ABDUCIBLE:
            continue
        if _atom_vars(head.atom):
            raise GroundError(
                f"unbounded variable in unconditional constraint {con}",
                [Diagnostic(con.span, f"unbounded variable in unconditional constraint {con}")],
            )
        ga = _subst_atom(head.atom, {}, constants)
        if ga not in seen:
            seen.add(ga)
            forced.append(ga)
    forced.sort(key=lambda a: a.sort_key)
    return forced


# ---------------------------------------------------------------------------
# full grounding


def ground(program: Program, domains: DomainTable, universe: list[GroundAtom]) -> GroundTheory:
    """Instantiate a normalized program over its abducible universe."""
    program = normalize(program)
    kinds = classify_predicates(program)
    constants = domains.constants
    table = AtomTable()
    universe_ids = tuple(table.intern(a) for a in universe)
    forced_atoms = collect_forced(program, kinds, constants)
    forced_ids = tuple(table.intern(a) for a in forced_atoms)

    abd_candidates: dict[tuple[str, int], list[tuple[tuple[Value, ...], int]]] = {}
    for decl in program.decls.abducibles:
        abd_candidates[(decl.pred, decl.arity)] = []
    for i in universe_ids:
        atom = table.atom(i)
        abd_candidates[(atom.pred, len(atom.args))].append((atom.args, i))
    universe_set = set(universe_ids)
    for i in forced_ids:
        if i not in universe_set:
            atom = table.atom(i)
            abd_candidates[(atom.pred, len(atom.args))].append((atom.args, i))

    hull = _int_hull(program, domains, universe)

    definitions = list(program.definitions)
    plans = [
        _plan_rule(cl.body, _atom_vars(cl.head), cl.span, f"clause {cl}") for cl in definitions
    ]
    clauses, possible = _close_definitions(
        definitions, plans, kinds, table, abd_candidates, constants, hull
    )

    def candidates_for(atom: Atom):
        key = atom.key
        if key in abd_candidates:
            return abd_candidates[key]
        return [(args, i) for args, i in possible.get(key, {}).items()]

    constraints: list[GroundConstraint] = []
    for origin, con in enumerate(program.constraints):
        head_vars: set[str] = set()
        for h in con.heads:
            head_vars |= _head_item_vars(h)
        plan = _plan_rule(con.body, head_vars, con.span, f"constraint {con}")
        for binding, pos_ids in _enumerate_plan(plan, candidates_for, constants):
            neg_ids = tuple(
                table.intern(_subst_atom(n.atom, binding, constants)) for n in plan.negs
            )
            heads: list[tuple[int, bool]] = []
            satisfied = False
            for h in con.heads:
                if isinstance(h, Builtin):
                    verdict = eval_builtin(h, binding, constants)
                    assert isinstance(verdict, bool), "head builtins are ground here"
                    if verdict:
                        satisfied = True
                        break
                    continue  # false verdict: disjunct drops out
                if isinstance(h, Pos):
                    heads.append((table.intern(_subst_atom(h.atom, binding, constants)), True))
                else:
                    heads.append((table.intern(_subst_atom(h.atom, binding, constants)), False))
            if satisfied:
                continue
            constraints.append(GroundConstraint(tuple(heads), pos_ids, neg_ids, origin))
    return GroundTheory(table, clauses, constraints, universe_ids, forced_ids)


# ---------------------------------------------------------------------------
# pipeline


def build_theory(program: Program) -> GroundTheory:
    """Normalize, type, and ground a program in one step."""
    program = normalize(program)
    classify_predicates(program)  # surfaces classification errors early
    domains = eval_declarations(program.decls)
    base = base_model(program, domains)
    universe = abducible_universe(program, domains, base)
    return ground(program, domains, universe)


def apply_const_overrides(program: Program, overrides: dict[str, int]) -> Program:
    """Rewrite a program as if constants had been declared differently.

    For each NAME=VALUE pair: an existing constant declaration is
    replaced; otherwise unary integer facts ``NAME(k).`` are rewritten to
    ``NAME(VALUE).``; otherwise the constant is added.  This lets one
    source file drive differently sized instances.
    """
    if not overrides:
        return program
    constants = list(program.decls.constants)
    definitions = list(program.definitions)
    for name, value in overrides.items():
        replaced = False
        for i, c in enumerate(constants):
            if c.name == name:
                constants[i] = ConstantDecl_replace(c, value)
                replaced = True
                break
        if replaced:
            continue
        for i, cl in enumerate(definitions):
            if (
                cl.head.pred == name
                and cl.head.arity == 1
                and not cl.body
                and isinstance(cl.head.args[0], IntConst)
            ):
                definitions[i] = Clause(
                    Atom(name, (IntConst(value),), span=cl.head.span), (), span=cl.span
                )
                replaced = True
        if not replaced:
            from .syntax import ConstantDecl

            constants.append(ConstantDecl(name, IntConst(value)))
    return Program(
        Declarations(program.decls.abducibles, tuple(constants), program.decls.domains),
        tuple(definitions),
        program.constraints,
    )


def ConstantDecl_replace(decl, value: int):
    from .syntax import ConstantDecl

    return ConstantDecl(decl.name, IntConst(value), span=decl.span)
