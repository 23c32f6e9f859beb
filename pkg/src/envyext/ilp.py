"""
Integer-program encoding of REFAE / FEFAE over open-item types.

Variable ``x[r][t]`` counts the open items of type ``t`` handed to recipient
``r``.  Same-type open items are interchangeable to every agent, so any
feasible count vector can be realised by concrete items.  Feasibility is
decided by a small exact branch-and-bound with interval propagation.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from envyext.core import (
    FEFAE,
    REFAE,
    Allocation,
    Answer,
    Instance,
    SolveOutcome,
    group_by_key,
    is_envy_free,
    recipient_sets,
)
from envyext.errors import InternalInvariantViolation, WrongVariant

DEFAULT_NODE_BUDGET = 10**6


@dataclass(frozen=True)
class Constraint:
    """``sum(coef * x[var]) <sense> rhs`` with sense ``"=="`` or ``">="``."""

    terms: tuple
    sense: str
    rhs: int
    label: str = ""

    def holds(self, x: Sequence[int]) -> bool:
        lhs = sum(c * x[v] for v, c in self.terms)
        return lhs == self.rhs if self.sense == "==" else lhs >= self.rhs


@dataclass
class IlpModel:
    names: list
    lower: list
    upper: list
    constraints: list = field(default_factory=list)
    # bookkeeping for materialising witnesses
    recipients: tuple = ()
    open_types: tuple = ()

    @property
    def num_vars(self) -> int:
        return len(self.names)

    def satisfied_by(self, x: Sequence[int]) -> bool:
        return all(lo <= v <= hi for v, lo, hi in zip(x, self.lower, self.upper)) and all(
            c.holds(x) for c in self.constraints
        )


@dataclass
class IlpVerdict:
    feasible: Optional[bool]  # None means the node budget ran out
    assignment: Optional[list] = None
    nodes: int = 0


def open_item_types(inst: Instance) -> tuple:
    """Group open items whose value columns agree; ids by first occurrence."""
    opens = inst.open_items
    columns = [tuple(row[a] for row in inst.valuations) for a in opens]
    _, members = group_by_key(columns)
    return tuple(tuple(opens[i] for i in ms) for ms in members)


def build_ilp(inst: Instance, recipients: Sequence[int], supplementary: bool = True) -> IlpModel:
    """Encode "envy-free extension giving open items only to ``recipients``".

    Families: conservation per open type; recipient-vs-recipient envy;
    non-recipient-vs-recipient envy; and, when ``supplementary`` is set,
    recipient-vs-non-recipient envy (redundant when the partial allocation is
    already envy-free).
    """
    n, V = inst.n, inst.valuations
    recipients = tuple(recipients)
    types = open_item_types(inst)
    mt = len(types)
    rep = [ms[0] for ms in types]
    G = [[0] * n for _ in range(n)]
    for a, j in enumerate(inst.gamma):
        if j is not None:
            for i in range(n):
                G[i][j] += V[i][a]

    def var(r, t):
        return r * mt + t

    names = [f"x[{inst.agents[i]}][{t}]" for i in recipients for t in range(mt)]
    lower = [0] * len(names)
    upper = [len(types[t]) for _ in recipients for t in range(mt)]
    model = IlpModel(names, lower, upper, recipients=recipients, open_types=types)
    cons = model.constraints
    for t in range(mt):
        terms = tuple((var(r, t), 1) for r in range(len(recipients)))
        cons.append(Constraint(terms, "==", len(types[t]), f"count[{t}]"))
    outsiders = [j for j in range(n) if j not in recipients]
    for r, i in enumerate(recipients):
        for s, j in enumerate(recipients):
            if i == j:
                continue
            terms = [(var(r, t), V[i][rep[t]]) for t in range(mt)]
            terms += [(var(s, t), -V[i][rep[t]]) for t in range(mt)]
            cons.append(Constraint(_clean(terms), ">=", G[i][j] - G[i][i], f"ef[{i},{j}]"))
    for j in outsiders:
        for r, i in enumerate(recipients):
            terms = [(var(r, t), -V[j][rep[t]]) for t in range(mt)]
            cons.append(Constraint(_clean(terms), ">=", G[j][i] - G[j][j], f"ef[{j},{i}]"))
    if supplementary:
        for r, i in enumerate(recipients):
            for j in outsiders:
                terms = [(var(r, t), V[i][rep[t]]) for t in range(mt)]
                cons.append(Constraint(_clean(terms), ">=", G[i][j] - G[i][i], f"ef[{i},{j}]"))
    return model


def _clean(terms) -> tuple:
    return tuple((v, c) for v, c in terms if c != 0)


def solve_ilp(model: IlpModel, node_budget: int = DEFAULT_NODE_BUDGET) -> IlpVerdict:
    """Depth-first search over variables in order, values ascending.

    Each constraint keeps the exact contribution of assigned variables and the
    extreme contributions the unassigned ones can still make; a node is cut
    when some constraint can no longer be met.
    """
    nv = model.num_vars
    lo, hi = model.lower, model.upper
    cons = model.constraints
    for c in cons:
        if c.sense not in ("==", ">="):
            raise ValueError(f"unsupported sense {c.sense!r}")
    # suffix extremes: rest_min[c][v] / rest_max[c][v] over variables >= v
    by_var = [[] for _ in range(nv)]
    coef = []
    rest_min, rest_max = [], []
    for ci, c in enumerate(cons):
        row = [0] * nv
        for v, a in c.terms:
            row[v] += a
        coef.append(row)
        mins, maxs = [0] * (nv + 1), [0] * (nv + 1)
        for v in range(nv - 1, -1, -1):
            a = row[v]
            mins[v] = mins[v + 1] + min(a * lo[v], a * hi[v])
            maxs[v] = maxs[v + 1] + max(a * lo[v], a * hi[v])
            if a:
                by_var[v].append(ci)
        rest_min.append(mins)
        rest_max.append(maxs)
    partial = [0] * len(cons)
    x = [0] * nv
    nodes = 0

    def viable(ci, v_next):
        c = cons[ci]
        top = partial[ci] + rest_max[ci][v_next]
        if top < c.rhs:
            return False
        if c.sense == "==" and partial[ci] + rest_min[ci][v_next] > c.rhs:
            return False
        return True

    if not all(viable(ci, 0) for ci in range(len(cons))):
        return IlpVerdict(False, None, 1)

    class _Budget(Exception):
        pass

    def rec(v):
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise _Budget
        if v == nv:
            return True
        touched = by_var[v]
        for val in range(lo[v], hi[v] + 1):
            x[v] = val
            for ci in touched:
                partial[ci] += coef[ci][v] * val
            ok = all(viable(ci, v + 1) for ci in touched)
            if ok and rec(v + 1):
                return True
            for ci in touched:
                partial[ci] -= coef[ci][v] * val
        x[v] = 0
        return False

    try:
        found = rec(0)
    except _Budget:
        return IlpVerdict(None, None, nodes)
    if not found:
        return IlpVerdict(False, None, nodes)
    assignment = list(x)
    if not model.satisfied_by(assignment):
        raise InternalInvariantViolation("ilp assignment violates its model")
    return IlpVerdict(True, assignment, nodes)


def materialize(inst: Instance, model: IlpModel, x: Sequence[int]) -> Allocation:
    """Hand out concrete items, lowest index first within each type."""
    owner = list(inst.gamma)
    mt = len(model.open_types)
    for t, items in enumerate(model.open_types):
        pool = iter(items)
        for r, agent in enumerate(model.recipients):
            for _ in range(x[r * mt + t]):
                owner[next(pool)] = agent
    return Allocation(tuple(owner))


def aggregate(model: IlpModel, alloc: Allocation) -> list:
    """Count vector of an allocation, the inverse of :func:`materialize`."""
    mt = len(model.open_types)
    x = [0] * model.num_vars
    pos = {agent: r for r, agent in enumerate(model.recipients)}
    for t, items in enumerate(model.open_types):
        for a in items:
            r = pos.get(alloc.owner[a])
            if r is None:
                return None
            x[r * mt + t] += 1
    return x


def _outsiders_content(inst: Instance, recipients) -> bool:
    n, V = inst.n, inst.valuations
    G = [[0] * n for _ in range(n)]
    for a, j in enumerate(inst.gamma):
        if j is not None:
            for i in range(n):
                G[i][j] += V[i][a]
    chosen = set(recipients)
    outsiders = [j for j in range(n) if j not in chosen]
    return all(G[a][b] <= G[a][a] for a in outsiders for b in outsiders)


def _solve_recipients(inst, recipients, node_budget, supplementary, stats):
    if not _outsiders_content(inst, recipients):
        return None
    model = build_ilp(inst, recipients, supplementary)
    verdict = solve_ilp(model, node_budget - stats["nodes"])
    stats["nodes"] += verdict.nodes
    stats["variables"] = max(stats.get("variables", 0), model.num_vars)
    if verdict.feasible is None:
        raise _BudgetOut
    if not verdict.feasible:
        return None
    return materialize(inst, model, verdict.assignment)


class _BudgetOut(Exception):
    pass


def _drive(inst: Instance, sets, node_budget, supplementary, engine) -> SolveOutcome:
    t0 = time.perf_counter()
    stats = {"nodes": 0, "states": 0}
    answer, witness = Answer.NO, None
    try:
        for recipients in sets:
            witness = _solve_recipients(inst, recipients, node_budget, supplementary, stats)
            if witness is not None:
                answer = Answer.YES
                break
    except _BudgetOut:
        answer, witness = Answer.RESOURCE_LIMIT, None
    stats["seconds"] = time.perf_counter() - t0
    if witness is not None and supplementary and not is_envy_free(inst, witness):
        raise InternalInvariantViolation("ilp witness is not envy-free")
    return SolveOutcome(answer, witness, stats, engine)


def solve_refae_ilp(
    inst: Instance, node_budget: int = DEFAULT_NODE_BUDGET, supplementary: bool = True
) -> SolveOutcome:
    if inst.query.variant != REFAE:
        raise WrongVariant(f"REFAE expected, got {inst.query.variant}")
    return _drive(inst, recipient_sets(inst), node_budget, supplementary, "ilp-p-mt")


def solve_fefae_ilp(
    inst: Instance, node_budget: int = DEFAULT_NODE_BUDGET, supplementary: bool = True
) -> SolveOutcome:
    if inst.query.variant != FEFAE:
        raise WrongVariant(f"FEFAE expected, got {inst.query.variant}")
    return _drive(inst, recipient_sets(inst), node_budget, supplementary, "ilp-p-mt")


def solve_ilp_query(inst: Instance, node_budget: int = DEFAULT_NODE_BUDGET) -> SolveOutcome:
    if inst.query.variant == REFAE:
        return solve_refae_ilp(inst, node_budget)
    return solve_fefae_ilp(inst, node_budget)


def to_lp_text(model: IlpModel) -> str:
    """Plain-text dump, one bound or constraint per line, integer coefficients."""
    lines = ["\\ feasibility model", "subject to"]
    for c in model.constraints:
        if c.terms:
            lhs = " ".join(
                f"{'+' if a >= 0 else '-'} {abs(a)} {model.names[v]}" for v, a in c.terms
            )
        else:
            lhs = "0"
        op = "=" if c.sense == "==" else ">="
        lines.append(f" {c.label}: {lhs} {op} {c.rhs}")
    lines.append("bounds")
    for name, lo, hi in zip(model.names, model.lower, model.upper):
        lines.append(f" {lo} <= {name} <= {hi}")
    lines.append("general")
    lines.extend(f" {name}" for name in model.names)
    lines.append("end")
    return "\n".join(lines) + "\n"


__all__ = [
    "Constraint",
    "IlpModel",
    "IlpVerdict",
    "aggregate",
    "build_ilp",
    "materialize",
    "open_item_types",
    "solve_fefae_ilp",
    "solve_ilp",
    "solve_refae_ilp",
    "to_lp_text",
]
