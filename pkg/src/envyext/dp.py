"""
Configuration DP for REFAE / FEFAE under unary-sized valuations.

A state records, for every recipient and every agent type, the value of the
recipient's current bundle as seen by that type.  Open items are added one at
a time to each recipient; states that coincide are merged.  Two completions
that reach the same state are indistinguishable to every agent, so the
final envy test only needs the state.
"""
from __future__ import annotations

import time
from typing import Optional

from envyext.core import (
    FEFAE,
    REFAE,
    Allocation,
    Answer,
    Instance,
    SolveOutcome,
    compute_types,
    is_envy_free,
    recipient_sets,
)
from envyext.errors import InternalInvariantViolation, ValuesTooLarge, WrongVariant

DEFAULT_MAX_TOTAL = 10**5
DEFAULT_MAX_STATES = 2_000_000


class _Limit(Exception):
    pass


def value_total(inst: Instance) -> int:
    """Sum over items of the largest value any agent gives the item."""
    return sum(max(col) for col in zip(*inst.valuations)) if inst.n and inst.m else 0


def solve_dp(
    inst: Instance,
    *,
    max_total: int = DEFAULT_MAX_TOTAL,
    max_states: int = DEFAULT_MAX_STATES,
    keep: str = "first",
    time_limit: Optional[float] = None,
) -> SolveOutcome:
    """Decide a REFAE or FEFAE query with the configuration DP.

    ``keep`` selects which predecessor is remembered when two extensions
    collapse into one state (``"first"`` or ``"last"`` discovered); the answer
    does not depend on it.
    """
    if inst.query.variant not in (REFAE, FEFAE):
        raise WrongVariant(f"dp-p-nt solves REFAE/FEFAE, got {inst.query.variant}")
    total = value_total(inst)
    if total > max_total:
        raise ValuesTooLarge(f"value total {total} exceeds the unary guard {max_total}")
    t0 = time.perf_counter()
    deadline = None if time_limit is None else time.monotonic() + time_limit
    types = compute_types(inst)
    stats = {"nodes": 0, "states": 0, "max_layer": 0, "value_total": total, "seconds": 0.0}
    answer, witness = Answer.NO, None
    try:
        for recipients in recipient_sets(inst):
            stats["nodes"] += 1
            owner = _solve_for(inst, types, recipients, stats, max_states, keep, deadline)
            if owner is not None:
                answer, witness = Answer.YES, Allocation(tuple(owner))
                break
    except _Limit:
        answer = Answer.RESOURCE_LIMIT
    stats["seconds"] = time.perf_counter() - t0
    if witness is not None and not is_envy_free(inst, witness):
        raise InternalInvariantViolation("dp witness is not envy-free")
    return SolveOutcome(answer, witness, stats, "dp-p-nt")


def _solve_for(inst, types, recipients, stats, max_states, keep, deadline) -> Optional[list]:
    n, V = inst.n, inst.valuations
    nt = types.n_t
    type_of = types.agent_type_of
    rep = [members[0] for members in types.agent_type_members]
    p = len(recipients)
    is_recipient = [False] * n
    for r in recipients:
        is_recipient[r] = True
    # G[i][j] = v_i(gamma_j)
    G = [[0] * n for _ in range(n)]
    for a, j in enumerate(inst.gamma):
        if j is not None:
            for i in range(n):
                G[i][j] += V[i][a]
    outsiders = [a for a in range(n) if not is_recipient[a]]
    # envy felt by a non-recipient can never be repaired
    for a in outsiders:
        if any(G[a][j] > G[a][a] for j in range(n)):
            return None
    opens = inst.open_items
    if opens and not p:
        return None

    start = tuple(G[rep[z]][r] for r in recipients for z in range(nt))
    layers = [{start: None}]
    for a in opens:
        col = [V[rep[z]][a] for z in range(nt)]
        nxt = {}
        for state in layers[-1]:
            for pos in range(p):
                lo = pos * nt
                s = list(state)
                for z in range(nt):
                    s[lo + z] += col[z]
                s = tuple(s)
                if s not in nxt or keep == "last":
                    nxt[s] = (state, pos)
        if len(nxt) > max_states or (deadline is not None and time.monotonic() > deadline):
            raise _Limit
        stats["states"] += len(nxt)
        stats["max_layer"] = max(stats["max_layer"], len(nxt))
        layers.append(nxt)

    recipient_type = [type_of[r] for r in recipients]
    for state in layers[-1]:
        if _envy_free_state(state, recipients, recipient_type, outsiders, type_of, G, nt):
            return _rebuild(inst, layers, state, recipients)
    return None


def _envy_free_state(state, recipients, recipient_type, outsiders, type_of, G, nt) -> bool:
    p = len(recipients)
    for pos, i in enumerate(recipients):
        zi = recipient_type[pos]
        own = state[pos * nt + zi]
        if any(state[q * nt + zi] > own for q in range(p)):
            return False
        if any(G[i][j] > own for j in outsiders):
            return False
    for a in outsiders:
        za = type_of[a]
        own = G[a][a]
        if any(state[q * nt + za] > own for q in range(p)):
            return False
    return True


def _rebuild(inst, layers, state, recipients) -> list:
    owner = list(inst.gamma)
    opens = inst.open_items
    for t in range(len(opens), 0, -1):
        prev, pos = layers[t][state]
        owner[opens[t - 1]] = recipients[pos]
        state = prev
    return owner
