"""
Fixed-parameter search for EFAE, parameterised by open items plus agent types.

The search has three stages:

1. While some agent envies another under the working partial allocation, that
   agent must receive an open item: branch over which one, commit it, repeat.
2. Agents of "small" types (at most as many members as there are remaining
   open items) form the set Z.  Branch over every partition of the remaining
   open items into bundles and, per bundle, over its receiver in Z or the
   marker LARGE.
3. Members of large types can only take bundles they value 0, so the LARGE
   bundles are placed by a bipartite matching against agents outside Z.

Stage 2 prunes a plan as soon as it can no longer pass the envy test on Z
(receivers of a bundle are final because no agent gets two bundles, and
everybody else's bundle only grows).  ``prune=False`` evaluates every plan
in full instead, which is used to cross-check the pruning.
"""
from __future__ import annotations

import time
from typing import Iterator, Optional

from envyext.core import (
    EFAE,
    Allocation,
    Answer,
    Instance,
    SolveOutcome,
    group_by_key,
    is_envy_free,
)
from envyext.errors import InternalInvariantViolation, WrongVariant
from envyext.matching import saturating_matching

LARGE = -1


class _Timeout(Exception):
    pass


def set_partitions(items: tuple) -> Iterator[list]:
    """Partitions of ``items`` as lists of blocks, via restricted-growth strings.

    Strings are produced in lexicographic order, so the single-block partition
    comes first and the all-singletons partition last.

    >>> [[list(b) for b in p] for p in set_partitions((1, 2))]
    [[[1, 2]], [[1], [2]]]
    """
    k = len(items)
    if k == 0:
        yield []
        return
    rgs = [0] * k

    def rec(pos, blocks):
        if pos == k:
            out = [[] for _ in range(blocks)]
            for item, b in zip(items, rgs):
                out[b].append(item)
            yield out
            return
        for b in range(blocks + 1):
            rgs[pos] = b
            yield from rec(pos + 1, max(blocks, b + 1))

    rgs[0] = 0
    yield from rec(1, 1)


def branch_bound(k: int, n_t: int, n: int) -> int:
    """Upper bound on the number of complete bundle plans the search visits."""
    return k**k * (k * n_t + 1) ** k * (k * n) ** k


class _Search:
    def __init__(self, inst: Instance, prune: bool, deadline: Optional[float]):
        self.inst = inst
        self.n = inst.n
        self.V = inst.valuations
        # only agent types matter here
        self.type_of, members = group_by_key(inst.valuations)
        self.type_size = [len(ms) for ms in members]
        self.n_t = len(members)
        self.prune = prune
        self.deadline = deadline
        self.nodes = 0
        self.branches = 0
        self.owner = list(inst.gamma)
        n = self.n
        # G[i][j] = v_i(working bundle of j)
        self.G = [[0] * n for _ in range(n)]
        for a, j in enumerate(self.owner):
            if j is not None:
                for i in range(n):
                    self.G[i][j] += self.V[i][a]

    def _tick(self):
        self.nodes += 1
        if self.deadline is not None and self.nodes % 1024 == 0 and time.monotonic() > self.deadline:
            raise _Timeout

    def _give(self, item, agent, sign):
        G, V = self.G, self.V
        for i in range(self.n):
            G[i][agent] += sign * V[i][item]
        self.owner[item] = agent if sign > 0 else None

    def envious_agent(self) -> Optional[int]:
        for i, row in enumerate(self.G):
            if max(row) > row[i]:
                return i
        return None

    def eliminate_envy(self, remaining: tuple) -> Optional[list]:
        self._tick()
        i = self.envious_agent()
        if i is None:
            return self.plan_search(remaining)
        for pos, item in enumerate(remaining):
            self._give(item, i, +1)
            found = self.eliminate_envy(remaining[:pos] + remaining[pos + 1:])
            if found is not None:
                return found
            self._give(item, i, -1)
        return None

    def plan_search(self, remaining: tuple) -> Optional[list]:
        n = self.n
        kr = len(remaining)
        if not kr:
            return list(self.owner)
        in_z = [self.type_size[self.type_of[i]] <= kr for i in range(n)]
        z_agents = [i for i in range(n) if in_z[i]]
        outside = [i for i in range(n) if not in_z[i]]
        for blocks in set_partitions(remaining):
            self._tick()
            BV = [[sum(self.V[i][a] for a in block) for block in blocks] for i in range(n)]
            plan = self._targets(blocks, BV, in_z, z_agents, outside)
            if plan is not None:
                owner = list(self.owner)
                for b, agent in enumerate(plan):
                    for a in blocks[b]:
                        owner[a] = agent
                return owner
        return None

    def _targets(self, blocks, BV, in_z, z_agents, outside) -> Optional[list]:
        n, G = self.n, self.G
        nb = len(blocks)
        got = [-1] * n  # block index received by a Z agent
        own = [G[i][i] for i in range(n)]
        final = [not in_z[i] for i in range(n)]
        target = [None] * nb
        prune = self.prune

        def seen(e, j):
            b = got[j]
            return G[e][j] + (BV[e][b] if b >= 0 else 0)

        def rec(b):
            if b == nb:
                self.branches += 1
                return self._leaf(blocks, BV, target, got, own, in_z, z_agents, outside)
            self._tick()
            for j in z_agents:
                if got[j] >= 0:
                    continue
                own_j = G[j][j] + BV[j][b]
                if prune:
                    if any(
                        e != j and final[e] and G[e][j] + BV[e][b] > own[e] for e in range(n)
                    ):
                        continue
                    if any(l != j and seen(j, l) > own_j for l in range(n)):
                        continue
                got[j], own[j], final[j], target[b] = b, own_j, True, j
                found = rec(b + 1)
                if found is not None:
                    return found
                got[j], own[j], final[j] = -1, G[j][j], False
            if not prune or any(BV[i][b] == 0 for i in outside):
                target[b] = LARGE
                found = rec(b + 1)
                if found is not None:
                    return found
            target[b] = None
            return None

        return rec(0)

    def _leaf(self, blocks, BV, target, got, own, in_z, z_agents, outside) -> Optional[list]:
        n, G = self.n, self.G

        def seen(e, j):
            b = got[j]
            return G[e][j] + (BV[e][b] if b >= 0 else 0)

        # no Z agent envies anybody, no outsider envies a Z agent
        for i in z_agents:
            if any(l != i and seen(i, l) > own[i] for l in range(n)):
                return None
        for a in outside:
            if any(seen(a, j) > own[a] for j in z_agents):
                return None
        large = [b for b in range(len(blocks)) if target[b] == LARGE]

        def edge(pos, i):
            b = large[pos]
            if BV[i][b] != 0:
                return False
            # re-check every agent, not only the cases the argument rules out
            return all(e == i or own[e] >= G[e][i] + BV[e][b] for e in range(n))

        matching = saturating_matching(large, outside, edge)
        if matching is None:
            return None
        plan = list(target)
        for pos, agent in matching.items():
            plan[large[pos]] = agent
        return plan


def solve_fpt_k_nt(
    inst: Instance, *, prune: bool = True, time_limit: Optional[float] = None
) -> SolveOutcome:
    """Decide EFAE with the open-items + agent-types branching algorithm."""
    if inst.query.variant != EFAE:
        raise WrongVariant(f"fpt-k-nt solves EFAE only, got {inst.query.variant}")
    t0 = time.perf_counter()
    deadline = None if time_limit is None else time.monotonic() + time_limit
    search = _Search(inst, prune, deadline)
    try:
        owner = search.eliminate_envy(inst.open_items)
        answer = Answer.YES if owner is not None else Answer.NO
    except _Timeout:
        owner, answer = None, Answer.RESOURCE_LIMIT
    stats = {
        "nodes": search.nodes,
        "branches": search.branches,
        "branch_bound": branch_bound(inst.k, search.n_t, inst.n),
        "states": 0,
        "seconds": time.perf_counter() - t0,
    }
    witness = None
    if owner is not None:
        witness = Allocation(tuple(owner))
        if not is_envy_free(inst, witness):
            raise InternalInvariantViolation("fpt witness is not envy-free")
    return SolveOutcome(answer, witness, stats, "fpt-k-nt")
