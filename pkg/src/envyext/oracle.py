"""
Brute-force ground truth: enumerate every assignment of the open items.

Assignments are enumerated in lexicographic order (first open item most
significant, agents ascending) and checked in numpy batches, so the first
passing assignment is the lexicographically first witness.  There is no
pruning or symmetry breaking on purpose.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from envyext.core import CHECKERS, Allocation, Answer, Instance, SolveOutcome, recipient_sets
from envyext.errors import InternalInvariantViolation

DEFAULT_MAX_ASSIGNMENTS = 10**7
NOTIONS = ("ef", "ef1", "efx")


@dataclass(frozen=True)
class OracleBudget:
    max_assignments: int = DEFAULT_MAX_ASSIGNMENTS

    def __post_init__(self):
        if self.max_assignments < 1:
            raise ValueError("max_assignments must be >= 1")


def _digits(start: int, stop: int, base: int, k: int) -> np.ndarray:
    """Rows ``start..stop-1`` of the base-``base`` odometer with ``k`` digits."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.zeros((stop - start, k), dtype=np.int64)
    for pos in range(k):
        weight = base ** (k - 1 - pos)
        if weight > stop:
            continue  # digit is 0 for every enumerated row
        out[:, pos] = (idx // weight) % base
    return out


class _BatchChecker:
    """Vectorised fairness test of many completions of the same partial allocation."""

    def __init__(self, inst: Instance, notion: str):
        self.notion = notion
        self.n = inst.n
        self.V = np.asarray(inst.valuations, dtype=np.int64).reshape(inst.n, inst.m)
        self.open = inst.open_items
        n = self.n
        big = np.iinfo(np.int64).max
        self.base = np.zeros((n, n), dtype=np.int64)
        self.base_max = np.zeros((n, n), dtype=np.int64)
        self.base_min = np.full((n, n), big, dtype=np.int64)
        self.base_count = np.zeros(n, dtype=np.int64)
        for a, j in enumerate(inst.gamma):
            if j is None:
                continue
            col = self.V[:, a]
            self.base[:, j] += col
            self.base_max[:, j] = np.maximum(self.base_max[:, j], col)
            self.base_min[:, j] = np.minimum(self.base_min[:, j], col)
            self.base_count[j] += 1

    def check(self, owners: np.ndarray) -> np.ndarray:
        """``owners[c, t]`` is the agent receiving open item ``t`` in candidate ``c``."""
        c = owners.shape[0]
        n = self.n
        rows = np.arange(c)
        W = np.broadcast_to(self.base, (c, n, n)).copy()
        relaxed = self.notion != "ef"
        if relaxed:
            mx = np.broadcast_to(self.base_max, (c, n, n)).copy()
            mn = np.broadcast_to(self.base_min, (c, n, n)).copy()
            count = np.broadcast_to(self.base_count, (c, n)).copy()
        for t, a in enumerate(self.open):
            o = owners[:, t]
            col = self.V[:, a]
            W[rows, :, o] += col
            if relaxed:
                mx[rows, :, o] = np.maximum(mx[rows, :, o], col)
                mn[rows, :, o] = np.minimum(mn[rows, :, o], col)
                count[rows, o] += 1
        diag = np.arange(n)
        own = W[:, diag, diag][:, :, None]
        if self.notion == "ef":
            return (W <= own).all(axis=(1, 2))
        removed = mx if self.notion == "ef1" else mn
        # empty bundles are worth 0 to everyone, so they never trigger envy
        removed = np.where(count[:, None, :] > 0, removed, 0)
        return (W - removed <= own).all(axis=(1, 2))


def solve_bruteforce_relaxed(
    inst: Instance,
    notion: str = "ef",
    budget: OracleBudget = OracleBudget(),
    *,
    time_limit: float | None = None,
) -> SolveOutcome:
    """Exhaustive search with the acceptance test ``notion`` in ``ef | ef1 | efx``."""
    notion = notion.lower()
    if notion not in NOTIONS:
        raise ValueError(f"unknown notion {notion!r}")
    t0 = time.perf_counter()
    checker = _BatchChecker(inst, notion)
    k = inst.k
    chunk = max(1, 2_000_000 // max(1, inst.n * inst.n))
    enumerated = 0
    limited = False
    deadline = None if time_limit is None else time.monotonic() + time_limit
    for recipients in recipient_sets(inst):
        r = len(recipients)
        if k and not r:
            continue
        total = r**k
        lookup = np.asarray(recipients, dtype=np.int64)
        start = 0
        while start < total:
            room = budget.max_assignments - enumerated
            if room <= 0 or (deadline is not None and time.monotonic() > deadline):
                limited = True
                break
            stop = min(total, start + chunk, start + room)
            owners = lookup[_digits(start, stop, r, k)] if k else np.zeros((1, 0), dtype=np.int64)
            ok = checker.check(owners)
            hits = np.flatnonzero(ok)
            enumerated += stop - start
            if hits.size:
                row = owners[hits[0]]
                owner = list(inst.gamma)
                for t, a in enumerate(inst.open_items):
                    owner[a] = int(row[t])
                witness = Allocation(tuple(owner))
                if not CHECKERS[notion](inst, witness):
                    raise InternalInvariantViolation("oracle witness fails its own predicate")
                return SolveOutcome(Answer.YES, witness, _stats(enumerated, t0), "brute")
            start = stop
        if limited:
            break
    answer = Answer.RESOURCE_LIMIT if limited else Answer.NO
    return SolveOutcome(answer, None, _stats(enumerated, t0), "brute")


def solve_bruteforce(
    inst: Instance, budget: OracleBudget = OracleBudget(), *, time_limit: float | None = None
) -> SolveOutcome:
    """Decide the instance's EF extension query by exhaustive enumeration."""
    return solve_bruteforce_relaxed(inst, "ef", budget, time_limit=time_limit)


def _stats(enumerated: int, t0: float) -> dict:
    return {"nodes": enumerated, "states": 0, "seconds": time.perf_counter() - t0}


def solve_bruteforce_batch(valuations, status, chunk: int = 20000) -> tuple:
    """EFAE oracle over many same-shape instances at once.

    ``valuations`` has shape ``(B, n, m)``; ``status[b, a]`` is the agent
    holding item ``a`` or ``-1`` when it is open.  Instances are grouped by
    which items are open; within a group every assignment of the open items
    is enumerated in the same lexicographic order as :func:`solve_bruteforce`,
    so the first witness matches it.

    Returns ``(exists, first)`` where ``first[b]`` is the full owner row of
    the first witness (undefined where ``exists`` is false).
    """
    V = np.asarray(valuations, dtype=np.int64)
    S = np.asarray(status, dtype=np.int64)
    B, n, m = V.shape
    exists = np.zeros(B, dtype=bool)
    first = np.where(S < 0, 0, S)
    if B == 0:
        return exists, first
    diag = np.arange(n)
    agents = np.arange(n)
    # float matmul is exact while every bundle sum stays below 2**53
    exact_float = int(V.sum(axis=2).max(initial=0)) < 2**53
    masks = S < 0
    patterns, group = np.unique(masks, axis=0, return_inverse=True)
    group = group.reshape(-1)
    for g, pattern in enumerate(patterns):
        members = np.flatnonzero(group == g)
        opens = np.flatnonzero(pattern)
        fixed = np.flatnonzero(~pattern)
        k = len(opens)
        rows = _digits(0, n**k, n, k)
        hot = (rows[:, :, None] == agents[None, None, :]).astype(np.int64)  # (R, k, n)
        hot_flat = hot.transpose(1, 0, 2).reshape(k, -1).astype(np.float64) if k else None
        for lo in range(0, len(members), chunk):
            idx = members[lo:lo + chunk]
            v, s = V[idx], S[idx]
            held = (s[:, fixed, None] == agents[None, None, :]).astype(np.int64)
            # G[b, i, j] = v_i(fixed items held by j)
            G = np.einsum("bia,baj->bij", v[:, :, fixed], held)
            vo = v[:, :, opens]
            if exact_float and k:
                flat = vo.reshape(-1, k).astype(np.float64) @ hot_flat
                W = flat.reshape(len(idx), n, len(rows), n).transpose(0, 2, 1, 3).astype(np.int64)
            else:
                W = np.einsum("bia,raj->brij", vo, hot)
            W += G[:, None, :, :]
            ok = (W <= W[:, :, diag, diag][:, :, :, None]).all(axis=(2, 3))
            exists[idx] = ok.any(axis=1)
            if k:
                pick = rows[ok.argmax(axis=1)]
                sub = first[idx]
                sub[:, opens] = pick
                first[idx] = sub
    return exists, first
