"""
Instance model, validation, agent/item types and the EF / EF1 / EFX checkers.

Agents and items are addressed by 0-based indices internally; the string
identifiers only matter for I/O.  Valuations are additive, so every bundle
comparison reduces to the matrix ``W[i][j] = v_i(bundle of j)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from envyext.errors import InstanceError

# widest signed machine integer; row sums above it are rejected up front
INT_BOUND = 2**63 - 1

EFAE = "EFAE"
REFAE = "REFAE"
FEFAE = "FEFAE"
VARIANTS = (EFAE, REFAE, FEFAE)


@dataclass(frozen=True)
class Query:
    variant: str = EFAE
    recipients: Optional[frozenset] = None
    p: Optional[int] = None

    @classmethod
    def efae(cls):
        return cls(EFAE)

    @classmethod
    def refae(cls, recipients: Iterable[int]):
        return cls(REFAE, recipients=frozenset(recipients))

    @classmethod
    def fefae(cls, p: int):
        return cls(FEFAE, p=p)


@dataclass(frozen=True)
class Instance:
    """An allocation-extension instance.

    ``gamma[a]`` is the agent that item ``a`` is pre-assigned to, or ``None``
    when the item is open.
    """

    agents: tuple
    items: tuple
    valuations: tuple
    gamma: tuple
    query: Query = field(default_factory=Query)

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.items)

    @property
    def open_items(self) -> tuple:
        return tuple(a for a, owner in enumerate(self.gamma) if owner is None)

    @property
    def k(self) -> int:
        return sum(1 for owner in self.gamma if owner is None)

    @property
    def assigned(self) -> dict:
        return {a: owner for a, owner in enumerate(self.gamma) if owner is not None}

    def value(self, agent: int, item: int) -> int:
        return self.valuations[agent][item]

    def with_query(self, query: Query) -> "Instance":
        return validate_instance(Instance(self.agents, self.items, self.valuations, self.gamma, query))


def make_instance(
    valuations: Sequence[Sequence[int]],
    assigned: Optional[Mapping[int, int]] = None,
    query: Optional[Query] = None,
    agents: Optional[Sequence[str]] = None,
    items: Optional[Sequence[str]] = None,
) -> Instance:
    """Build and validate an instance from a plain value matrix.

    >>> inst = make_instance([[1], [1]])
    >>> inst.n, inst.m, inst.k
    (2, 1, 1)
    """
    rows = tuple(tuple(row) for row in valuations)
    n = len(rows)
    m = len(rows[0]) if rows else 0
    if agents is None:
        agents = [f"a{i + 1}" for i in range(n)]
    if items is None:
        items = [f"o{j + 1}" for j in range(m)]
    gamma = [None] * len(items)
    for item, agent in (assigned or {}).items():
        if not 0 <= item < len(items):
            raise InstanceError(f"assigned item index {item} out of range", "BAD_SHAPE")
        gamma[item] = agent
    raw = Instance(tuple(agents), tuple(items), rows, tuple(gamma), query or Query())
    return validate_instance(raw)


def validate_instance(raw: Instance) -> Instance:
    n, m = raw.n, raw.m
    if len(set(raw.agents)) != n:
        raise InstanceError("agent identifiers are not unique", "DUPLICATE_ID")
    if len(set(raw.items)) != m:
        raise InstanceError("item identifiers are not unique", "DUPLICATE_ID")
    if len(raw.valuations) != n or any(len(row) != m for row in raw.valuations):
        raise InstanceError(f"valuation matrix must be {n}x{m}", "BAD_SHAPE")
    for row in raw.valuations:
        for v in row:
            if isinstance(v, bool) or not isinstance(v, int):
                raise InstanceError(f"valuation {v!r} is not an integer", "BAD_SHAPE")
            if v < 0:
                raise InstanceError(f"valuation {v} is negative", "NEGATIVE_VALUE")
        if sum(row) > INT_BOUND:
            raise InstanceError("a valuation row sum exceeds the 64-bit bound", "OVERFLOW_RISK")
    if len(raw.gamma) != m:
        raise InstanceError("partial allocation length does not match items", "BAD_SHAPE")
    for owner in raw.gamma:
        if owner is not None and not (isinstance(owner, int) and 0 <= owner < n):
            raise InstanceError(f"item assigned to unknown agent {owner!r}", "BAD_SHAPE")
    q = raw.query
    if q.variant not in VARIANTS:
        raise InstanceError(f"unknown variant {q.variant!r}", "BAD_QUERY")
    if q.variant == REFAE:
        if q.recipients is None or any(not (isinstance(r, int) and 0 <= r < n) for r in q.recipients):
            raise InstanceError("recipients must be a subset of the agents", "BAD_QUERY")
    if q.variant == FEFAE:
        if not isinstance(q.p, int) or not 1 <= q.p <= n:
            raise InstanceError(f"p must satisfy 1 <= p <= n, got {q.p!r}", "BAD_QUERY")
    return raw


@dataclass(frozen=True)
class Allocation:
    """``owner[a]`` is the agent holding item ``a``; ``None`` leaves it unallocated."""

    owner: tuple

    def bundles(self, n: int) -> list:
        out = [[] for _ in range(n)]
        for item, agent in enumerate(self.owner):
            if agent is not None:
                out[agent].append(item)
        return out

    @property
    def is_total(self) -> bool:
        return all(agent is not None for agent in self.owner)

    def extends(self, inst: Instance) -> bool:
        return len(self.owner) == inst.m and all(
            g is None or g == o for g, o in zip(inst.gamma, self.owner)
        )

    def extension(self, inst: Instance) -> dict:
        """The open-item part, ``item -> agent``."""
        return {a: self.owner[a] for a in inst.open_items}


def gamma_allocation(inst: Instance) -> Allocation:
    return Allocation(tuple(inst.gamma))


def extend(inst: Instance, pi: Mapping[int, int]) -> Allocation:
    owner = list(inst.gamma)
    for item, agent in pi.items():
        owner[item] = agent
    return Allocation(tuple(owner))


class Answer(str, enum.Enum):
    YES = "YES"
    NO = "NO"
    RESOURCE_LIMIT = "RESOURCE_LIMIT"


@dataclass
class SolveOutcome:
    answer: Answer
    witness: Optional[Allocation] = None
    stats: dict = field(default_factory=dict)
    engine: str = ""

    @property
    def yes(self) -> bool:
        return self.answer is Answer.YES


@dataclass(frozen=True)
class TypePartition:
    agent_type_of: tuple
    agent_type_members: tuple
    item_type_of: tuple
    item_type_members: tuple

    @property
    def n_t(self) -> int:
        return len(self.agent_type_members)

    @property
    def m_t(self) -> int:
        return len(self.item_type_members)


def group_by_key(keys: Sequence) -> tuple:
    """Assign ids 0, 1, ... to keys in order of first occurrence."""
    ids = {}
    type_of = []
    members = []
    for idx, key in enumerate(keys):
        t = ids.get(key)
        if t is None:
            t = ids[key] = len(members)
            members.append([])
        type_of.append(t)
        members[t].append(idx)
    return tuple(type_of), tuple(tuple(ms) for ms in members)


def compute_types(inst: Instance) -> TypePartition:
    agent_type_of, agent_members = group_by_key(inst.valuations)
    columns = list(zip(*inst.valuations)) if inst.n else [()] * inst.m
    item_type_of, item_members = group_by_key(columns)
    return TypePartition(agent_type_of, agent_members, item_type_of, item_members)


def bundle_value(inst: Instance, evaluator: int, alloc: Allocation, owner_agent: int) -> int:
    row = inst.valuations[evaluator]
    total = sum(row[a] for a, o in enumerate(alloc.owner) if o == owner_agent)
    if total > INT_BOUND:
        raise OverflowError("bundle value exceeds the 64-bit bound")
    return total


def value_matrix(inst: Instance, alloc: Allocation) -> list:
    """``W[i][j] = v_i(bundle of j)`` for every ordered pair."""
    n = inst.n
    W = [[0] * n for _ in range(n)]
    for a, j in enumerate(alloc.owner):
        if j is None:
            continue
        for i in range(n):
            W[i][j] += inst.valuations[i][a]
    return W


def envy_pairs(inst: Instance, alloc: Allocation) -> list:
    W = value_matrix(inst, alloc)
    n = inst.n
    return [(i, j) for i in range(n) for j in range(n) if i != j and W[i][j] > W[i][i]]


def is_envy_free(inst: Instance, alloc: Allocation) -> bool:
    return not envy_pairs(inst, alloc)


def _relaxed_ok(inst: Instance, alloc: Allocation, pick) -> bool:
    W = value_matrix(inst, alloc)
    bundles = alloc.bundles(inst.n)
    for i, j in ((i, j) for i in range(inst.n) for j in range(inst.n) if i != j):
        if W[i][j] <= W[i][i]:
            continue
        # envy implies bundles[j] is non-empty
        row = inst.valuations[i]
        if W[i][j] - pick(row[a] for a in bundles[j]) > W[i][i]:
            return False
    return True


def is_ef1(inst: Instance, alloc: Allocation) -> bool:
    """Some single item of each envied bundle can be removed to kill the envy."""
    return _relaxed_ok(inst, alloc, max)


def is_efx(inst: Instance, alloc: Allocation) -> bool:
    """Removing any single item, zero-valued ones included, kills the envy."""
    return _relaxed_ok(inst, alloc, min)


CHECKERS = {"ef": is_envy_free, "ef1": is_ef1, "efx": is_efx}


def recipient_sets(inst: Instance):
    """Candidate recipient sets for the query, in subset-rank order."""
    from itertools import combinations

    q = inst.query
    if q.variant == EFAE:
        return [tuple(range(inst.n))]
    if q.variant == REFAE:
        return [tuple(sorted(q.recipients))]
    return list(combinations(range(inst.n), q.p))
