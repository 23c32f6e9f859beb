"""Bipartite matching by augmenting paths (Kuhn's algorithm)."""
from __future__ import annotations

from typing import Callable, Optional, Sequence


def saturating_matching(
    bundles: Sequence,
    candidates: Sequence[int],
    edge: Callable[[int, int], bool],
) -> Optional[dict]:
    """Match every bundle to a distinct candidate, or return ``None``.

    ``edge(b, agent)`` is queried with bundle positions ``b`` into ``bundles``.
    The result maps bundle position to agent.

    >>> saturating_matching([{0}, {1}], [5], lambda b, a: True) is None
    True
    >>> saturating_matching([], [1, 2], lambda b, a: True)
    {}
    """
    adj = [[a for a in candidates if edge(b, a)] for b in range(len(bundles))]
    match_agent = {}  # agent -> bundle

    def augment(b, seen):
        for a in adj[b]:
            if a in seen:
                continue
            seen.add(a)
            if a not in match_agent or augment(match_agent[a], seen):
                match_agent[a] = b
                return True
        return False

    for b in range(len(bundles)):
        if not adj[b] or not augment(b, set()):
            return None
    return {b: a for a, b in sorted(match_agent.items(), key=lambda kv: kv[1])}
