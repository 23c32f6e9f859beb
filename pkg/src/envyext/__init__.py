"""Exact solvers for envy-free allocation extension."""
from envyext.core import (
    Allocation,
    Answer,
    Instance,
    Query,
    SolveOutcome,
    compute_types,
    envy_pairs,
    is_ef1,
    is_efx,
    is_envy_free,
    make_instance,
)
from envyext.dp import solve_dp
from envyext.fpt import solve_fpt_k_nt
from envyext.ilp import solve_ilp_query
from envyext.oracle import solve_bruteforce, solve_bruteforce_relaxed
from envyext.relaxed import extend_to_ef1, verify_catalog

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "Answer",
    "Instance",
    "Query",
    "SolveOutcome",
    "compute_types",
    "envy_pairs",
    "extend_to_ef1",
    "is_ef1",
    "is_efx",
    "is_envy_free",
    "make_instance",
    "solve_bruteforce",
    "solve_bruteforce_relaxed",
    "solve_dp",
    "solve_fpt_k_nt",
    "solve_ilp_query",
    "verify_catalog",
]
