"""Pick an engine for an instance from the size of its parameters."""
from __future__ import annotations

from math import comb

from envyext.core import EFAE, FEFAE, Instance, compute_types
from envyext.dp import DEFAULT_MAX_TOTAL, value_total
from envyext.fpt import branch_bound
from envyext.ilp import open_item_types

FPT_BOUND_LIMIT = 10**12
ILP_VAR_LIMIT = 12


def select_algorithm(inst: Instance) -> tuple:
    """Return ``(engine id, rationale)``."""
    if inst.query.variant == EFAE:
        nt = compute_types(inst).n_t
        bound = branch_bound(inst.k, nt, inst.n)
        if bound <= FPT_BOUND_LIMIT:
            return "fpt-k-nt", f"EFAE with k={inst.k}, n_t={nt}: branch bound {bound} <= {FPT_BOUND_LIMIT}"
        return "brute", f"EFAE branch bound {bound} exceeds {FPT_BOUND_LIMIT}"
    p = inst.query.p if inst.query.variant == FEFAE else len(inst.query.recipients)
    mt = len(open_item_types(inst))
    if p * mt <= ILP_VAR_LIMIT:
        sets = comb(inst.n, p) if inst.query.variant == FEFAE else 1
        return "ilp-p-mt", f"p*m_t = {p}*{mt} <= {ILP_VAR_LIMIT} integer variables over {sets} recipient set(s)"
    total = value_total(inst)
    if total <= DEFAULT_MAX_TOTAL:
        return "dp-p-nt", f"p*m_t = {p * mt} too many variables; value total {total} passes the unary guard"
    return "brute", f"p*m_t = {p * mt} and value total {total} both too large"
