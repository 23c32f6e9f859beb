"""Shared generators and graph-side brute force used by several test modules."""
import random
from itertools import combinations, product

from hypothesis import strategies as st

from envyext.core import Query, gamma_allocation, is_envy_free, make_instance


def random_instance(rng, n, m, vmax, open_p=0.5, query=None):
    vals = [[rng.randint(0, vmax) for _ in range(m)] for _ in range(n)]
    gamma = {a: rng.randrange(n) for a in range(m) if rng.random() >= open_p}
    return make_instance(vals, gamma, query)


def ef_gamma_instance(rng, n, m, vmax, open_p=0.5, tries=10_000):
    """Rejection-sample until the partial allocation is envy-free."""
    for _ in range(tries):
        inst = random_instance(rng, n, m, vmax, open_p)
        if is_envy_free(inst, gamma_allocation(inst)):
            return inst
    raise RuntimeError("no envy-free partial allocation found")


def typed_instance(rng, n, m, n_t, vmax, open_p=0.5, query=None):
    """Instance whose agent rows come from at most ``n_t`` prototypes."""
    protos = [[rng.randint(0, vmax) for _ in range(m)] for _ in range(n_t)]
    vals = [list(protos[rng.randrange(n_t)]) for _ in range(n)]
    gamma = {a: rng.randrange(n) for a in range(m) if rng.random() >= open_p}
    return make_instance(vals, gamma, query)


@st.composite
def instances(draw, max_n=4, max_m=5, max_v=3, variant="EFAE"):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(0, max_m))
    vals = draw(st.lists(st.lists(st.integers(0, max_v), min_size=m, max_size=m), min_size=n, max_size=n))
    owners = draw(st.lists(st.one_of(st.none(), st.integers(0, n - 1)), min_size=m, max_size=m))
    gamma = {a: o for a, o in enumerate(owners) if o is not None}
    if variant == "REFAE":
        rs = draw(st.sets(st.integers(0, n - 1), max_size=n))
        query = Query.refae(rs)
    elif variant == "FEFAE":
        query = Query.fefae(draw(st.integers(1, n)))
    else:
        query = Query.efae()
    return make_instance(vals, gamma, query)


@st.composite
def allocated(draw, max_n=4, max_m=5, max_v=3):
    """An instance together with a total allocation of its items."""
    inst = draw(instances(max_n, max_m, max_v))
    from envyext.core import Allocation

    owner = tuple(draw(st.integers(0, inst.n - 1)) for _ in range(inst.m))
    return inst, Allocation(owner)


def has_colorful_clique(g):
    return any(
        all(g.adjacent(u, v) for u, v in combinations(pick, 2)) for pick in product(*g.colors)
    )


def colorful_cliques(g):
    return [
        pick for pick in product(*g.colors) if all(g.adjacent(u, v) for u, v in combinations(pick, 2))
    ]


def has_independent_set(num_vertices, edges, ell):
    es = {frozenset(e) for e in edges}
    return any(
        all(frozenset((u, v)) not in es for u, v in combinations(c, 2))
        for c in combinations(range(num_vertices), ell)
    )


def seeded(seed):
    return random.Random(seed)


# criterion -> list of (part, passed, detail); filled by test_acceptance, printed by conftest
ACCEPTANCE = {}


def report(criterion, part, passed, detail=""):
    ACCEPTANCE.setdefault(criterion, []).append((part, bool(passed), detail))
    print(f"criterion {criterion} [{part}]: {'PASS' if passed else 'FAIL'} {detail}".rstrip())
