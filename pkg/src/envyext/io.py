"""Instance/allocation documents, graph text files and the random generator."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Optional

from envyext.core import EFAE, FEFAE, REFAE, Allocation, Instance, Query, make_instance
from envyext.errors import (
    BadParams,
    GenRetryExhausted,
    MalformedGraph,
    ParseError,
    SchemaError,
)
from envyext.reductions import ColoredGraph, Graph

DOC_KEYS = {"agents", "items", "valuations", "assigned", "query"}


def canonical(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _load(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def _need(cond, msg):
    if not cond:
        raise SchemaError(msg)


def _id_list(doc, key):
    val = doc.get(key)
    _need(isinstance(val, list) and all(isinstance(x, str) for x in val), f"{key!r} must be a list of strings")
    return val


def instance_from_doc(doc) -> Instance:
    _need(isinstance(doc, dict), "document must be a JSON object")
    missing = {"agents", "items", "valuations"} - doc.keys()
    _need(not missing, f"missing keys: {sorted(missing)}")
    extra = doc.keys() - DOC_KEYS
    _need(not extra, f"unknown keys: {sorted(extra)}")
    agents, items = _id_list(doc, "agents"), _id_list(doc, "items")
    vals = doc["valuations"]
    _need(isinstance(vals, list) and all(isinstance(r, list) for r in vals), "'valuations' must be a matrix")
    for row in vals:
        _need(all(isinstance(v, int) and not isinstance(v, bool) for v in row), "valuations must be integers")
    a_idx = {a: i for i, a in enumerate(agents)}
    i_idx = {a: i for i, a in enumerate(items)}
    assigned = doc.get("assigned", {})
    _need(isinstance(assigned, dict), "'assigned' must be an object")
    gamma = {}
    for item, agent in assigned.items():
        _need(item in i_idx, f"unknown item {item!r} in 'assigned'")
        _need(isinstance(agent, str) and agent in a_idx, f"unknown agent {agent!r} in 'assigned'")
        gamma[i_idx[item]] = a_idx[agent]
    query = _query_from_doc(doc.get("query", {"variant": EFAE}), a_idx)
    return make_instance(vals, gamma, query, agents, items)


def _query_from_doc(q, a_idx) -> Query:
    _need(isinstance(q, dict) and q.get("variant") in (EFAE, REFAE, FEFAE), "query.variant must be EFAE, REFAE or FEFAE")
    if q["variant"] == EFAE:
        _need(set(q) == {"variant"}, "EFAE query takes no parameters")
        return Query.efae()
    if q["variant"] == REFAE:
        _need(set(q) == {"variant", "recipients"}, "REFAE query needs exactly 'recipients'")
        rs = q["recipients"]
        _need(isinstance(rs, list) and all(isinstance(r, str) for r in rs), "recipients must be agent ids")
        _need(all(r in a_idx for r in rs), "recipients must be a subset of the agents")
        return Query.refae(a_idx[r] for r in rs)
    _need(set(q) == {"variant", "p"}, "FEFAE query needs exactly 'p'")
    _need(isinstance(q["p"], int) and not isinstance(q["p"], bool), "p must be an integer")
    return Query.fefae(q["p"])


def instance_to_doc(inst: Instance) -> dict:
    q = inst.query
    if q.variant == REFAE:
        query = {"variant": REFAE, "recipients": [inst.agents[r] for r in sorted(q.recipients)]}
    elif q.variant == FEFAE:
        query = {"variant": FEFAE, "p": q.p}
    else:
        query = {"variant": EFAE}
    return {
        "agents": list(inst.agents),
        "items": list(inst.items),
        "valuations": [list(r) for r in inst.valuations],
        "assigned": {inst.items[a]: inst.agents[o] for a, o in enumerate(inst.gamma) if o is not None},
        "query": query,
    }


def parse_instance(text: str) -> Instance:
    return instance_from_doc(_load(text))


def serialize_instance(inst: Instance) -> str:
    return canonical(instance_to_doc(inst))


def allocation_to_doc(inst: Instance, alloc: Allocation) -> dict:
    return {"assigned": {inst.items[a]: inst.agents[o] for a, o in enumerate(alloc.owner) if o is not None}}


def serialize_allocation(inst: Instance, alloc: Allocation) -> str:
    return canonical(allocation_to_doc(inst, alloc))


def parse_allocation(inst: Instance, text: str) -> Allocation:
    """Items missing from the map stay unallocated."""
    doc = _load(text)
    _need(isinstance(doc, dict) and set(doc) == {"assigned"}, "allocation document needs exactly 'assigned'")
    _need(isinstance(doc["assigned"], dict), "'assigned' must be an object")
    a_idx = {a: i for i, a in enumerate(inst.agents)}
    i_idx = {a: i for i, a in enumerate(inst.items)}
    owner = [None] * inst.m
    for item, agent in doc["assigned"].items():
        _need(item in i_idx, f"unknown item {item!r}")
        _need(isinstance(agent, str) and agent in a_idx, f"unknown agent {agent!r}")
        owner[i_idx[item]] = a_idx[agent]
    return Allocation(tuple(owner))


# -- graphs ------------------------------------------------------------------


def parse_graph(text: str):
    """``p n m`` header, ``e u v`` edges (1-based); any ``c v color`` line makes it colored.

    Returns a :class:`Graph` (vertices shifted to 0-based) or a
    :class:`ColoredGraph` whose vertex labels are the 1-based numbers.
    """
    n = m = None
    edges, colors = [], {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        try:
            nums = [int(t) for t in line[1:]]
        except ValueError:
            raise ParseError(f"non-integer field in {raw.strip()!r}", lineno, 1) from None
        tag = line[0]
        if tag == "p" and len(nums) == 2 and n is None:
            n, m = nums
        elif tag == "e" and len(nums) == 2 and n is not None:
            edges.append(tuple(nums))
        elif tag == "c" and len(nums) == 2 and n is not None:
            if nums[0] in colors:
                raise MalformedGraph(f"vertex {nums[0]} colored twice")
            colors[nums[0]] = nums[1]
        else:
            raise ParseError(f"unexpected line {raw.strip()!r}", lineno, 1)
    if n is None:
        raise ParseError("missing 'p n m' header", 1, 1)
    if len(edges) != m:
        raise MalformedGraph(f"header announces {m} edges, found {len(edges)}")
    if any(not (1 <= u <= n and 1 <= v <= n) for u, v in edges):
        raise MalformedGraph("edge endpoint out of range")
    if not colors:
        return Graph.of(n, [(u - 1, v - 1) for u, v in edges])
    if set(colors) != set(range(1, n + 1)):
        raise MalformedGraph("every vertex needs exactly one color")
    q = max(colors.values())
    if min(colors.values()) < 1:
        raise MalformedGraph("colors are numbered from 1")
    classes = [[v for v in range(1, n + 1) if colors[v] == c] for c in range(1, q + 1)]
    return ColoredGraph.of(classes, edges)


def format_graph(g) -> str:
    if isinstance(g, ColoredGraph):
        lines = [f"p {sum(len(c) for c in g.colors)} {len(g.edges)}"]
        lines += [f"e {u} {v}" for u, v in g.edges]
        lines += [f"c {v} {c + 1}" for c, vs in enumerate(g.colors) for v in vs]
    else:
        lines = [f"p {g.num_vertices} {len(g.edges)}"]
        lines += [f"e {u + 1} {v + 1}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


# -- random instances --------------------------------------------------------


@dataclass(frozen=True)
class GenSpec:
    seed: int
    n: int
    m: int
    n_t: int
    m_t: int
    vmax: int = 3
    open_fraction: float = 0.5
    variant: str = EFAE
    p: int = 2
    max_retries: int = 1000

    def check(self):
        if not (1 <= self.n_t <= self.n) or not (0 <= self.m_t <= self.m) or (self.m and not self.m_t):
            raise BadParams("need 1 <= n_t <= n and 1 <= m_t <= m")
        if self.vmax < 0 or not 0.0 <= self.open_fraction <= 1.0:
            raise BadParams("vmax must be >= 0 and open_fraction within [0, 1]")
        if self.variant not in (EFAE, REFAE, FEFAE):
            raise BadParams(f"unknown variant {self.variant!r}")
        if self.variant != EFAE and not 1 <= self.p <= self.n:
            raise BadParams("need 1 <= p <= n")


def _spread(rng, count, kinds):
    """Assign ``count`` slots to ``kinds`` labels, every label used at least once."""
    labels = list(range(kinds)) + [rng.randrange(kinds) for _ in range(count - kinds)]
    rng.shuffle(labels)
    return labels


def gen_random(spec: GenSpec) -> Instance:
    """Draw an ``n_t x m_t`` base matrix with distinct rows and columns, then replicate."""
    spec.check()
    rng = random.Random(spec.seed)
    for _ in range(spec.max_retries):
        base = [[rng.randint(0, spec.vmax) for _ in range(spec.m_t)] for _ in range(spec.n_t)]
        cols = list(zip(*base)) if spec.m_t else []
        if len(set(map(tuple, base))) == spec.n_t and len(set(cols)) == len(cols):
            break
    else:
        raise GenRetryExhausted(f"no {spec.n_t}x{spec.m_t} matrix with distinct rows and columns in {spec.max_retries} draws")
    agent_type = _spread(rng, spec.n, spec.n_t)
    item_type = _spread(rng, spec.m, spec.m_t) if spec.m else []
    vals = [[base[agent_type[i]][item_type[a]] for a in range(spec.m)] for i in range(spec.n)]
    k = round(spec.open_fraction * spec.m)
    opens = set(rng.sample(range(spec.m), k))
    gamma = {a: rng.randrange(spec.n) for a in range(spec.m) if a not in opens}
    if spec.variant == REFAE:
        query = Query.refae(rng.sample(range(spec.n), spec.p))
    elif spec.variant == FEFAE:
        query = Query.fefae(spec.p)
    else:
        query = Query.efae()
    return make_instance(vals, gamma, query)


def read_text(path) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def read_instance(path) -> Instance:
    return parse_instance(read_text(path))


def write_text(path, text: str, newline: Optional[bool] = False):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + ("\n" if newline else ""))
