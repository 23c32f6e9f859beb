"""
Gadget generators: multicolored clique -> EFAE and independent set -> REFAE.

Both constructions are exact and deterministic; they come with solution
mappers in both directions, which the test-suite uses to check that a
gadget is a YES instance precisely when the source graph has a solution.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from envyext.core import Allocation, Instance, Query, make_instance
from envyext.errors import BadParams, InternalInvariantViolation, MalformedGraph, NotAClique


@dataclass(frozen=True)
class ColoredGraph:
    """``colors[c]`` lists the vertices of color ``c``; vertex labels are unique."""

    colors: tuple
    edges: tuple

    @classmethod
    def of(cls, colors: Iterable[Iterable], edges: Iterable[Sequence]) -> "ColoredGraph":
        g = cls(tuple(tuple(vs) for vs in colors), tuple(tuple(e) for e in edges))
        g.validate()
        return g

    @property
    def q(self) -> int:
        return len(self.colors)

    def color_of(self) -> dict:
        return {v: c for c, vs in enumerate(self.colors) for v in vs}

    def validate(self):
        color = {}
        for c, vs in enumerate(self.colors):
            if not vs:
                raise MalformedGraph(f"color {c + 1} has no vertices")
            for v in vs:
                if v in color:
                    raise MalformedGraph(f"vertex {v!r} appears twice")
                color[v] = c
        seen = set()
        for e in self.edges:
            if len(e) != 2 or e[0] not in color or e[1] not in color:
                raise MalformedGraph(f"edge {e!r} has unknown endpoints")
            u, v = e
            if color[u] == color[v]:
                raise MalformedGraph(f"edge {e!r} joins two vertices of the same color")
            key = frozenset(e)
            if key in seen:
                raise MalformedGraph(f"edge {e!r} is repeated")
            seen.add(key)
        for i, j in combinations(range(self.q), 2):
            if not self.edges_between(i, j, color):
                raise MalformedGraph(f"no edge between colors {i + 1} and {j + 1}")

    def edges_between(self, i: int, j: int, color=None) -> list:
        """Edges of E_ij oriented as (vertex of color i, vertex of color j), input order."""
        color = color or self.color_of()
        out = []
        for u, v in self.edges:
            if (color[u], color[v]) == (i, j):
                out.append((u, v))
            elif (color[u], color[v]) == (j, i):
                out.append((v, u))
        return out

    def adjacent(self, u, v) -> bool:
        return (u, v) in self.edges or (v, u) in self.edges


@dataclass
class McqLayout:
    """Where every gadget agent and open item sits in the generated instance."""

    vertex_agent: dict = field(default_factory=dict)
    edge_agent: dict = field(default_factory=dict)
    s_item: list = field(default_factory=list)
    tau_item: dict = field(default_factory=dict)
    item_class: list = field(default_factory=list)


def designed_item_classes(q: int) -> list:
    """Every item class the clique gadget is built from, materialised or not."""
    out = []
    for i in range(1, q + 1):
        out += [f"box{i}", f"tri{i}", f"star{i}", f"s{i}"]
    for i, j in combinations(range(1, q + 1), 2):
        out += [f"box{i}-{j}", f"tri{i}-{j}", f"star{i}-{j}", f"tau{i}-{j}"]
    return out


def _build_mcq(g: ColoredGraph):
    g.validate()
    q = g.q
    pairs = list(combinations(range(q), 2))
    layout = McqLayout()
    agents = []  # (id, kind, group, ordinal, group size, endpoint ordinals)
    for i, vs in enumerate(g.colors):
        for x, v in enumerate(vs, start=1):
            layout.vertex_agent[v] = len(agents)
            agents.append((f"alpha{i + 1}.{x}", "v", i, x, len(vs), None))
    pos = {v: x for vs in g.colors for x, v in enumerate(vs, start=1)}
    for i, j in pairs:
        es = g.edges_between(i, j)
        for z, (u, v) in enumerate(es, start=1):
            layout.edge_agent[(u, v)] = len(agents)
            agents.append((f"eta{i + 1}-{j + 1}.{z}", "e", (i, j), z, len(es), (pos[u], pos[v])))

    def lab(group):
        return f"{group + 1}" if isinstance(group, int) else f"{group[0] + 1}-{group[1] + 1}"

    item_ids, item_class, gamma = [], [], []

    def add(cls, holder, copies):
        for c in range(1, copies + 1):
            item_ids.append(f"{cls}@{agents[holder][0]}#{c}")
            item_class.append(cls)
            gamma.append(holder)

    for idx, (_, kind, group, x, size, ends) in enumerate(agents):
        tag = lab(group)
        add(f"box{tag}", idx, x)
        add(f"tri{tag}", idx, 2 * size * size - x * x - x)
        add(f"star{tag}", idx, 1)
        if kind == "e":
            i, j = group
            for color, y in ((i, ends[0]), (j, ends[1])):
                s = len(g.colors[color])
                add(f"box{color + 1}", idx, y)
                add(f"tri{color + 1}", idx, 2 * s * s - y * y - y)
    for i in range(q):
        layout.s_item.append(len(item_ids))
        item_ids.append(f"s{i + 1}")
        item_class.append(f"s{i + 1}")
        gamma.append(None)
    for i, j in pairs:
        layout.tau_item[(i, j)] = len(item_ids)
        item_ids.append(f"tau{i + 1}-{j + 1}")
        item_class.append(f"tau{i + 1}-{j + 1}")
        gamma.append(None)
    layout.item_class = item_class

    rows = []
    for _, kind, group, x, size, _ in agents:
        own = 2 * size * size + x * x
        tag = lab(group)
        if kind == "v":
            i = group
            incident = {lab(p) for p in pairs if i in p}
            liked_open = {f"s{i + 1}"} | {f"tau{t}" for t in incident}
        else:
            incident = set()
            liked_open = {f"tau{tag}"}
        row = []
        for cls in item_class:
            if cls == f"box{tag}":
                row.append(2 * x + 1)
            elif cls == f"tri{tag}":
                row.append(1)
            elif cls == f"star{tag}":
                row.append(0)
            elif cls.startswith(("box", "tri")):
                row.append(0)
            elif cls.startswith("star"):
                row.append(0 if cls[4:] in incident else own)
            else:
                row.append(1 if cls in liked_open else 0)
        rows.append(row)

    owner = {a: h for a, h in enumerate(gamma) if h is not None}
    inst = make_instance(rows, owner, Query.efae(), [a[0] for a in agents], item_ids)
    return inst, layout


def mcq_to_efae(g: ColoredGraph) -> Instance:
    """EFAE instance with an envy-free extension iff ``g`` has a multicolored clique."""
    return _build_mcq(g)[0]


def mcq_layout(g: ColoredGraph) -> McqLayout:
    return _build_mcq(g)[1]


def clique_to_allocation(g: ColoredGraph, clique: Iterable) -> Allocation:
    clique = list(clique)
    color = g.color_of()
    if any(v not in color for v in clique):
        raise NotAClique("clique contains unknown vertices")
    by_color = {color[v]: v for v in clique}
    if len(clique) != g.q or len(by_color) != g.q:
        raise NotAClique("need exactly one vertex of every color")
    for u, v in combinations(clique, 2):
        if not g.adjacent(u, v):
            raise NotAClique(f"{u!r} and {v!r} are not adjacent")
    inst, layout = _build_mcq(g)
    owner = list(inst.gamma)
    for i in range(g.q):
        owner[layout.s_item[i]] = layout.vertex_agent[by_color[i]]
    for (i, j), item in layout.tau_item.items():
        owner[item] = layout.edge_agent[(by_color[i], by_color[j])]
    return Allocation(tuple(owner))


def extract_clique(g: ColoredGraph, inst: Instance, alloc: Allocation) -> tuple:
    """Read the clique back from an envy-free extension of the gadget."""
    layout = mcq_layout(g)
    agent_vertex = {a: v for v, a in layout.vertex_agent.items()}
    color = g.color_of()
    clique = []
    for i, item in enumerate(layout.s_item):
        v = agent_vertex.get(alloc.owner[item])
        if v is None or color[v] != i:
            raise InternalInvariantViolation(f"s{i + 1} did not go to a vertex agent of its color")
        clique.append(v)
    for u, v in combinations(clique, 2):
        if not g.adjacent(u, v):
            raise InternalInvariantViolation(f"extracted vertices {u!r}, {v!r} are not adjacent")
    return tuple(clique)


# -- independent set ---------------------------------------------------------


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0 .. num_vertices - 1``."""

    num_vertices: int
    edges: tuple

    @classmethod
    def of(cls, num_vertices: int, edges: Iterable[Sequence[int]]) -> "Graph":
        es = tuple(tuple(e) for e in edges)
        seen = set()
        for u, v in es:
            if not (0 <= u < num_vertices and 0 <= v < num_vertices) or u == v:
                raise MalformedGraph(f"bad edge {(u, v)!r}")
            if frozenset((u, v)) in seen:
                raise MalformedGraph(f"edge {(u, v)!r} is repeated")
            seen.add(frozenset((u, v)))
        return cls(num_vertices, es)


def is_to_refae(g: Graph, ell: int, fefae: bool = False) -> Instance:
    """REFAE instance (recipients: the last two agents) with an envy-free
    extension iff ``g`` has an independent set of size ``ell``.

    When ``2 * ell > |V|`` the deficit of the first extra agent is moved onto
    its value for the second extra agent's item, keeping every value
    non-negative while preserving the "exactly ell items" constraint.
    """
    nv, ne = g.num_vertices, len(g.edges)
    if not 1 <= ell <= nv:
        raise BadParams(f"need 1 <= ell <= |V| = {nv}, got {ell}")
    picker, rest = ne, ne + 1
    n_items = ne + 2 + nv
    rows = []
    for i, (u, v) in enumerate(g.edges):
        row = [0] * n_items
        row[i] = nv
        row[picker] = nv - 1
        row[ne + 2 + u] = row[ne + 2 + v] = 1
        rows.append(row)
    row = [0] * n_items
    row[picker] = max(nv - 2 * ell, 0)
    row[rest] = max(2 * ell - nv, 0)
    for j in range(nv):
        row[ne + 2 + j] = 1
    rows.append(row)
    row = [2 * nv - ell] * ne + [0, nv] + [1] * nv
    rows.append(row)
    agents = [f"edge{i + 1}" for i in range(ne)] + ["pick", "rest"]
    items = [f"g{i + 1}" for i in range(ne + 2)] + [f"v{j + 1}" for j in range(nv)]
    query = Query.fefae(2) if fefae else Query.refae([picker, rest])
    return make_instance(rows, {i: i for i in range(ne + 2)}, query, agents, items)


def decode_is_gadget(inst: Instance) -> tuple:
    """Recover ``(graph, ell)`` from an instance built by :func:`is_to_refae`."""
    ne = inst.n - 2
    nv = inst.m - ne - 2
    edges = []
    for i in range(ne):
        ends = [j for j in range(nv) if inst.valuations[i][ne + 2 + j] == 1]
        if len(ends) != 2:
            raise InternalInvariantViolation("instance is not an independent-set gadget")
        edges.append(tuple(ends))
    row = inst.valuations[ne]
    ell2 = nv - row[ne] + row[ne + 1]
    return Graph(nv, tuple(edges)), ell2 // 2


def extract_independent_set(inst: Instance, alloc: Allocation) -> tuple:
    """Vertices whose items went to the first extra agent, checked for size and independence."""
    g, ell = decode_is_gadget(inst)
    ne, nv = len(g.edges), g.num_vertices
    picked = tuple(j for j in range(nv) if alloc.owner[ne + 2 + j] == ne)
    rest = sum(1 for j in range(nv) if alloc.owner[ne + 2 + j] == ne + 1)
    if len(picked) != ell or rest != nv - ell:
        raise InternalInvariantViolation(
            f"extra agents hold {len(picked)} and {rest} items, expected {ell} and {nv - ell}"
        )
    chosen = set(picked)
    for u, v in g.edges:
        if u in chosen and v in chosen:
            raise InternalInvariantViolation(f"picked vertices {u} and {v} are adjacent")
    return picked
