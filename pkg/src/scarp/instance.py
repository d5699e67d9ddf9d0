"""Undirected arc-routing instances and the directed task graph built from them.

An instance is a connected graph whose required edges carry a positive demand.
Internally every required edge becomes two opposite service arcs ("tasks") plus
a synthetic zero-cost arc anchored at the depot, and all deadhead moves are
priced by a precomputed shortest-path matrix over the full edge set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra


class InstanceError(ValueError):
    """Malformed instance text or violated instance invariant."""


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    cost: float
    demand: float = 0.0  # 0 marks a non-required (deadhead-only) edge

    @property
    def required(self) -> bool:
        return self.demand > 0


@dataclass(frozen=True)
class Instance:
    name: str
    node_count: int
    depot: int
    capacity: float
    edges: tuple[Edge, ...]  # required edges first, file order preserved
    required_count: int
    fleet_hint: int | None = None
    comment: str | None = None

    @property
    def required_edges(self) -> tuple[Edge, ...]:
        return self.edges[: self.required_count]

    @property
    def nonrequired_edges(self) -> tuple[Edge, ...]:
        return self.edges[self.required_count :]


# ---------------------------------------------------------------------------
# DAT parsing
# ---------------------------------------------------------------------------

_HEADER_RE = re.compile(r"^\s*([A-Za-z_]+)\s*:\s*(.*?)\s*$")
_REQ_RE = re.compile(
    r"^\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*coste\s+(\S+)\s+demanda\s+(\S+)\s*$", re.I
)
_NOREQ_RE = re.compile(r"^\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*coste\s+(\S+)\s*$", re.I)

_INT_HEADERS = {"VERTICES", "ARISTAS_REQ", "ARISTAS_NOREQ", "VEHICULOS", "DEPOSITO"}
_KNOWN_HEADERS = _INT_HEADERS | {
    "NOMBRE",
    "COMENTARIO",
    "CAPACIDAD",
    "TIPO_COSTES_ARISTAS",  # accepted, ignored
    "COSTE_TOTAL_REQ",  # accepted, ignored
    "LISTA_ARISTAS_REQ",
    "LISTA_ARISTAS_NOREQ",
}


def _number(tok: str, what: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise InstanceError(f"line {lineno}: cannot parse {what} {tok!r}") from None


def parse_instance(source) -> Instance:
    """Parse the DAT dialect (keyword : value headers plus edge list sections).

    `source` may be a string or any iterable of lines.
    """
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = [ln.rstrip("\n") for ln in source]

    headers: dict[str, str] = {}
    req_edges: list[Edge] = []
    noreq_edges: list[Edge] = []
    section = None  # None | "req" | "noreq"

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        m = _HEADER_RE.match(line)
        if m and m.group(1).upper() in _KNOWN_HEADERS:
            key = m.group(1).upper()
            value = m.group(2)
            if key == "LISTA_ARISTAS_REQ":
                section = "req"
            elif key == "LISTA_ARISTAS_NOREQ":
                section = "noreq"
            else:
                section = None
                headers[key] = value
            continue
        if section == "req":
            m = _REQ_RE.match(line)
            if not m:
                raise InstanceError(f"line {lineno}: malformed required-edge line {line!r}")
            u, v = int(m.group(1)), int(m.group(2))
            cost = _number(m.group(3), "cost", lineno)
            demand = _number(m.group(4), "demand", lineno)
            req_edges.append(Edge(u, v, cost, demand))
            continue
        if section == "noreq":
            m = _NOREQ_RE.match(line)
            if not m:
                raise InstanceError(f"line {lineno}: malformed non-required-edge line {line!r}")
            u, v = int(m.group(1)), int(m.group(2))
            cost = _number(m.group(3), "cost", lineno)
            noreq_edges.append(Edge(u, v, cost, 0.0))
            continue
        raise InstanceError(f"line {lineno}: malformed header keyword in {line!r}")

    for key in ("NOMBRE", "VERTICES", "ARISTAS_REQ", "ARISTAS_NOREQ", "CAPACIDAD", "DEPOSITO"):
        if key not in headers:
            raise InstanceError(f"missing header {key}")

    def _int_header(key: str) -> int:
        try:
            return int(headers[key])
        except ValueError:
            raise InstanceError(f"header {key} is not an integer: {headers[key]!r}") from None

    node_count = _int_header("VERTICES")
    n_req = _int_header("ARISTAS_REQ")
    n_noreq = _int_header("ARISTAS_NOREQ")
    depot = _int_header("DEPOSITO")
    capacity = _number(headers["CAPACIDAD"], "capacity", 0)
    fleet = _int_header("VEHICULOS") if "VEHICULOS" in headers else None

    if len(req_edges) != n_req:
        raise InstanceError(
            f"edge count mismatch: ARISTAS_REQ declares {n_req}, list has {len(req_edges)}"
        )
    if len(noreq_edges) != n_noreq:
        raise InstanceError(
            f"edge count mismatch: ARISTAS_NOREQ declares {n_noreq}, list has {len(noreq_edges)}"
        )

    inst = Instance(
        name=headers["NOMBRE"],
        node_count=node_count,
        depot=depot,
        capacity=capacity,
        edges=tuple(req_edges) + tuple(noreq_edges),
        required_count=n_req,
        fleet_hint=fleet,
        comment=headers.get("COMENTARIO"),
    )
    validate_instance(inst)
    return inst


def validate_instance(inst: Instance) -> None:
    """Check the structural invariants; raise InstanceError on the first violation."""
    n = inst.node_count
    if n <= 0:
        raise InstanceError("node count must be positive")
    if not (1 <= inst.depot <= n):
        raise InstanceError(f"depot {inst.depot} outside [1, {n}]")
    if inst.capacity <= 0:
        raise InstanceError("capacity must be positive")
    if inst.required_count < 1:
        raise InstanceError("instance has no required edges")
    for e in inst.edges:
        if not (1 <= e.u <= n and 1 <= e.v <= n):
            raise InstanceError(f"edge ({e.u},{e.v}) endpoint outside [1, {n}]")
        if e.cost <= 0:
            raise InstanceError(f"edge ({e.u},{e.v}) has nonpositive cost {e.cost}")
    for e in inst.required_edges:
        if e.demand <= 0:
            raise InstanceError(f"required edge ({e.u},{e.v}) has nonpositive demand")
        if e.demand > inst.capacity:
            raise InstanceError(
                f"required edge ({e.u},{e.v}) demand {e.demand} exceeds capacity {inst.capacity}"
            )
    for e in inst.nonrequired_edges:
        if e.demand != 0:
            raise InstanceError(f"non-required edge ({e.u},{e.v}) carries demand")

    # depot must reach every required edge through the full edge set
    adj: list[list[int]] = [[] for _ in range(n + 1)]
    for e in inst.edges:
        adj[e.u].append(e.v)
        adj[e.v].append(e.u)
    seen = [False] * (n + 1)
    stack = [inst.depot]
    seen[inst.depot] = True
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if not seen[y]:
                seen[y] = True
                stack.append(y)
    for e in inst.required_edges:
        if not (seen[e.u] and seen[e.v]):
            raise InstanceError(f"required edge ({e.u},{e.v}) unreachable from depot")


def format_instance(inst: Instance) -> str:
    """Serialize back to the DAT dialect (round-trips through parse_instance)."""
    out = [f"NOMBRE : {inst.name}"]
    if inst.comment is not None:
        out.append(f"COMENTARIO : {inst.comment}")
    out.append(f"VERTICES : {inst.node_count}")
    out.append(f"ARISTAS_REQ : {inst.required_count}")
    out.append(f"ARISTAS_NOREQ : {len(inst.edges) - inst.required_count}")
    if inst.fleet_hint is not None:
        out.append(f"VEHICULOS : {inst.fleet_hint}")
    out.append(f"CAPACIDAD : {_fmt_num(inst.capacity)}")
    out.append("LISTA_ARISTAS_REQ :")
    for e in inst.required_edges:
        out.append(
            f"( {e.u}, {e.v})  coste {_fmt_num(e.cost)}  demanda {_fmt_num(e.demand)}"
        )
    if inst.nonrequired_edges:
        out.append("LISTA_ARISTAS_NOREQ :")
        for e in inst.nonrequired_edges:
            out.append(f"( {e.u}, {e.v})  coste {_fmt_num(e.cost)}")
    out.append(f"DEPOSITO : {inst.depot}")
    return "\n".join(out) + "\n"


def _fmt_num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def load_instance(path) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


# ---------------------------------------------------------------------------
# Directed task graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TaskGraph:
    """Two opposite service arcs per required edge plus the depot arc (id 0).

    dist[a, b] is the deadhead cost from head(a) to tail(b) along a shortest
    path over ALL edges, required or not.
    """

    instance: Instance
    tail: np.ndarray  # node id per arc
    head: np.ndarray
    cost: np.ndarray  # service cost per arc (0 for depot arc)
    demand: np.ndarray  # mean demand per arc (0 for depot arc)
    edge_index: np.ndarray  # required-edge index per arc, -1 for depot arc
    inverse: np.ndarray  # opposite-orientation arc id
    dist: np.ndarray  # (n_arcs, n_arcs) deadhead matrix
    node_dist: np.ndarray  # (n+1, n+1) node-level shortest paths, row/col 0 unused

    depot_arc: int = 0

    @property
    def n_tasks(self) -> int:
        """Number of required edges (half the service arcs)."""
        return (len(self.tail) - 1) // 2

    @property
    def n_arcs(self) -> int:
        return len(self.tail)

    def arcs_of_edge(self, edge_idx: int) -> tuple[int, int]:
        return 2 * edge_idx + 1, 2 * edge_idx + 2


def node_shortest_paths(inst: Instance) -> np.ndarray:
    """All-pairs node shortest paths by repeated Dijkstra over every edge."""
    n = inst.node_count
    rows, cols, vals = [], [], []
    for e in inst.edges:
        if e.u == e.v:
            continue  # loops never shorten a path
        rows += [e.u - 1, e.v - 1]
        cols += [e.v - 1, e.u - 1]
        vals += [e.cost, e.cost]
    graph = coo_matrix((vals, (rows, cols)), shape=(n, n))
    # parallel edges: coo duplicates sum on conversion, so reduce to min explicitly
    dedup: dict[tuple[int, int], float] = {}
    for r, c, v in zip(rows, cols, vals):
        key = (r, c)
        if key not in dedup or v < dedup[key]:
            dedup[key] = v
    if dedup:
        r2, c2 = zip(*dedup.keys())
        graph = coo_matrix((list(dedup.values()), (r2, c2)), shape=(n, n))
    dmat = dijkstra(graph.tocsr(), directed=False)
    out = np.full((n + 1, n + 1), np.inf)
    out[1:, 1:] = dmat
    np.fill_diagonal(out, 0.0)
    return out


def build_task_graph(inst: Instance) -> TaskGraph:
    validate_instance(inst)
    nd = node_shortest_paths(inst)
    r = inst.required_count
    n_arcs = 2 * r + 1
    tail = np.zeros(n_arcs, dtype=np.int32)
    head = np.zeros(n_arcs, dtype=np.int32)
    cost = np.zeros(n_arcs, dtype=np.float64)
    demand = np.zeros(n_arcs, dtype=np.float64)
    edge_index = np.full(n_arcs, -1, dtype=np.int32)
    inverse = np.zeros(n_arcs, dtype=np.int32)
    tail[0] = head[0] = inst.depot
    for i, e in enumerate(inst.required_edges):
        a, b = 2 * i + 1, 2 * i + 2
        tail[a], head[a] = e.u, e.v
        tail[b], head[b] = e.v, e.u
        cost[a] = cost[b] = e.cost
        demand[a] = demand[b] = e.demand
        edge_index[a] = edge_index[b] = i
        inverse[a], inverse[b] = b, a
    dist = nd[head][:, tail]  # dist[a, b] = node_dist[head[a], tail[b]]
    if not np.all(np.isfinite(dist)):
        raise InstanceError("some required edge is unreachable from the rest")
    for arr in (tail, head, cost, demand, edge_index, inverse, dist, nd):
        arr.setflags(write=False)
    return TaskGraph(
        instance=inst,
        tail=tail,
        head=head,
        cost=cost,
        demand=demand,
        edge_index=edge_index,
        inverse=inverse,
        dist=dist,
        node_dist=nd,
    )
