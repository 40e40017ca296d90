"""Graph analyses expressed through the interface algebra.

Four worked applications over weighted graphs and control-flow modules:

* network throughput (capacities; augmenting-path max flow decides the
  interface statement ``phi_N <= d : O false``),
* shortest path (min-plus closure of the adjacency matrix),
* task scheduling (max-plus critical path over an edge-variable encoding),
* worst-case reaction time of multi-threaded synchronous modules (per-node
  IO interfaces combined with max-plus products and Kronecker interleaving).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product

from .kernel import (
    NEG_INF,
    POS_INF,
    And,
    Atom,
    ExtNat,
    FALSE,
    Implies,
    Interface,
    Not,
    OPlus,
    Delay,
    SchedAlgebraError,
    TRUE,
    TypeExpr,
    arrow_interface,
    check_extnat,
    conj,
    delay_interface,
    embed_interface,
    ext_add,
    ext_max,
    ext_min,
    format_extnat,
    oprod,
)
from .algebra import IOInterface, io_compose, io_kron, io_project
from .tropical import MAX_PLUS, MIN_PLUS, TropicalMatrix, closure, matrix


class AnalysisError(SchedAlgebraError):
    """Malformed graph or module input."""


# --------------------------------------------------------------------------
# weighted graphs


@dataclass(frozen=True)
class GraphEdge:
    src: str
    dst: str
    weight: ExtNat


@dataclass(frozen=True)
class WeightedGraph:
    nodes: tuple[str, ...]
    edges: tuple[GraphEdge, ...]
    source: str | None = None
    sink: str | None = None

    def __post_init__(self):
        seen = set(self.nodes)
        if len(seen) != len(self.nodes):
            raise AnalysisError("duplicate node names")
        for edge in self.edges:
            if edge.src not in seen or edge.dst not in seen:
                raise AnalysisError(f"edge {edge.src}->{edge.dst} uses unknown nodes")
            check_extnat(edge.weight)
        for special in (self.source, self.sink):
            if special is not None and special not in seen:
                raise AnalysisError(f"unknown node {special!r}")

    def out_edges(self, node: str) -> list[GraphEdge]:
        return [e for e in self.edges if e.src == node]

    def in_edges(self, node: str) -> list[GraphEdge]:
        return [e for e in self.edges if e.dst == node]


def parse_graph(text: str) -> WeightedGraph:
    """Structured text: ``nodes``, ``edge src dst w``, ``source``, ``sink``."""
    nodes: list[str] = []
    edges: list[GraphEdge] = []
    source = sink = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        keyword = parts[0]
        try:
            if keyword == "nodes":
                nodes.extend(parts[1:])
            elif keyword == "edge":
                if len(parts) != 4:
                    raise AnalysisError("edge needs: edge SRC DST WEIGHT")
                edges.append(GraphEdge(parts[1], parts[2], _parse_weight(parts[3])))
            elif keyword == "source":
                source = parts[1]
            elif keyword == "sink":
                sink = parts[1]
            else:
                raise AnalysisError(f"unknown keyword {keyword!r}")
        except (AnalysisError, IndexError, ValueError) as exc:
            raise AnalysisError(f"line {number}: {exc}") from None
    return WeightedGraph(tuple(nodes), tuple(edges), source, sink)


def _parse_weight(text: str) -> ExtNat:
    if text == "-inf":
        return NEG_INF
    if text == "+inf":
        return POS_INF
    return check_extnat(int(text))


def load_graph(path) -> WeightedGraph:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_graph(handle.read())


# --------------------------------------------------------------------------
# network flow


def _cap_interface(d: ExtNat) -> TypeExpr:
    return embed_interface(delay_interface(d, FALSE))


def build_flow_type(g: WeightedGraph) -> TypeExpr:
    """The capacity reading: every node clause routes its traffic onward.

    Edges of capacity 0 (or -inf) behave as cut off and are dropped; a node
    left with no exits is specified as unreachable.
    """
    if g.source is None or g.sink is None:
        raise AnalysisError("flow analysis needs designated source and sink")
    clauses: list[TypeExpr] = [
        Implies(TRUE, And(Atom(g.source), _cap_interface(POS_INF)))
    ]
    for node in g.nodes:
        outs = [e for e in g.out_edges(node) if e.weight not in (0, NEG_INF)]
        if outs:
            parts = [And(Atom(e.dst), _cap_interface(e.weight)) for e in outs]
            clauses.append(Implies(Atom(node), oprod(*parts)))
        elif node != g.sink:
            clauses.append(Implies(Atom(node), FALSE))
        if node == g.sink:
            clauses.append(Implies(Atom(node), And(TRUE, _cap_interface(POS_INF))))
    return conj(*clauses)


def max_throughput(g: WeightedGraph) -> ExtNat:
    """Maximum flow from source to sink by shortest augmenting paths.

    Decides the smallest d with ``phi_N <= d : O false``; unbounded networks
    yield +inf.
    """
    if g.source is None or g.sink is None:
        raise AnalysisError("flow analysis needs designated source and sink")
    if g.source == g.sink:
        return POS_INF
    residual: dict[tuple[str, str], ExtNat] = {}
    neighbors: dict[str, list[str]] = {node: [] for node in g.nodes}

    def add_arc(u: str, v: str, cap: ExtNat):
        if (u, v) not in residual:
            residual[(u, v)] = 0
            neighbors[u].append(v)
        residual[(u, v)] = ext_add(residual[(u, v)], cap)

    for edge in g.edges:
        if edge.weight in (0, NEG_INF):
            continue
        add_arc(edge.src, edge.dst, edge.weight)
        add_arc(edge.dst, edge.src, 0)

    total: ExtNat = 0
    while True:
        # BFS for the shortest augmenting path
        parent: dict[str, str] = {g.source: g.source}
        queue = deque([g.source])
        while queue and g.sink not in parent:
            u = queue.popleft()
            for v in neighbors[u]:
                if v not in parent and residual[(u, v)] > 0:
                    parent[v] = u
                    queue.append(v)
        if g.sink not in parent:
            return total
        path = []
        v = g.sink
        while v != g.source:
            path.append((parent[v], v))
            v = parent[v]
        bottleneck = min(residual[arc] for arc in path)
        if bottleneck == POS_INF:
            return POS_INF
        for u, v in path:
            if residual[(u, v)] != POS_INF:
                residual[(u, v)] -= bottleneck
            residual[(v, u)] = ext_add(residual[(v, u)], bottleneck)
        total = ext_add(total, bottleneck)


def flow_expansion(g: WeightedGraph, depth: int = 3) -> list[tuple[tuple[str, ...], ExtNat]]:
    """Per-path capacities of the source expansion to the given node depth.

    Reproduces the numbers of the substitution derivation: each path from
    the source across ``depth`` nodes is capped by the minimum capacity along
    it.
    """
    if g.source is None:
        raise AnalysisError("expansion needs a designated source")
    out: list[tuple[tuple[str, ...], ExtNat]] = []

    def walk(node: str, path: tuple[str, ...], cap: ExtNat):
        outs = [e for e in g.out_edges(node) if e.weight not in (0, NEG_INF)]
        if len(path) == depth or not outs:
            out.append((path, cap))
            return
        for edge in outs:
            walk(edge.dst, path + (edge.dst,), ext_min(cap, edge.weight))

    walk(g.source, (g.source,), POS_INF)
    return out


# --------------------------------------------------------------------------
# shortest path


def build_shortest_type(g: WeightedGraph) -> TypeExpr:
    """Distance reading: one embedded arrow interface per edge."""
    if not g.edges:
        return TRUE
    clauses = [
        embed_interface(arrow_interface(Atom(e.src), e.weight, Atom(e.dst)))
        for e in g.edges
    ]
    return conj(*clauses)


def adjacency_matrix(g: WeightedGraph) -> TropicalMatrix:
    """Min-plus adjacency: parallel edges keep the shortest distance."""
    index = {node: i for i, node in enumerate(g.nodes)}
    rows = [[POS_INF] * len(g.nodes) for _ in g.nodes]
    for edge in g.edges:
        i, j = index[edge.src], index[edge.dst]
        rows[i][j] = ext_min(rows[i][j], edge.weight)
    return matrix(rows, MIN_PLUS)


def distance_matrix(g: WeightedGraph) -> TropicalMatrix:
    return closure(adjacency_matrix(g))


def shortest_path(g: WeightedGraph, src: str, dst: str) -> ExtNat:
    if src not in g.nodes or dst not in g.nodes:
        raise AnalysisError(f"unknown nodes {src!r} or {dst!r}")
    dist = distance_matrix(g)
    index = {node: i for i, node in enumerate(g.nodes)}
    return dist[index[src], index[dst]]


def merge_controls(g: WeightedGraph, pairs) -> WeightedGraph:
    """Identify control nodes: each merge (node, representative).

    The quotient keeps the representative, resolves parallel edges by
    minimum and drops self loops; its shortest paths lower-bound the
    original's.
    """
    parent = {node: node for node in g.nodes}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for node, rep in pairs:
        if node not in parent or rep not in parent:
            raise AnalysisError(f"cannot merge unknown nodes {node!r}, {rep!r}")
        root_node, root_rep = find(node), find(rep)
        if root_node != root_rep:
            parent[root_node] = root_rep
    nodes = tuple(node for node in g.nodes if find(node) == node)
    best: dict[tuple[str, str], ExtNat] = {}
    order: list[tuple[str, str]] = []
    for edge in g.edges:
        u, v = find(edge.src), find(edge.dst)
        if u == v:
            continue
        if (u, v) not in best:
            best[(u, v)] = edge.weight
            order.append((u, v))
        else:
            best[(u, v)] = ext_min(best[(u, v)], edge.weight)
    edges = tuple(GraphEdge(u, v, best[(u, v)]) for u, v in order)
    source = find(g.source) if g.source is not None else None
    sink = find(g.sink) if g.sink is not None else None
    return WeightedGraph(nodes, edges, source, sink)


def parse_merge_spec(text: str) -> list[tuple[str, str]]:
    """``C=B,U=V`` merges C into B and U into V."""
    pairs = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise AnalysisError(f"bad merge spec {part!r}; expected NODE=NODE")
        node, rep = part.split("=", 1)
        pairs.append((node.strip(), rep.strip()))
    return pairs


# --------------------------------------------------------------------------
# task scheduling


def _edge_var(e: GraphEdge) -> Atom:
    return Atom(f"{e.src}.{e.dst}")


def build_task_type(g: WeightedGraph) -> TypeExpr:
    """Edge-variable encoding: a task starts once all its inputs are ready."""
    if g.source is None or g.sink is None:
        raise AnalysisError("task analysis needs designated source and sink")
    clauses: list[TypeExpr] = []
    for node in g.nodes:
        ins = g.in_edges(node)
        outs = g.out_edges(node)
        antecedent = TRUE if node == g.source else conj(*[_edge_var(e) for e in ins])
        for edge in outs:
            clauses.append(
                embed_interface(arrow_interface(antecedent, edge.weight, _edge_var(edge)))
            )
    sink_inputs = conj(*[_edge_var(e) for e in g.in_edges(g.sink)])
    clauses.append(embed_interface(arrow_interface(sink_inputs, 0, Atom(g.sink))))
    return conj(*clauses)


def _topological_order(g: WeightedGraph) -> list[str]:
    indegree = {node: 0 for node in g.nodes}
    for edge in g.edges:
        indegree[edge.dst] += 1
    queue = deque(node for node in g.nodes if indegree[node] == 0)
    order = []
    while queue:
        node = queue.popleft()
        order.append(node)
        for edge in g.out_edges(node):
            indegree[edge.dst] -= 1
            if indegree[edge.dst] == 0:
                queue.append(edge.dst)
    if len(order) != len(g.nodes):
        raise AnalysisError("cycle detected: task graphs must be acyclic")
    return order


def critical_path(g: WeightedGraph) -> ExtNat:
    """Longest source-to-sink completion time in max-plus."""
    if g.source is None or g.sink is None:
        raise AnalysisError("task analysis needs designated source and sink")
    order = _topological_order(g)
    start: dict[str, ExtNat] = {node: NEG_INF for node in g.nodes}
    start[g.source] = 0
    for node in order:
        if start[node] == NEG_INF:
            continue
        for edge in g.out_edges(node):
            start[edge.dst] = ext_max(start[edge.dst], ext_add(start[node], edge.weight))
    return start[g.sink]


# --------------------------------------------------------------------------
# CKAG modules

TRANSIENT_KINDS = ("transient", "emit", "goto", "present", "nothing", "wabort")
STATE_KINDS = ("pause", "halt")
ALL_KINDS = TRANSIENT_KINDS + STATE_KINDS + ("fork", "join")


@dataclass(frozen=True)
class CkagNode:
    node_id: str
    kind: str
    cost: ExtNat


@dataclass(frozen=True)
class CkagEdge:
    src: str
    dst: str
    label: str | None = None
    cond: tuple[str, bool] | None = None
    noninst: bool = False


@dataclass(frozen=True)
class CkagThread:
    name: str
    nodes: tuple[str, ...]


@dataclass(frozen=True)
class CkagModule:
    name: str
    entry_label: str
    entry_node: str
    exit_label: str
    exit_node: str
    nodes: tuple[CkagNode, ...]
    edges: tuple[CkagEdge, ...]
    threads: tuple[CkagThread, ...] = ()

    def __post_init__(self):
        ids = {n.node_id for n in self.nodes}
        if len(ids) != len(self.nodes):
            raise AnalysisError("duplicate node ids")
        for node in self.nodes:
            if node.kind not in ALL_KINDS:
                raise AnalysisError(f"unknown node kind {node.kind!r}")
        for edge in self.edges:
            if edge.src not in ids or edge.dst not in ids:
                raise AnalysisError(f"edge {edge.src}->{edge.dst} uses unknown nodes")
        if self.entry_node not in ids or self.exit_node not in ids:
            raise AnalysisError("entry/exit nodes must exist")
        for thread in self.threads:
            for node_id in thread.nodes:
                if node_id not in ids:
                    raise AnalysisError(f"thread {thread.name} uses unknown node {node_id}")
        if self.threads:
            if self.node(self.entry_node).kind != "fork":
                raise AnalysisError("a threaded module must enter at its fork")
            if self.node(self.exit_node).kind != "join":
                raise AnalysisError("a threaded module must exit at its join")

    def node(self, node_id: str) -> CkagNode:
        for node in self.nodes:
            if node.node_id == node_id:
                return node
        raise AnalysisError(f"unknown node {node_id!r}")

    def out_edges(self, node_id: str) -> list[CkagEdge]:
        return [e for e in self.edges if e.src == node_id]

    def in_edges(self, node_id: str) -> list[CkagEdge]:
        return [e for e in self.edges if e.dst == node_id]


def parse_ckag(text: str) -> CkagModule:
    """Line format: ``module``, ``entry LABEL NODE``, ``exit LABEL NODE``,
    ``node ID KIND [cost=N]``, ``edge SRC DST [label=L] [when=SIG|!SIG]
    [noninst]``, ``thread NAME NODE...``."""
    name = None
    entry = exit_ = None
    nodes: list[tuple[str, str, ExtNat | None]] = []
    edges: list[CkagEdge] = []
    threads: list[CkagThread] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        keyword = parts[0]
        try:
            if keyword == "module":
                name = parts[1]
            elif keyword == "entry":
                entry = (parts[1], parts[2])
            elif keyword == "exit":
                exit_ = (parts[1], parts[2])
            elif keyword == "node":
                node_id, kind = parts[1], parts[2]
                cost = None
                for extra in parts[3:]:
                    if extra.startswith("cost="):
                        cost = _parse_weight(extra[len("cost="):])
                    else:
                        raise AnalysisError(f"unknown node attribute {extra!r}")
                nodes.append((node_id, kind, cost))
            elif keyword == "edge":
                src, dst = parts[1], parts[2]
                label = None
                cond = None
                noninst = False
                for extra in parts[3:]:
                    if extra.startswith("label="):
                        label = extra[len("label="):]
                    elif extra.startswith("when="):
                        raw_cond = extra[len("when="):]
                        if raw_cond.startswith("!"):
                            cond = (raw_cond[1:], False)
                        else:
                            cond = (raw_cond, True)
                    elif extra == "noninst":
                        noninst = True
                    else:
                        raise AnalysisError(f"unknown edge attribute {extra!r}")
                edges.append(CkagEdge(src, dst, label, cond, noninst))
            elif keyword == "thread":
                threads.append(CkagThread(parts[1], tuple(parts[2:])))
            else:
                raise AnalysisError(f"unknown keyword {keyword!r}")
        except (AnalysisError, IndexError) as exc:
            raise AnalysisError(f"line {number}: {exc}") from None
    if name is None or entry is None or exit_ is None:
        raise AnalysisError("a module needs 'module', 'entry' and 'exit' lines")
    default_fork_cost = len(threads) + 1 if threads else 1
    built_nodes = tuple(
        CkagNode(
            node_id,
            kind,
            cost if cost is not None else (default_fork_cost if kind == "fork" else 1),
        )
        for node_id, kind, cost in nodes
    )
    return CkagModule(
        name=name,
        entry_label=entry[0],
        entry_node=entry[1],
        exit_label=exit_[0],
        exit_node=exit_[1],
        nodes=built_nodes,
        edges=tuple(edges),
        threads=tuple(threads),
    )


def load_ckag(path) -> CkagModule:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_ckag(handle.read())


# --------------------------------------------------------------------------
# instantaneous-path timing of a component (a thread or a whole sequential
# module)

_EXIT = "__exit__"


def component_signals(module: CkagModule, node_set: frozenset[str]) -> tuple[str, ...]:
    """Signals tested on edges inside the component, in first-use order."""
    seen: list[str] = []
    for edge in module.edges:
        if edge.src in node_set and edge.cond is not None and edge.cond[0] not in seen:
            seen.append(edge.cond[0])
    return tuple(seen)


def _component_arcs(
    module: CkagModule,
    node_set: frozenset[str],
    join_nodes: frozenset[str],
    final_node: str | None,
    assignment: dict[str, bool],
):
    """Weighted arcs of the instantaneous graph under one signal assignment.

    Vertices are node ids plus ("in", s) / ("out", s) per state node and the
    exit marker.  Traversing a node pays its cost on the way out.  Edges into
    ``join_nodes`` arrive at the exit; a ``final_node`` (sequential module)
    exits on completion.
    """
    arcs: list[tuple[object, object, ExtNat]] = []
    for edge in module.edges:
        if edge.src not in node_set:
            continue
        if edge.dst not in node_set and edge.dst not in join_nodes:
            raise AnalysisError(
                f"edge {edge.src}->{edge.dst} leaves the component"
            )
        if edge.cond is not None and assignment.get(edge.cond[0]) != edge.cond[1]:
            continue
        node = module.node(edge.src)
        target = _EXIT if edge.dst in join_nodes else edge.dst
        if edge.noninst:
            if node.kind not in STATE_KINDS:
                raise AnalysisError(
                    f"non-instantaneous edge from transient node {edge.src}"
                )
            arcs.append((("out", edge.src), target, node.cost))
        else:
            arcs.append((edge.src, target, node.cost))
    if final_node is not None:
        arcs.append((final_node, _EXIT, module.node(final_node).cost))
    for node_id in sorted(node_set):
        node = module.node(node_id)
        if node.kind not in STATE_KINDS:
            continue
        # entering a delay node settles there unless a weak exit fires
        weak_fires = any(
            not e.noninst
            and (e.cond is None or assignment.get(e.cond[0]) == e.cond[1])
            for e in module.out_edges(node_id)
        )
        if not weak_fires:
            arcs.append((node_id, ("in", node_id), node.cost))
        if node.kind == "halt":
            arcs.append((("out", node_id), ("in", node_id), node.cost))
    return arcs


def _longest_paths(arcs, start) -> dict:
    """Max-plus distances from ``start`` over an acyclic arc list."""
    adjacency: dict[object, list[tuple[object, ExtNat]]] = {}
    vertices = set()
    indegree: dict[object, int] = {}
    for src, dst, weight in arcs:
        adjacency.setdefault(src, []).append((dst, weight))
        vertices.add(src)
        vertices.add(dst)
        indegree[dst] = indegree.get(dst, 0) + 1
        indegree.setdefault(src, indegree.get(src, 0))
    order = []
    queue = deque(sorted((v for v in vertices if indegree.get(v, 0) == 0), key=str))
    degrees = dict(indegree)
    while queue:
        v = queue.popleft()
        order.append(v)
        for dst, _ in adjacency.get(v, ()):
            degrees[dst] -= 1
            if degrees[dst] == 0:
                queue.append(dst)
    if len(order) != len(vertices):
        raise AnalysisError("instantaneous cycle: module is not causal")
    dist = {v: NEG_INF for v in vertices}
    if start not in dist:
        return dist
    dist[start] = 0
    for v in order:
        if dist[v] == NEG_INF:
            continue
        for dst, weight in adjacency.get(v, ()):
            dist[dst] = ext_max(dist[dst], ext_add(dist[v], weight))
    return dist


@dataclass(frozen=True)
class ComponentTiming:
    """Instantaneous path bounds of one component.

    Rows: exit first, then one per state entered; columns: initial entry
    first, then one per state resumed.  The matrix is max-plus.
    """

    entry_label: str
    exit_label: str
    states: tuple[str, ...]
    full: TropicalMatrix

    def bundled(self) -> TropicalMatrix:
        """Collapse all states into one in/out pair by entrywise maximum."""
        if not self.states:
            return self.full
        k = len(self.states)
        through = self.full[0, 0]
        source = max(self.full[0, 1 + j] for j in range(k))
        sink = max(self.full[1 + i, 0] for i in range(k))
        internal = max(
            self.full[1 + i, 1 + j] for i in range(k) for j in range(k)
        )
        return matrix([[through, source], [sink, internal]], MAX_PLUS)


def component_timing(
    module: CkagModule,
    node_ids,
    entry_node: str,
    entry_label: str,
    exit_label: str,
    join_nodes=(),
    final_node: str | None = None,
) -> ComponentTiming:
    node_set = frozenset(node_ids)
    join_set = frozenset(join_nodes)
    states = tuple(
        n.node_id for n in module.nodes
        if n.node_id in node_set and n.kind in STATE_KINDS
    )
    signals = component_signals(module, node_set)
    size = 1 + len(states)
    best = [[NEG_INF] * size for _ in range(size)]
    for values in product((False, True), repeat=len(signals)):
        assignment = dict(zip(signals, values))
        arcs = _component_arcs(module, node_set, join_set, final_node, assignment)
        starts = [entry_node] + [("out", s) for s in states]
        targets = [_EXIT] + [("in", s) for s in states]
        for col, start in enumerate(starts):
            dist = _longest_paths(arcs, start)
            for row, target in enumerate(targets):
                value = dist.get(target, NEG_INF)
                best[row][col] = ext_max(best[row][col], value)
    return ComponentTiming(entry_label, exit_label, states, matrix(best, MAX_PLUS))


def _state_bundle_interface(timing: ComponentTiming, name: str) -> IOInterface:
    """IO interface of a component over entry/exit and bundled state controls."""
    bundled = timing.bundled()
    if not timing.states:
        return IOInterface(
            (Atom(timing.entry_label),),
            (Atom(timing.exit_label),),
            bundled,
        )
    return IOInterface(
        (Atom(timing.entry_label), Atom(f"out.{name}")),
        (Atom(timing.exit_label), Atom(f"in.{name}")),
        bundled,
    )


# --------------------------------------------------------------------------
# WCRT composition


@dataclass(frozen=True)
class WcrtResult:
    """Module interface plus the compositional intermediates."""

    threads: tuple[tuple[str, IOInterface], ...]
    kron: IOInterface | None
    parallel: IOInterface | None
    module: IOInterface


def _thread_entry(module: CkagModule, thread: CkagThread) -> tuple[str, str]:
    for edge in module.out_edges(module.entry_node):
        if edge.dst in thread.nodes:
            if edge.label is None:
                raise AnalysisError(f"fork edge into thread {thread.name} needs a label")
            return edge.dst, edge.label
    raise AnalysisError(f"no fork edge starts thread {thread.name}")


def _thread_exit_label(module: CkagModule, thread: CkagThread) -> str:
    labels = [
        e.label
        for e in module.in_edges(module.exit_node)
        if e.src in thread.nodes and e.label is not None
    ]
    if not labels:
        raise AnalysisError(f"no labelled edge from thread {thread.name} to the join")
    return labels[0]


def thread_interface(module: CkagModule, thread: CkagThread) -> IOInterface:
    entry_node, entry_label = _thread_entry(module, thread)
    exit_label = _thread_exit_label(module, thread)
    timing = component_timing(
        module,
        thread.nodes,
        entry_node,
        entry_label,
        exit_label,
        join_nodes=(module.exit_node,),
    )
    return _state_bundle_interface(timing, thread.name)


def _instrumented(iface: IOInterface) -> IOInterface:
    """Add the parked-at-exit resumption column to a stateless thread."""
    if len(iface.outputs) == 2:
        return iface
    exit_control = iface.outputs[0]
    rows = [[iface.matrix[0, 0], 0]]
    return IOInterface((iface.inputs[0], exit_control), iface.outputs, matrix(rows, MAX_PLUS))


def wcrt_compose(module: CkagModule) -> WcrtResult:
    """Whole-module WCRT interface over entry/exit and state controls.

    Sequential modules are timed directly.  A fork/join module interleaves
    its instrumented thread interfaces with the Kronecker product, keeps the
    jointly-started and jointly-resumed input controls, and wraps the result
    in the fork and join interfaces.
    """
    if not module.threads:
        body = frozenset(n.node_id for n in module.nodes)
        timing = component_timing(
            module,
            body,
            module.entry_node,
            module.entry_label,
            module.exit_label,
            final_node=module.exit_node,
        )
        return WcrtResult((), None, None, _state_bundle_interface(timing, module.name))

    thread_ifaces = [
        (thread.name, thread_interface(module, thread)) for thread in module.threads
    ]
    instrumented = [_instrumented(iface) for _, iface in thread_ifaces]
    combined = instrumented[0]
    for nxt in instrumented[1:]:
        combined = io_kron(combined, nxt)
    all_entry = 0
    all_resume = len(combined.inputs) - 1
    parallel = io_project(combined, (all_entry, all_resume), range(len(combined.outputs)))

    fork_cost = module.node(module.entry_node).cost
    join_cost = module.node(module.exit_node).cost
    fork_iface = IOInterface(
        (Atom(module.entry_label), Atom(f"out.{module.name}")),
        parallel.inputs,
        matrix([[fork_cost, NEG_INF], [NEG_INF, 0]], MAX_PLUS),
    )
    join_rows = [
        [join_cost if j == 0 else NEG_INF for j in range(len(parallel.outputs))],
        [NEG_INF if j == 0 else join_cost for j in range(len(parallel.outputs))],
    ]
    join_iface = IOInterface(
        parallel.outputs,
        (Atom(module.exit_label), Atom(f"in.{module.name}")),
        matrix(join_rows, MAX_PLUS),
    )
    module_iface = io_compose(io_compose(fork_iface, parallel), join_iface)
    return WcrtResult(tuple(thread_ifaces), combined, parallel, module_iface)


# --------------------------------------------------------------------------
# per-node interfaces


def _enter_controls(module: CkagModule, node_id: str) -> tuple[TypeExpr, ...]:
    controls: list[TypeExpr] = []
    if node_id == module.entry_node:
        controls.append(Atom(module.entry_label))
    for edge in module.in_edges(node_id):
        if edge.noninst:
            continue
        controls.append(Atom(edge.label or f"{edge.src}.{node_id}"))
    return tuple(controls)


def _exit_control(module: CkagModule, edge: CkagEdge) -> TypeExpr:
    if edge.dst == module.exit_node and module.node(module.exit_node).kind != "join":
        return Atom(module.exit_label)
    return Atom(edge.label or f"{edge.src}.{edge.dst}")


def node_interface(module: CkagModule, node_id: str) -> tuple[IOInterface, ...]:
    """The WCRT interfaces contributed by one node.

    Transient nodes yield one interface; a pause yields the enter side and
    the resume side; a halt absorbs both into its state; fork and join yield
    their synchronisation matrices.
    """
    node = module.node(node_id)
    enters = _enter_controls(module, node_id)
    if node.kind in TRANSIENT_KINDS:
        outs = [e for e in module.out_edges(node_id) if not e.noninst]
        exits = tuple(_exit_control(module, e) for e in outs)
        if node_id == module.exit_node and not outs:
            exits = (Atom(module.exit_label),)
        rows = [[node.cost] * len(enters) for _ in exits]
        return (IOInterface(enters, exits, matrix(rows, MAX_PLUS)),)
    if node.kind == "pause":
        weak = [e for e in module.out_edges(node_id) if not e.noninst]
        resume = [e for e in module.out_edges(node_id) if e.noninst]
        outputs = tuple(_exit_control(module, e) for e in weak) + (Atom(f"in.{node_id}"),)
        enter_rows = [[node.cost] * len(enters) for _ in outputs]
        enter_iface = IOInterface(enters, outputs, matrix(enter_rows, MAX_PLUS))
        if not resume:
            return (enter_iface,)
        resume_iface = IOInterface(
            (Atom(f"out.{node_id}"),),
            tuple(_exit_control(module, e) for e in resume),
            matrix([[node.cost]] * len(resume), MAX_PLUS),
        )
        return (enter_iface, resume_iface)
    if node.kind == "halt":
        inputs = (Atom(f"out.{node_id}"),) + enters
        rows = [[node.cost] * len(inputs)]
        return (IOInterface(inputs, (Atom(f"in.{node_id}"),), matrix(rows, MAX_PLUS)),)
    if node.kind == "fork":
        starts = []
        for thread in module.threads:
            _, label = _thread_entry(module, thread)
            starts.append(Atom(label))
        resumes = [_thread_resume_control(module, t) for t in module.threads]
        outputs = (conj(*starts), conj(*resumes))
        return (
            IOInterface(
                (Atom(module.entry_label), Atom(f"out.{module.name}")),
                outputs,
                matrix([[node.cost, NEG_INF], [NEG_INF, 0]], MAX_PLUS),
            ),
        )
    if node.kind == "join":
        per_thread = []
        for thread in module.threads:
            exit_label = _thread_exit_label(module, thread)
            states = [
                n.node_id for n in module.nodes
                if n.node_id in thread.nodes and n.kind in STATE_KINDS
            ]
            options = [Atom(exit_label)]
            if states:
                options.append(Atom(f"in.{thread.name}"))
            per_thread.append(options)
        inputs = tuple(conj(*combo) for combo in product(*per_thread))
        rows = [
            [node.cost if j == 0 else NEG_INF for j in range(len(inputs))],
            [NEG_INF if j == 0 else node.cost for j in range(len(inputs))],
        ]
        return (
            IOInterface(
                inputs,
                (Atom(module.exit_label), Atom(f"in.{module.name}")),
                matrix(rows, MAX_PLUS),
            ),
        )
    raise AnalysisError(f"unknown node kind {node.kind!r}")


def _thread_resume_control(module: CkagModule, thread: CkagThread) -> TypeExpr:
    states = [
        n.node_id for n in module.nodes
        if n.node_id in thread.nodes and n.kind in STATE_KINDS
    ]
    if states:
        return Atom(f"out.{thread.name}")
    return Atom(_thread_exit_label(module, thread))


# --------------------------------------------------------------------------
# sequential step encodings


def sequential_step_types(s1: str, s2: str) -> tuple[TypeExpr, TypeExpr]:
    """The two transition formulas between states.

    The first (instantaneous step, within the instant) moves from leaving
    s1 to entering s2; the second (tick step, across the clock tick) is the
    weak implication between the states.
    """
    instantaneous = Implies(Atom(f"out.{s1}"), Delay(Atom(f"in.{s2}")))
    tick = OPlus(Not(Atom(f"in.{s1}")), Atom(f"out.{s2}"))
    return instantaneous, tick
