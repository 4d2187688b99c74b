"""Staged information flow graphs and an exact max-flow oracle.

The graph models a storage network's life: a source feeds n stage-0
"out" vertices with capacity alpha each.  When a batch of r nodes is
regenerated in stage s, each newcomer p gets three vertices: in:p:s with
d incoming beta1 edges from "out" vertices of strictly earlier stages,
an infinite edge in:p:s -> mid:p:s, beta2 edges in:p:s -> mid:q:s to the
other newcomers q of the batch, and mid:p:s -> out:p:s with capacity
alpha.  A data collector attaches to the most recent "out" vertex of k
distinct nodes with infinite edges.  The minimum source-collector cut
caps how much data the collector can ever receive.

Infinite capacity is a sentinel one larger than the sum of all finite
capacities, so augmenting-path max-flow stays in exact rationals.

adversarial_history builds, for a cut type (l_1, ..., l_k), the failure
pattern that makes the staged cut expression tight: the collector's
nodes are regenerated in groups of l_i per stage, newcomers draw helpers
first from the collector nodes regenerated in earlier stages, and the
batch is padded with r - l_i bystander nodes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .cutbound import BoundParams

SOURCE = "source"
DC = "dc"


class HistoryError(ValueError):
    """Repair history violates a structural constraint."""


class CutKindError(ValueError):
    """Malformed first/second kind assignment for a cut evaluation."""


@dataclass(frozen=True)
class Stage:
    regenerated: tuple[int, ...]              # the batch, r node indices
    helpers: tuple[tuple[int, ...], ...]      # aligned with regenerated, d each


@dataclass(frozen=True)
class RepairHistory:
    stages: tuple[Stage, ...]


def out_name(node: int, stage: int) -> str:
    return f"out:{node}:{stage}"


def in_name(node: int, stage: int) -> str:
    return f"in:{node}:{stage}"


def mid_name(node: int, stage: int) -> str:
    return f"mid:{node}:{stage}"


class FlowGraph:
    """Capacitated digraph plus the staging metadata the cuts need."""

    def __init__(self, edges: dict[tuple[str, str], Fraction | None],
                 params: BoundParams, n: int,
                 history: RepairHistory, dc_nodes: tuple[int, ...],
                 latest_out: dict[int, str]):
        finite_total = sum(c for c in edges.values() if c is not None)
        self.infinite = finite_total + 1
        self.edges = {
            uv: (self.infinite if c is None else c) for uv, c in edges.items()
        }
        self.params = params
        self.n = n
        self.history = history
        self.dc_nodes = dc_nodes
        self.latest_out = latest_out

    def vertices(self) -> list[str]:
        seen = []
        for u, v in self.edges:
            for x in (u, v):
                if x not in seen:
                    seen.append(x)
        return seen

    def dump(self) -> str:
        """Edge list, one 'from,to,capacity' line, deterministic order."""
        lines = []
        for (u, v) in sorted(self.edges):
            c = self.edges[(u, v)]
            lines.append(f"{u},{v},{'inf' if c == self.infinite else c}")
        return "\n".join(lines) + "\n"


def build_graph(history: RepairHistory, dc_nodes, params: BoundParams) -> FlowGraph:
    """Information flow graph for a failure/repair history and one collector."""
    dc_nodes = tuple(dc_nodes)
    if params.n is not None:
        n = params.n
    else:
        # Node universe defaults to every index the history or collector
        # touches, and at least d + r so a batch always has d helpers.
        referenced = set(dc_nodes)
        for stage in history.stages:
            referenced.update(stage.regenerated)
            for hs in stage.helpers:
                referenced.update(hs)
        n = max([params.d + params.r, *referenced])
    if len(dc_nodes) != params.k or len(set(dc_nodes)) != params.k:
        raise HistoryError(f"collector must attach to k={params.k} distinct nodes")
    if len(history.stages) > params.k:
        raise HistoryError(
            f"history has {len(history.stages)} stages; at most k={params.k} are "
            "needed to analyse one collector"
        )
    if params.beta1 is None or params.beta2 is None:
        raise HistoryError("beta1 and beta2 are required")
    alpha, b1, b2 = params.alpha, params.beta1, params.beta2

    edges: dict[tuple[str, str], Fraction | None] = {}
    latest_out = {v: out_name(v, 0) for v in range(1, n + 1)}
    for v in range(1, n + 1):
        edges[(SOURCE, latest_out[v])] = alpha

    for s, stage in enumerate(history.stages, start=1):
        batch = stage.regenerated
        if len(batch) != params.r or len(set(batch)) != params.r:
            raise HistoryError(f"stage {s} must regenerate exactly r={params.r} distinct nodes")
        if any(not 1 <= v <= n for v in batch):
            raise HistoryError(f"stage {s} regenerates a node outside [1, {n}]")
        if len(stage.helpers) != len(batch):
            raise HistoryError(f"stage {s} needs one helper list per newcomer")
        batch_set = set(batch)
        for p, hs in zip(batch, stage.helpers):
            if len(hs) != params.d or len(set(hs)) != params.d:
                raise HistoryError(f"newcomer {p} needs d={params.d} distinct helpers")
            if batch_set & set(hs):
                raise HistoryError(f"newcomer {p} uses a failed node as helper")
            for h in hs:
                if not 1 <= h <= n:
                    raise HistoryError(f"helper {h} outside [1, {n}]")
                edges[(latest_out[h], in_name(p, s))] = b1
            edges[(in_name(p, s), mid_name(p, s))] = None
            for q in batch:
                if q != p:
                    edges[(in_name(p, s), mid_name(q, s))] = b2
            edges[(mid_name(p, s), out_name(p, s))] = alpha
        for p in batch:
            latest_out[p] = out_name(p, s)

    for v in dc_nodes:
        edges[(latest_out[v], DC)] = None
    return FlowGraph(edges, params, n, history, dc_nodes, latest_out)


def max_flow(g: FlowGraph) -> Fraction:
    """Exact source-to-collector max flow (shortest augmenting paths)."""
    residual: dict[str, dict[str, Fraction]] = {}
    for (u, v), c in g.edges.items():
        residual.setdefault(u, {})[v] = residual.get(u, {}).get(v, Fraction(0)) + c
        residual.setdefault(v, {}).setdefault(u, Fraction(0))
    total = Fraction(0)
    while True:
        parent = {SOURCE: None}
        queue = deque([SOURCE])
        while queue and DC not in parent:
            u = queue.popleft()
            for v, cap in residual.get(u, {}).items():
                if cap > 0 and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if DC not in parent:
            return total
        path = []
        v = DC
        while parent[v] is not None:
            u = parent[v]
            path.append((u, v))
            v = u
        bottleneck = min(residual[u][v] for u, v in path)
        for u, v in path:
            residual[u][v] -= bottleneck
            residual[v][u] += bottleneck
        total += bottleneck


def collector_groups(g: FlowGraph) -> list[tuple[int, set[int]]]:
    """(stage, nodes) groups of collector nodes by final regeneration stage.

    Stage 0 holds collector nodes never regenerated.
    """
    final_stage = {v: 0 for v in g.dc_nodes}
    for s, stage in enumerate(g.history.stages, start=1):
        for p in stage.regenerated:
            if p in final_stage:
                final_stage[p] = max(final_stage[p], s)
    groups: dict[int, set[int]] = {}
    for v, s in final_stage.items():
        groups.setdefault(s, set()).add(v)
    return sorted(groups.items())


def evaluate_cut(g: FlowGraph, kinds) -> Fraction:
    """Capacity of the staged cut described by per-stage kind choices.

    kinds[s-1] is "first" or "second" for stage s.  A first-kind stage
    places the in/mid vertices of its collector-group nodes on the
    collector side; a second-kind stage keeps them on the source side.
    The collector, and the final out vertex of every collector node, are
    always on the collector side.
    """
    kinds = list(kinds)
    if len(kinds) != len(g.history.stages):
        raise CutKindError(
            f"need one kind per stage: {len(g.history.stages)} stages, got {len(kinds)}"
        )
    if any(kind not in ("first", "second") for kind in kinds):
        raise CutKindError("kinds must be 'first' or 'second'")
    groups = dict(collector_groups(g))
    sink_side = {DC}
    for v in g.dc_nodes:
        sink_side.add(g.latest_out[v])
    for s, kind in enumerate(kinds, start=1):
        if kind == "first":
            for p in groups.get(s, ()):
                sink_side.add(in_name(p, s))
                sink_side.add(mid_name(p, s))
    capacity = Fraction(0)
    for (u, v), c in g.edges.items():
        if u not in sink_side and v in sink_side:
            if c == g.infinite:
                raise CutKindError(f"kind assignment cuts the infinite edge {u}->{v}")
            capacity += c
    return capacity


def adversarial_history(cut_type, params: BoundParams) -> tuple[RepairHistory, tuple[int, ...]]:
    """History making the staged cut expression for cut_type achievable.

    Collector nodes are 1..k.  Zero entries are skipped (they are inert
    in the cut expression).  Needs n >= d + r so every batch still has d
    alive helpers; bystander padding comes from nodes k+1..n.
    """
    k, d, r = params.k, params.d, params.r
    if sum(cut_type) != k or any(not 0 <= x <= r for x in cut_type):
        raise ValueError(f"{cut_type} is not a cut type for k={k}, r={r}")
    n = params.n if params.n is not None else d + r
    if n < d + r:
        raise HistoryError(f"need n >= d + r = {d + r}, got {n}")
    parts = [x for x in cut_type if x]
    stages = []
    done = 0  # collector nodes regenerated so far
    for li in parts:
        group = list(range(done + 1, done + li + 1))
        bystanders = [v for v in range(k + 1, n + 1)][: r - li]
        batch = tuple(group + bystanders)
        alive = [v for v in range(1, n + 1) if v not in batch]
        # Prefer collector nodes already regenerated; they sit on the
        # collector side of the cut, so their edges do not cross it.
        preferred = [v for v in range(1, done + 1)]
        rest = [v for v in alive if v not in preferred]
        helpers = tuple(preferred + rest[: d - len(preferred)])
        stages.append(Stage(batch, (helpers,) * len(batch)))
        done += li
    return RepairHistory(tuple(stages)), tuple(range(1, k + 1))
