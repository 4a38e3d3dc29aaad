"""Cluster-migration flow graph and churn/retention/tenure statistics.

The graph is built from per-bin player->label maps. Players with activity
gaps count as departing when absent next bin and joining when they return;
links only ever connect adjacent bins.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .profiles import BASE_FAMILY, LABELS, LABEL_DESCRIPTIONS, label_color


@dataclass(slots=True)
class FlowNode:
    node_id: str
    bin_index: int
    label: str
    size: int
    joining: int
    departing: int
    color: str
    description: str


@dataclass(slots=True)
class FlowLink:
    source: str
    target: str
    value: int


@dataclass(slots=True)
class FlowGraph:
    nodes: list
    links: list
    #: player -> {bin_index -> label}; kept for drill-down statistics
    trajectories: dict = field(default_factory=dict)
    n_bins: int = 0

    def node(self, node_id: str) -> FlowNode:
        for n in self.nodes:
            if n.node_id == node_id:
                return n
        raise KeyError(node_id)


def _node_id(bin_index: int, label: str) -> str:
    return f"{bin_index}:{label}"


def build_flow_graph(assignments_by_bin: list[dict]) -> FlowGraph:
    """assignments_by_bin[t] maps player_id -> label for every active player.

    Node sizes, joining/departing counts and adjacent-bin link values all
    derive from these maps; flow conservation holds by construction.
    """
    n_bins = len(assignments_by_bin)
    actives = [set(a) for a in assignments_by_bin]
    nodes = []
    for t, assign in enumerate(assignments_by_bin):
        members = defaultdict(set)
        for player, label in assign.items():
            if label not in BASE_FAMILY:
                raise ValueError(f"unknown label {label!r}")
            members[label].add(player)
        prev = actives[t - 1] if t > 0 else set()
        nxt = actives[t + 1] if t < n_bins - 1 else set()
        for label in LABELS:
            if label not in members:
                continue
            ms = members[label]
            joining = len(ms) if t == 0 else len(ms - prev)
            departing = len(ms) if t == n_bins - 1 else len(ms - nxt)
            nodes.append(FlowNode(_node_id(t, label), t, label, len(ms),
                                  joining, departing, label_color(label),
                                  LABEL_DESCRIPTIONS[label]))
    links = []
    for t in range(n_bins - 1):
        pair_counts: Counter = Counter()
        for player, label in assignments_by_bin[t].items():
            nxt_label = assignments_by_bin[t + 1].get(player)
            if nxt_label is not None:
                pair_counts[(label, nxt_label)] += 1
        for src_label in LABELS:
            for dst_label in LABELS:
                v = pair_counts.get((src_label, dst_label), 0)
                if v > 0:
                    links.append(FlowLink(_node_id(t, src_label),
                                          _node_id(t + 1, dst_label), v))
    trajectories: dict = defaultdict(dict)
    for t, assign in enumerate(assignments_by_bin):
        for player, label in assign.items():
            trajectories[player][t] = label
    return FlowGraph(nodes, links, dict(trajectories), n_bins)


def retention_series(assignments_by_bin: list[dict]) -> list[float]:
    """Fraction of bin-t players active in bin t+1; final bin omitted."""
    if len(assignments_by_bin) < 2:
        raise ValueError("need at least 2 bins")
    out = []
    for t in range(len(assignments_by_bin) - 1):
        cur = set(assignments_by_bin[t])
        nxt = set(assignments_by_bin[t + 1])
        out.append(len(cur & nxt) / len(cur))
    return out


def insularity(graph: FlowGraph, label: str) -> float:
    """Mean over bins of P(same label next bin | active next bin)."""
    ratios = []
    for t in range(graph.n_bins - 1):
        stayed = eligible = 0
        for traj in graph.trajectories.values():
            if traj.get(t) == label and (t + 1) in traj:
                eligible += 1
                if traj[t + 1] == label:
                    stayed += 1
        if eligible:
            ratios.append(stayed / eligible)
    if not ratios:
        raise ValueError(f"label {label!r} never manifested before the final bin")
    return sum(ratios) / len(ratios)


def lifetime_stats(graph: FlowGraph) -> dict:
    """Mean months active per entry label (label of the player's first bin)."""
    lifetimes = defaultdict(list)
    for traj in graph.trajectories.values():
        first = min(traj)
        lifetimes[traj[first]].append(len(traj))
    return {label: sum(v) / len(v) for label, v in lifetimes.items()}


def distinct_clusters_by_tenure(graph: FlowGraph) -> dict:
    """tenure (active bins) -> mean distinct labels visited over a lifetime."""
    per_tenure = defaultdict(list)
    for traj in graph.trajectories.values():
        per_tenure[len(traj)].append(len(set(traj.values())))
    return {t: sum(v) / len(v) for t, v in sorted(per_tenure.items())}


def entry_exit_distribution(graph: FlowGraph) -> tuple[dict, dict]:
    """(entry shares, exit shares) over labels; each sums to 1."""
    entry: Counter = Counter()
    exit_: Counter = Counter()
    for traj in graph.trajectories.values():
        entry[traj[min(traj)]] += 1
        exit_[traj[max(traj)]] += 1
    n = len(graph.trajectories)
    if n == 0:
        raise ValueError("empty graph")
    return ({l: c / n for l, c in entry.items()},
            {l: c / n for l, c in exit_.items()})


def check_conservation(graph: FlowGraph) -> None:
    """Raise AssertionError unless both node flow equalities hold."""
    incoming: Counter = Counter()
    outgoing: Counter = Counter()
    for link in graph.links:
        incoming[link.target] += link.value
        outgoing[link.source] += link.value
    for node in graph.nodes:
        if node.size != node.joining + incoming[node.node_id]:
            raise AssertionError(f"inflow conservation broken at {node.node_id}")
        if node.size != node.departing + outgoing[node.node_id]:
            raise AssertionError(f"outflow conservation broken at {node.node_id}")
