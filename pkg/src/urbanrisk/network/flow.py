"""Edge-disjoint route counting via unit-capacity max-flow.

By Menger's theorem the maximum number of edge-disjoint directed paths from
s to t equals the max-flow value when every retained edge gets capacity 1.
Augmentation uses BFS (shortest augmenting path), which is exact and fast at
city scale.
"""

from __future__ import annotations

from collections import deque

from urbanrisk.network.model import ConditionedNetwork


def max_edge_disjoint_paths(cn: ConditionedNetwork, source: str, sink: str) -> int:
    """Maximum number of edge-disjoint paths over retained edges."""
    if source == sink:
        raise ValueError("source and sink must differ")
    for node in (source, sink):
        if node not in cn.base:
            raise ValueError(f"unknown node {node!r}")

    # Residual arcs: [to, capacity, index_of_reverse]. Built in sorted edge-id
    # order so augmentation order (and therefore work done) is deterministic.
    adj: dict[str, list[int]] = {nid: [] for nid in cn.base.nodes}
    arcs: list[list] = []

    def add_arc(u: str, v: str) -> None:
        adj[u].append(len(arcs))
        arcs.append([v, 1, len(arcs) + 1])
        adj[v].append(len(arcs))
        arcs.append([u, 0, len(arcs) - 1])

    for eid in sorted(cn.base.edges):
        if cn.is_retained(eid):
            e = cn.base.edges[eid]
            add_arc(e.frm, e.to)

    flow = 0
    while True:
        parent_arc: dict[str, int] = {source: -1}
        queue = deque([source])
        while queue and sink not in parent_arc:
            u = queue.popleft()
            for ai in adj[u]:
                v, cap, _ = arcs[ai]
                if cap > 0 and v not in parent_arc:
                    parent_arc[v] = ai
                    queue.append(v)
        if sink not in parent_arc:
            return flow
        # Unit capacities: each augmenting path adds exactly one disjoint path.
        v = sink
        while v != source:
            ai = parent_arc[v]
            arcs[ai][1] -= 1
            arcs[arcs[ai][2]][1] += 1
            v = arcs[arcs[ai][2]][0]
        flow += 1


def evacuation_redundancy(cn: ConditionedNetwork, building: str, shelter: str) -> int:
    """Edge-disjoint feasible routes from a building to a shelter.

    Feasibility means the edge is retained under the hazard scenario; no time
    budget is enforced on the disjoint counting.
    """
    if building == shelter:
        raise ValueError("building and shelter must be different nodes")
    if shelter not in cn.base:
        raise ValueError(f"shelter node {shelter!r} not in network")
    if building not in cn.base:
        raise ValueError(f"building node {building!r} not in network")
    return max_edge_disjoint_paths(cn, building, shelter)
