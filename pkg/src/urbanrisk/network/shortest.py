"""Shortest-path queries on conditioned networks.

Costs are free-flow travel time times the hazard multiplier over retained
edges. Tie-breaking is fully deterministic: among equal-cost destinations the
smallest node id wins, and among equal-cost paths the lexicographically
smallest node-id sequence is returned.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable

from urbanrisk.network.model import ConditionedNetwork

UNREACHABLE = math.inf

_REL_TOL = 1e-9


@dataclass(frozen=True)
class RouteResult:
    cost_s: float
    destination: str | None
    path: tuple[str, ...]

    @property
    def reachable(self) -> bool:
        return math.isfinite(self.cost_s)


def _dijkstra(cn: ConditionedNetwork, source: str, reverse: bool = False) -> dict[str, float]:
    dist = {source: 0.0}
    heap = [(0.0, source)]
    done: set[str] = set()
    edges_of = cn.retained_in_edges if reverse else cn.retained_out_edges
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for e in edges_of(u):
            v = e.frm if reverse else e.to
            nd = d + cn.weight(e)
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def _lex_smallest_path(
    cn: ConditionedNetwork,
    origin: str,
    destination: str,
    dist_from_origin: dict[str, float],
    total: float,
) -> tuple[str, ...]:
    """Walk greedily from origin, always taking the smallest next node id that
    still lies on some minimum-cost path. Greedy prefix choice is exactly
    lexicographic order over node-id sequences."""
    dist_to_dest = _dijkstra(cn, destination, reverse=True)
    tol = _REL_TOL * max(1.0, total)
    path = [origin]
    u = origin
    spent = 0.0
    while u != destination:
        candidates = []
        for e in cn.retained_out_edges(u):
            tail = dist_to_dest.get(e.to)
            if tail is None:
                continue
            if abs(spent + cn.weight(e) - (total - tail)) <= tol:
                candidates.append((e.to, cn.weight(e)))
        if not candidates:  # numerically impossible on a reachable pair
            raise RuntimeError(f"no optimal continuation from {u} toward {destination}")
        v, w = min(candidates)
        path.append(v)
        spent += w
        u = v
    return tuple(path)


def shortest_route(
    cn: ConditionedNetwork, origin: str, destinations: Iterable[str]
) -> RouteResult:
    """Minimum-cost route from origin to the best of several destinations."""
    dests = sorted(set(destinations))
    if not dests:
        raise ValueError("destination set must be non-empty")
    if origin not in cn.base:
        raise ValueError(f"unknown origin node {origin!r}")
    unknown = [d for d in dests if d not in cn.base]
    if unknown:
        raise ValueError(f"unknown destination node(s): {unknown}")

    dist = _dijkstra(cn, origin)
    reachable = [(dist[d], d) for d in dests if d in dist]
    if not reachable:
        return RouteResult(cost_s=UNREACHABLE, destination=None, path=())
    best_cost, best_dest = min(reachable)  # ties resolved by smallest node id
    path = _lex_smallest_path(cn, origin, best_dest, dist, best_cost)
    return RouteResult(cost_s=best_cost, destination=best_dest, path=path)


def hazard_travel_time(
    cn: ConditionedNetwork, origin: str, destinations: Iterable[str]
) -> float:
    """Hazard-conditioned travel time in seconds; UNREACHABLE (inf) if no path."""
    return shortest_route(cn, origin, destinations).cost_s
