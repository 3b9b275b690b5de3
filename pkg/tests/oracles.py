"""Independent reference implementations used to check the engine.

Everything here is deliberately naive: Bellman-Ford instead of Dijkstra,
exhaustive enumeration instead of max-flow, direct definitional metric
recomputation. None of it shares code with the package under test.
"""

from __future__ import annotations

import itertools
import math
from collections import deque


def bellman_ford(cn, origin: str) -> dict[str, float]:
    """Textbook Bellman-Ford over retained edges of a conditioned network."""
    nodes = list(cn.base.nodes)
    dist = {n: math.inf for n in nodes}
    dist[origin] = 0.0
    edges = [
        (e.frm, e.to, e.travel_time_s * cn.multiplier(e.id))
        for e in cn.base.edges.values()
        if cn.is_retained(e.id)
    ]
    for _ in range(len(nodes) - 1):
        changed = False
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
        if not changed:
            break
    return dist


def _retained_edge_list(cn):
    return [
        (e.id, e.frm, e.to) for e in cn.base.edges.values() if cn.is_retained(e.id)
    ]


def _reachable(edges, s: str, t: str) -> bool:
    adj = {}
    for _, u, v in edges:
        adj.setdefault(u, []).append(v)
    seen = {s}
    q = deque([s])
    while q:
        u = q.popleft()
        if u == t:
            return True
        for v in adj.get(u, []):
            if v not in seen:
                seen.add(v)
                q.append(v)
    return s == t


def min_edge_cut_bruteforce(cn, s: str, t: str) -> int:
    """Smallest retained-edge set whose removal disconnects s from t.

    By Menger's theorem this equals the max number of edge-disjoint paths.
    Exponential; only for graphs with few retained edges.
    """
    edges = _retained_edge_list(cn)
    if not _reachable(edges, s, t):
        return 0
    m = len(edges)
    assert m <= 14, "brute-force cut only for tiny graphs"
    for k in range(m + 1):
        for cut in itertools.combinations(range(m), k):
            kept = [e for i, e in enumerate(edges) if i not in cut]
            if not _reachable(kept, s, t):
                return k
    return m


def all_simple_paths(cn, s: str, t: str) -> list[tuple[str, ...]]:
    """Every simple path over retained edges, as edge-id tuples."""
    adj: dict[str, list[tuple[str, str]]] = {}
    for eid, u, v in _retained_edge_list(cn):
        adj.setdefault(u, []).append((eid, v))
    paths = []

    def walk(u, used_nodes, used_edges):
        if u == t:
            paths.append(tuple(used_edges))
            return
        for eid, v in adj.get(u, []):
            if v not in used_nodes:
                walk(v, used_nodes | {v}, used_edges + [eid])

    walk(s, {s}, [])
    return paths


def max_disjoint_paths_packing(cn, s: str, t: str) -> int:
    """Largest set of pairwise edge-disjoint simple paths, by backtracking."""
    paths = [set(p) for p in all_simple_paths(cn, s, t)]

    best = 0

    def pack(idx, used, count):
        nonlocal best
        best = max(best, count)
        if count + (len(paths) - idx) <= best:
            return
        for i in range(idx, len(paths)):
            if not (paths[i] & used):
                pack(i + 1, used | paths[i], count + 1)

    pack(0, set(), 0)
    return best


# Metric reference implementations ------------------------------------------


def naive_accuracy(y_true, y_pred):
    return sum(1 for a, b in zip(y_true, y_pred) if a == b) / len(y_true)


def naive_macro_f1(y_true, y_pred):
    classes = sorted(set(y_true) | set(y_pred))
    f1s = []
    for c in classes:
        tp = sum(1 for a, b in zip(y_true, y_pred) if a == c and b == c)
        fp = sum(1 for a, b in zip(y_true, y_pred) if a != c and b == c)
        fn = sum(1 for a, b in zip(y_true, y_pred) if a == c and b != c)
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1s.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
    return sum(f1s) / len(f1s)


def naive_mae(y_true, y_pred):
    return sum(abs(a - b) for a, b in zip(y_true, y_pred)) / len(y_true)


def naive_rmse(y_true, y_pred):
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(y_true, y_pred)) / len(y_true))


def naive_auroc(labels, scores):
    """Probability a random positive outranks a random negative; ties count half."""
    pos = [s for y, s in zip(labels, scores) if y == 1]
    neg = [s for y, s in zip(labels, scores) if y == 0]
    if not pos or not neg:
        return None
    wins = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                wins += 1.0
            elif p == n:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def naive_ece(probs, outcomes, bins=10):
    total = len(probs)
    acc = 0.0
    for b in range(bins):
        lo, hi = b / bins, (b + 1) / bins
        members = [
            (p, o)
            for p, o in zip(probs, outcomes)
            if (lo <= p < hi) or (b == bins - 1 and p == 1.0)
        ]
        if not members:
            continue
        conf = sum(p for p, _ in members) / len(members)
        hit = sum(o for _, o in members) / len(members)
        acc += (len(members) / total) * abs(hit - conf)
    return acc


def naive_recall_at_top_q(scores, labels, ids, q):
    """Reference ranking metric: rank by (-score, id), take top q%."""
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], ids[i]))
    k = max(1, math.floor(q / 100.0 * len(scores)))
    top = set(order[:k])
    positives = [i for i, y in enumerate(labels) if y == 1]
    if not positives:
        return None
    return sum(1 for i in positives if i in top) / len(positives)
