"""Minimum-weight spanning arborescence (Chu-Liu/Edmonds) with exact weights."""

from __future__ import annotations

from typing import Hashable, Mapping


def min_arborescence(nodes, weights: Mapping[tuple, object], root: Hashable):
    """Cheapest set of arcs in which every node except ``root`` has one parent.

    ``weights[(u, v)]`` is the cost of arc ``u -> v``; missing arcs are absent.
    Returns ``(total, parent)`` where ``parent[v] = u`` for each non-root ``v``.
    Raises ``ValueError`` if some node cannot be reached from ``root``.
    """
    nodes = list(nodes)
    if root not in nodes:
        raise ValueError("root is not a node")
    node_set = set(nodes)
    table = [(u, v) for (u, v) in weights
             if u != v and v != root and u in node_set and v in node_set]
    arcs = [(u, v, weights[(u, v)], aid) for aid, (u, v) in enumerate(table)]
    chosen = _edmonds(nodes, arcs, root)
    parent = {table[aid][1]: table[aid][0] for aid in chosen}
    total = sum((weights[(parent[v], v)] for v in parent), 0)
    return total, parent


def _edmonds(nodes, arcs, root) -> set[int]:
    """Return ids of the arcs forming a min arborescence over ``nodes``."""
    best = {}
    for arc in arcs:
        v, w = arc[1], arc[2]
        if v not in best or w < best[v][2]:
            best[v] = arc
    for v in nodes:
        if v != root and v not in best:
            raise ValueError(f"node {v!r} is unreachable from the root")

    cycle = _find_cycle({v: a[0] for v, a in best.items()}, root)
    if cycle is None:
        return {a[3] for a in best.values()}

    in_cycle = set(cycle)
    c = ("cycle", id(cycle), tuple(map(repr, cycle)))
    new_nodes = [v for v in nodes if v not in in_cycle] + [c]
    new_arcs = []
    enters = {}
    for u, v, w, aid in arcs:
        if u in in_cycle and v in in_cycle:
            continue
        if v in in_cycle:
            new_arcs.append((c if u in in_cycle else u, c, w - best[v][2], aid))
            enters[aid] = v
        elif u in in_cycle:
            new_arcs.append((c, v, w, aid))
        else:
            new_arcs.append((u, v, w, aid))

    chosen = _edmonds(new_nodes, new_arcs, root)
    entry = next(enters[aid] for aid in chosen if aid in enters)
    chosen |= {best[v][3] for v in cycle if v != entry}
    return chosen


def _find_cycle(par, root):
    state = {}
    for start in par:
        path = []
        v = start
        while v != root and v in par and v not in state:
            state[v] = start
            path.append(v)
            v = par[v]
        if v != root and state.get(v) == start:
            return path[path.index(v):]
        for p in path:
            state[p] = None
    return None
