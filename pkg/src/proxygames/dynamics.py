"""Asynchronous best reply, log-linear learning and stochastic stability.

States are flat profile indices (row-major, player 0 slowest). The best-reply
chain is kept in exact arithmetic; log-linear chains at finite beta are
floating point.
"""

from __future__ import annotations

import heapq
import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import networkx as nx
import numpy as np

from .arborescence import min_arborescence
from .game import Game, Profile

log = logging.getLogger(__name__)


class NonErgodicChainError(ValueError):
    pass


class InconclusiveSweepError(RuntimeError):
    pass


@dataclass(frozen=True)
class TransitionMatrix:
    shape: tuple[int, ...]
    entries: np.ndarray  # (|A|, |A|); object/Fraction for best reply, float otherwise
    exact: bool

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def successors(self, s: int) -> list[int]:
        row = self.entries[s]
        return [int(t) for t in np.flatnonzero(row != 0)]

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)


@dataclass(frozen=True)
class RecurrentClassSet:
    shape: tuple[int, ...]
    classes: tuple[frozenset[int], ...]  # flat indices, ordered by smallest member

    def states(self) -> frozenset[int]:
        return frozenset().union(*self.classes)

    def profiles(self) -> list[frozenset[Profile]]:
        return [frozenset(_unflat(self.shape, s) for s in c) for c in self.classes]

    def profile_states(self) -> frozenset[Profile]:
        return frozenset(_unflat(self.shape, s) for s in self.states())


def _unflat(shape, s) -> Profile:
    return tuple(int(x) for x in np.unravel_index(s, shape))


def _neighbors(shape: tuple[int, ...]):
    """For each flat state, list of (player, target_state) for unilateral moves."""
    N = int(np.prod(shape))
    idx = np.arange(N).reshape(shape)
    out = [[] for _ in range(N)]
    for i, c in enumerate(shape):
        moved = np.moveaxis(idx, i, -1).reshape(-1, c)
        for fiber in moved:
            fiber = [int(x) for x in fiber]
            for s in fiber:
                out[s].extend((i, t) for t in fiber if t != s)
    return out


def _best_reply_moves(g: Game):
    """Per state: list of (player, target) moves to a different best response."""
    shape = g.shape
    masks = [g.best_response_mask(i).reshape(-1) for i in range(g.n)]
    return [[(i, t) for i, t in nbrs if masks[i][t]] for nbrs in _neighbors(shape)]


# -- asynchronous best reply -----------------------------------------------------


def abr_transition_matrix(g: Game) -> TransitionMatrix:
    """Exact transition matrix of the asynchronous best-reply process.

    Each player updates with probability 1/n and picks uniformly among its best
    responses, possibly its current action (that mass stays on the diagonal).
    """
    shape, n, N = g.shape, g.n, g.num_profiles
    zero = Fraction(0)
    P = np.full((N, N), zero, dtype=object)
    idx = np.arange(N).reshape(shape)
    for i in range(n):
        mask = np.moveaxis(g.best_response_mask(i), i, -1).reshape(-1, shape[i])
        states = np.moveaxis(idx, i, -1).reshape(-1, shape[i])
        for fiber, ok in zip(states, mask):
            targets = [int(t) for t, m in zip(fiber, ok) if m]
            p = Fraction(1, n * len(targets))
            for s in fiber:
                for t in targets:
                    P[int(s), t] += p
    P.flags.writeable = False
    return TransitionMatrix(shape, P, exact=True)


def _closed_classes(N: int, succ) -> list[frozenset[int]]:
    G = nx.DiGraph()
    G.add_nodes_from(range(N))
    for s in range(N):
        G.add_edges_from((s, t) for t in succ(s) if t != s)
    C = nx.condensation(G)
    classes = [
        frozenset(C.nodes[c]["members"]) for c in C.nodes if C.out_degree(c) == 0
    ]
    return sorted(classes, key=min)


def recurrent_classes(p: TransitionMatrix) -> RecurrentClassSet:
    """Closed communicating classes of the positive-probability graph."""
    return RecurrentClassSet(p.shape, tuple(_closed_classes(p.size, p.successors)))


def abr_classes(g: Game) -> RecurrentClassSet:
    """Recurrent classes of the best-reply chain without building the matrix."""
    moves = _best_reply_moves(g)
    return RecurrentClassSet(
        g.shape, tuple(_closed_classes(g.num_profiles, lambda s: [t for _, t in moves[s]]))
    )


@dataclass(frozen=True)
class WeakAcyclicity:
    holds: bool
    equilibria: frozenset[Profile]
    witness_paths: dict = field(default_factory=dict, repr=False)


def is_weakly_acyclic(g: Game) -> WeakAcyclicity:
    """Does every profile have a best-reply path to a pure Nash equilibrium?

    A best-reply step changes one player's action to a different best response.
    Witness paths are shortest such paths, keyed by profile, and are returned
    only when the game is weakly acyclic.
    """
    shape, N = g.shape, g.num_profiles
    moves = _best_reply_moves(g)
    # equilibria with tied best responses still have outgoing moves
    eq_mask = np.logical_and.reduce([g.best_response_mask(i) for i in range(g.n)]).reshape(-1)
    sinks = [int(s) for s in np.flatnonzero(eq_mask)]
    pred = [[] for _ in range(N)]
    for s in range(N):
        for _, t in moves[s]:
            pred[t].append(s)
    nxt = {s: None for s in sinks}
    queue = deque(sinks)
    while queue:
        t = queue.popleft()
        for s in pred[t]:
            if s not in nxt:
                nxt[s] = t
                queue.append(s)
    equilibria = frozenset(_unflat(shape, s) for s in sinks)
    holds = bool(sinks) and len(nxt) == N
    paths = {}
    if holds:
        for s in range(N):
            path = [s]
            while nxt[path[-1]] is not None:
                path.append(nxt[path[-1]])
            paths[_unflat(shape, s)] = [_unflat(shape, x) for x in path]
    return WeakAcyclicity(holds, equilibria, paths)


# -- log-linear learning -----------------------------------------------------------


def lll_transition_matrix(g: Game, beta: float) -> TransitionMatrix:
    """Log-linear learning chain at rationality ``beta`` (softmax over own actions)."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    shape, n, N = g.shape, g.n, g.num_profiles
    P = np.zeros((N, N))
    idx = np.arange(N).reshape(shape)
    for i in range(n):
        U = np.moveaxis(g.utilities[i], i, -1).reshape(-1, shape[i]).astype(float)
        states = np.moveaxis(idx, i, -1).reshape(-1, shape[i])
        z = beta * (U - U.max(axis=1, keepdims=True))
        w = np.exp(z)
        w /= w.sum(axis=1, keepdims=True)
        for fiber, probs in zip(states, w):
            for s in fiber:
                P[s, fiber] += probs / n
    return TransitionMatrix(shape, P, exact=False)


def stationary_distribution(p: TransitionMatrix, tol: float = 1e-12) -> np.ndarray:
    """Unique stationary vector of an irreducible chain.

    Uses Grassmann-Taksar-Heyman state reduction on the off-diagonal rates.
    The diagonal is never formed as ``1 - sum``, so escape probabilities far
    below machine epsilon (large beta) keep their relative accuracy. The
    residual ``pi Q`` of the generator is checked against ``tol``.
    """
    N = p.size
    off = np.array(p.entries, dtype=float)
    np.fill_diagonal(off, 0.0)
    if not _strongly_connected(N, lambda s: np.flatnonzero(off[s] > 0)):
        raise NonErgodicChainError("chain is not irreducible; stationary distribution not unique")
    if N == 1:
        return np.ones(1)
    A = off.copy()
    for n in range(N - 1, 0, -1):
        A[:n, n] /= A[n, :n].sum()
        A[:n, :n] += np.outer(A[:n, n], A[n, :n])
    pi = np.zeros(N)
    pi[0] = 1.0
    for n in range(1, N):
        pi[n] = pi[:n] @ A[:n, n]
    pi /= pi.sum()
    resid = np.max(np.abs(pi @ off - pi * off.sum(axis=1)))
    if resid > tol:
        log.warning("stationary residual %.3g exceeds %.1g", resid, tol)
    return pi


def _strongly_connected(N, succ) -> bool:
    G = nx.DiGraph()
    G.add_nodes_from(range(N))
    for s in range(N):
        G.add_edges_from((s, int(t)) for t in succ(s))
    return nx.is_strongly_connected(G)


# -- stochastic stability (exact) -------------------------------------------------


@dataclass(frozen=True)
class ResistanceGraph:
    """Recurrent classes of the best-reply chain and least resistances between them.

    ``resistance[(s, t)]`` is the least total resistance of a path from class
    ``s`` into class ``t``; ``potential[t]`` is the weight of the cheapest
    in-tree rooted at ``t``.
    """

    shape: tuple[int, ...]
    classes: tuple[frozenset[int], ...]
    resistance: dict
    potential: tuple


def step_resistance(g: Game, player: int, target: Sequence[int]) -> Fraction:
    """Resistance of moving ``player`` to its action in ``target``.

    Equals the payoff shortfall of that action against the best response in the
    same context; zero exactly for best responses.
    """
    return g.regret(player)[tuple(target)]


def _dijkstra(sources, N, edges):
    dist = {s: Fraction(0) for s in sources}
    heap = [(Fraction(0), s) for s in sorted(sources)]
    heapq.heapify(heap)
    done = set()
    while heap:
        d, s = heapq.heappop(heap)
        if s in done:
            continue
        done.add(s)
        for t, w in edges[s]:
            nd = d + w
            if t not in dist or nd < dist[t]:
                dist[t] = nd
                heapq.heappush(heap, (nd, t))
    return dist


def resistance_graph(g: Game) -> ResistanceGraph:
    shape, N = g.shape, g.num_profiles
    regrets = [g.regret(i).reshape(-1) for i in range(g.n)]
    nbrs = _neighbors(shape)
    edges = [[(t, regrets[i][t]) for i, t in nbrs[s]] for s in range(N)]
    classes = tuple(
        _closed_classes(N, lambda s: [t for t, w in edges[s] if w == 0])
    )
    K = len(classes)
    owner = {s: k for k, c in enumerate(classes) for s in c}
    R = {}
    for k, c in enumerate(classes):
        dist = _dijkstra(c, N, edges)
        for s, d in dist.items():
            j = owner.get(s)
            if j is not None and j != k and ((k, j) not in R or d < R[(k, j)]):
                R[(k, j)] = d
    pot = []
    for root in range(K):
        if K == 1:
            pot.append(Fraction(0))
            continue
        # in-tree toward root == out-arborescence of the reversed arcs
        rev = {(j, k): w for (k, j), w in R.items()}
        total, _ = min_arborescence(range(K), rev, root)
        pot.append(Fraction(total))
    return ResistanceGraph(shape, classes, R, tuple(pot))


def stochastically_stable_exact(g: Game) -> frozenset[Profile]:
    """Stochastically stable profiles of log-linear learning, by resistance trees."""
    rg = resistance_graph(g)
    low = min(rg.potential)
    states = set()
    for c, pot in zip(rg.classes, rg.potential):
        if pot == low:
            states |= c
    return frozenset(_unflat(g.shape, s) for s in sorted(states))


def stochastically_stable_sweep(
    g: Game, betas: Sequence[float] = (1.0, 10.0, 100.0), mass_threshold: float = 0.5
) -> frozenset[Profile]:
    """Numeric estimate of the stochastically stable set from a beta schedule.

    A profile is kept if its stationary mass at the largest beta exceeds
    ``mass_threshold`` times the uniform share and did not shrink between the
    last two betas. A profile above the threshold whose mass is shrinking makes
    the sweep inconclusive. Intended as a cross-check only.
    """
    betas = [float(b) for b in betas]
    if not betas or any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise ValueError("beta schedule must be nonempty and strictly increasing")
    if not 0 < mass_threshold < 1:
        raise ValueError("mass_threshold must lie in (0, 1)")
    N = g.num_profiles
    if N == 1:
        return frozenset({_unflat(g.shape, 0)})
    dists = [stationary_distribution(lll_transition_matrix(g, b)) for b in betas]
    last = dists[-1]
    prev = dists[-2] if len(dists) > 1 else None
    cut = mass_threshold / N
    keep, shrinking = [], []
    for s in range(N):
        if last[s] <= cut:
            continue
        if prev is not None and last[s] < prev[s] * (1 - 1e-9):
            shrinking.append(s)
        else:
            keep.append(s)
    if shrinking:
        raise InconclusiveSweepError(
            f"mass above threshold but decreasing at {[_unflat(g.shape, s) for s in shrinking]}"
        )
    return frozenset(_unflat(g.shape, s) for s in keep)
