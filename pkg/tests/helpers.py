"""Independent brute-force oracles and hypothesis strategies shared by the tests."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from proxygames.game import Game


def all_profiles(shape):
    return list(itertools.product(*(range(c) for c in shape)))


def replace(profile, i, a):
    p = list(profile)
    p[i] = a
    return tuple(p)


def brute_best_responses(g: Game, i: int, profile) -> set[int]:
    vals = {a: g.utilities[i][replace(profile, i, a)] for a in range(g.shape[i])}
    top = max(vals.values())
    return {a for a, v in vals.items() if v == top}


def brute_pne(g: Game) -> set:
    return {p for p in all_profiles(g.shape)
            if all(p[i] in brute_best_responses(g, i, p) for i in range(g.n))}


def brute_abr_matrix(g: Game) -> dict:
    """Transition probabilities of the asynchronous best-reply chain as a dict."""
    P = {}
    for p in all_profiles(g.shape):
        for i in range(g.n):
            br = brute_best_responses(g, i, p)
            for a in br:
                q = replace(p, i, a)
                P[(p, q)] = P.get((p, q), Fraction(0)) + Fraction(1, g.n * len(br))
    return P


def brute_recurrent(states, succ) -> set[frozenset]:
    """Closed communicating classes via the full reachability relation."""
    reach = {s: {s} for s in states}
    changed = True
    while changed:
        changed = False
        for s in states:
            new = set().union(*(reach[t] for t in succ[s])) | reach[s]
            if new != reach[s]:
                reach[s] = new
                changed = True
    return {frozenset(reach[s]) for s in states if all(s in reach[t] for t in reach[s])}


def brute_inconsequentiality(g: Game, i: int, j: int) -> Fraction:
    worst = Fraction(0)
    for p in all_profiles(g.shape):
        for b in range(g.shape[j]):
            worst = max(worst, abs(g.utilities[i][p] - g.utilities[i][replace(p, j, b)]))
    return worst


def game_from_ints(shape, us, w) -> Game:
    """Game from integer arrays; welfare rescaled so that its range is [0, 1]."""
    us = [np.vectorize(Fraction, otypes=[object])(np.asarray(u)) for u in us]
    w = np.vectorize(Fraction, otypes=[object])(np.asarray(w))
    lo, hi = w.min(), w.max()
    w = (w - lo) / (hi - lo) if hi > lo else w - lo + 1
    return Game(us, w)


def potential_from_ints(W_int) -> Game:
    """Identical-interest game on a nonconstant integer welfare, shifted and scaled."""
    W = np.vectorize(Fraction, otypes=[object])(np.asarray(W_int))
    lo, hi = W.min(), W.max()
    W = (W - lo) / (hi - lo) if hi > lo else W - lo + 1
    return Game([W] * W.ndim, W)


def marginal_game(W_int) -> Game:
    """Potential game with marginal-contribution utilities (baseline action 0)."""
    g = potential_from_ints(W_int)
    W = g.welfare
    us = [W - np.take(W, [0], axis=i) for i in range(W.ndim)]
    return Game(us, W)


@st.composite
def shapes(draw, min_players=2, max_players=3, max_actions=3):
    n = draw(st.integers(min_players, max_players))
    return tuple(draw(st.integers(1, max_actions)) for _ in range(n))


@st.composite
def int_tensors(draw, shape, lo=0, hi=6):
    size = int(np.prod(shape))
    vals = draw(st.lists(st.integers(lo, hi), min_size=size, max_size=size))
    return np.array(vals).reshape(shape)


@st.composite
def random_games(draw, min_players=2, max_players=3, max_actions=3):
    shape = draw(shapes(min_players, max_players, max_actions))
    us = [draw(int_tensors(shape)) for _ in shape]
    w = draw(int_tensors(shape))
    return game_from_ints(shape, us, w)


@st.composite
def random_potential_games(draw, min_players=2, max_players=3, max_actions=3, hi=6):
    shape = draw(shapes(min_players, max_players, max_actions))
    return marginal_game(draw(int_tensors(shape, 0, hi)))
