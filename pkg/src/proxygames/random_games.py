"""Seeded random potential and identical-interest games with a weakly coupled player 2.

Welfare is ``base(a_-2) + bump(a)`` on a rational grid: ``base`` ignores the
hidden player and ``bump`` lies in ``[0, spread]``. Everything is shifted so
the maximum is exactly 1. Potential games use marginal-contribution utilities
with baseline action 0, which at most doubles the spread seen by player 1, so
``spread = eps/2`` there and ``spread = eps`` for identical interest.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .game import Game, GameError, as_rational, rational_array

HIDDEN = 1


def _check_shape(n: int, action_counts: Sequence[int]) -> tuple[int, ...]:
    counts = tuple(int(c) for c in action_counts)
    if n < 3:
        raise GameError(f"random families need n >= 3, got {n}")
    if len(counts) != n:
        raise GameError(f"{len(counts)} action counts given for {n} players")
    if any(c < 1 for c in counts):
        raise GameError(f"action counts must be positive, got {counts}")
    return counts


def _random_welfare(counts, spread: Fraction, rng, resolution: int, levels: int) -> np.ndarray:
    cap = math.floor((1 - spread) * resolution)
    if cap < 0:
        raise GameError(f"spread {spread} leaves no room for a base welfare")
    base_shape = tuple(1 if i == HIDDEN else c for i, c in enumerate(counts))
    base = rng.integers(0, cap + 1, size=base_shape)
    bump = rng.integers(0, levels + 1, size=counts)
    W = np.empty(counts, dtype=object)
    for idx in np.ndindex(*counts):
        b = idx[:HIDDEN] + (0,) + idx[HIDDEN + 1:]
        W[idx] = Fraction(int(base[b]), resolution) + spread * Fraction(int(bump[idx]), levels)
    return W + (1 - W.max())


def marginal_contribution(W: np.ndarray, baseline: int = 0) -> list[np.ndarray]:
    """``U_i(a) = W(a) - W(baseline, a_-i)`` for every player."""
    out = []
    for i in range(W.ndim):
        ref = np.take(W, [baseline], axis=i)
        out.append(W - ref)
    return out


def random_potential_game(
    n: int = 3,
    action_counts: Sequence[int] = (3, 3, 3),
    eps=Fraction(1, 20),
    seed: int = 0,
    *,
    resolution: int = 100,
    levels: int = 4,
) -> Game:
    """Potential game (welfare as potential) with player 2 at most ``eps``-inconsequential to player 1.

    ``resolution`` sets the grid of the base welfare and ``levels`` the number of
    bump steps; coarse grids give well-separated welfare values.
    """
    counts = _check_shape(n, action_counts)
    e = as_rational(eps)
    if e < 0:
        raise GameError("eps must be nonnegative")
    rng = np.random.default_rng(seed)
    W = _random_welfare(counts, e / 2, rng, resolution, levels)
    return Game(marginal_contribution(W), rational_array(W))


def random_identical_interest_game(
    n: int = 3,
    action_counts: Sequence[int] = (3, 3, 3),
    eps=Fraction(1, 20),
    seed: int = 0,
    *,
    resolution: int = 100,
    levels: int = 4,
) -> Game:
    """Identical-interest game; player 2 is at most ``eps``-inconsequential to everyone."""
    counts = _check_shape(n, action_counts)
    e = as_rational(eps)
    if e < 0:
        raise GameError("eps must be nonnegative")
    rng = np.random.default_rng(seed)
    W = rational_array(_random_welfare(counts, e, rng, resolution, levels))
    return Game([W] * n, W)


def shape_for_states(states: int, n: int = 3) -> tuple[int, ...]:
    """Most balanced factorization of ``states`` into ``n`` factors, each >= 2.

    The hidden player's factor is placed second and is at least 2.
    """
    best = None

    def rec(rem, k, start, acc):
        nonlocal best
        if k == 1:
            if rem >= start:
                cand = acc + [rem]
                key = max(cand) - min(cand)
                if best is None or key < best[0]:
                    best = (key, cand)
            return
        d = start
        while d ** k <= rem:
            if rem % d == 0:
                rec(rem // d, k - 1, d, acc + [d])
            d += 1

    rec(states, n, 2, [])
    if best is None:
        raise GameError(f"{states} states cannot be split among {n} players with >= 2 actions each")
    f = sorted(best[1])
    # put the largest factor on the hidden player
    f.insert(HIDDEN, f.pop())
    return tuple(f)
