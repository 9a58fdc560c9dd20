"""Hand-built games exhibiting proxy-payoff pathologies.

* ``intro_game``: a 3-player, 2-action game where hiding player 2 from player 1
  makes action B strictly dominant for player 1 under any acceptable evaluator.
* ``staggered_potential_game``: a potential game stacked in levels (player 3's
  action); after the reduction player 1 always climbs one row, player 3 one
  level, ending at a near-zero-welfare equilibrium.
* ``block_identical_interest_game``: an identical-interest game built from
  2-level blocks in which the reduction makes player 1 indifferent between the
  two block optima, opening a corridor to the next block.

The block game is assembled from the structural properties it must have and is
checked against them by :func:`validate_block_game` on every construction.
"""

from __future__ import annotations

import math
from collections import deque
from fractions import Fraction

import numpy as np

from .dynamics import _best_reply_moves, abr_classes
from .evaluators import BUILTIN, reduce_game
from .game import Game, as_rational, inconsequentiality, is_identical_interest, verify_potential


class ConstructionError(ValueError):
    pass


def _frac(x) -> Fraction:
    return as_rational(x) if not isinstance(x, float) else Fraction(str(x))


# -- 3-player, 2-action example ---------------------------------------------------

INTRO_LABELS = (("A", "B"), ("A", "B"), ("left", "right"))


def intro_game(delta=Fraction(1, 10)) -> Game:
    """Players 2 and 3 share a utility; welfare is the normalized utility sum.

    Requires ``0 < delta <= 1/2`` so that the upper-left profile (sum ``3 - delta``)
    is the welfare maximum.
    """
    d = _frac(delta)
    if not 0 < d <= Fraction(1, 2):
        raise ConstructionError(f"delta must lie in (0, 1/2], got {d}")
    # [a1][a2][a3]
    u1 = [[[1 - d, 0], [0, 2 * d]],
          [[d, 3 * d], [1, d]]]
    u23 = [[[1, 2 * d], [0, 0]],
           [[0, d], [0, 2 * d]]]
    U1 = np.array(u1, dtype=object)
    U23 = np.array(u23, dtype=object)
    W = (U1 + 2 * U23) / (3 - d)
    return Game([U1, U23, U23], W, labels=INTRO_LABELS)


# -- staggered potential game ----------------------------------------------------


def staggered_levels(eps) -> int:
    """Smallest integer M with ``1/eps - 8 <= M`` (then ``M < 1/eps - 7``)."""
    e = _frac(eps)
    if not 0 < e < Fraction(1, 7):
        raise ConstructionError(f"eps must lie in (0, 1/7), got {e}")
    return max(0, math.ceil(1 / e - 8))


def staggered_potential_game(eps=Fraction(1, 10)) -> Game:
    """Potential game on rows ``0..M+1``, columns ``0..2``, levels ``0..M``.

    Player 1 has its own payoff table; players 2 and 3 are paid the welfare.
    Player 2 is exactly ``6 eps``-inconsequential to player 1.
    """
    e = _frac(eps)
    M = staggered_levels(e)
    R, C, L = M + 2, 3, M + 1
    U1 = np.empty((R, C, L), dtype=object)
    W = np.empty((R, C, L), dtype=object)

    # level 0: rows 0, 1 explicit, every higher row copies row 2
    lvl0_u = {0: (1, 1 - 3 * e, 1 - 6 * e), 1: (1 - 2 * e, 1 + e, 1 - 5 * e)}
    lvl0_w = {0: (1, 1 - 7 * e, 1 - 4 * e), 1: (1 - 2 * e, 1 - 3 * e, 1 - 3 * e)}
    for r in range(R):
        U1[r, :, 0] = lvl0_u.get(r, (0, 4 * e, -2 * e))
        W[r, :, 0] = lvl0_w.get(r, (0, 0, 0))

    for k in range(1, L):
        ke = k * e
        rows_u = {
            k - 1: (1 + e / 2, 1 - Fraction(5, 2) * e, 1 - Fraction(11, 2) * e),
            k: (1, 1 - 3 * e, 1 - 6 * e),
            k + 1: (1 - 2 * e, 1 + e, 1 - 5 * e),
        }
        rows_w = {
            k - 1: (1 + e / 2 - ke, 1 - Fraction(13, 2) * e - ke, 1 - Fraction(7, 2) * e - ke),
            k: (1 - ke, 1 - 7 * e - ke, 1 - 4 * e - ke),
            k + 1: (1 - 2 * e - ke, 1 - 3 * e - ke, 1 - 3 * e - ke),
        }
        for r in range(R):
            U1[r, :, k] = rows_u.get(r, (ke, 4 * e + ke, -2 * e + ke))
            W[r, :, k] = rows_w.get(r, (0, 0, 0))

    g = Game([U1, W, W], W)
    if not verify_potential(g).holds:  # pragma: no cover - construction invariant
        raise ConstructionError("staggered game failed the potential identity")
    return g


# -- block identical-interest game ---------------------------------------------------


def block_count(eps) -> int:
    """Integer M with ``1/eps - 3 <= M < 1/eps - 2``."""
    e = _frac(eps)
    if not 0 < e < Fraction(1, 3):
        raise ConstructionError(f"eps must lie in (0, 1/3), got {e}")
    return math.ceil(1 / e - 3)


def block_trap(k: int) -> frozenset:
    """The two profiles a best-reply process settles into inside block ``k``."""
    return frozenset({(2 * k + 2, 0, 2 * k + 1), (2 * k + 2, 1, 2 * k + 1)})


def _block_welfare(e: Fraction, M: int) -> np.ndarray:
    W = np.full((2 * M + 3, 2, 2 * M + 2), Fraction(0), dtype=object)
    for k in range(M + 1):
        top = 1 - k * e          # block optimum
        low = top - 2 * e        # same rows, other column
        corridor = top - Fraction(7, 4) * e
        trap = top - Fraction(3, 2) * e
        lo3, hi3 = 2 * k, 2 * k + 1
        W[2 * k, 0, lo3], W[2 * k, 1, lo3] = top, low
        W[2 * k + 1, 0, lo3], W[2 * k + 1, 1, lo3] = low, top
        W[2 * k + 1, 0, hi3] = W[2 * k + 1, 1, hi3] = corridor
        W[2 * k + 2, 0, hi3] = W[2 * k + 2, 1, hi3] = trap
    return W


def block_identical_interest_game(eps=Fraction(1, 4)) -> Game:
    """Identical-interest game on rows ``0..2M+2``, columns ``{0,1}``, levels ``0..2M+1``.

    In block ``k`` (levels ``2k`` and ``2k+1``):

    * level ``2k`` holds the block optima ``(2k,0,2k)`` and ``(2k+1,1,2k)`` with
      welfare ``1 - k eps``; the same rows with the other column are ``2 eps`` lower,
      so both rows present player 1 the same sorted payoff list;
    * level ``2k+1`` holds a corridor row ``2k+1`` and the trap row ``2k+2``
      (``block_trap(k)``), the latter strictly better for player 1;
    * every other profile has welfare 0.

    Raises ``ConstructionError`` if the assembled tensor misses any required
    property (see :func:`validate_block_game`).
    """
    e = _frac(eps)
    M = block_count(e)
    W = _block_welfare(e, M)
    g = Game([W, W, W], W)
    problems = validate_block_game(g, e)
    if problems:
        raise ConstructionError("block game construction failed: " + "; ".join(problems))
    return g


def _reachable_within(moves, start, allowed, goal, shape):
    seen = {start}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        if s in goal:
            return True
        for _, t in moves[s]:
            if t in allowed and t not in seen:
                seen.add(t)
                queue.append(t)
    return False


def validate_block_game(g: Game, eps) -> list[str]:
    """Check the structural properties the block game must have; return failures.

    (a) identical interest; (b) player 2 exactly ``2 eps``-inconsequential to
    player 1; (c) block optima at ``(2k,0,2k)``, ``(2k+1,1,2k)`` with welfare
    ``1 - k eps`` and global optima exactly ``(0,0,0)``, ``(1,1,0)``; (d) at
    level ``2k`` rows ``2k``, ``2k+1`` carry the sorted list
    ``{1-(k+2)eps, 1-k eps}``; (e) at level ``2k+1`` row ``2k+2`` strictly
    dominates row ``2k+1`` for player 1; (f) for each built-in evaluator every
    profile of block ``k`` has a best-reply path inside the block to the trap,
    and best replies leave the trap only through player 3 moving to ``2k+2``;
    (g) the reduced best-reply chain has the single recurrent class
    ``block_trap(M)``, whose welfare is at most ``2 eps``.
    """
    e = _frac(eps)
    M = block_count(e)
    shape = (2 * M + 3, 2, 2 * M + 2)
    if g.shape != shape:
        return [f"shape {g.shape} != {shape}"]
    W = g.welfare
    bad = []
    if not is_identical_interest(g):
        bad.append("(a) not identical interest")
    if inconsequentiality(g, 0, 1) != 2 * e:
        bad.append(f"(b) inconsequentiality {inconsequentiality(g, 0, 1)} != {2 * e}")
    for k in range(M + 1):
        block = W[:, :, 2 * k:2 * k + 2]
        opt = {(2 * k, 0, 2 * k), (2 * k + 1, 1, 2 * k)}
        found = {(int(a), int(b), int(c) + 2 * k) for a, b, c in zip(*np.nonzero(block == block.max()))}
        if found != opt or block.max() != 1 - k * e:
            bad.append(f"(c) block {k} optima {sorted(found)} at {block.max()}")
        want = sorted([1 - (k + 2) * e, 1 - k * e])
        for r in (2 * k, 2 * k + 1):
            if sorted(W[r, :, 2 * k]) != want:
                bad.append(f"(d) row {r} at level {2 * k} is {list(W[r, :, 2 * k])}")
        hi, lo = sorted(W[2 * k + 2, :, 2 * k + 1]), sorted(W[2 * k + 1, :, 2 * k + 1])
        if not all(x > y for x, y in zip(hi, lo)):
            bad.append(f"(e) row {2 * k + 2} does not dominate row {2 * k + 1} at level {2 * k + 1}")
    glob = {tuple(int(x) for x in p) for p in zip(*np.nonzero(W == W.max()))}
    if glob != {(0, 0, 0), (1, 1, 0)} or W.max() != 1:
        bad.append(f"(c) global optima {sorted(glob)}")
    if bad:
        return bad

    flat = lambda p: int(np.ravel_multi_index(p, shape))
    for name, f in BUILTIN.items():
        r = reduce_game(g, 0, 1, f)
        moves = _best_reply_moves(r)
        for k in range(M + 1):
            members = {flat((a, b, c)) for a in range(shape[0]) for b in range(2)
                       for c in (2 * k, 2 * k + 1)}
            trap = {flat(p) for p in block_trap(k)}
            for s in members:
                if not _reachable_within(moves, s, members, trap, shape):
                    bad.append(f"(f) {name}: no path to trap of block {k} from "
                               f"{np.unravel_index(s, shape)}")
                    break
            for s in trap:
                for i, t in moves[s]:
                    if t in trap:
                        continue
                    dest = tuple(int(x) for x in np.unravel_index(t, shape))
                    if i != 2 or dest[2] != 2 * k + 2:
                        bad.append(f"(f) {name}: trap of block {k} escapes to {dest} via player {i + 1}")
        classes = abr_classes(r).profiles()
        if classes != [block_trap(M)]:
            bad.append(f"(g) {name}: recurrent classes {classes}")
        if max(W[p] for p in block_trap(M)) > 2 * e:
            bad.append("(g) final trap welfare exceeds 2 eps")
    return bad
