"""Finite strategic-form games with exact rational payoffs.

Payoff and welfare tensors are numpy object arrays of ``Fraction`` laid out
in row-major order with player 0 varying slowest, so ``np.ravel_multi_index``
gives the flat profile index directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

Profile = tuple  # tuple[int, ...], one action index per player


class GameError(ValueError):
    pass


def as_rational(x) -> Fraction:
    """Convert ``x`` to an exact ``Fraction``.

    Strings may be ``"p/q"`` or decimal literals. Binary floats are refused
    because they cannot be converted without silently picking a rounding.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        raise TypeError("booleans are not payoffs")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {x!r}") from exc
    if isinstance(x, (float, np.floating)):
        raise TypeError(f"refusing binary float {x!r}; pass a Fraction or a string")
    raise TypeError(f"cannot interpret {type(x).__name__} as a rational")


def rational_array(values, shape: Sequence[int] | None = None) -> np.ndarray:
    """Object array of Fractions; read-only."""
    src = np.asarray(values, dtype=object)
    out = np.empty(src.shape, dtype=object)
    for idx, v in np.ndenumerate(src):
        out[idx] = as_rational(v)
    if shape is not None:
        out = out.reshape(tuple(shape))
    out.flags.writeable = False
    return out


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class Game:
    """A finite game with decision utilities and a separate welfare tensor.

    Parameters
    ----------
    utilities : sequence of array-likes
        One tensor per player, each of shape ``action_counts``.
    welfare : array-like
        Welfare tensor of the same shape. Kept apart from the utilities so that
        replacing decision utilities never touches it.
    normalized : bool
        Assert that welfare lies in [0, 1] with maximum exactly 1. Checked, not
        applied.
    labels : optional per-player lists of action names, used only for display.
    """

    def __init__(self, utilities, welfare, *, normalized: bool = True, labels=None):
        W = welfare if _is_frozen_rational(welfare) else rational_array(welfare)
        if W.ndim == 0:
            raise GameError("welfare must have one axis per player")
        shape = W.shape
        if any(c < 1 for c in shape):
            raise GameError(f"every player needs at least one action, got {shape}")
        utilities = list(utilities)
        if len(utilities) != len(shape):
            raise GameError(
                f"expected {len(shape)} utility tensors (one per player), got {len(utilities)}"
            )
        us = []
        for i, u in enumerate(utilities):
            U = u if _is_frozen_rational(u) else rational_array(u)
            if U.shape != shape:
                if U.size == W.size:
                    U = _readonly(U.reshape(shape))
                else:
                    raise GameError(
                        f"utility tensor of player {i + 1} has {U.size} entries, "
                        f"expected {W.size}"
                    )
            us.append(U)
        self._utilities = tuple(us)
        self._welfare = W
        self.normalized = bool(normalized)
        if self.normalized:
            lo, hi = W.min(), W.max()
            if lo < 0 or hi != 1:
                raise GameError(
                    f"welfare declared normalized but spans [{lo}, {hi}]; need min >= 0, max == 1"
                )
        if labels is not None:
            labels = tuple(tuple(str(x) for x in row) for row in labels)
            if len(labels) != len(shape) or any(
                len(row) != c for row, c in zip(labels, shape)
            ):
                raise GameError("labels must list one name per action for every player")
        self.labels = labels

    # -- structure -----------------------------------------------------------
    @property
    def n(self) -> int:
        return self._welfare.ndim

    @property
    def action_counts(self) -> tuple[int, ...]:
        return tuple(self._welfare.shape)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self._welfare.shape)

    @property
    def num_profiles(self) -> int:
        return int(self._welfare.size)

    @property
    def utilities(self) -> tuple[np.ndarray, ...]:
        return self._utilities

    @property
    def welfare(self) -> np.ndarray:
        return self._welfare

    def utility(self, i: int, profile: Sequence[int]) -> Fraction:
        return self._utilities[i][tuple(profile)]

    def W(self, profile: Sequence[int]) -> Fraction:
        return self._welfare[tuple(profile)]

    def profiles(self) -> Iterable[Profile]:
        return itertools.product(*(range(c) for c in self.shape))

    def index(self, profile: Sequence[int]) -> int:
        return profile_to_index(self.shape, profile)

    def profile(self, flat: int) -> Profile:
        return index_to_profile(self.shape, flat)

    def label(self, profile: Sequence[int]) -> str:
        if self.labels is None:
            return "(" + ",".join(str(a) for a in profile) + ")"
        return "(" + ",".join(self.labels[i][a] for i, a in enumerate(profile)) + ")"

    def with_utilities(self, utilities) -> "Game":
        """Copy with decision utilities replaced; welfare is shared, not copied."""
        return Game(utilities, self._welfare, normalized=self.normalized, labels=self.labels)

    # -- cached per-player tables -------------------------------------------
    @cached_property
    def _best_masks(self) -> tuple[np.ndarray, ...]:
        masks = []
        for i, U in enumerate(self._utilities):
            top = np.max(U, axis=i, keepdims=True)
            masks.append(_readonly(np.asarray(U == top, dtype=bool)))
        return tuple(masks)

    @cached_property
    def _regrets(self) -> tuple[np.ndarray, ...]:
        # regret[i][a] = max_x U_i(x, a_-i) - U_i(a); zero exactly on best responses
        out = []
        for i, U in enumerate(self._utilities):
            top = np.max(U, axis=i, keepdims=True)
            out.append(_readonly(top - U))
        return tuple(out)

    def best_response_mask(self, i: int) -> np.ndarray:
        """Boolean tensor: ``mask[a]`` iff ``a_i`` is a best response to ``a_-i``."""
        return self._best_masks[i]

    def regret(self, i: int) -> np.ndarray:
        return self._regrets[i]

    def __repr__(self) -> str:
        return f"Game(n={self.n}, action_counts={self.action_counts})"


def _is_frozen_rational(a) -> bool:
    return isinstance(a, np.ndarray) and a.dtype == object and not a.flags.writeable


def profile_to_index(shape: Sequence[int], profile: Sequence[int]) -> int:
    if len(profile) != len(shape):
        raise GameError(f"profile {tuple(profile)} has wrong arity for shape {tuple(shape)}")
    for a, c in zip(profile, shape):
        if not 0 <= a < c:
            raise GameError(f"profile {tuple(profile)} out of range for shape {tuple(shape)}")
    return int(np.ravel_multi_index(tuple(profile), tuple(shape)))


def index_to_profile(shape: Sequence[int], flat: int) -> Profile:
    return tuple(int(x) for x in np.unravel_index(flat, tuple(shape)))


def _check_player(g: Game, i: int) -> None:
    if not isinstance(i, (int, np.integer)) or not 0 <= i < g.n:
        raise GameError(f"invalid player index {i!r} for a {g.n}-player game")


def best_response_set(g: Game, i: int, others: Sequence[int]) -> frozenset[int]:
    """Player ``i``'s best responses to the actions ``others`` of everyone else.

    ``others`` lists the actions of players ``0..n-1`` with player ``i`` skipped.
    """
    _check_player(g, i)
    others = tuple(others)
    if len(others) != g.n - 1:
        raise GameError(f"expected {g.n - 1} opponent actions, got {len(others)}")
    idx = others[:i] + (slice(None),) + others[i:]
    row = g.best_response_mask(i)[idx]
    return frozenset(int(a) for a in np.flatnonzero(row))


def pure_nash_equilibria(g: Game) -> frozenset[Profile]:
    mask = np.logical_and.reduce([g.best_response_mask(i) for i in range(g.n)])
    return frozenset(tuple(int(x) for x in p) for p in zip(*np.nonzero(mask)))


def inconsequentiality(g: Game, i: int, j: int) -> Fraction:
    """Smallest eps such that player ``j`` is eps-inconsequential to player ``i``."""
    _check_player(g, i)
    _check_player(g, j)
    if i == j:
        raise GameError("inconsequentiality needs two distinct players")
    U = g.utilities[i]
    spread = np.max(U, axis=j) - np.min(U, axis=j)
    return Fraction(np.max(spread))


def inconsequentiality_matrix(g: Game) -> list[list[Fraction | None]]:
    return [
        [None if i == j else inconsequentiality(g, i, j) for j in range(g.n)]
        for i in range(g.n)
    ]


@dataclass(frozen=True)
class PotentialCheck:
    holds: bool
    max_violation: Fraction


def verify_potential(g: Game) -> PotentialCheck:
    """Check that welfare is an exact potential for the decision utilities.

    For each player, ``U_i - W`` must not depend on ``a_i``; the largest spread
    of that difference along ``a_i`` is the largest violation of the potential
    identity over all unilateral deviation pairs.
    """
    worst = Fraction(0)
    for i, U in enumerate(g.utilities):
        D = U - g.welfare
        spread = np.max(D, axis=i) - np.min(D, axis=i)
        worst = max(worst, Fraction(np.max(spread)))
    return PotentialCheck(worst == 0, worst)


def is_identical_interest(g: Game) -> bool:
    return all(np.array_equal(U, g.welfare) for U in g.utilities)


def welfare_maximizers(g: Game) -> frozenset[Profile]:
    W = g.welfare
    top = np.max(W)
    return frozenset(tuple(int(x) for x in p) for p in zip(*np.nonzero(W == top)))
