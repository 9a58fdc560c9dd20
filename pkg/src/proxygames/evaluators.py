"""Proxy-payoff evaluators and the reduced games they induce.

An evaluator turns the list of payoffs a player might be receiving (one entry
per action of a player it can no longer observe) into a single substitute
payoff. Inputs are treated as multisets: duplicates are kept, order is not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .game import Game, GameError, as_rational, rational_array, verify_potential


class EvaluatorError(ValueError):
    pass


@dataclass(frozen=True)
class Evaluator:
    """A named map from a sorted payoff list to one proxy payoff.

    Built-ins are ``sum``, ``max``, ``min`` and ``mean``. Custom evaluators
    carry either a function of the sorted tuple or an explicit ``table`` keyed
    by sorted tuples.
    """

    name: str
    func: Callable[[tuple[Fraction, ...]], Fraction] | None = field(
        default=None, compare=False, repr=False
    )
    bounded: bool = False
    table: Mapping[tuple[Fraction, ...], Fraction] | None = field(
        default=None, compare=False, repr=False
    )

    def __call__(self, values: Sequence) -> Fraction:
        return evaluate(self, values)

    @classmethod
    def from_table(cls, table, *, name: str = "custom", bounded: bool = False) -> "Evaluator":
        """Table evaluator; keys are payoff lists (sorted on entry), values proxies."""
        norm = {}
        for key, val in dict(table).items():
            k = tuple(sorted(as_rational(x) for x in key))
            if not k:
                raise EvaluatorError("evaluator table keys must be nonempty")
            norm[k] = as_rational(val)
        return cls(name=name, table=norm, bounded=bounded)

    @classmethod
    def custom(cls, func, *, name: str = "custom", bounded: bool = False) -> "Evaluator":
        return cls(name=name, func=func, bounded=bounded)


def _mean(s):
    return sum(s, Fraction(0)) / len(s)


SUM = Evaluator("sum", func=lambda s: sum(s, Fraction(0)), bounded=False)
MAX = Evaluator("max", func=lambda s: s[-1], bounded=True)
MIN = Evaluator("min", func=lambda s: s[0], bounded=True)
MEAN = Evaluator("mean", func=_mean, bounded=True)

BUILTIN = {e.name: e for e in (SUM, MAX, MIN, MEAN)}


def get_evaluator(name: str | Evaluator) -> Evaluator:
    if isinstance(name, Evaluator):
        return name
    try:
        return BUILTIN[name]
    except KeyError:
        raise EvaluatorError(
            f"unknown evaluator {name!r}; choose from {sorted(BUILTIN)}"
        ) from None


def evaluate(f: Evaluator, values: Sequence) -> Fraction:
    s = tuple(sorted(as_rational(v) for v in values))
    if not s:
        raise EvaluatorError("evaluator input must be nonempty")
    if f.table is not None:
        try:
            return f.table[s]
        except KeyError:
            raise EvaluatorError(
                f"evaluator {f.name!r} has no table entry for {[str(x) for x in s]}"
            ) from None
    if f.func is None:
        raise EvaluatorError(f"evaluator {f.name!r} has neither a function nor a table")
    return as_rational(f.func(s))


# -- acceptability -------------------------------------------------------------


@dataclass
class AcceptabilityReport:
    trials: int
    axiom1_violations: list = field(default_factory=list)
    axiom2_violations: list = field(default_factory=list)
    bound_violations: list = field(default_factory=list)

    @property
    def acceptable(self) -> bool:
        return not self.axiom1_violations and not self.axiom2_violations


def _random_list(rng, k: int) -> list[Fraction]:
    nums = rng.integers(-1000, 1001, size=k)
    dens = rng.integers(1, 41, size=k)
    return [Fraction(int(a), int(b)) for a, b in zip(nums, dens)]


def _table_pairs(f: Evaluator):
    by_len: dict[int, list] = {}
    for key in f.table:
        by_len.setdefault(len(key), []).append(key)
    for keys in by_len.values():
        for s in keys:
            for t in keys:
                yield list(s), list(t)


def check_acceptability(
    f: Evaluator, trials: int = 10_000, rng_seed: int = 0, max_len: int = 6
) -> AcceptabilityReport:
    """Sample pairs of equal-length lists and look for axiom violations.

    Axiom 1: a list that strictly dominates another elementwise (both sorted)
    must get a strictly larger proxy. Axiom 2: equal multisets, presented in
    different orders, must get equal proxies. Out-of-range outputs are
    collected as ``bound_violations`` regardless of ``f.bounded``.

    Table evaluators are checked exhaustively over pairs of their own keys.
    """
    if trials < 1:
        raise EvaluatorError("trials must be >= 1")
    rep = AcceptabilityReport(trials=trials)
    rng = np.random.default_rng(rng_seed)

    def bound_check(s):
        v = evaluate(f, s)
        if not (min(s) <= v <= max(s)):
            rep.bound_violations.append((sorted(s), v))

    if f.table is not None:
        for s, t in _table_pairs(f):
            ss, tt = sorted(s), sorted(t)
            if all(x > y for x, y in zip(ss, tt)) and not evaluate(f, ss) > evaluate(f, tt):
                rep.axiom1_violations.append((ss, tt))
            if ss == tt and evaluate(f, s) != evaluate(f, t):
                rep.axiom2_violations.append((ss, tt))
        for key in f.table:
            bound_check(list(key))
        return rep

    for _ in range(trials):
        k = int(rng.integers(1, max_len + 1))
        lower = sorted(_random_list(rng, k))
        bumps = [Fraction(int(a), int(b)) for a, b in zip(
            rng.integers(1, 101, size=k), rng.integers(1, 41, size=k))]
        upper = sorted(x + d for x, d in zip(lower, bumps))
        if not evaluate(f, upper) > evaluate(f, lower):
            rep.axiom1_violations.append((upper, lower))
        shuffled = [upper[j] for j in rng.permutation(k)]
        if evaluate(f, shuffled) != evaluate(f, upper):
            rep.axiom2_violations.append((shuffled, upper))
        bound_check(upper)
    return rep


# -- reduced games ---------------------------------------------------------------


class ReducedGame(Game):
    """A game in which ``observers`` decide on proxy payoffs for ``hidden``.

    Lives on the same joint action space as ``base``; each proxy tensor is
    constant along the hidden player's axis. Welfare is the base tensor itself.
    """

    def __init__(self, base: Game, proxies: Mapping[int, np.ndarray], hidden: int,
                 evaluator: Evaluator | None = None):
        utilities = [proxies.get(i, base.utilities[i]) for i in range(base.n)]
        super().__init__(utilities, base.welfare, normalized=base.normalized,
                         labels=base.labels)
        self.base = base
        self.hidden = hidden
        self.observers = frozenset(proxies)
        self.evaluator = evaluator

    @property
    def proxies(self) -> dict[int, np.ndarray]:
        return {i: self.utilities[i] for i in sorted(self.observers)}

    def __repr__(self) -> str:
        name = self.evaluator.name if self.evaluator else "?"
        obs = ",".join(str(i + 1) for i in sorted(self.observers))
        return f"ReducedGame({self.base!r}, observers=[{obs}], hidden={self.hidden + 1}, f={name})"


def proxy_tensor(U: np.ndarray, hidden: int, f: Evaluator) -> np.ndarray:
    """Apply ``f`` along ``hidden`` and broadcast back to the full shape."""
    moved = np.moveaxis(U, hidden, -1)
    rows = moved.reshape(-1, moved.shape[-1])
    vals = np.empty(rows.shape[0], dtype=object)
    for r in range(rows.shape[0]):
        vals[r] = evaluate(f, list(rows[r]))
    vals = vals.reshape(moved.shape[:-1])
    full = np.broadcast_to(np.expand_dims(vals, hidden), U.shape).copy()
    full.flags.writeable = False
    return full


def reduce_game(g: Game, observer: int, hidden: int, f: Evaluator | str) -> ReducedGame:
    f = get_evaluator(f)
    for p in (observer, hidden):
        if not 0 <= p < g.n:
            raise GameError(f"invalid player index {p} for a {g.n}-player game")
    if observer == hidden:
        raise GameError("a player cannot be hidden from itself")
    return ReducedGame(g, {observer: proxy_tensor(g.utilities[observer], hidden, f)}, hidden, f)


def reduce_game_all(g: Game, hidden: int, f: Evaluator | str) -> ReducedGame:
    """Every player except ``hidden`` applies ``f``; ``hidden`` keeps its utility."""
    f = get_evaluator(f)
    if not 0 <= hidden < g.n:
        raise GameError(f"invalid player index {hidden} for a {g.n}-player game")
    proxies = {
        i: proxy_tensor(g.utilities[i], hidden, f) for i in range(g.n) if i != hidden
    }
    return ReducedGame(g, proxies, hidden, f)


class NotAPotentialGame(GameError):
    pass


def reduced_potential(g: Game, hidden: int = 1) -> np.ndarray:
    """Welfare maximized over the hidden player's action (hidden axis removed)."""
    chk = verify_potential(g)
    if not chk.holds:
        raise NotAPotentialGame(
            f"welfare is not a potential for this game (max violation {chk.max_violation})"
        )
    out = np.max(g.welfare, axis=hidden)
    if not isinstance(out, np.ndarray):
        out = rational_array([out]).reshape(())
    out.flags.writeable = False
    return out
