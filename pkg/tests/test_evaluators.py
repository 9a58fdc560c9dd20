from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import all_profiles, random_games, random_potential_games
from proxygames.constructions import intro_game
from proxygames.evaluators import (
    BUILTIN,
    MAX,
    MEAN,
    MIN,
    SUM,
    Evaluator,
    EvaluatorError,
    NotAPotentialGame,
    ReducedGame,
    check_acceptability,
    evaluate,
    get_evaluator,
    proxy_tensor,
    reduce_game,
    reduce_game_all,
    reduced_potential,
)
from proxygames.game import Game, GameError, rational_array

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=20)


def test_builtin_values():
    s = [Fraction(3), Fraction(1), Fraction(2)]
    assert evaluate(SUM, s) == 6
    assert evaluate(MAX, s) == 3
    assert evaluate(MIN, s) == 1
    assert evaluate(MEAN, s) == 2


def test_empty_input_rejected():
    with pytest.raises(EvaluatorError):
        evaluate(MAX, [])


def test_get_evaluator():
    assert get_evaluator("mean") is MEAN
    assert get_evaluator(MAX) is MAX
    with pytest.raises(EvaluatorError):
        get_evaluator("median")


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_builtins_acceptable(name):
    rep = check_acceptability(BUILTIN[name], trials=2000, rng_seed=1)
    assert rep.acceptable
    assert (not rep.bound_violations) == BUILTIN[name].bounded or name == "sum"


def test_sum_unbounded_witness():
    assert evaluate(SUM, [1, 1]) == 2 > 1
    assert check_acceptability(SUM, trials=500).bound_violations


def test_non_acceptable_function_detected():
    const = Evaluator.custom(lambda s: Fraction(0), name="zero")
    assert check_acceptability(const, trials=200).axiom1_violations
    first_seen = Evaluator.custom(lambda s: s[0] - s[-1], name="gap")
    assert not check_acceptability(first_seen, trials=500).acceptable


def test_table_evaluator_checked_exhaustively():
    good = Evaluator.from_table({(0, 1): Fraction(1, 2), (1, 2): Fraction(3, 2)},
                                name="mid", bounded=True)
    assert evaluate(good, ["1", "0"]) == Fraction(1, 2)
    rep = check_acceptability(good)
    assert rep.acceptable and not rep.bound_violations
    bad = Evaluator.from_table({(0, 1): Fraction(2), (1, 2): Fraction(1)}, name="bad")
    assert check_acceptability(bad).axiom1_violations
    with pytest.raises(EvaluatorError):
        evaluate(good, [5, 6])


@settings(max_examples=200, deadline=None)
@given(st.lists(fractions, min_size=1, max_size=6), st.data())
def test_builtin_axioms_property(lower, data):
    lower = sorted(lower)
    bumps = data.draw(st.lists(st.fractions(min_value=Fraction(1, 100), max_value=10),
                               min_size=len(lower), max_size=len(lower)))
    upper = sorted(x + d for x, d in zip(lower, bumps))
    perm = data.draw(st.permutations(upper))
    for f in BUILTIN.values():
        assert evaluate(f, upper) > evaluate(f, lower)
        assert evaluate(f, perm) == evaluate(f, upper)
        if f.bounded:
            assert min(upper) <= evaluate(f, upper) <= max(upper)


def test_proxy_tensor_matches_loops():
    g = intro_game()
    for f in BUILTIN.values():
        P = proxy_tensor(g.utilities[0], 1, f)
        for p in all_profiles(g.shape):
            col = [g.utilities[0][p[0], b, p[2]] for b in range(2)]
            assert P[p] == evaluate(f, col)


def test_reduced_game_structure():
    g = intro_game()
    r = reduce_game(g, 0, 1, "max")
    assert isinstance(r, ReducedGame)
    assert r.welfare is g.welfare
    assert r.utilities[1] is g.utilities[1] and r.utilities[2] is g.utilities[2]
    assert r.observers == {0} and r.hidden == 1
    # constant along the hidden axis
    assert np.array_equal(r.utilities[0][:, 0, :], r.utilities[0][:, 1, :])
    assert set(r.proxies) == {0}


def test_reduce_game_errors():
    g = intro_game()
    with pytest.raises(GameError):
        reduce_game(g, 1, 1, "max")
    with pytest.raises(GameError):
        reduce_game(g, 0, 5, "max")
    with pytest.raises(EvaluatorError):
        reduce_game(g, 0, 1, "median")


def test_reduce_all_keeps_hidden_utility():
    g = intro_game()
    r = reduce_game_all(g, 1, MIN)
    assert r.observers == {0, 2}
    assert r.utilities[1] is g.utilities[1]


def test_one_action_hidden_player_is_identity():
    u = rational_array(np.arange(6).reshape(3, 1, 2))
    w = rational_array(np.arange(6).reshape(3, 1, 2)) / 5
    g = Game([u, u, u], w)
    for f in BUILTIN.values():
        assert np.array_equal(reduce_game(g, 0, 1, f).utilities[0], g.utilities[0])


def test_reduced_potential():
    from proxygames.constructions import staggered_potential_game

    g = staggered_potential_game(Fraction(1, 10))
    Wt = reduced_potential(g, 1)
    assert Wt.shape == (g.shape[0], g.shape[2])
    for a1 in range(g.shape[0]):
        for a3 in range(g.shape[2]):
            assert Wt[a1, a3] == max(g.welfare[a1, b, a3] for b in range(3))
    with pytest.raises(NotAPotentialGame):
        reduced_potential(intro_game())


@settings(max_examples=40, deadline=None)
@given(random_games(min_players=2))
def test_max_proxy_dominates_min_proxy(g):
    hidden = g.n - 1
    hi = reduce_game(g, 0, hidden, MAX).utilities[0]
    lo = reduce_game(g, 0, hidden, MIN).utilities[0]
    mean = reduce_game(g, 0, hidden, MEAN).utilities[0]
    assert np.all(lo <= mean) and np.all(mean <= hi)


@settings(max_examples=30, deadline=None)
@given(random_potential_games(min_players=2))
def test_reduced_potential_is_hidden_max(g):
    Wt = reduced_potential(g, 1)
    assert np.array_equal(Wt, np.max(g.welfare, axis=1))
