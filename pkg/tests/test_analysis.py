from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import all_profiles, game_from_ints, int_tensors, random_games, shapes
from proxygames.analysis import (
    UndefinedQualityError,
    candogan_bound_check,
    check_abr_invariance,
    check_prop_ii,
    check_thm_all,
    coarse_alignment_certificate,
    equilibrium_states,
    max_pairwise_difference,
    quality_minus,
    quality_report,
    theorem_suite,
    thm_all_tightness,
)
from proxygames.constructions import block_identical_interest_game, intro_game, staggered_potential_game
from proxygames.dynamics import stochastically_stable_exact
from proxygames.evaluators import BUILTIN, reduce_game, reduced_potential
from proxygames.game import Game, GameError, pure_nash_equilibria, rational_array
from proxygames.random_games import random_identical_interest_game, random_potential_game

F = Fraction


def brute_mpd(g1, g2):
    worst = F(0)
    for p in all_profiles(g1.shape):
        for i in range(g1.n):
            for b in range(g1.shape[i]):
                q = p[:i] + (b,) + p[i + 1:]
                d1 = g1.utilities[i][p] - g1.utilities[i][q]
                d2 = g2.utilities[i][p] - g2.utilities[i][q]
                worst = max(worst, abs(d1 - d2))
    return worst


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_intro_quality(name):
    d = F(1, 10)
    g = intro_game(d)
    rep = quality_minus(g, reduce_game(g, 0, 1, name), "abr")
    assert rep.q_minus == 5 * d / (3 - d) == F(10, 58)


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_staggered_quality_is_six_eps(name):
    g = staggered_potential_game(F(1, 10))
    assert quality_minus(g, reduce_game(g, 0, 1, name), "abr").q_minus == F(3, 5)


def test_one_action_hidden_player_quality_one():
    W = rational_array(np.array([1, 2, 0, 3]).reshape(2, 1, 2)) / 3
    g = Game([W, W, W], W)
    for c in ("pne", "abr", "ss"):
        rep = quality_report(g, reduce_game(g, 0, 1, "min"), c)
        assert rep.q_minus == rep.q_plus == 1


def test_undefined_quality_raises():
    W = rational_array([[0, 1], [1, 0]])
    u = rational_array([[1, 0], [0, 1]])
    g = Game([u, u], W)  # coordination on zero-welfare diagonal
    with pytest.raises(UndefinedQualityError):
        quality_minus(g, g, "pne")
    with pytest.raises(ValueError):
        equilibrium_states(g, "cce")


@settings(max_examples=40, deadline=None)
@given(random_games(min_players=3, max_players=3), st.sampled_from(sorted(BUILTIN)),
       st.sampled_from(["pne", "abr", "ss"]))
def test_q_plus_at_most_q_minus(g, name, concept):
    rep = quality_report(g, reduce_game(g, 0, 1, name), concept)
    if rep.q_minus is not None and rep.q_plus is not None:
        assert rep.q_plus <= rep.q_minus


@settings(max_examples=30, deadline=None)
@given(random_games(min_players=3, max_players=3), st.sampled_from(sorted(BUILTIN)))
def test_ss_quality_extremes_attained(g, name):
    r = reduce_game(g, 0, 1, name)
    rep = quality_report(g, r, "ss")
    ss = stochastically_stable_exact(r)
    assert rep.reduced_states == ss
    vals = {g.welfare[a] for a in ss}
    assert rep.reduced_welfare_min in vals and rep.reduced_welfare_max in vals


@st.composite
def game_triples(draw):
    shape = draw(shapes(2, 3, 3))
    w = draw(int_tensors(shape))
    return [game_from_ints(shape, [draw(int_tensors(shape)) for _ in shape], w) for _ in range(3)]


@settings(max_examples=50, deadline=None)
@given(game_triples())
def test_mpd_pseudometric(games):
    a, b, c = games
    assert max_pairwise_difference(a, a) == 0
    assert max_pairwise_difference(a, b) == max_pairwise_difference(b, a) == brute_mpd(a, b)
    assert max_pairwise_difference(a, c) <= max_pairwise_difference(a, b) + max_pairwise_difference(b, c)


def test_mpd_ignores_constant_shift():
    g = intro_game()
    shifted = g.with_utilities([g.utilities[0] + 7, g.utilities[1], g.utilities[2]])
    assert max_pairwise_difference(g, shifted) == 0
    with pytest.raises(GameError):
        max_pairwise_difference(g, staggered_potential_game(F(1, 10)))


def test_mpd_bounded_reduction():
    eps = F(1, 20)
    for seed in range(10):
        g = random_potential_game(3, (3, 3, 3), eps, seed)
        for name in ("max", "min", "mean"):
            assert max_pairwise_difference(g, reduce_game(g, 0, 1, name)) <= 2 * eps


def test_candogan_zero_eps_bound_is_one():
    g = random_potential_game(3, (2, 3, 2), 0, 4)
    v = candogan_bound_check(g, reduce_game(g, 0, 1, "max"), 0)
    assert v.bound == 1 and v.passed and v.measured == 1


def test_candogan_vacuous_on_staggered():
    g = staggered_potential_game(F(1, 10))
    v = candogan_bound_check(g, reduce_game(g, 0, 1, "mean"))
    assert v.bound == 0 and v.details["vacuous"] and v.passed
    assert v.measured == F(3, 5)
    with pytest.raises(ValueError):
        candogan_bound_check(g, reduce_game(g, 0, 1, "sum"))
    assert not candogan_bound_check(intro_game(), reduce_game(intro_game(), 0, 1, "max")).applicable


def test_candogan_sweep_small():
    eps = F(1, 200)
    for seed in range(10):
        g = random_potential_game(3, (2, 3, 2), eps, seed)
        v = candogan_bound_check(g, reduce_game(g, 0, 1, "min"), eps)
        assert v.bound == F(14, 25) and v.passed


def _unique_pne_games(count, eps=F(1, 10)):
    seed = 0
    while count:
        g = random_potential_game(3, (3, 3, 3), eps, seed)
        seed += 1
        if len(pure_nash_equilibria(g)) == 1:
            count -= 1
            yield g


def test_coarse_reduced_potential_passes():
    for g in _unique_pne_games(10):
        v = coarse_alignment_certificate(g)
        assert v.details["premise"] and v.passed
        assert v.details["equilibria"] == sorted(pure_nash_equilibria(g))


def test_coarse_aligned_perturbation_passes():
    for g in _unique_pne_games(10):
        Wt = reduced_potential(g, 1)
        top = Wt == np.max(Wt, axis=0, keepdims=True)
        # lower every non-argmax entry further; argmax sets are unchanged
        P = np.where(top, Wt, Wt - F(1, 7))
        v = coarse_alignment_certificate(g, P)
        assert v.details["premise"] and v.passed


def test_coarse_premise_fails_for_staggered_max_proxy():
    g = staggered_potential_game(F(1, 10))
    proxy = reduce_game(g, 0, 1, "max").utilities[0]
    v = coarse_alignment_certificate(g, proxy)
    assert not v.details["premise"]
    assert v.details["failing_contexts"]


def test_coarse_errors():
    two = rational_array([[1, 0], [0, 1]])
    with pytest.raises(GameError, match="3 players"):
        coarse_alignment_certificate(Game([two, two], two))
    W = rational_array(np.array([1, 0, 0, 0, 0, 0, 0, 1]).reshape(2, 2, 2))
    with pytest.raises(GameError, match="unique"):
        coarse_alignment_certificate(Game([W, W, W], W))


def test_prop_ii_on_random_games():
    for seed in range(30):
        g = random_identical_interest_game(3, (3, 3, 3), F(1, 10), seed)
        assert check_prop_ii(g).passed


def test_thm_all_and_tightness():
    for seed in range(10):
        v = check_thm_all(random_identical_interest_game(3, (3, 3, 3), F(1, 5), seed))
        assert v.passed and v.measured >= F(4, 5)
    g0 = random_identical_interest_game(3, (2, 2, 2), 0, 1)
    assert check_thm_all(g0).measured == 1
    t = thm_all_tightness(block_identical_interest_game(F(1, 10)))
    assert t.passed and t.measured == F(4, 5)


def test_abr_invariance_eps_zero():
    g = random_potential_game(3, (3, 3, 3), 0, 2)
    assert all(v.passed for v in check_abr_invariance(g, BUILTIN))
    assert not check_abr_invariance(random_potential_game(3, (3, 3, 3), F(1, 5), 2), BUILTIN)[0].applicable


def test_theorem_suite_reports_every_checker():
    g = staggered_potential_game(F(1, 10))
    verdicts = theorem_suite(g, options={"eps": F(1, 2)})
    names = [v.theorem for v in verdicts]
    for t in ("prop-bad", "thm-pgbad", "thm-sspg", "prop-ii", "thm-ss", "thm-all",
              "thm-candogan", "prop-coarse", "abr-eps0"):
        assert t in names
    # identical-interest checkers report the failed precondition
    assert not next(v for v in verdicts if v.theorem == "prop-ii").applicable
    assert all(v.passed for v in verdicts if v.theorem == "thm-pgbad")
    again = [(v.theorem, v.status, v.measured) for v in theorem_suite(g, options={"eps": F(1, 2)})]
    assert again == [(v.theorem, v.status, v.measured) for v in verdicts]


@st.composite
def potential_with_proxy(draw):
    from helpers import marginal_game

    shape = (draw(st.integers(1, 3)), draw(st.integers(1, 3)), draw(st.integers(1, 3)))
    g = marginal_game(draw(int_tensors(shape, 0, 5)))
    proxy = draw(int_tensors((shape[0], shape[2]), 0, 5))
    return g, rational_array(proxy)


@settings(max_examples=150, deadline=None)
@given(potential_with_proxy())
def test_coarse_premise_implies_conclusion(case):
    g, proxy = case
    if len(pure_nash_equilibria(g)) != 1:
        return
    v = coarse_alignment_certificate(g, proxy)
    if v.details["premise"]:
        assert v.details["weakly_acyclic"] and v.passed
