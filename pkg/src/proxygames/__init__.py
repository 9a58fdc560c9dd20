"""Exact analysis of games in which some players replace their utilities with
proxy payoffs because another player's action is hidden from them."""

from .analysis import (
    QualityReport,
    TheoremVerdict,
    UndefinedQualityError,
    candogan_bound_check,
    coarse_alignment_certificate,
    max_pairwise_difference,
    quality_minus,
    quality_plus,
    quality_report,
    theorem_suite,
)
from .constructions import (
    block_identical_interest_game,
    intro_game,
    staggered_potential_game,
    validate_block_game,
)
from .dynamics import (
    abr_classes,
    abr_transition_matrix,
    is_weakly_acyclic,
    lll_transition_matrix,
    recurrent_classes,
    stationary_distribution,
    stochastically_stable_exact,
    stochastically_stable_sweep,
)
from .evaluators import (
    MAX,
    MEAN,
    MIN,
    SUM,
    Evaluator,
    ReducedGame,
    check_acceptability,
    reduce_game,
    reduce_game_all,
    reduced_potential,
)
from .game import (
    Game,
    GameError,
    best_response_set,
    inconsequentiality,
    inconsequentiality_matrix,
    is_identical_interest,
    pure_nash_equilibria,
    verify_potential,
)
from .gamefile import load_game, save_game
from .random_games import random_identical_interest_game, random_potential_game

__version__ = "0.1.0"
