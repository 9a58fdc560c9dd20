"""Welfare-quality metrics for reduced games and instance-level result checkers.

Checkers come in two kinds. ``universal`` checkers test an inequality that
must hold for every game of a class; a failure is a counterexample.
``witness`` checkers test whether a given game exhibits a pathology (bad
quality relative to its inconsequentiality level); a failure only means the
game is not a witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .dynamics import abr_classes, is_weakly_acyclic, stochastically_stable_exact
from .evaluators import (
    BUILTIN,
    Evaluator,
    ReducedGame,
    get_evaluator,
    reduce_game,
    reduce_game_all,
    reduced_potential,
)
from .game import (
    Game,
    GameError,
    Profile,
    inconsequentiality,
    is_identical_interest,
    pure_nash_equilibria,
    rational_array,
    verify_potential,
    welfare_maximizers,
)

CONCEPTS = ("pne", "abr", "ss")


class UndefinedQualityError(ZeroDivisionError):
    pass


def equilibrium_states(g: Game, concept: str) -> frozenset[Profile]:
    """Profiles in the chosen solution concept; recurrent classes are flattened."""
    concept = concept.lower()
    if concept == "pne":
        return pure_nash_equilibria(g)
    if concept == "abr":
        return abr_classes(g).profile_states()
    if concept == "ss":
        return stochastically_stable_exact(g)
    raise ValueError(f"unknown concept {concept!r}; choose from {CONCEPTS}")


@dataclass(frozen=True)
class QualityReport:
    concept: str
    nominal_welfare_min: Fraction | None
    nominal_welfare_max: Fraction | None
    reduced_welfare_min: Fraction | None
    reduced_welfare_max: Fraction | None
    q_minus: Fraction | None
    q_plus: Fraction | None
    nominal_states: frozenset = field(default=frozenset(), repr=False)
    reduced_states: frozenset = field(default=frozenset(), repr=False)


def quality_report(g: Game, r: Game, concept: str) -> QualityReport:
    """Optimistic (``q_minus``) and pessimistic (``q_plus``) welfare ratios.

    Welfare is always read from the nominal game. A ratio whose denominator is
    zero is reported as ``None``.
    """
    if r.shape != g.shape:
        raise GameError("nominal and reduced games must share the action space")
    nom = equilibrium_states(g, concept)
    red = equilibrium_states(r, concept)
    W = g.welfare
    nw = [W[a] for a in nom]
    rw = [W[a] for a in red]
    n_lo, n_hi = (min(nw), max(nw)) if nw else (None, None)
    r_lo, r_hi = (min(rw), max(rw)) if rw else (None, None)
    q_minus = r_hi / n_lo if nw and rw and n_lo != 0 else None
    q_plus = r_lo / n_hi if nw and rw and n_hi != 0 else None
    return QualityReport(concept, n_lo, n_hi, r_lo, r_hi, q_minus, q_plus, nom, red)


def quality_minus(g: Game, r: Game, concept: str) -> QualityReport:
    rep = quality_report(g, r, concept)
    if rep.q_minus is None:
        raise UndefinedQualityError(
            f"optimistic quality undefined: nominal {concept} minimum welfare is "
            f"{rep.nominal_welfare_min}"
        )
    return rep


def quality_plus(g: Game, r: Game, concept: str) -> QualityReport:
    rep = quality_report(g, r, concept)
    if rep.q_plus is None:
        raise UndefinedQualityError(
            f"pessimistic quality undefined: nominal {concept} maximum welfare is "
            f"{rep.nominal_welfare_max}"
        )
    return rep


def max_pairwise_difference(g1: Game, g2: Game) -> Fraction:
    """Largest gap between the two games' unilateral utility differences."""
    if g1.shape != g2.shape:
        raise GameError(f"shape mismatch: {g1.shape} vs {g2.shape}")
    worst = Fraction(0)
    for i in range(g1.n):
        D = g1.utilities[i] - g2.utilities[i]
        # |(U(a)-U(a'))-(V(a)-V(a'))| = |D(a)-D(a')|, maximized over a fiber along axis i
        spread = np.max(D, axis=i) - np.min(D, axis=i)
        worst = max(worst, Fraction(np.max(spread)))
    return worst


# -- verdicts ------------------------------------------------------------------


@dataclass
class TheoremVerdict:
    theorem: str
    claim: str
    bound: Fraction | None
    measured: Fraction | None
    passed: bool
    witnesses: list = field(default_factory=list)
    kind: str = "universal"
    applicable: bool = True
    details: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        if not self.applicable:
            return "n/a"
        return "pass" if self.passed else "fail"


def _inapplicable(theorem, claim, reason, kind="universal") -> TheoremVerdict:
    return TheoremVerdict(theorem, claim, None, None, False, kind=kind,
                          applicable=False, details={"reason": reason})


def candogan_bound_check(g: Game, r: ReducedGame, eps=None) -> TheoremVerdict:
    """Size-dependent closeness bound for bounded evaluators in potential games.

    Checks that the utility differences of ``r`` stay within ``2 eps`` of the
    nominal ones and that every stochastically stable profile of ``r`` has
    welfare at least ``max(0, 1 - 8 eps (|A| - 1))``. ``eps`` defaults to the
    measured inconsequentiality of the hidden player to the observers.
    """
    claim = "MPD <= 2eps and min SS(G_f) welfare >= max(0, 1-8eps(|A|-1))"
    name = "thm-candogan"
    if not verify_potential(g).holds:
        return _inapplicable(name, claim, "nominal game is not a potential game")
    f = r.evaluator
    if f is None or not f.bounded:
        raise ValueError("the closeness bound needs a bounded evaluator")
    if eps is None:
        eps = max(inconsequentiality(g, i, r.hidden) for i in r.observers)
    eps = Fraction(eps)
    k = g.num_profiles
    bound = max(Fraction(0), 1 - 8 * eps * (k - 1))
    d = max_pairwise_difference(g, r)
    ss = stochastically_stable_exact(r)
    low = min(g.welfare[a] for a in ss)
    ok = d <= 2 * eps and low >= bound
    return TheoremVerdict(
        name, claim, bound, low, ok, sorted(ss),
        details={"evaluator": f.name, "eps": eps, "mpd": d, "mpd_bound": 2 * eps,
                 "states": k, "vacuous": bound == 0},
    )


def coarse_alignment_certificate(g: Game, proxy=None, hidden: int = 1, observer: int = 0) -> TheoremVerdict:
    """Argmax-alignment certificate for a candidate proxy of the observer.

    ``proxy`` is a tensor over the observer's and the remaining players'
    actions (hidden axis removed) or a full tensor constant along the hidden
    axis; it defaults to the reduced potential. The premise is that at every
    context the proxy's argmax is inside the reduced potential's argmax. When
    the premise holds the conclusion is checked directly: the reduced game is
    weakly acyclic under best replies with the nominal equilibrium as its
    only equilibrium.
    """
    name = "prop-coarse"
    claim = "argmax proxy within argmax reduced potential => weakly acyclic with unique PNE a*"
    if g.n < 3:
        raise GameError("the alignment certificate needs at least 3 players")
    pne = pure_nash_equilibria(g)
    if len(pne) != 1:
        raise GameError(f"nominal game must have a unique pure equilibrium, has {len(pne)}")
    if not verify_potential(g).holds:
        return _inapplicable(name, claim, "nominal game is not a potential game")
    (a_star,) = pne
    Wt = reduced_potential(g, hidden)
    if proxy is None:
        proxy = Wt
    P = rational_array(proxy)
    if P.shape == g.shape:
        P = np.take(P, 0, axis=hidden)
    if P.shape != Wt.shape:
        raise GameError(f"proxy shape {P.shape} does not match {Wt.shape}")
    ax = observer if observer < hidden else observer - 1
    p_top = P == np.max(P, axis=ax, keepdims=True)
    w_top = Wt == np.max(Wt, axis=ax, keepdims=True)
    bad_ctx = np.nonzero(np.any(p_top & ~w_top, axis=ax))
    premise = len(bad_ctx[0]) == 0
    details = {"premise": premise, "failing_contexts": [tuple(int(x) for x in c) for c in zip(*bad_ctx)]}
    if not premise:
        return TheoremVerdict(name, claim, None, None, True, [], details=details)
    full = np.broadcast_to(np.expand_dims(P, hidden), g.shape).copy()
    full.flags.writeable = False
    r = ReducedGame(g, {observer: full}, hidden, None)
    wa = is_weakly_acyclic(r)
    ok = wa.holds and wa.equilibria == frozenset({a_star})
    details.update(weakly_acyclic=wa.holds, equilibria=sorted(wa.equilibria), a_star=a_star)
    return TheoremVerdict(name, claim, None, None, ok, [a_star], details=details)


# -- per-result checkers -----------------------------------------------------------


def _evals(evaluators) -> list[Evaluator]:
    return [get_evaluator(f) for f in evaluators]


def check_prop_bad(g: Game, evaluators, eps, observer=0, hidden=1) -> list[TheoremVerdict]:
    """Witness check on any game: optimistic best-reply quality at most ``eps``."""
    eps = Fraction(eps)
    out = []
    for f in _evals(evaluators):
        r = reduce_game(g, observer, hidden, f)
        rep = quality_minus(g, r, "abr")
        out.append(TheoremVerdict(
            "prop-bad", "Q-_ABR(G,f) <= eps", eps, rep.q_minus, rep.q_minus <= eps,
            sorted(rep.reduced_states), kind="witness", details={"evaluator": f.name}))
    return out


def _witness_quality(theorem, g, evaluators, concept, observer, hidden, precondition):
    claim = f"Q-_{concept.upper()}(G,f) <= inconsequentiality of hidden to observer"
    reason = precondition(g)
    if reason:
        return [_inapplicable(theorem, claim, reason, kind="witness")]
    eps = inconsequentiality(g, observer, hidden)
    out = []
    for f in _evals(evaluators):
        r = reduce_game(g, observer, hidden, f)
        rep = quality_minus(g, r, concept)
        out.append(TheoremVerdict(
            theorem, claim, eps, rep.q_minus, rep.q_minus <= eps, sorted(rep.reduced_states),
            kind="witness", details={"evaluator": f.name,
                                     "reduced_welfare_max": rep.reduced_welfare_max}))
    return out


def _needs_potential(g):
    return None if verify_potential(g).holds else "not a potential game"


def _needs_ii(g):
    return None if is_identical_interest(g) else "not an identical-interest game"


def check_pgbad(g, evaluators, observer=0, hidden=1):
    return _witness_quality("thm-pgbad", g, evaluators, "abr", observer, hidden, _needs_potential)


def check_sspg(g, evaluators, observer=0, hidden=1):
    return _witness_quality("thm-sspg", g, evaluators, "ss", observer, hidden, _needs_potential)


def check_thm_ss(g, evaluators, observer=0, hidden=1):
    return _witness_quality("thm-ss", g, evaluators, "ss", observer, hidden, _needs_ii)


def check_prop_ii(g: Game, observer=0, hidden=1) -> TheoremVerdict:
    """Max-evaluator reduction of an identical-interest game keeps every welfare
    maximizer as an equilibrium and creates no new equilibria."""
    name, claim = "prop-ii", "argmax W within PNE(G_max) and PNE(G_max) within PNE(G)"
    reason = _needs_ii(g)
    if reason:
        return _inapplicable(name, claim, reason)
    r = reduce_game(g, observer, hidden, "max")
    red = pure_nash_equilibria(r)
    nom = pure_nash_equilibria(g)
    missing = sorted(welfare_maximizers(g) - red)
    extra = sorted(red - nom)
    bad = len(missing) + len(extra)
    return TheoremVerdict(name, claim, Fraction(0), Fraction(bad), bad == 0,
                          missing + extra, details={"missing_optima": missing, "new_equilibria": extra})


def check_thm_all(g: Game, hidden=1) -> TheoremVerdict:
    """All non-hidden players apply max: every stochastically stable profile keeps
    welfare at least ``1 - eps`` relative to the nominal optimum."""
    name, claim = "thm-all", "Q+_SS(G, f_max, all observers) >= 1 - eps"
    reason = _needs_ii(g)
    if reason:
        return _inapplicable(name, claim, reason)
    others = [i for i in range(g.n) if i != hidden]
    eps = max(inconsequentiality(g, i, hidden) for i in others)
    r = reduce_game_all(g, hidden, "max")
    rep = quality_plus(g, r, "ss")
    bound = 1 - eps
    return TheoremVerdict(name, claim, bound, rep.q_plus, rep.q_plus >= bound,
                          sorted(rep.reduced_states),
                          details={"eps": eps, "reduced_welfare_min": rep.reduced_welfare_min})


def thm_all_tightness(g: Game, hidden=1) -> TheoremVerdict:
    """Lowest welfare over maximizers of the max-reduced welfare, against ``1 - eps``.

    The reduced-welfare maximizers range over every action of the hidden player;
    a game attains the bound when some of them sit exactly ``eps`` below the optimum.
    """
    name, claim = "thm-all-tight", "min W over argmax of max-reduced welfare == 1 - eps"
    reason = _needs_ii(g)
    if reason:
        return _inapplicable(name, claim, reason)
    eps = max(inconsequentiality(g, i, hidden) for i in range(g.n) if i != hidden)
    Wt = np.max(g.welfare, axis=hidden, keepdims=True)
    Wt = np.broadcast_to(Wt, g.shape)
    top = np.max(Wt)
    members = [tuple(int(x) for x in p) for p in zip(*np.nonzero(Wt == top))]
    low = min(g.welfare[a] for a in members)
    wit = sorted(a for a in members if g.welfare[a] == low)
    return TheoremVerdict(name, claim, 1 - eps, low, low == 1 - eps, wit, details={"eps": eps})


def check_abr_invariance(g: Game, evaluators, observer=0, hidden=1) -> list[TheoremVerdict]:
    """A 0-inconsequential hidden player leaves the recurrent classes unchanged."""
    name, claim = "abr-eps0", "ABR(G) == ABR(G_f) when the hidden player is 0-inconsequential"
    if not verify_potential(g).holds:
        return [_inapplicable(name, claim, "not a potential game")]
    if inconsequentiality(g, observer, hidden) != 0:
        return [_inapplicable(name, claim, "hidden player is not 0-inconsequential")]
    nom = abr_classes(g).profiles()
    out = []
    for f in _evals(evaluators):
        red = abr_classes(reduce_game(g, observer, hidden, f)).profiles()
        out.append(TheoremVerdict(name, claim, None, None, red == nom,
                                  sorted(set().union(*red)), details={"evaluator": f.name}))
    return out


def theorem_suite(g: Game, evaluators: Sequence = tuple(BUILTIN), options: dict | None = None
                  ) -> list[TheoremVerdict]:
    """Run every checker against ``g``; class preconditions are tested, not assumed.

    ``options`` may carry ``eps`` (target for the all-games witness check),
    ``observer`` and ``hidden`` (0-based, default 0 and 1).
    """
    options = dict(options or {})
    obs, hid = options.get("observer", 0), options.get("hidden", 1)
    out: list[TheoremVerdict] = []
    if "eps" in options:
        out += check_prop_bad(g, evaluators, options["eps"], obs, hid)
    else:
        out.append(_inapplicable("prop-bad", "Q-_ABR(G,f) <= eps", "no target eps given", "witness"))
    out += check_pgbad(g, evaluators, obs, hid)
    out += check_sspg(g, evaluators, obs, hid)
    out.append(check_prop_ii(g, obs, hid))
    out += check_thm_ss(g, evaluators, obs, hid)
    out.append(check_thm_all(g, hid))
    if verify_potential(g).holds:
        for f in _evals(evaluators):
            if f.bounded:
                out.append(candogan_bound_check(g, reduce_game(g, obs, hid, f)))
    else:
        out.append(_inapplicable("thm-candogan", "closeness bound", "not a potential game"))
    if g.n >= 3 and verify_potential(g).holds and len(pure_nash_equilibria(g)) == 1:
        out.append(coarse_alignment_certificate(g, None, hid, obs))
    else:
        out.append(_inapplicable("prop-coarse", "alignment certificate",
                                 "needs a potential game with n >= 3 and a unique PNE"))
    out += check_abr_invariance(g, evaluators, obs, hid)
    return out
