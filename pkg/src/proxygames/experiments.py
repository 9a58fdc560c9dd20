"""One runner per reproducible result, each returning a list of verdicts.

Random sweeps draw seeds ``seed, seed+1, ...`` and may be spread over worker
processes (``PROXYGAMES_THREADS``); results are always returned in seed order.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .analysis import (
    TheoremVerdict,
    candogan_bound_check,
    check_abr_invariance,
    check_pgbad,
    check_prop_bad,
    check_prop_ii,
    check_sspg,
    check_thm_all,
    check_thm_ss,
    coarse_alignment_certificate,
    quality_minus,
    thm_all_tightness,
)
from .constructions import (
    ConstructionError,
    block_count,
    block_identical_interest_game,
    block_trap,
    intro_game,
    staggered_levels,
    staggered_potential_game,
    validate_block_game,
)
from .dynamics import abr_classes, is_weakly_acyclic, stochastically_stable_exact
from .evaluators import BUILTIN, reduce_game
from .game import as_rational, inconsequentiality, pure_nash_equilibria
from .random_games import random_identical_interest_game, random_potential_game, shape_for_states


class ExperimentError(ValueError):
    """Inadmissible experiment parameters."""


@dataclass
class ExperimentResult:
    experiment: str
    params: dict
    verdicts: list[TheoremVerdict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.applicable and v.passed for v in self.verdicts)


def worker_count() -> int:
    raw = os.environ.get("PROXYGAMES_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ExperimentError(f"PROXYGAMES_THREADS must be an integer, got {raw!r}") from None


def _map(fn: Callable, items: list) -> list:
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _rational(name, value, default) -> Fraction:
    if value is None:
        return Fraction(default)
    try:
        return as_rational(value) if not isinstance(value, float) else Fraction(str(value))
    except (TypeError, ValueError, ZeroDivisionError):
        raise ExperimentError(f"--{name} must be a rational number, got {value!r}") from None


def _positive_int(name, value, default) -> int:
    value = default if value is None else value
    if int(value) < 1:
        raise ExperimentError(f"--{name} must be a positive integer, got {value}")
    return int(value)


def _evaluator_names(names, bounded_only=False) -> list[str]:
    names = list(names) if names else list(BUILTIN)
    for n in names:
        if n not in BUILTIN:
            raise ExperimentError(f"unknown evaluator {n!r}; choose from {sorted(BUILTIN)}")
    if bounded_only:
        names = [n for n in names if BUILTIN[n].bounded]
        if not names:
            raise ExperimentError("this experiment needs at least one bounded evaluator")
    return names


def _shape(states) -> tuple[int, ...]:
    if states is None:
        return (3, 3, 3)
    try:
        return shape_for_states(int(states))
    except ValueError as exc:
        raise ExperimentError(str(exc)) from None


def _tag(verdicts, **extra):
    for v in verdicts:
        v.details.update(extra)
    return verdicts


def _eq_verdict(name, claim, expected, measured, witnesses=(), **details) -> TheoremVerdict:
    return TheoremVerdict(name, claim, None, None, expected == measured, list(witnesses),
                          details={"expected": expected, "measured": measured, **details})


# -- constructions -------------------------------------------------------------


def run_intro(delta=None, evaluators=None, **_) -> ExperimentResult:
    d = _rational("delta", delta, Fraction(1, 10))
    try:
        g = intro_game(d)
    except ConstructionError as exc:
        raise ExperimentError(str(exc)) from None
    res = ExperimentResult("intro", {"delta": d})
    target = 5 * d / (3 - d)
    top, bottom = (0, 0, 0), (1, 1, 1)
    res.verdicts.append(_eq_verdict("intro", "nominal PNE is {(A,A,left)}",
                                    frozenset({top}), pure_nash_equilibria(g)))
    for name in _evaluator_names(evaluators):
        r = reduce_game(g, 0, 1, name)
        pne = pure_nash_equilibria(r)
        abr = abr_classes(r).profile_states()
        rep = quality_minus(g, r, "abr")
        ok = pne == abr == frozenset({bottom}) and rep.q_minus == target
        res.verdicts.append(TheoremVerdict(
            "intro", "reduced PNE = ABR = {(B,B,right)} and Q-_ABR = 5d/(3-d)",
            target, rep.q_minus, ok, sorted(pne),
            details={"evaluator": name, "reduced_pne": sorted(pne), "reduced_abr": sorted(abr)}))
    return res


def run_prop_bad(eps=None, delta=None, evaluators=None, **_) -> ExperimentResult:
    e = _rational("eps", eps, Fraction(1, 10))
    if e <= 0:
        raise ExperimentError("--eps must be positive")
    limit = 3 * e / (5 + e)
    d = _rational("delta", delta, min(limit / 2, Fraction(1, 2)))
    if not 0 < d < limit:
        raise ExperimentError(f"--delta must lie in (0, {limit}) for target eps {e}")
    g = intro_game(d)
    res = ExperimentResult("prop-bad", {"eps": e, "delta": d})
    res.verdicts = _tag(check_prop_bad(g, _evaluator_names(evaluators), e), delta=d)
    return res


def _staggered(eps) -> tuple[Fraction, int]:
    e = _rational("eps", eps, Fraction(1, 20))
    if not 0 < e < Fraction(1, 7):
        raise ExperimentError(f"--eps must lie in (0, 1/7) for the staggered game, got {e}")
    return e, staggered_levels(e)


def run_thm_pgbad(eps=None, evaluators=None, **_) -> ExperimentResult:
    e, M = _staggered(eps)
    g = staggered_potential_game(e)
    res = ExperimentResult("thm-pgbad", {"eps": e, "M": M})
    pne = pure_nash_equilibria(g)
    res.verdicts.append(_eq_verdict("thm-pgbad", "nominal unique PNE (0,0,0) with W = 1",
                                    (frozenset({(0, 0, 0)}), Fraction(1)), (pne, g.welfare[0, 0, 0])))
    res.verdicts.append(_eq_verdict("thm-pgbad", "player 2 is exactly 6eps-inconsequential to player 1",
                                    6 * e, inconsequentiality(g, 0, 1)))
    names = _evaluator_names(evaluators)
    end = (M + 1, 0, M)
    for name in names:
        r = reduce_game(g, 0, 1, name)
        wa = is_weakly_acyclic(r)
        w = g.welfare[end]
        ok = wa.holds and wa.equilibria == frozenset({end}) and w == 1 - 2 * e - M * e
        res.verdicts.append(TheoremVerdict(
            "thm-pgbad", "reduced game weakly acyclic, unique PNE (M+1,0,M), W = 1-2eps-M eps <= 6eps",
            6 * e, w, ok and w <= 6 * e, sorted(wa.equilibria),
            details={"evaluator": name, "weakly_acyclic": wa.holds}))
    res.verdicts += check_pgbad(g, names)
    return res


def run_thm_sspg(eps=None, evaluators=None, **_) -> ExperimentResult:
    e, M = _staggered(eps)
    g = staggered_potential_game(e)
    res = ExperimentResult("thm-sspg", {"eps": e, "M": M})
    res.verdicts.append(_eq_verdict("thm-sspg", "nominal SS = {(0,0,0)}",
                                    frozenset({(0, 0, 0)}), stochastically_stable_exact(g)))
    names = _evaluator_names(evaluators)
    for name in names:
        ss = stochastically_stable_exact(reduce_game(g, 0, 1, name))
        res.verdicts.append(_eq_verdict("thm-sspg", "reduced SS = {(M+1,0,M)}",
                                        frozenset({(M + 1, 0, M)}), ss, sorted(ss), evaluator=name))
    res.verdicts += check_sspg(g, names)
    return res


def run_thm_ss(eps=None, evaluators=None, **_) -> ExperimentResult:
    e = _rational("eps", eps, Fraction(1, 4))
    if not 0 < e < Fraction(1, 3):
        raise ExperimentError(f"--eps must lie in (0, 1/3) for the block game, got {e}")
    M = block_count(e)
    g = block_identical_interest_game(e)
    res = ExperimentResult("thm-ss", {"eps": e, "M": M})
    problems = validate_block_game(g, e)
    res.verdicts.append(TheoremVerdict("thm-ss", "construction properties (a)-(g) hold", None, None,
                                       not problems, details={"problems": problems}))
    ss = stochastically_stable_exact(g)
    res.verdicts.append(_eq_verdict("thm-ss", "nominal SS = {(0,0,0),(1,1,0)} with W = 1",
                                    (frozenset({(0, 0, 0), (1, 1, 0)}), {Fraction(1)}),
                                    (ss, {g.welfare[a] for a in ss})))
    trap = block_trap(M)
    names = _evaluator_names(evaluators)
    for name in names:
        rss = stochastically_stable_exact(reduce_game(g, 0, 1, name))
        w = max(g.welfare[a] for a in rss)
        res.verdicts.append(TheoremVerdict(
            "thm-ss", "reduced SS within the final trap, welfare <= 2eps", 2 * e, w,
            rss <= trap and w <= 2 * e, sorted(rss), details={"evaluator": name}))
    res.verdicts += check_thm_ss(g, names)
    return res


# -- random sweeps -----------------------------------------------------------------


def _ii_job(args):
    seed, shape, e = args
    g = random_identical_interest_game(len(shape), shape, e, seed)
    return [check_prop_ii(g)]


def _thm_all_job(args):
    seed, shape, e = args
    g = random_identical_interest_game(len(shape), shape, e, seed)
    v = check_thm_all(g)
    # the class bound uses the generator's eps, which caps the measured one
    v.bound = 1 - e
    v.passed = v.applicable and v.measured >= v.bound
    return [v]


def _candogan_job(args):
    seed, shape, e, names = args
    g = random_potential_game(len(shape), shape, e, seed)
    return [candogan_bound_check(g, reduce_game(g, 0, 1, n), e) for n in names]


def _coarse_job(args):
    seed, shape, e = args
    g = random_potential_game(len(shape), shape, e, seed)
    if len(pure_nash_equilibria(g)) != 1:
        return None
    return [coarse_alignment_certificate(g)]


def _eps0_job(args):
    seed, shape, names = args
    g = random_potential_game(len(shape), shape, 0, seed)
    return check_abr_invariance(g, names)


def _sweep(job, seeds, make_args) -> list[TheoremVerdict]:
    out = []
    for seed, vs in zip(seeds, _map(job, [make_args(s) for s in seeds])):
        out += _tag(vs, seed=seed)
    return out


def _sweep_params(eps, seed, samples, states, eps_default, samples_default):
    e = _rational("eps", eps, eps_default)
    if e < 0:
        raise ExperimentError("--eps must be nonnegative")
    seed = 0 if seed is None else int(seed)
    n = _positive_int("samples", samples, samples_default)
    return e, seed, n, _shape(states)


def run_prop_ii(eps=None, seed=None, samples=None, states=None, **_) -> ExperimentResult:
    e, seed, n, shape = _sweep_params(eps, seed, samples, states, Fraction(1, 10), 200)
    res = ExperimentResult("prop-ii", {"eps": e, "seed": seed, "samples": n, "shape": shape})
    res.verdicts = _sweep(_ii_job, range(seed, seed + n), lambda s: (s, shape, e))
    return res


def run_thm_all(eps=None, seed=None, samples=None, states=None, **_) -> ExperimentResult:
    e, seed, n, shape = _sweep_params(eps, seed, samples, states, Fraction(1, 5), 50)
    if e >= 1:
        raise ExperimentError("--eps must be below 1")
    res = ExperimentResult("thm-all", {"eps": e, "seed": seed, "samples": n, "shape": shape})
    res.verdicts = _sweep(_thm_all_job, range(seed, seed + n), lambda s: (s, shape, e))
    if 0 < e / 2 < Fraction(1, 3):
        # block game with half the level is exactly e-inconsequential to everyone
        v = thm_all_tightness(block_identical_interest_game(e / 2))
        v.details["block_eps"] = e / 2
        res.verdicts.append(v)
    return res


def run_thm_candogan(eps=None, seed=None, samples=None, states=None, evaluators=None, **_) -> ExperimentResult:
    e, seed, n, shape = _sweep_params(eps, seed, samples, states, Fraction(1, 200), 50)
    if states is None:
        shape = shape_for_states(12)
    names = _evaluator_names(evaluators, bounded_only=True)
    res = ExperimentResult("thm-candogan", {"eps": e, "seed": seed, "samples": n, "shape": shape})
    res.verdicts = _sweep(_candogan_job, range(seed, seed + n), lambda s: (s, shape, e, names))
    return res


def run_prop_coarse(eps=None, seed=None, samples=None, states=None, **_) -> ExperimentResult:
    """Certificates on random potential games; seeds without a unique PNE are skipped."""
    e, seed, n, shape = _sweep_params(eps, seed, samples, states, Fraction(1, 10), 50)
    res = ExperimentResult("prop-coarse", {"eps": e, "seed": seed, "samples": n, "shape": shape})
    s, skipped = seed, 0
    while len(res.verdicts) < n:
        batch = list(range(s, s + (n - len(res.verdicts))))
        for sd, vs in zip(batch, _map(_coarse_job, [(b, shape, e) for b in batch])):
            if vs is None:
                skipped += 1
            else:
                res.verdicts += _tag(vs, seed=sd)
        s += len(batch)
        if skipped > 100 * n:
            raise ExperimentError("too few random games with a unique equilibrium; try another shape")
    res.params["skipped_seeds"] = skipped
    return res


def run_abr_eps0(seed=None, samples=None, states=None, evaluators=None, **_) -> ExperimentResult:
    _, seed, n, shape = _sweep_params(0, seed, samples, states, 0, 50)
    names = _evaluator_names(evaluators)
    res = ExperimentResult("abr-eps0", {"eps": Fraction(0), "seed": seed, "samples": n, "shape": shape})
    res.verdicts = _sweep(_eps0_job, range(seed, seed + n), lambda s: (s, shape, names))
    return res


EXPERIMENTS: dict[str, Callable[..., ExperimentResult]] = {
    "intro": run_intro,
    "prop-bad": run_prop_bad,
    "thm-pgbad": run_thm_pgbad,
    "thm-sspg": run_thm_sspg,
    "prop-ii": run_prop_ii,
    "thm-ss": run_thm_ss,
    "thm-all": run_thm_all,
    "thm-candogan": run_thm_candogan,
    "prop-coarse": run_prop_coarse,
    "abr-eps0": run_abr_eps0,
}


def run_experiment(name: str, **params) -> ExperimentResult:
    try:
        runner = EXPERIMENTS[name]
    except KeyError:
        raise ExperimentError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}") from None
    return runner(**params)
