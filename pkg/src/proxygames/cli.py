"""Command-line front end: ``generate``, ``analyze`` and ``reproduce``.

Players are numbered from 1 on the command line; action indices are printed
as in the constructions (from 0) unless the game file names them.
Exit codes: 0 all verdicts pass, 1 some verdict fails, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction

from . import constructions, random_games
from .analysis import CONCEPTS, quality_report
from .dynamics import (
    InconclusiveSweepError,
    abr_classes,
    stochastically_stable_exact,
    stochastically_stable_sweep,
)
from .evaluators import BUILTIN, EvaluatorError, reduce_game, reduce_game_all
from .experiments import EXPERIMENTS, ExperimentError, run_experiment
from .game import (
    Game,
    GameError,
    as_rational,
    inconsequentiality_matrix,
    is_identical_interest,
    pure_nash_equilibria,
    verify_potential,
)
from .gamefile import GameFileError, format_rational, game_to_dict, load_game_with_evaluator

log = logging.getLogger("proxygames")

GENERATORS = ("intro", "staggered", "block", "random-potential", "random-ii")


class UsageError(ValueError):
    pass


# -- value formatting ----------------------------------------------------------------


def plain(x):
    """Convert results to JSON-ready values; rationals become exact strings."""
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, bool) or x is None or isinstance(x, (str, float)):
        return x
    if isinstance(x, int):
        return int(x)
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (frozenset, set)):
        return [plain(v) for v in sorted(x)]
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if hasattr(x, "item"):  # numpy scalar
        return plain(x.item())
    return str(x)


def _profile_names(g: Game, profiles) -> list[str]:
    return [g.label(p) for p in sorted(profiles)]


def _rational_arg(text: str) -> Fraction:
    try:
        return as_rational(text)
    except (TypeError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _beta_schedule(text: str) -> list[float]:
    try:
        betas = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad beta schedule {text!r}") from None
    if not betas or betas[0] <= 0 or any(b <= a for a, b in zip(betas, betas[1:])):
        raise argparse.ArgumentTypeError("beta schedule must be positive and strictly increasing")
    return betas


# -- generate ---------------------------------------------------------------------------


def cmd_generate(args) -> tuple[dict, int]:
    kind = args.kind
    try:
        if kind == "intro":
            g = constructions.intro_game(args.delta if args.delta is not None else Fraction(1, 10))
        elif kind == "staggered":
            g = constructions.staggered_potential_game(args.eps if args.eps is not None else Fraction(1, 10))
        elif kind == "block":
            g = constructions.block_identical_interest_game(args.eps if args.eps is not None else Fraction(1, 4))
        else:
            shape = random_games.shape_for_states(args.states) if args.states else (3, 3, 3)
            make = (random_games.random_potential_game if kind == "random-potential"
                    else random_games.random_identical_interest_game)
            eps = args.eps if args.eps is not None else Fraction(1, 20)
            g = make(len(shape), shape, eps, args.seed or 0)
    except constructions.ConstructionError as exc:
        raise UsageError(str(exc)) from None
    return game_to_dict(g), 0


# -- analyze ------------------------------------------------------------------------------


def _concept_section(g: Game, concepts, betas) -> dict:
    out = {}
    if "pne" in concepts:
        out["pne"] = _profile_names(g, pure_nash_equilibria(g))
    if "abr" in concepts:
        out["abr_classes"] = [_profile_names(g, c) for c in abr_classes(g).profiles()]
    if "ss" in concepts:
        out["ss"] = _profile_names(g, stochastically_stable_exact(g))
    if betas:
        try:
            out["ss_sweep"] = _profile_names(g, stochastically_stable_sweep(g, betas))
        except InconclusiveSweepError as exc:
            out["ss_sweep"] = f"inconclusive: {exc}"
    return out


def _player(value: int, g: Game, flag: str) -> int:
    if not 1 <= value <= g.n:
        raise UsageError(f"{flag} {value} is out of range 1..{g.n}")
    return value - 1


def cmd_analyze(args) -> tuple[dict, int]:
    g, file_eval = load_game_with_evaluator(args.game)
    concepts = [args.concept] if args.concept else list(CONCEPTS)
    hidden = _player(args.hidden, g, "--hidden")
    report = {
        "game": {
            "players": g.n,
            "actions": list(g.action_counts),
            "normalized": g.normalized,
            "potential": verify_potential(g).holds,
            "identical_interest": is_identical_interest(g),
        },
        "inconsequentiality": inconsequentiality_matrix(g),
        "nominal": _concept_section(g, concepts, args.beta_schedule),
    }
    name = args.evaluator
    if name is None and file_eval is not None:
        name = file_eval.name
    if name is None:
        return report, 0
    if name in BUILTIN:
        f = BUILTIN[name]
    elif file_eval is not None and name in (file_eval.name, "custom"):
        f = file_eval
    else:
        raise UsageError(f"unknown evaluator {name!r}; choose from {sorted(BUILTIN)} or the game file's table")
    if args.all_observers:
        r = reduce_game_all(g, hidden, f)
    else:
        observer = _player(args.observer, g, "--observer")
        if observer == hidden:
            raise UsageError("--observer and --hidden must differ")
        r = reduce_game(g, observer, hidden, f)
    report["reduction"] = {
        "evaluator": f.name,
        "observers": sorted(i + 1 for i in r.observers),
        "hidden": hidden + 1,
    }
    report["reduced"] = _concept_section(r, concepts, args.beta_schedule)
    quality = []
    for c in concepts:
        rep = quality_report(g, r, c)
        quality.append({
            "concept": c,
            "nominal_welfare_min": rep.nominal_welfare_min,
            "nominal_welfare_max": rep.nominal_welfare_max,
            "reduced_welfare_min": rep.reduced_welfare_min,
            "reduced_welfare_max": rep.reduced_welfare_max,
            "q_minus": rep.q_minus,
            "q_plus": rep.q_plus,
        })
    report["quality"] = quality
    return report, 0


def _analyze_rows(report: dict) -> list[list[str]]:
    rows = [["section", "field", "value"]]

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for k, v in obj.items():
                walk(f"{prefix}.{k}" if prefix else k, v)
        elif isinstance(obj, list) and obj and isinstance(obj[0], dict):
            for k, v in enumerate(obj):
                walk(f"{prefix}[{k}]", v)
        else:
            sec, _, fld = prefix.partition(".")
            value = obj if isinstance(obj, str) else json.dumps(obj)
            rows.append([sec, fld, value])

    walk("", plain(report))
    return rows


# -- reproduce ----------------------------------------------------------------------------


def cmd_reproduce(args) -> tuple[dict, int]:
    res = run_experiment(
        args.experiment, eps=args.eps, delta=args.delta, seed=args.seed,
        samples=args.samples, states=args.states, evaluators=args.evaluator,
    )
    verdicts = []
    for v in res.verdicts:
        verdicts.append({
            "theorem": v.theorem,
            "kind": v.kind,
            "claim": v.claim,
            "status": v.status,
            "bound": v.bound,
            "measured": v.measured,
            "witnesses": v.witnesses,
            "details": v.details,
        })
    report = {
        "experiment": res.experiment,
        "params": res.params,
        "passed": res.passed,
        "verdict_count": len(verdicts),
        "failures": sum(1 for v in res.verdicts if not (v.applicable and v.passed)),
        "verdicts": verdicts,
    }
    return report, 0 if res.passed else 1


def _reproduce_rows(report: dict) -> list[list[str]]:
    rows = [["experiment", "theorem", "kind", "evaluator", "seed", "claim", "status", "bound", "measured", "witnesses"]]
    rep = plain(report)
    for v in rep["verdicts"]:
        d = v["details"]
        rows.append([
            rep["experiment"], v["theorem"], v["kind"], d.get("evaluator", ""),
            "" if d.get("seed") is None else str(d["seed"]), v["claim"], v["status"],
            v["bound"] or "", v["measured"] or "", json.dumps(v["witnesses"]),
        ])
    return rows


# -- entry point -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="proxygames", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", help="write the report here instead of stdout")

    g = sub.add_parser("generate", help="write a game file")
    g.add_argument("kind", choices=GENERATORS)
    g.add_argument("--eps", type=_rational_arg)
    g.add_argument("--delta", type=_rational_arg)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--states", type=int, help="joint profile count for random games (3 players)")
    g.add_argument("--out")

    a = sub.add_parser("analyze", help="equilibria, dynamics and quality of a game file")
    a.add_argument("--game", required=True)
    a.add_argument("--evaluator", help=f"one of {', '.join(BUILTIN)} or the game file's evaluator")
    a.add_argument("--observer", type=int, default=1)
    a.add_argument("--hidden", type=int, default=2)
    a.add_argument("--all-observers", action="store_true")
    a.add_argument("--concept", choices=CONCEPTS)
    a.add_argument("--beta-schedule", type=_beta_schedule,
                   help="comma-separated increasing betas for a numeric cross-check of SS")
    common(a)

    r = sub.add_parser("reproduce", help="rebuild a result and check it")
    r.add_argument("experiment", choices=sorted(EXPERIMENTS))
    r.add_argument("--eps", type=_rational_arg)
    r.add_argument("--delta", type=_rational_arg)
    r.add_argument("--seed", type=int)
    r.add_argument("--samples", type=int)
    r.add_argument("--states", type=int)
    r.add_argument("--evaluator", action="append", choices=sorted(BUILTIN),
                   help="restrict to these evaluators (repeatable)")
    common(r)
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "generate":
            report, code = cmd_generate(args)
            _emit(json.dumps(report, indent=1) + "\n", args.out)
            return code
        if args.command == "analyze":
            report, code = cmd_analyze(args)
            rows = _analyze_rows
        else:
            report, code = cmd_reproduce(args)
            rows = _reproduce_rows
    except (UsageError, GameFileError, ExperimentError, GameError, EvaluatorError, OSError) as exc:
        print(f"proxygames: error: {exc}", file=sys.stderr)
        return 2
    if args.format == "csv":
        _emit(_csv(rows(report)), args.out)
    else:
        _emit(json.dumps(plain(report), indent=1) + "\n", args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
