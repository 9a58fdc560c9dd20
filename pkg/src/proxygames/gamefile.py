"""JSON game files with exact rational entries.

Layout::

    {
      "players": 3,
      "actions": [2, 2, 2],
      "utilities": [[...], [...], [...]],   # flat, row-major, player 1 slowest
      "welfare": [...],
      "labels": [["A", "B"], ...],          # optional
      "evaluator": {"name": "f", "bounded": true,
                    "table": [[["0", "1"], "1/2"], ...]}   # optional
    }

Numbers are written as ``"p/q"`` strings; integers and decimal strings are
accepted on input. Floats are rejected because they are not exact.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .evaluators import Evaluator
from .game import Game, GameError, as_rational


class GameFileError(ValueError):
    pass


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _number(value, where: str) -> Fraction:
    if isinstance(value, float):
        raise GameFileError(f"{where}: float {value!r} is not exact; write it as a string")
    try:
        return as_rational(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise GameFileError(f"{where}: cannot parse {value!r} as a rational ({exc})") from None


def _flat(values, count: int, where: str) -> list[Fraction]:
    if not isinstance(values, list):
        raise GameFileError(f"{where}: expected a list, got {type(values).__name__}")
    if len(values) != count:
        raise GameFileError(f"{where}: has {len(values)} entries, expected {count}")
    return [_number(v, f"{where}[{k}]") for k, v in enumerate(values)]


def game_to_dict(g: Game, evaluator: Evaluator | None = None) -> dict:
    data = {
        "players": g.n,
        "actions": list(g.action_counts),
        "utilities": [[format_rational(x) for x in U.ravel()] for U in g.utilities],
        "welfare": [format_rational(x) for x in g.welfare.ravel()],
    }
    if g.labels is not None:
        data["labels"] = [list(row) for row in g.labels]
    if evaluator is not None:
        if evaluator.table is None:
            raise GameFileError(f"evaluator {evaluator.name!r} has no table to serialize")
        data["evaluator"] = {
            "name": evaluator.name,
            "bounded": evaluator.bounded,
            "table": [[[format_rational(v) for v in key], format_rational(out)]
                      for key, out in sorted(evaluator.table.items())],
        }
    return data


def dict_to_game(data: dict) -> tuple[Game, Evaluator | None]:
    if not isinstance(data, dict):
        raise GameFileError("top level must be an object")
    for key in ("players", "actions", "utilities", "welfare"):
        if key not in data:
            raise GameFileError(f"missing field {key!r}")
    n = data["players"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise GameFileError(f"players: expected a positive integer, got {n!r}")
    actions = data["actions"]
    if (not isinstance(actions, list) or len(actions) != n
            or not all(isinstance(c, int) and not isinstance(c, bool) and c > 0 for c in actions)):
        raise GameFileError(f"actions: expected {n} positive integers, got {actions!r}")
    shape = tuple(actions)
    size = int(np.prod(shape))
    us = data["utilities"]
    if not isinstance(us, list) or len(us) != n:
        raise GameFileError(f"utilities: expected {n} arrays, one per player")
    tensors = []
    for i, u in enumerate(us):
        vals = _flat(u, size, f"utilities[{i}] (player {i + 1})")
        tensors.append(np.array(vals, dtype=object).reshape(shape))
    welfare = np.array(_flat(data["welfare"], size, "welfare"), dtype=object).reshape(shape)
    labels = data.get("labels")
    if labels is not None:
        if (not isinstance(labels, list) or len(labels) != n
                or any(not isinstance(row, list) or len(row) != c for row, c in zip(labels, shape))):
            raise GameFileError("labels: expected one list of names per player matching its action count")
        labels = tuple(tuple(str(x) for x in row) for row in labels)
    normalized = bool(welfare.min() >= 0 and welfare.max() == 1)
    try:
        g = Game(tensors, welfare, normalized=normalized, labels=labels)
    except GameError as exc:
        raise GameFileError(str(exc)) from None
    return g, _evaluator_from(data.get("evaluator"))


def _evaluator_from(raw) -> Evaluator | None:
    if raw is None:
        return None
    if not isinstance(raw, dict) or "table" not in raw:
        raise GameFileError("evaluator: expected an object with a 'table' field")
    table = {}
    for k, entry in enumerate(raw["table"]):
        where = f"evaluator.table[{k}]"
        if not isinstance(entry, list) or len(entry) != 2 or not isinstance(entry[0], list):
            raise GameFileError(f"{where}: expected [[values...], output]")
        key = tuple(sorted(_number(v, where) for v in entry[0]))
        table[key] = _number(entry[1], where)
    return Evaluator.from_table(table, name=str(raw.get("name", "custom")),
                                bounded=bool(raw.get("bounded", False)))


def save_game(g: Game, path, evaluator: Evaluator | None = None) -> None:
    Path(path).write_text(json.dumps(game_to_dict(g, evaluator), indent=1) + "\n", encoding="utf-8")


def load_game_with_evaluator(path) -> tuple[Game, Evaluator | None]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameFileError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return dict_to_game(data)
    except GameFileError as exc:
        raise GameFileError(f"{path}: {exc}") from None


def load_game(path) -> Game:
    return load_game_with_evaluator(path)[0]
