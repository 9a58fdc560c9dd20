import csv
import io
import json
from fractions import Fraction

import pytest

from proxygames import cli, experiments
from proxygames.analysis import TheoremVerdict
from proxygames.gamefile import load_game


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def intro_file(tmp_path):
    path = tmp_path / "intro.json"
    assert cli.main(["generate", "intro", "--delta", "1/10", "--out", str(path)]) == 0
    return path


def test_generate_writes_loadable_game(tmp_path):
    for kind, extra in [("staggered", ["--eps", "1/10"]), ("block", ["--eps", "1/4"]),
                        ("random-potential", ["--states", "12", "--seed", "3"]), ("random-ii", [])]:
        path = tmp_path / f"{kind}.json"
        assert cli.main(["generate", kind, *extra, "--out", str(path)]) == 0
        assert load_game(path).n == 3


def test_analyze_intro(capsys, intro_file):
    code, out, _ = run(capsys, "analyze", "--game", str(intro_file), "--evaluator", "max")
    rep = json.loads(out)
    assert code == 0
    assert rep["nominal"]["pne"] == ["(A,A,left)"]
    assert rep["reduced"]["pne"] == ["(B,B,right)"]
    abr = next(q for q in rep["quality"] if q["concept"] == "abr")
    assert Fraction(abr["q_minus"]) == Fraction(5, 29)


def test_analyze_is_deterministic(capsys, intro_file):
    args = ("analyze", "--game", str(intro_file), "--evaluator", "mean", "--format", "csv")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second


def test_analyze_one_action_hidden(capsys, tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({
        "players": 3, "actions": [2, 1, 2],
        "utilities": [["1", "0", "0", "1"]] * 3, "welfare": ["1", "0", "0", "1/2"]}))
    _, out, _ = run(capsys, "analyze", "--game", str(path), "--evaluator", "sum")
    rep = json.loads(out)
    assert rep["nominal"] == rep["reduced"]


def test_analyze_all_observers_and_concept(capsys, intro_file):
    code, out, _ = run(capsys, "analyze", "--game", str(intro_file), "--evaluator", "min",
                       "--all-observers", "--concept", "ss")
    rep = json.loads(out)
    assert code == 0 and rep["reduction"]["observers"] == [1, 3]
    assert set(rep["nominal"]) == {"ss"}


def test_analyze_beta_schedule(capsys, intro_file):
    _, out, _ = run(capsys, "analyze", "--game", str(intro_file), "--concept", "ss",
                    "--beta-schedule", "1,10,100")
    rep = json.loads(out)
    assert rep["nominal"]["ss_sweep"] == rep["nominal"]["ss"]


def test_csv_reparses_exactly(capsys):
    code, out, _ = run(capsys, "reproduce", "thm-pgbad", "--eps", "1/20", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    measured = {Fraction(r["measured"]) for r in rows if r["measured"]}
    assert measured == {Fraction(3, 10)}
    assert all(r["status"] == "pass" for r in rows)
    assert any(r["witnesses"] == "[[13, 0, 12]]" for r in rows)


def test_reproduce_thm_all_eps_zero(capsys):
    code, out, _ = run(capsys, "reproduce", "thm-all", "--eps", "0", "--samples", "5")
    rep = json.loads(out)
    assert code == 0
    assert all(v["measured"] == "1" for v in rep["verdicts"])


def test_reproduce_writes_out(tmp_path):
    out = tmp_path / "r.json"
    assert cli.main(["reproduce", "intro", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["passed"] is True


def test_failing_verdict_exits_one(capsys, monkeypatch):
    def fake(name, **_):
        res = experiments.ExperimentResult(name, {})
        res.verdicts.append(TheoremVerdict("x", "claim", Fraction(0), Fraction(1), False))
        return res

    monkeypatch.setattr(cli, "run_experiment", fake)
    code, out, _ = run(capsys, "reproduce", "intro")
    assert code == 1 and json.loads(out)["failures"] == 1


@pytest.mark.parametrize("argv", [
    ["reproduce", "thm-pgbad", "--eps", "1/7"],
    ["reproduce", "thm-ss", "--eps", "1/2"],
    ["reproduce", "prop-bad", "--eps", "1/10", "--delta", "1/2"],
    ["reproduce", "nope"],
    ["reproduce", "intro", "--delta", "abc"],
    ["analyze", "--game", "/nonexistent.json"],
    ["bogus"],
])
def test_usage_errors_exit_two(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_player_range_checked(capsys, intro_file):
    code, _, err = run(capsys, "analyze", "--game", str(intro_file), "--hidden", "4")
    assert code == 2 and "--hidden" in err
    code, _, _ = run(capsys, "analyze", "--game", str(intro_file), "--evaluator", "max",
                     "--observer", "2", "--hidden", "2")
    assert code == 2


def test_bad_beta_schedule(capsys, intro_file):
    code, _, _ = run(capsys, "analyze", "--game", str(intro_file), "--beta-schedule", "10,1")
    assert code == 2


def test_custom_evaluator_from_file(capsys, tmp_path):
    data = {"players": 3, "actions": [1, 2, 1],
            "utilities": [["0", "1"], ["0", "1"], ["0", "1"]], "welfare": ["0", "1"],
            "evaluator": {"name": "lean", "bounded": True, "table": [[["0", "1"], "1/4"]]}}
    path = tmp_path / "g.json"
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "analyze", "--game", str(path), "--concept", "pne")
    assert code == 0 and json.loads(out)["reduction"]["evaluator"] == "lean"


def test_parallel_workers_match_serial(monkeypatch):
    serial = experiments.run_experiment("prop-ii", samples=6)
    monkeypatch.setenv("PROXYGAMES_THREADS", "2")
    parallel = experiments.run_experiment("prop-ii", samples=6)
    key = lambda r: [(v.details["seed"], v.passed, v.measured) for v in r.verdicts]
    assert key(serial) == key(parallel)
    monkeypatch.setenv("PROXYGAMES_THREADS", "many")
    with pytest.raises(experiments.ExperimentError):
        experiments.run_experiment("prop-ii", samples=2)
