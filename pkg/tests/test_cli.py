# tests/test_cli.py
import json

import pytest
from click.testing import CliRunner

from coalmu.main import EXIT_OK, EXIT_SAT, EXIT_UNSAT, EXIT_USAGE, cli

COALITION_EXAMPLE = "[{1}] nu X.(p & <{1,2,3}> X) & [{2}] mu Y.(~p | [{2}] Y)"


@pytest.fixture
def runner():
    try:
        return CliRunner(mix_stderr=False)
    except TypeError:  # click >= 8.2 always keeps stderr separate
        return CliRunner()


def test_coalition_example_is_unsat(runner):
    result = runner.invoke(cli, ["sat", "--logic", "coalition:3", COALITION_EXAMPLE])
    assert result.exit_code == EXIT_UNSAT
    assert result.stdout.strip() == "UNSAT"


def test_contradiction_is_unsat(runner):
    result = runner.invoke(cli, ["sat", "--logic", "k", "p & ~p"])
    assert result.exit_code == EXIT_UNSAT


def test_emitted_model_passes_check(runner, tmp_path):
    model_path = str(tmp_path / "m.json")
    result = runner.invoke(cli, ["sat", "--logic", "k", "nu X. box X", "--emit-model", model_path])
    assert result.exit_code == EXIT_SAT
    assert result.stdout.strip() == "SAT"

    document = json.loads((tmp_path / "m.json").read_text())
    result = runner.invoke(cli, ["check", "--model", model_path, "nu X. box X"])
    assert result.exit_code == EXIT_OK
    assert document["root"] in result.stdout.split()

    result = runner.invoke(cli, ["check", "--model", model_path, "--via-game", "nu X. box X"])
    assert result.exit_code == EXIT_OK


def test_check_lists_states_in_model_order(runner, tmp_path):
    model = {
        "kind": "kripke",
        "states": ["b", "a"],
        "valuation": {"p": ["a", "b"]},
        "transitions": {"a": ["a"], "b": []},
    }
    path = tmp_path / "loop.json"
    path.write_text(json.dumps(model))
    result = runner.invoke(cli, ["check", "--model", str(path), "p"])
    assert result.stdout.split() == ["b", "a"]
    result = runner.invoke(cli, ["check", "--model", str(path), "--via-game", "nu X.(p & dia X)"])
    assert result.exit_code == EXIT_OK
    assert result.stdout.split() == ["a"]


def test_check_rejects_bad_models(runner, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"kind": "kripke", "states": ["a"], "transitions": {"a": ["z"]}}))
    assert runner.invoke(cli, ["check", "--model", str(path), "p"]).exit_code == EXIT_USAGE
    path.write_text(json.dumps({"kind": "kripke", "states": ["a"], "transitions": {}, "extra": 1}))
    assert runner.invoke(cli, ["check", "--model", str(path), "p"]).exit_code == EXIT_USAGE
    path.write_text(json.dumps({"kind": "kripke", "states": ["a"], "transitions": {}}))
    result = runner.invoke(cli, ["check", "--model", str(path), "--logic", "graded", "p"])
    assert result.exit_code == EXIT_USAGE


def test_emitted_tableau_is_accepted_and_tampering_rejected(runner, tmp_path):
    tableau_path = tmp_path / "t.json"
    result = runner.invoke(cli, ["sat", "mu X. dia X", "--emit-tableau", str(tableau_path)])
    assert result.exit_code == EXIT_UNSAT

    result = runner.invoke(cli, ["certify", "--tableau", str(tableau_path), "mu X. dia X"])
    assert result.exit_code == EXIT_OK
    assert result.stdout.strip() == "ACCEPTED"

    result = runner.invoke(cli, ["certify", "--tableau", str(tableau_path), "mu X. box X"])
    assert result.exit_code == EXIT_USAGE
    assert result.stdout.startswith("REJECTED: root label")

    document = json.loads(tableau_path.read_text())
    document["nodes"][1]["label"] = ["p"]
    tableau_path.write_text(json.dumps(document))
    result = runner.invoke(cli, ["certify", "--tableau", str(tableau_path), "mu X. dia X"])
    assert result.exit_code == EXIT_USAGE
    assert result.stdout.startswith("REJECTED")


def test_formula_from_file(runner, tmp_path):
    source = tmp_path / "formula.txt"
    source.write_text("p & ~p\n")
    result = runner.invoke(cli, ["sat", f"@{source}"])
    assert result.exit_code == EXIT_UNSAT


def test_dumps_and_stats(runner, tmp_path):
    arena_path = tmp_path / "arena.pg"
    automaton_path = tmp_path / "dta.txt"
    result = runner.invoke(
        cli,
        ["sat", "nu X.(p & dia X)", "--stats", "--dump-arena", str(arena_path),
         "--dump-automaton", str(automaton_path)],
    )
    assert result.exit_code == EXIT_SAT
    assert "positions:" in result.stderr
    assert arena_path.read_text().startswith("parity ")
    assert automaton_path.read_text().startswith("# ")


@pytest.mark.parametrize(
    "args",
    [
        ["sat", "p & & q"],
        ["sat", "mu X. (p | X)"],
        ["sat", "--logic", "linear", "p"],
        ["sat", "--max-positions", "0", "p"],
        ["sat", "@/nonexistent/formula.txt"],
    ],
)
def test_usage_errors_exit_one(runner, args):
    result = runner.invoke(cli, args)
    assert result.exit_code == EXIT_USAGE
    assert "Error" in result.stderr


def test_position_ceiling_is_an_internal_exit(runner):
    result = runner.invoke(cli, ["sat", "--max-positions", "2", "nu X.(p & dia X)"])
    assert result.exit_code == 2


def test_onestep_audit(runner):
    result = runner.invoke(cli, ["onestep-audit", "--logic", "k", "--samples", "20", "--seed", "3"])
    assert result.exit_code == EXIT_OK
    assert json.loads(result.stdout)["soundness_counterexamples"] == []


def test_unwritable_dump_path_is_a_usage_error(runner, tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    for option in ("--dump-arena", "--dump-automaton"):
        result = runner.invoke(cli, ["sat", "p & ~p", option, str(blocker / "out.txt")])
        assert result.exit_code == EXIT_USAGE
        assert result.stderr.startswith("Error:")
        assert "Traceback" not in result.stderr


def test_max_states_caps_the_model_game_check(runner, tmp_path):
    model_path = str(tmp_path / "m.json")
    result = runner.invoke(
        cli, ["sat", "nu X. box X", "--emit-model", model_path, "--max-states", "10", "--stats"]
    )
    assert result.exit_code == EXIT_SAT
    assert "model_game_checked: True" in result.stderr

    result = runner.invoke(
        cli, ["sat", "dia p & dia ~p", "--emit-model", model_path, "--max-states", "1", "--stats"]
    )
    assert result.exit_code == EXIT_SAT
    assert "model_game_checked: False" in result.stderr
    assert json.loads((tmp_path / "m.json").read_text())["root"]
