import json

import pytest

from coexfair import shell
from coexfair.autocomplete import get_autocomplete
from coexfair.shell import CoexfairShell, CommandNotSupported, ShellSigStop


def test_help_lists_commands():
    output = CoexfairShell().help()

    assert output.startswith("Supported commands: ")
    for command in ("load", "show", "solve", "reproduce-figure", "exit"):
        assert f"\n{command}" in output


def test_help_for_one_command():
    bot = CoexfairShell()

    assert "current scenario" in bot.help("show")
    assert "coexfair sweep" in bot.help("sweep")
    assert bot.help("plot").startswith("Command not supported")


def test_load_validates_the_file(write_config):
    bot = CoexfairShell()
    path = write_config({"scenario": {"n_w": 2, "n_l": 3}, "laa": {"priority_class": 4}})

    assert bot.load(str(path)) == f"Scenario {path} loaded: n_w=2, n_l=3, class 4."
    assert bot.config == str(path)


def test_load_reports_errors_and_keeps_the_current_file(write_config):
    good = write_config({})
    bad = write_config({"laa": {"txop": 1}}, name="bad.json")
    bot = CoexfairShell(config=str(good))

    assert bot.load(str(bad)).startswith("Command 'load' failed: unknown key 'laa.txop'")
    assert bot.load().startswith("Command 'load' failed: command expects one argument")
    assert bot.config == str(good)


def test_show_prints_resolved_scenario(write_config):
    bot = CoexfairShell(config=str(write_config({"laa": {"priority_class": 2}})))
    document = json.loads(bot.show())

    assert document["laa"]["t_d_us"] == 34.0
    assert document["scenario"]["baseline_n"] == 2


def test_batch_commands_get_the_current_config(monkeypatch):
    calls = []
    monkeypatch.setattr(shell, "run", lambda argv: calls.append(argv) or 0)
    bot = CoexfairShell(config="scenario.json")

    assert bot.execute_command("solve", ["--format", "json"]) == "Done."
    assert bot.execute_command("fairness", ["--config", "other.json"]) == "Done."
    assert calls == [
        ["solve", "--format", "json", "--config", "scenario.json"],
        ["fairness", "--config", "other.json"],
    ]


def test_batch_reports_exit_status(monkeypatch):
    monkeypatch.setattr(shell, "run", lambda argv: 2)
    assert CoexfairShell().batch("solve") == "Command 'solve' exited with status 2."


def test_parse_input():
    assert CoexfairShell.parse_input("SWEEP --axis 'n_pairs' 1 3 1") == ("sweep", ["--axis", "n_pairs", "1", "3", "1"])
    assert CoexfairShell.parse_input("exit") == ("exit", ["Command 'exit' received. Good bye!"])


def test_unbalanced_quote_is_reported_not_raised():
    with pytest.raises(CommandNotSupported, match="No closing quotation"):
        CoexfairShell.parse_input('load "scenario.json')


def test_prompt_loop_survives_a_typo(monkeypatch, capsys):
    lines = iter(['load "scenario.json', "exit"])

    class ScriptedSession:
        def __init__(self, **kwargs):
            pass

        def prompt(self, message):
            return next(lines)

    monkeypatch.setattr(shell, "PromptSession", ScriptedSession)
    CoexfairShell().main()

    output = capsys.readouterr().out
    assert "cannot parse input" in output
    assert "Good bye!" in output


def test_unsupported_command():
    with pytest.raises(CommandNotSupported):
        CoexfairShell().execute_command("plot", [])


def test_exit_stops_the_shell():
    bot = CoexfairShell()
    command, args = bot.parse_input("close")

    with pytest.raises(ShellSigStop):
        bot.execute_command(command, args)


def test_autocomplete_tree():
    tree = get_autocomplete(["solve", "fairness", "reproduce-figure", "help", "exit"], [6, 7], ["n_pairs"])

    assert tree["exit"] is None
    assert set(tree["fairness"]["--mode"]) == {"3gpp", "access", "proportional"}
    assert "6" in tree["reproduce-figure"]
    assert set(tree["help"]) == {"solve", "fairness", "reproduce-figure", "help", "exit"}
