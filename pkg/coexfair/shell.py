from __future__ import annotations

from functools import wraps
import json
import shlex
from typing import Any

from prompt_toolkit import PromptSession
from prompt_toolkit.completion import NestedCompleter

from coexfair.autocomplete import get_autocomplete, style
from coexfair.cli import EXIT_OK, run
from coexfair.errors import ConfigError
from coexfair.reader import ScenarioReader
from coexfair.sweeps import FIGURES, SWEEP_AXES


BATCH_COMMANDS = ("solve", "throughput", "fairness", "simulate", "sweep", "reproduce-figure")


class BaseShellException(Exception):
    """This is a generic shell exception."""


class CommandNotSupported(BaseShellException):
    """This exception is to be raised when the shell encounters a non-supported command."""


class ShellSigStop(BaseShellException):
    """This exception is to be raised whenever we need to immediately stop the shell."""


def input_error(error_msg_base):
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except (CommandNotSupported, ConfigError, ValueError, KeyError) as e:
                return f"{error_msg_base}: {e}"

        return wrapper

    return decorator


class CoexfairShell:
    """Interactive prompt accepting the batch commands, with a current scenario file."""

    def __init__(self, config: str | None = None):
        self.config = config
        self.supported_commands = {
            "close": self.stop,
            "exit": self.stop,
            "load": self.load,
            "show": self.show,
            "help": self.help,
            **{command: self.batch for command in BATCH_COMMANDS},
        }

    def help(self, *args: str) -> str:
        """Outputs a help message for user."""
        search_command = args[0] if args else None

        if search_command:
            if search_command not in self.supported_commands:
                return "Command not supported. Type 'help' to get list of supported commands."
            if search_command in BATCH_COMMANDS:
                return f"Command '{search_command}' takes the same options as `coexfair {search_command}`."
            return f"Command '{search_command}' help: {self.supported_commands[search_command].__doc__.strip()}"

        command_output = "Supported commands: "
        for command in sorted(self.supported_commands):
            command_output += f"\n{command}"
        command_output += "\n\nType 'help <command>' to get help for specific command."

        return command_output

    def stop(self, message: str):
        """Stop the shell."""
        raise ShellSigStop(message)

    @input_error(error_msg_base="Command 'load' failed")
    def load(self, *args: str) -> str:
        """Make a scenario file the current one; it is validated immediately."""
        if len(args) != 1:
            raise ValueError(f"command expects one argument - scenario path. Received: {' '.join(args)}")

        with ScenarioReader(args[0]) as reader:
            scenario = reader.scenario
        self.config = args[0]
        return (
            f"Scenario {self.config} loaded: n_w={scenario.n_w}, n_l={scenario.n_l}, "
            f"class {scenario.laa.priority_class}."
        )

    @input_error(error_msg_base="Command 'show' failed")
    def show(self, *args: str) -> str:
        """Print the current scenario with every default resolved."""
        with ScenarioReader(self.config) as reader:
            return json.dumps(reader.scenario.to_dict(), indent=2)

    def batch(self, command: str, *args: str) -> str:
        argv = [command, *args]
        if self.config and "--config" not in args:
            argv += ["--config", self.config]

        status = run(argv)
        return "Done." if status == EXIT_OK else f"Command '{command}' exited with status {status}."

    @staticmethod
    def parse_input(user_input: str) -> tuple[str, list[Any]]:
        try:
            command, *args = shlex.split(user_input)
        except ValueError as e:
            raise CommandNotSupported(f"cannot parse input: {e}.")

        command = command.casefold()

        if command in ["close", "exit"]:
            args = [f"Command '{command}' received. Good bye!"]

        return command, args

    def execute_command(self, command: str, args: list[str]) -> str:
        if command not in self.supported_commands:
            raise CommandNotSupported(f"command '{command}' is not supported!")

        if command in BATCH_COMMANDS:
            return self.batch(command, *args)
        return self.supported_commands[command](*args)

    def main(self) -> None:
        completer = NestedCompleter.from_nested_dict(
            get_autocomplete(list(self.supported_commands), sorted(FIGURES), list(SWEEP_AXES))
        )
        session = PromptSession(completer=completer, style=style)

        while True:
            try:
                user_input = session.prompt("coexfair> ")
                if not user_input.strip():
                    continue

                command, args = self.parse_input(user_input)
                print(self.execute_command(command, args))

            except CommandNotSupported as e:
                print(f"{e} Type 'help' to get list of supported commands.")

            except (ShellSigStop, EOFError, KeyboardInterrupt) as e:
                print(e)
                break
