from __future__ import annotations

from prompt_toolkit.styles import Style

from coexfair.datamodels import FairnessMode


def _flags(*names: str) -> dict[str, None]:
    return {name: None for name in names}


def get_autocomplete(
    supported_commands: list[str], figure_numbers: list[int], sweep_axes: list[str]
) -> dict[str, dict | None]:
    """Nested completion tree for the interactive shell."""
    common = _flags("--config", "--out", "--format", "--raw-table-td", "--snap-txop-grid", "--verbose")
    modes = {"--mode": _flags(*(mode.value for mode in FairnessMode))}

    commands_with_options = {
        "solve": common,
        "throughput": common,
        "fairness": {**common, **modes},
        "simulate": {
            **common,
            **_flags("--seed", "--horizon-slots", "--horizon-events", "--warmup-events", "--event-log"),
        },
        "sweep": {
            **common,
            **modes,
            "--axis": _flags(*sweep_axes),
            "--run": _flags("solve", "throughput", "fairness", "simulate"),
            "--workers": None,
        },
        "reproduce-figure": {**_flags(*map(str, figure_numbers)), **common, "--workers": None},
        "help": _flags(*supported_commands),
    }

    return {command: commands_with_options.get(command) for command in supported_commands}


style = Style.from_dict({
    'completion-menu.completion': 'bg:#008888 #ffffff',
    'completion-menu.completion.current': 'bg:#00aaaa #000000',
    'scrollbar.background': 'bg:#88aaaa',
    'scrollbar.button': 'bg:#222222',
})
