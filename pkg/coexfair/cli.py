"""Batch command line: `coexfair solve|throughput|fairness|simulate|sweep|reproduce-figure|shell`."""
from __future__ import annotations

import argparse
from functools import wraps
import json
import logging
import sys
from typing import Callable, Sequence

from coexfair.datamodels import FairnessMode, Scenario, SimConfig
from coexfair.errors import NUMERICAL_ERRORS, ConfigError
from coexfair.reader import ScenarioReader
from coexfair.simulator import simulate
from coexfair.sweeps import COMMANDS, FIGURES, SWEEP_AXES, Task, evaluate, reproduce_figure, sweep
from coexfair.utils import write_table


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

DEFAULT_HORIZON_SLOTS = 1_000_000
DEFAULT_FIGURE_DIR = "figures"


class ArgumentParser(argparse.ArgumentParser):
    """Argument errors are configuration errors (exit 1), not argparse's exit 2."""

    def error(self, message: str):
        raise ConfigError(message, key="argv")


def exit_status(func: Callable[[argparse.Namespace], None]) -> Callable[[argparse.Namespace], int]:
    """Turn a command into an exit status, reporting failures on stderr.

    Numerical failures echo the resolved scenario so the failing run can be replayed.
    """
    @wraps(func)
    def wrapper(args: argparse.Namespace) -> int:
        try:
            func(args)
        except NUMERICAL_ERRORS as e:
            print(f"Command '{args.command}' failed: {type(e).__name__}: {e}", file=sys.stderr)
            scenario = getattr(args, "scenario", None)
            if scenario is not None:
                print(f"scenario: {json.dumps(scenario.to_dict())}", file=sys.stderr)
            return EXIT_NUMERICAL
        except (ConfigError, ValueError, KeyError) as e:
            key = getattr(e, "key", None)
            print(f"Command '{args.command}' failed{f' on {key}' if key else ''}: {e}", file=sys.stderr)
            return EXIT_CONFIG
        return EXIT_OK

    return wrapper


def _load_scenario(args: argparse.Namespace) -> Scenario:
    with ScenarioReader(args.config, raw_table_td=args.raw_table_td, snap_txop_grid=args.snap_txop_grid) as reader:
        args.scenario = reader.scenario
    return args.scenario


def _emit(args: argparse.Namespace, rows: list[dict], header: dict, sweep_variable: str | None = None) -> None:
    header = {"command": args.command, **header}
    if args.out:
        path = write_table(rows, args.out, header, sweep_variable=sweep_variable, fmt=args.format)
        logger.info("output written to %s", path)
    else:
        write_table(rows, sys.stdout, header, sweep_variable=sweep_variable, fmt=args.format)


def _task(args: argparse.Namespace, command: str, scenario: Scenario) -> Task:
    horizon_slots = getattr(args, "horizon_slots", None)
    horizon_events = getattr(args, "horizon_events", None)
    if horizon_slots is None and horizon_events is None:
        horizon_slots = DEFAULT_HORIZON_SLOTS

    return Task(
        command=command,
        scenario=scenario,
        mode=FairnessMode(getattr(args, "mode", FairnessMode.THREE_GPP)),
        seed=getattr(args, "seed", 0),
        horizon_slots=horizon_slots,
        horizon_events=horizon_events,
        warmup_events=getattr(args, "warmup_events", 100),
    )


@exit_status
def run_single(args: argparse.Namespace) -> None:
    """solve, throughput and fairness: one scenario, one row."""
    scenario = _load_scenario(args)
    header = {"scenario": scenario.to_dict()}
    if args.command == "fairness":
        header["mode"] = args.mode
    _emit(args, [evaluate(_task(args, args.command, scenario))], header)


@exit_status
def run_simulate(args: argparse.Namespace) -> None:
    scenario = _load_scenario(args)
    task = _task(args, "simulate", scenario)
    config = SimConfig(
        scenario=scenario,
        seed=task.seed,
        horizon_slots=task.horizon_slots,
        horizon_events=task.horizon_events,
        warmup_events=task.warmup_events,
        event_log=args.event_log,
    )

    header = {
        "scenario": scenario.to_dict(),
        "seed": config.seed,
        "horizon": config.horizon,
        "horizon_unit": "slots" if config.counts_slots else "events",
        "warmup_events": config.warmup_events,
    }
    _emit(args, [simulate(config).to_dict()], header)


@exit_status
def run_sweep(args: argparse.Namespace) -> None:
    scenario = _load_scenario(args)
    axis, start, stop, step = args.axis
    rows = sweep(
        _task(args, args.run, scenario), axis, float(start), float(stop), float(step),
        raw_table_td=args.raw_table_td, workers=args.workers,
    )
    header = {
        "scenario": scenario.to_dict(),
        "run": args.run,
        "axis": {"name": axis, "start": float(start), "stop": float(stop), "step": float(step)},
    }
    if args.run == "fairness":
        header["mode"] = args.mode
    _emit(args, rows, header, sweep_variable=axis)


@exit_status
def run_figure(args: argparse.Namespace) -> None:
    solver = _load_scenario(args).solver if args.config or args.snap_txop_grid else None
    paths = reproduce_figure(
        args.figure, args.out or DEFAULT_FIGURE_DIR, fmt=args.format, solver=solver, workers=args.workers
    )
    for path in paths:
        print(path)


@exit_status
def run_shell(args: argparse.Namespace) -> None:
    from coexfair.shell import CoexfairShell

    CoexfairShell(config=args.config).main()


def _common_options() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON scenario file; defaults apply when omitted")
    common.add_argument("--out", help="output file (directory for reproduce-figure); stdout when omitted")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--raw-table-td", action="store_true", help="keep the table defer period of classes 1-2")
    common.add_argument("--snap-txop-grid", action="store_true", help="restrict TXOP to multiples of D_LTE")
    common.add_argument("--workers", type=int, default=1, help="processes for sweep points")
    common.add_argument("--verbose", "-v", action="store_true")
    return common


def _simulation_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0)
    horizon = parser.add_mutually_exclusive_group()
    horizon.add_argument("--horizon-slots", type=int, help=f"contention slots (default {DEFAULT_HORIZON_SLOTS})")
    horizon.add_argument("--horizon-events", type=int, help="transmission events")
    parser.add_argument("--warmup-events", type=int, default=100)


def build_parser() -> ArgumentParser:
    common = _common_options()
    parser = ArgumentParser(prog="coexfair", description="Wi-Fi / LTE-LAA coexistence throughput and fairness")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)
    modes = [mode.value for mode in FairnessMode]

    for name, help_text in (
        ("solve", "solve the contention fixed point"),
        ("throughput", "evaluate both networks' throughput"),
    ):
        commands.add_parser(name, parents=[common], help=help_text).set_defaults(handler=run_single)

    fairness = commands.add_parser("fairness", parents=[common], help="tune one LAA parameter for a fairness criterion")
    fairness.add_argument("--mode", choices=modes, default=FairnessMode.THREE_GPP.value)
    fairness.set_defaults(handler=run_single)

    simulate = commands.add_parser("simulate", parents=[common], help="Monte Carlo simulation of the scenario")
    _simulation_options(simulate)
    simulate.add_argument("--event-log", help="line-delimited event log file")
    simulate.set_defaults(handler=run_simulate)

    sweep_parser = commands.add_parser("sweep", parents=[common], help="evaluate a command along one axis")
    sweep_parser.add_argument(
        "--axis", nargs=4, required=True, metavar=("NAME", "START", "STOP", "STEP"),
        help=f"NAME in {', '.join(SWEEP_AXES)}",
    )
    sweep_parser.add_argument("--run", choices=COMMANDS, default="throughput")
    sweep_parser.add_argument("--mode", choices=modes, default=FairnessMode.THREE_GPP.value)
    _simulation_options(sweep_parser)
    sweep_parser.set_defaults(handler=run_sweep)

    figure = commands.add_parser("reproduce-figure", parents=[common], help="write the curves of a result figure")
    figure.add_argument("figure", type=int, choices=sorted(FIGURES))
    figure.set_defaults(handler=run_figure)

    commands.add_parser("shell", parents=[common], help="interactive prompt").set_defaults(handler=run_shell)

    return parser


def run(argv: Sequence[str]) -> int:
    """Parse argv and run one command; returns the exit status."""
    try:
        args = build_parser().parse_args(list(argv))
    except ConfigError as e:
        print(f"Invalid command line: {e}", file=sys.stderr)
        return EXIT_CONFIG

    if args.verbose:
        logging.getLogger("coexfair").setLevel(logging.DEBUG)
    return args.handler(args)


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(format="%(asctime)s %(name)s %(levelname)s %(message)s", level=logging.WARNING)
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
