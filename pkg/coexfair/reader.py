from __future__ import annotations

import dataclasses
import json
import logging
from pathlib import Path
from typing import Any

from coexfair.datamodels import LaaParams, Scenario, SolverControls, WiFiParams
from coexfair.errors import ConfigError


logger = logging.getLogger(__name__)

SECTIONS = ("scenario", "wifi", "laa", "solver")
SCENARIO_KEYS = ("n_w", "n_l", "baseline_n")
WIFI_PRESETS = {"basic": WiFiParams.basic_access, "vht": WiFiParams.vht}
LAA_BUILDER_KEYS = ("priority_class", "direction", "raw_table_td", "pdcch_symbols")


def _field_names(cls: type) -> set[str]:
    return {f.name for f in dataclasses.fields(cls)}


def _check_keys(section: str, values: Any, allowed: set[str]) -> dict[str, Any]:
    if not isinstance(values, dict):
        raise ConfigError(f"section '{section}' should be an object, entered: {values!r}", key=section)

    for key in values:
        if key not in allowed:
            raise ConfigError(f"unknown key '{section}.{key}'", key=f"{section}.{key}")
    return dict(values)


def _build(section: str, builder, values: dict[str, Any], fields: set[str] = frozenset()):
    """Run a dataclass constructor, turning its validation errors into ConfigError for the offending key."""
    try:
        return builder(**values)
    except (TypeError, ValueError) as e:
        name = str(e).split(" ", 1)[0]
        key = f"{section}.{name}" if name in values or name in fields else section
        raise ConfigError(f"[{section}] {e}", key=key) from e


def _wifi(values: dict[str, Any]) -> WiFiParams:
    values = _check_keys("wifi", values, _field_names(WiFiParams) | {"preset"})
    preset = values.pop("preset", None)
    if preset is None:
        return _build("wifi", WiFiParams, values, _field_names(WiFiParams))
    if preset not in WIFI_PRESETS:
        raise ConfigError(f"wifi.preset should be one of {', '.join(WIFI_PRESETS)}, entered: {preset}", "wifi.preset")
    return _build("wifi", WIFI_PRESETS[preset], values, _field_names(WiFiParams))


def _laa(values: dict[str, Any], raw_table_td: bool) -> LaaParams:
    values = _check_keys("laa", values, _field_names(LaaParams) | set(LAA_BUILDER_KEYS))
    values["raw_table_td"] = bool(values.get("raw_table_td", False)) or raw_table_td
    return _build("laa", LaaParams.from_priority_class, values, _field_names(LaaParams) | set(LAA_BUILDER_KEYS))


def scenario_from_dict(data: Any, raw_table_td: bool = False, snap_txop_grid: bool = False) -> Scenario:
    """Resolve a parsed scenario document, applying defaults and presets.

    Raises:
        ConfigError: naming the first unknown or invalid key.
    """
    data = _check_keys("<root>", data, set(SECTIONS))
    scenario = _check_keys("scenario", data.get("scenario", {}), set(SCENARIO_KEYS))
    solver = _check_keys("solver", data.get("solver", {}), _field_names(SolverControls))
    if snap_txop_grid:
        solver["snap_txop_grid"] = True

    return _build(
        "scenario",
        Scenario,
        dict(
            scenario,
            wifi=_wifi(data.get("wifi", {})),
            laa=_laa(data.get("laa", {}), raw_table_td),
            solver=_build("solver", SolverControls, solver, _field_names(SolverControls)),
        ),
    )


def dump_scenario(scenario: Scenario, path: str | Path) -> None:
    """Write the fully resolved scenario; scenario_from_dict reads it back unchanged."""
    with open(path, "w") as json_out:
        logger.info("Saving resolved scenario to %s ...", path)
        json.dump(scenario.to_dict(), json_out, indent=2)


class ScenarioReader:
    """Context manager resolving a JSON scenario file; without a path the defaults are used."""

    scenario: None | Scenario = None

    def __init__(self, path: str | Path | None = None, raw_table_td: bool = False, snap_txop_grid: bool = False):
        self.path = Path(path) if path else None
        self.raw_table_td = raw_table_td
        self.snap_txop_grid = snap_txop_grid

    def __enter__(self) -> ScenarioReader:
        self.scenario = scenario_from_dict(self.load_document(), self.raw_table_td, self.snap_txop_grid)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        logger.debug("Done with scenario %s", self.path or "<defaults>")

    def load_document(self) -> dict[str, Any]:
        """Load the raw scenario document, an empty one when no path was given."""
        if self.path is None:
            logger.info("No scenario file given, using defaults ...")
            return {}

        try:
            logger.info("Loading scenario from %s ...", self.path)
            with open(self.path, "r") as json_in:
                return json.load(json_in)
        except FileNotFoundError as e:
            raise ConfigError(f"scenario file {self.path} doesn't exist", key="--config") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"scenario file {self.path} is not a valid JSON: {e}", key="--config") from e
