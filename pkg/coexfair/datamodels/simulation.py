from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any

from coexfair.errors import InvalidHorizon

from .params import Scenario


__all__ = ["EventKind", "MIN_HORIZON", "SimConfig", "SimStats"]

MIN_HORIZON = 10_000


class EventKind(IntEnum):
    IDLE = 0
    WIFI_SUCCESS = 1
    LAA_SUCCESS = 2
    WIFI_COLLISION = 3
    LAA_COLLISION = 4
    CROSS_COLLISION = 5

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class SimConfig:
    """One Monte Carlo run: exactly one of horizon_slots / horizon_events must be set."""

    scenario: Scenario
    seed: int = 0
    horizon_slots: int | None = None
    horizon_events: int | None = None
    warmup_events: int = 100
    event_log: str | None = None

    def __post_init__(self):
        if (self.horizon_slots is None) == (self.horizon_events is None):
            raise InvalidHorizon(
                "exactly one of horizon_slots and horizon_events should be given, "
                f"entered: slots={self.horizon_slots}, events={self.horizon_events}"
            )

        horizon = self.horizon
        if isinstance(horizon, bool) or int(horizon) != horizon or horizon < MIN_HORIZON:
            raise InvalidHorizon(f"horizon should be an integer >= {MIN_HORIZON}, entered: {horizon}")

        if not 0 <= int(self.seed) < 2**64:
            raise InvalidHorizon(f"seed should be an unsigned 64-bit integer, entered: {self.seed}")

        if int(self.warmup_events) < 0:
            raise InvalidHorizon(f"warmup_events should be non-negative, entered: {self.warmup_events}")

    @property
    def horizon(self) -> int:
        return self.horizon_slots if self.horizon_slots is not None else self.horizon_events

    @property
    def counts_slots(self) -> bool:
        return self.horizon_slots is not None


@dataclass(frozen=True)
class SimStats:
    """Empirical counterparts of the analytic access, collision and throughput figures."""

    tau_hat_w: float
    tau_hat_l: float
    p_cw_hat: float
    p_cl_hat: float
    tput_hat_w: float
    tput_hat_l: float
    events: dict[str, int]
    contention_slots: int
    laa_slots: int
    elapsed_model_time: float
    stderr: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        values = dataclasses.asdict(self)
        events = values.pop("events")
        stderr = values.pop("stderr")
        values.update({f"events_{key}": count for key, count in events.items()})
        values.update({f"stderr_{key}": error for key, error in stderr.items()})
        return values
