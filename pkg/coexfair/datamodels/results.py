from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Any


__all__ = ["ContentionSolution", "EventDurations", "FairnessMode", "FairnessResult", "ThroughputReport"]


class FairnessMode(str, Enum):
    THREE_GPP = "3gpp"
    ACCESS = "access"
    PROPORTIONAL = "proportional"


@dataclass(frozen=True)
class ContentionSolution:
    """Joint fixed point of the coexistence contention model."""

    tau_w: float
    tau_l: float
    p_cw: float
    p_cl: float
    p_cw1: float
    p_cw2: float
    p_i1: float
    p_i2: float
    c0: float
    p_a1: float
    p_a2: float
    delta_a: int
    big_m: int
    iterations: int
    residual: float

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class EventDurations:
    """Busy-period lengths in microseconds."""

    t_sw: float
    t_cw: float
    t_sl: float
    t_cl: float

    @property
    def t_cc(self) -> float:
        return max(self.t_cw, self.t_cl)


@dataclass(frozen=True)
class ThroughputReport:
    """Network and per-user throughputs (Mbps) with the probabilities and times behind them."""

    tput_w: float
    tput_l: float
    tput_wifi_only: float
    per_user_w: float
    per_user_l: float
    per_user_wifi_only: float
    p_trw: float
    p_trl: float
    p_sw: float
    p_sl: float
    t_e1: float
    t_e2: float
    t_e: float

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class FairnessResult:
    """Optimised LAA parameter for one fairness criterion and the report at that point."""

    mode: FairnessMode
    objective_at_opt: float
    boundary_hit: bool
    report: ThroughputReport
    optimized_txop: float | None = None
    optimized_m_laa: int | None = None
    grid_trace: tuple[tuple[float, float], ...] = field(default_factory=tuple)
    degenerate: bool = False
    laa_silenced: bool = False

    @property
    def optimized_value(self) -> float:
        return self.optimized_m_laa if self.mode is FairnessMode.ACCESS else self.optimized_txop

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode.value,
            "optimized_txop": self.optimized_txop,
            "optimized_m_laa": self.optimized_m_laa,
            "objective_at_opt": self.objective_at_opt,
            "boundary_hit": self.boundary_hit,
            "degenerate": self.degenerate,
            "laa_silenced": self.laa_silenced,
            **self.report.to_dict(),
        }
