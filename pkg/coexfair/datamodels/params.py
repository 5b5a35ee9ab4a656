from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any

from .fields import Direction, Field, WiFiMode


__all__ = [
    "LaaParams",
    "OVERRIDE_TD_US",
    "PRIORITY_CLASS_TABLE",
    "Scenario",
    "SolverControls",
    "WiFiParams",
]


# (T_d us, W'_0, m', TXOP us) per (class, direction); DL classes 3/4 use the 8 ms TXOP, UL the 6 ms one.
PRIORITY_CLASS_TABLE: dict[tuple[int, Direction], tuple[float, int, int, float]] = {
    (1, Direction.DL): (25.0, 4, 1, 2000.0),
    (2, Direction.DL): (25.0, 8, 1, 3000.0),
    (3, Direction.DL): (43.0, 16, 2, 8000.0),
    (4, Direction.DL): (79.0, 16, 6, 8000.0),
    (1, Direction.UL): (34.0, 4, 1, 2000.0),
    (2, Direction.UL): (34.0, 8, 1, 3000.0),
    (3, Direction.UL): (43.0, 16, 2, 6000.0),
    (4, Direction.UL): (79.0, 16, 6, 6000.0),
}

# Classes 1 and 2 defer for the Wi-Fi DIFS unless the raw table values are requested.
OVERRIDE_TD_US = 34.0
OVERRIDE_CLASSES = (1, 2)
SUBFRAME_SYMBOLS = 14


def _plain(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {key: _plain(item) for key, item in value.items()}
    return value


@dataclass(frozen=True)
class WiFiParams:
    """DCF contention and timing parameters; defaults are the basic-access 9 / 24 Mbps set."""

    w0: int = 16
    m: int = 6
    difs_us: float = 34.0
    sifs_us: float = 16.0
    slot_us: float = 9.0
    phy_header_us: float = 20.0
    mac_header_bytes: int = 34
    ack_preamble_us: float = 20.0
    ack_bytes: int = 14
    payload_bytes: int = 2048
    rate_data_mbps: float = 9.0
    rate_basic_mbps: float = 24.0
    mode: WiFiMode = WiFiMode.BASIC
    n_mpdu: int = 1
    mpdu_bytes: int = 11416
    bar_bytes: int = 24
    ba_bytes: int = 32
    prop_delay_us: float = 0.1
    include_prop_delay: bool = False

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "w0", Field.validate_int("w0", self.w0, low=1))
        set_(self, "m", Field.validate_int("m", self.m, low=0))
        for name in ("difs_us", "sifs_us", "slot_us", "phy_header_us", "ack_preamble_us", "prop_delay_us",
                     "rate_data_mbps", "rate_basic_mbps"):
            set_(self, name, Field.validate_positive(name, getattr(self, name)))
        for name in ("mac_header_bytes", "ack_bytes", "payload_bytes", "mpdu_bytes", "bar_bytes", "ba_bytes"):
            set_(self, name, Field.validate_int(name, getattr(self, name), low=0))
        set_(self, "mode", Field.validate_enum("mode", WiFiMode, self.mode))
        set_(self, "include_prop_delay", bool(self.include_prop_delay))

        if self.mode is WiFiMode.VHT:
            set_(self, "n_mpdu", Field.validate_int("n_mpdu", self.n_mpdu, low=1, high=64))
            if self.payload_bytes != self.n_mpdu * self.mpdu_bytes:
                raise ValueError(
                    f"payload_bytes should equal n_mpdu x mpdu_bytes = {self.n_mpdu * self.mpdu_bytes} in VHT mode, "
                    f"entered: {self.payload_bytes}"
                )
        else:
            set_(self, "n_mpdu", Field.validate_int("n_mpdu", self.n_mpdu, low=1))

    @classmethod
    def basic_access(cls, rate_data_mbps: float = 9.0, rate_basic_mbps: float = 24.0, **overrides) -> WiFiParams:
        """Basic-access Wi-Fi: DATA + SIFS + ACK on success."""
        return cls(rate_data_mbps=rate_data_mbps, rate_basic_mbps=rate_basic_mbps, **overrides)

    @classmethod
    def vht(
        cls, n_mpdu: int = 2, rate_data_mbps: float = 78.0, rate_basic_mbps: float = 26.0, **overrides
    ) -> WiFiParams:
        """802.11ac A-MPDU Wi-Fi with BAR/BA exchange; the payload follows n_mpdu unless overridden."""
        mpdu_bytes = overrides.pop("mpdu_bytes", 11416)
        values = dict(
            mode=WiFiMode.VHT,
            n_mpdu=n_mpdu,
            mpdu_bytes=mpdu_bytes,
            payload_bytes=n_mpdu * mpdu_bytes,
            phy_header_us=40.0,
            mac_header_bytes=38,
            rate_data_mbps=rate_data_mbps,
            rate_basic_mbps=rate_basic_mbps,
        )
        values.update(overrides)
        return cls(**values)

    @property
    def payload_bits(self) -> int:
        return 8 * self.payload_bytes

    @property
    def max_window(self) -> int:
        return 2**self.m * self.w0

    def to_dict(self) -> dict[str, Any]:
        return _plain(dataclasses.asdict(self))


@dataclass(frozen=True)
class LaaParams:
    """LBT parameters of one access priority class."""

    priority_class: int = 3
    direction: Direction = Direction.DL
    t_d_us: float = 43.0
    w0_laa: int = 16
    m_laa: int = 2
    e_l: int = 1
    txop_us: float = 8000.0
    d_lte_us: float = 500.0
    rate_laa_mbps: float = 7.8
    data_fraction: Fraction = Fraction(13, 14)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "priority_class", Field.validate_int("priority_class", self.priority_class, low=1, high=4))
        set_(self, "direction", Field.validate_enum("direction", Direction, self.direction))
        set_(self, "t_d_us", Field.validate_positive("t_d_us", self.t_d_us))
        set_(self, "w0_laa", Field.validate_int("w0_laa", self.w0_laa, low=1))
        set_(self, "m_laa", Field.validate_int("m_laa", self.m_laa, low=0))
        set_(self, "e_l", Field.validate_int("e_l", self.e_l, low=1, high=8))
        set_(self, "txop_us", Field.validate_non_negative("txop_us", self.txop_us))
        set_(self, "d_lte_us", Field.validate_positive("d_lte_us", self.d_lte_us))
        set_(self, "rate_laa_mbps", Field.validate_positive("rate_laa_mbps", self.rate_laa_mbps))
        set_(self, "data_fraction", Field.validate_fraction("data_fraction", self.data_fraction))

    @classmethod
    def from_priority_class(
        cls,
        priority_class: int = 3,
        direction: Direction | str = Direction.DL,
        raw_table_td: bool = False,
        pdcch_symbols: int = 1,
        **overrides,
    ) -> LaaParams:
        """Build the LBT parameters of a priority class, then apply field overrides.

        Args:
            priority_class: Access priority class 1-4.
            direction: DL or UL.
            raw_table_td: Keep the listed 25 us defer period of classes 1-2 instead of the DIFS override.
            pdcch_symbols: Control symbols per 14-symbol subframe (1-3).

        Raises:
            ValueError: if the class, direction or symbol count is invalid.
        """
        priority_class = Field.validate_int("priority_class", priority_class, low=1, high=4)
        direction = Field.validate_enum("direction", Direction, direction)
        pdcch_symbols = Field.validate_int("pdcch_symbols", pdcch_symbols, low=1, high=3)

        t_d_us, w0_laa, m_laa, txop_us = PRIORITY_CLASS_TABLE[(priority_class, direction)]
        if not raw_table_td and priority_class in OVERRIDE_CLASSES:
            t_d_us = OVERRIDE_TD_US

        values = dict(
            priority_class=priority_class,
            direction=direction,
            t_d_us=t_d_us,
            w0_laa=w0_laa,
            m_laa=m_laa,
            txop_us=txop_us,
            data_fraction=Fraction(SUBFRAME_SYMBOLS - pdcch_symbols, SUBFRAME_SYMBOLS),
        )
        values.update(overrides)
        return cls(**values)

    @property
    def max_window(self) -> int:
        return 2**self.m_laa * self.w0_laa

    def to_dict(self) -> dict[str, Any]:
        return _plain(dataclasses.asdict(self))


@dataclass(frozen=True)
class SolverControls:
    """Numerical knobs of the fixed-point solver and the fairness searches."""

    damping: float = 0.5
    tol: float = 1e-10
    max_iter: int = 10_000
    grid_coarse_us: float = 50.0
    grid_fine_us: float = 1.0
    txop_max_us: float = 6000.0
    m_laa_search_cap: int = 64
    snap_txop_grid: bool = False
    plateau_tol: float = 1e-9

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "damping", Field.validate_probability_weight("damping", self.damping))
        set_(self, "tol", Field.validate_positive("tol", self.tol))
        set_(self, "max_iter", Field.validate_int("max_iter", self.max_iter, low=1))
        set_(self, "grid_coarse_us", Field.validate_positive("grid_coarse_us", self.grid_coarse_us))
        set_(self, "grid_fine_us", Field.validate_positive("grid_fine_us", self.grid_fine_us))
        set_(self, "txop_max_us", Field.validate_positive("txop_max_us", self.txop_max_us))
        set_(self, "m_laa_search_cap", Field.validate_int("m_laa_search_cap", self.m_laa_search_cap, low=0))
        set_(self, "snap_txop_grid", bool(self.snap_txop_grid))
        set_(self, "plateau_tol", Field.validate_non_negative("plateau_tol", self.plateau_tol))

        if self.grid_fine_us > self.grid_coarse_us:
            raise ValueError(
                f"grid_fine_us should not exceed grid_coarse_us ({self.grid_coarse_us}), entered: {self.grid_fine_us}"
            )

    def to_dict(self) -> dict[str, Any]:
        return _plain(dataclasses.asdict(self))


@dataclass(frozen=True)
class Scenario:
    """Node counts plus both parameter sets; baseline_n defaults to n_w + n_l."""

    n_w: int = 1
    n_l: int = 1
    wifi: WiFiParams = field(default_factory=WiFiParams)
    laa: LaaParams = field(default_factory=LaaParams)
    solver: SolverControls = field(default_factory=SolverControls)
    baseline_n: int | None = None

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "n_w", Field.validate_int("n_w", self.n_w, low=1))
        set_(self, "n_l", Field.validate_int("n_l", self.n_l, low=0))
        if self.baseline_n is None:
            set_(self, "baseline_n", self.n_w + self.n_l)
        set_(self, "baseline_n", Field.validate_int("baseline_n", self.baseline_n, low=1))

    @classmethod
    def pairs(cls, n: int, **kwargs) -> Scenario:
        """n Wi-Fi and n LAA stations against a Wi-Fi-only baseline of 2n."""
        return cls(n_w=n, n_l=n, baseline_n=2 * n, **kwargs)

    def with_txop(self, txop_us: float) -> Scenario:
        return dataclasses.replace(self, laa=dataclasses.replace(self.laa, txop_us=txop_us))

    def with_laa(self, **changes) -> Scenario:
        return dataclasses.replace(self, laa=dataclasses.replace(self.laa, **changes))

    def with_wifi(self, **changes) -> Scenario:
        return dataclasses.replace(self, wifi=dataclasses.replace(self.wifi, **changes))

    def without_laa(self) -> Scenario:
        """The same Wi-Fi network and baseline with the LAA network switched off."""
        return dataclasses.replace(self, n_l=0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": {"n_w": self.n_w, "n_l": self.n_l, "baseline_n": self.baseline_n},
            "wifi": self.wifi.to_dict(),
            "laa": self.laa.to_dict(),
            "solver": self.solver.to_dict(),
        }
