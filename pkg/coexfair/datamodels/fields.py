from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import Any


__all__ = ["Direction", "Field", "WiFiMode"]


class WiFiMode(str, Enum):
    BASIC = "basic"
    VHT = "vht"


class Direction(str, Enum):
    DL = "DL"
    UL = "UL"


class Field:
    """Namespace of validators shared by the parameter dataclasses.

    Every validator returns the (possibly normalised) value or raises ValueError
    naming the field and the entered value.
    """

    @staticmethod
    def validate_positive(name: str, value: Any) -> float:
        """Validate a strictly positive duration, rate or size."""
        try:
            number = float(value)
            if not number > 0:
                raise ValueError
        except (TypeError, ValueError) as e:
            raise ValueError(f"{name} should be a positive number, entered: {value}") from e

        return number

    @staticmethod
    def validate_non_negative(name: str, value: Any) -> float:
        """Validate a duration that may be zero."""
        try:
            number = float(value)
            if not number >= 0:
                raise ValueError
        except (TypeError, ValueError) as e:
            raise ValueError(f"{name} should be a non-negative number, entered: {value}") from e

        return number

    @staticmethod
    def validate_int(name: str, value: Any, low: int | None = None, high: int | None = None) -> int:
        """Validate an integer count, optionally bounded (inclusive)."""
        try:
            if isinstance(value, bool) or int(value) != value:
                raise ValueError
            number = int(value)
            if low is not None and number < low:
                raise ValueError
            if high is not None and number > high:
                raise ValueError
        except (TypeError, ValueError) as e:
            bounds = f" in [{low}, {'inf' if high is None else high}]"
            raise ValueError(f"{name} should be an integer{bounds}, entered: {value}") from e

        return number

    @staticmethod
    def validate_probability_weight(name: str, value: Any) -> float:
        """Validate a damping factor in (0, 1]."""
        try:
            number = float(value)
            if not 0 < number <= 1:
                raise ValueError
        except (TypeError, ValueError) as e:
            raise ValueError(f"{name} should be in (0, 1], entered: {value}") from e

        return number

    @staticmethod
    def validate_fraction(name: str, value: Any) -> Fraction:
        """Validate a rational fraction in (0, 1]."""
        try:
            fraction = Fraction(value).limit_denominator(1000)
            if not 0 < fraction <= 1:
                raise ValueError
        except (TypeError, ValueError, ZeroDivisionError) as e:
            raise ValueError(f"{name} should be a fraction in (0, 1], entered: {value}") from e

        return fraction

    @staticmethod
    def validate_enum(name: str, enum_cls: type[Enum], value: Any) -> Enum:
        """Validate an enum member by value, case-insensitively for strings."""
        if isinstance(value, enum_cls):
            return value

        for member in enum_cls:
            if str(member.value).casefold() == str(value).casefold():
                return member

        allowed = ", ".join(str(m.value) for m in enum_cls)
        raise ValueError(f"{name} should be one of {allowed}, entered: {value}")
