"""Unit conversion and physical constants.

Every engine in this package computes in SI base units: seconds, hertz,
tesla, kelvin.  Published spectroscopy values and config files use lab
units (gauss, kHz, ms, ...); those are converted exactly once, at the
boundary, by :func:`unit_convert`.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["UnitError", "unit_convert", "unit_dimension", "PhysicalConstants", "CONSTANTS"]


class UnitError(ValueError):
    """Unknown unit symbol or dimensionally incompatible conversion."""


# symbol -> (dimension, multiplicative factor to the SI base unit)
_UNITS: dict[str, tuple[str, float]] = {
    # time
    "s": ("time", 1.0),
    "ms": ("time", 1e-3),
    "us": ("time", 1e-6),
    "µs": ("time", 1e-6),
    "ns": ("time", 1e-9),
    "min": ("time", 60.0),
    # frequency
    "Hz": ("frequency", 1.0),
    "kHz": ("frequency", 1e3),
    "MHz": ("frequency", 1e6),
    "GHz": ("frequency", 1e9),
    # magnetic field
    "T": ("field", 1.0),
    "mT": ("field", 1e-3),
    "G": ("field", 1e-4),
    "kG": ("field", 1e-1),
    # temperature
    "K": ("temperature", 1.0),
    "mK": ("temperature", 1e-3),
    # dimensionless passthrough
    "": ("dimensionless", 1.0),
    "1": ("dimensionless", 1.0),
}


def unit_dimension(unit: str) -> str:
    """Return the dimension name ("time", "frequency", ...) of a unit symbol."""
    try:
        return _UNITS[unit][0]
    except KeyError:
        raise UnitError(f"unknown unit {unit!r}") from None


def unit_convert(value: float, from_unit: str, to_unit: str) -> float:
    """Convert ``value`` between two units of the same dimension.

    Conversions are exact linear rescalings (gauss -> tesla is 1e-4, and
    so on).  Raises :class:`UnitError` on unknown symbols or when the
    dimensions differ, e.g. kHz -> ms.
    """
    dim_from, f_from = _UNITS.get(from_unit, (None, 0.0))
    dim_to, f_to = _UNITS.get(to_unit, (None, 0.0))
    if dim_from is None:
        raise UnitError(f"unknown unit {from_unit!r}")
    if dim_to is None:
        raise UnitError(f"unknown unit {to_unit!r}")
    if dim_from != dim_to:
        raise UnitError(f"incompatible units: {from_unit!r} ({dim_from}) -> {to_unit!r} ({dim_to})")
    return value * (f_from / f_to)


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 constants used by the field/temperature dependence model.

    bohr_magneton is in J/T, boltzmann in J/K.  Instances are frozen; use
    the module-level :data:`CONSTANTS` unless a test needs to perturb them.
    """

    bohr_magneton: float = 9.2740100783e-24
    boltzmann: float = 1.380649e-23


CONSTANTS = PhysicalConstants()
