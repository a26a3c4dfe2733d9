"""Core domain types shared by all engines.

All quantities are SI (seconds, hertz, tesla, kelvin).  Types are frozen
dataclasses and safe to share across workers; arrays held by traces are
marked read-only after construction.

``MaterialModel`` is deliberately *not* self-validating: it is the
config-level object, and :func:`validate_material` reports every violated
rule instead of aborting on the first.  The narrow value types
(:class:`FieldPoint`, :class:`SpectralDiffusionParams`, ...) reject bad
values at construction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

__all__ = [
    "MaterialModel",
    "FieldPoint",
    "SpectralDiffusionParams",
    "PopulationAmplitudes",
    "TraceKind",
    "TimeTrace",
    "validate_material",
    "sample_grid",
]


@dataclass(frozen=True)
class MaterialModel:
    """Static physical parameters of the doped crystal.

    zeeman_table rows are (field [T], short-subgroup lifetime [s],
    long-subgroup lifetime [s]) sorted by field.  The two magnetically
    inequivalent ion subgroups enter only as the two lifetime columns plus
    ``subgroup_weights``; there is no per-site orientation model.
    """

    t1_excited: float
    t_bottleneck: float
    zeeman_table: tuple[tuple[float, float, float], ...]
    inhomogeneous_bandwidth: float
    g_factors: Mapping[str, float] = field(default_factory=dict)
    subgroup_weights: tuple[float, float] = (0.5, 0.5)
    name: str = ""


def validate_material(model: MaterialModel) -> list[str]:
    """Check every MaterialModel invariant; return one message per violation.

    Returns an empty list iff the model is well formed.  Never raises.
    """
    violations: list[str] = []
    if not model.t1_excited > 0:
        violations.append("t1_excited must be > 0")
    if not model.t_bottleneck > 0:
        violations.append("t_bottleneck must be > 0")
    if model.t1_excited > 0 and model.t_bottleneck > 0 and not model.t1_excited < model.t_bottleneck:
        violations.append("t1_excited must be < t_bottleneck")
    if not model.inhomogeneous_bandwidth > 0:
        violations.append("inhomogeneous_bandwidth must be > 0")
    fields = [row[0] for row in model.zeeman_table]
    if any(f2 <= f1 for f1, f2 in zip(fields, fields[1:])):
        violations.append("zeeman_table not strictly increasing in field")
    for i, row in enumerate(model.zeeman_table):
        if len(row) != 3:
            violations.append(f"zeeman_table row {i} must have 3 entries")
            continue
        if not (row[1] > 0 and row[2] > 0):
            violations.append(f"zeeman_table row {i} lifetimes must be > 0")
    if len(model.subgroup_weights) != 2:
        violations.append("subgroup_weights must have exactly 2 entries")
    else:
        w1, w2 = model.subgroup_weights
        if w1 < 0 or w2 < 0:
            violations.append("subgroup_weights must be non-negative")
        elif abs((w1 + w2) - 1.0) > 1e-12:
            violations.append("subgroup_weights must sum to 1 within 1e-12")
    for name, g in model.g_factors.items():
        if not math.isfinite(g):
            violations.append(f"g_factors[{name!r}] must be finite")
    return violations


@dataclass(frozen=True)
class FieldPoint:
    """An (applied magnetic field, sample temperature) operating point."""

    b_field: float
    temperature: float

    def __post_init__(self) -> None:
        if not self.b_field >= 0:
            raise ValueError(f"b_field must be >= 0, got {self.b_field}")
        if not self.temperature > 0:
            raise ValueError(f"temperature must be > 0, got {self.temperature}")


@dataclass(frozen=True)
class SpectralDiffusionParams:
    """Parameters of the time-dependent effective-linewidth model.

    gamma0: linewidth at the minimum measurement timescale t0 [Hz].
    gamma_tls: structural-fluctuator coupling, per natural-log unit of
        t23/t0 [Hz].  The log base is a convention absorbed into the
        fitted value; this package uses the natural log.
    gamma_sd: maximum (saturated) diffusion broadening [Hz].
    r_sd: characteristic broadening rate [Hz].
    t0: minimum measurement timescale [s].
    """

    gamma0: float
    gamma_tls: float
    gamma_sd: float
    r_sd: float
    t0: float

    def __post_init__(self) -> None:
        if not self.gamma0 > 0:
            raise ValueError(f"gamma0 must be > 0, got {self.gamma0}")
        if self.gamma_tls < 0:
            raise ValueError(f"gamma_tls must be >= 0, got {self.gamma_tls}")
        if self.gamma_sd < 0:
            raise ValueError(f"gamma_sd must be >= 0, got {self.gamma_sd}")
        if self.r_sd < 0:
            raise ValueError(f"r_sd must be >= 0, got {self.r_sd}")
        if not self.t0 > 0:
            raise ValueError(f"t0 must be > 0, got {self.t0}")


@dataclass(frozen=True)
class PopulationAmplitudes:
    """Weights of the excited / bottleneck / long-lived components of the
    stimulated-echo grating contrast."""

    c1: float
    cb: float
    cz: float

    def __post_init__(self) -> None:
        for label, c in (("c1", self.c1), ("cb", self.cb), ("cz", self.cz)):
            if c < 0:
                raise ValueError(f"{label} must be >= 0, got {c}")
        if self.c1 + self.cb + self.cz <= 0:
            raise ValueError("at least one amplitude must be > 0")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.c1, self.cb, self.cz)


class TraceKind(enum.Enum):
    """What a sampled trace represents, and therefore how it is stored."""

    INTENSITY = "intensity"
    FIELD_ENVELOPE = "field_envelope_real_imag"
    OPTICAL_DEPTH = "optical_depth_vs_frequency"


# kinds whose abscissa must be a uniform grid (they feed FFT machinery)
_UNIFORM_KINDS = {TraceKind.FIELD_ENVELOPE, TraceKind.OPTICAL_DEPTH}

# relative tolerance for declaring a grid uniform
_UNIFORM_RTOL = 1e-9


def _is_uniform(x: np.ndarray) -> bool:
    if x.size < 2:
        return True
    steps = np.diff(x)
    return bool(np.all(np.abs(steps - steps[0]) <= _UNIFORM_RTOL * abs(steps[0])))


@dataclass(frozen=True)
class TimeTrace:
    """A sampled real signal with an explicit abscissa.

    ``times`` is strictly increasing but not necessarily uniform: decay
    measurements are commonly taken on log-spaced grids.  Kinds that feed
    FFT-based processing (field envelopes, depth-vs-frequency profiles)
    must be uniform and are rejected otherwise.  For the OPTICAL_DEPTH
    kind the abscissa is frequency in Hz, not time.

    Samples are float64, except FIELD_ENVELOPE which holds complex128.
    Noisy synthetic intensity traces may contain negative samples, exactly
    as a photodetector would report; model curves (noiseless) are
    non-negative by construction.
    """

    times: np.ndarray
    samples: np.ndarray
    kind: TraceKind = TraceKind.INTENSITY
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        want = np.complex128 if self.kind is TraceKind.FIELD_ENVELOPE else np.float64
        samples = np.asarray(self.samples, dtype=want)
        if times.ndim != 1 or samples.ndim != 1:
            raise ValueError("times and samples must be 1-D")
        if times.size == 0:
            raise ValueError("trace must contain at least one sample")
        if times.size != samples.size:
            raise ValueError(f"length mismatch: {times.size} times vs {samples.size} samples")
        if not np.all(np.isfinite(times)):
            raise ValueError("times must be finite")
        if not np.all(np.isfinite(samples.view(np.float64))):
            raise ValueError("samples must be finite (no NaN/inf)")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        if self.kind in _UNIFORM_KINDS and not _is_uniform(times):
            raise ValueError(f"{self.kind.value} traces require a uniform grid")
        if self.kind is TraceKind.OPTICAL_DEPTH and np.any(samples < 0):
            raise ValueError("optical depth must be >= 0")
        times.flags.writeable = False
        samples.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def n(self) -> int:
        return int(self.times.size)

    @property
    def t_start(self) -> float:
        return float(self.times[0])

    @property
    def is_uniform(self) -> bool:
        return _is_uniform(self.times)

    @property
    def dt(self) -> float:
        """Grid step of a uniform trace; raises on non-uniform grids."""
        if self.times.size < 2:
            raise ValueError("dt undefined for a single-sample trace")
        if not self.is_uniform:
            raise ValueError("trace grid is not uniform")
        return float(self.times[1] - self.times[0])


def sample_grid(start: float, stop: float, points: int, spacing: str = "log") -> np.ndarray:
    """Build a strictly increasing sample grid.

    spacing "log" needs start > 0; "linear" allows start = 0.
    """
    if points < 1:
        raise ValueError("points must be >= 1")
    if not stop > start:
        raise ValueError("stop must exceed start")
    if spacing == "log":
        if not start > 0:
            raise ValueError("log spacing requires start > 0")
        return np.geomspace(start, stop, points)
    if spacing == "linear":
        return np.linspace(start, stop, points)
    raise ValueError(f"unknown spacing {spacing!r}")
