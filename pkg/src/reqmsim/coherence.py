"""Optical coherence: echo decays, spectral diffusion, hole broadening.

Implements the measurement models

  two-pulse echo       I(t12) = I0 * exp(-4*pi*Gamma_h*t12)
  homogeneous width    Gamma_h = 1/(pi*T2)
  effective width      Gamma_eff(t12, t23) = Gamma_0 + gamma_TLS*ln(t23/t0)
                          + (1/2)*Gamma_SD*(R_SD*t12 + 1 - exp(-R_SD*t23))
  three-pulse echo     I(t23) = I0 * I_pop(t23)^2 * exp(-4*pi*t12*Gamma_eff(t23))
  hole width           w(t) = 2*[Gamma_0 + (1/2)*Gamma_SD*(1 - exp(-R_SD*t))]
  field dependence     Gamma_SD(B,T) = Gamma_max(B) * sech(g*mu_B*B / (2*k_B*T))^2

Notes on conventions: the hole width model resolves the proportionality
to an equality through the factor-2 hole/homogeneous relation and carries
no TLS term; the TLS log term uses the natural log with t0 as reference
epoch (the base convention is absorbed into the fitted gamma_TLS); hole
widths are FWHM.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .model import FieldPoint, PopulationAmplitudes, SpectralDiffusionParams
from .units import CONSTANTS, PhysicalConstants

__all__ = [
    "EchoDecayCurve",
    "HomogeneousLinewidth",
    "linewidth_from_t2",
    "t2_from_linewidth",
    "two_pulse_intensity",
    "effective_linewidth",
    "population_contrast",
    "three_pulse_intensity",
    "hole_width",
    "sd_vs_field",
    "synthesize_2ppe",
    "synthesize_3ppe",
]


@dataclass(frozen=True)
class EchoDecayCurve:
    """Echo intensity versus one pulse delay.

    abscissa is "t12" (two-pulse) or "t23" (three-pulse, with the first
    delay frozen at fixed_t12).  Noisy synthetic curves may contain
    negative intensities, as a real detector would produce.
    """

    abscissa: str
    grid: np.ndarray
    intensities: np.ndarray
    fixed_t12: float | None = None
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.abscissa not in ("t12", "t23"):
            raise ValueError(f"abscissa must be 't12' or 't23', got {self.abscissa!r}")
        grid = np.asarray(self.grid, dtype=np.float64)
        inten = np.asarray(self.intensities, dtype=np.float64)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("grid must be a non-empty 1-D array")
        if grid.size != inten.size:
            raise ValueError("grid and intensities must have equal length")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise ValueError("grid must be strictly increasing")
        if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(inten))):
            raise ValueError("grid and intensities must be finite")
        if self.abscissa == "t23" and self.fixed_t12 is None:
            raise ValueError("t23 curves must carry fixed_t12")
        grid.flags.writeable = False
        inten.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "intensities", inten)
        object.__setattr__(self, "meta", dict(self.meta))


@dataclass(frozen=True)
class HomogeneousLinewidth:
    """Homogeneous linewidth Gamma_h [Hz], > 0."""

    gamma_h: float

    def __post_init__(self) -> None:
        if not self.gamma_h > 0:
            raise ValueError(f"gamma_h must be > 0, got {self.gamma_h}")

    @property
    def t2(self) -> float:
        return 1.0 / (math.pi * self.gamma_h)


def linewidth_from_t2(t2: float) -> HomogeneousLinewidth:
    """Gamma_h = 1/(pi*T2)."""
    if not t2 > 0:
        raise ValueError(f"t2 must be > 0, got {t2}")
    return HomogeneousLinewidth(gamma_h=1.0 / (math.pi * t2))


def t2_from_linewidth(gamma_h: float) -> float:
    """Inverse of linewidth_from_t2; round-trips to the identity."""
    if not gamma_h > 0:
        raise ValueError(f"gamma_h must be > 0, got {gamma_h}")
    return 1.0 / (math.pi * gamma_h)


def two_pulse_intensity(t12, gamma_h: float, i0: float = 1.0):
    """Two-pulse echo intensity I0*exp(-4*pi*Gamma_h*t12); t12 scalar or array."""
    t_arr = np.asarray(t12, dtype=np.float64)
    if np.any(t_arr < 0):
        raise ValueError("t12 must be >= 0")
    if i0 < 0:
        raise ValueError("i0 must be >= 0")
    out = i0 * np.exp(-4.0 * math.pi * gamma_h * t_arr)
    return float(out) if t_arr.ndim == 0 else out


def effective_linewidth(t12, t23, p: SpectralDiffusionParams):
    """Time-dependent effective homogeneous linewidth [Hz].

    Requires t23 >= p.t0 (log domain) and t12 >= 0.  Broadcasts over
    array arguments.
    """
    t12_arr = np.asarray(t12, dtype=np.float64)
    t23_arr = np.asarray(t23, dtype=np.float64)
    if np.any(t12_arr < 0):
        raise ValueError("t12 must be >= 0")
    if np.any(t23_arr < p.t0):
        raise ValueError(f"t23 must be >= t0 = {p.t0}")
    out = (
        p.gamma0
        + p.gamma_tls * np.log(t23_arr / p.t0)
        + 0.5 * p.gamma_sd * (p.r_sd * t12_arr + 1.0 - np.exp(-p.r_sd * t23_arr))
    )
    return float(out) if out.ndim == 0 else out


def population_contrast(t23, amps: PopulationAmplitudes, lifetimes: Sequence[float]):
    """Grating-contrast factor I_pop(t23) = C1 e^(-t/T1) + CB e^(-t/TB) + CZ e^(-t/TZ)."""
    t1, tb, tz = lifetimes
    for label, tau in (("T1", t1), ("TB", tb), ("TZ", tz)):
        if not tau > 0:
            raise ValueError(f"{label} must be > 0, got {tau}")
    t_arr = np.asarray(t23, dtype=np.float64)
    out = (
        amps.c1 * np.exp(-t_arr / t1)
        + amps.cb * np.exp(-t_arr / tb)
        + amps.cz * np.exp(-t_arr / tz)
    )
    return float(out) if out.ndim == 0 else out


def three_pulse_intensity(
    t12: float,
    t23,
    amps: PopulationAmplitudes,
    lifetimes: Sequence[float],
    p: SpectralDiffusionParams,
    i0: float = 1.0,
):
    """Three-pulse (stimulated) echo intensity at delay(s) t23.

    I = I0 * I_pop(t23)^2 * exp(-4*pi*t12*Gamma_eff(t12, t23)).
    """
    ipop = population_contrast(t23, amps, lifetimes)
    gamma = effective_linewidth(t12, t23, p)
    out = i0 * np.asarray(ipop) ** 2 * np.exp(-4.0 * math.pi * t12 * np.asarray(gamma))
    return float(out) if out.ndim == 0 else out


def hole_width(t, p: SpectralDiffusionParams):
    """Persistent-hole FWHM [Hz] at hole age t.

    w(t) = 2*Gamma_0 + Gamma_SD*(1 - exp(-R_SD*t)); no TLS term.
    """
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr < 0):
        raise ValueError("t must be >= 0")
    out = 2.0 * p.gamma0 + p.gamma_sd * (1.0 - np.exp(-p.r_sd * t_arr))
    return float(out) if out.ndim == 0 else out


def sd_vs_field(
    fp: FieldPoint,
    g: float,
    gamma_max: float,
    consts: PhysicalConstants = CONSTANTS,
) -> float:
    """Maximum diffusion broadening vs field and temperature.

    Gamma_max * sech(g*mu_B*B / (2*k_B*T))^2.  Even in B and
    non-increasing in |B|.
    """
    x = g * consts.bohr_magneton * fp.b_field / (2.0 * consts.boltzmann * fp.temperature)
    sech = 1.0 / math.cosh(x)
    return gamma_max * sech * sech


def synthesize_2ppe(
    gamma_h: float,
    grid,
    i0: float = 1.0,
    noise_sigma: float = 0.0,
    seed: int | None = None,
) -> EchoDecayCurve:
    """Synthesize a two-pulse echo decay over a t12 grid.

    Seeded Gaussian noise is added to the intensities; identical inputs
    reproduce the curve bit for bit.
    """
    grid_arr = np.asarray(grid, dtype=np.float64)
    if grid_arr.size > 1 and not np.all(np.diff(grid_arr) > 0):
        raise ValueError("grid must be strictly increasing")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    if noise_sigma > 0 and seed is None:
        raise ValueError("a seed is required when noise_sigma > 0")
    intens = two_pulse_intensity(grid_arr, gamma_h, i0)
    meta = {"noise_sigma": repr(float(noise_sigma)), "i0": repr(float(i0))}
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        intens = intens + rng.normal(0.0, noise_sigma, size=grid_arr.size)
        meta["seed"] = str(seed)
    return EchoDecayCurve(abscissa="t12", grid=grid_arr, intensities=intens, meta=meta)


def synthesize_3ppe(
    t12: float,
    amps: PopulationAmplitudes,
    lifetimes: Sequence[float],
    p: SpectralDiffusionParams,
    grid,
    i0: float = 1.0,
    noise_sigma: float = 0.0,
    seed: int | None = None,
) -> EchoDecayCurve:
    """Synthesize a three-pulse echo decay over a t23 grid (all >= p.t0)."""
    grid_arr = np.asarray(grid, dtype=np.float64)
    if grid_arr.size > 1 and not np.all(np.diff(grid_arr) > 0):
        raise ValueError("grid must be strictly increasing")
    if np.any(grid_arr < p.t0):
        raise ValueError(f"all t23 must be >= t0 = {p.t0}")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    if noise_sigma > 0 and seed is None:
        raise ValueError("a seed is required when noise_sigma > 0")
    intens = three_pulse_intensity(t12, grid_arr, amps, lifetimes, p, i0)
    meta = {
        "noise_sigma": repr(float(noise_sigma)),
        "i0": repr(float(i0)),
        "t12": repr(float(t12)),
    }
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        intens = intens + rng.normal(0.0, noise_sigma, size=grid_arr.size)
        meta["seed"] = str(seed)
    return EchoDecayCurve(
        abscissa="t23", grid=grid_arr, intensities=intens, fixed_t12=float(t12), meta=meta
    )
