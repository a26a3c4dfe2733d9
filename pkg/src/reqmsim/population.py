"""Population dynamics of the excited -> bottleneck -> Zeeman -> ground cascade.

The level chain is modeled as linear rate equations

    dn_e/dt = -n_e/T1
    dn_b/dt = beta*n_e/T1 - n_b/TB
    dn_z/dt = (1-beta)*n_e/T1 + n_b/TB - n_z/TZ

with the ground level absorbing the remainder (closed system).  The chain
is solved in closed form; equal-rate degeneracies reduce to the t*exp(-t/tau)
limit forms.  Hole-area decay curves are plain exponential mixtures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import MaterialModel, TimeTrace, TraceKind

__all__ = [
    "CascadeState",
    "ExponentialMixture",
    "cascade_evolve",
    "hole_area",
    "zeeman_lifetime",
    "synthesize_shb_decay",
]

_SUM_TOL = 1e-9


@dataclass(frozen=True)
class CascadeState:
    """Fractional populations of the four-level chain; sums to 1."""

    n_excited: float
    n_bottleneck: float
    n_zeeman_upper: float
    n_ground: float

    def __post_init__(self) -> None:
        for label, v in self.as_dict().items():
            if v < -1e-12 or v > 1 + 1e-12:
                raise ValueError(f"{label} = {v} outside [0, 1]")
        total = self.n_excited + self.n_bottleneck + self.n_zeeman_upper + self.n_ground
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"populations must sum to 1 within {_SUM_TOL}, got {total}")

    def as_dict(self) -> dict[str, float]:
        return {
            "n_excited": self.n_excited,
            "n_bottleneck": self.n_bottleneck,
            "n_zeeman_upper": self.n_zeeman_upper,
            "n_ground": self.n_ground,
        }


def _conv1(x: float, y: float, t: float) -> float:
    """Convolution of exp(-x s) and exp(-y s) over [0, t].

    Equals (exp(-x t) - exp(-y t)) / (y - x); computed via expm1 so the
    near-degenerate case stays accurate, with the exact-tie limit t*exp(-x t).
    """
    d = y - x
    if d == 0.0:
        return t * math.exp(-x * t)
    return -math.exp(-x * t) * math.expm1(-d * t) / d


def _conv2(a: float, b: float, c: float, t: float) -> float:
    """Double convolution exp(-a s) * exp(-b s) * exp(-c s) over [0, t]."""
    if a == b:
        if a == c:
            return 0.5 * t * t * math.exp(-a * t)
        # lim b->a of (conv1(a,c) - conv1(b,c))/(b - a)
        d = c - a
        return t * math.exp(-a * t) / d + math.expm1(-d * t) * math.exp(-a * t) / (d * d)
    return (_conv1(a, c, t) - _conv1(b, c, t)) / (b - a)


def cascade_evolve(
    initial: CascadeState,
    t: float,
    t1: float,
    tb: float,
    tz: float,
    branching_to_bottleneck: float = 1.0,
) -> CascadeState:
    """Evolve the cascade for a time t and return the new state.

    Args:
        initial: populations at t = 0.
        t: evolution time [s], >= 0.
        t1: excited-state lifetime [s].
        tb: bottleneck-level lifetime [s].
        tz: upper-Zeeman-level lifetime [s].
        branching_to_bottleneck: fraction beta of excited decay routed
            through the bottleneck; the rest feeds the Zeeman level
            directly.  Defaults to 1 (dominant cascade path).
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    for label, tau in (("t1", t1), ("tb", tb), ("tz", tz)):
        if not tau > 0:
            raise ValueError(f"{label} must be > 0, got {tau}")
    beta = branching_to_bottleneck
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"branching_to_bottleneck must be in [0, 1], got {beta}")

    a, b, c = 1.0 / t1, 1.0 / tb, 1.0 / tz
    e0, b0, z0 = initial.n_excited, initial.n_bottleneck, initial.n_zeeman_upper

    n_e = e0 * math.exp(-a * t)
    n_b = b0 * math.exp(-b * t) + beta * a * e0 * _conv1(a, b, t)
    n_z = (
        z0 * math.exp(-c * t)
        + (1.0 - beta) * a * e0 * _conv1(a, c, t)
        + b * b0 * _conv1(b, c, t)
        + beta * a * b * e0 * _conv2(a, b, c, t)
    )
    total = e0 + b0 + z0 + initial.n_ground
    n_g = total - n_e - n_b - n_z
    return CascadeState(
        n_excited=max(n_e, 0.0),
        n_bottleneck=max(n_b, 0.0),
        n_zeeman_upper=max(n_z, 0.0),
        n_ground=max(n_g, 0.0),
    )


@dataclass(frozen=True)
class ExponentialMixture:
    """Sum of decaying exponentials plus a constant offset.

    components are (amplitude >= 0, lifetime > 0) pairs; lifetimes must be
    pairwise distinct (1e-9 relative) so the mixture is identifiable.
    """

    components: tuple[tuple[float, float], ...]
    offset: float = 0.0

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("mixture needs at least one component")
        comps = tuple((float(c[0]), float(c[1])) for c in self.components)
        for amp, tau in comps:
            if amp < 0:
                raise ValueError(f"amplitude must be >= 0, got {amp}")
            if not tau > 0:
                raise ValueError(f"lifetime must be > 0, got {tau}")
        taus = sorted(tau for _, tau in comps)
        for tau1, tau2 in zip(taus, taus[1:]):
            if abs(tau2 - tau1) <= 1e-9 * max(tau1, tau2):
                raise ValueError(f"lifetimes {tau1} and {tau2} are degenerate")
        object.__setattr__(self, "components", comps)

    @property
    def total_amplitude(self) -> float:
        return sum(amp for amp, _ in self.components)


def hole_area(t, mix: ExponentialMixture):
    """Spectral-hole area at waiting time(s) t: sum_i a_i exp(-t/tau_i) + offset.

    Accepts a scalar or array of non-negative times.
    """
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr < 0):
        raise ValueError("t must be >= 0")
    out = np.full(t_arr.shape, mix.offset, dtype=np.float64)
    for amp, tau in mix.components:
        out += amp * np.exp(-t_arr / tau)
    return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


def zeeman_lifetime(b: float, subgroup: str, model: MaterialModel) -> float:
    """Ground-state Zeeman lifetime at field b for one ion subgroup.

    Piecewise-linear interpolation in the material's lookup table, flat
    beyond the table ends.  subgroup is "short" or "long".
    """
    if not model.zeeman_table:
        raise ValueError("material has an empty zeeman_table")
    if subgroup == "short":
        col = 1
    elif subgroup == "long":
        col = 2
    else:
        raise ValueError(f"subgroup must be 'short' or 'long', got {subgroup!r}")
    fields = np.array([row[0] for row in model.zeeman_table])
    taus = np.array([row[col] for row in model.zeeman_table])
    return float(np.interp(b, fields, taus))


def synthesize_shb_decay(
    mix: ExponentialMixture,
    t_grid,
    noise_sigma: float = 0.0,
    seed: int | None = None,
) -> TimeTrace:
    """Synthesize a hole-area-vs-waiting-time trace with additive Gaussian noise.

    Identical (seed, inputs) give a bit-for-bit identical trace.  With
    noise_sigma = 0 the samples are the exact mixture values.
    """
    t_arr = np.asarray(t_grid, dtype=np.float64)
    if t_arr.size > 1 and not np.all(np.diff(t_arr) > 0):
        raise ValueError("t_grid must be sorted strictly ascending")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    if noise_sigma > 0 and seed is None:
        raise ValueError("a seed is required when noise_sigma > 0")
    samples = hole_area(t_arr, mix)
    meta = {"noise_sigma": repr(float(noise_sigma))}
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        samples = samples + rng.normal(0.0, noise_sigma, size=t_arr.size)
        meta["seed"] = str(seed)
    return TimeTrace(times=t_arr, samples=samples, kind=TraceKind.INTENSITY, meta=meta)
