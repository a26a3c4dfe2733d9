"""Atomic-frequency-comb storage: comb construction, propagation, readout.

The comb is a periodic absorption structure with tooth spacing ``delta``
and finesse F = delta/gamma (gamma = tooth FWHM).  Storage and recall are
modeled as single-pass linear filtering: the medium's complex response is

    H(nu) = exp(-d(nu)/2 + i*phi(nu))

with phi the causal (minimum-phase) phase obtained from the discrete
Hilbert transform of -d(nu)/2.  A periodic d(nu) makes the impulse
response a train of kernels at t = n/delta, so a pulse absorbed by the
comb is re-emitted as echoes at multiples of 1/delta.  The weak-pulse
regime is exactly linear; there is no saturation or pumping dynamics
here, and transmitted (non-absorbed) light stays in the output traces.

A discrete collective-excitation oracle is included: sampling atomic
detunings from the comb profile and summing exp(-i*2*pi*delta_j*t) with
the occupation weights reproduces the comb-dephasing factor of the
analytic efficiency formula, giving an independent cross-check of the
propagation route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .model import TimeTrace, TraceKind

__all__ = [
    "CombSpec",
    "CombProfile",
    "PulseSpec",
    "PulseTrainSpec",
    "DickeEnsemble",
    "EchoMetrics",
    "comb_tooth_centers",
    "build_comb",
    "analytic_efficiency",
    "transfer_function",
    "propagate",
    "first_echo_metrics",
    "sample_comb_ensemble",
    "dicke_echo_amplitude",
    "filter_cavity",
    "simulate_spectral_multimode",
]

_LN2 = math.log(2.0)


class AliasingError(ValueError):
    """Time step or window too coarse for the requested bandwidth."""


@dataclass(frozen=True)
class CombSpec:
    """Parameters of one comb: spacing, finesse, depths, band."""

    delta: float
    finesse: float
    d1: float
    d0: float = 0.0
    bandwidth: float = 0.0
    center_detuning: float = 0.0
    tooth_shape: str = "gaussian"

    def __post_init__(self) -> None:
        if not self.delta > 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if not self.finesse > 1:
            raise ValueError(f"finesse must be > 1, got {self.finesse}")
        if self.d1 < 0 or self.d0 < 0:
            raise ValueError("optical depths must be >= 0")
        if not self.bandwidth >= self.delta:
            raise ValueError("bandwidth must be >= delta")
        if self.tooth_shape not in ("gaussian", "square"):
            raise ValueError(f"unknown tooth_shape {self.tooth_shape!r}")

    @property
    def tooth_fwhm(self) -> float:
        return self.delta / self.finesse

    @property
    def storage_time(self) -> float:
        return 1.0 / self.delta


@dataclass(frozen=True)
class CombProfile:
    """Sampled optical depth vs frequency on a uniform grid.

    ``delta`` is carried when the profile is a single periodic comb; it is
    None for composites (multi-channel superpositions).
    """

    freqs: np.ndarray
    depth: np.ndarray
    delta: float | None = None
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        freqs = np.asarray(self.freqs, dtype=np.float64)
        depth = np.asarray(self.depth, dtype=np.float64)
        if freqs.ndim != 1 or freqs.size < 2:
            raise ValueError("freqs must be 1-D with at least 2 points")
        if freqs.size != depth.size:
            raise ValueError("freqs and depth must have equal length")
        steps = np.diff(freqs)
        if not np.all(steps > 0):
            raise ValueError("freqs must be strictly increasing")
        if not np.all(np.abs(steps - steps[0]) <= 1e-9 * steps[0]):
            raise ValueError("freqs must form a uniform grid")
        if np.any(depth < 0) or not np.all(np.isfinite(depth)):
            raise ValueError("depth must be finite and >= 0")
        freqs.flags.writeable = False
        depth.flags.writeable = False
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def df(self) -> float:
        return float(self.freqs[1] - self.freqs[0])

    def to_trace(self) -> TimeTrace:
        return TimeTrace(
            times=self.freqs, samples=self.depth, kind=TraceKind.OPTICAL_DEPTH, meta=self.meta
        )


def comb_tooth_centers(spec: CombSpec) -> np.ndarray:
    """Tooth center frequencies: multiples of delta inside the half-open band.

    The band [-B/2, B/2) around the comb center is half-open so a band
    that is an exact multiple of delta holds exactly B/delta teeth.
    """
    n_half = spec.bandwidth / (2.0 * spec.delta)
    eps = 1e-9
    k_min = -math.floor(n_half + eps)
    k_max = math.ceil(n_half - eps) - 1
    k = np.arange(k_min, k_max + 1)
    return spec.center_detuning + k * spec.delta


def build_comb(spec: CombSpec, df: float | None = None) -> CombProfile:
    """Sample the comb's optical-depth profile.

    d(nu) = d0 + d1 * sum_teeth shape((nu - nu_k)/gamma), gamma = delta/F.
    The grid extends one tooth spacing beyond the band on each side so the
    profile relaxes to the background before the edges.  The resolution
    must satisfy df <= gamma/10 (default gamma/20).
    """
    gamma = spec.tooth_fwhm
    if df is None:
        df = gamma / 20.0
    if df > gamma / 10.0:
        raise ValueError(f"grid resolution {df} too coarse; need <= tooth_fwhm/10 = {gamma / 10.0}")
    lo = spec.center_detuning - spec.bandwidth / 2.0 - spec.delta
    hi = spec.center_detuning + spec.bandwidth / 2.0 + spec.delta
    n = int(round((hi - lo) / df)) + 1
    freqs = lo + np.arange(n) * df
    depth = np.full(n, spec.d0, dtype=np.float64)
    for fk in comb_tooth_centers(spec):
        x = (freqs - fk) / gamma
        if spec.tooth_shape == "gaussian":
            depth += spec.d1 * np.exp(-4.0 * _LN2 * x * x)
        else:
            depth += spec.d1 * (np.abs(x) <= 0.5)
    return CombProfile(
        freqs=freqs,
        depth=depth,
        delta=spec.delta,
        meta={
            "delta": repr(spec.delta),
            "finesse": repr(spec.finesse),
            "d1": repr(spec.d1),
            "d0": repr(spec.d0),
            "tooth_shape": spec.tooth_shape,
        },
    )


def analytic_efficiency(spec: CombSpec) -> float:
    """Closed-form first-echo storage efficiency for Gaussian teeth.

    eta = dt^2 * exp(-dt) * exp(-7/F^2) * exp(-d0) with dt = d1/F.
    Valid in the weak-echo regime (single pass, no cavity).
    """
    d_tilde = spec.d1 / spec.finesse
    return (
        d_tilde * d_tilde
        * math.exp(-d_tilde)
        * math.exp(-7.0 / (spec.finesse * spec.finesse))
        * math.exp(-spec.d0)
    )


def _min_phase_response(log_mag: np.ndarray) -> np.ndarray:
    """Complex response exp(log_mag + i*phi) with causal impulse response.

    phi is the discrete Hilbert transform of log_mag, built by folding the
    cepstrum onto non-negative time indices (homomorphic minimum-phase
    construction).  |H| equals exp(log_mag) to rounding error.
    """
    n = log_mag.size
    cep = np.fft.ifft(log_mag)
    w = np.zeros(n)
    w[0] = 1.0
    if n % 2 == 0:
        w[1 : n // 2] = 2.0
        w[n // 2] = 1.0
    else:
        w[1 : (n + 1) // 2] = 2.0
    return np.exp(np.fft.fft(cep * w))


def transfer_function(profile: CombProfile, length_normalized: bool = True) -> np.ndarray:
    """Complex spectral response H(nu) on the profile's own grid.

    |H| = exp(-d/2) for a depth profile (length_normalized True); pass
    False when the stored array is already the amplitude exponent.  The
    phase is the causal minimum-phase companion of the magnitude, so the
    impulse response (inverse DFT over the grid's implied period) lives
    entirely at t >= 0.
    """
    scale = 0.5 if length_normalized else 1.0
    return _min_phase_response(-scale * profile.depth)


@dataclass(frozen=True)
class PulseSpec:
    """One input pulse: center time, duration (intensity FWHM), carrier, amplitude."""

    t_center: float
    duration: float
    carrier_detuning: float = 0.0
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise ValueError(f"duration must be > 0, got {self.duration}")


@dataclass(frozen=True)
class PulseTrainSpec:
    """Time-ordered pulse sequence with a common envelope shape."""

    pulses: tuple[PulseSpec, ...]
    envelope: str = "gaussian"

    def __post_init__(self) -> None:
        if not self.pulses:
            raise ValueError("train needs at least one pulse")
        if self.envelope not in ("gaussian", "square"):
            raise ValueError(f"unknown envelope {self.envelope!r}")
        centers = [p.t_center for p in self.pulses]
        if any(c2 <= c1 for c1, c2 in zip(centers, centers[1:])):
            raise ValueError("pulses must be strictly time-ordered")
        object.__setattr__(self, "pulses", tuple(self.pulses))

    @classmethod
    def regular(
        cls,
        count: int,
        duration: float,
        gap: float,
        start: float | None = None,
        carrier_detuning: float = 0.0,
        amplitude: float = 1.0,
        envelope: str = "gaussian",
    ) -> "PulseTrainSpec":
        """count pulses of given duration separated by ``gap`` of dead time."""
        if count < 1:
            raise ValueError("count must be >= 1")
        if start is None:
            start = 2.0 * duration
        period = duration + gap
        pulses = tuple(
            PulseSpec(start + k * period, duration, carrier_detuning, amplitude)
            for k in range(count)
        )
        return cls(pulses=pulses, envelope=envelope)

    @property
    def end_time(self) -> float:
        last = self.pulses[-1]
        return last.t_center + last.duration

    def shifted(self, df: float) -> "PulseTrainSpec":
        """Ideal serrodyne translation: every carrier moved by df, lossless."""
        return PulseTrainSpec(
            pulses=tuple(replace(p, carrier_detuning=p.carrier_detuning + df) for p in self.pulses),
            envelope=self.envelope,
        )


def synthesize_train(train: PulseTrainSpec, times: np.ndarray) -> np.ndarray:
    """Complex field envelope of the train on the given time grid."""
    e = np.zeros(times.size, dtype=np.complex128)
    for p in train.pulses:
        x = times - p.t_center
        if train.envelope == "gaussian":
            env = p.amplitude * np.exp(-2.0 * _LN2 * (x / p.duration) ** 2)
        else:
            env = p.amplitude * (np.abs(x) <= p.duration / 2.0)
        if p.carrier_detuning != 0.0:
            e += env * np.exp(2j * math.pi * p.carrier_detuning * times)
        else:
            e += env
    return e


def _check_sampling(profile: CombProfile, window: float, dt: float, train_end: float) -> None:
    if not dt > 0:
        raise ValueError("dt must be > 0")
    span = float(profile.freqs[-1] - profile.freqs[0])
    if dt > 1.0 / (4.0 * span):
        raise AliasingError(f"dt = {dt} too coarse for bandwidth {span}; need dt <= {1.0 / (4.0 * span)}")
    f_abs = max(abs(float(profile.freqs[0])), abs(float(profile.freqs[-1])))
    if f_abs > 0 and 0.5 / dt < f_abs:
        raise AliasingError(f"Nyquist band +-{0.5 / dt} does not cover the profile (|f| up to {f_abs})")
    if profile.delta is not None and window < train_end + 2.0 / profile.delta:
        raise AliasingError(
            f"window = {window} must cover the train end plus 2/delta = {train_end + 2.0 / profile.delta}"
        )


def _filter_through(e_in: np.ndarray, profile: CombProfile, dt: float) -> np.ndarray:
    """Apply the medium's minimum-phase response to a sampled field envelope."""
    nu = np.fft.fftfreq(e_in.size, dt)
    d_nu = np.interp(nu, profile.freqs, profile.depth)
    h = _min_phase_response(-0.5 * d_nu)
    return np.fft.ifft(h * np.fft.fft(e_in))


def _propagate_fields(
    train: PulseTrainSpec, profile: CombProfile, window: float, dt: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Shared core: (times, input field, output field)."""
    _check_sampling(profile, window, dt, train.end_time)
    n = int(round(window / dt))
    times = np.arange(n) * dt
    e_in = synthesize_train(train, times)
    e_out = _filter_through(e_in, profile, dt)
    return times, e_in, e_out


def propagate(
    train: PulseTrainSpec,
    profile: CombProfile,
    window: float,
    dt: float,
    return_field: bool = False,
) -> TimeTrace:
    """Send a pulse train through the comb and return the output trace.

    The output contains the transmitted (non-absorbed) train followed by
    echo replicas at multiples of 1/delta after each pulse.  By default
    the trace is the output intensity; return_field=True gives the complex
    envelope instead.
    """
    times, _, e_out = _propagate_fields(train, profile, window, dt)
    meta = {"dt": repr(dt)}
    if profile.delta is not None:
        meta["delta"] = repr(profile.delta)
    if return_field:
        return TimeTrace(times=times, samples=e_out, kind=TraceKind.FIELD_ENVELOPE, meta=meta)
    return TimeTrace(
        times=times,
        samples=np.abs(e_out) ** 2,
        kind=TraceKind.INTENSITY,
        meta=meta,
    )


@dataclass(frozen=True)
class EchoMetrics:
    """Per-pulse first-echo bookkeeping from a propagation run."""

    input_peak_times: np.ndarray
    echo_peak_times: np.ndarray
    efficiencies: np.ndarray

    @property
    def efficiency(self) -> float:
        return float(self.efficiencies[0])


def first_echo_metrics(
    train: PulseTrainSpec, profile: CombProfile, window: float, dt: float
) -> EchoMetrics:
    """Locate each pulse's first echo and measure its energy efficiency.

    Efficiency is echo pulse energy over input pulse energy (energies, not
    peak intensities).  Each pulse's windows are half a train period wide,
    capped at half the storage time, so neighboring replicas stay
    separated.
    """
    if profile.delta is None:
        raise ValueError("profile must carry a tooth spacing (single comb)")
    times, e_in, e_out = _propagate_fields(train, profile, window, dt)
    storage = 1.0 / profile.delta
    p_in = np.abs(e_in) ** 2
    p_out = np.abs(e_out) ** 2
    centers = [p.t_center for p in train.pulses]
    if len(centers) > 1:
        half = min(np.diff(centers).min() / 2.0, storage / 2.0)
    else:
        half = storage / 2.0

    in_peaks, echo_peaks, effs = [], [], []
    for tc in centers:
        m_in = (times >= tc - half) & (times < tc + half)
        m_echo = (times >= tc + storage - half) & (times < tc + storage + half)
        e_pulse = float(np.sum(p_in[m_in]) * dt)
        e_echo = float(np.sum(p_out[m_echo]) * dt)
        in_peaks.append(float(times[m_in][np.argmax(p_in[m_in])]))
        echo_peaks.append(float(times[m_echo][np.argmax(p_out[m_echo])]))
        effs.append(e_echo / e_pulse if e_pulse > 0 else 0.0)
    return EchoMetrics(
        input_peak_times=np.array(in_peaks),
        echo_peak_times=np.array(echo_peaks),
        efficiencies=np.array(effs),
    )


@dataclass(frozen=True)
class DickeEnsemble:
    """Discrete collective single-excitation state over N atoms.

    detunings in Hz; amplitudes normalized so sum |C_j|^2 = 1; positions
    are optional phase bookkeeping and unused by the forward-scattering
    amplitude.
    """

    detunings: np.ndarray
    amplitudes: np.ndarray
    positions: np.ndarray | None = None

    def __post_init__(self) -> None:
        det = np.asarray(self.detunings, dtype=np.float64)
        amp = np.asarray(self.amplitudes, dtype=np.complex128)
        if det.ndim != 1 or det.size < 1:
            raise ValueError("need at least one atom")
        if det.size != amp.size:
            raise ValueError("detunings and amplitudes must have equal length")
        norm = float(np.sum(np.abs(amp) ** 2))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"sum |C_j|^2 must be 1 within 1e-9, got {norm}")
        det.flags.writeable = False
        amp.flags.writeable = False
        object.__setattr__(self, "detunings", det)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def count(self) -> int:
        return int(self.detunings.size)


def sample_comb_ensemble(spec: CombSpec, n: int, seed: int) -> DickeEnsemble:
    """Monte-Carlo ensemble with detunings drawn from the comb's teeth.

    Tooth index uniform over the band; within-tooth detuning follows the
    tooth shape (Gaussian of FWHM delta/F, or uniform over the tooth width
    for square teeth).  Uniform occupation weights 1/N.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    centers = comb_tooth_centers(spec)
    idx = rng.integers(0, centers.size, size=n)
    gamma = spec.tooth_fwhm
    if spec.tooth_shape == "gaussian":
        eps = rng.normal(0.0, gamma / (2.0 * math.sqrt(2.0 * _LN2)), size=n)
    else:
        eps = rng.uniform(-gamma / 2.0, gamma / 2.0, size=n)
    det = centers[idx] + eps
    amp = np.full(n, 1.0 / math.sqrt(n), dtype=np.complex128)
    return DickeEnsemble(detunings=det, amplitudes=amp)


def dicke_echo_amplitude(ens: DickeEnsemble, t):
    """Forward-scattering collective emission amplitude A(t) = sum |C_j|^2 e^(-i 2 pi delta_j t).

    A(0) = 1 by normalization; for comb-distributed detunings |A| peaks at
    t = 1/delta.  t may be a scalar or an array (evaluated in chunks).
    """
    w = np.abs(ens.amplitudes) ** 2
    t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.empty(t_arr.size, dtype=np.complex128)
    chunk = max(1, int(4e6 // max(ens.count, 1)))
    for i in range(0, t_arr.size, chunk):
        block = t_arr[i : i + chunk]
        phases = np.exp(-2j * math.pi * np.outer(block, ens.detunings))
        out[i : i + chunk] = phases @ w
    return complex(out[0]) if np.isscalar(t) or np.asarray(t).ndim == 0 else out


def _apply_lorentzian(e: np.ndarray, dt: float, center: float, fwhm: float) -> np.ndarray:
    nu = np.fft.fftfreq(e.size, dt)
    resp = 1.0 / (1.0 + 2j * (nu - center) / fwhm)
    return np.fft.ifft(resp * np.fft.fft(e))


def filter_cavity(trace: TimeTrace, center: float, fwhm: float) -> TimeTrace:
    """Single-pole Lorentzian bandpass applied to a field-envelope trace.

    Unit transmission at the center, half power at center +- fwhm/2.
    """
    if not fwhm > 0:
        raise ValueError("fwhm must be > 0")
    if trace.kind is not TraceKind.FIELD_ENVELOPE:
        raise ValueError("filter_cavity operates on field-envelope traces")
    out = _apply_lorentzian(trace.samples, trace.dt, center, fwhm)
    meta = dict(trace.meta)
    meta.update({"filter_center": repr(center), "filter_fwhm": repr(fwhm)})
    return TimeTrace(times=trace.times, samples=out, kind=TraceKind.FIELD_ENVELOPE, meta=meta)


def simulate_spectral_multimode(
    channels: Sequence[tuple[CombSpec, PulseTrainSpec]],
    shift_spacing: float | None = None,
    *,
    window: float,
    dt: float,
    filter_fwhm: float = 1e6,
    df: float | None = None,
) -> list[TimeTrace]:
    """Simultaneous storage in several frequency channels with filtered readout.

    Each channel is a (comb, train) pair.  When shift_spacing is given,
    channel k's comb and carriers are retuned to k*shift_spacing (the
    serrodyne ladder); otherwise each comb's own center_detuning is used.
    All channels propagate through the composite absorption profile in a
    single pass; readout applies a Lorentzian filter cavity at each
    channel center and returns one intensity trace per channel.
    """
    if not channels:
        raise ValueError("need at least one channel")
    specs: list[CombSpec] = []
    trains: list[PulseTrainSpec] = []
    for k, (spec, train) in enumerate(channels):
        if shift_spacing is not None:
            new_center = k * shift_spacing
            train = train.shifted(new_center - spec.center_detuning)
            spec = replace(spec, center_detuning=new_center)
        else:
            train = train.shifted(spec.center_detuning)
        specs.append(spec)
        trains.append(train)

    bands = sorted(
        (s.center_detuning - s.bandwidth / 2.0 - s.delta, s.center_detuning + s.bandwidth / 2.0 + s.delta)
        for s in specs
    )
    for (lo1, hi1), (lo2, hi2) in zip(bands, bands[1:]):
        if hi1 > lo2:
            raise ValueError(f"channel bands overlap: [{lo1}, {hi1}] and [{lo2}, {hi2}]")

    profiles = [build_comb(s, df=df) for s in specs]
    if df is None:
        df = min(p.df for p in profiles)
    lo = min(float(p.freqs[0]) for p in profiles)
    hi = max(float(p.freqs[-1]) for p in profiles)
    n = int(round((hi - lo) / df)) + 1
    freqs = lo + np.arange(n) * df
    depth = np.zeros(n)
    for p in profiles:
        depth += np.interp(freqs, p.freqs, p.depth, left=0.0, right=0.0)
    composite = CombProfile(freqs=freqs, depth=depth, delta=None)

    train_end = max(t.end_time for t in trains)
    min_delta = min(s.delta for s in specs)
    if window < train_end + 2.0 / min_delta:
        raise AliasingError(
            f"window = {window} must cover the train end plus 2/min(delta) = {train_end + 2.0 / min_delta}"
        )
    _check_sampling(composite, window, dt, train_end)

    n = int(round(window / dt))
    times = np.arange(n) * dt
    e_in = np.zeros(n, dtype=np.complex128)
    for train in trains:
        e_in += synthesize_train(train, times)
    e_out = _filter_through(e_in, composite, dt)

    out: list[TimeTrace] = []
    for spec in specs:
        filtered = _apply_lorentzian(e_out, dt, spec.center_detuning, filter_fwhm)
        out.append(
            TimeTrace(
                times=times,
                samples=np.abs(filtered) ** 2,
                kind=TraceKind.INTENSITY,
                meta={
                    "channel_center": repr(spec.center_detuning),
                    "delta": repr(spec.delta),
                    "storage_time": repr(spec.storage_time),
                    "filter_fwhm": repr(filter_fwhm),
                },
            )
        )
    return out
