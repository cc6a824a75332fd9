"""Linear FM sweep synthesis with exact instantaneous-phase evaluation.

The transmitter repeats an up-chirp as a sawtooth: every cycle restarts at
the same initial phase.  A local oscillator extends each sweep past its end
frequency with the same slope and in phase continuity, covering the
worst-case blind interval at the start of the next cycle.

All phase values are unwrapped (reported as accumulated radians); wrapping
into (-pi, pi] is a separate, explicit operation in ``phase_analysis``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError, ShapeError

TWO_PI = 2.0 * math.pi

# Relative tolerance for the phase/slope continuity invariants of a schedule.
CONTINUITY_TOL = 1e-9


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class ChirpSpec:
    """One linear frequency sweep: f_start -> f_end over ``duration`` seconds."""

    f_start: float
    f_end: float
    duration: float
    phase0: float = 0.0

    def __post_init__(self):
        for name in ("f_start", "f_end", "duration", "phase0"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))
        if self.duration <= 0.0:
            raise DomainError(f"duration must be positive, got {self.duration}")
        if self.f_start < 0.0 or self.f_end < 0.0:
            raise DomainError("sweep frequencies must be nonnegative")


@dataclass(frozen=True)
class LocalOscSpec:
    """The oscillator sweep that continues the transmit chirp past its end."""

    f_start: float
    f_end: float
    duration: float
    phase0: float

    def __post_init__(self):
        for name in ("f_start", "f_end", "duration", "phase0"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))
        if self.duration <= 0.0:
            raise DomainError(f"duration must be positive, got {self.duration}")
        if self.f_start < 0.0 or self.f_end < 0.0:
            raise DomainError("sweep frequencies must be nonnegative")


def sweep_rate(spec: ChirpSpec | LocalOscSpec) -> float:
    """Frequency slope of a sweep in Hz/s: (f_end - f_start) / duration."""
    return (spec.f_end - spec.f_start) / spec.duration


def tx_phase(spec: ChirpSpec, t_local):
    """Unwrapped phase of the transmit sweep at local time ``t_local``.

    ``t_local`` is measured from the start of the sweep and must lie in
    [0, spec.duration].  Accepts a scalar or an ndarray.
    """
    return _sweep_phase(spec, t_local)


def lo_phase(spec: LocalOscSpec, t_local):
    """Unwrapped phase of the oscillator sweep at local time ``t_local``.

    ``t_local`` is measured from the start of the oscillator window (the
    transmit sweep's reset instant).
    """
    return _sweep_phase(spec, t_local)


def _sweep_phase(spec, t_local):
    t = np.asarray(t_local, dtype=float)
    if np.any(t < 0.0) or np.any(t > spec.duration):
        raise DomainError(
            f"local time must lie in [0, {spec.duration}], got {t_local!r}"
        )
    mu = sweep_rate(spec)
    phase = spec.phase0 + TWO_PI * (spec.f_start * t + 0.5 * mu * t * t)
    return float(phase) if np.isscalar(t_local) else phase


def instantaneous_frequency(spec: ChirpSpec | LocalOscSpec, t_local):
    """Instantaneous frequency f_start + rate * t of a sweep, in Hz."""
    t = np.asarray(t_local, dtype=float)
    if np.any(t < 0.0) or np.any(t > spec.duration):
        raise DomainError(
            f"local time must lie in [0, {spec.duration}], got {t_local!r}"
        )
    freq = spec.f_start + sweep_rate(spec) * t
    return float(freq) if np.isscalar(t_local) else freq


def phase_continuous_extension(
    tx: ChirpSpec, f_end: float, duration: float
) -> LocalOscSpec:
    """Derive the oscillator sweep that continues ``tx`` seamlessly.

    Start frequency and initial phase are never chosen by the caller: the
    sweep starts where the transmit chirp ends, at the transmit chirp's
    final (unwrapped) phase.
    """
    return LocalOscSpec(
        f_start=tx.f_end,
        f_end=f_end,
        duration=duration,
        phase0=tx_phase(tx, tx.duration),
    )


@dataclass(frozen=True)
class SweepSchedule:
    """A repeating transmit sweep paired with its oscillator extension."""

    tx: ChirpSpec
    lo: LocalOscSpec
    cycles: int

    def __post_init__(self):
        if not isinstance(self.cycles, int) or self.cycles < 1:
            raise DomainError(f"cycles must be a positive integer, got {self.cycles}")
        tx, lo = self.tx, self.lo
        if lo.duration > tx.duration:
            raise ConfigurationError(
                "oscillator window must not exceed the sweep period "
                f"({lo.duration} > {tx.duration})"
            )
        scale = max(1.0, abs(tx.f_end))
        if abs(lo.f_start - tx.f_end) > CONTINUITY_TOL * scale:
            raise ConfigurationError(
                f"oscillator must start at the transmit end frequency "
                f"({lo.f_start} != {tx.f_end})"
            )
        mu_tx, mu_lo = sweep_rate(tx), sweep_rate(lo)
        if abs(mu_lo - mu_tx) > CONTINUITY_TOL * max(1.0, abs(mu_tx)):
            raise ConfigurationError(
                f"oscillator slope {mu_lo} Hz/s must match transmit slope {mu_tx} Hz/s"
            )
        mismatch = _wrapped(lo.phase0 - tx_phase(tx, tx.duration))
        if abs(mismatch) > CONTINUITY_TOL:
            raise ConfigurationError(
                f"oscillator initial phase breaks continuity with the transmit "
                f"sweep by {mismatch} rad (mod 2*pi)"
            )

    @property
    def period(self) -> float:
        return self.tx.duration

    @property
    def total_duration(self) -> float:
        return self.cycles * self.tx.duration


def make_schedule(
    tx: ChirpSpec, lo_f_end: float, lo_duration: float, cycles: int
) -> SweepSchedule:
    """Build a schedule whose oscillator parameters are derived from ``tx``."""
    return SweepSchedule(
        tx=tx, lo=phase_continuous_extension(tx, lo_f_end, lo_duration), cycles=cycles
    )


def _wrapped(theta: float) -> float:
    w = math.fmod(theta, TWO_PI)
    if w > math.pi:
        w -= TWO_PI
    elif w <= -math.pi:
        w += TWO_PI
    return w


def cycle_split(t, period: float):
    """Map global time to (cycle index, local time): k = floor(t/period).

    Samples that land exactly on a cycle boundary belong to the starting
    cycle.  Accepts scalars or ndarrays; local times are clipped to
    [0, period] against floating-point fuzz at the boundaries.
    """
    t_arr = np.asarray(t, dtype=float)
    k = np.floor(t_arr / period)
    local = np.clip(t_arr - k * period, 0.0, period)
    if np.isscalar(t):
        return int(k), float(local)
    return k.astype(int), local


@dataclass(frozen=True, eq=False)
class SampledSignal:
    """A uniformly sampled real waveform.  Immutable after construction."""

    sample_rate: float
    samples: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        if self.sample_rate <= 0.0:
            raise DomainError(f"sample_rate must be positive, got {self.sample_rate}")
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ShapeError(
                f"samples must be a non-empty 1-d sequence, got shape {arr.shape}"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def times(self) -> np.ndarray:
        """Sample instants ``t0 + i / sample_rate``."""
        return self.t0 + np.arange(self.samples.size) / self.sample_rate


def time_slice(signal: SampledSignal, t_start: float, t_stop: float) -> SampledSignal:
    """Samples with t_start <= t < t_stop (relative to the signal's clock)."""
    if t_stop <= t_start:
        raise DomainError(f"empty slice [{t_start}, {t_stop})")
    i0 = max(0, math.ceil((t_start - signal.t0) * signal.sample_rate - 1e-9))
    i1 = min(len(signal), math.ceil((t_stop - signal.t0) * signal.sample_rate - 1e-9))
    if i1 <= i0:
        raise DomainError(f"slice [{t_start}, {t_stop}) contains no samples")
    return SampledSignal(
        sample_rate=signal.sample_rate,
        samples=signal.samples[i0:i1],
        t0=signal.t0 + i0 / signal.sample_rate,
    )


def _check_sample_rate(sample_rate: float, spec) -> None:
    f_max = max(spec.f_start, spec.f_end)
    if sample_rate < 4.0 * f_max:
        raise ConfigurationError(
            f"sample rate {sample_rate} Hz is below 4x the peak instantaneous "
            f"frequency ({f_max} Hz)"
        )


def sample_count(schedule: SweepSchedule, sample_rate: float) -> int:
    return int(round(schedule.total_duration * sample_rate))


def local_times_on_grid(
    index, sample_rate: float, period: float, cycles: int
) -> np.ndarray:
    """Per-cycle local time of (possibly fractional) sample indices.

    Working in index units keeps every cycle bit-identical whenever the
    period spans a whole number of samples, and makes whole-sample delays
    exact: period * sample_rate rounds to that integer when both are the
    decimal values they were specified as.
    """
    idx = np.asarray(index, dtype=float)
    per_cycle = period * sample_rate
    k = np.floor(idx / per_cycle)
    np.clip(k, 0, cycles - 1, out=k)
    local = np.clip((idx - k * per_cycle) / sample_rate, 0.0, period)
    return local


def _sample_grid(schedule: SweepSchedule, sample_rate: float) -> np.ndarray:
    count = sample_count(schedule, sample_rate)
    return local_times_on_grid(
        np.arange(count), sample_rate, schedule.period, schedule.cycles
    )


def synthesize_transmit(schedule: SweepSchedule, sample_rate: float) -> SampledSignal:
    """Sample the sawtooth-repeated transmit sweep.

    Within every cycle the waveform is cos(tx_phase at local time); the
    phase resets to ``phase0`` at each cycle start.
    """
    _check_sample_rate(sample_rate, schedule.tx)
    local = _sample_grid(schedule, sample_rate)
    return SampledSignal(sample_rate, np.cos(tx_phase(schedule.tx, local)))


def synthesize_lo(schedule: SweepSchedule, sample_rate: float) -> SampledSignal:
    """Sample the oscillator: active for ``lo.duration`` after each reset.

    Outside its window the output is exactly zero, so channel arithmetic can
    treat transmit and oscillator signals as equal-length streams.
    """
    _check_sample_rate(sample_rate, schedule.lo)
    local = _sample_grid(schedule, sample_rate)
    active = local < schedule.lo.duration
    samples = np.zeros_like(local)
    samples[active] = np.cos(lo_phase(schedule.lo, local[active]))
    return SampledSignal(sample_rate, samples)
