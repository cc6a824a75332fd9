"""Target echoes and range bookkeeping.

An echo is a delayed, scaled copy of the full multi-cycle transmit stream,
so during the first ``delay`` seconds of every cycle the receiver still
hears the tail of the previous sweep.  That overlap is the blind-time
mechanism the dual-demodulator receiver exists to fix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedRangeError
from .waveform import (
    SampledSignal,
    SweepSchedule,
    _check_sample_rate,
    local_times_on_grid,
    sample_count,
    tx_phase,
)


@dataclass(frozen=True)
class Echo:
    """One reflector: two-way delay in seconds and a dimensionless gain."""

    delay: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.delay) or self.delay < 0.0:
            raise DomainError(f"echo delay must be finite and >= 0, got {self.delay}")
        if not math.isfinite(self.amplitude):
            raise DomainError(f"echo amplitude must be finite, got {self.amplitude}")


@dataclass(frozen=True)
class Scene:
    """An ordered collection of echoes plus the propagation speed."""

    echoes: tuple[Echo, ...]
    sound_speed: float = 1500.0

    def __post_init__(self):
        object.__setattr__(self, "echoes", tuple(self.echoes))
        if self.sound_speed <= 0.0 or not math.isfinite(self.sound_speed):
            raise DomainError(f"sound_speed must be positive, got {self.sound_speed}")


def synthesize_received(
    schedule: SweepSchedule, scene: Scene, sample_rate: float
) -> SampledSignal:
    """Sample the received signal: the sum of delayed transmit copies.

    Each echo is evaluated in closed form at every sample instant (no
    resampling), so fractional-sample delays are exact.  Samples before an
    echo's first arrival are zero.
    """
    _check_sample_rate(sample_rate, schedule.tx)
    period = schedule.period
    for i, echo in enumerate(scene.echoes):
        if echo.delay >= period:
            raise UnsupportedRangeError(
                f"echo {i} delay {echo.delay} s must be below the sweep period "
                f"{period} s; longer delays leave no valid beat segment"
            )
    count = sample_count(schedule, sample_rate)
    index = np.arange(count, dtype=float)
    total = np.zeros(count)
    for echo in scene.echoes:
        src = index - echo.delay * sample_rate
        arrived = src >= 0.0
        local = local_times_on_grid(
            src[arrived], sample_rate, period, schedule.cycles
        )
        total[arrived] += echo.amplitude * np.cos(tx_phase(schedule.tx, local))
    return SampledSignal(sample_rate, total)


def beat_frequency(sweep_slope: float, delay: float) -> float:
    """Difference frequency slope * delay produced by a settled echo."""
    if delay < 0.0:
        raise DomainError(f"delay must be >= 0, got {delay}")
    return sweep_slope * delay


def delay_to_range(delay: float, sound_speed: float = 1500.0) -> float:
    """Two-way travel: range = sound_speed * delay / 2."""
    if delay < 0.0:
        raise DomainError(f"delay must be >= 0, got {delay}")
    if sound_speed <= 0.0:
        raise DomainError(f"sound_speed must be positive, got {sound_speed}")
    return sound_speed * delay / 2.0


def ctfm_resolution(bandwidth: float, sound_speed: float = 1500.0) -> float:
    """Baseline range resolution sound_speed / (2 * bandwidth)."""
    if bandwidth <= 0.0:
        raise DomainError(f"bandwidth must be positive, got {bandwidth}")
    if sound_speed <= 0.0:
        raise DomainError(f"sound_speed must be positive, got {sound_speed}")
    return sound_speed / (2.0 * bandwidth)
