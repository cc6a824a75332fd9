"""DFT magnitude analysis: peak estimation, sidelobes, mainlobe width.

The transform uses a rectangular window on purpose: the sidelobe structure
created by periodic phase discontinuities is the object under study, and a
taper would suppress it.  Sub-bin peak readout comes from zero padding plus
a three-point parabolic fit on the log magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NoPeakError, ShapeError
from .waveform import SampledSignal

_LOG_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class Spectrum:
    """One-sided DFT magnitude on a uniform frequency grid."""

    bin_frequencies: np.ndarray
    magnitudes: np.ndarray
    record_duration: float
    zero_pad_factor: int

    def __post_init__(self):
        freqs = np.asarray(self.bin_frequencies, dtype=float)
        mags = np.asarray(self.magnitudes, dtype=float)
        if freqs.shape != mags.shape or freqs.ndim != 1:
            raise ShapeError(
                f"frequency grid {freqs.shape} and magnitudes {mags.shape} must be "
                "1-d and equal-length"
            )
        freqs = freqs.copy()
        mags = mags.copy()
        freqs.setflags(write=False)
        mags.setflags(write=False)
        object.__setattr__(self, "bin_frequencies", freqs)
        object.__setattr__(self, "magnitudes", mags)

    @property
    def bin_spacing(self) -> float:
        return float(self.bin_frequencies[1] - self.bin_frequencies[0])

    @property
    def native_bin(self) -> float:
        """Resolution of the un-padded record, 1 / record_duration."""
        return 1.0 / self.record_duration

    def to_csv(self) -> str:
        lines = ["freq_hz,magnitude"]
        for f, m in zip(self.bin_frequencies, self.magnitudes):
            lines.append(f"{f:.17g},{m:.17g}")
        return "\n".join(lines) + "\n"


class PeakEstimate(NamedTuple):
    frequency: float
    magnitude: float


class Sidelobe(NamedTuple):
    frequency: float
    ratio_db: float


@dataclass(frozen=True)
class SpectrumReport:
    """Peak readout plus the detected sidelobe population."""

    peak_frequency: float
    peak_magnitude: float
    sidelobes: tuple[Sidelobe, ...]
    mainlobe_width_3db: float


def dft_magnitude(signal: SampledSignal, zero_pad_factor: int = 4) -> Spectrum:
    """Rectangular-window DFT magnitude, zero padded, on [0, Nyquist]."""
    if len(signal) < 1:
        raise ShapeError("signal must contain at least one sample")
    if not isinstance(zero_pad_factor, int) or zero_pad_factor < 1:
        raise DomainError(
            f"zero_pad_factor must be a positive integer, got {zero_pad_factor}"
        )
    padded = zero_pad_factor * len(signal)
    mags = np.abs(np.fft.rfft(signal.samples, padded))
    freqs = np.fft.rfftfreq(padded, 1.0 / signal.sample_rate)
    return Spectrum(
        bin_frequencies=freqs,
        magnitudes=mags,
        record_duration=signal.duration,
        zero_pad_factor=zero_pad_factor,
    )


def _parabolic_vertex(db_left: float, db_mid: float, db_right: float) -> tuple[float, float]:
    """Vertex (bin offset, dB value) of the parabola through three points."""
    denom = db_left - 2.0 * db_mid + db_right
    if denom == 0.0:
        return 0.0, db_mid
    offset = 0.5 * (db_left - db_right) / denom
    value = db_mid - 0.25 * (db_left - db_right) * offset
    return offset, value


def _interpolate_bin(spec: Spectrum, index: int) -> PeakEstimate:
    mags = spec.magnitudes
    if index == 0 or index == len(mags) - 1:
        return PeakEstimate(float(spec.bin_frequencies[index]), float(mags[index]))
    neighborhood = mags[index - 1 : index + 2]
    # A genuine lobe sampled on the padded grid has neighbors within a few
    # dB of its crest; a neighbor tens of dB down means the bin sits next to
    # an interference null, where the log-domain parabola is meaningless.
    if np.min(neighborhood) < 10.0 ** (-30.0 / 20.0) * neighborhood[1]:
        return PeakEstimate(float(spec.bin_frequencies[index]), float(mags[index]))
    db = 20.0 * np.log10(np.maximum(neighborhood, _LOG_FLOOR))
    offset, value = _parabolic_vertex(db[0], db[1], db[2])
    freq = spec.bin_frequencies[index] + offset * spec.bin_spacing
    return PeakEstimate(float(freq), float(10.0 ** (value / 20.0)))


def find_peak(spec: Spectrum, band: tuple[float, float]) -> PeakEstimate:
    """Largest magnitude within ``band``, refined to sub-bin accuracy.

    On an exact tie between bins the lower frequency wins, which makes the
    readout deterministic; the parabolic fit then lands on the midpoint of
    a symmetric pair.
    """
    low, high = band
    if not low < high:
        raise DomainError(f"band must satisfy low < high, got {band}")
    freqs = spec.bin_frequencies
    if low < freqs[0] or high > freqs[-1]:
        raise DomainError(
            f"band {band} exceeds the frequency grid [{freqs[0]}, {freqs[-1]}]"
        )
    selected = np.nonzero((freqs >= low) & (freqs <= high))[0]
    if selected.size < 3:
        raise DomainError(f"band {band} covers only {selected.size} bins; need >= 3")
    sub = spec.magnitudes[selected]
    if not np.any(sub > 0.0):
        raise NoPeakError(f"no spectral energy inside band {band}")
    # np.argmax returns the first maximum: the lower-frequency bin on ties.
    return _interpolate_bin(spec, int(selected[int(np.argmax(sub))]))


def _mainlobe_extent(spec: Spectrum, peak_index: int) -> tuple[float, float, float]:
    """(-3 dB width, left edge, right edge) of the lobe around a bin."""
    mags = spec.magnitudes
    freqs = spec.bin_frequencies
    threshold = mags[peak_index] / math.sqrt(2.0)

    def crossing(step: int) -> float:
        i = peak_index
        while 0 < i + step < len(mags) - 1 and mags[i + step] > threshold:
            i += step
        j = i + step
        j = min(max(j, 0), len(mags) - 1)
        if mags[j] > threshold:  # ran off the grid while still above -3 dB
            return float(freqs[j])
        # Linear interpolation between the last bin above and first below.
        f_hi, f_lo = freqs[i], freqs[j]
        m_hi, m_lo = mags[i], mags[j]
        if m_hi == m_lo:
            return float(f_lo)
        frac = (m_hi - threshold) / (m_hi - m_lo)
        return float(f_hi + frac * (f_lo - f_hi))

    left = crossing(-1)
    right = crossing(+1)
    return right - left, left, right


def sidelobe_report(
    spec: Spectrum,
    peak: PeakEstimate,
    search_span: float,
    floor_db: float = -15.0,
) -> SpectrumReport:
    """Catalog local maxima near the peak that rise above ``floor_db``.

    The mainlobe itself is excluded, as is the guard region where the
    rectangular window's own leakage lobes can exceed the floor (their
    envelope is 1 / (pi * offset * record_duration) relative to the peak).
    """
    if search_span <= 0.0:
        raise DomainError(f"search_span must be positive, got {search_span}")
    freqs = spec.bin_frequencies
    mags = spec.magnitudes
    if peak.magnitude <= 0.0:
        raise NoPeakError("peak magnitude must be positive")
    peak_index = int(np.argmin(np.abs(freqs - peak.frequency)))
    width, lobe_left, lobe_right = _mainlobe_extent(spec, peak_index)

    floor_ratio = 10.0 ** (floor_db / 20.0)
    window_guard = 1.0 / (math.pi * floor_ratio * spec.record_duration)
    exclude_left = min(lobe_left, peak.frequency - window_guard)
    exclude_right = max(lobe_right, peak.frequency + window_guard)

    low = max(peak.frequency - search_span, float(freqs[0]))
    high = min(peak.frequency + search_span, float(freqs[-1]))
    sidelobes = []
    for i in range(1, len(freqs) - 1):
        f = freqs[i]
        if not low <= f <= high:
            continue
        if exclude_left <= f <= exclude_right:
            continue
        if not (mags[i] > mags[i - 1] and mags[i] >= mags[i + 1]):
            continue
        estimate = _interpolate_bin(spec, i)
        if estimate.magnitude <= 0.0:
            continue
        ratio_db = 20.0 * math.log10(estimate.magnitude / peak.magnitude)
        if ratio_db >= floor_db:
            sidelobes.append(Sidelobe(estimate.frequency, min(ratio_db, 0.0)))
    return SpectrumReport(
        peak_frequency=peak.frequency,
        peak_magnitude=peak.magnitude,
        sidelobes=tuple(sidelobes),
        mainlobe_width_3db=width,
    )
