"""Flat key = value experiment configuration.

Format: one ``key = value`` pair per line, ``#`` starts a comment, keys use
dots for grouping (``tx.f_start``, ``echoes.0.delay``).  The oscillator's
start frequency and initial phase are always derived from the transmit
sweep and cannot be set.  Every cross-field invariant is checked at load
time and reported with the offending key path.

Keys and defaults:

    tx.f_start               required, Hz
    tx.f_end                 required, Hz
    tx.duration              required, s
    tx.phase0                0.0 rad
    lo.f_end                 required, Hz
    lo.duration              required, s
    cycles                   required, positive integer
    echoes.N.delay           required for N = 0.. (contiguous), s
    echoes.N.amplitude       1.0
    sample_rate              4000.0 Hz
    lowpass.cutoff           50.0 Hz
    lowpass.taps             257
    spectrum.zero_pad_factor 4
    spectrum.band_low        10.0 Hz
    spectrum.band_high       50.0 Hz
    sound_speed              1500.0 m/s
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .demod import LowpassSpec, check_cutoff
from .errors import ConfigLoadError, CtfmLabError
from .scene import Echo, Scene
from .waveform import ChirpSpec, SweepSchedule, make_schedule

_REQUIRED = (
    "tx.f_start",
    "tx.f_end",
    "tx.duration",
    "lo.f_end",
    "lo.duration",
    "cycles",
)

_OPTIONAL_DEFAULTS = {
    "tx.phase0": 0.0,
    "sample_rate": 4000.0,
    "lowpass.cutoff": 50.0,
    "lowpass.taps": 257,
    "spectrum.zero_pad_factor": 4,
    "spectrum.band_low": 10.0,
    "spectrum.band_high": 50.0,
    "sound_speed": 1500.0,
}

_INT_KEYS = {"cycles", "lowpass.taps", "spectrum.zero_pad_factor"}

_DERIVED_KEYS = {
    "lo.f_start": "derived from tx.f_end; not configurable",
    "lo.phase0": "derived from the transmit sweep's end phase; not configurable",
}


@dataclass(frozen=True)
class SimConfig:
    """A fully validated experiment description."""

    tx: ChirpSpec
    lo_f_end: float
    lo_duration: float
    cycles: int
    echoes: tuple[Echo, ...]
    sample_rate: float
    lowpass: LowpassSpec
    zero_pad_factor: int
    band: tuple[float, float]
    sound_speed: float

    @property
    def schedule(self) -> SweepSchedule:
        return make_schedule(self.tx, self.lo_f_end, self.lo_duration, self.cycles)

    @property
    def scene(self) -> Scene:
        return Scene(echoes=self.echoes, sound_speed=self.sound_speed)


def _parse_number(key: str, raw: str) -> float | int:
    raw = raw.strip()
    try:
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError:
        kind = "an integer" if key in _INT_KEYS else "a number"
        raise ConfigLoadError(f"expected {kind}, got {raw!r}", field=key) from None


def parse_config(text: str) -> SimConfig:
    """Parse and fully validate a configuration document."""
    values: dict[str, float | int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigLoadError(
                f"line {lineno}: expected 'key = value', got {line.strip()!r}"
            )
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key in _DERIVED_KEYS:
            raise ConfigLoadError(_DERIVED_KEYS[key], field=key)
        if not _known_key(key):
            raise ConfigLoadError("unknown key", field=key)
        if key in values:
            raise ConfigLoadError(f"line {lineno}: duplicate key", field=key)
        values[key] = _parse_number(key, raw)

    for key in _REQUIRED:
        if key not in values:
            raise ConfigLoadError("missing required key", field=key)

    merged = dict(_OPTIONAL_DEFAULTS)
    merged.update(values)
    return _build(merged)


def _known_key(key: str) -> bool:
    if key in _REQUIRED or key in _OPTIONAL_DEFAULTS:
        return True
    parts = key.split(".")
    return (
        len(parts) == 3
        and parts[0] == "echoes"
        and parts[1].isdigit()
        and parts[2] in ("delay", "amplitude")
    )


def _collect_echoes(values: dict) -> tuple[Echo, ...]:
    indices = sorted(
        {int(k.split(".")[1]) for k in values if k.startswith("echoes.")}
    )
    if not indices:
        raise ConfigLoadError("at least one echo required", field="echoes")
    if indices != list(range(len(indices))):
        raise ConfigLoadError(
            f"echo indices must be contiguous from 0, got {indices}", field="echoes"
        )
    echoes = []
    for n in indices:
        delay_key = f"echoes.{n}.delay"
        if delay_key not in values:
            raise ConfigLoadError("missing required key", field=delay_key)
        amplitude = values.get(f"echoes.{n}.amplitude", 1.0)
        try:
            echoes.append(Echo(delay=values[delay_key], amplitude=amplitude))
        except CtfmLabError as exc:
            raise ConfigLoadError(str(exc), field=f"echoes.{n}") from exc
    return tuple(echoes)


def _build(values: dict) -> SimConfig:
    def domain(field: str, factory):
        try:
            return factory()
        except ConfigLoadError:
            raise
        except CtfmLabError as exc:
            raise ConfigLoadError(str(exc), field=field) from exc

    tx = domain(
        "tx",
        lambda: ChirpSpec(
            f_start=values["tx.f_start"],
            f_end=values["tx.f_end"],
            duration=values["tx.duration"],
            phase0=values["tx.phase0"],
        ),
    )
    echoes = _collect_echoes(values)
    for n, echo in enumerate(echoes):
        if echo.delay >= tx.duration:
            raise ConfigLoadError(
                f"echo delay must be < sweep duration ({tx.duration} s), "
                f"got {echo.delay} s",
                field=f"echoes.{n}.delay",
            )
    cycles = values["cycles"]
    if cycles < 2:
        raise ConfigLoadError("at least two sweep cycles are required", field="cycles")
    schedule = domain(
        "lo",
        lambda: make_schedule(tx, values["lo.f_end"], values["lo.duration"], cycles),
    )
    sample_rate = values["sample_rate"]
    if sample_rate < 4.0 * max(tx.f_start, tx.f_end, values["lo.f_end"]):
        raise ConfigLoadError(
            f"sample rate {sample_rate} Hz is below 4x the peak instantaneous "
            "frequency",
            field="sample_rate",
        )
    lowpass = domain(
        "lowpass",
        lambda: LowpassSpec(
            cutoff=values["lowpass.cutoff"],
            tap_count=values["lowpass.taps"],
            sample_rate=sample_rate,
        ),
    )
    domain("lowpass.cutoff", lambda: check_cutoff(schedule, lowpass))
    zero_pad_factor = values["spectrum.zero_pad_factor"]
    if zero_pad_factor < 1:
        raise ConfigLoadError(
            f"must be >= 1, got {zero_pad_factor}", field="spectrum.zero_pad_factor"
        )
    band = (values["spectrum.band_low"], values["spectrum.band_high"])
    if not 0.0 <= band[0] < band[1] <= sample_rate / 2.0:
        raise ConfigLoadError(
            f"band must satisfy 0 <= low < high <= Nyquist, got {band}",
            field="spectrum.band_low",
        )
    sound_speed = values["sound_speed"]
    if sound_speed <= 0.0:
        raise ConfigLoadError(
            f"must be positive, got {sound_speed}", field="sound_speed"
        )
    return SimConfig(
        tx=tx,
        lo_f_end=values["lo.f_end"],
        lo_duration=values["lo.duration"],
        cycles=cycles,
        echoes=echoes,
        sample_rate=sample_rate,
        lowpass=lowpass,
        zero_pad_factor=zero_pad_factor,
        band=band,
        sound_speed=sound_speed,
    )


def serialize_config(config: SimConfig) -> str:
    """Emit a document that parses back to an equivalent configuration."""
    lines = [
        f"tx.f_start = {config.tx.f_start!r}",
        f"tx.f_end = {config.tx.f_end!r}",
        f"tx.duration = {config.tx.duration!r}",
        f"tx.phase0 = {config.tx.phase0!r}",
        f"lo.f_end = {config.lo_f_end!r}",
        f"lo.duration = {config.lo_duration!r}",
        f"cycles = {config.cycles}",
    ]
    for n, echo in enumerate(config.echoes):
        lines.append(f"echoes.{n}.delay = {echo.delay!r}")
        lines.append(f"echoes.{n}.amplitude = {echo.amplitude!r}")
    lines += [
        f"sample_rate = {config.sample_rate!r}",
        f"lowpass.cutoff = {config.lowpass.cutoff!r}",
        f"lowpass.taps = {config.lowpass.tap_count}",
        f"spectrum.zero_pad_factor = {config.zero_pad_factor}",
        f"spectrum.band_low = {config.band[0]!r}",
        f"spectrum.band_high = {config.band[1]!r}",
        f"sound_speed = {config.sound_speed!r}",
    ]
    return "\n".join(lines) + "\n"


def load_config(path: str | Path) -> SimConfig:
    """Read and parse a configuration file."""
    return parse_config(Path(path).read_text())
