from pathlib import Path

import pytest

import ctfm_lab as lab
from oracles import (
    CYCLES,
    F_END,
    F_START,
    LEDGER_DELAY,
    LO_DURATION,
    LO_F_END,
    PERIOD,
    SAMPLE_RATE,
    SPECTRUM_DELAY,
)

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture(scope="session")
def reference_schedule() -> lab.SweepSchedule:
    return lab.make_schedule(
        lab.ChirpSpec(F_START, F_END, PERIOD), LO_F_END, LO_DURATION, CYCLES
    )


@pytest.fixture(scope="session")
def reference_lowpass() -> lab.LowpassSpec:
    return lab.LowpassSpec(cutoff=50.0, tap_count=257, sample_rate=SAMPLE_RATE)


@pytest.fixture(scope="session")
def reference_tx(reference_schedule) -> lab.SampledSignal:
    return lab.synthesize_transmit(reference_schedule, SAMPLE_RATE)


@pytest.fixture(scope="session")
def reference_lo(reference_schedule) -> lab.SampledSignal:
    return lab.synthesize_lo(reference_schedule, SAMPLE_RATE)


def _received(schedule, delay):
    return lab.synthesize_received(
        schedule, lab.Scene(echoes=(lab.Echo(delay=delay),)), SAMPLE_RATE
    )


@pytest.fixture(scope="session")
def received_096(reference_schedule) -> lab.SampledSignal:
    return _received(reference_schedule, SPECTRUM_DELAY)


@pytest.fixture(scope="session")
def received_093(reference_schedule) -> lab.SampledSignal:
    return _received(reference_schedule, LEDGER_DELAY)


@pytest.fixture(scope="session")
def demod_096(
    reference_tx, reference_lo, received_096, reference_lowpass
) -> lab.DemodOutput:
    return lab.demodulate(reference_tx, reference_lo, received_096, reference_lowpass)


@pytest.fixture(scope="session")
def demod_093(
    reference_tx, reference_lo, received_093, reference_lowpass
) -> lab.DemodOutput:
    return lab.demodulate(reference_tx, reference_lo, received_093, reference_lowpass)


@pytest.fixture(scope="session")
def settled_sum_096(demod_096, reference_lowpass) -> lab.SampledSignal:
    """The dual-channel sum with the filter settling prefix removed."""
    start = reference_lowpass.group_delay + reference_lowpass.impulse_duration
    signal = demod_096.sum
    return lab.time_slice(signal, start, signal.duration)


@pytest.fixture(scope="session")
def spectrum_096(settled_sum_096) -> lab.Spectrum:
    return lab.dft_magnitude(settled_sum_096, 4)


@pytest.fixture(scope="session")
def paper_config_path() -> Path:
    return CONFIG_DIR / "paper.cfg"


@pytest.fixture(scope="session")
def paper_phase_config_path() -> Path:
    return CONFIG_DIR / "paper_phase.cfg"
