import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import ctfm_lab as lab
from oracles import frac, sweep_phase_pi

REL = 1e-9


def reference_chirp(phase0=0.0):
    return lab.ChirpSpec(100.0, 200.0, 0.3, phase0)


def reference_schedule(cycles=12):
    return lab.make_schedule(reference_chirp(), 240.0, 0.12, cycles)


class TestSweepRate:
    def test_reference_sweep(self):
        rate = lab.sweep_rate(reference_chirp())
        assert rate == pytest.approx(1000.0 / 3.0, rel=1e-12)
        assert round(rate, 1) == 333.3

    def test_constant_frequency(self):
        assert lab.sweep_rate(lab.ChirpSpec(100.0, 100.0, 1.0)) == 0.0

    def test_oscillator_extension_has_the_same_slope(self):
        rate = lab.sweep_rate(lab.LocalOscSpec(200.0, 240.0, 0.12, 0.0))
        assert rate == pytest.approx(1000.0 / 3.0, rel=1e-12)


class TestTxPhase:
    def test_zero_time(self):
        assert lab.tx_phase(reference_chirp(), 0.0) == 0.0

    def test_sweep_end_is_90_pi(self):
        phase = lab.tx_phase(reference_chirp(), 0.3)
        assert phase == pytest.approx(90.0 * math.pi, rel=REL)

    def test_midpoint_matches_exact_arithmetic(self):
        expected = sweep_phase_pi(100, 200, "0.3", "0.15")
        assert expected == frac("37.5")
        phase = lab.tx_phase(reference_chirp(), 0.15)
        assert phase == pytest.approx(float(expected) * math.pi, rel=1e-12)

    def test_initial_phase_offsets_the_whole_sweep(self):
        base = lab.tx_phase(reference_chirp(), 0.2)
        shifted = lab.tx_phase(reference_chirp(phase0=1.25), 0.2)
        assert shifted - base == pytest.approx(1.25, rel=1e-12)

    @pytest.mark.parametrize("t", [-0.01, 0.3000001, 1.0])
    def test_rejects_times_outside_the_sweep(self, t):
        with pytest.raises(lab.DomainError):
            lab.tx_phase(reference_chirp(), t)

    def test_vectorized_evaluation(self):
        t = np.linspace(0.0, 0.3, 7)
        phases = lab.tx_phase(reference_chirp(), t)
        assert phases.shape == t.shape
        assert phases[0] == 0.0
        assert phases[-1] == pytest.approx(90.0 * math.pi, rel=REL)


class TestLoPhase:
    def test_window_start_is_the_transmit_end_phase(self):
        schedule = reference_schedule()
        assert lab.lo_phase(schedule.lo, 0.0) == pytest.approx(
            90.0 * math.pi, rel=REL
        )

    def test_93ms_into_the_window(self):
        expected = sweep_phase_pi(200, 240, "0.12", "0.093", phase0_pi=90)
        assert expected == frac("130.083")
        schedule = reference_schedule()
        assert lab.lo_phase(schedule.lo, 0.093) == pytest.approx(
            float(expected) * math.pi, rel=REL
        )

    @given(t=st.floats(min_value=0.0, max_value=0.3))
    @settings(max_examples=50, deadline=None)
    def test_identical_parameterization_matches_tx_phase(self, t):
        chirp = reference_chirp()
        osc = lab.LocalOscSpec(100.0, 200.0, 0.3, 0.0)
        assert lab.lo_phase(osc, t) == lab.tx_phase(chirp, t)


class TestScheduleInvariants:
    def test_derived_schedule_is_valid(self):
        schedule = reference_schedule()
        assert schedule.lo.f_start == 200.0
        assert schedule.lo.phase0 == pytest.approx(90.0 * math.pi, rel=REL)
        assert schedule.period == 0.3
        assert schedule.total_duration == pytest.approx(3.6)

    def test_rejects_oscillator_start_frequency_mismatch(self):
        lo = lab.LocalOscSpec(205.0, 245.0, 0.12, lab.tx_phase(reference_chirp(), 0.3))
        with pytest.raises(lab.ConfigurationError, match="end frequency"):
            lab.SweepSchedule(reference_chirp(), lo, 2)

    def test_rejects_slope_mismatch(self):
        lo = lab.LocalOscSpec(200.0, 250.0, 0.12, lab.tx_phase(reference_chirp(), 0.3))
        with pytest.raises(lab.ConfigurationError, match="slope"):
            lab.SweepSchedule(reference_chirp(), lo, 2)

    def test_rejects_phase_discontinuity(self):
        lo = lab.LocalOscSpec(200.0, 240.0, 0.12, 1.0)
        with pytest.raises(lab.ConfigurationError, match="continuity"):
            lab.SweepSchedule(reference_chirp(), lo, 2)

    def test_accepts_phase_equal_modulo_two_pi(self):
        wrapped = lab.wrap_phase(lab.tx_phase(reference_chirp(), 0.3))
        lo = lab.LocalOscSpec(200.0, 240.0, 0.12, wrapped)
        schedule = lab.SweepSchedule(reference_chirp(), lo, 2)
        assert schedule.cycles == 2

    def test_rejects_window_longer_than_the_sweep(self):
        with pytest.raises(lab.ConfigurationError, match="window"):
            lab.make_schedule(reference_chirp(), 540.0, 0.32, 2)

    @pytest.mark.parametrize("cycles", [0, -1, 2.0])
    def test_rejects_bad_cycle_counts(self, cycles):
        with pytest.raises(lab.DomainError):
            lab.make_schedule(reference_chirp(), 240.0, 0.12, cycles)


@st.composite
def valid_sweeps(draw):
    f_start = draw(st.floats(min_value=0.5, max_value=5e3))
    bandwidth = draw(st.floats(min_value=0.1, max_value=1e4))
    return lab.ChirpSpec(
        f_start=f_start,
        f_end=f_start + bandwidth,
        duration=draw(st.floats(min_value=1e-2, max_value=5.0)),
        phase0=draw(st.floats(min_value=-10.0, max_value=10.0)),
    )


@st.composite
def valid_schedules(draw):
    tx = draw(valid_sweeps())
    rate = lab.sweep_rate(tx)
    window = tx.duration * draw(st.floats(min_value=0.05, max_value=1.0))
    return lab.make_schedule(tx, tx.f_end + rate * window, window, draw(st.integers(2, 16)))


class TestPhaseProperties:
    @given(schedule=valid_schedules())
    @settings(max_examples=60, deadline=None)
    def test_handoff_phase_continuity(self, schedule):
        mismatch = lab.wrap_phase(
            lab.lo_phase(schedule.lo, 0.0) - lab.tx_phase(schedule.tx, schedule.period)
        )
        assert abs(mismatch) < 1e-9

    @given(
        schedule=valid_schedules(),
        fraction=st.floats(min_value=0.01, max_value=0.99),
    )
    @settings(max_examples=60, deadline=None)
    def test_instantaneous_frequency_by_finite_difference(self, schedule, fraction):
        h = 1e-6
        for spec, phase_fn in (
            (schedule.tx, lab.tx_phase),
            (schedule.lo, lab.lo_phase),
        ):
            t = fraction * (spec.duration - 2 * h) + h
            derivative = (phase_fn(spec, t + h) - phase_fn(spec, t - h)) / (2 * h)
            expected = spec.f_start + lab.sweep_rate(spec) * t
            assert derivative / (2 * math.pi) == pytest.approx(expected, abs=1e-3)

    @given(t=st.lists(st.floats(min_value=0.0, max_value=0.3), min_size=2, max_size=8))
    @settings(max_examples=60, deadline=None)
    def test_phase_is_strictly_increasing_for_up_chirps(self, t):
        ordered = sorted(set(t))
        if len(ordered) < 2:
            return
        phases = [lab.tx_phase(reference_chirp(), ti) for ti in ordered]
        assert all(b > a for a, b in zip(phases, phases[1:]))

    @given(
        t=st.floats(min_value=0.0, max_value=100.0),
        period=st.floats(min_value=1e-2, max_value=10.0),
    )
    @settings(max_examples=80, deadline=None)
    def test_cycle_split_recombines(self, t, period):
        k, local = lab.cycle_split(t, period)
        assert 0.0 <= local <= period
        assert k * period + local == pytest.approx(t, rel=1e-12, abs=1e-12)


class TestSynthesizeTransmit:
    def test_first_sample_is_unity(self, reference_tx):
        assert reference_tx.samples[0] == 1.0

    def test_sample_count_covers_all_cycles(self, reference_tx):
        assert len(reference_tx) == 14400
        assert reference_tx.duration == pytest.approx(3.6)

    def test_every_cycle_restarts_identically(self, reference_tx):
        per_cycle = reference_tx.samples.reshape(12, 1200)
        for k in range(1, 12):
            np.testing.assert_array_equal(per_cycle[k], per_cycle[0])

    def test_rejects_undersampling(self):
        with pytest.raises(lab.ConfigurationError, match="sample rate"):
            lab.synthesize_transmit(reference_schedule(), 700.0)

    def test_signal_is_immutable(self, reference_tx):
        with pytest.raises(ValueError):
            reference_tx.samples[0] = 2.0
        with pytest.raises(dataclasses.FrozenInstanceError):
            reference_tx.t0 = 1.0


class TestSynthesizeLo:
    def test_window_start_sample(self, reference_lo):
        # cos of the transmit end phase; 90 pi wraps to zero, so exactly 1.
        index = int(round(0.3 * 4000))
        assert reference_lo.samples[index] == pytest.approx(1.0, abs=1e-9)

    def test_inactive_region_is_exactly_zero(self, reference_lo):
        index = int(round(0.43 * 4000))
        assert reference_lo.samples[index] == 0.0
        per_cycle = reference_lo.samples.reshape(12, 1200)
        active = int(round(0.12 * 4000))
        assert np.all(per_cycle[:, active:] == 0.0)

    def test_sample_93ms_into_the_second_window(self, reference_lo):
        expected = math.cos(
            float(sweep_phase_pi(200, 240, "0.12", "0.093", phase0_pi=90) % 2)
            * math.pi
        )
        index = int(round((0.3 + 0.093) * 4000))
        assert reference_lo.samples[index] == pytest.approx(expected, abs=1e-9)

    def test_rejects_undersampling_of_the_extension(self):
        # 900 Hz oversamples the 200 Hz transmit peak but not the 240 Hz
        # oscillator peak.
        schedule = reference_schedule()
        lab.synthesize_transmit(schedule, 900.0)
        with pytest.raises(lab.ConfigurationError, match="sample rate"):
            lab.synthesize_lo(schedule, 900.0)


class TestTimeSlice:
    def test_half_open_interval(self, reference_tx):
        part = lab.time_slice(reference_tx, 0.1, 0.2)
        assert part.t0 == pytest.approx(0.1)
        assert len(part) == 400
        np.testing.assert_array_equal(part.samples, reference_tx.samples[400:800])

    def test_rejects_empty_slices(self, reference_tx):
        with pytest.raises(lab.DomainError):
            lab.time_slice(reference_tx, 0.2, 0.2)
