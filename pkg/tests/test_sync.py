import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chirptime.css import ChirpParams
from chirptime.errors import AmbiguityError, DomainError, StateError
from chirptime.sync import (
    ClockModel,
    Stage,
    SyncState,
    TofEstimator,
    reconstruct_pps,
    step_clock,
    timing_offset,
    wrap_offset,
)

EXP = ChirpParams(10, 327_680.0, 32)
UNIT = ChirpParams(2, 4.0, 1)  # 1 s chirps, lag period 2 steps of 0.25 s


class TestTofEstimator:
    def test_mean(self):
        e = TofEstimator(900)
        for d in (100, 102, 98):
            e.observe(d)
        assert e.mean == 100

    def test_window_eviction(self):
        e = TofEstimator(2)
        for d in (10, 20, 30):
            e.observe(d)
        assert e.mean == 25 and len(e) == 2

    def test_constant_is_exact(self):
        e = TofEstimator(7)
        for _ in range(50):
            e.observe(66)
        assert e.mean == 66

    def test_empty(self):
        with pytest.raises(StateError):
            TofEstimator().mean

    @pytest.mark.parametrize("w", [0, -3, 2.5])
    def test_bad_window(self, w):
        with pytest.raises(DomainError):
            TofEstimator(w)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(0, 10**6), min_size=1, max_size=60), st.integers(1, 20))
    def test_matches_tail_mean(self, obs, w):
        e = TofEstimator(w)
        for d in obs:
            e.observe(d)
        assert e.mean == pytest.approx(np.mean(obs[-w:]), rel=1e-12)


class TestTimingOffset:
    def test_zero(self):
        assert timing_offset(150, 150) == 0

    def test_five(self):
        assert timing_offset(155, 150) == 5
        assert timing_offset(155, 150) * EXP.fine_step == pytest.approx(5 * EXP.fine_step)

    def test_wrap(self):
        assert wrap_offset(10, 16) == -6
        assert wrap_offset(-8, 16) == -8
        assert wrap_offset(7.5, 16) == 7.5
        assert timing_offset(2, 14, 16) == 4

    def test_drift_inverse(self):
        # receiver late by 2 fine steps: its window starts 2 steps late, so D reads 2 less
        tof = 120
        state = SyncState(EXP)
        for _ in range(5):
            state.observe(tof)
        state.on_gnss_loss()
        assert state.observe(tof - 2) == -2


class TestClock:
    def test_no_drift(self):
        assert step_clock(ClockModel("receiver"), 3.5) == 3.5

    def test_positive_drift(self):
        assert step_clock(ClockModel("receiver", drift_rate=1e-7), 100) - 100 == pytest.approx(10e-6, rel=1e-6)

    def test_negative_drift(self):
        assert step_clock(ClockModel("receiver", drift_rate=-5e-8), 200) - 200 == pytest.approx(-10e-6, rel=1e-6)

    def test_random_walk_needs_rng(self):
        c = ClockModel("receiver", random_walk_sigma=1e-9)
        with pytest.raises(DomainError):
            step_clock(c, 1.0)
        assert step_clock(c, 1.0, np.random.default_rng(0)) != 1.0

    def test_loss_switches_drift(self):
        c = ClockModel("transmitter", drift_rate=1e-6, holdover_drift=2e-9).lose_gnss()
        assert not c.gnss_available and c.drift_rate == 2e-9
        with pytest.raises(StateError):
            c.lose_gnss()

    def test_bad_role(self):
        with pytest.raises(DomainError):
            ClockModel("relay")

    def test_negative_dt(self):
        with pytest.raises(DomainError):
            step_clock(ClockModel("receiver"), -1)


class TestSyncState:
    def test_loss_before_observation(self):
        with pytest.raises(StateError):
            SyncState(EXP).on_gnss_loss()

    def test_double_loss(self):
        s = SyncState(EXP)
        s.observe(3)
        s.on_gnss_loss()
        with pytest.raises(StateError):
            s.on_gnss_loss()

    def test_no_calibration_after_loss(self):
        s = SyncState(EXP)
        s.observe(3)
        s.on_gnss_loss()
        with pytest.raises(StateError):
            s.observe_calibration(3)

    def test_no_implementation_before_loss(self):
        with pytest.raises(StateError):
            SyncState(EXP).observe_implementation(3)

    def test_tof_frozen_after_loss(self):
        s = SyncState(EXP, window=900)
        for d in range(900):
            s.observe(500 + (d % 3) - 1)
        s.on_gnss_loss()
        frozen = s.tof_bar
        assert frozen == 500
        for d in (510, 520, 530):
            s.observe(d)
        assert s.tof_bar == frozen and s.stage is Stage.IMPLEMENTATION
        assert s.timing_offset == 30

    def test_noiseless_loss_at_ten(self):
        s = SyncState(EXP)
        for _ in range(10):
            s.observe(66)
        s.on_gnss_loss()
        assert all(s.observe(66) == 0 for _ in range(10))

    def test_chirps_per_second(self):
        assert SyncState(EXP).chirps_per_second == 320
        assert SyncState(UNIT).chirps_per_second == 1
        assert SyncState(ChirpParams(10, 1e5, 100)).chirps_per_second is None

    def test_tof_seconds(self):
        s = SyncState(ChirpParams(10, 1e5, 100))
        s.observe(6807)
        assert s.tof_seconds() == pytest.approx(680.7e-6, rel=1e-12)


def _lost(params):
    s = SyncState(params)
    s.observe(0)
    s.on_gnss_loss()
    return s


class TestReconstruct:
    def test_unit_chirp_fraction(self):
        # epoch read 0.2 s late: boundary is 0.8 s after the local epoch
        assert reconstruct_pps(10.0, -0.2, _lost(UNIT)) == pytest.approx(10.8, abs=1e-15)

    def test_zero_offset_ideal(self):
        assert reconstruct_pps(10.0, 0.0, _lost(UNIT)) == 11.0
        s = _lost(EXP)
        assert reconstruct_pps(0.0, 0.0, s, 300) == pytest.approx(20 * 3.125e-3, rel=1e-15)

    def test_ambiguity(self):
        with pytest.raises(AmbiguityError):
            reconstruct_pps(0.0, 0.25, _lost(UNIT))
        with pytest.raises(AmbiguityError):
            reconstruct_pps(0.0, -EXP.chirp_duration / 4, _lost(EXP))

    def test_needs_implementation_stage(self):
        s = SyncState(UNIT)
        s.observe(0)
        with pytest.raises(StateError):
            reconstruct_pps(0.0, 0.0, s)

    def test_needs_integer_rate(self):
        with pytest.raises(DomainError):
            reconstruct_pps(0.0, 0.0, _lost(ChirpParams(10, 1e5, 100)))

    def test_cycle_index_range(self):
        with pytest.raises(DomainError):
            reconstruct_pps(0.0, 0.0, _lost(EXP), 320)

    def test_drift_100s(self):
        # receiver gains 10 us over 100 s of holdover; its local top-of-second
        # is 10 us off, the corrected one within one fine step
        params = EXP
        delta = params.fine_step
        tof = 37
        state = SyncState(params)
        state.observe(tof)
        state.on_gnss_loss()
        local = step_clock(ClockModel("receiver", drift_rate=1e-7), 100.0)
        late = 100.0 - local  # receiver lateness
        assert abs(late) == pytest.approx(10e-6, rel=1e-6)
        d = tof - round(late / delta)
        t = state.observe(d) * delta
        # window for cycle index 0 opens at local second 100, true 100 + late
        pps = reconstruct_pps(100.0 + late, t, state, 0)
        assert abs(pps - 101.0) <= delta
