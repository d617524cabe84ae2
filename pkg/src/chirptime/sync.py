"""Two-stage time-of-flight synchronisation.

Calibration: both ends hold GNSS time, so the demodulation index D is the
time of flight in fine steps and a moving average builds TOF-bar.
Implementation: GNSS is gone, the transmitter holds over on an atomic clock
and the receiver free-runs. D now moves opposite to the receiver's offset,
and the timing offset ``T = D - TOF-bar`` recovers it.

Sign convention: a receiver offset ``o`` is how late the receiver's local
epoch is relative to true time. A late window sees the chirp earlier, so
``D = TOF - o/delta`` and ``T = -o/delta``; the true chirp boundary is
then ``local_epoch + T*delta``.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from .css import ChirpParams
from .errors import AmbiguityError, DomainError, StateError


class Stage(enum.Enum):
    CALIBRATION = "calibration"
    IMPLEMENTATION = "implementation"


@dataclass(frozen=True)
class ClockModel:
    """Free-running clock: fractional frequency offset plus optional random walk.

    ``holdover_drift`` is the drift the clock adopts when GNSS is lost; it
    only matters for the transmitter, whose holdover source is an atomic
    clock (drift 0 by default).
    """

    role: str = "receiver"
    offset0: float = 0.0
    drift_rate: float = 0.0
    gnss_available: bool = True
    random_walk_sigma: float = 0.0  # s/sqrt(s)
    holdover_drift: float = 0.0

    def __post_init__(self):
        if self.role not in ("transmitter", "receiver"):
            raise DomainError(f"clock role must be transmitter or receiver, got {self.role!r}")
        if self.random_walk_sigma < 0:
            raise DomainError("random walk sigma must be >= 0")

    def lose_gnss(self) -> "ClockModel":
        if not self.gnss_available:
            raise StateError("clock has already lost GNSS")
        if self.role == "transmitter":
            return replace(self, gnss_available=False, drift_rate=self.holdover_drift)
        return replace(self, gnss_available=False)


def step_clock(clock: ClockModel, true_dt: float, rng: np.random.Generator | None = None) -> float:
    """Local elapsed time over ``true_dt`` seconds of true time."""
    if true_dt < 0:
        raise DomainError(f"true_dt must be >= 0, got {true_dt}")
    local = true_dt * (1 + clock.drift_rate)
    if clock.random_walk_sigma and true_dt:
        if rng is None:
            raise DomainError("a random-walk clock needs an rng")
        local += rng.normal(0.0, clock.random_walk_sigma * math.sqrt(true_dt))
    return local


class TofEstimator:
    """Moving average of the last ``window`` demodulation indices."""

    def __init__(self, window: int = 900):
        if int(window) != window or window < 1:
            raise DomainError(f"window must be an integer >= 1, got {window}")
        self.window = int(window)
        self.buffer = deque(maxlen=self.window)

    def observe(self, d):
        self.buffer.append(d)

    @property
    def mean(self) -> float:
        if not self.buffer:
            raise StateError("no TOF observations yet")
        return sum(self.buffer) / len(self.buffer)

    def __len__(self):
        return len(self.buffer)


def wrap_offset(t, period):
    """Map a fine-step offset into ``[-period/2, period/2)``."""
    return (t + period / 2) % period - period / 2


def timing_offset(d, tof_bar, period=None):
    """``T = D - TOF-bar`` in fine steps, optionally wrapped to the lag period."""
    t = d - tof_bar
    if period is not None:
        t = wrap_offset(t, period)
    return t


class SyncState:
    """Protocol state for one receiver.

    ``chirps_per_second`` is set only when an exact integer number of
    chirps fits in one second; 1PPS reconstruction needs it.
    """

    def __init__(self, params: ChirpParams, window: int = 900):
        self.params = params
        self.stage = Stage.CALIBRATION
        self.tof_estimate = TofEstimator(window)
        self.last_index = None
        self.timing_offset = None
        self.tof_bar = None
        c = round(1 / params.chirp_duration)
        self.chirps_per_second = c if c >= 1 and math.isclose(c * params.chirp_duration, 1.0, rel_tol=1e-12) else None

    @property
    def lag_period(self) -> int:
        return self.params.lag_period

    def observe_calibration(self, d) -> float:
        """Push a calibration index; returns its offset from the running mean."""
        if self.stage is not Stage.CALIBRATION:
            raise StateError("calibration observations are not accepted after GNSS loss")
        self.tof_estimate.observe(d)
        self.last_index = d
        self.timing_offset = timing_offset(d, self.tof_estimate.mean, self.lag_period)
        return self.timing_offset

    def on_gnss_loss(self):
        if self.stage is not Stage.CALIBRATION:
            raise StateError("GNSS already lost")
        if not len(self.tof_estimate):
            raise StateError("GNSS lost before any TOF observation; TOF-bar undefined")
        self.tof_bar = self.tof_estimate.mean
        self.stage = Stage.IMPLEMENTATION
        return self

    def observe_implementation(self, d) -> float:
        """Timing offset of a post-loss index against the frozen TOF-bar."""
        if self.stage is not Stage.IMPLEMENTATION:
            raise StateError("implementation observations need GNSS loss first")
        self.last_index = d
        self.timing_offset = timing_offset(d, self.tof_bar, self.lag_period)
        return self.timing_offset

    def observe(self, d) -> float:
        if self.stage is Stage.CALIBRATION:
            return self.observe_calibration(d)
        return self.observe_implementation(d)

    @property
    def current_tof(self) -> float:
        return self.tof_bar if self.tof_bar is not None else self.tof_estimate.mean

    def tof_seconds(self) -> float:
        return self.current_tof * self.params.fine_step


def reconstruct_pps(local_epoch: float, offset_seconds: float, state: SyncState, cycle_index: int = 0) -> float:
    """Instant of the next true top-of-second.

    ``local_epoch`` is the start of the receiver's dechirp window for the
    chirp at position ``cycle_index`` (0-based) within the one-second cycle
    of C chirps. The boundary lies ``C - cycle_index`` chirp durations past
    the corrected chirp epoch ``local_epoch + offset_seconds``.
    """
    if state.stage is not Stage.IMPLEMENTATION:
        raise StateError("1PPS reconstruction runs in the implementation stage")
    C = state.chirps_per_second
    if C is None:
        raise DomainError(
            f"chirp duration {state.params.chirp_duration} s does not divide one second into an integer count"
        )
    if not 0 <= cycle_index < C:
        raise DomainError(f"cycle index must be in [0, {C}), got {cycle_index}")
    half = state.lag_period * state.params.fine_step / 2
    if abs(offset_seconds) >= half:
        raise AmbiguityError(f"|timing offset| {abs(offset_seconds)} s is not below the ambiguity limit {half} s")
    return local_epoch + offset_seconds + (C - cycle_index) * state.params.chirp_duration
