"""Chirp-spread-spectrum time dissemination over power-line channels."""

from .channel import (
    SPEED_OF_LIGHT,
    ChannelModel,
    PropagationPath,
    apply_channel,
    default_mode_channel,
    delay_samples,
    path_delay,
    path_gain,
)
from .css import (
    ChirpParams,
    ComplexSignal,
    CorrelationProfile,
    DemodResult,
    brute_force_profile,
    correlate_window,
    dechirp,
    detect_peak,
    downconvert,
    fine_demod,
    make_downchirp,
    make_symbol,
    upconvert,
)
from .config import bundled_scenarios, load_scenario, parse_scenario
from .errors import (
    AmbiguityError,
    ChirpTimeError,
    ConfigError,
    DomainError,
    NoSignalError,
    RunError,
    StateError,
)
from .harness import Condition, RunStats, ScenarioConfig, desk_default, run_scenario, sweep, write_csv
from .noise import NoiseModel, add_noise, clip, estimate_n90, sample_alpha_stable
from .sync import ClockModel, Stage, SyncState, TofEstimator, reconstruct_pps, step_clock, timing_offset

__version__ = "0.1.0"
