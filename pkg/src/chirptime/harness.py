"""Monte Carlo driver: calibration then implementation, per noise condition.

Each chirp runs generate -> channel -> noise (+clip) -> fine_demod ->
detect_peak -> protocol update. Random streams are keyed by the master
seed, the condition's own values and the chirp index, so results do not
depend on execution order, worker count, or which other conditions are in
the sweep.
"""

from __future__ import annotations

import csv
import itertools
import logging
import math
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .channel import ChannelModel, apply_channel, default_mode_channel, delay_samples
from .css import ChirpParams, ComplexSignal, detect_peak, fine_demod, make_symbol
from .errors import ChirpTimeError, DomainError, RunError
from .noise import NoiseModel, calibrate_n90, complex_noise, scaled_for
from .sync import ClockModel, Stage, SyncState, step_clock

log = logging.getLogger(__name__)

CHIRP_COLUMNS = [
    "condition_id", "snr_d_db", "alpha", "m", "chirp_idx", "stage",
    "d_index", "tof_bar", "t_offset_fine", "timing_error_s",
]
AGGREGATE_COLUMNS = [
    "condition_id", "snr_d_db", "alpha", "m", "n",
    "mean_s", "std_s", "min_s", "max_s", "p5_s", "p95_s",
]

_TAG_CHIRP = 0
_TAG_CAL = 1


class Condition(NamedTuple):
    snr_d_db: float  # math.inf = noiseless
    alpha: float
    m: float | None  # clip multiple; None = no clipping


@dataclass(frozen=True)
class ScenarioConfig:
    chirp: ChirpParams
    channel: ChannelModel
    snr_d_list: tuple = (0.0,)
    alpha_list: tuple = (2.0,)
    m_list: tuple = (None,)
    n_cal: int = 200
    n_impl: int = 50
    window: int = 900
    receiver_drift: float = 1e-7
    receiver_offset0: float = 0.0
    random_walk_sigma: float = 0.0
    tx_holdover_drift: float = 0.0
    chirp_interval: int = 1
    seed: int = 0
    peak_mode: str = "global_max"
    rho: float = 0.5
    beta: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        for name in ("snr_d_list", "alpha_list", "m_list"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
            if not getattr(self, name):
                raise DomainError(f"{name} must not be empty")
        if self.n_cal < 1:
            raise DomainError(f"n_cal must be >= 1, got {self.n_cal}")
        if self.n_impl < 0:
            raise DomainError(f"n_impl must be >= 0, got {self.n_impl}")
        if self.chirp_interval < 1:
            raise DomainError(f"chirp_interval must be >= 1, got {self.chirp_interval}")
        if self.peak_mode not in ("global_max", "first_arrival"):
            raise DomainError(f"unknown peak mode {self.peak_mode!r}")
        if self.seed < 0:
            raise DomainError("seed must be non-negative")

    def conditions(self):
        return [Condition(*c) for c in itertools.product(self.snr_d_list, self.alpha_list, self.m_list)]


def desk_default(**overrides) -> ScenarioConfig:
    """Desk-scale scenario: SF=10, s=100, B=100 kHz (100 ns steps), 200 km line."""
    kw = dict(
        chirp=ChirpParams(10, 100e3, 100),
        channel=default_mode_channel(200.0),
        snr_d_list=(-20.0, -10.0, -5.0, 0.0),
        alpha_list=(2.0, 1.8, 1.6),
        m_list=(None, 4.0),
    )
    kw.update(overrides)
    return ScenarioConfig(**kw)


@dataclass(frozen=True)
class ChirpRecord:
    chirp_idx: int
    stage: str
    d_index: int
    tof_bar: float
    t_offset_fine: float
    true_offset_s: float
    timing_error_s: float


@dataclass
class RunStats:
    condition_id: int
    condition: Condition
    records: list = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)
    error: str | None = None

    def implementation_errors(self) -> np.ndarray:
        return np.array(
            [r.timing_error_s for r in self.records if r.stage == Stage.IMPLEMENTATION.value], dtype=float
        )

    def d_indices(self, stage=None) -> np.ndarray:
        return np.array([r.d_index for r in self.records if stage is None or r.stage == stage], dtype=int)


def aggregate(errors) -> dict:
    """Summary statistics of implementation-stage timing errors (population std)."""
    e = np.asarray(errors, dtype=float)
    if e.size == 0:
        nan = float("nan")
        return dict(n=0, mean_s=nan, std_s=nan, min_s=nan, max_s=nan, p5_s=nan, p95_s=nan)
    p5, p95 = np.percentile(e, [5, 95])
    return dict(
        n=int(e.size),
        mean_s=float(np.mean(e)),
        std_s=float(np.std(e)),
        min_s=float(np.min(e)),
        max_s=float(np.max(e)),
        p5_s=float(p5),
        p95_s=float(p95),
    )


def condition_key(cond: Condition):
    """Integer words derived from the condition's values, for seeding."""
    m = -1.0 if cond.m is None else cond.m
    return tuple(struct.unpack("<3Q", struct.pack("<3d", float(cond.snr_d_db), float(cond.alpha), float(m))))


def _rng(seed, tag, cond, idx=0):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(tag, *condition_key(cond), idx)))


def _noise_model(config, cond, power, n):
    if math.isinf(cond.snr_d_db) and cond.snr_d_db > 0:
        return None
    base = NoiseModel(cond.alpha, config.beta, 1.0, config.delta, clip_multiple=cond.m)
    noise = scaled_for(base, power, cond.snr_d_db)
    if noise.clipping:
        noise = calibrate_n90(noise, n, _rng(config.seed, _TAG_CAL, cond))
    return noise


def run_scenario(config: ScenarioConfig, condition, condition_id: int = 0) -> RunStats:
    """One calibration/implementation run under a single noise condition."""
    cond = Condition(*condition)
    p = config.chirp
    L = p.fine_length
    delta = p.fine_step
    fs = p.fine_rate

    d_max = max(delay_samples(path, config.channel.distance, fs) for path in config.channel.paths)
    pre = math.ceil(d_max / L) + 1
    # back-to-back chirps; the window sits in the periodic steady state
    tx = ComplexSignal(np.tile(make_symbol(p, 0, p.oversampling).samples, pre + 2), fs)
    rx_clean = apply_channel(tx, config.channel).samples
    base = pre * L
    power = float(np.mean(np.abs(rx_clean[base:base + L]) ** 2))
    noise = _noise_model(config, cond, power, L)

    state = SyncState(p, config.window)
    rx_clock = ClockModel("receiver", config.receiver_offset0, config.receiver_drift,
                          random_walk_sigma=config.random_walk_sigma)
    tx_clock = ClockModel("transmitter", holdover_drift=config.tx_holdover_drift)
    slot = config.chirp_interval * p.chirp_duration
    stats = RunStats(condition_id, cond)

    true_elapsed = rx_local = tx_local = 0.0
    for j in range(config.n_cal + config.n_impl):
        try:
            rng = _rng(config.seed, _TAG_CHIRP, cond, j)
            if j == config.n_cal:
                state.on_gnss_loss()
                rx_clock, tx_clock = rx_clock.lose_gnss(), tx_clock.lose_gnss()
            if state.stage is Stage.CALIBRATION:
                rx_late = tx_late = 0.0
            else:
                true_elapsed += slot
                rx_local += step_clock(rx_clock, slot, rng)
                tx_local += step_clock(tx_clock, slot)
                rx_late = true_elapsed - rx_local - config.receiver_offset0
                tx_late = true_elapsed - tx_local
            shift = int(round((rx_late - tx_late) / delta))
            if abs(shift) >= L:
                raise DomainError(f"clock offset of {shift} fine steps exceeds one chirp")
            start = base + shift
            window = rx_clean[start:start + L]
            if noise is not None:
                window = window + complex_noise(noise, L, rng)
            profile = fine_demod(ComplexSignal(window, fs), p)
            d = detect_peak(profile, config.peak_mode, config.rho).peak_index
            t = state.observe(d)
        except ChirpTimeError as exc:
            raise RunError(j, exc) from exc
        stats.records.append(
            ChirpRecord(j, state.stage.value, d, state.current_tof, float(t), rx_late, rx_late + t * delta)
        )
    stats.aggregates = aggregate(stats.implementation_errors())
    return stats


def _run_one(args):
    config, cond, cid = args
    try:
        return run_scenario(config, cond, cid)
    except ChirpTimeError as exc:
        log.warning("condition %d %s failed: %s", cid, cond, exc)
        stats = RunStats(cid, Condition(*cond), error=str(exc))
        stats.aggregates = aggregate([])
        return stats


def sweep(config: ScenarioConfig, jobs: int = 1) -> list:
    """Run every (snr, alpha, m) combination; output follows list order."""
    tasks = [(config, c, i) for i, c in enumerate(config.conditions())]
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, tasks))


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def _cond_cells(stats):
    c = stats.condition
    return [str(stats.condition_id), _fmt(c.snr_d_db), _fmt(c.alpha), _fmt(c.m)]


def write_csv(stats, path):
    """Write ``chirps.csv`` and ``aggregates.csv`` into directory ``path``.

    Returns the two file paths.
    """
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        chirps, aggs = out / "chirps.csv", out / "aggregates.csv"
        with open(chirps, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CHIRP_COLUMNS)
            for s in stats:
                head = _cond_cells(s)
                for r in s.records:
                    w.writerow(head + [str(r.chirp_idx), r.stage, str(r.d_index), _fmt(r.tof_bar),
                                       _fmt(r.t_offset_fine), _fmt(r.timing_error_s)])
        with open(aggs, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(AGGREGATE_COLUMNS)
            for s in stats:
                a = s.aggregates or aggregate(s.implementation_errors())
                w.writerow(_cond_cells(s) + [str(a["n"])] + [_fmt(a[k]) for k in AGGREGATE_COLUMNS[5:]])
    except OSError as exc:
        raise OSError(f"cannot write results to {out}: {exc}") from exc
    return chirps, aggs


def read_chirps_csv(path):
    """Parse a per-chirp file back into ``{condition_id: [row dict, ...]}``."""
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CHIRP_COLUMNS:
            raise DomainError(f"{path}: unexpected columns {reader.fieldnames}")
        for row in reader:
            rows.setdefault(int(row["condition_id"]), []).append(row)
    return rows


def read_aggregates_csv(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != AGGREGATE_COLUMNS:
            raise DomainError(f"{path}: unexpected columns {reader.fieldnames}")
        return {int(r["condition_id"]): r for r in reader}
