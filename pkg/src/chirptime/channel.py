"""Parametric multi-path line channel.

Each propagation path stands in for one transmission-line mode: a velocity,
an attenuation per km and a coupling weight. Delays are quantised to the
simulation grid (one fine step per sample).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .css import ComplexSignal
from .errors import DomainError
from .noise import NoiseModel

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class PropagationPath:
    velocity: float
    attenuation: float = 0.0  # dB/km
    weight: float = 1.0

    def __post_init__(self):
        if not 0 < self.velocity <= SPEED_OF_LIGHT:
            raise DomainError(f"velocity must be in (0, c], got {self.velocity}")
        if not self.attenuation >= 0:
            raise DomainError(f"attenuation must be >= 0 dB/km, got {self.attenuation}")
        if not self.weight >= 0:
            raise DomainError(f"weight must be >= 0, got {self.weight}")


@dataclass(frozen=True)
class ChannelModel:
    distance: float  # km
    paths: tuple = field(default_factory=tuple)
    noise: NoiseModel | None = None

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))
        if not self.distance >= 0:
            raise DomainError(f"distance must be >= 0 km, got {self.distance}")
        if not any(p.weight > 0 for p in self.paths):
            raise DomainError("channel needs at least one path with positive weight")

    def delays(self):
        return [path_delay(p, self.distance) for p in self.paths]

    def gains(self):
        return [path_gain(p, self.distance) for p in self.paths]

    def fastest(self) -> int:
        """Index of the earliest-arriving path with non-zero weight."""
        live = [(path_delay(p, self.distance), i) for i, p in enumerate(self.paths) if p.weight > 0]
        return min(live)[1]


def path_delay(path: PropagationPath, distance: float) -> float:
    """Propagation delay in seconds over ``distance`` km."""
    return 1000.0 * distance / path.velocity


def path_gain(path: PropagationPath, distance: float) -> float:
    return path.weight * 10 ** (-path.attenuation * distance / 20)


def delay_samples(path: PropagationPath, distance: float, sample_rate: float) -> int:
    return int(round(path_delay(path, distance) * sample_rate))


def apply_channel(signal: ComplexSignal, channel: ChannelModel, max_delay_samples: int | None = None) -> ComplexSignal:
    """Sum of delayed, scaled copies of ``signal``, one per path.

    The output is long enough to hold the latest path's full contribution.
    """
    fs = signal.sample_rate
    delays = [delay_samples(p, channel.distance, fs) for p in channel.paths]
    longest = max(delays)
    if max_delay_samples is not None and longest > max_delay_samples:
        raise DomainError(f"path delay of {longest} samples exceeds the limit of {max_delay_samples}")
    out = np.zeros(len(signal) + longest, dtype=np.complex128)
    for path, d in zip(channel.paths, delays):
        g = path_gain(path, channel.distance)
        if g:
            out[d:d + len(signal)] += g * signal.samples
    return ComplexSignal(out, fs)


def default_mode_channel(distance: float, noise: NoiseModel | None = None) -> ChannelModel:
    """Two fast, low-loss aerial-like paths and one slow, lossy ground-like path."""
    c = SPEED_OF_LIGHT
    return ChannelModel(
        distance,
        (
            PropagationPath(0.98 * c, 0.05, 1.0),
            PropagationPath(0.97 * c, 0.08, 0.8),
            PropagationPath(0.60 * c, 0.5, 0.3),
        ),
        noise,
    )
