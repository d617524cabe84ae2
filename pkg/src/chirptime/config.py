"""Scenario files: flat ``key = value`` text with dotted section prefixes.

Example::

    # comment
    chirp.sf = 10
    chirp.bandwidth = 100000
    channel.distance_km = 200
    channel.path.1.velocity = 0.98c
    channel.path.1.attenuation = 0.05
    sweep.snr_d_db = -10, -5, 0
    sweep.m = none, 4

Velocities accept a trailing ``c`` meaning a fraction of the speed of light.
List keys take comma-separated values. Unknown keys are rejected.
"""

from __future__ import annotations

import math
import re
from importlib import resources
from pathlib import Path

from .channel import SPEED_OF_LIGHT, ChannelModel, PropagationPath, default_mode_channel
from .css import ChirpParams
from .errors import ChirpTimeError, ConfigError
from .harness import ScenarioConfig

_SCALARS = {
    "chirp.sf": int,
    "chirp.bandwidth": float,
    "chirp.oversampling": int,
    "chirp.energy": float,
    "chirp.carrier": float,
    "channel.distance_km": float,
    "noise.beta": float,
    "noise.delta": float,
    "run.n_cal": int,
    "run.n_impl": int,
    "run.window": int,
    "run.receiver_drift": float,
    "run.receiver_offset0": float,
    "run.random_walk_sigma": float,
    "run.tx_holdover_drift": float,
    "run.chirp_interval": int,
    "run.seed": int,
    "detect.mode": str,
    "detect.rho": float,
}
_LISTS = {"sweep.snr_d_db", "sweep.alpha", "sweep.m"}
_PATH_KEY = re.compile(r"^channel\.path\.(\d+)\.(velocity|attenuation|weight)$")


def _number(text):
    t = text.strip().lower()
    if t in ("inf", "+inf", "noiseless"):
        return math.inf
    return float(t)


def _velocity(text):
    t = text.strip().lower()
    if t.endswith("c"):
        return float(t[:-1]) * SPEED_OF_LIGHT
    return float(t)


def _m_value(text):
    t = text.strip().lower()
    return None if t in ("none", "off", "") else float(t)


def parse_scenario(text: str, source: str = "<string>") -> ScenarioConfig:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        if key not in _SCALARS and key not in _LISTS and not _PATH_KEY.match(key):
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        raw[key] = (lineno, value)

    def get(key, default):
        if key not in raw:
            return default
        lineno, value = raw[key]
        try:
            return _SCALARS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from None

    def get_list(key, conv, default):
        if key not in raw:
            return default
        lineno, value = raw[key]
        try:
            return tuple(conv(v) for v in value.split(","))
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad list for {key}: {exc}") from None

    paths = {}
    for key, (lineno, value) in raw.items():
        m = _PATH_KEY.match(key)
        if m:
            conv = _velocity if m.group(2) == "velocity" else float
            try:
                paths.setdefault(int(m.group(1)), {})[m.group(2)] = conv(value)
            except ValueError as exc:
                raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from None

    try:
        chirp = ChirpParams(
            get("chirp.sf", 10),
            get("chirp.bandwidth", 100e3),
            get("chirp.oversampling", 100),
            get("chirp.energy", 1.0),
            get("chirp.carrier", 0.0),
        )
        distance = get("channel.distance_km", 200.0)
        if paths:
            for idx, fields in paths.items():
                if "velocity" not in fields:
                    raise ConfigError(f"{source}: channel.path.{idx} has no velocity")
            channel = ChannelModel(distance, [PropagationPath(**paths[i]) for i in sorted(paths)])
        else:
            channel = default_mode_channel(distance)
        return ScenarioConfig(
            chirp=chirp,
            channel=channel,
            snr_d_list=get_list("sweep.snr_d_db", _number, (0.0,)),
            alpha_list=get_list("sweep.alpha", float, (2.0,)),
            m_list=get_list("sweep.m", _m_value, (None,)),
            n_cal=get("run.n_cal", 200),
            n_impl=get("run.n_impl", 50),
            window=get("run.window", 900),
            receiver_drift=get("run.receiver_drift", 1e-7),
            receiver_offset0=get("run.receiver_offset0", 0.0),
            random_walk_sigma=get("run.random_walk_sigma", 0.0),
            tx_holdover_drift=get("run.tx_holdover_drift", 0.0),
            chirp_interval=get("run.chirp_interval", 1),
            seed=get("run.seed", 0),
            peak_mode=get("detect.mode", "global_max"),
            rho=get("detect.rho", 0.5),
            beta=get("noise.beta", 0.0),
            delta=get("noise.delta", 0.0),
        )
    except ConfigError:
        raise
    except ChirpTimeError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def bundled_scenarios():
    return sorted(p.name[:-4] for p in resources.files("chirptime.scenarios").iterdir() if p.name.endswith(".cfg"))


def load_scenario(name_or_path) -> ScenarioConfig:
    """Load a scenario file, or a bundled scenario by name (e.g. ``desk_default``)."""
    path = Path(name_or_path)
    if path.is_file():
        return parse_scenario(path.read_text(), str(path))
    bundled = resources.files("chirptime.scenarios") / f"{name_or_path}.cfg"
    if "/" not in str(name_or_path) and bundled.is_file():
        return parse_scenario(bundled.read_text(), f"{name_or_path}.cfg")
    raise FileNotFoundError(f"scenario file not found: {name_or_path}")
