import numpy as np
import pytest

from chirptime.channel import (
    SPEED_OF_LIGHT,
    ChannelModel,
    PropagationPath,
    apply_channel,
    default_mode_channel,
    delay_samples,
    path_delay,
    path_gain,
)
from chirptime.css import ChirpParams, ComplexSignal, detect_peak, fine_demod, make_symbol
from chirptime.errors import DomainError

C = SPEED_OF_LIGHT


def test_delay_200km_light_speed():
    assert path_delay(PropagationPath(C), 200) == pytest.approx(667.128190396e-6, rel=1e-11)
    assert round(path_delay(PropagationPath(C), 200) * 1e6, 2) == 667.13


def test_delay_zero_distance():
    assert path_delay(PropagationPath(C), 0) == 0.0


def test_delay_coax():
    d = path_delay(PropagationPath(2 * C / 3), 0.7)
    assert d == pytest.approx(3.5024e-6, rel=1e-4)


def test_gain_twenty_db():
    assert path_gain(PropagationPath(C, 0.1, 1.0), 200) == pytest.approx(0.1, rel=1e-12)


def test_gain_zero_distance_is_weight():
    assert path_gain(PropagationPath(C, 3.0, 0.4), 0) == 0.4


def test_gain_ratio():
    r = path_gain(PropagationPath(C, 1.0), 20) / path_gain(PropagationPath(C, 0.1), 20)
    assert r == pytest.approx(10 ** (-18 / 20), rel=1e-12)


@pytest.mark.parametrize("kw", [dict(velocity=0), dict(velocity=1.01 * C), dict(velocity=C, attenuation=-1),
                                dict(velocity=C, weight=-0.1)])
def test_path_validation(kw):
    with pytest.raises(DomainError):
        PropagationPath(**kw)


def test_channel_validation():
    with pytest.raises(DomainError):
        ChannelModel(-1, [PropagationPath(C)])
    with pytest.raises(DomainError):
        ChannelModel(1, [])
    with pytest.raises(DomainError):
        ChannelModel(1, [PropagationPath(C, weight=0)])


def test_identity_channel():
    sig = ComplexSignal(np.random.default_rng(0).normal(size=50) + 0j, 1e6)
    out = apply_channel(sig, ChannelModel(0, [PropagationPath(C)]))
    np.testing.assert_array_equal(out.samples, sig.samples)


def test_linearity():
    rng = np.random.default_rng(1)
    ch = default_mode_channel(20)
    a = ComplexSignal(rng.normal(size=300) + 1j * rng.normal(size=300), 1e7)
    b = ComplexSignal(rng.normal(size=300) + 1j * rng.normal(size=300), 1e7)
    lhs = apply_channel(ComplexSignal(2 * a.samples - 3j * b.samples, 1e7), ch).samples
    rhs = 2 * apply_channel(a, ch).samples - 3j * apply_channel(b, ch).samples
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_delays_land_on_grid():
    fs = 1e7
    ch = default_mode_channel(200)
    sig = ComplexSignal(np.array([1.0 + 0j]), fs)
    out = apply_channel(sig, ch).samples
    idx = [delay_samples(p, 200, fs) for p in ch.paths]
    for p, i in zip(ch.paths, idx):
        assert out[i] == pytest.approx(path_gain(p, 200))
    assert np.count_nonzero(out) == 3
    assert idx[0] == 6807


def test_max_delay_limit():
    sig = ComplexSignal(np.ones(4), 1e7)
    with pytest.raises(DomainError):
        apply_channel(sig, default_mode_channel(200), max_delay_samples=1000)


def test_fastest_is_first_aerial():
    assert default_mode_channel(5).fastest() == 0


def test_ground_peak_ratio_falls_with_distance():
    p = ChirpParams(7, 1e5, 16)
    L = p.fine_length
    ratios = []
    for dist in (1, 20, 200):
        ch = default_mode_channel(dist)
        d = [delay_samples(q, dist, p.fine_rate) for q in ch.paths]
        pre = -(-max(d) // L) + 1
        tx = ComplexSignal(np.tile(make_symbol(p, 0, 16).samples, pre + 2), p.fine_rate)
        rx = apply_channel(tx, ch).samples[pre * L:(pre + 1) * L]
        mags = fine_demod(ComplexSignal(rx, p.fine_rate), p).magnitudes
        P = p.lag_period
        ratios.append(mags[d[2] % P] / mags[d[0] % P])
    assert ratios[0] > ratios[1] > ratios[2]
