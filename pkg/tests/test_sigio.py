import struct

import numpy as np
import pytest

from chirptime.css import ChirpParams, ComplexSignal, make_symbol
from chirptime.errors import DomainError
from chirptime.sigio import read_csig, read_signal, write_csig, write_signal


def sample_signal():
    return make_symbol(ChirpParams(6, 1e3, 4), 0, 4)


def test_csig_round_trip(tmp_path):
    sig = sample_signal()
    f = tmp_path / "a.csig"
    write_csig(sig, f)
    back = read_csig(f)
    np.testing.assert_array_equal(back.samples, sig.samples)
    assert back.sample_rate == sig.sample_rate


def test_csig_layout(tmp_path):
    sig = ComplexSignal([1 + 2j, -3 + 0.5j], 48e3)
    f = tmp_path / "b.csig"
    write_csig(sig, f)
    raw = f.read_bytes()
    assert raw[:4] == b"CSIG"
    assert struct.unpack("<Id", raw[4:16]) == (1, 48e3)
    assert struct.unpack("<4d", raw[16:]) == (1.0, 2.0, -3.0, 0.5)


def test_csv_round_trip(tmp_path):
    sig = sample_signal()
    f = tmp_path / "a.csv"
    write_signal(sig, f)
    assert f.read_text().splitlines()[0] == "index,re,im"
    back = read_signal(f, sig.sample_rate)
    np.testing.assert_array_equal(back.samples, sig.samples)


def test_csv_needs_rate(tmp_path):
    f = tmp_path / "a.csv"
    write_signal(sample_signal(), f)
    with pytest.raises(DomainError):
        read_signal(f)


@pytest.mark.parametrize("payload", [b"CSI", b"XXXX" + struct.pack("<Id", 1, 1.0),
                                     b"CSIG" + struct.pack("<Id", 9, 1.0),
                                     b"CSIG" + struct.pack("<Id", 1, 1.0) + b"\0" * 8])
def test_corrupt(tmp_path, payload):
    f = tmp_path / "bad.csig"
    f.write_bytes(payload)
    with pytest.raises(DomainError):
        read_csig(f)
