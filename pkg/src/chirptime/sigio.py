"""Signal file formats.

CSIG binary layout (all little-endian)::

    offset  size  field
    0       4     magic b"CSIG"
    4       4     version, uint32 (currently 1)
    8       8     sample rate, float64
    16      ...   interleaved float64 pairs (re, im)

The CSV alternative has a header ``index,re,im`` and one row per sample;
since CSV carries no sample rate, readers must supply one.
"""

import csv
import struct
from pathlib import Path

import numpy as np

from .css import ComplexSignal
from .errors import DomainError

MAGIC = b"CSIG"
VERSION = 1
_HEADER = struct.Struct("<4sId")


def write_csig(signal: ComplexSignal, path):
    path = Path(path)
    body = np.empty(2 * len(signal), dtype="<f8")
    body[0::2] = signal.samples.real
    body[1::2] = signal.samples.imag
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, signal.sample_rate))
        fh.write(body.tobytes())


def read_csig(path) -> ComplexSignal:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise DomainError(f"{path}: truncated CSIG header")
    magic, version, rate = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise DomainError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise DomainError(f"{path}: unsupported CSIG version {version}")
    payload = raw[_HEADER.size:]
    if len(payload) % 16:
        raise DomainError(f"{path}: payload is not a whole number of complex samples")
    body = np.frombuffer(payload, dtype="<f8")
    return ComplexSignal(body[0::2] + 1j * body[1::2], rate)


def write_signal_csv(signal: ComplexSignal, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "re", "im"])
        for i, z in enumerate(signal.samples):
            w.writerow([i, format(z.real, ".17g"), format(z.imag, ".17g")])


def read_signal_csv(path, sample_rate) -> ComplexSignal:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["index", "re", "im"]:
            raise DomainError(f"{path}: expected header index,re,im, got {header}")
        rows = [(float(r[1]), float(r[2])) for r in reader]
    arr = np.array(rows, dtype=float).reshape(-1, 2)
    return ComplexSignal(arr[:, 0] + 1j * arr[:, 1], sample_rate)


def write_signal(signal, path):
    """Write by extension: ``.csv`` for CSV, anything else CSIG."""
    if str(path).lower().endswith(".csv"):
        write_signal_csv(signal, path)
    else:
        write_csig(signal, path)


def read_signal(path, sample_rate=None):
    if str(path).lower().endswith(".csv"):
        if sample_rate is None:
            raise DomainError("CSV signals need an explicit sample rate")
        return read_signal_csv(path, sample_rate)
    return read_csig(path)
