"""Chirp generation and dechirp/FFT demodulation.

Symbols follow the LoRa discrete chirp law

    w_k[n] = sqrt(Es / N) * exp(j*2*pi * ((k + n) mod N) * n / N),  N = 2**SF

Two properties of this law shape the fine-timing profile:

* At integer ``n`` the phase reduces to ``(n**2 + k*n) / N``, so dechirping
  with ``exp(-j*2*pi*n**2/N)`` leaves a pure tone in DFT bin ``k``.
* The base chirp ``w_0`` repeats every ``N/2`` samples (for SF >= 2), which
  means a delay of ``q`` base samples appears in DFT bin ``-2q mod N`` and
  lags are only resolvable modulo half a chirp.

All timing work happens on a grid at ``s * B`` samples per second, so one
sample is one fine step ``delta = T / s``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NoSignalError

PROFILE_CONVENTION = "index 0 = reference line (zero lag); index grows with delay"


@dataclass(frozen=True)
class ChirpParams:
    """CSS constants plus the quantities derived from them.

    Parameters
    ----------
    spreading_factor : int
        SF, 1..16. The base chirp has ``2**SF`` samples.
    bandwidth : float
        LoRa bandwidth B in Hz; the base sampling period is ``1/B``.
    oversampling : int
        Number of fine shifts ``s`` per base period.
    symbol_energy : float
        Es, total energy of one symbol.
    carrier_frequency : float
        Passband carrier in Hz, 0 for baseband.
    """

    spreading_factor: int
    bandwidth: float
    oversampling: int = 1
    symbol_energy: float = 1.0
    carrier_frequency: float = 0.0

    def __post_init__(self):
        if int(self.spreading_factor) != self.spreading_factor or not 1 <= self.spreading_factor <= 16:
            raise DomainError(f"spreading factor must be an integer in [1, 16], got {self.spreading_factor}")
        if not self.bandwidth > 0 or not np.isfinite(self.bandwidth):
            raise DomainError(f"bandwidth must be positive, got {self.bandwidth}")
        if int(self.oversampling) != self.oversampling or self.oversampling < 1:
            raise DomainError(f"oversampling must be an integer >= 1, got {self.oversampling}")
        if not self.symbol_energy > 0:
            raise DomainError(f"symbol energy must be positive, got {self.symbol_energy}")
        if not self.carrier_frequency >= 0:
            raise DomainError(f"carrier frequency must be >= 0, got {self.carrier_frequency}")
        object.__setattr__(self, "spreading_factor", int(self.spreading_factor))
        object.__setattr__(self, "oversampling", int(self.oversampling))

    @property
    def base_length(self) -> int:
        return 2 ** self.spreading_factor

    @property
    def base_period(self) -> float:
        return 1.0 / self.bandwidth

    @property
    def fine_step(self) -> float:
        """Timing resolution ``T / s`` in seconds."""
        return 1.0 / (self.oversampling * self.bandwidth)

    @property
    def chirp_duration(self) -> float:
        return self.base_length / self.bandwidth

    @property
    def fine_length(self) -> int:
        return self.oversampling * self.base_length

    @property
    def fine_rate(self) -> float:
        return self.oversampling * self.bandwidth

    @property
    def lag_period(self) -> int:
        """Number of fine steps after which the correlation profile repeats."""
        if self.spreading_factor >= 2:
            return self.fine_length // 2
        return self.fine_length


def _readonly(a):
    a = np.array(a, dtype=np.complex128)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ComplexSignal:
    """Sampled complex waveform with its sample rate in Hz."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        samples = _readonly(np.atleast_1d(self.samples))
        if samples.ndim != 1:
            raise DomainError("samples must be one-dimensional")
        if not self.sample_rate > 0 or not np.isfinite(self.sample_rate):
            raise DomainError(f"sample rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(samples)):
            raise DomainError("samples contain NaN or Inf")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))

    def __len__(self):
        return self.samples.size

    @property
    def energy(self) -> float:
        return float(np.vdot(self.samples, self.samples).real)

    @property
    def power(self) -> float:
        if len(self) == 0:
            return 0.0
        return self.energy / len(self)

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate


@dataclass(frozen=True)
class CorrelationProfile:
    """Fine correlation magnitudes ``c``; entry ``p`` is the lag ``p * resolution``."""

    magnitudes: np.ndarray
    resolution: float
    convention: str = field(default=PROFILE_CONVENTION, compare=False)

    def __post_init__(self):
        mags = np.array(self.magnitudes, dtype=np.float64)
        if mags.ndim != 1 or mags.size == 0:
            raise DomainError("profile must be a non-empty 1-D array")
        if np.any(mags < 0) or not np.all(np.isfinite(mags)):
            raise DomainError("profile magnitudes must be finite and non-negative")
        mags.flags.writeable = False
        object.__setattr__(self, "magnitudes", mags)

    def __len__(self):
        return self.magnitudes.size

    def lag_seconds(self, index):
        return index * self.resolution


@dataclass(frozen=True)
class DemodResult:
    peak_index: int
    peak_magnitude: float
    profile: CorrelationProfile

    @property
    def delay(self) -> float:
        return self.peak_index * self.profile.resolution


def _check_rate(rate_multiplier):
    if int(rate_multiplier) != rate_multiplier or rate_multiplier < 1:
        raise DomainError(f"rate multiplier must be an integer >= 1, got {rate_multiplier}")
    return int(rate_multiplier)


def _chirp_phase(N, k, m):
    """Phase in turns of ``((k + n') mod N) * n' / N`` at ``n' = n/m``, reduced mod 1.

    Integer arithmetic keeps the reduction exact:
    ``((k*m + n) mod (N*m)) * n / (m*m*N)``.
    """
    n = np.arange(m * N, dtype=np.int64)
    num = ((k * m + n) % (N * m)) * n
    den = m * m * N
    return (num % den) / den


def make_symbol(params: ChirpParams, k: int = 0, rate_multiplier: int = 1) -> ComplexSignal:
    """Chirp symbol ``k`` sampled ``rate_multiplier`` times per base period.

    The result has ``m*N`` samples at ``m*B`` Hz and total energy Es.
    """
    m = _check_rate(rate_multiplier)
    N = params.base_length
    if int(k) != k or not 0 <= k < N:
        raise DomainError(f"symbol index must be in [0, {N}), got {k}")
    amp = np.sqrt(params.symbol_energy / (m * N))
    samples = amp * np.exp(2j * np.pi * _chirp_phase(N, int(k), m))
    return ComplexSignal(samples, m * params.bandwidth)


def make_downchirp(params: ChirpParams, rate_multiplier: int = 1) -> ComplexSignal:
    """Unit-amplitude conjugate of the base chirp, ``exp(-j*2*pi*n'**2/N)``."""
    m = _check_rate(rate_multiplier)
    N = params.base_length
    samples = np.exp(-2j * np.pi * _chirp_phase(N, 0, m))
    return ComplexSignal(samples, m * params.bandwidth)


def _mix(signal, f_c, sign):
    if f_c < 0:
        raise DomainError(f"carrier must be >= 0, got {f_c}")
    if f_c >= signal.sample_rate / 2:
        raise DomainError(f"carrier {f_c} Hz is not below Nyquist ({signal.sample_rate / 2} Hz)")
    if f_c == 0:
        return signal
    n = np.arange(len(signal))
    turns = np.mod(f_c * n / signal.sample_rate, 1.0)
    return ComplexSignal(signal.samples * np.exp(sign * 2j * np.pi * turns), signal.sample_rate)


def upconvert(signal: ComplexSignal, f_c: float) -> ComplexSignal:
    return _mix(signal, f_c, +1)


def downconvert(signal: ComplexSignal, f_c: float) -> ComplexSignal:
    return _mix(signal, f_c, -1)


def dechirp(rx_window: ComplexSignal, downchirp: ComplexSignal) -> ComplexSignal:
    if len(rx_window) != len(downchirp):
        raise DomainError(f"length mismatch: window {len(rx_window)} vs downchirp {len(downchirp)}")
    if not np.isclose(rx_window.sample_rate, downchirp.sample_rate, rtol=1e-12, atol=0):
        raise DomainError("sample rates of window and downchirp differ")
    return ComplexSignal(rx_window.samples * downchirp.samples, rx_window.sample_rate)


def correlate_window(dechirped: ComplexSignal, params: ChirpParams) -> np.ndarray:
    """``|y(i)|`` for all N base-spaced symbols via one FFT.

    The basis is normalised to unit energy, so a clean aligned symbol peaks
    at ``sqrt(Es)``.
    """
    N = params.base_length
    if len(dechirped) != N:
        raise DomainError(f"expected {N} samples, got {len(dechirped)}")
    return np.abs(np.fft.fft(dechirped.samples)) / np.sqrt(N)


def _fine_window(rx, params, window_start):
    if not np.isclose(rx.sample_rate, params.fine_rate, rtol=1e-9, atol=0):
        raise DomainError(f"signal must be sampled at s*B = {params.fine_rate} Hz, got {rx.sample_rate}")
    L = params.fine_length
    if int(window_start) != window_start or window_start < 0:
        raise DomainError(f"window start must be a non-negative integer, got {window_start}")
    window_start = int(window_start)
    if len(rx) - window_start < L:
        raise DomainError(
            f"need {L} samples from index {window_start}, only {max(len(rx) - window_start, 0)} available"
        )
    # z[h, n] = rx[window_start + h + s*n]
    return rx.samples[window_start:window_start + L].reshape(params.base_length, params.oversampling).T


def fine_demod(rx: ComplexSignal, params: ChirpParams, window_start: int = 0) -> CorrelationProfile:
    """Fine-resolution correlation profile by ``s`` dechirp->FFT passes.

    Pass ``h`` decimates the window at offset ``h`` fine steps. Profile
    entry ``p = q*s + h`` is the correlation at lag ``p`` fine steps, read
    from DFT bin ``-2q mod N`` of pass ``h``.
    """
    z = _fine_window(rx, params, window_start)
    N = params.base_length
    down = make_downchirp(params).samples
    spectra = np.fft.fft(z * down, axis=1)
    bins = (-2 * np.arange(N)) % N
    mags = np.abs(spectra[:, bins]) / np.sqrt(N)
    return CorrelationProfile(mags.T.reshape(-1), params.fine_step)


def brute_force_profile(rx: ComplexSignal, params: ChirpParams, window_start: int = 0) -> CorrelationProfile:
    """Direct inner products against every chirp lag; O(s*N*N) reference."""
    z = _fine_window(rx, params, window_start)
    N = params.base_length
    n = np.arange(N)
    u = np.exp(2j * np.pi * ((n * n) % N) / N)
    # row q is the base chirp delayed by q base samples
    shifted = u[(n[None, :] - n[:, None]) % N]
    mags = np.abs(z @ shifted.conj().T) / np.sqrt(N)
    return CorrelationProfile(mags.T.reshape(-1), params.fine_step)


def detect_peak(profile: CorrelationProfile, mode: str = "global_max", rho: float = 0.5) -> DemodResult:
    """Pick the demodulation index from a profile.

    ``global_max`` returns the smallest index attaining the maximum.
    ``first_arrival`` finds the smallest index with magnitude >= ``rho * max``
    and climbs to the top of that lobe, so the earliest strong path wins
    over later, stronger echoes without biasing onto the lobe's flank.
    """
    mags = profile.magnitudes
    top = mags.max()
    if top <= 0:
        raise NoSignalError("profile is identically zero")
    if mode == "global_max":
        idx = int(np.argmax(mags))
    elif mode == "first_arrival":
        if not 0 < rho <= 1:
            raise DomainError(f"rho must be in (0, 1], got {rho}")
        idx = int(np.flatnonzero(mags >= rho * top)[0])
        while idx + 1 < mags.size and mags[idx + 1] > mags[idx]:
            idx += 1
    else:
        raise DomainError(f"unknown peak mode {mode!r}")
    return DemodResult(idx, float(mags[idx]), profile)
