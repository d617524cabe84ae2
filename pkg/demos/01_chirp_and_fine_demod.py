"""Generate a chirp, delay it by a few fine steps and read the delay back.

The receiver dechirps s decimated phases of the oversampled window and
stitches their spectra into one profile with s times finer lag spacing.
"""

import numpy as np

from chirptime import ChirpParams, ComplexSignal, brute_force_profile, detect_peak, fine_demod, make_symbol

p = ChirpParams(spreading_factor=10, bandwidth=327_680.0, oversampling=32)
print(f"N={p.base_length}  s={p.oversampling}  chirp={p.chirp_duration * 1e3:.3f} ms  "
      f"delta={p.fine_step * 1e9:.3f} ns  lag period={p.lag_period} steps")

L = p.fine_length
tx = np.tile(make_symbol(p, 0, p.oversampling).samples, 3)

for delay in (0, 3, 1234, p.lag_period - 1):
    rx = ComplexSignal(tx[L - delay:2 * L - delay], p.fine_rate)
    res = detect_peak(fine_demod(rx, p))
    print(f"injected {delay:6d} steps -> D={res.peak_index:6d}  |peak|={res.peak_magnitude:.6f}")

# the base chirp repeats every N/2 samples, so lags a half chirp apart alias
rx = ComplexSignal(tx[L - (p.lag_period + 7):2 * L - (p.lag_period + 7)], p.fine_rate)
print(f"injected {p.lag_period + 7} steps -> D={detect_peak(fine_demod(rx, p)).peak_index} (wraps by the lag period)")

# the FFT path against a direct bank of inner products, on a small case
q = ChirpParams(6, 1e3, 4)
rng = np.random.default_rng(1)
x = ComplexSignal(rng.normal(size=q.fine_length) + 1j * rng.normal(size=q.fine_length), q.fine_rate)
fast, slow = fine_demod(x, q).magnitudes, brute_force_profile(x, q).magnitudes
print(f"fft vs brute force, random input: max rel diff {np.max(np.abs(fast - slow)) / np.max(slow):.1e}")
