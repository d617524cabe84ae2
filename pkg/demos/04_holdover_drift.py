"""Receiver holdover with a drifting oscillator, experimental-style setup.

After GNSS loss the receiver clock runs fast by 1e-7. One chirp per second
is demodulated; D moves opposite to the clock error and the frozen TOF
estimate turns it back into a correction.
"""

import dataclasses
import math

from chirptime import load_scenario, run_scenario

cfg = dataclasses.replace(load_scenario("experimental"), receiver_drift=1e-7, n_cal=50, n_impl=100)
delta = cfg.chirp.fine_step
st = run_scenario(cfg, (math.inf, 2.0, None))

impl = [r for r in st.records if r.stage == "implementation"]
print(f"delta={delta * 1e9:.3f} ns, TOF-bar={impl[0].tof_bar:g} steps")
print(f"{'t [s]':>6} {'raw error [us]':>15} {'D':>6} {'T [steps]':>10} {'corrected [ns]':>15}")
for r in impl[::10] + [impl[-1]]:
    t = r.chirp_idx - cfg.n_cal + 1
    print(f"{t:6d} {r.true_offset_s * 1e6:15.3f} {r.d_index:6d} {r.t_offset_fine:10g} {r.timing_error_s * 1e9:15.2f}")
