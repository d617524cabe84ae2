"""A reduced desk-scale sweep over SNR and alpha, with and without clipping.

Writes chirps.csv and aggregates.csv to ./desk_sweep_out. The full bundled
scenario is ``chirptime sweep --config desk_default``.
"""

import dataclasses
import sys

from chirptime import load_scenario, sweep, write_csv

cfg = dataclasses.replace(
    load_scenario("desk_default"),
    snr_d_list=(-10.0, 0.0),
    alpha_list=(2.0, 1.6),
    m_list=(None, 4.0),
    n_cal=100,
    n_impl=50,
)
jobs = int(sys.argv[1]) if len(sys.argv) > 1 else 1
stats = sweep(cfg, jobs)
for s in stats:
    c, a = s.condition, s.aggregates
    print(f"SNR_D={c.snr_d_db:5.1f} dB  alpha={c.alpha:.1f}  M={c.m}  "
          f"std={a['std_s'] * 1e9:9.0f} ns  p95={a['p95_s'] * 1e9:9.0f} ns")
print("wrote", *write_csv(stats, "desk_sweep_out"))
