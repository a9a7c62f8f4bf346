"""Mutual information per user against SNR, next to the Shannon bound."""
import numpy as np

from wic1.experiments import sweep_snr

grid = np.arange(0.0, 51.0, 5.0)
print(f"{'SNR':>5} {'I1':>7} {'I2':>7} {'sum':>7} {'C':>7}")
for r in sweep_snr(grid, 20_000, seed=3):
    print(f"{r.snr_db:5.1f} {r.info[0]:7.4f} {r.info[1]:7.4f} {r.sum_info:7.4f} {r.capacity:7.4f}")
