"""Recover symbols from the waveform with the time-reversed oscillator."""
import numpy as np

from wic1.experiments import matched_filter_experiment

for snr in (30.0, 20.0, 10.0, 5.0):
    run = matched_filter_experiment(300, seed=4, snr_db=snr)
    print(f"snr={snr:4.1f} dB  clean match {run.clean_rate:.3f}  noisy match {run.noisy_rate:.3f}")

run = matched_filter_experiment(60, seed=4)
ns = round(1.0 / run.traj.dt)
n = np.arange(10, 20)
print("eta at clock:", np.round(run.clean.eta[n * ns], 3))
print("sent signs  :", run.signs[n])
