"""Late direct path and a periodic interferer."""
import math

from wic1.experiments import dispersion_experiment, interference_experiment

for delay in (0.0, 0.125, 0.25):
    for snr in (None, 20.0):
        run = dispersion_experiment(1000, seed=5, extra_delay=delay, snr_db=snr)
        print(f"delay={delay:5.3f} snr={snr}: K0={run.K0:+.4f} errors={run.errors} "
              f"ambiguous={int(run.ambiguous.sum())}")

for A, phi in ((0.3, 1.0), (0.5, -0.7)):
    run = interference_experiment(A, phi, n_le=20_000)
    print(f"A={A} phi={phi}: c={run.c:+.5f} exponent={run.le:.6f} (ln2={math.log(2):.6f}) "
          f"offsets={[round(o, 8) for o in run.offsets]} expected={run.expected_offset:+.8f}")
