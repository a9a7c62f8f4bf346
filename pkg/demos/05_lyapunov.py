"""Exponent spectra: maps, hybrid flow and its inverse, and a fast Rossler block."""
import math

import numpy as np

from wic1.lyapunov import le_continuous_hybrid, le_map_1d, le_qr, le_rossler_pair
from wic1.maps import shift_map
from wic1.oscillator import OscParams

for k in (1, 2):
    spec = le_map_1d(lambda u: (shift_map(u, k)[0], 2.0**k), 0.3)
    print(f"shift map k={k}: {spec.to_bits().exponents[0]:.6f} bits/period")

J = np.broadcast_to(np.array([[4.0, -0.4], [0.0, 2.0]]), (1000, 2, 2))
print("received map:", le_qr(J).to_bits().exponents)

for f in (1.0, 2.0):
    p = OscParams(math.log(2), f)
    print(f"f={f}: forward {le_continuous_hybrid(p).exponents}, "
          f"inverse {le_continuous_hybrid(p, inverse=True).exponents}")

base, fast = le_rossler_pair(Q=2.0, n_steps=200_000)
print("rossler base", np.round(base.exponents, 4), " Q=2", np.round(fast.exponents, 4))
