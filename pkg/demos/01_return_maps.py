"""Sample the free-running oscillator once per period and compare with the shift maps."""
import numpy as np

from wic1.experiments import flow_return_map

for k in (1, 2):
    u, u_next = flow_return_map(k, 100)
    dev = np.abs(u_next - np.mod(2**k * u, 1.0))
    print(f"k={k}: {u.size} pairs, max |u_next - 2^k u mod 1| = {dev.max():.2e}")
    for a, b in list(zip(u, u_next))[:5]:
        print(f"   {a:.6f} -> {b:.6f}")
