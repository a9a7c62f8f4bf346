"""Two users on one channel: superpose, add noise, split the received map into 8 branches."""
import numpy as np

from wic1.channel import add_noise
from wic1.coding import offset_bands, plan_gains
from wic1.decoder import PartitionSpec, decode_stream
from wic1.experiments import two_user_stream

gains = plan_gains(2).gains
print("gains", gains)
print("bands", [(round(lo, 3), round(hi, 3)) for lo, hi in offset_bands(gains)])

link = two_user_stream(20_000, seed=1, gains=gains)
spec = PartitionSpec(gains)
print("thresholds", spec.thresholds)
for snr in (None, 30.0, 20.0):
    rx = link.O if snr is None else add_noise(link.O, snr, seed=1)
    res = decode_stream(rx, spec).score(link.b1, link.b2)
    print(f"snr={snr}: user-1 errors {res.err1.sum()}, user-2 errors {res.err2.sum()}, "
          f"branches used {np.unique(res.j).size}")
