"""One-shot capacity estimates for the (2,2) retrocorrectable channel.

The unassisted one-shot Holevo capacity works out to
1 + (pi^2/18 - 5/6)/ln 2 = 0.58880 bits, and the one-shot coherent
information to 0.4262 qubits.  Both are averages of two-pure-state mixture
entropies over the channel's random flags, so a seeded Monte Carlo with the
closed-form eigenvalues reproduces them in seconds.
"""

import math

import numpy as np

from echochan import coherent_info_retro_mc, holevo_retro_mc, trend_scan

target = 1 + (math.pi ** 2 / 18 - 5 / 6) / math.log(2)

print("one-shot Holevo capacity, 10^6 flag samples:")
est = holevo_retro_mc(c=2, d=2, samples=1_000_000, seed=42)
print(f"  estimate  {est.mean:.6f} +- {est.stderr:.6f}")
print(f"  exact     {target:.6f}   "
      f"({abs(est.mean - target) / est.stderr:.2f} sigma away)")

print("\none-shot coherent information, 10^6 flag samples:")
ic = coherent_info_retro_mc(c=2, d=2, samples=1_000_000, seed=43)
print(f"  estimate  {ic.mean:.6f} +- {ic.stderr:.6f}   (reported: 0.4262)")

print("\nreproducibility: same seed, same bits")
again = holevo_retro_mc(c=2, d=2, samples=1_000_000, seed=42)
print(f"  re-run identical: {again == est}")

# Growing the control dimension slightly superlinearly in d makes the
# conditional unitaries an increasingly effective randomizer, driving the
# unassisted capacity toward zero while the echo protocols keep transmitting
# log2 d qubits per use.
print("\nrandomization trend (c = d * ceil(log2 d)^3), 1000 samples per point:")
for pt in trend_scan([2, 4, 8], samples=1000, seed=44):
    print(f"  d = {pt.d:2d}, c = {pt.c:4d}:  "
          f"C_H = {pt.estimate.mean:.4f} +- {pt.estimate.stderr:.4f}"
          f"   (log2 d = {np.log2(pt.d):.0f})")
