"""Capacity brackets for Fock-environment attenuators.

For each environment photon number the interval width is the gap between the
Gaussian-equivalent minimum output entropy and the vacuum output entropy.
The coherent-ensemble Holevo value is shown as an achievable rate.
"""

import numpy as np

from ngchannels import capacity_interval, delta_max, fock_attenuator, holevo_coherent_ensemble

print("width of the interval versus transmittance")
print(" eta   n=1     n=2     n=3")
for eta in np.linspace(0.1, 0.9, 9):
    widths = [delta_max(fock_attenuator(eta, n)).value for n in (1, 2, 3)]
    print(f"{eta:4.1f}  " + "  ".join(f"{w:.4f}" for w in widths))

ch = fock_attenuator(0.5, 1)
print("\neta=1/2, one environment photon")
print("  nu   C_G      upper    Holevo")
for nu in (1.0, 2.0, 5.0):
    iv = capacity_interval(ch, nu)
    chi = holevo_coherent_ensemble(ch, nu)
    print(f"{nu:4.1f}  {iv.c_gaussian:.5f}  {iv.upper:.5f}  {chi.value:.5f}")
