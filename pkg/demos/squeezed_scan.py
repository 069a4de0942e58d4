"""Rotated squeezed vacua through the (|0>+|3>)/sqrt2, eta=1/2 attenuator.

The environment is invariant under rotation by 2pi/3, so the entropy table
repeats every pi/3 in the angle.
"""

import numpy as np

from ngchannels import Environment, attenuator, squeezed_state_scan

env = np.zeros(4)
env[[0, 3]] = 1 / np.sqrt(2)
ch = attenuator(0.5, Environment.pure(env))

res = squeezed_state_scan(ch, np.linspace(0, np.pi / 3, 13), np.linspace(0, 1, 21))
print(f"argmin theta = {res.theta_min:.4f}, r = {res.r_min:.5f}, S = {res.s_min:.7f}")
print(f"table period in theta = {res.theta_period:.4f}")
for note in res.notes:
    print("note:", note)

print("\nS(r) at the argmin angle")
row = res.table[int(np.argmin(res.table.min(axis=1)))]
for r, s in zip(res.rs[::4], row[::4]):
    print(f"  r={r:.2f}  S={s:.5f}")
