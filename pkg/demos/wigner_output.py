"""Wigner functions of the three-fold environment and of a channel output."""

import numpy as np

from ngchannels import Environment, FockState, apply, attenuator, wigner

env = FockState.normalized(np.array([1, 0, 0, 1], dtype=complex))
grid = wigner(env.dm(), resolution=81)
print(f"environment: min W = {grid.values.min():.4f}, integral = {grid.integral():.6f}")

ch = attenuator(0.5, Environment.pure(env))
out = apply(ch, FockState.normalized(np.array([1.0 + 0j])).dm())
grid = wigner(out, resolution=81)
print(f"vacuum output: min W = {grid.values.min():.4f}, integral = {grid.integral():.6f}")

with open("wigner_output.csv", "w") as fh:
    fh.write(grid.to_csv())
print("grid written to wigner_output.csv")
