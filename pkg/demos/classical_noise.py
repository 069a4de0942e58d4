"""Additive-noise baseline: a classical channel with non-Gaussian noise.

The capacity gap to the Gaussian channel of equal noise variance is at most
the relative entropy of the noise to its Gaussian counterpart.
"""

from ngchannels import classical_capacity_gaussian, delta_classical, mutual_information_gaussian_input
from ngchannels.classical_baseline import laplace_noise, uniform_noise

for name, noise in [("uniform", uniform_noise(1.0)), ("laplace", laplace_noise(1.0))]:
    d = delta_classical(noise)
    print(f"{name}: D(N||N_G) = {d:.5f}")
    for energy in (0.5, 2.0, 8.0):
        cg = classical_capacity_gaussian(energy)
        mi = mutual_information_gaussian_input(noise, energy)
        print(f"  E={energy:4.1f}  C_G={cg:.5f}  I_gauss_in={mi:.5f}  C_G+D={cg + d:.5f}")
