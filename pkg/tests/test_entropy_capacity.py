import numpy as np
import pytest
from conftest import random_density
from hypothesis import given
from hypothesis import strategies as st
from oracles import (
    FROZEN,
    attenuator_output,
    g_mp,
    holevo_fock_transition_oracle,
    holevo_thermal_oracle,
    thermal_dm,
    vn_entropy,
)

from ngchannels.channels import Environment, amplifier, attenuator, fock_attenuator, gaussian_output_noise
from ngchannels.entropy_capacity import (
    capacity_gaussian,
    capacity_interval,
    delta_max,
    entropy_of_spectrum,
    g_function,
    holevo_coherent_ensemble,
    holevo_coherent_monte_carlo,
    relative_entropy,
    s_min_gaussian,
    vacuum_output_entropy,
    von_neumann_entropy,
)
from ngchannels.errors import DomainError, InvalidStateError
from ngchannels.fock_core import DensityOperator, FockState, make_fock, make_thermal
from ngchannels.gaussian_unitaries import displacement, squeezing

seeds = st.integers(0, 2**32 - 1)


def env03():
    return Environment.pure(FockState.normalized([1, 0, 0, 1]))


def twirled(rng, d):
    m = random_density(rng, d, rank=int(rng.integers(1, d + 1)))
    n = np.arange(d)
    return DensityOperator(np.where((n[:, None] - n[None, :]) % 3 == 0, m, 0))


def test_entropy_examples():
    assert von_neumann_entropy(make_fock(3, 5).dm()) < 1e-9
    assert abs(von_neumann_entropy(DensityOperator(np.diag([0.5, 0.5]).astype(complex))) - np.log(2)) < 1e-12
    assert abs(von_neumann_entropy(make_thermal(1.0, 80)) - FROZEN["g1"]) < 1e-6
    with pytest.raises(DomainError):
        entropy_of_spectrum([1.1, -0.1])
    with pytest.raises(InvalidStateError):
        DensityOperator(np.diag([1.1, -0.1]).astype(complex))


def test_g_function_examples():
    assert g_function(0.0) == 0.0
    assert abs(g_function(1.0) - FROZEN["g1"]) < 1e-12
    assert abs(g_function(0.5) - FROZEN["g_half"]) < 1e-12
    with pytest.raises(DomainError):
        g_function(-0.1)
    assert abs(g_function(1e3) - np.log(1e3) - 1) < 1e-3


@given(st.floats(0, 1e4), st.floats(1e-6, 10))
def test_g_function_increasing(x, step):
    assert g_function(x + step) > g_function(x)


def test_relative_entropy_examples():
    rho = make_thermal(0.4, 30)
    assert abs(relative_entropy(rho, rho)) < 1e-10
    d = relative_entropy(make_fock(1, 200).dm(), make_thermal(1.0, 200))
    assert abs(d - FROZEN["g1"]) < 1e-4
    assert relative_entropy(make_fock(0, 1).dm(), make_fock(1, 1).dm()) == float("inf")


@given(seeds)
def test_relative_entropy_is_entropy_gap_for_matched_moments(seed):
    rng = np.random.default_rng(seed)
    rho = twirled(rng, int(rng.integers(2, 8)))
    nbar = rho.mean_photon_number()
    sigma = make_thermal(nbar, 400)
    want = g_function(nbar) - von_neumann_entropy(rho)
    assert abs(relative_entropy(rho, sigma) - want) < 1e-6


@given(seeds)
def test_entropy_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    small = random_density(rng, 3)
    c = 40
    rho = np.zeros((c + 1, c + 1), dtype=complex)
    rho[:3, :3] = small
    u = squeezing(rng.uniform(-0.3, 0.3), c).matrix @ displacement(rng.uniform(-0.5, 0.5), c).matrix
    out = DensityOperator.from_matrix(u @ rho @ u.conj().T)
    assert abs(von_neumann_entropy(out) - von_neumann_entropy(DensityOperator(small))) < 1e-9


def test_capacity_gaussian_examples():
    assert abs(capacity_gaussian(0.5, 1.0, 2.0) - FROZEN["cap_half_1_2"]) < 1e-9
    assert capacity_gaussian(0.3, 0.7, 0.0) == 0.0
    assert abs(capacity_gaussian(1.0, 0.0, 1.0) - FROZEN["g1"]) < 1e-12
    with pytest.raises(DomainError):
        capacity_gaussian(0.5, -1.0, 1.0)


def test_output_noise_convention():
    assert gaussian_output_noise(fock_attenuator(0.5, 1)) == pytest.approx(0.5)
    assert gaussian_output_noise(amplifier(2.0, Environment.fock(1))) == pytest.approx(2.0)


def test_s_min_gaussian_examples():
    ch = fock_attenuator(0.5, 1)
    assert abs(s_min_gaussian(ch) - FROZEN["g_half"]) < 1e-12
    assert s_min_gaussian(fock_attenuator(1.0, 1)) == 0.0
    assert abs(s_min_gaussian(fock_attenuator(0.0, 1)) - FROZEN["g1"]) < 1e-12
    th = attenuator(0.5, Environment.thermal(1.0))
    assert abs(vacuum_output_entropy(th) - s_min_gaussian(th)) < 1e-5


def test_delta_max_examples():
    d = delta_max(fock_attenuator(0.5, 1))
    assert d.mode == "vacuum" and abs(d.value - FROZEN["delta_fock1_half"]) < 1e-10
    assert abs(delta_max(attenuator(0.3, Environment.thermal(1.0))).value) < 1e-6
    d = delta_max(attenuator(0.5, env03()), 0.872)
    assert d.mode == "search" and abs(d.value - FROZEN["delta_03_search_0872"]) < 1e-10


def test_vacuum_output_matches_oracle():
    env = np.zeros((4, 4), dtype=complex)
    env[0, 0] = env[3, 3] = env[0, 3] = env[3, 0] = 0.5
    vac = np.ones((1, 1), dtype=complex)
    ref = vn_entropy(attenuator_output(0.5, vac, env))
    assert abs(vacuum_output_entropy(attenuator(0.5, env03())) - ref) < 1e-12


@given(seeds)
def test_delta_max_nonnegative(seed):
    rng = np.random.default_rng(seed)
    env = Environment.mixed(twirled(rng, int(rng.integers(2, 9))))
    ch = attenuator(rng.uniform(0, 1), env)
    assert delta_max(ch).value >= -1e-8


def test_capacity_interval_examples():
    ch = fock_attenuator(0.5, 1)
    iv0 = capacity_interval(ch, 0.0)
    assert iv0.c_gaussian == 0 and iv0.upper == pytest.approx(FROZEN["delta_fock1_half"])
    iv = capacity_interval(ch, 2.0)
    assert abs(iv.c_gaussian - FROZEN["cap_fock1_half_nu2"]) < 1e-9
    assert iv.upper == iv.c_gaussian + iv.delta
    th = capacity_interval(attenuator(0.5, Environment.thermal(1.0)), 2.0)
    assert abs(th.upper - th.c_gaussian) < 1e-6
    assert capacity_interval(ch, 0.01).loose and not iv.loose


def test_capacity_interval_monotone():
    ch = fock_attenuator(0.3, 2)
    vals = [capacity_interval(ch, nu).c_gaussian for nu in np.linspace(0, 10, 41)]
    assert np.all(np.diff(vals) >= 0)


def test_holevo_zero_budget():
    assert holevo_coherent_ensemble(fock_attenuator(0.5, 1), 0.0).value == 0.0


def test_holevo_attains_gaussian_capacity():
    ch = attenuator(0.5, Environment.thermal(1.0))
    chi = holevo_coherent_ensemble(ch, 2.0).value
    cg = capacity_interval(ch, 2.0).c_gaussian
    assert abs(chi - cg) <= 0.02 * cg


@pytest.mark.parametrize("nu,key", [(1.0, "holevo_fock1_half_nu1"), (2.0, "holevo_fock1_half_nu2")])
def test_holevo_against_thermal_oracle(nu, key):
    ch = fock_attenuator(0.5, 1)
    est = holevo_coherent_ensemble(ch, nu)
    assert abs(est.value - FROZEN[key]) < 1e-3
    iv = capacity_interval(ch, nu)
    assert iv.c_gaussian - 1e-3 <= est.value <= iv.upper + 1e-3


def test_holevo_oracles_recompute():
    assert abs(holevo_thermal_oracle(0.5, 1, 1.0, d=30) - FROZEN["holevo_fock1_half_nu1"]) < 1e-5
    assert abs(holevo_fock_transition_oracle(0.5, 1, 1.0, kmax=60) - FROZEN["holevo_fock1_half_nu1"]) < 1e-9


def test_holevo_non_covariant_channel_inside_interval():
    ch = attenuator(0.5, env03())
    est = holevo_coherent_ensemble(ch, 1.0)
    iv = capacity_interval(ch, 1.0)
    assert iv.c_gaussian - 1e-3 <= est.value <= iv.upper + 1e-3


def test_holevo_monte_carlo_consistent():
    ch = fock_attenuator(0.5, 1)
    est = holevo_coherent_monte_carlo(ch, 1.0, 400, np.random.default_rng(1))
    assert abs(est.value - FROZEN["holevo_fock1_half_nu1"]) < 0.05
    assert est.error > 0


def test_amplifier_capacity_against_holevo():
    ch = amplifier(1.25, Environment.fock(0))
    noise = gaussian_output_noise(ch)
    chi = holevo_coherent_ensemble(ch, 0.5).value
    assert abs(chi - capacity_gaussian(1.25, noise, 0.5)) < 2e-3


def test_thermal_dm_oracle_matches_library():
    assert np.allclose(make_thermal(0.8, 40).matrix, thermal_dm(0.8, 41), atol=1e-12)
    assert abs(float(g_mp(0.8)) - g_function(0.8)) < 1e-14
