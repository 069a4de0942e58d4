import numpy as np
import pytest
from conftest import random_density
from hypothesis import given
from hypothesis import strategies as st
from oracles import FROZEN, g_mp

from ngchannels.entropy_capacity import g_function, von_neumann_entropy
from ngchannels.errors import DomainError, InvalidStateError, TruncationError
from ngchannels.fock_core import (
    DensityOperator,
    FockState,
    PhaseSpaceMoments,
    check_deficit,
    clipped_eigenvalues,
    make_coherent,
    make_fock,
    make_thermal,
    moments,
    partial_trace_second,
    tensor,
    thermal_cutoff,
)


def test_make_fock_basis_vectors():
    s = make_fock(3, 10)
    assert s.cutoff == 10
    assert s.amplitudes[3] == 1 and np.count_nonzero(s.amplitudes) == 1
    assert make_fock(0, 10).amplitudes[0] == 1
    with pytest.raises(DomainError):
        make_fock(11, 10)


def test_fock_state_requires_unit_norm():
    with pytest.raises(InvalidStateError):
        FockState(np.array([1.0, 1.0]))
    s = FockState.normalized([1.0, 1.0])
    assert abs(np.linalg.norm(s.amplitudes) - 1) < 1e-12
    with pytest.raises(DomainError):
        FockState.normalized([0.0, 0.0])


def test_coherent_vacuum_amplitude():
    assert np.allclose(make_coherent(0, 10).amplitudes, make_fock(0, 10).amplitudes)
    s = make_coherent(1.0, 30)
    assert abs(s.amplitudes[0].real - FROZEN["coherent_alpha1_n0"]) < 1e-12


def test_coherent_truncation_error_and_warning():
    with pytest.raises(TruncationError):
        make_coherent(6.0, 10)
    with pytest.warns(UserWarning):
        make_coherent(2.0, 16)


def test_thermal_entropy_and_photon_number():
    rho = make_thermal(1.0, 60)
    assert abs(von_neumann_entropy(rho) - FROZEN["g1"]) < 1e-6
    assert abs(rho.mean_photon_number() - 1.0) < 1e-6
    assert np.allclose(make_thermal(0.0, 10).matrix, make_fock(0, 10).dm().matrix)


def test_thermal_cutoff_tail():
    c = thermal_cutoff(2.0, 1e-10)
    assert (2 / 3) ** (c + 1) <= 1e-10 < (2 / 3) ** c


def test_moments_examples():
    vac = moments(make_fock(0, 5))
    assert np.allclose(vac.mean, 0) and np.allclose(vac.cov, 0.5 * np.eye(2))
    th = moments(make_thermal(1.0, 80))
    assert np.allclose(th.cov, 1.5 * np.eye(2), atol=1e-10)
    s = moments(FockState.normalized([1, 0, 0, 1]))
    assert np.allclose(s.mean, 0)
    assert np.allclose(s.cov, s.cov[0, 0] * np.eye(2))
    assert abs(np.trace(s.cov) - (1 + 2 * 1.5)) < 1e-12


def test_coherent_moments():
    a = 0.8 - 0.3j
    m = moments(make_coherent(a, 40))
    assert np.allclose(m.mean, np.sqrt(2) * np.array([a.real, a.imag]), atol=1e-8)
    assert np.allclose(m.cov, 0.5 * np.eye(2), atol=1e-8)


def test_physicality_check():
    assert PhaseSpaceMoments([0, 0], 0.5 * np.eye(2)).is_physical()
    assert not PhaseSpaceMoments([0, 0], 0.2 * np.eye(2)).is_physical()


def test_partial_trace_examples():
    vac = make_fock(0, 2).dm()
    assert np.allclose(partial_trace_second(tensor(vac, vac)).matrix, vac.matrix)
    psi = np.zeros(9, dtype=complex)
    psi[2 * 3 + 0], psi[0 * 3 + 2] = 1 / np.sqrt(2), -1 / np.sqrt(2)
    out = partial_trace_second(np.outer(psi, psi.conj()))
    assert np.allclose(out.matrix, np.diag([0.5, 0, 0.5]))
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(partial_trace_second(np.outer(bell, bell)).matrix, 0.5 * np.eye(2))
    with pytest.raises(DomainError):
        partial_trace_second(np.eye(6) / 6, dims=(2, 2))


def test_density_validation_and_clipping():
    with pytest.raises(InvalidStateError):
        DensityOperator(np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(InvalidStateError):
        DensityOperator(np.eye(2))
    assert clipped_eigenvalues(np.diag([1.0, -5e-11])).min() == 0.0
    with pytest.raises(InvalidStateError):
        clipped_eigenvalues(np.diag([1.0, -1e-6]))


def test_truncated_input_refused():
    rho = make_thermal(5.0, 20)
    with pytest.raises(TruncationError):
        check_deficit(rho)
    check_deficit(rho, allow_truncated=True)


@given(st.integers(0, 2**32 - 1))
def test_pure_states_have_zero_entropy(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 12))
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    s = FockState.normalized(v)
    assert abs(np.linalg.norm(s.amplitudes) - 1) < 1e-12
    assert von_neumann_entropy(s.dm()) < 1e-9


@given(st.integers(0, 2**32 - 1))
def test_gaussian_extremality(seed):
    # twirling over R_{2 pi/3} kills <a> and <a^2>, leaving cov proportional to I
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 14))
    m = random_density(rng, d, rank=int(rng.integers(1, d + 1)))
    n = np.arange(d)
    m = np.where((n[:, None] - n[None, :]) % 3 == 0, m, 0)
    rho = DensityOperator(m)
    mom = moments(rho)
    assert np.allclose(mom.mean, 0, atol=1e-12)
    assert abs(mom.cov[0, 1]) < 1e-12 and abs(mom.cov[0, 0] - mom.cov[1, 1]) < 1e-12
    nbar = rho.mean_photon_number()
    assert von_neumann_entropy(rho) <= g_function(nbar) + 1e-8


@given(st.integers(0, 2**32 - 1))
def test_partial_trace_of_product(seed):
    rng = np.random.default_rng(seed)
    d1, d2 = (int(x) for x in rng.integers(1, 6, size=2))
    r, s = random_density(rng, d1), random_density(rng, d2)
    out = partial_trace_second(np.kron(r, s), dims=(d1, d2))
    assert np.allclose(out.matrix, r, atol=1e-12)


def test_g_function_against_mpmath():
    for x in (0.0, 1e-9, 0.5, 1.0, 7.3, 1e4):
        assert abs(g_function(x) - float(g_mp(x))) < 1e-12 * max(1.0, float(g_mp(x)))
