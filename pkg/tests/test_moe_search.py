import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import FROZEN, squeezed_scan_entropy

from ngchannels.channels import Environment, attenuator, fock_attenuator
from ngchannels.entropy_capacity import vacuum_output_entropy
from ngchannels.errors import DomainError, TruncationError
from ngchannels.fock_core import FockState, make_coherent, make_fock
from ngchannels.moe_search import (
    MoeParams,
    Symmetry,
    coherent_fidelity,
    environment_symmetries,
    haar_random_state,
    haar_unitary,
    minimize_output_entropy,
    minimize_symmetric,
    output_entropy,
    recenter,
    squeezed_state_scan,
    symmetry_residuals,
)

SMALL = MoeParams(n_fock=10, n_init=20, n_loop=8, n_it=60, seed=7)


def channel03(eta=0.5):
    return attenuator(eta, Environment.pure(FockState.normalized([1, 0, 0, 1])))


def test_params_validation():
    with pytest.raises(DomainError):
        MoeParams(n_it=0)
    with pytest.raises(DomainError):
        MoeParams(delta0=0.0)


def test_haar_state_examples():
    s = haar_random_state(7, np.random.default_rng(1))
    assert abs(np.linalg.norm(s.amplitudes) - 1) < 1e-12
    t = haar_random_state(7, np.random.default_rng(1))
    assert np.array_equal(s.amplitudes, t.amplitudes)


def test_haar_marginals_uniform():
    rng = np.random.default_rng(11)
    w = np.array([np.abs(haar_random_state(3, rng).amplitudes) ** 2 for _ in range(10_000)])
    se = w.std(axis=0, ddof=1) / np.sqrt(w.shape[0])
    assert np.all(np.abs(w.mean(axis=0) - 0.25) <= 3 * se)


def test_haar_state_law_matches_unitary_column():
    # same law: compare the distribution of |<0|psi>|^2 by a two-sample KS statistic
    from scipy.stats import ks_2samp

    rng = np.random.default_rng(5)
    a = [abs(haar_random_state(4, rng).amplitudes[0]) ** 2 for _ in range(3000)]
    b = [abs(haar_unitary(5, rng)[0, 0]) ** 2 for _ in range(3000)]
    assert ks_2samp(a, b).pvalue > 1e-3
    u = haar_unitary(6, rng)
    assert np.allclose(u.conj().T @ u, np.eye(6), atol=1e-12)


def test_haar_state_invariant_under_fixed_unitary():
    from scipy.stats import ks_2samp

    rng = np.random.default_rng(9)
    u = haar_unitary(4, np.random.default_rng(0))
    a = [abs(haar_random_state(3, rng).amplitudes[1]) ** 2 for _ in range(3000)]
    b = [abs((u @ haar_random_state(3, rng).amplitudes)[1]) ** 2 for _ in range(3000)]
    assert ks_2samp(a, b).pvalue > 1e-3


def test_output_entropy_displacement_flat():
    ch = fock_attenuator(0.5, 1)
    s0 = output_entropy(ch, make_fock(0, 0))
    for a in (0.3, 1.0 - 0.5j, 1.7j):
        assert abs(output_entropy(ch, make_coherent(a, 40)) - s0) < 1e-8


def test_search_is_deterministic_and_monotone():
    ch = channel03()
    a = minimize_output_entropy(ch, SMALL)
    b = minimize_output_entropy(ch, SMALL)
    assert a.trace == b.trace and a.to_json() == b.to_json()
    vals = [s for _, s in a.trace]
    assert all(x > y for x, y in zip(vals, vals[1:]))
    assert abs(a.best_entropy - vals[-1]) < 1e-12
    assert abs(output_entropy(ch, a.best_state) - a.best_entropy) < 1e-10


def test_parallel_restarts_match_serial():
    ch = channel03()
    p = MoeParams(n_fock=8, n_init=5, n_loop=3, n_it=20, seed=3)
    serial = minimize_output_entropy(ch, p, restarts=2, workers=1)
    par = minimize_output_entropy(ch, p, restarts=2, workers=2)
    assert serial.restart_entropies == par.restart_entropies
    assert serial.trace == par.trace


def test_pure_loss_minimum_is_zero():
    rep = minimize_output_entropy(fock_attenuator(0.4, 0), MoeParams(n_fock=6, n_init=20, n_loop=12, n_it=100))
    assert rep.best_entropy <= 1e-3


def test_report_serialization():
    rep = minimize_output_entropy(channel03(), MoeParams(n_fock=6, n_init=5, n_loop=2, n_it=10))
    doc = json.loads(rep.to_json())
    assert doc["best_entropy"] == rep.best_entropy
    assert len(doc["best_state"]) == 7 and all(len(z) == 2 for z in doc["best_state"])
    assert doc["channel"]["eta"] == 0.5
    lines = rep.trace_csv().strip().splitlines()
    assert lines[0] == "iteration,entropy" and len(lines) == len(rep.trace) + 1


def test_symmetric_search_support_and_symmetry():
    ch = channel03()
    rep = minimize_symmetric(ch, 3, 1, SMALL)
    amps = rep.best_state.amplitudes
    assert np.all(amps[[n for n in range(amps.size) if n % 3 != 1]] == 0)
    rot = Symmetry("rotation", 2 * np.pi / 3).apply(amps)
    assert np.allclose(rot, np.exp(-2j * np.pi / 3) * amps, atol=1e-12)
    assert np.allclose(Symmetry("reflection", 0.0).apply(amps), amps)
    real = minimize_symmetric(ch, 1, 0, SMALL).best_state.amplitudes
    assert np.all(real.imag == 0)


def test_symmetric_search_errors():
    with pytest.raises(DomainError):
        minimize_symmetric(channel03(), 3, 3)
    with pytest.raises(DomainError):
        minimize_symmetric(channel03(), 0, 0)
    with pytest.raises(DomainError):
        minimize_symmetric(channel03(), 5, 4, MoeParams(n_fock=2))


def test_symmetric_and_unrestricted_searches_agree():
    ch = channel03()
    p = MoeParams(n_fock=12, n_init=30, n_loop=15, n_it=300, seed=1)
    full = minimize_output_entropy(ch, p, restarts=2)
    sym = minimize_symmetric(ch, 3, 0, p)
    assert sym.best_entropy <= full.best_entropy + 0.01
    assert sym.best_entropy >= full.best_entropy - 0.01


def test_complementary_channels_share_minimum():
    p = MoeParams(n_fock=12, n_init=30, n_loop=15, n_it=300, seed=2)
    a = minimize_symmetric(channel03(0.3), 3, 0, p).best_entropy
    b = minimize_symmetric(channel03(0.7), 3, 0, p).best_entropy
    assert abs(a - b) <= 0.01


def test_symmetry_residual_examples():
    s = FockState.normalized([1, 0, 0, 1])
    r = symmetry_residuals(s, [Symmetry("rotation", 2 * np.pi / 3)])
    assert list(r.values())[0] < 1e-12
    one = make_fock(1, 4)
    r = symmetry_residuals(one, [Symmetry("rotation", t) for t in (0.3, 1.0, 2.5)])
    assert max(r.values()) < 1e-12
    r = symmetry_residuals(FockState.normalized([1, 1]), [Symmetry("rotation", np.pi)])
    assert abs(list(r.values())[0] - np.sqrt(2)) < 1e-12


def test_environment_symmetries_of_three_fold_state():
    labels = sorted(s.label for s in environment_symmetries(channel03()))
    want = sorted(
        [Symmetry("rotation", 2 * np.pi / 3).label, Symmetry("rotation", 4 * np.pi / 3).label]
        + [Symmetry("reflection", t).label for t in (0.0, np.pi / 3, 2 * np.pi / 3)]
    )
    assert labels == want


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_recenter_and_coherent_fidelity(x, y):
    a = complex(x, y)
    s = make_coherent(a, 40)
    fid, alpha = coherent_fidelity(s)
    assert fid > 1 - 1e-9 and abs(alpha - a) < 1e-4
    c = recenter(s)
    assert abs(abs(c.amplitudes[0]) - 1) < 1e-8


def test_coherent_fidelity_of_non_gaussian_state():
    fid, _ = coherent_fidelity(make_fock(1, 5))
    assert fid < 0.4


def test_scan_r_zero_row_is_flat():
    res = squeezed_state_scan(channel03(), np.linspace(0, np.pi, 7), [0.0, 0.3], cutoff=30, refine=False)
    assert np.ptp(res.table[:, 0]) < 1e-12
    assert abs(res.table[0, 0] - vacuum_output_entropy(channel03())) < 1e-12


def test_scan_thermal_environment_prefers_vacuum():
    ch = attenuator(0.5, Environment.thermal(1.0))
    res = squeezed_state_scan(ch, np.linspace(0, np.pi, 5), np.linspace(0, 0.6, 7), cutoff=30)
    assert res.r_min < 1e-4
    assert res.notes == [] or res.theta_offsets


def test_scan_matches_oracle_and_flags_angle():
    thetas = np.linspace(0, np.pi / 3, 5)
    res = squeezed_state_scan(channel03(), thetas, np.linspace(0.4, 0.6, 5), cutoff=40)
    assert abs(res.theta_period - np.pi / 3) < 1e-12
    assert res.theta_min == FROZEN["scan03_min_theta"]
    assert abs(res.r_min - FROZEN["scan03_min_r"]) < 1e-4
    assert abs(res.s_min - FROZEN["scan03_min_entropy"]) < 1e-9
    assert res.theta_offsets["pi/3"] < 1e-12 and abs(res.theta_offsets["pi/6"] - np.pi / 6) < 1e-12
    assert any("disagree" in n for n in res.notes)
    j = 2
    ref = squeezed_scan_entropy(res.rs[j], thetas[1], d=40, keep=30)
    assert abs(res.table[1, j] - ref) < 1e-9
    rows = res.to_csv().strip().splitlines()
    assert rows[0] == "theta,r,s_out" and len(rows) == 26


def test_scan_errors():
    with pytest.raises(DomainError):
        squeezed_state_scan(channel03(), [], [0.1])
    with pytest.raises(TruncationError):
        squeezed_state_scan(channel03(), [0.0], [2.0], cutoff=20)
