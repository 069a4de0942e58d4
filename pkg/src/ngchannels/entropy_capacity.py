"""Entropies, Gaussian capacities and the capacity interval of non-Gaussian channels.

The interval is ``C_G <= C <= C_G + Delta`` with ``C_G`` the capacity of the
Gaussian-equivalent channel and ``Delta = S_min(M_G) - S_min(M)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_laguerre, xlogy
from scipy.stats import poisson

from .channels import (
    ChannelSpec,
    apply,
    apply_pure,
    gaussian_equivalent,
    gaussian_output_noise,
)
from .errors import DomainError, NonConvergenceError
from .fock_core import (
    NEG_EIG_TOL,
    DensityOperator,
    FockState,
    clipped_eigenvalues,
    make_coherent,
    make_fock,
)

NULL_EIG = 1e-14  # sigma eigenvalues treated as exact zeros
SUPPORT_TOL = 1e-10  # rho weight on that null space that makes D infinite
LOG_FLOOR = 1e-300

__all__ = [
    "von_neumann_entropy",
    "entropy_of_spectrum",
    "g_function",
    "relative_entropy",
    "capacity_gaussian",
    "s_min_gaussian",
    "vacuum_output_entropy",
    "DeltaMax",
    "delta_max",
    "CapacityInterval",
    "capacity_interval",
    "HolevoEstimate",
    "holevo_coherent_ensemble",
    "holevo_coherent_monte_carlo",
]


def entropy_of_spectrum(p: np.ndarray) -> float:
    """``-sum p ln p`` of a probability spectrum (entries in ``[-1e-10, 0)`` clipped)."""
    p = np.asarray(p, dtype=float)
    if p.size and p.min() < -NEG_EIG_TOL:
        raise DomainError(f"negative probability {p.min():.3e}")
    p = np.clip(p, 0.0, None)
    return float(-np.sum(xlogy(p, p)))


def von_neumann_entropy(rho: DensityOperator | FockState) -> float:
    if isinstance(rho, FockState):
        return 0.0
    return entropy_of_spectrum(clipped_eigenvalues(rho.matrix))


def g_function(x: float) -> float:
    """Entropy ``(x+1) ln(x+1) - x ln x`` of a thermal state with mean photon number ``x``."""
    if x < 0:
        raise DomainError(f"g is defined for x >= 0, got {x}")
    return float(xlogy(x + 1.0, x + 1.0) - xlogy(x, x))


def relative_entropy(rho: DensityOperator, sigma: DensityOperator) -> float:
    """``Tr[rho (ln rho - ln sigma)]``; ``+inf`` if ``supp(rho)`` is not inside ``supp(sigma)``."""
    d = max(rho.dim, sigma.dim)
    r = rho.with_cutoff(d - 1).matrix
    s = sigma.with_cutoff(d - 1).matrix
    wr, vr = np.linalg.eigh(r)
    ws, vs = np.linalg.eigh(s)
    wr = np.clip(wr, 0.0, None)
    ws = np.clip(ws, 0.0, None)
    null = vs[:, ws <= NULL_EIG]
    if null.size:
        leak = np.real(np.trace(null.conj().T @ r @ null))
        if leak > SUPPORT_TOL:
            return float("inf")
    log_s = (vs * np.log(np.maximum(ws, LOG_FLOOR))) @ vs.conj().T
    term = np.real(np.trace(r @ log_s))
    return float(-entropy_of_spectrum(wr) - term)


def capacity_gaussian(eta: float, nbar: float, nu: float) -> float:
    """``g(eta nu + nbar) - g(nbar)``: capacity of a phase-insensitive Gaussian channel.

    ``eta`` is the transmittance (``<= 1``) or gain (``> 1``) and ``nbar`` is
    the thermal photon number the channel adds at its output, i.e. the mean
    photon number of the output for vacuum input.  For an attenuator with a
    thermal environment of ``N`` photons this is ``(1 - eta) N``; for an
    amplifier it is ``(G - 1)(N + 1)``.  Use :func:`gaussian_output_noise`
    to get it from a channel.
    """
    if eta < 0 or nbar < 0 or nu < 0:
        raise DomainError("capacity_gaussian needs eta, nbar, nu >= 0")
    return g_function(eta * nu + nbar) - g_function(nbar)


def s_min_gaussian(channel: ChannelSpec) -> float:
    """Minimum output entropy of the Gaussian-equivalent channel (vacuum input)."""
    gaussian_equivalent(channel)  # validates the covariance
    return g_function(gaussian_output_noise(channel))


def vacuum_output_entropy(channel: ChannelSpec) -> float:
    return von_neumann_entropy(apply(channel, make_fock(0, 0)))


@dataclass(frozen=True)
class DeltaMax:
    """Width of the capacity interval.

    ``mode`` is ``"vacuum"`` when the non-Gaussian minimum output entropy was
    taken to be the vacuum-output entropy (exact if vacuum is a minimizer,
    otherwise a lower bound on the true width) and ``"search"`` when it was
    supplied by a numerical minimization.
    """

    value: float
    mode: str
    s_min_gaussian: float
    s_min: float

    def __float__(self) -> float:
        return self.value


def delta_max(channel: ChannelSpec, s_min_nongaussian: float | None = None) -> DeltaMax:
    sg = s_min_gaussian(channel)
    if s_min_nongaussian is None:
        s, mode = vacuum_output_entropy(channel), "vacuum"
    else:
        s, mode = float(s_min_nongaussian), "search"
    return DeltaMax(sg - s, mode, sg, s)


@dataclass(frozen=True)
class CapacityInterval:
    """``c_gaussian <= C <= upper`` at input photon budget ``nu`` (nats).

    ``loose`` flags the low-energy regime ``c_gaussian < delta`` where the
    upper bound is dominated by the constant width and far from the capacity.
    """

    nu: float
    c_gaussian: float
    delta: float
    upper: float
    mode: str = "vacuum"
    loose: bool = False


def capacity_interval(
    channel: ChannelSpec, nu: float, s_min: float | None = None, delta: DeltaMax | None = None
) -> CapacityInterval:
    if nu < 0:
        raise DomainError("photon budget must be non-negative")
    if delta is None:
        delta = delta_max(channel, s_min)
    gaussian_equivalent(channel)
    noise = gaussian_output_noise(channel)
    cg = capacity_gaussian(channel.param, noise, nu)
    return CapacityInterval(
        float(nu), cg, delta.value, cg + delta.value, delta.mode, bool(cg < delta.value)
    )


# --------------------------------------------------------------------------
# Holevo information of the Gaussian coherent-state ensemble


@dataclass(frozen=True)
class HolevoEstimate:
    """Holevo information estimate with its refinement history.

    ``error`` is the change between the last two quadrature refinements
    (or the Monte Carlo standard error).
    """

    value: float
    error: float
    method: str
    history: list = field(default_factory=list)


def _coherent_cutoff(alpha: complex, tail: float = 1e-12) -> int:
    x = abs(alpha) ** 2
    c = int(np.ceil(x + 8.0 * np.sqrt(x) + 12.0))
    while poisson.sf(c, x) > tail:
        c += 4
    return c


def _output_for_coherent(channel: ChannelSpec, alpha: complex) -> DensityOperator:
    state = make_coherent(alpha, _coherent_cutoff(alpha))
    if channel.kind == "attenuator":
        return apply_pure(channel, state)
    return apply(channel, state)


def _pad_sum(acc: np.ndarray | None, m: np.ndarray, w: float) -> np.ndarray:
    if acc is None:
        return w * m
    d = max(acc.shape[0], m.shape[0])
    out = np.zeros((d, d), dtype=complex)
    out[: acc.shape[0], : acc.shape[0]] += acc
    out[: m.shape[0], : m.shape[0]] += w * m
    return out


def _holevo_quadrature(channel: ChannelSpec, nu: float, order: int, n_angles: int) -> float:
    t, w = roots_laguerre(order)
    keep = np.cumsum(w) <= 1.0 - 1e-10
    keep[: max(1, keep.sum() + 1)] = True
    t, w = t[keep], w[keep] / w[keep].sum()
    covariant = channel.environment.is_fock_diagonal()
    angles = [0.0] if covariant else list(2 * np.pi * np.arange(n_angles) / n_angles)
    mean_state = None
    mean_entropy = 0.0
    for tk, wk in zip(t, w):
        radius = np.sqrt(nu * tk)
        for phi in angles:
            out = _output_for_coherent(channel, radius * np.exp(1j * phi))
            weight = wk / len(angles)
            m = out.matrix
            if covariant:
                # phase averaging of a phase-covariant output keeps its diagonal
                m = np.diag(m.diagonal())
            mean_state = _pad_sum(mean_state, m, weight)
            mean_entropy += weight * von_neumann_entropy(out)
    return entropy_of_spectrum(clipped_eigenvalues(mean_state)) - mean_entropy


def holevo_coherent_ensemble(
    channel: ChannelSpec,
    nu: float,
    quadrature_order: int = 24,
    tol: float = 1e-3,
    max_order: int = 96,
) -> HolevoEstimate:
    """Holevo information of the Gaussian ensemble of coherent states with mean photon number ``nu``.

    Radial Gauss-Laguerre quadrature in ``|alpha|^2 / nu`` times a trapezoid
    rule in the phase (skipped for phase-covariant channels, where the phase
    average is the Fock-diagonal part).  The order is raised by 8 until two
    successive values differ by less than ``tol``.
    """
    if nu < 0:
        raise DomainError("photon budget must be non-negative")
    if nu == 0:
        return HolevoEstimate(0.0, 0.0, "quadrature", [(0, 0.0)])
    history = []
    order, n_angles = quadrature_order, 16
    prev = _holevo_quadrature(channel, nu, order, n_angles)
    history.append((order, prev))
    while order < max_order:
        order += 8
        n_angles *= 2 if not channel.environment.is_fock_diagonal() else 1
        cur = _holevo_quadrature(channel, nu, order, n_angles)
        history.append((order, cur))
        if abs(cur - prev) < tol:
            return HolevoEstimate(cur, abs(cur - prev), "quadrature", history)
        prev = cur
    raise NonConvergenceError(f"Holevo quadrature did not converge: {history}")


def holevo_coherent_monte_carlo(
    channel: ChannelSpec, nu: float, samples: int, rng: np.random.Generator
) -> HolevoEstimate:
    """Monte Carlo fallback; ``error`` is the standard error of the averaged output entropy."""
    if nu == 0:
        return HolevoEstimate(0.0, 0.0, "monte-carlo")
    alphas = np.sqrt(nu / 2.0) * (rng.standard_normal(samples) + 1j * rng.standard_normal(samples))
    mean_state = None
    ent = np.empty(samples)
    for i, a in enumerate(alphas):
        out = _output_for_coherent(channel, a)
        mean_state = _pad_sum(mean_state, out.matrix, 1.0 / samples)
        ent[i] = von_neumann_entropy(out)
    value = entropy_of_spectrum(clipped_eigenvalues(mean_state)) - ent.mean()
    return HolevoEstimate(float(value), float(ent.std(ddof=1) / np.sqrt(samples)), "monte-carlo")
