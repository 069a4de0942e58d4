"""Classical additive-noise channel ``Y = X + N`` under an input power constraint.

The capacity lies between the Gaussian-noise value ``1/2 ln(1 + E / sigma^2)``
and that value plus ``D(N || N_G) = h(N_G) - h(N)``, where ``N_G`` is the
Gaussian noise of equal variance.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import roots_legendre, xlogy
from scipy.stats import laplace, norm

from .errors import DomainError, NonConvergenceError

__all__ = [
    "NoiseDensity",
    "gaussian_noise",
    "uniform_noise",
    "laplace_noise",
    "gaussian_mixture_noise",
    "noise_from_json",
    "differential_entropy",
    "gaussian_entropy",
    "classical_capacity_gaussian",
    "delta_classical",
    "mutual_information_gaussian_input",
]

NORM_TOL = 1e-8
MEAN_TOL = 1e-8
VAR_TOL = 1e-6


def _quad(f, a, b, points=(), tol=1e-11):
    """``quad`` over ``[a, b]`` split at ``points``; returns ``(value, error)``."""
    edges = [a] + sorted(p for p in points if a < p < b) + [b]
    total, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, e, info = integrate.quad(f, lo, hi, epsabs=tol, epsrel=tol, limit=400, full_output=True)[:3]
        total += val
        err += e
    return total, err


@dataclass(frozen=True)
class NoiseDensity:
    """Zero-mean noise density given by a vectorized evaluator.

    ``support`` is an interval outside which the density is negligible
    (below quadrature tolerance) and ``breakpoints`` lists points where it
    is not smooth.
    """

    pdf: Callable
    variance: float
    support: tuple
    breakpoints: tuple = ()
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.variance > 0:
            raise DomainError("noise variance must be positive (a point mass has no differential entropy)")
        a, b = self.support
        mass, _ = _quad(self.pdf, a, b, self.breakpoints)
        mean, _ = _quad(lambda x: x * self.pdf(x), a, b, self.breakpoints)
        var, _ = _quad(lambda x: x * x * self.pdf(x), a, b, self.breakpoints)
        if abs(mass - 1.0) > NORM_TOL:
            raise DomainError(f"density integrates to {mass!r}, not 1")
        if abs(mean) > MEAN_TOL:
            raise DomainError(f"density has mean {mean!r}; only zero-mean noise is accepted")
        if abs(var - self.variance) > VAR_TOL * max(1.0, self.variance):
            raise DomainError(f"declared variance {self.variance} but density has {var}")

    def to_json(self) -> str:
        return json.dumps({"kind": self.name, **self.params})


def gaussian_noise(variance: float = 1.0) -> NoiseDensity:
    s = np.sqrt(variance)
    return NoiseDensity(norm(scale=s).pdf, variance, (-14 * s, 14 * s), (), "gaussian", {"variance": variance})


def uniform_noise(variance: float = 1.0) -> NoiseDensity:
    h = np.sqrt(3.0 * variance)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) <= h, 0.5 / h, 0.0)

    return NoiseDensity(pdf, variance, (-h, h), (), "uniform", {"variance": variance})


def laplace_noise(variance: float = 1.0) -> NoiseDensity:
    b = np.sqrt(variance / 2.0)
    return NoiseDensity(laplace(scale=b).pdf, variance, (-50 * b, 50 * b), (0.0,), "laplace",
                        {"variance": variance})


def gaussian_mixture_noise(weights, means, variances) -> NoiseDensity:
    """Mixture of Gaussians, shifted so that its mean is zero."""
    w = np.asarray(weights, dtype=float)
    mu = np.asarray(means, dtype=float)
    v = np.asarray(variances, dtype=float)
    if w.shape != mu.shape or w.shape != v.shape or w.size == 0:
        raise DomainError("weights, means and variances must have the same non-zero length")
    if (w < 0).any() or not (v > 0).all():
        raise DomainError("weights must be >= 0 and variances > 0")
    w = w / w.sum()
    mu = mu - np.dot(w, mu)
    s = np.sqrt(v)

    def pdf(x):
        x = np.asarray(x, dtype=float)[..., None]
        return np.sum(w * norm.pdf(x, mu, s), axis=-1)

    total_var = float(np.dot(w, v + mu**2))
    lo, hi = float((mu - 14 * s).min()), float((mu + 14 * s).max())
    params = {"weights": w.tolist(), "means": mu.tolist(), "variances": v.tolist()}
    return NoiseDensity(pdf, total_var, (lo, hi), tuple(mu.tolist()), "gaussian-mixture", params)


def noise_from_json(text: str) -> NoiseDensity:
    """Build a named noise from ``{"kind": ..., ...}``."""
    spec = json.loads(text) if isinstance(text, str) else dict(text)
    kind = spec.pop("kind", None)
    makers = {
        "gaussian": gaussian_noise,
        "uniform": uniform_noise,
        "laplace": laplace_noise,
        "gaussian-mixture": gaussian_mixture_noise,
    }
    if kind not in makers:
        raise DomainError(f"unknown noise kind {kind!r}; choose from {sorted(makers)}")
    try:
        return makers[kind](**spec)
    except TypeError as exc:
        raise DomainError(f"bad parameters for {kind} noise: {exc}") from None


def differential_entropy(p: NoiseDensity, return_error: bool = False):
    """``-int p ln p`` in nats by adaptive quadrature."""
    a, b = p.support

    def f(x):
        v = p.pdf(x)
        return -xlogy(v, v)

    val, err = _quad(f, a, b, p.breakpoints)
    if not np.isfinite(val) or err > 1e-7:
        raise NonConvergenceError(f"entropy quadrature did not converge (estimate {val}, error {err})")
    return (float(val), float(err)) if return_error else float(val)


def gaussian_entropy(variance: float) -> float:
    return 0.5 * np.log(2 * np.pi * np.e * variance)


def classical_capacity_gaussian(gamma: float) -> float:
    """``1/2 ln(1 + gamma)`` for signal-to-noise ratio ``gamma``."""
    if gamma < 0:
        raise DomainError("signal-to-noise ratio must be non-negative")
    return 0.5 * np.log1p(gamma)


def delta_classical(p: NoiseDensity) -> float:
    """``D(N || N_G) = h(N_G) - h(N)``."""
    return gaussian_entropy(p.variance) - differential_entropy(p)


def _panels(edges, n_panels, order):
    """Composite Gauss-Legendre nodes and weights over consecutive intervals."""
    t, w = roots_legendre(order)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        cuts = np.linspace(lo, hi, n_panels + 1)
        half = 0.5 * np.diff(cuts)
        mid = 0.5 * (cuts[1:] + cuts[:-1])
        xs.append((mid[:, None] + half[:, None] * t).ravel())
        ws.append((half[:, None] * w).ravel())
    return np.concatenate(xs), np.concatenate(ws)


def _output_entropy(p: NoiseDensity, energy: float, n_panels: int, order: int = 16) -> float:
    a, b = p.support
    sx = np.sqrt(energy)
    reach = 10.0 * sx
    kinks = np.array(sorted({a, b, *(x for x in p.breakpoints if a < x < b)}))
    # output grid: separate panels across each smoothed edge or kink
    marks = np.concatenate([kinks - 8 * sx, kinks + 8 * sx])
    y_edges = np.unique(np.clip(marks, a - 8 * sx, b + 8 * sx))
    y, wy = _panels(y_edges, n_panels, order)
    # noise-variable window around each output point, cut at the kinks
    lo = np.maximum(y - reach, a)[:, None]
    hi = np.minimum(y + reach, b)[:, None]
    cuts = np.sort(np.concatenate([lo, np.clip(kinks[None, :], lo, hi), hi], axis=1), axis=1)
    t, w = roots_legendre(order)
    frac = (np.arange(n_panels)[:, None] + 0.5 * (t[None, :] + 1.0)).ravel() / n_panels
    wt = np.tile(w, n_panels) / (2.0 * n_panels)
    q = np.zeros_like(y)
    for k in range(cuts.shape[1] - 1):
        left, length = cuts[:, k : k + 1], (cuts[:, k + 1] - cuts[:, k])[:, None]
        x = left + length * frac[None, :]
        q += np.sum(p.pdf(x) * norm.pdf(y[:, None] - x, scale=sx) * length * wt[None, :], axis=1)
    return float(-np.sum(wy * xlogy(q, q)))


def mutual_information_gaussian_input(
    p: NoiseDensity, energy: float, tol: float = 1e-7, max_panels: int = 256
) -> float:
    """``h(X_G + N) - h(N)`` for Gaussian input of variance ``energy``.

    The output density is the convolution evaluated by composite
    Gauss-Legendre quadrature over the noise support; the output entropy is
    integrated over that support widened by eight input standard deviations.
    Panel counts double until successive values agree within ``tol``.
    """
    if not energy > 0:
        raise DomainError("input energy must be positive")
    n = 4
    prev = _output_entropy(p, energy, n)
    while n < max_panels:
        n *= 2
        cur = _output_entropy(p, energy, n)
        if abs(cur - prev) < tol:
            return cur - differential_entropy(p)
        prev = cur
    raise NonConvergenceError("convolution quadrature did not converge")
