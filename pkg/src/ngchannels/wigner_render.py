"""Wigner functions of truncated single-mode states on phase-space grids.

Quadratures follow ``x = (a + a^dag)/sqrt2``, so the vacuum Wigner function
is ``exp(-x^2 - p^2) / pi``.  Evaluation uses the Laguerre-kernel expansion
``W = sum_mn rho_mn W_mn`` with the ``W_mn`` generated by a stable
three-term recurrence.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fock_core import DensityOperator, FockState

__all__ = ["WignerGrid", "wigner", "wigner_at", "default_extent"]


@dataclass(frozen=True)
class WignerGrid:
    x: np.ndarray
    p: np.ndarray
    values: np.ndarray  # values[i, j] = W(x[j], p[i])

    @property
    def cell(self) -> float:
        return float((self.x[1] - self.x[0]) * (self.p[1] - self.p[0]))

    def integral(self) -> float:
        return float(self.values.sum() * self.cell)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["x", "p", "W"])
        for i, pv in enumerate(self.p):
            for j, xv in enumerate(self.x):
                w.writerow([repr(float(xv)), repr(float(pv)), repr(float(self.values[i, j]))])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"x": self.x.tolist(), "p": self.p.tolist(), "W": self.values.tolist()})


def _matrix(rho) -> np.ndarray:
    if isinstance(rho, FockState):
        return rho.dm().matrix
    if isinstance(rho, DensityOperator):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


def wigner_at(rho, x, p) -> np.ndarray:
    """Wigner function at arbitrary points (``x`` and ``p`` broadcast together)."""
    r = _matrix(rho)
    x, p = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    d = r.shape[0]
    z = np.sqrt(2.0) * (x + 1j * p)
    # w[n] holds W_{m n}; start from the m = 0 row
    w = [np.exp(-0.5 * np.abs(z) ** 2) / np.pi]
    for n in range(1, d):
        w.append(z * w[n - 1] / np.sqrt(n))
    total = np.real(r[0, 0]) * np.real(w[0])
    for n in range(1, d):
        total = total + 2.0 * np.real(r[0, n] * w[n])
    for m in range(1, d):
        prev = w[m]
        w[m] = (np.conj(z) * prev - np.sqrt(m) * w[m - 1]) / np.sqrt(m)
        total = total + np.real(r[m, m] * w[m])
        for n in range(m + 1, d):
            nxt = (z * w[n - 1] - np.sqrt(m) * prev) / np.sqrt(n)
            prev = w[n]
            w[n] = nxt
            total = total + 2.0 * np.real(r[m, n] * w[n])
    return total


def default_extent(rho) -> float:
    """Half-width covering the state: about five thermal widths at its photon number."""
    r = _matrix(rho)
    nbar = float(np.real(np.trace(r * np.arange(r.shape[0]))))
    return float(3.5 * np.sqrt(2.0 * nbar + 1.0) + 1.0)


def wigner(rho, extent: float | None = None, resolution: int = 121) -> WignerGrid:
    """Wigner function on the square ``[-extent, extent]^2`` with ``resolution`` points per axis."""
    if resolution < 2:
        raise DomainError("resolution must be at least 2")
    if extent is None:
        extent = default_extent(rho)
    else:
        r = _matrix(rho)
        radius = np.sqrt(2.0 * np.real(np.trace(r * np.arange(r.shape[0]))) + 1.0) + 2.0
        if extent < radius:
            warnings.warn(f"extent {extent} may clip the state (suggested >= {radius:.3g})", stacklevel=2)
    axis = np.linspace(-extent, extent, resolution)
    xx, pp = np.meshgrid(axis, axis)
    return WignerGrid(axis, axis.copy(), wigner_at(rho, xx, pp))
