"""Gaussian unitaries and the anti-unitary reflection in the Fock basis.

Sign conventions (all comparisons elsewhere are made up to a global phase):

* beam splitter ``U = exp(theta (a^dag b - a b^dag))`` with ``cos(theta) = sqrt(eta)``,
  so that in the Heisenberg picture ``a -> sqrt(eta) a + sqrt(1-eta) b`` and
  ``b -> -sqrt(1-eta) a + sqrt(eta) b``;
* rotation ``R_theta = exp(-i theta n)``;
* squeezing ``S_r = exp((r/2)(a^2 - a^dag^2))``, which squeezes ``x`` for ``r > 0``;
* two-mode squeezer ``exp(r (a^dag b^dag - a b))`` with gain ``G = cosh(r)^2``;
* reflection ``M_theta = R_theta M R_theta^dag`` where ``M`` conjugates Fock amplitudes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import eval_genlaguerre, gammaln
from scipy.stats import poisson

from .errors import DomainError, TruncationError
from .fock_core import DensityOperator, FockState

UNITARY_DEFECT_TOL = 1e-6

__all__ = [
    "BeamSplitterUnitary",
    "SingleModeUnitary",
    "TwoModeSqueezer",
    "beam_splitter",
    "beam_splitter_block",
    "apply_beam_splitter",
    "rotation",
    "reflection",
    "squeezing",
    "squeezed_vacuum",
    "displacement",
    "two_mode_squeezer",
    "tms_amplitudes",
    "squeezed_vacuum_tail",
]


# --------------------------------------------------------------------------
# beam splitter


@lru_cache(maxsize=None)
def _generator_eig(total: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of ``i (a^dag b - a b^dag)`` on the ``total``-photon block."""
    k = np.arange(total)
    off = np.sqrt((k + 1.0) * (total - k))
    gen = np.zeros((total + 1, total + 1))
    gen[k + 1, k] = off
    gen[k, k + 1] = -off
    w, v = np.linalg.eigh(1j * gen)
    return w, v


@lru_cache(maxsize=4096)
def beam_splitter_block(eta: float, total: int) -> np.ndarray:
    """Real orthogonal matrix of the beam splitter on ``span{|k, total-k>}``.

    Rows and columns are indexed by the photon number ``k`` of the first mode.
    """
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"transmittance {eta} outside [0, 1]")
    if eta == 1.0:
        return np.eye(total + 1)
    theta = np.arccos(np.sqrt(eta))
    w, v = _generator_eig(total)
    u = (v * np.exp(-1j * theta * w)) @ v.conj().T
    block = np.ascontiguousarray(u.real)
    block.flags.writeable = False
    return block


@dataclass(frozen=True)
class BeamSplitterUnitary:
    """Beam splitter of transmittance ``eta`` acting on modes of cutoff ``cutoff``.

    The unitary conserves the total photon number, so it is stored exactly as
    one block per total photon number ``0 .. 2*cutoff``.
    """

    eta: float
    cutoff: int

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise DomainError(f"transmittance {self.eta} outside [0, 1]")
        if self.cutoff < 0:
            raise DomainError("cutoff must be non-negative")

    @property
    def blocks(self) -> list[np.ndarray]:
        return [beam_splitter_block(float(self.eta), n) for n in range(2 * self.cutoff + 1)]

    def apply(self, psi2: np.ndarray) -> np.ndarray:
        """Apply to a two-mode amplitude array ``psi2[n_a, n_b]``.

        Returns an array of shape ``(d_a + d_b - 1, d_a + d_b - 1)``, which
        holds the image exactly.
        """
        return apply_beam_splitter(float(self.eta), psi2)


def apply_beam_splitter(eta: float, psi2: np.ndarray) -> np.ndarray:
    psi2 = np.asarray(psi2)
    da, db = psi2.shape
    dout = da + db - 1
    out = np.zeros((dout, dout), dtype=complex)
    for total in range(da + db - 1):
        lo, hi = max(0, total - db + 1), min(total, da - 1)
        ks = np.arange(lo, hi + 1)
        v = psi2[ks, total - ks]
        if not np.any(v):
            continue
        block = beam_splitter_block(eta, total)
        m = np.arange(total + 1)
        out[m, total - m] = block[:, ks] @ v
    return out


# --------------------------------------------------------------------------
# single-mode operations


@dataclass(frozen=True)
class SingleModeUnitary:
    """A single-mode Gaussian operation on the truncated space.

    ``matrix`` is ``None`` for the reflection, which is anti-unitary and only
    available as an action on states. ``defect`` is the mass the operation
    pushes beyond the cutoff when applied to the vacuum.
    """

    kind: str
    parameter: complex
    cutoff: int | None
    matrix: np.ndarray | None
    defect: float = 0.0

    def apply(self, state):
        if isinstance(state, FockState):
            return FockState.normalized(self._apply_vec(state.amplitudes), state.norm_deficit)
        if isinstance(state, DensityOperator):
            return DensityOperator.from_matrix(self._apply_dm(state.matrix), state.trace_deficit)
        arr = np.asarray(state)
        return self._apply_vec(arr) if arr.ndim == 1 else self._apply_dm(arr)

    def _apply_vec(self, v: np.ndarray) -> np.ndarray:
        if self.kind == "reflection":
            n = np.arange(v.size)
            return np.exp(-2j * n * self.parameter.real) * np.conj(v)
        self._check_dim(v.shape[0])
        return self.matrix @ v

    def _apply_dm(self, m: np.ndarray) -> np.ndarray:
        if self.kind == "reflection":
            n = np.arange(m.shape[0])
            ph = np.exp(-2j * n * self.parameter.real)
            return ph[:, None] * np.conj(m) * ph.conj()[None, :]
        self._check_dim(m.shape[0])
        return self.matrix @ m @ self.matrix.conj().T

    def _check_dim(self, d: int) -> None:
        if d != self.matrix.shape[0]:
            raise DomainError(f"state dimension {d} != operator dimension {self.matrix.shape[0]}")


def rotation(theta: float, cutoff: int) -> SingleModeUnitary:
    n = np.arange(cutoff + 1)
    return SingleModeUnitary("rotation", theta, cutoff, np.diag(np.exp(-1j * n * theta)))


def reflection(theta: float = 0.0) -> SingleModeUnitary:
    """Mirror about the phase-space axis at angle ``theta`` (``theta=0``: conjugation)."""
    return SingleModeUnitary("reflection", complex(theta), None, None)


def squeezed_vacuum_tail(r: float, cutoff: int) -> float:
    """Probability mass of ``S_r|0>`` above photon number ``cutoff``."""
    if r == 0:
        return 0.0
    t2 = np.tanh(abs(r)) ** 2
    k = np.arange(cutoff // 2 + 1)
    logp = -np.log(np.cosh(r)) + k * np.log(t2) + gammaln(2 * k + 1) - 2 * gammaln(k + 1) - 2 * k * np.log(2)
    return float(max(0.0, 1.0 - np.exp(logp).sum()))


def squeezed_vacuum(r: float, theta: float, cutoff: int) -> FockState:
    """``R_theta S_r |0>`` from its closed-form even-photon amplitudes."""
    defect = squeezed_vacuum_tail(r, cutoff)
    if defect > UNITARY_DEFECT_TOL:
        raise TruncationError(f"squeezing r={r} leaks {defect:.3e} beyond cutoff {cutoff}")
    amps = np.zeros(cutoff + 1, dtype=complex)
    if r == 0:
        amps[0] = 1.0
        return FockState(amps)
    k = np.arange(cutoff // 2 + 1)
    t = np.tanh(r)
    logmag = k * np.log(abs(t) / 2.0) + 0.5 * gammaln(2 * k + 1) - gammaln(k + 1)
    amps[2 * k] = np.exp(logmag - 0.5 * np.log(np.cosh(r))) * (-np.sign(t)) ** k
    amps *= np.exp(-1j * theta * np.arange(cutoff + 1))
    # renormalize the retained block; the discarded mass is the recorded defect
    return FockState.normalized(amps, defect)


def _signed_logsum(logs: np.ndarray, signs: np.ndarray) -> float:
    if logs.size == 0:
        return 0.0
    top = logs.max()
    return float(np.sum(signs * np.exp(logs - top)) * np.exp(top))


def squeezing(r: float, cutoff: int) -> SingleModeUnitary:
    """Squeezer ``exp((r/2)(a^2 - a^dag^2))`` with exact matrix elements.

    The elements come from the normal-ordered factorization
    ``exp(-t a^dag^2 / 2) cosh(r)^-(n + 1/2) exp(t a^2 / 2)``, ``t = tanh r``,
    so no truncation error enters the retained block.
    """
    defect = squeezed_vacuum_tail(r, cutoff)
    if defect > UNITARY_DEFECT_TOL:
        raise TruncationError(f"squeezing r={r} leaks {defect:.3e} beyond cutoff {cutoff}")
    d = cutoff + 1
    if r == 0:
        return SingleModeUnitary("squeezing", r, cutoff, np.eye(d, dtype=complex), 0.0)
    t = np.tanh(r)
    lt, lc = np.log(abs(t) / 2.0), np.log(np.cosh(r))
    st = np.sign(t)
    lg = gammaln(np.arange(d) + 1)
    mat = np.zeros((d, d))
    for n in range(d):
        for m in range(n % 2, d, 2):
            ks = np.arange(0, n // 2 + 1)
            ls = (m - n) // 2 + ks
            ok = ls >= 0
            ks, ls = ks[ok], ls[ok]
            if ks.size == 0:
                continue
            j = n - 2 * ks
            logs = (
                (ks + ls) * lt
                - (j + 0.5) * lc
                + 0.5 * (lg[n] + lg[m])
                - gammaln(ks + 1)
                - gammaln(ls + 1)
                - lg[j]
            )
            signs = st ** (ks + ls) * (-1.0) ** ls
            mat[m, n] = _signed_logsum(logs, signs)
    return SingleModeUnitary("squeezing", r, cutoff, mat.astype(complex), defect)


def displacement(alpha: complex, cutoff: int) -> SingleModeUnitary:
    """Displacement ``exp(alpha a^dag - alpha* a)`` from its Laguerre closed form."""
    defect = float(poisson.sf(cutoff, abs(alpha) ** 2)) if alpha != 0 else 0.0
    if defect > UNITARY_DEFECT_TOL:
        raise TruncationError(f"displacement {alpha} leaks {defect:.3e} beyond cutoff {cutoff}")
    d = cutoff + 1
    if alpha == 0:
        return SingleModeUnitary("displacement", 0j, cutoff, np.eye(d, dtype=complex), 0.0)
    x = abs(alpha) ** 2
    lg = gammaln(np.arange(d) + 1)
    mat = np.zeros((d, d), dtype=complex)
    m_idx, n_idx = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    lo, hi = np.minimum(m_idx, n_idx), np.maximum(m_idx, n_idx)
    diff = hi - lo
    lag = eval_genlaguerre(lo, diff, x)
    mag = np.exp(0.5 * (lg[lo] - lg[hi]) + diff * np.log(abs(alpha)) - 0.5 * x)
    phase_up = np.exp(1j * diff * np.angle(alpha))
    phase_down = np.exp(1j * diff * np.angle(-np.conj(alpha)))
    mat = np.where(m_idx >= n_idx, phase_up, phase_down) * mag * lag
    return SingleModeUnitary("displacement", complex(alpha), cutoff, mat, defect)


# --------------------------------------------------------------------------
# two-mode squeezer


def tms_amplitudes(gain: float, n: int, m: int, p: np.ndarray) -> np.ndarray:
    """``<p, p-n+m| exp(r(a^dag b^dag - a b)) |n, m>`` for an array of ``p``.

    Uses ``exp(t a^dag b^dag) cosh(r)^-(n_a+n_b+1) exp(-t a b)``, ``t = tanh r``.
    Entries with ``p - n + m < 0`` are zero.
    """
    if gain < 1.0:
        raise DomainError(f"gain {gain} < 1")
    p = np.asarray(p, dtype=int)
    q = p - n + m
    out = np.zeros(p.shape)
    valid = q >= 0
    if gain == 1.0:
        out[valid & (p == n)] = 1.0
        return out
    r = np.arccosh(np.sqrt(gain))
    lt, lc = np.log(np.tanh(r)), np.log(np.cosh(r))
    base = 0.5 * (gammaln(n + 1) + gammaln(m + 1))
    for idx in np.flatnonzero(valid):
        pp, qq = p[idx], q[idx]
        ks = np.arange(0, min(n, m) + 1)
        ls = pp - n + ks
        ok = ls >= 0
        ks, ls = ks[ok], ls[ok]
        if ks.size == 0:
            continue
        logs = (
            (ks + ls) * lt
            - (n + m - 2 * ks + 1) * lc
            + base
            + 0.5 * (gammaln(pp + 1) + gammaln(qq + 1))
            - gammaln(ks + 1)
            - gammaln(ls + 1)
            - gammaln(n - ks + 1)
            - gammaln(m - ks + 1)
        )
        out[idx] = _signed_logsum(logs, (-1.0) ** ks)
    return out


@dataclass(frozen=True)
class TwoModeSqueezer:
    """Two-mode squeezer of gain ``G`` restricted to per-mode cutoff ``cutoff``.

    It conserves ``n_a - n_b``; ``defect`` is the mass of ``S|0,0>`` beyond
    the cutoff.
    """

    gain: float
    cutoff: int
    defect: float

    def apply(self, psi2: np.ndarray) -> np.ndarray:
        """Image of a two-mode amplitude array, truncated to the cutoff."""
        psi2 = np.asarray(psi2)
        d = self.cutoff + 1
        out = np.zeros((d, d), dtype=complex)
        ps = np.arange(d)
        for n, m in zip(*np.nonzero(psi2)):
            amps = tms_amplitudes(self.gain, n, m, ps)
            qs = ps - n + m
            ok = (qs >= 0) & (qs < d)
            out[ps[ok], qs[ok]] += psi2[n, m] * amps[ok]
        return out

    def matrix(self) -> np.ndarray:
        """Cropped ``(d^2, d^2)`` matrix on the truncated two-mode space."""
        d = self.cutoff + 1
        mat = np.zeros((d * d, d * d), dtype=complex)
        for n in range(d):
            for m in range(d):
                e = np.zeros((d, d))
                e[n, m] = 1.0
                mat[:, n * d + m] = self.apply(e).ravel()
        return mat


def two_mode_squeezer(gain: float, cutoff: int) -> TwoModeSqueezer:
    if gain < 1.0:
        raise DomainError(f"gain {gain} < 1")
    tau2 = (gain - 1.0) / gain
    defect = tau2 ** (cutoff + 1)
    if defect > UNITARY_DEFECT_TOL:
        raise TruncationError(f"gain {gain} leaks {defect:.3e} beyond cutoff {cutoff}")
    return TwoModeSqueezer(float(gain), cutoff, float(defect))


def beam_splitter(eta: float, cutoff: int) -> BeamSplitterUnitary:
    return BeamSplitterUnitary(float(eta), cutoff)
