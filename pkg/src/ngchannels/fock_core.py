"""Single- and two-mode state algebra in the truncated Fock basis.

Conventions
-----------
* Quadratures are ``x = (a + a^dag)/sqrt(2)`` and ``p = (a - a^dag)/(i sqrt(2))``,
  so the vacuum covariance matrix is ``I/2``.
* Entropies and all derived quantities are in nats.
* A state on cutoff ``N`` lives on ``span{|0>, ..., |N>}`` (dimension ``N + 1``).
* Constructors that cut a distribution off record the discarded mass as a
  deficit; operations refuse inputs whose deficit exceeds ``MAX_DEFICIT``
  unless called with ``allow_truncated=True``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .errors import DomainError, InvalidStateError, TruncationError

NORM_TOL = 1e-12
TRACE_TOL = 1e-10
HERMITIAN_TOL = 1e-12
NEG_EIG_TOL = 1e-10
MAX_DEFICIT = 1e-4
COHERENT_WARN_TAIL = 1e-8

__all__ = [
    "FockState",
    "DensityOperator",
    "PhaseSpaceMoments",
    "annihilation",
    "number_operator",
    "make_fock",
    "make_coherent",
    "make_thermal",
    "moments",
    "tensor",
    "partial_trace_second",
    "check_deficit",
    "clipped_eigenvalues",
]


@dataclass(frozen=True)
class FockState:
    """Normalized pure state ``sum_n amplitudes[n] |n>``.

    ``norm_deficit`` is the probability mass that was cut off when the state
    was built from an infinite expansion (e.g. a coherent state).
    """

    amplitudes: np.ndarray
    norm_deficit: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        if amps.size == 0:
            raise DomainError("a Fock state needs at least one amplitude")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"amplitudes are not normalized (norm={norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes, norm_deficit: float = 0.0) -> "FockState":
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return cls(amps / norm, norm_deficit)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.size - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def dm(self) -> "DensityOperator":
        v = self.amplitudes
        return DensityOperator(np.outer(v, v.conj()), trace_deficit=self.norm_deficit)

    def inner(self, other: "FockState") -> complex:
        """``<self|other>`` with zero padding to the larger cutoff."""
        d = max(self.dim, other.dim)
        return complex(np.vdot(_pad(self.amplitudes, d), _pad(other.amplitudes, d)))

    def fidelity(self, other: "FockState") -> float:
        return abs(self.inner(other)) ** 2

    def with_cutoff(self, cutoff: int) -> "FockState":
        """Zero-pad, or truncate and renormalize, to a new cutoff."""
        if cutoff >= self.cutoff:
            return FockState(_pad(self.amplitudes, cutoff + 1), self.norm_deficit)
        kept = self.amplitudes[: cutoff + 1]
        lost = 1.0 - float(np.vdot(kept, kept).real)
        return FockState.normalized(kept, self.norm_deficit + lost)

    def mean_photon_number(self) -> float:
        n = np.arange(self.dim)
        return float(np.sum(n * np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian unit-trace matrix in the truncated number basis.

    Hermiticity, trace and positivity (eigenvalues ``>= -1e-10``) are
    checked on construction.
    """

    matrix: np.ndarray
    trace_deficit: float = 0.0

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"density matrix must be square, got shape {m.shape}")
        herm = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if herm > HERMITIAN_TOL:
            raise InvalidStateError(f"matrix is not Hermitian (residual {herm:.3e})")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace is {tr!r}, expected 1")
        if m.size and np.linalg.eigvalsh(m)[0] < -NEG_EIG_TOL:
            raise InvalidStateError("matrix has a negative eigenvalue")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, matrix, trace_deficit: float = 0.0) -> "DensityOperator":
        """Symmetrize and renormalize; the lost trace is added to the deficit."""
        m = np.asarray(matrix, dtype=complex)
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if tr <= 0:
            raise InvalidStateError("matrix has non-positive trace")
        return cls(m / tr, trace_deficit + max(0.0, 1.0 - tr))

    @property
    def cutoff(self) -> int:
        return self.matrix.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def with_cutoff(self, cutoff: int) -> "DensityOperator":
        d = cutoff + 1
        if d >= self.dim:
            m = np.zeros((d, d), dtype=complex)
            m[: self.dim, : self.dim] = self.matrix
            return DensityOperator(m, self.trace_deficit)
        return DensityOperator.from_matrix(self.matrix[:d, :d], self.trace_deficit)

    def eigenvalues(self) -> np.ndarray:
        return clipped_eigenvalues(self.matrix)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def mean_photon_number(self) -> float:
        return float(np.sum(np.arange(self.dim) * self.matrix.diagonal().real))

    def trace_distance(self, other: "DensityOperator") -> float:
        """Trace norm ``||self - other||_1`` (not halved)."""
        d = max(self.dim, other.dim)
        diff = _pad2(self.matrix, d) - _pad2(other.matrix, d)
        return float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


@dataclass(frozen=True)
class PhaseSpaceMoments:
    """First and second quadrature moments ``(mean, cov)`` of a single mode."""

    mean: np.ndarray
    cov: np.ndarray = field(default_factory=lambda: 0.5 * np.eye(2))

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(2)
        cov = np.asarray(self.cov, dtype=float).reshape(2, 2)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", 0.5 * (cov + cov.T))

    def is_physical(self, tol: float = 1e-8) -> bool:
        """Robertson-Schroedinger condition ``cov + (i/2) Omega >= 0``."""
        omega = np.array([[0.0, 1.0], [-1.0, 0.0]])
        return bool(np.linalg.eigvalsh(self.cov + 0.5j * omega).min() >= -tol)

    def mean_photon_number(self) -> float:
        return float((np.trace(self.cov) + self.mean @ self.mean - 1.0) / 2.0)


def _pad(v: np.ndarray, d: int) -> np.ndarray:
    out = np.zeros(d, dtype=complex)
    out[: v.size] = v
    return out


def _pad2(m: np.ndarray, d: int) -> np.ndarray:
    out = np.zeros((d, d), dtype=complex)
    out[: m.shape[0], : m.shape[1]] = m
    return out


def annihilation(cutoff: int) -> np.ndarray:
    """Truncated lowering operator ``a`` with ``a|n> = sqrt(n)|n-1>``."""
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), k=1)


def number_operator(cutoff: int) -> np.ndarray:
    return np.diag(np.arange(cutoff + 1, dtype=float))


def check_deficit(obj, allow_truncated: bool = False) -> None:
    """Raise :class:`TruncationError` if ``obj`` lost too much mass to the cutoff."""
    deficit = getattr(obj, "trace_deficit", None)
    if deficit is None:
        deficit = getattr(obj, "norm_deficit", 0.0)
    if deficit > MAX_DEFICIT and not allow_truncated:
        raise TruncationError(
            f"input carries truncation deficit {deficit:.3e} > {MAX_DEFICIT:g}; "
            "raise the cutoff or pass allow_truncated=True"
        )


def clipped_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix with ``[-1e-10, 0)`` clipped to zero."""
    w = np.linalg.eigvalsh(matrix)
    if w.size and w.min() < -NEG_EIG_TOL:
        raise InvalidStateError(f"negative eigenvalue {w.min():.3e}")
    return np.clip(w, 0.0, None)


def make_fock(n: int, cutoff: int) -> FockState:
    if not 0 <= n <= cutoff:
        raise DomainError(f"Fock index {n} outside [0, {cutoff}]")
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[n] = 1.0
    return FockState(amps)


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """Un-renormalized coefficients ``exp(-|a|^2/2) a^n / sqrt(n!)``, n <= cutoff."""
    n = np.arange(cutoff + 1)
    r = abs(alpha)
    if r == 0.0:
        out = np.zeros(cutoff + 1, dtype=complex)
        out[0] = 1.0
        return out
    log_mag = -0.5 * r * r + n * np.log(r) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def make_coherent(alpha: complex, cutoff: int) -> FockState:
    """Coherent state ``|alpha>`` renormalized on the truncated space.

    Raises :class:`TruncationError` when the Poisson tail beyond ``cutoff``
    exceeds ``MAX_DEFICIT``; warns above ``1e-8``.
    """
    tail = float(poisson.sf(cutoff, abs(alpha) ** 2)) if alpha != 0 else 0.0
    if tail > MAX_DEFICIT:
        raise TruncationError(
            f"coherent state |{alpha}> loses mass {tail:.3e} beyond cutoff {cutoff}"
        )
    if tail > COHERENT_WARN_TAIL:
        warnings.warn(f"coherent state tail mass {tail:.2e} beyond cutoff {cutoff}")
    return FockState.normalized(coherent_amplitudes(alpha, cutoff), tail)


def thermal_distribution(nbar: float, cutoff: int) -> tuple[np.ndarray, float]:
    """Geometric photon distribution cut at ``cutoff``, renormalized, plus its tail."""
    if nbar < 0:
        raise DomainError("thermal photon number must be non-negative")
    p = np.zeros(cutoff + 1)
    if nbar == 0:
        p[0] = 1.0
        return p, 0.0
    x = nbar / (nbar + 1.0)
    n = np.arange(cutoff + 1)
    p = (1.0 - x) * x**n
    tail = x ** (cutoff + 1)
    return p / p.sum(), float(tail)


def thermal_cutoff(nbar: float, tail: float = 1e-12) -> int:
    """Smallest cutoff whose geometric tail mass is below ``tail``."""
    if nbar <= 0:
        return 0
    x = nbar / (nbar + 1.0)
    return max(0, int(np.ceil(np.log(tail) / np.log(x))) - 1)


def make_thermal(nbar: float, cutoff: int) -> DensityOperator:
    p, tail = thermal_distribution(nbar, cutoff)
    return DensityOperator(np.diag(p).astype(complex), trace_deficit=tail)


def moments(rho: DensityOperator | FockState) -> PhaseSpaceMoments:
    """Quadrature mean and symmetrized covariance matrix of a state."""
    if isinstance(rho, FockState):
        rho = rho.dm()
    m = rho.matrix
    a = annihilation(rho.cutoff)
    ea = np.trace(m @ a)
    ea2 = np.trace(m @ a @ a)
    en = rho.mean_photon_number()
    mean = np.sqrt(2.0) * np.array([ea.real, ea.imag])
    cxx = ea2.real + en + 0.5
    cpp = -ea2.real + en + 0.5
    cxp = ea2.imag
    cov = np.array([[cxx, cxp], [cxp, cpp]]) - np.outer(mean, mean)
    return PhaseSpaceMoments(mean, cov)


def tensor(rho, sigma) -> np.ndarray:
    """Kronecker product of two single-mode states (first mode slow index)."""
    a = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho)
    b = sigma.matrix if isinstance(sigma, DensityOperator) else np.asarray(sigma)
    return np.kron(a, b)


def partial_trace_second(rho2, dims: tuple[int, int] | None = None) -> DensityOperator:
    """Trace out the second mode of a two-mode density matrix.

    ``dims`` gives the dimensions ``(d1, d2)``; when omitted both modes are
    assumed to share one dimension.
    """
    m = rho2.matrix if isinstance(rho2, DensityOperator) else np.asarray(rho2, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError("two-mode density matrix must be square")
    total = m.shape[0]
    if dims is None:
        d = int(round(np.sqrt(total)))
        dims = (d, d)
    d1, d2 = dims
    if d1 * d2 != total:
        raise DomainError(f"dims {dims} do not match matrix size {total}")
    reduced = np.einsum("ikjk->ij", m.reshape(d1, d2, d1, d2))
    return DensityOperator.from_matrix(reduced)
