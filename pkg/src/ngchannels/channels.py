"""Attenuator and amplifier channels with arbitrary single-mode environments.

A channel is ``rho -> Tr_2[U (rho (x) sigma) U^dag]`` where ``U`` is a beam
splitter (attenuator, ``0 <= eta <= 1``) or a two-mode squeezer (amplifier,
gain ``G >= 1``) and ``sigma`` is the environment.  Application goes through
Kraus operators ``B_k = <k|_2 U |e>_2`` built from the photon-number blocks of
``U``; the two-mode density matrix is never formed.

For the attenuator the output cutoff is ``N_in + N_env`` and the result is
exact on the truncated input space.  The amplifier does not conserve photon
number, so its output cutoff is doubled until the lost trace is below
``AMPLIFIER_DEFICIT`` (capped at ``ChannelSpec.max_output_cutoff``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, TruncationError
from .fock_core import (
    DensityOperator,
    FockState,
    PhaseSpaceMoments,
    annihilation,
    check_deficit,
    make_fock,
    moments,
    thermal_cutoff,
    thermal_distribution,
)
from .gaussian_unitaries import (
    apply_beam_splitter,
    beam_splitter_block,
    reflection,
    rotation,
    tms_amplitudes,
)

ENV_MEAN_TOL = 1e-8
ENV_COV_TOL = 1e-8
SYMMETRY_TOL = 1e-8
AMPLIFIER_DEFICIT = 1e-6
_KRAUS_CACHE_LIMIT = 4_000_000  # complex entries kept per cached Kraus array

__all__ = [
    "Environment",
    "ChannelSpec",
    "CovarianceCheck",
    "attenuator",
    "amplifier",
    "fock_attenuator",
    "phase_covariant_attenuator",
    "apply",
    "apply_pure",
    "output_spectrum",
    "gaussian_equivalent",
    "gaussian_output_noise",
    "output_covariance",
    "covariance_check",
    "environment_asymmetry",
    "normal_form_transform",
    "environment_from_json",
    "environment_to_json",
    "channel_from_json",
    "channel_to_json",
    "load_channel",
]


@dataclass(frozen=True)
class Environment:
    """Environment state of a channel together with the family it came from.

    ``kind`` is one of ``fock``, ``thermal``, ``diagonal``, ``pure``, ``mixed``.
    """

    kind: str
    state: DensityOperator
    params: dict = field(default_factory=dict)
    vector: np.ndarray | None = None

    @classmethod
    def fock(cls, n: int) -> "Environment":
        return cls("fock", make_fock(n, n).dm(), {"n": int(n)}, make_fock(n, n).amplitudes)

    @classmethod
    def thermal(cls, nbar: float, cutoff: int | None = None) -> "Environment":
        if cutoff is None:
            cutoff = thermal_cutoff(nbar)
        p, tail = thermal_distribution(nbar, cutoff)
        rho = DensityOperator(np.diag(p).astype(complex), trace_deficit=tail)
        return cls("thermal", rho, {"nbar": float(nbar), "cutoff": int(cutoff)})

    @classmethod
    def diagonal(cls, p) -> "Environment":
        p = np.asarray(p, dtype=float)
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise DomainError("diagonal environment needs a probability vector")
        return cls("diagonal", DensityOperator(np.diag(p).astype(complex)), {"p": p.tolist()})

    @classmethod
    def pure(cls, state: FockState | np.ndarray) -> "Environment":
        if not isinstance(state, FockState):
            state = FockState.normalized(state)
        return cls("pure", state.dm(), {}, state.amplitudes)

    @classmethod
    def mixed(cls, rho: DensityOperator) -> "Environment":
        return cls("mixed", rho, {})

    @property
    def cutoff(self) -> int:
        return self.state.cutoff

    def mean_photon_number(self) -> float:
        return self.state.mean_photon_number()

    def is_fock_diagonal(self) -> bool:
        m = self.state.matrix
        return bool(np.max(np.abs(m - np.diag(m.diagonal()))) <= SYMMETRY_TOL)

    def components(self) -> list[tuple[float, np.ndarray]]:
        """Decomposition ``sigma = sum_i w_i |e_i><e_i|`` with ``w_i > 1e-15``."""
        if self.vector is not None:
            return [(1.0, self.vector)]
        d = self.state.dim
        if self.is_fock_diagonal():
            p = self.state.matrix.diagonal().real
            return [(float(p[j]), np.eye(d, dtype=complex)[j]) for j in range(d) if p[j] > 1e-15]
        w, v = np.linalg.eigh(self.state.matrix)
        return [(float(w[i]), v[:, i]) for i in range(d) if w[i] > 1e-15]


@dataclass(frozen=True)
class ChannelSpec:
    """A non-Gaussian attenuator (``param = eta``) or amplifier (``param = G``)."""

    kind: str
    param: float
    environment: Environment
    max_output_cutoff: int = 256
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.kind == "attenuator":
            if not 0.0 <= self.param <= 1.0:
                raise DomainError(f"transmittance {self.param} outside [0, 1]")
        elif self.kind == "amplifier":
            if self.param < 1.0:
                raise DomainError(f"gain {self.param} < 1")
        else:
            raise DomainError(f"unknown channel kind {self.kind!r}")
        object.__setattr__(self, "param", float(self.param))
        sigma = self.environment.state
        mean = np.trace(sigma.matrix @ annihilation(sigma.cutoff))
        if abs(mean) > ENV_MEAN_TOL:
            raise DomainError(
                f"environment has non-zero mean displacement Tr[sigma a] = {mean:.3e}; "
                "displace it to the origin first"
            )

    @property
    def eta(self) -> float:
        return self.param

    def describe(self) -> str:
        name = "eta" if self.kind == "attenuator" else "G"
        return f"{self.kind}({name}={self.param:g}, env={self.environment.kind}{self.environment.params or ''})"

    def kraus(self, d_in: int, d_out: int | None = None) -> np.ndarray:
        """Kraus operators as an array of shape ``(n_kraus, d_out, d_in)``.

        For attenuators ``d_out`` is forced to ``d_in + d_env - 1``.
        """
        if self.kind == "attenuator":
            d_out = d_in + self.environment.state.dim - 1
        elif d_out is None:
            raise DomainError("amplifier Kraus operators need an explicit output dimension")
        key = (d_in, d_out)
        if key in self._cache:
            return self._cache[key]
        if self.kind == "attenuator":
            ops = _attenuator_kraus(self.param, self.environment, d_in)
        else:
            ops = _amplifier_kraus(self.param, self.environment, d_in, d_out)
        if ops.size <= _KRAUS_CACHE_LIMIT:
            ops.flags.writeable = False
            self._cache[key] = ops
        return ops


def attenuator(eta: float, environment: Environment, **kw) -> ChannelSpec:
    return ChannelSpec("attenuator", eta, environment, **kw)


def amplifier(gain: float, environment: Environment, **kw) -> ChannelSpec:
    return ChannelSpec("amplifier", gain, environment, **kw)


def fock_attenuator(eta: float, n: int) -> ChannelSpec:
    return attenuator(eta, Environment.fock(n))


def phase_covariant_attenuator(eta: float, p) -> ChannelSpec:
    return attenuator(eta, Environment.diagonal(p))


def _prune(ops: np.ndarray) -> np.ndarray:
    keep = np.any(ops != 0, axis=(1, 2))
    return np.ascontiguousarray(ops[keep])


def _attenuator_kraus(eta: float, env: Environment, d_in: int) -> np.ndarray:
    d_env = env.state.dim
    d_out = d_in + d_env - 1
    comps = env.components()
    ops = np.zeros((len(comps) * d_out, d_out, d_in), dtype=complex)
    for c, (w, e) in enumerate(comps):
        off = c * d_out
        for j in np.flatnonzero(np.abs(e) > 0):
            amp = np.sqrt(w) * e[j]
            for n in range(d_in):
                total = n + j
                m = np.arange(total + 1)
                ops[off + total - m, m, n] += amp * beam_splitter_block(eta, total)[:, n]
    return _prune(ops)


def _amplifier_kraus(gain: float, env: Environment, d_in: int, d_out: int) -> np.ndarray:
    comps = env.components()
    n_k = d_out + env.state.dim - 1
    ops = np.zeros((len(comps) * n_k, d_out, d_in), dtype=complex)
    for c, (w, e) in enumerate(comps):
        off = c * n_k
        for j in np.flatnonzero(np.abs(e) > 0):
            amp = np.sqrt(w) * e[j]
            for n in range(d_in):
                ps = np.arange(max(0, n - j), d_out)
                vals = tms_amplitudes(gain, n, int(j), ps)
                ops[off + ps - n + j, ps, n] += amp * vals
    return _prune(ops)


def _conjugate_by_kraus(ops: np.ndarray, rho: np.ndarray) -> np.ndarray:
    n_k, d_out, d_in = ops.shape
    x = ops @ rho
    xr = x.transpose(1, 0, 2).reshape(d_out, n_k * d_in)
    br = ops.transpose(1, 0, 2).reshape(d_out, n_k * d_in)
    return xr @ br.conj().T


def _amplifier_output(channel: ChannelSpec, rho: np.ndarray) -> tuple[np.ndarray, float]:
    d_in = rho.shape[0]
    cutoff = max(16, d_in + channel.environment.state.dim + 15)
    while True:
        cutoff = min(cutoff, channel.max_output_cutoff)
        out = _conjugate_by_kraus(channel.kraus(d_in, cutoff + 1), rho)
        deficit = 1.0 - np.trace(out).real
        if deficit < AMPLIFIER_DEFICIT:
            return out, max(0.0, deficit)
        if cutoff >= channel.max_output_cutoff:
            raise TruncationError(
                f"amplifier output still loses {deficit:.3e} at cutoff {cutoff}; "
                "increase max_output_cutoff"
            )
        cutoff *= 2


def apply(channel: ChannelSpec, rho, allow_truncated: bool = False) -> DensityOperator:
    """Output state of ``channel`` for input ``rho`` (state or density operator)."""
    if isinstance(rho, FockState):
        rho = rho.dm()
    check_deficit(rho, allow_truncated)
    env_deficit = channel.environment.state.trace_deficit
    if channel.kind == "attenuator":
        out = _conjugate_by_kraus(channel.kraus(rho.dim), rho.matrix)
        return DensityOperator.from_matrix(out, rho.trace_deficit + env_deficit)
    out, _ = _amplifier_output(channel, rho.matrix)
    # from_matrix renormalizes and books the lost trace itself
    return DensityOperator.from_matrix(out, rho.trace_deficit + env_deficit)


def apply_pure(channel: ChannelSpec, state: FockState) -> DensityOperator:
    """Attenuator output for a pure input via the two-mode amplitude array.

    Needs only the beam-splitter blocks, so it scales to large input cutoffs
    where the dense Kraus array would not fit in memory.
    """
    if channel.kind != "attenuator":
        return apply(channel, state)
    psi = state.amplitudes
    d_out = psi.size + channel.environment.state.dim - 1
    out = np.zeros((d_out, d_out), dtype=complex)
    for w, e in channel.environment.components():
        y = apply_beam_splitter(channel.param, np.outer(psi, e))
        out += w * (y @ y.conj().T)
    return DensityOperator.from_matrix(out, state.norm_deficit + channel.environment.state.trace_deficit)


def output_spectrum(channel: ChannelSpec, psi: np.ndarray, d_out: int | None = None) -> np.ndarray:
    """Eigenvalues of the output for a pure input amplitude vector.

    The output is ``Phi^T conj(Phi)`` with ``Phi[k] = B_k psi``, so its spectrum
    is the squared singular values of ``Phi``.
    """
    ops = channel.kraus(psi.size, d_out)
    phi = ops.reshape(-1, ops.shape[2]) @ psi
    s = np.linalg.svd(phi.reshape(ops.shape[0], ops.shape[1]), compute_uv=False)
    return s * s


def gaussian_output_noise(channel: ChannelSpec) -> float:
    """Mean photon number of the Gaussian-equivalent channel's output for vacuum input."""
    env = channel.environment
    # a truncated thermal state slightly undercounts its own photon number
    nbar = env.params["nbar"] if env.kind == "thermal" else env.mean_photon_number()
    if channel.kind == "attenuator":
        return (1.0 - channel.param) * nbar
    return (channel.param - 1.0) * (nbar + 1.0)


def gaussian_equivalent(channel: ChannelSpec) -> ChannelSpec:
    """Same channel with the environment replaced by the thermal state of equal photon number.

    The environment must already have a covariance matrix proportional to the
    identity; see :func:`normal_form_transform` for the required reduction.
    """
    sigma = channel.environment.state
    a = annihilation(sigma.cutoff)
    ea2 = np.trace(sigma.matrix @ a @ a)
    if abs(ea2) > ENV_COV_TOL:
        hint = normal_form_transform(channel.environment)
        raise DomainError(
            f"environment covariance is not proportional to the identity (|Tr[sigma a^2]| = {abs(ea2):.3e}); "
            f"squeeze by r={hint['squeezing']:.6g} along the axis at angle {hint['axis_angle']:.6g} first"
        )
    if channel.environment.kind == "thermal":
        return channel
    env = Environment.thermal(channel.environment.mean_photon_number())
    return ChannelSpec(channel.kind, channel.param, env, channel.max_output_cutoff)


def normal_form_transform(environment: Environment) -> dict:
    """Axis angle and squeezing parameter that make the environment covariance ``∝ I``.

    ``axis_angle`` is the direction of the anti-squeezed principal axis of the
    covariance matrix; squeezing that axis by ``exp(-2 r)`` equalizes both variances.
    """
    cov = moments(environment.state).cov
    w, v = np.linalg.eigh(cov)
    angle = float(np.arctan2(v[1, 1], v[0, 1]))
    return {"axis_angle": angle, "squeezing": 0.25 * float(np.log(w[1] / w[0]))}


def output_covariance(channel: ChannelSpec, rho_moments: PhaseSpaceMoments) -> PhaseSpaceMoments:
    """Output moments from the input moments alone."""
    env = moments(channel.environment.state)
    t = channel.param
    if channel.kind == "attenuator":
        mean = np.sqrt(t) * rho_moments.mean + np.sqrt(1.0 - t) * env.mean
        cov = t * rho_moments.cov + (1.0 - t) * env.cov
    else:
        z = np.diag([1.0, -1.0])
        mean = np.sqrt(t) * rho_moments.mean + np.sqrt(t - 1.0) * z @ env.mean
        cov = t * rho_moments.cov + (t - 1.0) * z @ env.cov @ z
    return PhaseSpaceMoments(mean, cov)


@dataclass(frozen=True)
class CovarianceCheck:
    """Outcome of :func:`covariance_check`.

    When the environment is not invariant under the symmetry, ``applicable``
    is False, ``residual`` is NaN and ``env_asymmetry`` says by how much the
    environment changes.
    """

    symmetry: str
    theta: float
    residual: float
    env_asymmetry: float
    applicable: bool


def _symmetry_op(kind: str, theta: float, cutoff: int):
    if kind == "rotation":
        return rotation(theta, cutoff)
    if kind == "reflection":
        return reflection(theta)
    raise DomainError(f"unknown symmetry {kind!r}")


def environment_asymmetry(environment: Environment, theta: float, kind: str = "rotation") -> float:
    sigma = environment.state
    g = _symmetry_op(kind, theta, sigma.cutoff)
    return float(np.max(np.abs(g._apply_dm(sigma.matrix) - sigma.matrix)))


def covariance_check(
    channel: ChannelSpec, theta: float, rho, kind: str = "rotation"
) -> CovarianceCheck:
    """Trace-norm residual ``||M[G rho G^dag] - G M[rho] G^dag||_1`` for ``G = R_theta`` or ``M_theta``."""
    if isinstance(rho, FockState):
        rho = rho.dm()
    asym = environment_asymmetry(channel.environment, theta, kind)
    if asym > SYMMETRY_TOL:
        return CovarianceCheck(kind, theta, float("nan"), asym, False)
    g_in = _symmetry_op(kind, theta, rho.cutoff)
    lhs = apply(channel, DensityOperator.from_matrix(g_in._apply_dm(rho.matrix)))
    out = apply(channel, rho)
    g_out = _symmetry_op(kind, theta, out.cutoff)
    rhs = g_out._apply_dm(out.matrix)
    d = max(lhs.dim, rhs.shape[0])
    diff = np.zeros((d, d), dtype=complex)
    diff[: lhs.dim, : lhs.dim] += lhs.matrix
    diff[: rhs.shape[0], : rhs.shape[0]] -= rhs
    residual = float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
    return CovarianceCheck(kind, theta, residual, asym, True)


# --------------------------------------------------------------------------
# JSON documents


def _complex_pairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).ravel()]


def _from_pairs(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim == 1:
        return arr.astype(complex)
    return arr[..., 0] + 1j * arr[..., 1]


def environment_from_json(doc: dict) -> Environment:
    """Build an environment from ``{"kind": ..., "params": ..., "amplitudes": [[re, im], ...]}``.

    Parameters may also sit at the top level, e.g. ``{"kind": "fock", "n": 1}``.
    """
    kind = doc.get("kind")
    params = doc.get("params") or {k: v for k, v in doc.items() if k not in ("kind", "amplitudes")}
    if kind == "fock":
        return Environment.fock(int(params["n"]))
    if kind == "thermal":
        return Environment.thermal(float(params["nbar"]), params.get("cutoff"))
    if kind == "diagonal":
        return Environment.diagonal(params["p"])
    if kind == "pure":
        return Environment.pure(FockState.normalized(_from_pairs(doc["amplitudes"])))
    if kind == "mixed":
        m = _from_pairs(params["matrix"])
        return Environment.mixed(DensityOperator.from_matrix(m))
    raise DomainError(f"unknown environment kind {kind!r}")


def environment_to_json(env: Environment) -> dict:
    doc: dict = {"kind": env.kind, "params": dict(env.params)}
    if env.kind == "pure":
        doc["amplitudes"] = _complex_pairs(env.vector)
    if env.kind == "mixed":
        m = env.state.matrix
        doc["params"]["matrix"] = [[[float(z.real), float(z.imag)] for z in row] for row in m]
    return doc


def channel_from_json(doc: dict) -> ChannelSpec:
    kind = doc.get("kind", "attenuator")
    env = environment_from_json(doc["environment"])
    extra = {}
    if "max_output_cutoff" in doc:
        extra["max_output_cutoff"] = int(doc["max_output_cutoff"])
    if kind == "attenuator":
        return attenuator(float(doc["eta"]), env, **extra)
    if kind == "amplifier":
        return amplifier(float(doc["gain"]), env, **extra)
    raise DomainError(f"unknown channel kind {kind!r}")


def channel_to_json(channel: ChannelSpec) -> dict:
    key = "eta" if channel.kind == "attenuator" else "gain"
    return {
        "kind": channel.kind,
        key: channel.param,
        "environment": environment_to_json(channel.environment),
    }


def load_channel(text: str) -> ChannelSpec:
    """Parse inline JSON, or read it from a file path."""
    text = text.strip()
    if not text.startswith("{"):
        text = Path(text).read_text()
    return channel_from_json(json.loads(text))
