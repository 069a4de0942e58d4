"""Capacity bounds and minimum output entropy of non-Gaussian bosonic channels.

Attenuators and amplifiers whose environment is an arbitrary (non-Gaussian)
state are simulated in a truncated Fock basis.  The capacity is bracketed
between the capacity of the Gaussian-equivalent channel and that value plus
the gap in minimum output entropies.
"""

from .channels import (
    ChannelSpec,
    Environment,
    amplifier,
    apply,
    apply_pure,
    attenuator,
    channel_from_json,
    channel_to_json,
    covariance_check,
    fock_attenuator,
    gaussian_equivalent,
    load_channel,
    output_spectrum,
    phase_covariant_attenuator,
)
from .classical_baseline import (
    NoiseDensity,
    classical_capacity_gaussian,
    delta_classical,
    differential_entropy,
    mutual_information_gaussian_input,
    noise_from_json,
)
from .entropy_capacity import (
    CapacityInterval,
    DeltaMax,
    capacity_gaussian,
    capacity_interval,
    delta_max,
    g_function,
    holevo_coherent_ensemble,
    relative_entropy,
    von_neumann_entropy,
)
from .errors import DomainError, InvalidStateError, NonConvergenceError, TruncationError
from .fock_core import DensityOperator, FockState, make_coherent, make_fock, make_thermal
from .gaussian_unitaries import (
    beam_splitter,
    displacement,
    reflection,
    rotation,
    squeezed_vacuum,
    squeezing,
    two_mode_squeezer,
)
from .moe_search import (
    MoeParams,
    MoeReport,
    Symmetry,
    coherent_fidelity,
    haar_random_state,
    minimize_output_entropy,
    minimize_symmetric,
    output_entropy,
    squeezed_state_scan,
    symmetry_residuals,
)
from .wigner_render import WignerGrid, wigner, wigner_at

__version__ = "0.1.0"
