"""Tanh-sweep photoassociation: exact two-level transition probabilities,
atom-molecule entanglement, and pumped-lossy molecular output statistics."""

from .analytic import (
    CharacteristicEnergies,
    TransitionResult,
    characteristic_energies,
    entanglement_entropy,
    lz_limit,
    molecular_probability,
    survival_probability,
)
from .master import (
    NumberDistribution,
    OutputStats,
    PumpLossParams,
    TailMassError,
    TransitionTable,
    evolve_master,
    master_rhs,
    minimum_levels,
    poisson_pmf,
    statistics,
    steady_state,
    transition_table,
)
from .model import (
    BlockSystem,
    PhysicalParams,
    block_coeffs,
    block_hamiltonian,
    detuning,
    full_hamiltonian,
    reduce_to_block,
)
from .tdse import (
    AmplitudePair,
    IntegrationError,
    PropagationReport,
    VerifyPoint,
    VerifyReport,
    in_regime,
    instantaneous_eigenbasis,
    integrate_schrodinger,
    integrate_sweep,
    propagate,
    verify_dk2,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudePair",
    "BlockSystem",
    "CharacteristicEnergies",
    "IntegrationError",
    "NumberDistribution",
    "OutputStats",
    "PhysicalParams",
    "PropagationReport",
    "PumpLossParams",
    "TailMassError",
    "TransitionResult",
    "TransitionTable",
    "VerifyPoint",
    "VerifyReport",
    "block_coeffs",
    "block_hamiltonian",
    "characteristic_energies",
    "detuning",
    "entanglement_entropy",
    "evolve_master",
    "full_hamiltonian",
    "in_regime",
    "instantaneous_eigenbasis",
    "integrate_schrodinger",
    "integrate_sweep",
    "lz_limit",
    "master_rhs",
    "minimum_levels",
    "molecular_probability",
    "poisson_pmf",
    "propagate",
    "reduce_to_block",
    "statistics",
    "steady_state",
    "survival_probability",
    "transition_table",
    "verify_dk2",
    "__version__",
]
