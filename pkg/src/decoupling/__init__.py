"""Exact small-register simulator for deterministic (bang-bang), stochastic
(PAREC), and embedded dynamical-decoupling schemes."""

from .analysis import (
    BoundInputs,
    FitResult,
    det_bound,
    det_decay_approx,
    embedded_bound,
    embedded_rate,
    fit_decay_rate,
    fit_loglog_slope,
    free_decay_approx,
    parec_bound,
    parec_rate,
    residual_norm_bound,
)
from .engine import (
    FidelityTrace,
    PropagatorCache,
    build_cache,
    cycle_propagator,
    evolve,
    evolve_embedded_fast,
    monte_carlo,
    residual_hamiltonian,
)
from .linalg import (
    BranchAmbiguityError,
    DenseOperator,
    Spectrum,
    expm_hermitian,
    hermitian_eig,
    matvec,
    spectral_norm,
    unitary_log,
)
from .model import (
    CouplingGraph,
    PauliSumHamiltonian,
    PerturbationParams,
    build_hamiltonian,
    conjugate_by_pauli,
    energy_uncertainty,
    grid_graph,
    initial_coherent_state,
    sample_params,
)
from .pauli import PauliString, apply, compose, conj_sign, sample_uniform
from .schemes import (
    DecouplingCycle,
    SchemeSpec,
    SymbolArray,
    construct_oa,
    cycle_from_array,
    frame_sequence,
    verify_decoupling,
    verify_orthogonal_array,
)

__version__ = "0.1.0"
