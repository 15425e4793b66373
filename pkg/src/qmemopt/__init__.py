"""Memory costs of simulating stationary stochastic processes, classical and quantum."""

from .advantage import (
    AmbiguityReport,
    DimensionalCertificate,
    OptimizationResult,
    ambiguity_report,
    default_alpha_beta_pairs,
    dimensional_feasibility,
    find_certificate,
    minimize_cq,
    phase_pair_scan,
    recover_phases,
    search_ambiguity,
    zero_phase_spectrum,
)
from .circuit import (
    MemoryStateSet,
    ModelVerification,
    UnitaryModel,
    build_unitary,
    embed_states,
    exact_word_distribution,
    sample_trajectory,
    verify_model,
)
from .errors import (
    InconsistentGramError,
    InvalidProcessError,
    NoBranchError,
    NotConvergedError,
    NotMarkovError,
    NotPSDError,
    QmemoptError,
    ReducibleProcessError,
    TooLargeError,
    WrongArityError,
)
from .families import (
    mixed_cycle,
    octant_process,
    quasi_cycle,
    random_markov,
    random_unifilar,
    slippage_cycle,
    slippage_dependence,
    slippage_line_delta,
)
from .gram import (
    MemorySpectrum,
    OverlapMatrix,
    PhaseAssignment,
    brute_force_fidelity,
    fixed_point_overlaps,
    markov_overlaps,
    memory_spectrum,
    weighted_gram,
)
from .process import (
    StationaryDistribution,
    StochasticProcess,
    Transition,
    ValidationReport,
    c_mu,
    d_mu,
    markov_process,
    merge_equivalent_states,
    process_from_dict,
    process_sha256,
    process_to_dict,
    shannon_entropy_bits,
    stationary_distribution,
    synchronization_entropy,
    validate,
    word_distribution,
)
from .sweep import (
    SweepConfig,
    SweepReport,
    enumerate_octant_grid,
    octant_points,
    sample_entropic,
    sample_feasible_cells,
    sweep_dimensional,
)

__version__ = "0.1.0"
