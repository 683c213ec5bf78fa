"""Cloning and universal-NOT fidelities from conservation-law bookkeeping."""

from .cloning_machine import (
    CoefficientVector,
    FidelityReport,
    OutcomeDistribution,
    build_output_state,
    clonot_residual,
    fidelity_clone,
    fidelity_not,
    fidelity_report,
    input_state,
    not_from_clone,
    outcome_distribution,
)
from .conservation import (
    CloneSpec,
    LedgerReport,
    ReservoirExhausted,
    angular_momentum,
    audit,
    check_constraint,
    min_ancillas,
    reservoir_after,
    validate_emission_ledger,
)
from .fock_algebra import (
    Kind,
    OccupationConfig,
    QubitAmplitudes,
    SectorState,
    equivalence_overlap,
    mode_expand,
    sym_expand,
    tensor,
)
from .universal_machines import (
    DensityOperator,
    SymmetricProjector,
    haar_moment,
    optimal_clone_fidelity,
    optimal_not_fidelity,
    projection_cloner,
    single_copy_fidelity,
    sym_projector,
    universality_check,
    zeros_distribution,
)

__version__ = "0.1.0"
