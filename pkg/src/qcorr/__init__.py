"""Finite-dimensional toolkit treating subsystem correlations as the state."""

__version__ = "0.1.0"

from .correlations import (
    ConditionalDistribution,
    JointDistribution,
    conditional,
    is_trivial,
    joint_distribution,
    marginal,
    marginal_consistency_report,
    product_mean,
)
from .hardy import hardy_joint_tables, hardy_state, maximize_paradox, paradox_report
from .linalg import (
    hermitian_eig,
    partial_trace,
    tensor,
    unitary_fractional_power,
    validate_density,
)
from .measurement import (
    build_setup,
    cross_phase_correlation,
    evolve_partial,
    final_state,
    outcome_distribution,
    specimen_post_state,
    undo_measurement,
)
from .operators import (
    Observable,
    hermitian_basis,
    pauli,
    projector,
    rotated_qubit_pair,
    singlet_projector,
)
from .ssc import (
    CorrelationTable,
    correlation_table,
    purity_witness,
    reconstruct,
    singlet_from_anticorrelations,
    verify_pure_implies_product,
)
from .states import density_from_ket, eigen_mixture, purity, relative_state, schmidt
