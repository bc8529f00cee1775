"""Entanglement measures of rotationally symmetric spin-j x spin-1/2 states.

Closed-form entanglement of formation, I-concurrence, tangle, negativity,
and convex-roof-extended negativity for the one-parameter SU(2)-invariant
family, together with brute-force numerical verifiers and twirling tools.
"""

from .spin_algebra import (
    HALF,
    CoupledBasis,
    Rotation,
    Spin,
    SpinOperators,
    coupled_basis,
    haar_rotation,
    spin_operators,
    wigner_rotation,
)
from .states import (
    DensityMatrix,
    PureState,
    SchmidtData,
    SymmetricState,
    chi_state,
    partial_trace,
    partial_transpose_b,
    phi_product_state,
    psi_mu_u,
    rho_p,
    schmidt,
    separability_threshold,
    subspace_overlaps,
    trace_distance,
    twirl_exact,
    twirl_monte_carlo,
)
from .measures import (
    MeasureKind,
    MeasureReport,
    binary_entropy,
    concurrence_pure,
    cr_negativity,
    eof,
    epsilon,
    epsilon_second_derivative,
    f_extremum,
    i_concurrence,
    mu_min,
    negativity,
    negativity_closed_form,
    p_mu,
    pt_eigenvalues_closed_form,
    pure_entanglement,
    tangle,
)
from .oracle import (
    EnsembleDecomposition,
    OptimizerConfig,
    OracleResult,
    convex_hull_1d,
    convex_roof_numeric,
    max_p_mu_over_u,
    min_epsilon_numeric,
    probe_p_mu_bound,
)

__version__ = "0.1.0"
