"""Monte Carlo phase-space symbols of Schrodinger-type semigroups.

The package samples the path-integral representation of the semigroup
exp(-tH), H = -Laplacian + V with V >= 0, to estimate its phase-space
(Weyl) symbol and the symbol's derivatives, cross-checks everything against
a low-dimensional grid oracle, and verifies the closed-form sup, moment,
integral, and commutator-trace bounds the representation implies.
"""

from .brownian import (
    DEFAULT_PRESET,
    DiscretePath,
    VariancePreset,
    abs_moment_constant,
    abs_moment_max,
    absolute_moment_product,
    sample_path,
    sample_path_batch,
)
from .bounds import (
    BoundReport,
    DivergentIntegralError,
    SymbolClassParams,
    check_l1_bound,
    check_linf,
    check_mixed_derivative_bound,
    check_xi_derivative_bounds,
    class_membership,
)
from .commutator import (
    AliasingError,
    CommutatorTraceResult,
    ScalingFit,
    WeylObservable,
    commutator_trace,
    gaussian_state_symbol,
    op_weyl_matrix,
    scaling_fit,
)
from .faadibruno import (
    FaaDiBrunoTerm,
    derivative_of_exponential,
    mixed_derivative_bound,
    multiindex_partitions,
)
from .multiindex import (
    MultiIndex,
    ZERO_INDEX,
    from_text,
    has_max_order,
    leq,
    sub_multiindices,
)
from .oracle import (
    DecayError,
    Grid,
    GridOracle,
    GridSemigroup,
    PhaseSpaceTable,
    SupportError,
    build_hamiltonian,
    free_symbol,
    pairing_check,
    semigroup,
    weyl_symbol_from_kernel,
    wigner,
)
from .potentials import (
    CustomPotential,
    MeanFieldPotential,
    NearestNeighborPotential,
    PotentialFamily,
    PotentialSpec,
    ScalarFunction,
    ZeroPotential,
    cosine_function,
    constant_function,
    gaussian_bump_function,
    harmonic_function,
    lorentzian_function,
    mean_field_family,
    nearest_neighbor_chain_family,
    potential_from_json,
    scalar_from_json,
    zero_function,
)
from .symbol_estimator import (
    PhasePoint,
    SymbolEstimate,
    estimate_mixed_derivative,
    estimate_u,
    estimate_x_derivative,
    estimate_xi_derivative,
    path_action,
)

__version__ = "0.1.0"
