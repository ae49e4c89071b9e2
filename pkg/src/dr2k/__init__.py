"""Exact K0 and stable-finiteness calculator for rank-2 Deaconu-Renault dynamics.

The public surface re-exports the domain types and operations of the
submodules; everything is immutable, pure, and exact (integer and
rational arithmetic only).
"""

__version__ = "0.1.0"

from .errors import (
    DimensionMismatchError,
    Dr2kError,
    EnumerationCapError,
    InternalConsistencyError,
    ModelValidationError,
    NotApplicableError,
)
from .exact_linalg import (
    ConeWitness,
    HermiteLattice,
    IntMatrix,
    SmithForm,
    determinant,
    hermite_column_basis,
    hstack,
    kernel_basis,
    lattice_contains,
    lattice_of_columns,
    reduce_mod_lattice,
    smith_normal_form,
    solve_integer,
    subspace_meets_positive_cone,
    vstack,
    xgcd,
)
from .abelian import (
    FgAbGroup,
    GroupHom,
    cokernel,
    compose,
    equal_as_maps,
    identity_hom,
    image_subgroup,
    is_exact_at,
    is_injective,
    is_surjective,
    is_well_defined,
    kernel_lattice,
    kernel_subgroup,
    zero_hom,
)
from .models import (
    FiniteMapModel,
    InvariantSubset,
    Rank2MatrixSystem,
    TwoGraphModel,
    check_invariant,
    corestrict_complement,
    enumerate_invariant_subsets,
    induced_matrix,
    matrix_system,
    restrict,
)
from .ktheory import (
    K0Data,
    SesMorphism,
    block_column,
    block_row,
    blockmatrix_reduction_check,
    ideal_morphism,
    k0_of_system,
    report_k0,
)
from .finiteness import (
    CoboundaryLattice,
    ConditionMWitness,
    MatrixConditionResult,
    Verdict,
    check_prop_C_equals_M,
    coboundary_lattice,
    condition_m,
    condition_m_bruteforce,
    recommended_k_bound,
    sf_verdict,
)

__all__ = [name for name in dir() if not name.startswith("_")]
