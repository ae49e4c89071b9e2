"""K-zero of a rank-2 system as cokernel-plus-kernel of integer blocks.

For a commuting pair (m1, m2) on Z^n the group K0 sits in a short exact
sequence

    0 -> coker(1-m1 | 1-m2) --j--> K0 --tau--> ker((1-m1 ; 1-m2)) -> 0

whose kernel term is a subgroup of Z^n and hence free, so the sequence
splits. This module fixes the direct-sum presentation of the middle
group, builds j and tau as the coordinate inclusion and projection, and
machine-verifies every structural claim at construction: injectivity,
surjectivity, tau after j vanishing, exactness, and the splitting
arithmetic. Only j, tau and the (trivial) extension class are
canonical; the splitting itself is a choice.

An invariant coordinate subset W induces a morphism of these sequences:
the coordinate inclusion Z^W -> Z^n descends to the cokernels, restricts
to the kernel lattices, and the middle map is assembled blockwise with a
zero off-diagonal block. The diagram constraints (both squares commute,
rows exact, right vertical injective) are verified, not assumed; they
pin the middle map down only up to a homomorphism from the kernel part
into the cokernel part, which the zero block silently fixes -- reports
flag this.

All groups live in indicator coordinates: generators are point/vertex
indicator functions, so the identifications between function-lattice
and K-theory pictures are the identity of the representation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .abelian import (
    FgAbGroup,
    GroupHom,
    cokernel,
    compose,
    equal_as_maps,
    is_exact_at,
    is_injective,
    is_surjective,
    is_well_defined,
    kernel_lattice,
    zero_hom,
)
from .errors import InternalConsistencyError, ModelValidationError
from .exact_linalg import (
    HermiteLattice,
    IntMatrix,
    hstack,
    kernel_basis,
    lattice_contains,
    lattice_of_columns,
    vstack,
)
from .models import InvariantSubset, Rank2MatrixSystem, Subset, check_invariant, restrict, subset_indices

SPLITTING_NOTE = (
    "K0 is presented as coker + ker via a chosen splitting; the kernel part is free, "
    "so a splitting exists, but only j, tau and the trivial extension class are canonical."
)

MIDDLE_MAP_NOTE = (
    "The middle vertical map uses a zero off-diagonal block relative to the chosen "
    "splittings; the diagram determines it only up to a homomorphism from the kernel "
    "part of the subsystem into the cokernel part of the ambient system."
)


@dataclass(frozen=True)
class K0Data:
    """K0 of a rank-2 system, with its verified short exact sequence."""

    system: Rank2MatrixSystem
    coker_part: FgAbGroup
    ker_part: FgAbGroup
    ker_basis: IntMatrix
    j: GroupHom
    tau: GroupHom
    k0: FgAbGroup
    splitting_note: str = SPLITTING_NOTE

    @property
    def iso_type(self) -> tuple[int, tuple[int, ...]]:
        return self.k0.iso_type

    def describe(self) -> str:
        return self.k0.describe()


def one_minus(system: Rank2MatrixSystem, which: int) -> IntMatrix:
    return IntMatrix.identity(system.n) - system.matrix(which)


def block_row(system: Rank2MatrixSystem) -> IntMatrix:
    """The n x 2n block (1-m1 | 1-m2)."""
    return hstack(one_minus(system, 1), one_minus(system, 2))


def block_column(system: Rank2MatrixSystem) -> IntMatrix:
    """The 2n x n stacked matrix (1-m1 ; 1-m2)."""
    return vstack(one_minus(system, 1), one_minus(system, 2))


def k0_of_system(system: Rank2MatrixSystem) -> K0Data:
    """Compute K0 with its split short exact sequence, fully verified."""
    n = system.n
    coker_part, _ = cokernel(block_row(system))
    kb = kernel_basis(block_column(system))
    r = kb.cols
    ker_part = FgAbGroup.free(r)
    k0 = FgAbGroup(n + r, vstack(coker_part.relations, IntMatrix.zeros(r, coker_part.relations.cols)))
    j = GroupHom(coker_part, k0, vstack(IntMatrix.identity(n), IntMatrix.zeros(r, n)))
    tau = GroupHom(k0, ker_part, hstack(IntMatrix.zeros(r, n), IntMatrix.identity(r)))
    data = K0Data(system=system, coker_part=coker_part, ker_part=ker_part,
                  ker_basis=kb, j=j, tau=tau, k0=k0)
    verify_k0(data)
    return data


def verify_k0(data: K0Data) -> dict[str, bool]:
    """Machine-check every structural claim behind a K0 computation.

    Raises InternalConsistencyError on the first failure; returns the
    record of checks otherwise.
    """
    b1, b2 = one_minus(data.system, 1), one_minus(data.system, 2)
    checks = {
        "one_minus_commute": b1 * b2 == b2 * b1,
        "j_well_defined": is_well_defined(data.j),
        "tau_well_defined": is_well_defined(data.tau),
        "j_injective": is_injective(data.j),
        "tau_surjective": is_surjective(data.tau),
        "tau_after_j_zero": equal_as_maps(compose(data.tau, data.j),
                                          zero_hom(data.coker_part, data.ker_part)),
        "exact_at_middle": is_exact_at(data.j, data.tau),
        "kernel_part_free": data.ker_part.torsion == (),
        "splitting_type_consistent": data.k0.iso_type
        == (data.coker_part.free_rank + data.ker_part.free_rank, data.coker_part.torsion),
    }
    for name, ok in checks.items():
        if not ok:
            raise InternalConsistencyError(f"K0 verification failed: {name}")
    return checks


def blockmatrix_reduction_check(system: Rank2MatrixSystem) -> bool:
    """Verify the two-step reduction against the one-shot block computation.

    (i) Modding out by the image of 1-m1 first and then by the induced
    action of 1-m2 yields the same cokernel (same invariant factors,
    with the identity lift an isomorphism of presentations) as the
    block (1-m1 | 1-m2).

    (ii) The kernel of 1-m2 restricted to ker(1-m1) equals the kernel
    of the stacked matrix, as sublattices of Z^n.

    Both identities are computed independently on each side; any
    discrepancy falsifies the implementation, so failures raise.
    """
    b1, b2 = one_minus(system, 1), one_minus(system, 2)

    # (i) iterated cokernel
    first, _ = cokernel(b1)
    induced = GroupHom(first, first, b2)
    if not is_well_defined(induced):
        raise InternalConsistencyError(
            "1-m2 does not descend to coker(1-m1); the pair cannot commute")
    iterated_relations = hstack(induced.lift, first.relations)
    iterated_coker = FgAbGroup(system.n, iterated_relations)
    block_coker, _ = cokernel(block_row(system))
    identity_map = GroupHom(iterated_coker, block_coker, IntMatrix.identity(system.n))
    cokernels_match = (
        iterated_coker.iso_type == block_coker.iso_type
        and is_well_defined(identity_map)
        and is_injective(identity_map)
        and is_surjective(identity_map)
    )

    # (ii) iterated kernel
    k1 = kernel_basis(b1)
    image_in_kernel = b2 * k1
    lat1 = HermiteLattice(system.n, k1)
    coeff_cols = []
    for j in range(image_in_kernel.cols):
        inside, cert = lattice_contains(lat1, image_in_kernel.column(j))
        if not inside:
            raise InternalConsistencyError("1-m2 does not preserve ker(1-m1)")
        coeff_cols.append(cert)
    restricted = IntMatrix.from_columns(coeff_cols, rows=k1.cols)
    inner = kernel_basis(restricted)
    iterated_kernel = lattice_of_columns(k1 * inner)
    stacked_kernel = lattice_of_columns(kernel_basis(block_column(system)))
    kernels_match = iterated_kernel == stacked_kernel

    return cokernels_match and kernels_match


@dataclass(frozen=True)
class SesMorphism:
    """Morphism of the two K0 sequences induced by an invariant subset.

    ``top`` is the subsystem (ideal) row, ``bottom`` the ambient row;
    the vertical maps are the coordinate inclusion on cokernels, the
    block map on the middle groups, and the restriction of the
    inclusion to kernel lattices on the right. ``checks`` records the
    verified diagram properties.
    """

    top: K0Data
    bottom: K0Data
    v_left: GroupHom
    v_mid: GroupHom
    v_right: GroupHom
    checks: tuple[tuple[str, bool], ...]
    middle_map_note: str = MIDDLE_MAP_NOTE

    def check(self, name: str) -> bool:
        return dict(self.checks)[name]


def inclusion_matrix(n: int, indices: tuple[int, ...]) -> IntMatrix:
    """Coordinate inclusion Z^indices -> Z^n as an n x len(indices) matrix."""
    return IntMatrix(n, len(indices),
                     tuple(tuple(int(v == w) for w in indices) for v in range(n)))


def ideal_morphism(system: Rank2MatrixSystem, subset: Subset) -> SesMorphism:
    """The morphism of short exact sequences induced by an invariant subset.

    Every structural property is re-verified after construction; a
    failure would falsify the implementation (not the input) and raises
    InternalConsistencyError.
    """
    idx = subset_indices(system, subset)
    ok, witness = check_invariant(system, idx)
    if not ok:
        raise ModelValidationError(f"subset is not invariant: {witness}", witness=witness)

    top = k0_of_system(restrict(system, idx))
    bottom = k0_of_system(system)
    iota = inclusion_matrix(system.n, idx)

    v_left = GroupHom(top.coker_part, bottom.coker_part, iota)

    pushed = iota * top.ker_basis
    bottom_kernel = HermiteLattice(system.n, bottom.ker_basis)
    coeff_cols = []
    for j in range(pushed.cols):
        inside, cert = lattice_contains(bottom_kernel, pushed.column(j))
        if not inside:
            raise InternalConsistencyError(
                "inclusion does not map the restricted kernel into the ambient kernel")
        coeff_cols.append(cert)
    v_right_lift = IntMatrix.from_columns(coeff_cols, rows=bottom.ker_basis.cols)
    v_right = GroupHom(top.ker_part, bottom.ker_part, v_right_lift)

    w, r_top = len(idx), top.ker_basis.cols
    n, r_bot = system.n, bottom.ker_basis.cols
    mid_lift = vstack(hstack(iota, IntMatrix.zeros(n, r_top)),
                      hstack(IntMatrix.zeros(r_bot, w), v_right_lift))
    v_mid = GroupHom(top.k0, bottom.k0, mid_lift)

    checks = (
        ("v_left_well_defined", is_well_defined(v_left)),
        ("v_mid_well_defined", is_well_defined(v_mid)),
        ("v_right_well_defined", is_well_defined(v_right)),
        ("left_square_commutes", equal_as_maps(compose(v_mid, top.j), compose(bottom.j, v_left))),
        ("right_square_commutes", equal_as_maps(compose(bottom.tau, v_mid), compose(v_right, top.tau))),
        ("top_row_exact", is_exact_at(top.j, top.tau) and is_injective(top.j) and is_surjective(top.tau)),
        ("bottom_row_exact", is_exact_at(bottom.j, bottom.tau) and is_injective(bottom.j) and is_surjective(bottom.tau)),
        ("v_right_injective", is_injective(v_right)),
    )
    for name, good in checks:
        if not good:
            raise InternalConsistencyError(f"ideal morphism verification failed: {name}")
    return SesMorphism(top=top, bottom=bottom, v_left=v_left, v_mid=v_mid, v_right=v_right,
                       checks=checks)


def report_k0(data: K0Data) -> dict:
    """Structured report: abstract type, generators, kernel basis, checks.

    Cokernel generators are listed as classes of indicator functions of
    the points/vertices carrying the presentation.
    """
    checks = verify_k0(data)
    labels = data.system.labels
    return {
        "group": data.describe(),
        "free_rank": data.k0.free_rank,
        "torsion": list(data.k0.torsion),
        "cokernel_part": {
            "group": data.coker_part.describe(),
            "free_rank": data.coker_part.free_rank,
            "torsion": list(data.coker_part.torsion),
            "generators": [f"[1_{label}]" for label in labels],
            "relation_basis_columns": [list(col) for col in data.coker_part.relations.columns()],
        },
        "kernel_part": {
            "rank": data.ker_part.free_rank,
            "basis_columns": [list(col) for col in data.ker_basis.columns()],
        },
        "sequence": {
            "shape": "0 -> coker(1-m1|1-m2) -> K0 -> ker(1-m1;1-m2) -> 0",
            "verified": {name: bool(ok) for name, ok in sorted(checks.items())},
            "splitting_note": data.splitting_note,
        },
    }
