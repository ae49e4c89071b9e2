"""Finitely generated abelian groups as integer presentations.

A group is Z^ambient_rank modulo the column lattice of a relation
matrix; a homomorphism is an integer lift matrix between the ambient
free groups that maps relators into relators. Kernels, images,
exactness and diagram commutativity all reduce to canonical-lattice
computations in :mod:`dr2k.exact_linalg`.

Presentations are concrete on purpose: generators are the ambient
coordinate vectors (point or vertex indicator functions downstream),
and maps are only meaningful relative to those generators. Relation
matrices are canonicalized to the Hermite column basis at construction,
so two groups are the *same presentation* iff they compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import DimensionMismatchError
from .exact_linalg import (
    HermiteLattice,
    IntMatrix,
    hstack,
    lattice_contains,
    lattice_of_columns,
    smith_normal_form,
    kernel_basis,
)


@dataclass(frozen=True)
class FgAbGroup:
    """Z^ambient_rank / (column lattice of ``relations``).

    ``relations`` is stored as the canonical Hermite basis of the
    relation lattice, so equal presentations compare equal. The derived
    ``free_rank`` and ``torsion`` (d1 | d2 | ..., each >= 2) classify
    the abstract isomorphism type.
    """

    ambient_rank: int
    relations: IntMatrix
    free_rank: int = field(init=False, compare=False)
    torsion: tuple[int, ...] = field(init=False, compare=False)

    def __post_init__(self):
        if self.relations.rows != self.ambient_rank:
            raise DimensionMismatchError("relation matrix rows != ambient rank")
        canonical = lattice_of_columns(self.relations).basis
        object.__setattr__(self, "relations", canonical)
        snf = smith_normal_form(canonical)
        object.__setattr__(self, "free_rank", self.ambient_rank - snf.rank)
        object.__setattr__(self, "torsion",
                           tuple(d for d in snf.invariant_factors if d > 1))

    @classmethod
    def free(cls, rank: int) -> "FgAbGroup":
        return cls(rank, IntMatrix.zeros(rank, 0))

    @classmethod
    def cyclic(cls, order: int) -> "FgAbGroup":
        """Z/order for order >= 1 (order 1 is the trivial group)."""
        return cls(1, IntMatrix.from_rows([[order]]))

    @property
    def relation_lattice(self) -> HermiteLattice:
        return HermiteLattice(self.ambient_rank, self.relations)

    @property
    def iso_type(self) -> tuple[int, tuple[int, ...]]:
        return self.free_rank, self.torsion

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def order(self) -> Optional[int]:
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def describe(self) -> str:
        """Human form of the abstract type, e.g. ``Z^2 x Z/4``."""
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " x ".join(parts) if parts else "0"


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism presented by an integer lift between ambient groups.

    Construction validates shapes only; use :func:`is_well_defined` to
    check that the lift respects relations. Pipeline code that builds
    homs it believes in should assert well-definedness right away.
    """

    domain: FgAbGroup
    codomain: FgAbGroup
    lift: IntMatrix

    def __post_init__(self):
        if self.lift.rows != self.codomain.ambient_rank or self.lift.cols != self.domain.ambient_rank:
            raise DimensionMismatchError(
                f"lift is {self.lift.rows}x{self.lift.cols}, expected "
                f"{self.codomain.ambient_rank}x{self.domain.ambient_rank}")

    def __call__(self, v) -> tuple[int, ...]:
        """Apply to an ambient vector of the domain."""
        return self.lift.apply(v)


def identity_hom(group: FgAbGroup) -> GroupHom:
    return GroupHom(group, group, IntMatrix.identity(group.ambient_rank))


def zero_hom(domain: FgAbGroup, codomain: FgAbGroup) -> GroupHom:
    return GroupHom(domain, codomain, IntMatrix.zeros(codomain.ambient_rank, domain.ambient_rank))


def is_well_defined(f: GroupHom) -> bool:
    """True iff the lift maps every domain relator into the codomain relations."""
    target = f.codomain.relation_lattice
    for j in range(f.domain.relations.cols):
        image = f.lift.apply(f.domain.relations.column(j))
        if not lattice_contains(target, image)[0]:
            return False
    return True


def _require_same_presentation(a: FgAbGroup, b: FgAbGroup, what: str) -> None:
    if a != b:
        raise DimensionMismatchError(f"{what}: presentations differ")


def compose(g: GroupHom, f: GroupHom) -> GroupHom:
    """g after f; the middle presentations must be the same object-wise."""
    _require_same_presentation(f.codomain, g.domain, "compose")
    return GroupHom(f.domain, g.codomain, g.lift * f.lift)


def cokernel(a: IntMatrix) -> tuple[FgAbGroup, GroupHom]:
    """Z^rows / (column lattice of ``a``) with the canonical projection.

    The projection is the identity lift from the free group on the same
    generators; its codomain just carries the new relations.
    """
    group = FgAbGroup(a.rows, a)
    projection = GroupHom(FgAbGroup.free(a.rows), group, IntMatrix.identity(a.rows))
    return group, projection


def _preimage_lattice(lift: IntMatrix, target: IntMatrix) -> IntMatrix:
    """Generators of {x : lift*x in column-lattice(target)}.

    Solved through the combined kernel of [lift | -target]: its
    solutions (x, y) satisfy lift*x = target*y, and the x-projections
    generate the preimage subgroup.
    """
    combined = hstack(lift, -target) if target.cols else lift
    full_kernel = kernel_basis(combined)
    top = full_kernel.submatrix(range(lift.cols), range(full_kernel.cols))
    return lattice_of_columns(top).basis


def kernel_lattice(f: GroupHom) -> HermiteLattice:
    """Ambient lattice {x in Z^da : f(x) = 0 in the codomain}.

    Always contains the domain relations when f is well defined.
    """
    basis = _preimage_lattice(f.lift, f.codomain.relations)
    return HermiteLattice(f.domain.ambient_rank, basis)


def kernel_subgroup(f: GroupHom) -> tuple[FgAbGroup, GroupHom]:
    """The kernel as a presented group plus its inclusion into the domain.

    The subgroup is carried by a saturating lift: its generators are
    the canonical basis vectors of the ambient kernel lattice, and its
    relations are the coefficients that land in the domain relations.
    """
    if not is_well_defined(f):
        raise ValueError("kernel_subgroup: hom is not well defined")
    ambient = kernel_lattice(f)
    inclusion_lift = ambient.basis
    relations = _preimage_lattice(inclusion_lift, f.domain.relations)
    sub = FgAbGroup(inclusion_lift.cols, relations)
    return sub, GroupHom(sub, f.domain, inclusion_lift)


def image_subgroup(f: GroupHom) -> HermiteLattice:
    """Image of f in codomain ambient coordinates, joined with relations."""
    if not is_well_defined(f):
        raise ValueError("image_subgroup: hom is not well defined")
    return lattice_of_columns(hstack(f.lift, f.codomain.relations))


def equal_as_maps(f: GroupHom, g: GroupHom) -> bool:
    """True iff f and g agree on every generator, modulo relations."""
    _require_same_presentation(f.domain, g.domain, "equal_as_maps (domain)")
    _require_same_presentation(f.codomain, g.codomain, "equal_as_maps (codomain)")
    diff = f.lift - g.lift
    target = f.codomain.relation_lattice
    return all(lattice_contains(target, diff.column(j))[0] for j in range(diff.cols))


def is_exact_at(f: GroupHom, g: GroupHom) -> bool:
    """Exactness at the middle of domain(f) -> B -> codomain(g)."""
    _require_same_presentation(f.codomain, g.domain, "is_exact_at")
    return image_subgroup(f) == kernel_lattice(g)


def is_injective(f: GroupHom) -> bool:
    """Trivial kernel: the ambient kernel lattice is exactly the relations."""
    return kernel_lattice(f) == f.domain.relation_lattice


def is_surjective(f: GroupHom) -> bool:
    """Image plus relations is the whole ambient lattice of the codomain."""
    return image_subgroup(f).is_full() or f.codomain.ambient_rank == 0
