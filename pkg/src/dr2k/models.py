"""Desk-scale models of rank-2 dynamics and their function-lattice matrices.

Two ingestion formats feed one computational core:

* :class:`FiniteMapModel` -- a finite set of points with two commuting
  surjective maps. On a finite set surjectivity forces bijectivity, so
  these models are invertible; they admit literal orbit/groupoid
  reasoning and the coboundary brute-force oracle.
* :class:`TwoGraphModel` -- a vertex set with two commuting nonnegative
  adjacency matrices, every row nonzero (no sources), standing in for
  the shift maps on the never-materialized infinite path space. The
  identification of the vertex-level kernels/cokernels with the
  path-space function lattice is imported from the prior literature on
  higher-rank graph K-theory, not re-derived here.

Both reduce to a :class:`Rank2MatrixSystem`: a commuting pair of integer
matrices acting on the function lattice Z^n. The fixed convention for
graphs is m_i = a_i transposed; the opposite convention would be equally
consistent but must be global, so it is pinned here.

Invariant subsets: for finite maps, closed under images *and*
pre-images of both maps; for matrix systems, coordinate invariance
(both matrices map the sublattice Z^W into itself), which is exactly
what makes the coordinate inclusion intertwine the restricted and
ambient matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .errors import EnumerationCapError, ModelValidationError
from .exact_linalg import IntMatrix

FROM_FINITE_MAP = "from-finite-map"
FROM_TWO_GRAPH = "from-two-graph"
RAW = "raw"

DEFAULT_ENUMERATION_CAP = 20


def _default_labels(n: int, prefix: str) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(n))


@dataclass(frozen=True)
class FiniteMapModel:
    """Finite point set with two commuting surjective (hence bijective) maps."""

    labels: tuple[str, ...]
    t1: tuple[int, ...]
    t2: tuple[int, ...]

    def __post_init__(self):
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise ModelValidationError("duplicate point labels")
        for name, t in (("t1", self.t1), ("t2", self.t2)):
            if len(t) != n:
                raise ModelValidationError(f"{name} has {len(t)} entries for {n} points")
            for x, y in enumerate(t):
                if not 0 <= y < n:
                    raise ModelValidationError(f"{name}[{x}] = {y} is out of range",
                                               witness=(name, x))
            missing = set(range(n)) - set(t)
            if missing:
                pt = min(missing)
                raise ModelValidationError(
                    f"{name} is not surjective: point {self.labels[pt]!r} has no preimage",
                    witness=(name, pt))
        for x in range(n):
            if self.t1[self.t2[x]] != self.t2[self.t1[x]]:
                raise ModelValidationError(
                    f"maps do not commute at point {self.labels[x]!r}", witness=("commute", x))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def bijective(self) -> bool:
        # surjective self-maps of a finite set are bijective
        return True

    def map(self, which: int) -> tuple[int, ...]:
        if which not in (1, 2):
            raise ModelValidationError(f"map index must be 1 or 2, got {which}")
        return self.t1 if which == 1 else self.t2

    def restrict(self, members: Iterable[int]) -> "FiniteMapModel":
        """Model of the restricted dynamics on an invariant subset."""
        idx = sorted(set(members))
        ok, witness = check_invariant(self, idx)
        if not ok:
            raise ModelValidationError(f"subset is not invariant: {witness}", witness=witness)
        pos = {x: i for i, x in enumerate(idx)}
        return FiniteMapModel(tuple(self.labels[x] for x in idx),
                              tuple(pos[self.t1[x]] for x in idx),
                              tuple(pos[self.t2[x]] for x in idx))

    def orbit_components(self) -> list[tuple[int, ...]]:
        """Orbits of the group generated by t1 and t2, sorted by least point."""
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for x in range(self.n):
            for t in (self.t1, self.t2):
                a, b = find(x), find(t[x])
                if a != b:
                    parent[max(a, b)] = min(a, b)
        groups: dict[int, list[int]] = {}
        for x in range(self.n):
            groups.setdefault(find(x), []).append(x)
        return [tuple(groups[r]) for r in sorted(groups)]

    def is_minimal(self) -> bool:
        """Single orbit of the bijection group: no nontrivial invariant subsets."""
        return len(self.orbit_components()) <= 1


@dataclass(frozen=True)
class TwoGraphModel:
    """Vertex set with two commuting nonnegative adjacency matrices.

    Every row of each matrix must be nonzero (no-source convention), so
    the two shift maps on the path space are surjective.
    """

    labels: tuple[str, ...]
    a1: IntMatrix
    a2: IntMatrix

    def __post_init__(self):
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise ModelValidationError("duplicate vertex labels")
        for name, a in (("a1", self.a1), ("a2", self.a2)):
            if a.rows != n or a.cols != n:
                raise ModelValidationError(f"{name} is {a.rows}x{a.cols}, expected {n}x{n}")
            for i in range(n):
                for j in range(n):
                    if a[i, j] < 0:
                        raise ModelValidationError(
                            f"{name}[{i}][{j}] = {a[i, j]} is negative", witness=(name, i, j))
                if all(a[i, j] == 0 for j in range(n)):
                    raise ModelValidationError(
                        f"{name} row {i} ({self.labels[i]!r}) is zero: "
                        "every vertex needs an outgoing edge of each colour",
                        witness=(name, i))
        prod12 = self.a1 * self.a2
        prod21 = self.a2 * self.a1
        if prod12 != prod21:
            i, j = _first_difference(prod12, prod21)
            raise ModelValidationError(
                f"adjacency matrices do not commute: (a1*a2)[{i}][{j}] = {prod12[i, j]} "
                f"but (a2*a1)[{i}][{j}] = {prod21[i, j]}", witness=("commute", i, j))

    @property
    def n(self) -> int:
        return len(self.labels)


def _first_difference(a: IntMatrix, b: IntMatrix) -> tuple[int, int]:
    for i in range(a.rows):
        for j in range(a.cols):
            if a[i, j] != b[i, j]:
                return i, j
    raise ValueError("matrices are equal")


@dataclass(frozen=True)
class Rank2MatrixSystem:
    """Commuting pair of integer matrices acting on the function lattice Z^n."""

    n: int
    m1: IntMatrix
    m2: IntMatrix
    origin: str = RAW
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", _default_labels(self.n, "x"))
        if len(self.labels) != self.n:
            raise ModelValidationError(f"{len(self.labels)} labels for {self.n} coordinates")
        for name, m in (("m1", self.m1), ("m2", self.m2)):
            if m.rows != self.n or m.cols != self.n:
                raise ModelValidationError(f"{name} is {m.rows}x{m.cols}, expected square of size {self.n}")
        prod12 = self.m1 * self.m2
        prod21 = self.m2 * self.m1
        if prod12 != prod21:
            i, j = _first_difference(prod12, prod21)
            raise ModelValidationError(
                f"matrices do not commute: (m1*m2)[{i}][{j}] = {prod12[i, j]} "
                f"!= (m2*m1)[{i}][{j}] = {prod21[i, j]}", witness=("commute", i, j))

    def matrix(self, which: int) -> IntMatrix:
        if which not in (1, 2):
            raise ModelValidationError(f"matrix index must be 1 or 2, got {which}")
        return self.m1 if which == 1 else self.m2

    def permutation_maps(self) -> Optional[tuple[tuple[int, ...], tuple[int, ...]]]:
        """Recover (t1, t2) when both matrices are permutation matrices.

        The induced matrix of a bijection T has column x supported at
        row T(x), so the maps are recoverable exactly.
        """
        maps = []
        for m in (self.m1, self.m2):
            t = []
            for x in range(self.n):
                col = m.column(x)
                hits = [y for y, v in enumerate(col) if v != 0]
                if len(hits) != 1 or col[hits[0]] != 1:
                    return None
                t.append(hits[0])
            if len(set(t)) != self.n:
                return None
            maps.append(tuple(t))
        return maps[0], maps[1]


@dataclass(frozen=True)
class InvariantSubset:
    """Subset of points/vertices flagged per coordinate, with check status."""

    member_flags: tuple[bool, ...]
    verified: bool = False

    @classmethod
    def from_indices(cls, n: int, members: Iterable[int], verified: bool = False) -> "InvariantSubset":
        mem = set(members)
        bad = [x for x in mem if not 0 <= x < n]
        if bad:
            raise ModelValidationError(f"subset index {bad[0]} out of range for size {n}")
        return cls(tuple(i in mem for i in range(n)), verified)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, f in enumerate(self.member_flags) if f)

    @property
    def size(self) -> int:
        return sum(self.member_flags)

    def complement(self) -> "InvariantSubset":
        return InvariantSubset(tuple(not f for f in self.member_flags), False)

    def is_trivial(self) -> bool:
        return self.size == 0 or self.size == len(self.member_flags)


Subset = Union[InvariantSubset, Iterable[int]]
Model = Union[FiniteMapModel, TwoGraphModel, Rank2MatrixSystem]


def subset_indices(obj: Model, subset: Subset) -> tuple[int, ...]:
    n = obj.n
    if isinstance(subset, InvariantSubset):
        if len(subset.member_flags) != n:
            raise ModelValidationError("subset flag count does not match model size")
        return subset.indices
    idx = sorted(set(int(x) for x in subset))
    if idx and not (0 <= idx[0] and idx[-1] < n):
        raise ModelValidationError(f"subset indices out of range for size {n}")
    return tuple(idx)


def induced_matrix(model: FiniteMapModel, which: int) -> IntMatrix:
    """Matrix of the pushforward on indicator functions: M[y][x] = [T(x) = y].

    Applying it to the indicator vector of a point x yields the
    indicator of T(x), so M*h sums h over preimages, coordinatewise.
    """
    t = model.map(which)
    n = model.n
    return IntMatrix(n, n, tuple(tuple(int(t[x] == y) for x in range(n)) for y in range(n)))


def matrix_system(model: Union[FiniteMapModel, TwoGraphModel]) -> Rank2MatrixSystem:
    """Function-lattice matrices of a model; commuting is re-verified."""
    if isinstance(model, FiniteMapModel):
        return Rank2MatrixSystem(model.n, induced_matrix(model, 1), induced_matrix(model, 2),
                                 origin=FROM_FINITE_MAP, labels=model.labels)
    if isinstance(model, TwoGraphModel):
        return Rank2MatrixSystem(model.n, model.a1.transpose(), model.a2.transpose(),
                                 origin=FROM_TWO_GRAPH, labels=model.labels)
    raise ModelValidationError(f"cannot build a matrix system from {type(model).__name__}")


def check_invariant(obj: Model, subset: Subset) -> tuple[bool, Optional[str]]:
    """Invariance check with a violation witness.

    Finite maps: closed under images and preimages of both maps.
    Matrix systems / graphs: both matrices map Z^W into Z^W (columns
    indexed by W are supported in W).
    """
    idx = subset_indices(obj, subset)
    members = set(idx)
    if isinstance(obj, FiniteMapModel):
        for which in (1, 2):
            t = obj.map(which)
            for x in range(obj.n):
                if x in members and t[x] not in members:
                    return False, (f"t{which} maps member {obj.labels[x]!r} to "
                                   f"non-member {obj.labels[t[x]]!r}")
                if x not in members and t[x] in members:
                    return False, (f"t{which} maps non-member {obj.labels[x]!r} into the subset "
                                   f"(preimage closure fails at {obj.labels[t[x]]!r})")
        return True, None
    system = matrix_system(obj) if isinstance(obj, TwoGraphModel) else obj
    for which in (1, 2):
        m = system.matrix(which)
        for w in idx:
            for v in range(system.n):
                if v not in members and m[v, w] != 0:
                    return False, (f"m{which}[{system.labels[v]!r}][{system.labels[w]!r}] = "
                                   f"{m[v, w]} couples the subset to its complement")
    return True, None


def _closed_sets_of_matrices(system: Rank2MatrixSystem, cap: int) -> list[tuple[int, ...]]:
    """All coordinate-invariant subsets, via the condensation of the support graph."""
    n = system.n
    if n > cap:
        raise EnumerationCapError(
            f"model has {n} coordinates, above the enumeration cap {cap}; "
            "pass an explicit subset instead")
    # support digraph: w -> v whenever some matrix couples w into v
    succ = [set() for _ in range(n)]
    for m in (system.m1, system.m2):
        for w in range(n):
            for v in range(n):
                if m[v, w] != 0:
                    succ[w].add(v)
    comp = _scc(succ)
    k = len(comp)
    comp_succ = [set() for _ in range(k)]
    comp_of = {}
    for ci, members in enumerate(comp):
        for x in members:
            comp_of[x] = ci
    for w in range(n):
        for v in succ[w]:
            if comp_of[w] != comp_of[v]:
                comp_succ[comp_of[w]].add(comp_of[v])
    # reachability closure per component
    closure = []
    for ci in range(k):
        seen = {ci}
        stack = [ci]
        while stack:
            c = stack.pop()
            for d in comp_succ[c]:
                if d not in seen:
                    seen.add(d)
                    stack.append(d)
        closure.append(frozenset(seen))
    out = []
    for mask in range(1 << k):
        chosen = {ci for ci in range(k) if mask >> ci & 1}
        if all(closure[ci] <= chosen for ci in chosen):
            members = sorted(x for ci in chosen for x in comp[ci])
            out.append(tuple(members))
    return sorted(out, key=lambda t: (len(t), t))


def _scc(succ: list[set[int]]) -> list[list[int]]:
    """Strongly connected components (iterative Tarjan), sorted by least member."""
    n = len(succ)
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    counter = 0
    comps: list[list[int]] = []
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, iter(sorted(succ[root])))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] is None:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(sorted(succ[w]))))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return sorted(comps, key=min)


def enumerate_invariant_subsets(obj: Model, cap: int = DEFAULT_ENUMERATION_CAP) -> list[InvariantSubset]:
    """Every invariant subset, smallest first.

    For finite-map models these are exactly the unions of orbit
    components (2^components subsets); for matrix systems they are the
    successor-closed coordinate sets of the support digraph.
    """
    n = obj.n
    if isinstance(obj, FiniteMapModel):
        if n > cap:
            raise EnumerationCapError(
                f"model has {n} points, above the enumeration cap {cap}; "
                "pass an explicit subset instead")
        comps = obj.orbit_components()
        subsets = []
        for mask in range(1 << len(comps)):
            members = sorted(x for ci, c in enumerate(comps) if mask >> ci & 1 for x in c)
            subsets.append(tuple(members))
        chosen = sorted(subsets, key=lambda t: (len(t), t))
    else:
        system = matrix_system(obj) if isinstance(obj, TwoGraphModel) else obj
        chosen = _closed_sets_of_matrices(system, cap)
    return [InvariantSubset.from_indices(n, members, verified=True) for members in chosen]


def restrict(system: Rank2MatrixSystem, subset: Subset) -> Rank2MatrixSystem:
    """Principal submatrices on an invariant subset (the ideal piece)."""
    idx = subset_indices(system, subset)
    ok, witness = check_invariant(system, idx)
    if not ok:
        raise ModelValidationError(f"subset is not invariant: {witness}", witness=witness)
    return Rank2MatrixSystem(len(idx),
                             system.m1.submatrix(idx, idx),
                             system.m2.submatrix(idx, idx),
                             origin=system.origin,
                             labels=tuple(system.labels[i] for i in idx))


def corestrict_complement(system: Rank2MatrixSystem, subset: Subset) -> Rank2MatrixSystem:
    """Principal submatrices on the complement (the quotient piece)."""
    idx = subset_indices(system, subset)
    ok, witness = check_invariant(system, idx)
    if not ok:
        raise ModelValidationError(f"subset is not invariant: {witness}", witness=witness)
    rest = tuple(i for i in range(system.n) if i not in set(idx))
    return Rank2MatrixSystem(len(rest),
                             system.m1.submatrix(rest, rest),
                             system.m2.submatrix(rest, rest),
                             origin=system.origin,
                             labels=tuple(system.labels[i] for i in rest))
