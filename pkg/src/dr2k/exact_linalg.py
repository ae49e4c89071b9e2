"""Exact integer and rational linear algebra.

Smith and Hermite normal forms, integer kernel bases, canonical column
lattices with membership certificates, and an exact rational simplex
used to decide whether the rational span of a lattice meets the closed
positive orthant anywhere besides the origin.

Everything runs on Python ints and ``fractions.Fraction``; no floating
point is used anywhere, so results are exact at every scale.

Canonical Hermite convention (fixed, because lattice equality is tested
by literal basis equality): column-style, pivot rows strictly
increasing, pivots positive, and within each pivot row the entries of
earlier columns are reduced into ``[0, pivot)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from .errors import DimensionMismatchError, InternalConsistencyError

Vec = tuple[int, ...]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with g = gcd(a, b) >= 0 and s*a + t*b = g."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@dataclass(frozen=True)
class IntMatrix:
    """Immutable arbitrary-precision integer matrix, row-major."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionMismatchError("negative dimensions")
        if len(self.entries) != self.rows:
            raise DimensionMismatchError("row count does not match entries")
        for row in self.entries:
            if len(row) != self.cols:
                raise DimensionMismatchError("ragged rows")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [tuple(int(x) for x in r) for r in rows]
        if rows:
            width = len(rows[0])
        else:
            width = 0 if cols is None else cols
        return cls(len(rows), width, tuple(rows))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: Optional[int] = None) -> "IntMatrix":
        columns = [tuple(int(x) for x in c) for c in columns]
        if columns:
            height = len(columns[0])
        else:
            height = 0 if rows is None else rows
        data = tuple(tuple(c[i] for c in columns) for i in range(height))
        return cls(height, len(columns), data)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple(tuple(0 for _ in range(cols)) for _ in range(rows)))

    def __getitem__(self, key: tuple[int, int]) -> int:
        i, j = key
        return self.entries[i][j]

    def row(self, i: int) -> Vec:
        return self.entries[i]

    def column(self, j: int) -> Vec:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def columns(self) -> list[Vec]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         tuple(tuple(self.entries[i][j] for i in range(self.rows))
                               for j in range(self.cols)))

    def _same_shape(self, other: "IntMatrix") -> None:
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatchError(
                f"shape mismatch: {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix(self.rows, self.cols,
                         tuple(tuple(a + b for a, b in zip(ra, rb))
                               for ra, rb in zip(self.entries, other.entries)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix(self.rows, self.cols,
                         tuple(tuple(a - b for a, b in zip(ra, rb))
                               for ra, rb in zip(self.entries, other.entries)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols,
                         tuple(tuple(-a for a in r) for r in self.entries))

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionMismatchError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        ot = other.transpose().entries
        return IntMatrix(self.rows, other.cols,
                         tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in ot)
                               for r in self.entries))

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols,
                         tuple(tuple(k * a for a in r) for r in self.entries))

    def apply(self, v: Sequence[int]) -> Vec:
        """Matrix-vector product."""
        if len(v) != self.cols:
            raise DimensionMismatchError(f"vector length {len(v)} != cols {self.cols}")
        return tuple(sum(a * x for a, x in zip(r, v)) for r in self.entries)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "IntMatrix":
        return IntMatrix(len(row_idx), len(col_idx),
                         tuple(tuple(self.entries[i][j] for j in col_idx) for i in row_idx))

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.entries for a in r)

    def __str__(self) -> str:
        if self.rows == 0 or self.cols == 0:
            return f"<empty {self.rows}x{self.cols}>"
        return "\n".join("[" + " ".join(str(a) for a in r) + "]" for r in self.entries)


def hstack(*mats: IntMatrix) -> IntMatrix:
    rows = mats[0].rows
    if any(m.rows != rows for m in mats):
        raise DimensionMismatchError("hstack: row counts differ")
    data = tuple(tuple(x for m in mats for x in m.entries[i]) for i in range(rows))
    return IntMatrix(rows, sum(m.cols for m in mats), data)


def vstack(*mats: IntMatrix) -> IntMatrix:
    cols = mats[0].cols
    if any(m.cols != cols for m in mats):
        raise DimensionMismatchError("vstack: column counts differ")
    data = tuple(r for m in mats for r in m.entries)
    return IntMatrix(sum(m.rows for m in mats), cols, data)


def determinant(a: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if a.rows != a.cols:
        raise DimensionMismatchError("determinant of non-square matrix")
    n = a.rows
    if n == 0:
        return 1
    m = [list(r) for r in a.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmithForm:
    """Smith decomposition U * source * V = D over the integers.

    U and V are unimodular; D is diagonal with nonnegative entries
    satisfying the divisibility chain d1 | d2 | ... | dr, the zeros
    trailing. ``invariant_factors`` lists the nonzero diagonal entries
    (including any 1s) and ``rank`` counts them.
    """

    source: IntMatrix
    left: IntMatrix
    right: IntMatrix
    diagonal: IntMatrix
    invariant_factors: tuple[int, ...]
    rank: int

    def __post_init__(self):
        if self.left * self.source * self.right != self.diagonal:
            raise InternalConsistencyError("Smith form: U*A*V != D")
        if determinant(self.left) not in (1, -1) or determinant(self.right) not in (1, -1):
            raise InternalConsistencyError("Smith form: transform not unimodular")
        d = [self.diagonal[i, i] for i in range(min(self.diagonal.rows, self.diagonal.cols))]
        for i in range(self.diagonal.rows):
            for j in range(self.diagonal.cols):
                if i != j and self.diagonal[i, j] != 0:
                    raise InternalConsistencyError("Smith form: D not diagonal")
        if any(x < 0 for x in d):
            raise InternalConsistencyError("Smith form: negative diagonal entry")
        nonzero = [x for x in d if x != 0]
        if d[:len(nonzero)] != nonzero:
            raise InternalConsistencyError("Smith form: zero before nonzero on diagonal")
        for a, b in zip(nonzero, nonzero[1:]):
            if b % a != 0:
                raise InternalConsistencyError("Smith form: divisibility chain broken")
        if tuple(nonzero) != self.invariant_factors or len(nonzero) != self.rank:
            raise InternalConsistencyError("Smith form: invariant factors inconsistent")


def smith_normal_form(a: IntMatrix) -> SmithForm:
    """Diagonalize over the integers with unimodular row/column transforms.

    Pivoting picks the smallest-magnitude nonzero entry of the working
    submatrix, which keeps intermediate entries small at the scales this
    library targets. Total on all matrices, including empty and zero.
    """
    nr, nc = a.rows, a.cols
    m = [list(r) for r in a.entries]
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    v = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def row_sub(i, k, q):  # row_i -= q * row_k  (in m and u)
        m[i] = [x - q * y for x, y in zip(m[i], m[k])]
        u[i] = [x - q * y for x, y in zip(u[i], u[k])]

    def col_sub(j, k, q):  # col_j -= q * col_k  (in m and v)
        for r in m:
            r[j] -= q * r[k]
        for r in v:
            r[j] -= q * r[k]

    def swap_rows(i, k):
        m[i], m[k] = m[k], m[i]
        u[i], u[k] = u[k], u[i]

    def swap_cols(j, k):
        for r in m:
            r[j], r[k] = r[k], r[j]
        for r in v:
            r[j], r[k] = r[k], r[j]

    def negate_row(i):
        m[i] = [-x for x in m[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while True:
        pivot = None
        for i in range(t, nr):
            for j in range(t, nc):
                if m[i][j] != 0 and (pivot is None or abs(m[i][j]) < abs(m[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        if m[t][t] < 0:
            negate_row(t)
        p = m[t][t]
        cleared = True
        for i in range(nr):
            if i != t and m[i][t] != 0:
                row_sub(i, t, m[i][t] // p)
                if m[i][t] != 0:
                    cleared = False
        for j in range(nc):
            if j != t and m[t][j] != 0:
                col_sub(j, t, m[t][j] // p)
                if m[t][j] != 0:
                    cleared = False
        if cleared:
            t += 1
        # otherwise a remainder smaller than |p| appeared; re-pick the pivot

    rank = t
    # Enforce the divisibility chain d1 | d2 | ... by bubbling gcd/lcm pairs.
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            alpha, beta = m[i][i], m[i + 1][i + 1]
            if beta % alpha != 0:
                changed = True
                col_sub(i, i + 1, -1)  # col_i += col_{i+1}: puts beta below alpha
                g, s, tt = xgcd(alpha, beta)
                # unimodular row mix sending (alpha, beta) column to (g, 0)
                ri, rj = m[i][:], m[i + 1][:]
                m[i] = [s * x + tt * y for x, y in zip(ri, rj)]
                m[i + 1] = [-(beta // g) * x + (alpha // g) * y for x, y in zip(ri, rj)]
                ui, uj = u[i][:], u[i + 1][:]
                u[i] = [s * x + tt * y for x, y in zip(ui, uj)]
                u[i + 1] = [-(beta // g) * x + (alpha // g) * y for x, y in zip(ui, uj)]
                # clear the leftover entry in row i, column i+1
                col_sub(i + 1, i, m[i][i + 1] // g)
                if m[i][i] < 0:
                    negate_row(i)
                if m[i + 1][i + 1] < 0:
                    negate_row(i + 1)

    diag = IntMatrix.from_rows(m, cols=nc) if nr else IntMatrix.zeros(0, nc)
    factors = tuple(m[i][i] for i in range(rank))
    return SmithForm(source=a,
                     left=IntMatrix.from_rows(u, cols=nr) if nr else IntMatrix.zeros(0, 0),
                     right=IntMatrix.from_rows(v, cols=nc) if nc else IntMatrix.zeros(0, 0),
                     diagonal=diag,
                     invariant_factors=factors,
                     rank=rank)


def kernel_basis(a: IntMatrix) -> IntMatrix:
    """Canonical basis of the full integer kernel {x : A x = 0}.

    With U A V = D, the kernel is spanned by the columns of V beyond the
    rank; since V is unimodular the resulting subgroup is saturated (it
    is the whole integer kernel, a pure subgroup of Z^cols). The basis
    is returned in canonical Hermite form.
    """
    snf = smith_normal_form(a)
    free_cols = [snf.right.column(j) for j in range(snf.rank, a.cols)]
    raw = IntMatrix.from_columns(free_cols, rows=a.cols)
    return hermite_column_basis(raw)


def solve_integer(a: IntMatrix, b: Sequence[int]) -> Optional[Vec]:
    """One integer solution of A x = b, or None when none exists."""
    if len(b) != a.rows:
        raise DimensionMismatchError("solve_integer: rhs length mismatch")
    snf = smith_normal_form(a)
    ub = snf.left.apply(b)
    y = [0] * a.cols
    for i in range(a.rows):
        d = snf.diagonal[i, i] if i < min(a.rows, a.cols) else 0
        if i < snf.rank:
            if ub[i] % d != 0:
                return None
            y[i] = ub[i] // d
        elif ub[i] != 0:
            return None
    return snf.right.apply(y)


# ---------------------------------------------------------------------------
# Hermite lattices
# ---------------------------------------------------------------------------

def _row_hermite(rows: list[list[int]]) -> list[list[int]]:
    """Row-style Hermite form helper; returns the nonzero rows.

    Pivot columns strictly increase down the rows, pivots are positive,
    and entries above each pivot are reduced into [0, pivot).
    """
    rows = [r[:] for r in rows if any(r)]
    if not rows:
        return []
    width = len(rows[0])
    r = 0
    for c in range(width):
        idx = [i for i in range(r, len(rows)) if rows[i][c] != 0]
        if not idx:
            continue
        i0 = idx[0]
        for i in idx[1:]:
            a, b = rows[i0][c], rows[i][c]
            g, s, t = xgcd(a, b)
            ra, rb = rows[i0], rows[i]
            rows[i0] = [s * x + t * y for x, y in zip(ra, rb)]
            rows[i] = [-(b // g) * x + (a // g) * y for x, y in zip(ra, rb)]
        rows[r], rows[i0] = rows[i0], rows[r]
        if rows[r][c] < 0:
            rows[r] = [-x for x in rows[r]]
        p = rows[r][c]
        for i in range(r):
            q = rows[i][c] // p
            if q:
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return rows[:r]


def hermite_column_basis(a: IntMatrix) -> IntMatrix:
    """Canonical column Hermite basis of the column span of ``a``."""
    reduced = _row_hermite([list(r) for r in a.transpose().entries])
    return IntMatrix.from_columns([tuple(r) for r in reduced], rows=a.rows)


@dataclass(frozen=True)
class HermiteLattice:
    """A subgroup of Z^ambient_dim carried by its canonical column basis.

    Two values represent the same subgroup iff their fields are equal,
    so lattice equality is plain ``==``.
    """

    ambient_dim: int
    basis: IntMatrix

    def __post_init__(self):
        if self.basis.rows != self.ambient_dim:
            raise DimensionMismatchError("basis rows != ambient dimension")
        piv = _pivots(self.basis)
        if len(piv) != self.basis.cols:
            raise InternalConsistencyError("Hermite basis has a zero column")
        for idx, (r, j) in enumerate(piv):
            if idx and piv[idx - 1][0] >= r:
                raise InternalConsistencyError("Hermite pivot rows not increasing")
            d = self.basis[r, j]
            if d <= 0:
                raise InternalConsistencyError("Hermite pivot not positive")
            for jj in range(j):
                if not 0 <= self.basis[r, jj] < d:
                    raise InternalConsistencyError("Hermite entries not reduced")

    @classmethod
    def zero(cls, ambient_dim: int) -> "HermiteLattice":
        return cls(ambient_dim, IntMatrix.zeros(ambient_dim, 0))

    @classmethod
    def full(cls, ambient_dim: int) -> "HermiteLattice":
        return cls(ambient_dim, IntMatrix.identity(ambient_dim))

    @property
    def rank(self) -> int:
        return self.basis.cols

    def is_zero(self) -> bool:
        return self.basis.cols == 0

    def is_full(self) -> bool:
        return self.basis == IntMatrix.identity(self.ambient_dim)


def _pivots(basis: IntMatrix) -> list[tuple[int, int]]:
    """(pivot_row, column) pairs: first nonzero row of each column."""
    out = []
    for j in range(basis.cols):
        for i in range(basis.rows):
            if basis[i, j] != 0:
                out.append((i, j))
                break
    return out


def lattice_of_columns(a: IntMatrix) -> HermiteLattice:
    """Canonical lattice generated by the columns of ``a``.

    Idempotent: feeding the returned basis back in reproduces it.
    """
    return HermiteLattice(a.rows, hermite_column_basis(a))


def lattice_contains(lattice: HermiteLattice, v: Sequence[int]) -> tuple[bool, Optional[Vec]]:
    """Membership test with certificate.

    Returns (True, c) with basis * c = v exactly, or (False, None).
    """
    if len(v) != lattice.ambient_dim:
        raise DimensionMismatchError(
            f"vector length {len(v)} != ambient dimension {lattice.ambient_dim}")
    residual = [int(x) for x in v]
    coeffs = []
    for r, j in _pivots(lattice.basis):
        d = lattice.basis[r, j]
        if residual[r] % d != 0:
            return False, None
        q = residual[r] // d
        coeffs.append(q)
        if q:
            col = lattice.basis.column(j)
            residual = [x - q * y for x, y in zip(residual, col)]
    if any(residual):
        return False, None
    return True, tuple(coeffs)


def reduce_mod_lattice(lattice: HermiteLattice, v: Sequence[int]) -> Vec:
    """Canonical coset representative of ``v`` modulo the lattice.

    Unique for full-rank lattices; in general canonical on pivot rows.
    """
    if len(v) != lattice.ambient_dim:
        raise DimensionMismatchError("reduce_mod_lattice: dimension mismatch")
    residual = [int(x) for x in v]
    for r, j in _pivots(lattice.basis):
        d = lattice.basis[r, j]
        q = residual[r] // d
        if q:
            col = lattice.basis.column(j)
            residual = [x - q * y for x, y in zip(residual, col)]
    return tuple(residual)


def lattice_equal(a: HermiteLattice, b: HermiteLattice) -> bool:
    return a == b


# ---------------------------------------------------------------------------
# Exact rational LP: does the rational span meet the positive cone?
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConeWitness:
    """A nonzero nonnegative rational vector in the span of a lattice.

    ``vector`` equals basis * coefficients exactly.
    """

    vector: tuple[Fraction, ...]
    coefficients: tuple[Fraction, ...]


def _simplex_max(a: list[list[Fraction]], b: list[Fraction],
                 c: list[Fraction]) -> tuple[Fraction, list[Fraction]]:
    """Maximize c.x subject to a x <= b, x >= 0, where b >= 0.

    Exact rational simplex with Bland's rule, so termination is
    guaranteed and no tolerances exist. The slack basis is feasible
    because b >= 0.
    """
    m, n = len(a), len(c)
    tableau = [[Fraction(x) for x in a[i]] +
               [Fraction(int(i == k)) for k in range(m)] +
               [Fraction(b[i])] for i in range(m)]
    zrow = [Fraction(-x) for x in c] + [Fraction(0)] * (m + 1)
    basis = list(range(n, n + m))
    while True:
        enter = next((j for j in range(n + m) if zrow[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            coef = tableau[i][enter]
            if coef > 0:
                ratio = tableau[i][-1] / coef
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            raise InternalConsistencyError("simplex: unbounded objective in a bounded program")
        piv = tableau[leave][enter]
        tableau[leave] = [x / piv for x in tableau[leave]]
        for i in range(m):
            if i != leave and tableau[i][enter] != 0:
                f = tableau[i][enter]
                tableau[i] = [x - f * y for x, y in zip(tableau[i], tableau[leave])]
        f = zrow[enter]
        if f != 0:
            zrow = [x - f * y for x, y in zip(zrow, tableau[leave])]
        basis[leave] = enter
    x = [Fraction(0)] * (n + m)
    for i, bi in enumerate(basis):
        x[bi] = tableau[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x[:n])), Fraction(0))
    return value, x[:n]


def subspace_meets_positive_cone(lattice: HermiteLattice) -> Optional[ConeWitness]:
    """Nonzero v >= 0 in the rational span of the lattice, if any.

    Solved as an exact LP over the span coordinates: maximize the
    coordinate sum of x = basis * t subject to x >= 0 and sum(x) <= 1.
    The span meets the cone nontrivially iff the optimum is positive,
    in which case the optimal x is returned with its coefficient
    certificate t.
    """
    k = lattice.basis.cols
    n = lattice.ambient_dim
    if k == 0 or n == 0:
        return None
    bcols = [lattice.basis.column(j) for j in range(k)]
    colsum = [sum(col) for col in bcols]
    # variables: t = tplus - tminus, both halves nonnegative
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for i in range(n):  # (basis * t)_i >= 0
        rows.append([Fraction(-bcols[j][i]) for j in range(k)] +
                    [Fraction(bcols[j][i]) for j in range(k)])
        rhs.append(Fraction(0))
    rows.append([Fraction(colsum[j]) for j in range(k)] +
                [Fraction(-colsum[j]) for j in range(k)])
    rhs.append(Fraction(1))
    objective = [Fraction(colsum[j]) for j in range(k)] + [Fraction(-colsum[j]) for j in range(k)]
    value, x = _simplex_max(rows, rhs, objective)
    if value == 0:
        return None
    t = [x[j] - x[k + j] for j in range(k)]
    v = [sum((Fraction(bcols[j][i]) * t[j] for j in range(k)), Fraction(0)) for i in range(n)]
    if any(vi < 0 for vi in v) or all(vi == 0 for vi in v):
        raise InternalConsistencyError("cone witness failed its own definition")
    return ConeWitness(vector=tuple(v), coefficients=tuple(t))


def bruteforce_positive_lattice_point(lattice: HermiteLattice,
                                      coefficient_bound: int) -> Optional[tuple[Vec, Vec]]:
    """Exhaustive oracle: nonzero nonnegative integer point of the lattice.

    Searches integer coefficient vectors with entries in
    [-coefficient_bound, coefficient_bound] against the basis columns.
    Sound when it finds a point; inconclusive when it does not.
    Returns (point, coefficients) or None.
    """
    from itertools import product

    k = lattice.basis.cols
    if k == 0 or lattice.ambient_dim == 0:
        return None
    cols = [lattice.basis.column(j) for j in range(k)]
    rng = range(-coefficient_bound, coefficient_bound + 1)
    for coeffs in product(rng, repeat=k):
        if all(c == 0 for c in coeffs):
            continue
        v = [0] * lattice.ambient_dim
        for c, col in zip(coeffs, cols):
            if c:
                for i, x in enumerate(col):
                    v[i] += c * x
        if any(v) and all(x >= 0 for x in v):
            return tuple(v), tuple(coeffs)
    return None
