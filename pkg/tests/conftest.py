"""Shared generators for randomized property tests.

Everything is seeded explicitly by the caller, so test runs are
reproducible; commuting pairs are built as polynomials in a common
matrix, commuting bijections from the centralizer of a random
permutation, and block graphs from polynomials in a common triangular
nonnegative matrix.
"""

import random

from dr2k import FiniteMapModel, IntMatrix, Rank2MatrixSystem, TwoGraphModel, matrix_system


def random_int_matrix(rng: random.Random, rows: int, cols: int, lo: int, hi: int) -> IntMatrix:
    return IntMatrix.from_rows([[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)],
                               cols=cols)


def polynomial_in(base: IntMatrix, coefficients) -> IntMatrix:
    """c0*I + c1*base + c2*base^2 + ..."""
    n = base.rows
    out = IntMatrix.zeros(n, n)
    power = IntMatrix.identity(n)
    for c in coefficients:
        if c:
            out = out + power.scale(c)
        power = power * base
    return out


def random_commuting_system(rng: random.Random, max_n: int = 4,
                            seed_bound: int = 3, coeff_bound: int = 2) -> Rank2MatrixSystem:
    """Commuting integer pair: two polynomials in a common seed matrix."""
    n = rng.randint(1, max_n)
    base = random_int_matrix(rng, n, n, -seed_bound, seed_bound)
    m1 = polynomial_in(base, [rng.randint(-coeff_bound, coeff_bound) for _ in range(3)])
    m2 = polynomial_in(base, [rng.randint(-coeff_bound, coeff_bound) for _ in range(3)])
    return Rank2MatrixSystem(n, m1, m2)


def random_permutation(rng: random.Random, n: int) -> tuple[int, ...]:
    perm = list(range(n))
    rng.shuffle(perm)
    return tuple(perm)


def _cycles(perm: tuple[int, ...]) -> list[list[int]]:
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = perm[x]
        out.append(cyc)
    return out


def random_centralizer_element(rng: random.Random, perm: tuple[int, ...]) -> tuple[int, ...]:
    """Random permutation commuting with ``perm``.

    Permutes the cycles within each length class and rotates inside
    each cycle; every centralizer element arises this way.
    """
    n = len(perm)
    by_length: dict[int, list[list[int]]] = {}
    for cyc in _cycles(perm):
        by_length.setdefault(len(cyc), []).append(cyc)
    out = [0] * n
    for length, cycles in by_length.items():
        targets = cycles[:]
        rng.shuffle(targets)
        for src, dst in zip(cycles, targets):
            offset = rng.randrange(length)
            for j, x in enumerate(src):
                out[x] = dst[(j + offset) % length]
    return tuple(out)


def random_commuting_bijections(rng: random.Random, max_n: int = 6) -> FiniteMapModel:
    n = rng.randint(1, max_n)
    t1 = random_permutation(rng, n)
    t2 = random_centralizer_element(rng, t1)
    return FiniteMapModel(tuple(f"p{i}" for i in range(n)), t1, t2)


def random_block_two_graph(rng: random.Random, first_block: "int | None" = None,
                           second_block: "int | None" = None) -> tuple[TwoGraphModel, tuple[int, ...]]:
    """Block lower-triangular commuting nonnegative graph model.

    Returns the model and the vertex indices of the first block, which
    is coordinate-invariant for the transposed matrix system.
    """
    k = first_block if first_block is not None else rng.randint(1, 3)
    l = second_block if second_block is not None else rng.randint(1, 3)
    n = k + l
    base = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i < k and j >= k:
                continue  # keep rows of the first block inside the block
            base[i][j] = rng.randint(0, 2)
    base_m = IntMatrix.from_rows(base)
    a1 = polynomial_in(base_m, [1, rng.randint(0, 2), rng.randint(0, 1)])
    a2 = polynomial_in(base_m, [1, rng.randint(0, 2), rng.randint(0, 1)])
    labels = tuple(f"v{i}" for i in range(n))
    return TwoGraphModel(labels, a1, a2), tuple(range(k))


def finite_system(rng: random.Random, max_n: int = 6) -> Rank2MatrixSystem:
    return matrix_system(random_commuting_bijections(rng, max_n))
