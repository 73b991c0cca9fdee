"""Seeded random generators for orbit samples and Lie algebra elements."""

from __future__ import annotations

import random
from functools import lru_cache

from gmpy2 import mpq

from .algebra import ZERO, Matrix, Scalar
from .liealg import AlgElement, stabilizer_dim
from .threeform import rho0


def random_gl(rng: random.Random, n: int, bound: int = 3) -> Matrix:
    """Invertible n x n matrix with integer entries in [-bound, bound]."""
    while True:
        m = Matrix([[rng.randint(-bound, bound) for _ in range(n)] for _ in range(n)])
        if m.det():
            return m


def random_rational_gl(rng: random.Random, n: int, bound: int = 3, den: int = 3) -> Matrix:
    while True:
        m = Matrix([[Scalar(mpq(rng.randint(-bound, bound), rng.randint(1, den))) for _ in range(n)] for _ in range(n)])
        if m.det():
            return m


def random_symmetric(rng: random.Random, n: int, bound: int = 3, traceless: bool = False) -> Matrix:
    rows = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = Scalar(rng.randint(-bound, bound))
            rows[i][j] = v
            rows[j][i] = v
    if traceless:
        tr = sum((rows[i][i] for i in range(n - 1)), ZERO)
        rows[n - 1][n - 1] = -tr
    return Matrix(rows)


def _block(a: Matrix, b: Matrix, c: Matrix, d: Matrix) -> Matrix:
    rows = [list(ra) + list(rb) for ra, rb in zip(a.rows, b.rows)]
    rows += [list(rc) + list(rd) for rc, rd in zip(c.rows, d.rows)]
    return Matrix(rows)


def random_symplectic(rng: random.Random, m: int = 3, factors: int = 3) -> Matrix:
    """Product of standard generators of Sp(2m) for omega = sum xi_k ^ eta_k.

    Generators: diag(A, A^-T), [[1, S], [0, 1]] and [[1, 0], [S, 1]] with S
    symmetric. Determinant is 1.
    """
    ident = Matrix.identity(m)
    zero = Matrix.zeros(m)
    acc = Matrix.identity(2 * m)
    for _ in range(factors):
        kind = rng.randrange(3)
        if kind == 0:
            a = random_gl(rng, m, 2)
            g = _block(a, zero, zero, a.inverse().T)
        elif kind == 1:
            g = _block(ident, random_symmetric(rng, m, 2), zero, ident)
        else:
            g = _block(ident, zero, random_symmetric(rng, m, 2), ident)
        acc = acc @ g
    return acc


@lru_cache(maxsize=1)
def rho0_stabilizer_basis() -> tuple[Matrix, ...]:
    _, basis = stabilizer_dim([rho0()])
    return tuple(b.mat for b in basis)


def random_g2_element(rng: random.Random, bound: int = 3) -> AlgElement:
    """Random integer combination of the computed stabilizer basis of rho0."""
    basis = rho0_stabilizer_basis()
    acc = Matrix.zeros(7)
    for b in basis:
        k = rng.randint(-bound, bound)
        if k:
            acc = acc + b * k
    return AlgElement(acc, (rho0(),), kind="g2")


def random_vector(rng: random.Random, n: int, bound: int = 3) -> tuple[Scalar, ...]:
    return tuple(Scalar(rng.randint(-bound, bound)) for _ in range(n))


def random_nonzero_rationals(rng: random.Random, k: int, bound: int = 4) -> list[Scalar]:
    out = []
    while len(out) < k:
        v = rng.randint(-bound, bound)
        if v:
            out.append(Scalar(mpq(v, rng.randint(1, 3))))
    return out

