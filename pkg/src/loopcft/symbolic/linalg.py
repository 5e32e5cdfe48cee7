"""Exact linear algebra over the rationals.

Everything here works on dense ``list[list[Fraction]]`` matrices and does
plain Gauss-Jordan elimination.  The matrices in this package are tiny
(p(5) = 7 is a big one), so clarity and exactness beat sophistication; the
point is that ranks, kernels and inverses come out with no floating-point
ambiguity whatsoever.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

__all__ = [
    "rref",
    "rank",
    "kernel_basis",
    "solve_unique",
    "invert",
    "determinant",
]

Matrix = list[list[Fraction]]


def _copy(matrix: Sequence[Sequence[Fraction | int]]) -> Matrix:
    return [[Fraction(x) for x in row] for row in matrix]


def rref(matrix: Sequence[Sequence[Fraction | int]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    m = _copy(matrix)
    if not m:
        return m, []
    rows, cols = len(m), len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot_row = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                factor = m[i][c]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(matrix: Sequence[Sequence[Fraction | int]]) -> int:
    return len(rref(matrix)[1])


def kernel_basis(matrix: Sequence[Sequence[Fraction | int]]) -> list[list[Fraction]]:
    """A basis of the right kernel, one vector per free column.

    Each vector is normalized so its first nonzero coordinate is 1.
    """
    if not matrix:
        return []
    reduced, pivots = rref(matrix)
    cols = len(matrix[0])
    free = [c for c in range(cols) if c not in pivots]
    basis: list[list[Fraction]] = []
    for fc in free:
        vec = [Fraction(0)] * cols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -reduced[r][fc]
        lead = next(x for x in vec if x != 0)
        basis.append([x / lead for x in vec])
    return basis


def solve_unique(
    matrix: Sequence[Sequence[Fraction | int]], rhs: Sequence[Fraction | int]
) -> list[Fraction]:
    """The unique solution of A x = b; raises if none exists or many do."""
    if len(matrix) != len(rhs):
        raise ValueError("matrix and right-hand side have mismatched heights")
    if not matrix:
        return []
    cols = len(matrix[0])
    augmented = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    reduced, pivots = rref(augmented)
    if cols in pivots:
        raise ValueError("inconsistent linear system")
    if len(pivots) < cols:
        raise ValueError("underdetermined linear system (kernel is nontrivial)")
    solution = [Fraction(0)] * cols
    for r, pc in enumerate(pivots):
        solution[pc] = reduced[r][cols]
    return solution


def invert(matrix: Sequence[Sequence[Fraction | int]]) -> Matrix:
    """Exact inverse via Gauss-Jordan on [A | I]; raises on singular input."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("only square matrices can be inverted")
    augmented = [
        [Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
        for i, row in enumerate(matrix)
    ]
    reduced, pivots = rref(augmented)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular over the rationals")
    return [row[n:] for row in reduced]


def determinant(matrix: Sequence[Sequence[Fraction | int]]) -> Fraction:
    """Exact determinant by elimination with row pivoting."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant needs a square matrix")
    m = _copy(matrix)
    det = Fraction(1)
    for c in range(n):
        pivot_row = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != c:
            m[c], m[pivot_row] = m[pivot_row], m[c]
            det = -det
        det *= m[c][c]
        inv = Fraction(1) / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                factor = m[i][c] * inv
                m[i] = [a - factor * b for a, b in zip(m[i], m[c])]
    return det
