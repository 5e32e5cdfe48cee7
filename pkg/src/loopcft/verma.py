"""Abstract Virasoro highest-weight (Verma) module over exact scalars.

States live in the PBW basis indexed by partitions: the basis vector for a
partition ``(k_1 <= ... <= k_j)`` is the word ``L_{-k_j} ... L_{-k_1}``
applied to the highest-weight vector, so more-negative modes sit to the
left.  Mode application is implemented by straightening against the
commutation relation

    [L_a, L_b] = (a - b) L_{a+b} + (c/12) (a^3 - a) delta_{a,-b}

with every coefficient a :class:`CoeffPoly` in the symbolic weight and
central charge; rational specializations substitute at the very end, so
ranks and kernels carry no numerical noise.

The central cocycle value is itself computed from a contour residue of
polynomial vector fields rather than hardcoded, and the straightening
routine consumes that computation.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

from .symbolic import (
    CC,
    LAMBDA,
    CoeffPoly,
    LaurentSeries,
    Partition,
    kernel_basis,
    partitions_of,
    rank as matrix_rank,
)

__all__ = [
    "VermaVector",
    "vacuum",
    "basis_vector",
    "apply_mode",
    "apply_word",
    "normal_order",
    "lowering_word",
    "raising_word",
    "gram_entry",
    "gram_matrix",
    "gram_matrix_at",
    "gram_rank_at",
    "singular_vectors",
    "kac_determinant",
    "kac_lambda",
    "central_charge",
    "cocycle",
    "gram_report",
]

_ZERO = CoeffPoly.zero()
_LAM = CoeffPoly.generator(LAMBDA)
_C = CoeffPoly.generator(CC)

Parts = tuple[int, ...]


def central_charge(kappa: Fraction | int) -> Fraction:
    """The central charge along the one-parameter family, 13 - 24/k - 3k/2."""
    kappa = Fraction(kappa)
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    return Fraction(13) - Fraction(24) / kappa - Fraction(3, 2) * kappa


def kac_lambda(r: int, s: int, kappa: Fraction | int) -> Fraction:
    """Degenerate weight with indices (r, s) along the same family."""
    if r < 1 or s < 1:
        raise ValueError("degenerate-weight indices must be positive")
    kappa = Fraction(kappa)
    return (
        Fraction(r * r - 1) * kappa / 16
        + Fraction(s * s - 1) / kappa
        + Fraction(1 - r * s, 2)
    )


@lru_cache(maxsize=None)
def cocycle(n: int, m: int) -> Fraction:
    """Central 2-cocycle of the vector fields -z**(n+1) d/dz.

    Evaluated as the residue pairing res[ v_n''' * v_m ] of the generating
    fields, not from a closed form; equals (n^3 - n) when m = -n and 0
    otherwise.
    """
    v_n = LaurentSeries.monomial(n + 1, -1, None)
    v_m = LaurentSeries.monomial(m + 1, -1, None)
    third = v_n.derivative().derivative().derivative()
    product = third * v_m
    if product.is_zero:
        return Fraction(0)
    return product.residue().as_constant()


class VermaVector:
    """A finite combination of PBW basis vectors with CoeffPoly coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Parts, CoeffPoly] | None = None):
        clean: dict[Parts, CoeffPoly] = {}
        if terms:
            for parts, coeff in terms.items():
                if not coeff.is_zero:
                    clean[tuple(parts)] = coeff
        self._terms = clean

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def terms(self) -> Iterator[tuple[Parts, CoeffPoly]]:
        return iter(sorted(self._terms.items()))

    def coefficient(self, parts: Sequence[int]) -> CoeffPoly:
        return self._terms.get(tuple(parts), _ZERO)

    def scale(self, factor: CoeffPoly | Fraction | int) -> "VermaVector":
        if isinstance(factor, (int, Fraction)):
            factor = CoeffPoly.constant(factor)
        if factor.is_zero:
            return VermaVector()
        return VermaVector({k: v * factor for k, v in self._terms.items()})

    def __add__(self, other: "VermaVector") -> "VermaVector":
        merged = dict(self._terms)
        for k, v in other._terms.items():
            merged[k] = merged.get(k, _ZERO) + v
        return VermaVector(merged)

    def __sub__(self, other: "VermaVector") -> "VermaVector":
        return self + other.scale(-1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VermaVector):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def substitute(self, assignment) -> "VermaVector":
        return VermaVector(
            {k: v.substitute(assignment) for k, v in self._terms.items()}
        )

    def __repr__(self) -> str:
        if self.is_zero:
            return "VermaVector(0)"
        bits = [f"({c.canonical_text()})*e{list(k)}" for k, c in self.terms()]
        return " + ".join(bits)


def vacuum() -> VermaVector:
    """The highest-weight vector itself."""
    return VermaVector({(): CoeffPoly.one()})


def basis_vector(partition: Partition | Sequence[int]) -> VermaVector:
    parts = tuple(partition.parts if isinstance(partition, Partition) else sorted(partition))
    return VermaVector({parts: CoeffPoly.one()})


def lowering_word(partition: Partition | Sequence[int]) -> Parts:
    """Modes of the PBW word for a partition, most negative first."""
    parts = partition.parts if isinstance(partition, Partition) else tuple(sorted(partition))
    return tuple(-p for p in reversed(parts))


def raising_word(partition: Partition | Sequence[int]) -> Parts:
    """Adjoint word of :func:`lowering_word` — positive modes ascending."""
    parts = partition.parts if isinstance(partition, Partition) else tuple(sorted(partition))
    return tuple(parts)


@lru_cache(maxsize=None)
def _apply_mode_to_basis(n: int, parts: Parts) -> VermaVector:
    if n == 0:
        return VermaVector({parts: _LAM + sum(parts)})
    if n < 0:
        return _lower(-n, parts)
    return _raise(n, parts)


def _lower(p: int, parts: Parts) -> VermaVector:
    """L_{-p} applied to a basis vector, straightened back into the PBW basis."""
    if not parts or p >= parts[-1]:
        return VermaVector({tuple(sorted(parts + (p,))): CoeffPoly.one()})
    # L_{-p} L_{-q} = L_{-q} L_{-p} + (q - p) L_{-p-q} with q the largest part
    q = parts[-1]
    rest = parts[:-1]
    swapped = _prefix_lower(q, _lower(p, rest))
    merged = _lower(p + q, rest).scale(q - p)
    return swapped + merged


def _prefix_lower(p: int, vector: VermaVector) -> VermaVector:
    result = VermaVector()
    for parts, coeff in vector.terms():
        result = result + _apply_mode_to_basis(-p, parts).scale(coeff)
    return result


def _raise(n: int, parts: Parts) -> VermaVector:
    """L_n (n > 0) applied to a basis vector by commuting past the word head."""
    if not parts:
        return VermaVector()
    p = parts[-1]  # leftmost operator of the PBW word is L_{-p}
    rest = parts[:-1]
    through = _prefix_lower(p, _raise(n, rest))
    cross = _apply_mode_to_basis(n - p, rest).scale(n + p)
    result = through + cross
    if n == p:
        central = _C * (Fraction(1, 12) * cocycle(n, -n))
        result = result + VermaVector({rest: CoeffPoly.one()}).scale(central)
    return result


def apply_mode(n: int, vector: VermaVector) -> VermaVector:
    """The action of the n-th Virasoro mode on a module vector."""
    result = VermaVector()
    for parts, coeff in vector.terms():
        result = result + _apply_mode_to_basis(n, parts).scale(coeff)
    return result


def apply_word(word: Sequence[int], vector: VermaVector) -> VermaVector:
    """Apply a word of modes, rightmost first (operator composition order)."""
    for n in reversed(tuple(word)):
        vector = apply_mode(n, vector)
    return vector


def normal_order(word: Sequence[int]) -> VermaVector:
    """The word applied to the highest-weight vector, fully straightened."""
    return apply_word(word, vacuum())


@lru_cache(maxsize=None)
def gram_entry(k: Parts, kprime: Parts) -> CoeffPoly:
    """<basis(k), basis(kprime)> as a polynomial in the weight and charge."""
    word = raising_word(k) + lowering_word(kprime)
    vector = normal_order(word)
    scalar = vector.coefficient(())
    if sum(k) == sum(kprime):
        stray = [parts for parts, _ in vector.terms() if parts != ()]
        if stray:
            raise AssertionError(f"pairing left non-scalar terms {stray}")
    return scalar


@lru_cache(maxsize=None)
def gram_matrix(level: int) -> tuple[tuple[CoeffPoly, ...], ...]:
    """The symbolic Gram matrix at a level, rows/cols in partition basis order."""
    basis = partitions_of(level)
    rows = []
    for ki in basis:
        row = []
        for kj in basis:
            row.append(gram_entry(ki.parts, kj.parts))
        rows.append(tuple(row))
    return tuple(rows)


def gram_matrix_at(
    level: int, weight: Fraction | int, charge: Fraction | int
) -> list[list[Fraction]]:
    assignment = {LAMBDA: Fraction(weight), CC: Fraction(charge)}
    return [
        [entry.substitute(assignment).as_constant() for entry in row]
        for row in gram_matrix(level)
    ]


def gram_rank_at(level: int, weight: Fraction | int, charge: Fraction | int) -> int:
    return matrix_rank(gram_matrix_at(level, weight, charge))


def singular_vectors(
    level: int, weight: Fraction | int, charge: Fraction | int
) -> list[list[Fraction]]:
    """Kernel basis of the specialized Gram form, in partition basis order.

    Each vector is the coefficient list of a null state; the first nonzero
    coordinate is normalized to 1.
    """
    return kernel_basis(gram_matrix_at(level, weight, charge))


@lru_cache(maxsize=None)
def _laplace(level: int, cols: frozenset[int]) -> CoeffPoly:
    matrix = gram_matrix(level)
    row = len(matrix) - len(cols)
    if not cols:
        return CoeffPoly.one()
    total = CoeffPoly.zero()
    for position, c in enumerate(sorted(cols)):
        entry = matrix[row][c]
        if entry.is_zero:
            continue
        minor = _laplace(level, cols - {c})
        term = entry * minor
        if position % 2:
            term = -term
        total = total + term
    return total


def kac_determinant(level: int) -> CoeffPoly:
    """Symbolic determinant of the level Gram matrix (memoized Laplace)."""
    size = len(partitions_of(level))
    return _laplace(level, frozenset(range(size)))


def gram_report(level: int, kappa: Fraction | None = None) -> str:
    """A JSON document describing the Gram form at one level.

    With ``kappa`` the charge is specialized along the family and entries are
    reported both symbolically in the weight and factored data where known.
    """
    basis = [list(p.parts) for p in partitions_of(level)]
    matrix = gram_matrix(level)
    if kappa is None:
        entries = [[e.canonical_text() for e in row] for row in matrix]
        det_text = kac_determinant(level).canonical_text()
    else:
        charge = central_charge(kappa)
        assignment = {CC: charge}
        entries = [
            [e.substitute(assignment).canonical_text() for e in row] for row in matrix
        ]
        det_text = kac_determinant(level).substitute(assignment).canonical_text()
    payload = {
        "level": level,
        "basis": basis,
        "entries": entries,
        "determinant": det_text,
        "kappa": None if kappa is None else str(kappa),
    }
    return json.dumps(payload, indent=2)
