"""Exact multivariate polynomials over arbitrary-precision rationals.

The coefficient ring for everything symbolic in this package: polynomials in
the generators ``a_m``, ``abar_m`` (m >= 1), ``lambda`` (the highest weight)
and ``c`` (the central charge), with ``fractions.Fraction`` coefficients.
No floating point enters this module.

Monomials are kept in a canonical sparse form and the generator order is
fixed once and for all: the a-block sorts before the abar-block, and the two
scalar symbols trail (``a1 < a2 < ... < abar1 < abar2 < ... < lambda < c``).
Serialization ("canonical text") is graded-lexicographic in that order, so
equal polynomials always print identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping

__all__ = [
    "Generator",
    "CoeffPoly",
    "GradingError",
    "LAMBDA",
    "CC",
    "a",
    "abar",
]

# Generator kinds.  The integer values define the canonical block order.
_KIND_A = 0
_KIND_ABAR = 1
_KIND_LAMBDA = 2
_KIND_CC = 3

_KIND_NAMES = {_KIND_A: "a", _KIND_ABAR: "abar", _KIND_LAMBDA: "lambda", _KIND_CC: "c"}

# A monomial is a tuple of (kind, index, exponent) triples, sorted by
# (kind, index), with all exponents > 0.  The empty tuple is the constant
# monomial.  Kept as plain tuples (not dataclasses) for dict-key speed.
Monomial = tuple[tuple[int, int, int], ...]

_ONE_MONO: Monomial = ()


class GradingError(ValueError):
    """Raised when a strictly graded quantity is requested of an ungradable polynomial."""


@dataclass(frozen=True, slots=True)
class Generator:
    """A formal generator of the coefficient ring.

    ``kind`` is one of the module-level block tags; ``index`` is the
    coefficient index for the a/abar families and 0 for the scalars.
    """

    kind: int
    index: int

    def __post_init__(self) -> None:
        if self.kind in (_KIND_A, _KIND_ABAR):
            if self.index < 1:
                raise ValueError(f"coefficient generators need index >= 1, got {self.index}")
        elif self.kind in (_KIND_LAMBDA, _KIND_CC):
            if self.index != 0:
                raise ValueError("scalar generators carry no index")
        else:
            raise ValueError(f"unknown generator kind {self.kind}")

    @property
    def name(self) -> str:
        base = _KIND_NAMES[self.kind]
        return base if self.index == 0 else f"{base}{self.index}"

    def __repr__(self) -> str:  # pragma: no cover - debugging sugar
        return f"Generator({self.name})"


def a(m: int) -> Generator:
    """The interior coefficient generator ``a_m``."""
    return Generator(_KIND_A, m)


def abar(m: int) -> Generator:
    """The conjugate coefficient generator ``abar_m``."""
    return Generator(_KIND_ABAR, m)


LAMBDA = Generator(_KIND_LAMBDA, 0)
CC = Generator(_KIND_CC, 0)


def _as_fraction(value: object) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    """Merge two sorted exponent tuples."""
    if not m1:
        return m2
    if not m2:
        return m1
    out: list[tuple[int, int, int]] = []
    i = j = 0
    n1, n2 = len(m1), len(m2)
    while i < n1 and j < n2:
        k1, x1, e1 = m1[i]
        k2, x2, e2 = m2[j]
        key1, key2 = (k1, x1), (k2, x2)
        if key1 == key2:
            out.append((k1, x1, e1 + e2))
            i += 1
            j += 1
        elif key1 < key2:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


def _mono_degree(mono: Monomial) -> int:
    return sum(e for _, _, e in mono)


def _mono_lex_key(mono: Monomial) -> tuple:
    """Sort key realizing graded-lex order, heaviest term first.

    Grading is total (unweighted) degree; ties break lexicographically on the
    exponent vector read along the canonical generator order, larger exponent
    first.  Encoding: earlier generators and bigger exponents must compare
    *smaller*, so we negate degrees and exponents.
    """
    return (-_mono_degree(mono), tuple((k, x, -e) for k, x, e in mono))


class CoeffPoly:
    """Immutable-by-convention exact polynomial.

    Stored as ``{monomial: Fraction}`` with no zero coefficients.  All
    operations return fresh instances; nothing mutates ``_terms`` after
    construction.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None, *, _raw: dict | None = None):
        if _raw is not None:
            self._terms = _raw
            return
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for mono, coef in terms.items():
                coef = _as_fraction(coef)
                if coef:
                    clean[mono] = coef
        self._terms = clean

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "CoeffPoly":
        return CoeffPoly(_raw={})

    @staticmethod
    def one() -> "CoeffPoly":
        return CoeffPoly(_raw={_ONE_MONO: Fraction(1)})

    @staticmethod
    def constant(value: object) -> "CoeffPoly":
        v = _as_fraction(value)
        return CoeffPoly(_raw={_ONE_MONO: v} if v else {})

    @staticmethod
    def generator(gen: Generator, exponent: int = 1) -> "CoeffPoly":
        if exponent < 0:
            raise ValueError("negative exponents are not polynomial")
        if exponent == 0:
            return CoeffPoly.one()
        return CoeffPoly(_raw={((gen.kind, gen.index, exponent),): Fraction(1)})

    # -- basic queries ------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def terms(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def constant_part(self) -> Fraction:
        return self._terms.get(_ONE_MONO, Fraction(0))

    def as_constant(self) -> Fraction:
        """The value of a constant polynomial; raises if generators are present."""
        if not self._terms:
            return Fraction(0)
        if len(self._terms) == 1 and _ONE_MONO in self._terms:
            return self._terms[_ONE_MONO]
        raise ValueError(f"not a constant polynomial: {self.canonical_text()}")

    def generators(self) -> set[Generator]:
        found: set[Generator] = set()
        for mono in self._terms:
            for kind, index, _ in mono:
                found.add(Generator(kind, index))
        return found

    def max_coefficient_index(self) -> int:
        """Largest index appearing among a/abar generators (0 if none)."""
        best = 0
        for mono in self._terms:
            for kind, index, _ in mono:
                if kind in (_KIND_A, _KIND_ABAR) and index > best:
                    best = index
        return best

    def total_degree(self) -> int:
        """Maximal unweighted degree over monomials (0 for the zero polynomial)."""
        return max((_mono_degree(m) for m in self._terms), default=0)

    # -- ring operations ----------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, CoeffPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == CoeffPoly.constant(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "CoeffPoly | int | Fraction") -> "CoeffPoly":
        if isinstance(other, (int, Fraction)):
            other = CoeffPoly.constant(other)
        if not isinstance(other, CoeffPoly):
            return NotImplemented
        if not self._terms:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for mono, coef in other._terms.items():
            acc = out.get(mono)
            if acc is None:
                out[mono] = coef
            else:
                acc = acc + coef
                if acc:
                    out[mono] = acc
                else:
                    del out[mono]
        return CoeffPoly(_raw=out)

    __radd__ = __add__

    def __neg__(self) -> "CoeffPoly":
        return CoeffPoly(_raw={m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "CoeffPoly | int | Fraction") -> "CoeffPoly":
        if isinstance(other, (int, Fraction)):
            other = CoeffPoly.constant(other)
        if not isinstance(other, CoeffPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: "CoeffPoly | int | Fraction") -> "CoeffPoly":
        return (-self) + other

    def __mul__(self, other: "CoeffPoly | int | Fraction") -> "CoeffPoly":
        if isinstance(other, (int, Fraction)):
            scalar = _as_fraction(other)
            if not scalar:
                return CoeffPoly.zero()
            return CoeffPoly(_raw={m: c * scalar for m, c in self._terms.items()})
        if not isinstance(other, CoeffPoly):
            return NotImplemented
        if not self._terms or not other._terms:
            return CoeffPoly.zero()
        # schoolbook product; term counts stay small in this package
        shorter, longer = (self._terms, other._terms)
        if len(shorter) > len(longer):
            shorter, longer = longer, shorter
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in shorter.items():
            for m2, c2 in longer.items():
                mono = _mono_mul(m1, m2)
                coef = c1 * c2
                acc = out.get(mono)
                if acc is None:
                    out[mono] = coef
                else:
                    acc = acc + coef
                    if acc:
                        out[mono] = acc
                    else:
                        del out[mono]
        return CoeffPoly(_raw=out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "CoeffPoly":
        if n < 0:
            raise ValueError("negative powers are not polynomial")
        result = CoeffPoly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n > 1
            n >>= 1
            if base_needed and n:
                base = base * base
        return result

    # -- calculus and structure ----------------------------------------

    def derivative(self, gen: Generator) -> "CoeffPoly":
        """Exact partial derivative with respect to one generator."""
        key = (gen.kind, gen.index)
        out: dict[Monomial, Fraction] = {}
        for mono, coef in self._terms.items():
            for pos, (kind, index, exp) in enumerate(mono):
                if (kind, index) == key:
                    if exp == 1:
                        new_mono = mono[:pos] + mono[pos + 1 :]
                    else:
                        new_mono = mono[:pos] + ((kind, index, exp - 1),) + mono[pos + 1 :]
                    new_coef = coef * exp
                    acc = out.get(new_mono)
                    out[new_mono] = new_coef if acc is None else acc + new_coef
                    break
        return CoeffPoly(_raw={m: c for m, c in out.items() if c})

    def substitute(self, assignment: Mapping[Generator, Fraction | int]) -> "CoeffPoly":
        """Eliminate the assigned generators by exact evaluation.

        Partial maps are fine: untouched generators survive. Values must be
        exact rationals.
        """
        if not assignment:
            return self
        lookup = {(g.kind, g.index): _as_fraction(v) for g, v in assignment.items()}
        out: dict[Monomial, Fraction] = {}
        for mono, coef in self._terms.items():
            kept: list[tuple[int, int, int]] = []
            scale = coef
            for kind, index, exp in mono:
                val = lookup.get((kind, index))
                if val is None:
                    kept.append((kind, index, exp))
                else:
                    scale = scale * val**exp
            if not scale:
                continue
            key = tuple(kept)
            acc = out.get(key)
            if acc is None:
                out[key] = scale
            else:
                acc = acc + scale
                if acc:
                    out[key] = acc
                else:
                    del out[key]
        return CoeffPoly(_raw=out)

    def swap_bars(self) -> "CoeffPoly":
        """The a <-> abar involution (lambda and c are fixed)."""
        out: dict[Monomial, Fraction] = {}
        for mono, coef in self._terms.items():
            swapped = tuple(
                (
                    _KIND_ABAR if kind == _KIND_A else (_KIND_A if kind == _KIND_ABAR else kind),
                    index,
                    exp,
                )
                for kind, index, exp in mono
            )
            out[tuple(sorted(swapped, key=lambda t: (t[0], t[1])))] = coef
        return CoeffPoly(_raw=out)

    def bidegree(self, *, strict: bool = True) -> tuple[int, int]:
        """Weighted (left, right) degree: max over monomials of sum m*deg.

        ``strict`` rejects polynomials that mix lambda/c into the graded
        query; pass ``strict=False`` to grade the a/abar content only.
        Returns (0, 0) for constants and for the zero polynomial.
        """
        left = right = 0
        for mono in self._terms:
            l = r = 0
            for kind, index, exp in mono:
                if kind == _KIND_A:
                    l += index * exp
                elif kind == _KIND_ABAR:
                    r += index * exp
                elif strict:
                    raise GradingError(
                        "bidegree of a polynomial involving lambda/c requested in strict mode"
                    )
            left = max(left, l)
            right = max(right, r)
        return (left, right)

    def weighted_monomial_degrees(self) -> set[tuple[int, int]]:
        """The set of per-monomial weighted (left, right) degrees, lambda/c ignored."""
        out: set[tuple[int, int]] = set()
        for mono in self._terms:
            l = r = 0
            for kind, index, exp in mono:
                if kind == _KIND_A:
                    l += index * exp
                elif kind == _KIND_ABAR:
                    r += index * exp
            out.add((l, r))
        return out

    def map_coefficients(self, fn: Callable[[Fraction], Fraction]) -> "CoeffPoly":
        out = {m: fn(c) for m, c in self._terms.items()}
        return CoeffPoly(_raw={m: c for m, c in out.items() if c})

    def evaluate(self, values: Mapping[Generator, complex]) -> complex:
        """Numeric evaluation; every generator present must be assigned."""
        lookup = {(g.kind, g.index): v for g, v in values.items()}
        total = 0j
        for mono, coef in self._terms.items():
            term: complex = complex(coef)
            for kind, index, exp in mono:
                try:
                    term *= lookup[(kind, index)] ** exp
                except KeyError:
                    raise KeyError(
                        f"no value supplied for generator {_KIND_NAMES[kind]}{index or ''}"
                    ) from None
            total += term
        return total

    # -- canonical text ------------------------------------------------

    def canonical_text(self) -> str:
        """Deterministic serialization: graded-lex monomial order, num/den rationals."""
        if not self._terms:
            return "0/1"
        pieces: list[str] = []
        for mono in sorted(self._terms, key=_mono_lex_key):
            coef = self._terms[mono]
            factors = [f"{coef.numerator}/{coef.denominator}"]
            for kind, index, exp in mono:
                name = _KIND_NAMES[kind] + (str(index) if index else "")
                factors.append(name if exp == 1 else f"{name}^{exp}")
            pieces.append("*".join(factors))
        return " + ".join(pieces)

    @staticmethod
    def from_canonical_text(text: str) -> "CoeffPoly":
        """Inverse of :meth:`canonical_text` (tolerant of whitespace)."""
        text = text.strip()
        if not text:
            raise ValueError("empty polynomial text")
        terms: dict[Monomial, Fraction] = {}
        for chunk in text.split("+"):
            chunk = chunk.strip()
            if not chunk:
                raise ValueError("malformed polynomial text (dangling '+')")
            factors = chunk.split("*")
            coef = Fraction(factors[0])
            mono: list[tuple[int, int, int]] = []
            for factor in factors[1:]:
                if "^" in factor:
                    name, _, exp_s = factor.partition("^")
                    exp = int(exp_s)
                else:
                    name, exp = factor, 1
                gen = _parse_generator_name(name)
                mono.append((gen.kind, gen.index, exp))
            key = tuple(sorted(mono, key=lambda t: (t[0], t[1])))
            if coef:
                terms[key] = terms.get(key, Fraction(0)) + coef
        return CoeffPoly({m: c for m, c in terms.items() if c})

    def __repr__(self) -> str:
        return f"CoeffPoly({self.canonical_text()})"


def _parse_generator_name(name: str) -> Generator:
    name = name.strip()
    if name == "lambda":
        return LAMBDA
    if name == "c":
        return CC
    if name.startswith("abar"):
        return abar(int(name[4:]))
    if name.startswith("a"):
        return a(int(name[1:]))
    raise ValueError(f"unknown generator name {name!r}")
