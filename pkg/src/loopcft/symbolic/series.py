"""Truncated formal Laurent series over the exact coefficient ring.

The vehicle for every contour/residue computation in the package.  A series
knows three things: its ``valuation`` (lowest possibly-nonzero power), a
finite window of stored coefficients, and an exclusive ``order`` up to which
its coefficients are *reliable*.  Powers between the stored window and the
order are reliably zero; powers at or above the order are unknown.

Order propagation is deliberately pessimistic, and every accessor that would
touch an unreliable coefficient raises :class:`InsufficientOrderError`
instead of silently returning truncated garbage.  ``order=None`` marks an
exact series (a Laurent polynomial known in full).

The propagation rules, for inputs with valuations ``v`` and orders ``o``:

* add/sub: ``min(o1, o2)``
* mul: ``min(o1 + v2, o2 + v1)``
* multiplicative inverse: ``o - 2v`` (lowest coefficient must be a nonzero
  rational constant, the only units of the coefficient ring)
* derivative: ``o - 1``
* composition ``f(g)`` (``g`` with valuation >= 1): ``min(o_f * v_g, o_g)``
* reversion: same order as the input
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .poly import CoeffPoly

__all__ = [
    "LaurentSeries",
    "InsufficientOrderError",
    "schwarzian",
    "pre_schwarzian",
    "series_reversion",
]

_INF = math.inf


class InsufficientOrderError(ValueError):
    """An operation needed coefficients beyond the reliable truncation order."""


def _as_poly(value: object) -> CoeffPoly:
    if isinstance(value, CoeffPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return CoeffPoly.constant(value)
    raise TypeError(f"cannot use {type(value).__name__} as a series coefficient")


class LaurentSeries:
    """A truncated Laurent series with tracked reliability order."""

    __slots__ = ("valuation", "coeffs", "order")

    def __init__(
        self,
        valuation: int,
        coeffs: Sequence[object] = (),
        order: int | float | None = None,
    ):
        polys = [_as_poly(c) for c in coeffs]
        if order is None:
            order = _INF
        # strip leading zeros (raising the valuation), then trailing zeros
        start = 0
        while start < len(polys) and polys[start].is_zero:
            start += 1
        end = len(polys)
        while end > start and polys[end - 1].is_zero:
            end -= 1
        polys = polys[start:end]
        valuation += start
        if polys and valuation + len(polys) > order:
            raise ValueError("stored coefficients extend beyond the declared order")
        if not polys:
            # canonical zero: the valuation rides at the order (known zero below it)
            valuation = order if order != _INF else 0
        self.valuation = valuation
        self.coeffs = tuple(polys)
        self.order = order

    # -- constructors -----------------------------------------------------

    @staticmethod
    def zero(order: int | float | None = None) -> "LaurentSeries":
        return LaurentSeries(0, (), order)

    @staticmethod
    def monomial(power: int, coeff: object = 1, order: int | float | None = None) -> "LaurentSeries":
        return LaurentSeries(power, (coeff,), order)

    @staticmethod
    def from_coefficients(
        pairs: Iterable[tuple[int, object]], order: int | float | None = None
    ) -> "LaurentSeries":
        items = [(p, _as_poly(c)) for p, c in pairs]
        if not items:
            return LaurentSeries.zero(order)
        lo = min(p for p, _ in items)
        hi = max(p for p, _ in items)
        coeffs: list[CoeffPoly] = [CoeffPoly.zero()] * (hi - lo + 1)
        for p, c in items:
            coeffs[p - lo] = coeffs[p - lo] + c
        return LaurentSeries(lo, coeffs, order)

    # -- queries ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_exact(self) -> bool:
        return self.order == _INF

    def coefficient(self, power: int) -> CoeffPoly:
        """The coefficient of z**power; raises if that power is unreliable."""
        if power >= self.order:
            raise InsufficientOrderError(
                f"coefficient of z^{power} requested but series is only reliable below z^{self.order}"
            )
        idx = power - self.valuation
        if 0 <= idx < len(self.coeffs):
            return self.coeffs[idx]
        return CoeffPoly.zero()

    def coefficients(self) -> Iterator[tuple[int, CoeffPoly]]:
        for i, c in enumerate(self.coeffs):
            if not c.is_zero:
                yield (self.valuation + i, c)

    def agrees_with(self, other: "LaurentSeries") -> bool:
        """Equality on the shared reliable window (used to compare rebuilds)."""
        shared = min(self.order, other.order)
        powers = {p for p, _ in self.coefficients() if p < shared}
        powers |= {p for p, _ in other.coefficients() if p < shared}
        return all(self.coefficient(p) == other.coefficient(p) for p in powers)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (
            self.valuation == other.valuation
            and self.coeffs == other.coeffs
            and self.order == other.order
        )

    def __hash__(self) -> int:
        return hash((self.valuation, self.coeffs, self.order))

    def __repr__(self) -> str:
        parts = [f"({c.canonical_text()})*z^{p}" for p, c in self.coefficients()] or ["0"]
        tail = "" if self.is_exact else f" + O(z^{self.order})"
        return " + ".join(parts) + tail

    # -- arithmetic ---------------------------------------------------------

    def truncate(self, order: int) -> "LaurentSeries":
        """Restrict to coefficients below ``order`` (may only lower the order)."""
        if order > self.order:
            raise InsufficientOrderError(
                f"cannot extend reliability from O(z^{self.order}) to O(z^{order})"
            )
        kept = [c for i, c in enumerate(self.coeffs) if self.valuation + i < order]
        start = self.valuation if kept else 0
        return LaurentSeries(start, kept, order)

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        order = min(self.order, other.order)
        pairs = [(p, c) for p, c in self.coefficients() if p < order]
        pairs += [(p, c) for p, c in other.coefficients() if p < order]
        return LaurentSeries.from_coefficients(pairs, order)

    def __neg__(self) -> "LaurentSeries":
        if self.is_zero:
            return self
        return LaurentSeries(self.valuation, [-c for c in self.coeffs], self.order)

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + (-other)

    def scale(self, scalar: object) -> "LaurentSeries":
        """Multiply by a scalar from the coefficient ring (order unchanged)."""
        s = _as_poly(scalar)
        if s.is_zero or self.is_zero:
            return LaurentSeries.zero(self.order)
        return LaurentSeries(self.valuation, [c * s for c in self.coeffs], self.order)

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        v1 = self.valuation if not self.is_zero else self.order
        v2 = other.valuation if not other.is_zero else other.order
        order = min(self.order + v2, other.order + v1)
        if self.is_zero or other.is_zero:
            return LaurentSeries.zero(order)
        width = len(self.coeffs) + len(other.coeffs) - 1
        if order != _INF:
            width = min(width, order - v1 - v2)
        if width <= 0:
            return LaurentSeries.zero(order)
        acc: list[CoeffPoly] = [CoeffPoly.zero()] * width
        for i, c1 in enumerate(self.coeffs):
            if c1.is_zero:
                continue
            jmax = min(len(other.coeffs), width - i)
            for j in range(jmax):
                c2 = other.coeffs[j]
                if not c2.is_zero:
                    acc[i + j] = acc[i + j] + c1 * c2
        return LaurentSeries(v1 + v2, acc, order)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by z**k."""
        order = self.order if self.order == _INF else self.order + k
        if self.is_zero:
            return LaurentSeries.zero(order)
        return LaurentSeries(self.valuation + k, self.coeffs, order)

    def inverse(self) -> "LaurentSeries":
        """Multiplicative inverse; the lowest coefficient must be a rational unit."""
        if self.is_zero:
            raise ZeroDivisionError("inverse of the zero series")
        lead = self.coeffs[0]
        try:
            lead_const = lead.as_constant()
        except ValueError:
            raise ValueError(
                "series inverse needs a rational-constant leading coefficient, got "
                f"{lead.canonical_text()}"
            ) from None
        if lead_const == 0:
            raise ZeroDivisionError("inverse of a series with zero leading coefficient")
        v = self.valuation
        inv_lead = Fraction(1) / lead_const
        if len(self.coeffs) == 1:
            # a pure monomial inverts exactly
            order = self.order if self.order == _INF else self.order - 2 * v
            return LaurentSeries.monomial(-v, inv_lead, None if order == _INF else order)
        if self.order == _INF:
            raise InsufficientOrderError(
                "inverse of an exact multi-term series is an infinite object; truncate() first"
            )
        order = self.order - 2 * v
        rel_len = int(self.order - v)  # reliable relative powers 0 .. rel_len-1
        if rel_len <= 0:
            return LaurentSeries.zero(order)
        # write self = lead * z^v * (1 + u); solve (1 + u) * w = 1 by recursion
        u = [CoeffPoly.zero()] * rel_len
        for i, c in enumerate(self.coeffs[1:], start=1):
            if i < rel_len:
                u[i] = c * inv_lead
        w: list[CoeffPoly] = [CoeffPoly.one()] + [CoeffPoly.zero()] * (rel_len - 1)
        for k in range(1, rel_len):
            acc = CoeffPoly.zero()
            for j in range(1, k + 1):
                if not u[j].is_zero and not w[k - j].is_zero:
                    acc = acc + u[j] * w[k - j]
            w[k] = -acc
        return LaurentSeries(-v, [c * inv_lead for c in w], order)

    def __pow__(self, n: int) -> "LaurentSeries":
        if n == 0:
            return LaurentSeries.monomial(0, 1, None)
        base = self if n > 0 else self.inverse()
        result = base
        for _ in range(abs(n) - 1):
            result = result * base
        return result

    def derivative(self) -> "LaurentSeries":
        order = self.order if self.order == _INF else self.order - 1
        pairs = [(p - 1, c * p) for p, c in self.coefficients() if p != 0]
        return LaurentSeries.from_coefficients(pairs, order)

    def residue(self) -> CoeffPoly:
        """The coefficient of z**-1 (raises if that power is unreliable)."""
        return self.coefficient(-1)

    def compose(self, inner: "LaurentSeries") -> "LaurentSeries":
        """self(inner(z)) for an inner series of valuation >= 1.

        The outer series must be a Taylor series (valuation >= 0); negative
        outer powers of a general composite are not needed in this package
        and are rejected rather than guessed.
        """
        if not self.is_zero and self.valuation < 0:
            raise ValueError("composition with a Laurent (negative-valuation) outer series")
        vg = inner.valuation if not inner.is_zero else inner.order
        if vg < 1:
            raise ValueError("inner series of a composition must have valuation >= 1")
        outer_reach = _INF if self.order == _INF else self.order * vg
        order = min(outer_reach, inner.order)
        result = LaurentSeries.zero(order)
        if self.is_zero:
            return result
        power = LaurentSeries.monomial(0, 1, None)  # inner**0
        power_exp = 0
        for p, c in self.coefficients():
            while power_exp < p:
                power = power * inner
                if order != _INF and power.order > order:
                    power = power.truncate(order)
                power_exp += 1
            result = result + power.scale(c)
        return result.truncate(order) if result.order > order else result

    def map_coefficients(self, fn) -> "LaurentSeries":
        if self.is_zero:
            return self
        return LaurentSeries(self.valuation, [fn(c) for c in self.coeffs], self.order)

    def swap_bars(self) -> "LaurentSeries":
        """Apply the a <-> abar involution to every coefficient."""
        return self.map_coefficients(lambda c: c.swap_bars())


def pre_schwarzian(f: LaurentSeries) -> LaurentSeries:
    """f''/f' — the logarithmic derivative of f'.

    Requires f' to be invertible as a series (valuation 0 with a rational
    constant lead), which holds for any normalized coefficient map.
    """
    fp = f.derivative()
    if fp.is_zero or fp.valuation != 0:
        raise ValueError("pre-schwarzian needs an invertible derivative (valuation-0 lead)")
    return fp.derivative() * fp.inverse()


def schwarzian(f: LaurentSeries) -> LaurentSeries:
    """(f''/f')' - (f''/f')^2 / 2, with explicit order-exhaustion reporting."""
    if f.order != _INF and f.order - f.valuation < 3:
        raise InsufficientOrderError(
            "schwarzian needs at least 3 reliable coefficients, have "
            f"{max(f.order - f.valuation, 0)}"
        )
    A = pre_schwarzian(f)
    return A.derivative() - (A * A).scale(Fraction(1, 2))


def series_reversion(f: LaurentSeries) -> LaurentSeries:
    """The compositional inverse g with f(g(z)) = z, to the order of f.

    f must have valuation 1 with unit leading coefficient, and the order of
    f must be finite — reversion of an exact polynomial is an infinite
    object, so truncate() to the window you need first.
    """
    if f.is_zero or f.valuation != 1:
        raise ValueError("reversion needs a series of valuation exactly 1")
    if f.coefficient(1) != CoeffPoly.one():
        raise ValueError("reversion needs leading coefficient 1")
    if f.order == _INF:
        raise InsufficientOrderError(
            "reversion of an exact series is an infinite object; truncate() first"
        )
    order = int(f.order)
    # g = z + sum b_k z^k determined coefficient by coefficient:
    # 0 = b_k + [z^k] f(g_{<k}) for every k >= 2.
    coeffs: list[CoeffPoly] = [CoeffPoly.one()]
    for k in range(2, order):
        g_partial = LaurentSeries(1, coeffs, k + 1)
        candidate = f.truncate(k + 1).compose(g_partial)
        coeffs.append(-candidate.coefficient(k))
    return LaurentSeries(1, coeffs, order)
