"""Virasoro modes realized as differential operators on coefficient rings.

The representation acts on polynomials in the Taylor coefficients
``a_1, a_2, ...`` of a normalized univalent map ``F(z) = z(1 + sum a_j z^j)``
together with their barred partners.  Each mode is a first-order operator

    L_n = P-part * d/da  +  Q-part * d/dabar  -  varpi_n * E  -  (c/12) * vartheta_n

where ``E`` is the total-weight Euler operator whose eigenvalue on a state
at bi-level ``(N, Ntilde)`` is ``2*lambda + N + Ntilde``.  Because the
polynomial realization of a level subspace is not spanned by
bidegree-homogeneous monomials, states carry their bi-level as explicit
data (:class:`StatePoly`) rather than reading it off monomial degrees.

Every coefficient polynomial is extracted from exact truncated-series
computations with tracked reliability; nothing here ever truncates
silently — an operator that cannot act exactly on a state raises
:class:`OperatorWindowError` instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .symbolic import (
    CC,
    LAMBDA,
    CoeffPoly,
    LaurentSeries,
    Partition,
    a as gen_a,
    abar as gen_abar,
    partitions_of,
    rank as matrix_rank,
    schwarzian,
    series_reversion,
)
from .symbolic.poly import _KIND_A, _KIND_ABAR, _KIND_CC, _KIND_LAMBDA  # noqa: F401
from .verma import cocycle

__all__ = [
    "OperatorWindowError",
    "StatePoly",
    "ModeOperator",
    "OperatorTable",
    "build_mode_operator",
    "varpi",
    "vartheta",
    "commutator_parts",
    "commutator_defect",
    "vacuum_state",
    "fresh_state",
    "psi_state",
    "geometric_pairing",
    "duality_pairing",
    "level_rank",
    "degenerate_weight_fraction",
    "central_charge_fraction",
    "state_family_residuals",
]

_LAM = CoeffPoly.generator(LAMBDA)
_C = CoeffPoly.generator(CC)
_ONE = CoeffPoly.one()
_ZERO = CoeffPoly.zero()


class OperatorWindowError(ValueError):
    """An operator was asked to act beyond the index window it was built for."""


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StatePoly:
    """A polynomial state tagged with its representation bi-level.

    The tag is genuine extra data: mode images are generally supported on
    monomials of several bidegrees, so the level cannot be recovered from
    the polynomial alone.
    """

    poly: CoeffPoly
    level: tuple[int, int] | None  # None only for the zero state

    def __post_init__(self):
        if self.poly.is_zero:
            object.__setattr__(self, "level", None)
        elif self.level is None:
            raise ValueError("nonzero states need an explicit bi-level")

    @property
    def is_zero(self) -> bool:
        return self.poly.is_zero

    def max_index(self) -> int:
        return self.poly.max_coefficient_index()

    def scale(self, factor: CoeffPoly | Fraction | int) -> "StatePoly":
        if isinstance(factor, (int, Fraction)):
            factor = CoeffPoly.constant(factor)
        return StatePoly(self.poly * factor, self.level)

    def __add__(self, other: "StatePoly") -> "StatePoly":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.level != other.level:
            raise ValueError(f"cannot add states at levels {self.level} and {other.level}")
        return StatePoly(self.poly + other.poly, self.level)

    def __sub__(self, other: "StatePoly") -> "StatePoly":
        return self + other.scale(-1)

    def substitute(self, assignment) -> "StatePoly":
        return StatePoly(self.poly.substitute(assignment), self.level)

    def __repr__(self) -> str:
        return f"StatePoly({self.poly.canonical_text()!r}, level={self.level})"


def vacuum_state() -> StatePoly:
    return StatePoly(_ONE, (0, 0))


def fresh_state(poly: CoeffPoly) -> StatePoly:
    """Tag a polynomial with the bi-level read off its monomials.

    Only well-defined when every monomial shares one weighted bidegree —
    the convention for seeding states from raw monomials like ``a_2``.
    """
    if poly.is_zero:
        return StatePoly(poly, None)
    degrees = poly.weighted_monomial_degrees()
    if len(degrees) != 1:
        raise ValueError(f"polynomial mixes bidegrees {sorted(degrees)}; tag the level explicitly")
    return StatePoly(poly, next(iter(degrees)))


# ---------------------------------------------------------------------------
# mode operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModeOperator:
    """One Virasoro mode of one family, exact on indices up to ``max_index``."""

    mode: int
    bar: bool
    max_index: int
    e_coeff: CoeffPoly
    id_coeff: CoeffPoly
    d_a: Mapping[int, CoeffPoly]
    d_abar: Mapping[int, CoeffPoly]
    provenance: str = field(compare=False, default="")

    def apply(self, state: StatePoly) -> StatePoly:
        if state.is_zero:
            return state
        if state.max_index() > self.max_index:
            raise OperatorWindowError(
                f"state reaches index {state.max_index()} but mode {self.mode} "
                f"operator only covers indices up to {self.max_index}"
            )
        n_left, n_right = state.level
        out = _ZERO
        if not self.e_coeff.is_zero:
            eigen = 2 * _LAM + (n_left + n_right)
            out = out + self.e_coeff * eigen * state.poly
        if not self.id_coeff.is_zero:
            out = out + self.id_coeff * state.poly
        for gen in state.poly.generators():
            if gen.kind == _KIND_A:
                coeff = self.d_a.get(gen.index)
            elif gen.kind == _KIND_ABAR:
                coeff = self.d_abar.get(gen.index)
            else:
                continue
            if coeff is not None and not coeff.is_zero:
                out = out + coeff * state.poly.derivative(gen)
        if self.bar:
            new_level = (n_left, n_right - self.mode)
        else:
            new_level = (n_left - self.mode, n_right)
        return StatePoly(out, new_level if not out.is_zero else None)

    def mirrored(self) -> "ModeOperator":
        """The same mode of the other family (bar involution of all data)."""
        return ModeOperator(
            mode=self.mode,
            bar=not self.bar,
            max_index=self.max_index,
            e_coeff=self.e_coeff.swap_bars(),
            id_coeff=self.id_coeff.swap_bars(),
            d_a={m: c.swap_bars() for m, c in self.d_abar.items()},
            d_abar={m: c.swap_bars() for m, c in self.d_a.items()},
            provenance=self.provenance + "|mirrored",
        )

    def agrees_with(self, other: "ModeOperator") -> bool:
        """Coefficient equality on the shared index window."""
        if (self.mode, self.bar) != (other.mode, other.bar):
            return False
        if self.e_coeff != other.e_coeff or self.id_coeff != other.id_coeff:
            return False
        window = min(self.max_index, other.max_index)
        for m in range(1, window + 1):
            if self.d_a.get(m, _ZERO) != other.d_a.get(m, _ZERO):
                return False
            if self.d_abar.get(m, _ZERO) != other.d_abar.get(m, _ZERO):
                return False
        return True

    def __repr__(self) -> str:
        family = "Lbar" if self.bar else "L"
        return f"<{family}_{self.mode} up to index {self.max_index} via {self.provenance}>"


def _coefficient_map(order: int) -> LaurentSeries:
    """F(z) = z(1 + a_1 z + a_2 z^2 + ...) truncated at the given order."""
    coeffs: list[CoeffPoly] = [_ONE]
    coeffs += [CoeffPoly.generator(gen_a(j)) for j in range(1, order - 1)]
    return LaurentSeries(1, coeffs, order)


def _welding_build(n: int, max_index: int, series_order: int | None) -> dict:
    """P/Q/E/id data for mode n from the welded deformation fields.

    The deformation of the coefficient body induced by the vector field
    ``-z**(n+1) d/dz`` acting on the welding splits into an interior motion
    (the P-part plus the Euler term) and a reflected exterior motion (the
    Q-part); both are read off exactly as series coefficients.
    """
    order = series_order if series_order is not None else max_index + abs(n) + 2
    if order < max_index + 2:
        raise ValueError("series order too small for the requested index window")
    F = _coefficient_map(order)
    Fp = F.derivative()
    Fp_inv = Fp.inverse()
    q = -(F ** (n + 1)) * Fp_inv
    gamma = q.coefficient(1) * Fraction(1, 2)
    s_minus_z = F * Fp_inv - LaurentSeries.monomial(1, 1, None)

    q_high = LaurentSeries.from_coefficients(
        [(p, c) for p, c in q.coefficients() if p >= 2], q.order
    )
    f_dot = (q_high - s_minus_z.scale(gamma)) * Fp

    # exterior side: the reflected low part of q, bar-conjugated
    u_pairs = []
    i = 2
    while 2 - i >= q.valuation:
        low = q.swap_bars().coefficient(2 - i)
        if not low.is_zero:
            u_pairs.append((i, -low))
        i += 1
    u_high = LaurentSeries.from_coefficients(u_pairs, None)
    m_ring = (s_minus_z.scale(-gamma.swap_bars()) - u_high) * Fp

    d_a = {}
    d_abar = {}
    for m in range(1, max_index + 1):
        p_coeff = f_dot.coefficient(m + 1)
        if not p_coeff.is_zero:
            d_a[m] = p_coeff
        q_coeff = m_ring.coefficient(m + 1).swap_bars()
        if not q_coeff.is_zero:
            d_abar[m] = q_coeff

    # central coefficient from the Schwarzian of the inverse map
    if n <= -2:
        G = series_reversion(F.truncate(order))
        theta = -schwarzian(G).coefficient(-n - 2)
    else:
        theta = _ZERO
    return {
        "e_coeff": -gamma,
        "id_coeff": -(_C * theta) * Fraction(1, 12) if not theta.is_zero else _ZERO,
        "d_a": d_a,
        "d_abar": d_abar,
        "order": order,
    }


def build_mode_operator(
    n: int,
    bar: bool = False,
    max_index: int = 8,
    route: str = "welding",
    series_order: int | None = None,
) -> ModeOperator:
    """Construct one mode operator.

    ``route='welding'`` reads all data from the deformation series (works
    for every mode); ``route='recursion'`` builds modes below -2 from
    nested brackets of adjacent modes, as an independent construction.
    """
    if route == "welding":
        data = _welding_build(n, max_index, series_order)
        op = ModeOperator(
            mode=n,
            bar=False,
            max_index=max_index,
            e_coeff=data["e_coeff"],
            id_coeff=data["id_coeff"],
            d_a=data["d_a"],
            d_abar=data["d_abar"],
            provenance=f"welding(order={data['order']})",
        )
    elif route == "recursion":
        if n > -3:
            raise ValueError("the bracket recursion only defines modes below -2")
        depth = -n
        current = build_mode_operator(-2, max_index=max_index + depth - 2)
        step = build_mode_operator(-1, max_index=max_index + depth - 1)
        for j in range(2, depth):
            parts = commutator_parts(step, current)
            current = ModeOperator(
                mode=-(j + 1),
                bar=False,
                max_index=parts["max_index"],
                e_coeff=parts["e_coeff"] * Fraction(1, j - 1),
                id_coeff=parts["id_coeff"] * Fraction(1, j - 1),
                d_a={m: c * Fraction(1, j - 1) for m, c in parts["d_a"].items()},
                d_abar={m: c * Fraction(1, j - 1) for m, c in parts["d_abar"].items()},
                provenance=f"recursion(depth={j + 1})",
            )
        op = current
        if op.max_index < max_index:
            raise OperatorWindowError("recursion lost more index coverage than expected")
    else:
        raise ValueError(f"unknown construction route {route!r}")
    return op.mirrored() if bar else op


# ---------------------------------------------------------------------------
# independent residue cross-checks for the scalar coefficients
# ---------------------------------------------------------------------------


def varpi(n: int, order: int = 12) -> CoeffPoly:
    """Euler coefficient of mode n via the inverse-map residue formula."""
    G = series_reversion(_coefficient_map(order))
    lg = G.derivative() * G.inverse()
    integrand = (lg * lg).shift(n + 1)
    return -integrand.residue() * Fraction(1, 2)


def vartheta(n: int, order: int = 12) -> CoeffPoly:
    """Central-direction coefficient of mode n via the Schwarzian residue."""
    G = series_reversion(_coefficient_map(order))
    integrand = schwarzian(G).shift(n + 1)
    return -integrand.residue()


# ---------------------------------------------------------------------------
# operator brackets
# ---------------------------------------------------------------------------


def _derive(op: ModeOperator, poly: CoeffPoly) -> CoeffPoly:
    """The pure derivation part of an operator applied to a polynomial."""
    if poly.max_coefficient_index() > op.max_index:
        raise OperatorWindowError(
            f"derivation input reaches index {poly.max_coefficient_index()} "
            f"beyond window {op.max_index}"
        )
    out = _ZERO
    for gen in poly.generators():
        if gen.kind == _KIND_A:
            coeff = op.d_a.get(gen.index)
        elif gen.kind == _KIND_ABAR:
            coeff = op.d_abar.get(gen.index)
        else:
            continue
        if coeff is not None and not coeff.is_zero:
            out = out + coeff * poly.derivative(gen)
    return out


def commutator_parts(u: ModeOperator, t: ModeOperator) -> dict:
    """The bracket [u, t] expanded back into (derivation, id, E) data.

    Valid for any pair of families: the Euler operator couples to both
    families' levels at once, which is what makes this closed form work.
    The result covers indices up to ``min(Mu - |mode_t|, Mt - |mode_u|)``.
    """
    window = min(u.max_index - abs(t.mode), t.max_index - abs(u.mode))
    if window < 1:
        raise OperatorWindowError("operators too narrow to bracket")
    nu, nt = u.mode, t.mode
    d_a: dict[int, CoeffPoly] = {}
    d_abar: dict[int, CoeffPoly] = {}
    for target, u_dict, t_dict in (
        (d_a, u.d_a, t.d_a),
        (d_abar, u.d_abar, t.d_abar),
    ):
        for m in range(1, window + 1):
            term = _ZERO
            t_cf = t_dict.get(m, _ZERO)
            u_cf = u_dict.get(m, _ZERO)
            if not t_cf.is_zero:
                term = term + _derive(u, t_cf)
                if not u.e_coeff.is_zero:
                    term = term - nt * u.e_coeff * t_cf
            if not u_cf.is_zero:
                term = term - _derive(t, u_cf)
                if not t.e_coeff.is_zero:
                    term = term + nu * t.e_coeff * u_cf
            if not term.is_zero:
                target[m] = term
    id_part = (
        _derive(u, t.id_coeff)
        - _derive(t, u.id_coeff)
        + nu * t.e_coeff * u.id_coeff
        - nt * u.e_coeff * t.id_coeff
    )
    e_part = (
        _derive(u, t.e_coeff)
        - _derive(t, u.e_coeff)
        + (nu - nt) * u.e_coeff * t.e_coeff
    )
    return {
        "mode": nu + nt,
        "max_index": window,
        "d_a": d_a,
        "d_abar": d_abar,
        "id_coeff": id_part,
        "e_coeff": e_part,
        "mixed": u.bar != t.bar,
    }


def commutator_defect(
    u: ModeOperator, t: ModeOperator, reference: "OperatorTable"
) -> dict:
    """Difference between [u, t] and its expected algebra value, as parts.

    For a same-family pair the expectation is ``(nu - nt) L_{nu+nt}`` plus
    the central cocycle times the identity; for a mixed pair it is zero.
    All returned polynomials vanish exactly iff the relation holds on the
    shared window.
    """
    parts = commutator_parts(u, t)
    window = parts["max_index"]
    defect_da = dict(parts["d_a"])
    defect_dabar = dict(parts["d_abar"])
    defect_e = parts["e_coeff"]
    defect_id = parts["id_coeff"]
    if not parts["mixed"]:
        factor = u.mode - t.mode
        if factor:
            ref = reference.mode_operator(parts["mode"], bar=u.bar)
            if ref.max_index < window:
                raise OperatorWindowError("reference operator window too small")
            for m in range(1, window + 1):
                expect = ref.d_a.get(m, _ZERO) * factor
                got = defect_da.pop(m, _ZERO)
                diff = got - expect
                if not diff.is_zero:
                    defect_da[m] = diff
                expect = ref.d_abar.get(m, _ZERO) * factor
                got = defect_dabar.pop(m, _ZERO)
                diff = got - expect
                if not diff.is_zero:
                    defect_dabar[m] = diff
            defect_e = defect_e - factor * ref.e_coeff
            defect_id = defect_id - factor * ref.id_coeff
        if u.mode + t.mode == 0:
            central = _C * Fraction(1, 12) * cocycle(u.mode, t.mode)
            defect_id = defect_id - central
    return {
        "mode": parts["mode"],
        "max_index": window,
        "d_a": defect_da,
        "d_abar": defect_dabar,
        "id_coeff": defect_id,
        "e_coeff": defect_e,
    }


# ---------------------------------------------------------------------------
# the operator table
# ---------------------------------------------------------------------------


class OperatorTable:
    """Cache of mode operators for both families at a fixed index window."""

    def __init__(self, max_index: int = 8, route: str = "welding"):
        if max_index < 1:
            raise ValueError("max_index must be at least 1")
        self.max_index = max_index
        self.route = route
        self._cache: dict[tuple[int, bool], ModeOperator] = {}

    def mode_operator(self, n: int, bar: bool = False) -> ModeOperator:
        key = (n, bar)
        if key not in self._cache:
            if not bar and (n, True) in self._cache:
                op = self._cache[(n, True)].mirrored()
            elif bar and (n, False) in self._cache:
                op = self._cache[(n, False)].mirrored()
            else:
                route = self.route if (self.route != "recursion" or n <= -3) else "welding"
                op = build_mode_operator(n, bar=bar, max_index=self.max_index, route=route)
            self._cache[key] = op
        return self._cache[key]

    def L(self, n: int) -> ModeOperator:
        return self.mode_operator(n, bar=False)

    def Lbar(self, n: int) -> ModeOperator:
        return self.mode_operator(n, bar=True)

    def preload(self, modes: Sequence[int], bars: Sequence[bool] = (False, True)) -> None:
        for n in modes:
            for b in bars:
                self.mode_operator(n, bar=b)

    def insert(self, op: ModeOperator) -> None:
        """Adopt an externally built operator (e.g. loaded from a cache file)."""
        if op.max_index < self.max_index:
            raise OperatorWindowError("operator narrower than the table window")
        self._cache[(op.mode, op.bar)] = op


# ---------------------------------------------------------------------------
# module states and pairings
# ---------------------------------------------------------------------------


def psi_state(
    k: Partition | Sequence[int],
    ktilde: Partition | Sequence[int],
    table: OperatorTable,
) -> StatePoly:
    """The geometric image of the abstract basis vector for (k, ktilde)."""
    parts = k.parts if isinstance(k, Partition) else tuple(sorted(k))
    tparts = ktilde.parts if isinstance(ktilde, Partition) else tuple(sorted(ktilde))
    state = vacuum_state()
    for p in tparts:  # smallest bar part innermost
        state = table.Lbar(-p).apply(state)
    for p in parts:
        state = table.L(-p).apply(state)
    return state


def geometric_pairing(
    k: Partition | Sequence[int],
    kprime: Partition | Sequence[int],
    table: OperatorTable,
) -> CoeffPoly:
    """<k | k'> computed entirely inside the geometric realization.

    Lower by k', then raise by k; the result must land on the vacuum line
    and the scalar in front is returned (a polynomial in weight and charge).
    """
    parts = k.parts if isinstance(k, Partition) else tuple(sorted(k))
    state = psi_state(kprime, (), table)
    for p in reversed(parts):  # largest raising mode acts first
        state = table.L(p).apply(state)
    if state.is_zero:
        return _ZERO
    if state.level != (0, 0):
        return _ZERO  # mismatched levels pair to zero; a residual state is fine
    if state.poly.max_coefficient_index() > 0:
        raise AssertionError(f"pairing did not land on the vacuum line: {state!r}")
    return state.poly


def duality_pairing(k: Partition | Sequence[int], table: OperatorTable) -> CoeffPoly:
    """Raising word of k applied to the coefficient monomial of k."""
    parts = k.parts if isinstance(k, Partition) else tuple(sorted(k))
    mono = _ONE
    for p in parts:
        mono = mono * CoeffPoly.generator(gen_a(p))
    state = fresh_state(mono)
    for p in reversed(parts):
        state = table.L(p).apply(state)
    if state.is_zero:
        return _ZERO
    if state.level != (0, 0) or state.poly.max_coefficient_index() > 0:
        raise AssertionError(f"duality pairing left a non-scalar: {state!r}")
    return state.poly


def level_rank(
    level: int,
    weight: Fraction | int,
    charge: Fraction | int,
    table: OperatorTable,
) -> int:
    """Rank of the lowered states at a pure left level, specialized exactly."""
    if level == 0:
        return 1
    assignment = {LAMBDA: Fraction(weight), CC: Fraction(charge)}
    basis = partitions_of(level)
    monomials = []
    for p in basis:
        mono = _ONE
        for part in p.parts:
            mono = mono * CoeffPoly.generator(gen_a(part))
        monomials.append(next(iter(mono.terms()))[0])
    index = {mono: i for i, mono in enumerate(monomials)}
    rows = []
    for p in basis:
        state = psi_state(p, (), table).substitute(assignment)
        row = [Fraction(0)] * len(monomials)
        for mono, coeff in state.poly.terms():
            row[index[mono]] = coeff
        rows.append(row)
    return matrix_rank(rows)


# ---------------------------------------------------------------------------
# the degenerate family as exact univariate rational functions
# ---------------------------------------------------------------------------

UniPoly = list[Fraction]


def _u_trim(p: UniPoly) -> UniPoly:
    while p and p[-1] == 0:
        p.pop()
    return p


def _u_add(p: UniPoly, q: UniPoly) -> UniPoly:
    out = [Fraction(0)] * max(len(p), len(q))
    for i, x in enumerate(p):
        out[i] += x
    for i, x in enumerate(q):
        out[i] += x
    return _u_trim(out)


def _u_mul(p: UniPoly, q: UniPoly) -> UniPoly:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        if x:
            for j, y in enumerate(q):
                if y:
                    out[i + j] += x * y
    return _u_trim(out)


def _u_pow(p: UniPoly, n: int) -> UniPoly:
    out: UniPoly = [Fraction(1)]
    for _ in range(n):
        out = _u_mul(out, p)
    return out


def degenerate_weight_fraction(r: int, s: int) -> tuple[UniPoly, UniPoly]:
    """lambda_{r,s} as a ratio of exact polynomials in kappa."""
    num = [
        Fraction(16 * (s * s - 1)),
        Fraction(8 * (1 - r * s)),
        Fraction(r * r - 1),
    ]
    den = [Fraction(0), Fraction(16)]
    return _u_trim(num), den


def central_charge_fraction() -> tuple[UniPoly, UniPoly]:
    """The central charge of the family as a ratio of kappa-polynomials."""
    return [Fraction(-48), Fraction(26), Fraction(-3)], [Fraction(0), Fraction(2)]


def state_family_residuals(
    poly: CoeffPoly, r: int, s: int
) -> dict[str, UniPoly]:
    """Substitute the degenerate family into a (weight, charge)-polynomial.

    Every coefficient monomial picks up a univariate polynomial in kappa
    after clearing all denominators; the returned dict holds the nonzero
    ones keyed by the monomial's canonical text.  An empty dict certifies
    that the polynomial vanishes identically along the family.
    """
    lam_num, lam_den = degenerate_weight_fraction(r, s)
    c_num, c_den = central_charge_fraction()

    grouped: dict[tuple, list[tuple[int, int, Fraction]]] = {}
    for mono, coeff in poly.terms():
        lam_exp = 0
        c_exp = 0
        body = []
        for kind, index, exp in mono:
            if kind == _KIND_LAMBDA:
                lam_exp = exp
            elif kind == _KIND_CC:
                c_exp = exp
            else:
                body.append((kind, index, exp))
        grouped.setdefault(tuple(body), []).append((lam_exp, c_exp, coeff))

    residuals: dict[str, UniPoly] = {}
    for body, entries in grouped.items():
        max_lam = max(e[0] for e in entries)
        max_c = max(e[1] for e in entries)
        total: UniPoly = []
        for lam_exp, c_exp, coeff in entries:
            term = [coeff]
            term = _u_mul(term, _u_pow(lam_num, lam_exp))
            term = _u_mul(term, _u_pow(lam_den, max_lam - lam_exp))
            term = _u_mul(term, _u_pow(c_num, c_exp))
            term = _u_mul(term, _u_pow(c_den, max_c - c_exp))
            total = _u_add(total, term)
        if total:
            key_poly = CoeffPoly({body: Fraction(1)}) if body else _ONE
            residuals[key_poly.canonical_text()] = total
    return residuals
