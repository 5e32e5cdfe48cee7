"""Tests for the geometric mode operators.

The welding construction is cross-checked three independent ways: against
the inverse-map residue formulas for its scalar coefficients, against the
bracket recursion for deep negative modes, and — for mode -2 — against a
constraint solver that knows nothing about series and recovers the operator
purely from the algebra it must satisfy.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopcft.operators import (
    ModeOperator,
    OperatorTable,
    OperatorWindowError,
    StatePoly,
    build_mode_operator,
    commutator_defect,
    commutator_parts,
    duality_pairing,
    fresh_state,
    geometric_pairing,
    level_rank,
    psi_state,
    state_family_residuals,
    vacuum_state,
    varpi,
    vartheta,
)
from loopcft.symbolic import (
    CC,
    LAMBDA,
    CoeffPoly,
    a,
    abar,
    partitions_of,
    solve_unique,
)
from loopcft.verma import central_charge, gram_entry, kac_lambda

LAM = CoeffPoly.generator(LAMBDA)
C = CoeffPoly.generator(CC)
A1 = CoeffPoly.generator(a(1))
A2 = CoeffPoly.generator(a(2))
A3 = CoeffPoly.generator(a(3))
AB1 = CoeffPoly.generator(abar(1))
AB2 = CoeffPoly.generator(abar(2))
ZERO = CoeffPoly.zero()


@pytest.fixture(scope="module")
def table():
    return OperatorTable(max_index=8)


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


def test_fresh_state_reads_levels():
    assert fresh_state(A2).level == (2, 0)
    assert fresh_state(A1 * A1 * AB2).level == (2, 2)
    assert fresh_state(A2 - A1 * A1).level == (2, 0)
    assert fresh_state(ZERO).is_zero
    with pytest.raises(ValueError):
        fresh_state(A1 + A2)  # mixes bidegrees (1,0) and (2,0)


def test_state_addition_guards_levels():
    with pytest.raises(ValueError):
        fresh_state(A1) + fresh_state(A2)
    s = fresh_state(A1) + StatePoly(ZERO, None)
    assert s.poly == A1


# ---------------------------------------------------------------------------
# operator data anchors
# ---------------------------------------------------------------------------


def test_mode_minus_one_matches_closed_form(table):
    op = table.L(-1)
    assert op.e_coeff == -A1
    assert op.id_coeff.is_zero
    # (m+2)(a_{m+1} - a_1 a_m) with a_0 = 1
    assert op.d_a[1] == 3 * (A2 - A1 * A1)
    assert op.d_a[2] == 4 * (A3 - A1 * A2)
    # m (a_1 abar_m - abar_{m-1}) with abar_0 = 1
    assert op.d_abar[1] == A1 * AB1 - 1
    assert op.d_abar[2] == 2 * (A1 * AB2 - AB1)


def test_mode_zero_is_the_half_euler_grading(table):
    op = table.L(0)
    assert op.e_coeff == CoeffPoly.constant(Fraction(1, 2))
    assert op.id_coeff.is_zero
    for m in range(1, 9):
        assert op.d_a[m] == Fraction(m, 2) * CoeffPoly.generator(a(m))
        assert op.d_abar[m] == Fraction(-m, 2) * CoeffPoly.generator(abar(m))


def test_mode_minus_two_vacuum_anchor(table):
    out = table.L(-2).apply(vacuum_state())
    expect = 3 * LAM * A1 * A1 - (4 * LAM + Fraction(1, 2) * C) * (A2 - A1 * A1)
    assert out.poly == expect
    assert out.level == (2, 0)


def test_scalar_coefficients_match_residue_route(table):
    for n in range(-4, 5):
        op = table.L(n)
        assert op.e_coeff == -varpi(n, 14), n
        theta = vartheta(n, 14)
        assert op.id_coeff == -(C * theta) * Fraction(1, 12), n


def test_bar_family_is_the_mirror(table):
    for n in (-2, 0, 3):
        op = table.L(n)
        mirror = table.Lbar(n)
        assert mirror.e_coeff == op.e_coeff.swap_bars()
        for m in range(1, 9):
            assert mirror.d_abar.get(m, ZERO) == op.d_a.get(m, ZERO).swap_bars()
            assert mirror.d_a.get(m, ZERO) == op.d_abar.get(m, ZERO).swap_bars()


def test_series_order_independence():
    for n in (-3, -1, 2):
        lean = build_mode_operator(n, max_index=6)
        padded = build_mode_operator(n, max_index=6, series_order=6 + abs(n) + 6)
        assert lean.agrees_with(padded), n


def test_apply_refuses_states_beyond_window():
    op = build_mode_operator(-1, max_index=3)
    wide = fresh_state(CoeffPoly.generator(a(5)))
    with pytest.raises(OperatorWindowError):
        op.apply(wide)


# ---------------------------------------------------------------------------
# action examples
# ---------------------------------------------------------------------------


def test_action_on_a2(table):
    s = fresh_state(A2)
    assert table.L(0).apply(s).poly == (LAM + 2) * A2
    assert table.L(1).apply(s).poly == -2 * A1
    assert table.Lbar(1).apply(s).is_zero
    assert table.Lbar(0).apply(s).poly == LAM * A2


def test_highest_weight_property(table):
    v = vacuum_state()
    for n in range(1, 7):
        assert table.L(n).apply(v).is_zero
        assert table.Lbar(n).apply(v).is_zero
    assert table.L(0).apply(v).poly == LAM
    assert table.Lbar(0).apply(v).poly == LAM


def test_lowered_vacuum_states(table):
    assert psi_state((1,), (), table).poly == -2 * LAM * A1
    psi11 = psi_state((1, 1), (), table)
    assert psi11.poly == 2 * LAM * (2 * LAM + 1) * A1 * A1 - 6 * LAM * (A2 - A1 * A1)
    mixed = psi_state((1,), (1,), table)
    assert mixed.level == (1, 1)
    assert mixed.poly == mixed.poly.swap_bars()  # symmetric under the involution


# ---------------------------------------------------------------------------
# commutators
# ---------------------------------------------------------------------------


def test_commutator_on_vacuum(table):
    v = vacuum_state()

    def bracket(n, m, state):
        first = table.L(n).apply(table.L(m).apply(state))
        second = table.L(m).apply(table.L(n).apply(state))
        return first - second

    assert bracket(1, -1, v).poly == 2 * LAM
    assert bracket(2, -2, v).poly == 4 * LAM + Fraction(1, 2) * C


def test_operator_commutators_same_family(table):
    for n, m in [(1, -1), (2, -2), (3, -3), (2, -1), (-1, -2), (0, 3), (4, -3), (3, 5)]:
        d = commutator_defect(table.L(n), table.L(m), table)
        assert not d["d_a"], (n, m)
        assert not d["d_abar"], (n, m)
        assert d["id_coeff"].is_zero, (n, m)
        assert d["e_coeff"].is_zero, (n, m)


def test_operator_commutators_mixed_family_vanish(table):
    for n in range(-3, 4):
        for m in range(-3, 4):
            d = commutator_defect(table.L(n), table.Lbar(m), table)
            assert not d["d_a"] and not d["d_abar"], (n, m)
            assert d["id_coeff"].is_zero and d["e_coeff"].is_zero, (n, m)


def test_bracket_recursion_reproduces_welding():
    for ell in (2, 3):
        lhs = commutator_parts(
            build_mode_operator(-1, max_index=8), build_mode_operator(-ell, max_index=8)
        )
        direct = build_mode_operator(-ell - 1, max_index=lhs["max_index"])
        scale = Fraction(1, ell - 1)
        assert lhs["e_coeff"] * scale == direct.e_coeff
        assert lhs["id_coeff"] * scale == direct.id_coeff
        for m in range(1, lhs["max_index"] + 1):
            assert lhs["d_a"].get(m, ZERO) * scale == direct.d_a.get(m, ZERO)
            assert lhs["d_abar"].get(m, ZERO) * scale == direct.d_abar.get(m, ZERO)


def test_recursion_route_operator_equality():
    for n, window in [(-3, 6), (-4, 5)]:
        assert build_mode_operator(n, max_index=window).agrees_with(
            build_mode_operator(n, max_index=window, route="recursion")
        )
    with pytest.raises(ValueError):
        build_mode_operator(-2, route="recursion")


@settings(max_examples=25, deadline=None)
@given(
    n=st.integers(-3, 3),
    m=st.integers(-3, 3),
    state_level=st.integers(0, 2),
)
def test_commutator_action_matches_algebra(n, m, state_level):
    table = _shared_table()
    for p in partitions_of(state_level):
        s = psi_state(p, (), table)
        first = table.L(n).apply(table.L(m).apply(s))
        second = table.L(m).apply(table.L(n).apply(s))
        expect = table.L(n + m).apply(s).scale(n - m)
        if n + m == 0:
            expect = expect + s.scale(C * Fraction(n**3 - n, 12))
        assert (first - second - expect).is_zero, (n, m, p)


_TABLE_CACHE = {}


def _shared_table():
    if "t" not in _TABLE_CACHE:
        _TABLE_CACHE["t"] = OperatorTable(max_index=10)
    return _TABLE_CACHE["t"]


# ---------------------------------------------------------------------------
# degree structure (the shape every coefficient must have)
# ---------------------------------------------------------------------------


def test_degree_structure(table):
    for n in range(-4, 5):
        op = table.L(n)
        for m in range(1, 9):
            p = op.d_a.get(m, ZERO)
            if n >= 1:
                if m < n:
                    assert p.is_zero, (n, m)
                elif m == n:
                    assert p == CoeffPoly.constant(-1), (n, m)
            if not p.is_zero:
                assert p.bidegree() == (m - n, 0), (n, m)
                assert p.weighted_monomial_degrees() == {(m - n, 0)}, (n, m)
            q = op.d_abar.get(m, ZERO)
            if n >= 1:
                assert q.is_zero, (n, m)
            for left, right in q.weighted_monomial_degrees():
                assert left - right == -(n + m), (n, m)
                assert left + right <= m - n, (n, m)


# ---------------------------------------------------------------------------
# pairings, ranks, degenerate lines
# ---------------------------------------------------------------------------


def test_duality_pairing(table):
    assert duality_pairing((1,), table) == CoeffPoly.constant(-1)
    assert duality_pairing((1, 1), table) == CoeffPoly.constant(2)
    assert duality_pairing((3,), table) == CoeffPoly.constant(-1)
    for parts in [(1, 2), (1, 1, 1), (2, 2), (1, 3)]:
        expect = Fraction(1)
        for part in set(parts):
            mult = parts.count(part)
            sign = Fraction(-1) ** mult
            fact = 1
            for i in range(2, mult + 1):
                fact *= i
            expect *= sign * fact
        assert duality_pairing(parts, table) == CoeffPoly.constant(expect), parts


def test_geometric_pairing_matches_abstract_gram(table):
    for n in range(4):
        for k in partitions_of(n):
            for kp in partitions_of(n):
                geo = geometric_pairing(k, kp, table)
                assert geo == gram_entry(k.parts, kp.parts), (k, kp)


def test_geometric_pairing_vanishes_across_levels(table):
    assert geometric_pairing((1,), (2,), table) == ZERO


def test_level_ranks(table):
    charge = central_charge(3)
    assert level_rank(0, Fraction(1, 3), charge, table) == 1
    assert level_rank(2, Fraction(1, 3), charge, table) == 2
    assert level_rank(2, Fraction(1, 2), charge, table) == 1


def test_singular_combination_vanishes_along_family(table):
    v = vacuum_state()
    quad = table.L(-1).apply(table.L(-1).apply(v))
    combo = quad - table.L(-2).apply(v).scale(Fraction(2, 3) * (2 * LAM + 1))
    for r, s in [(1, 2), (2, 1)]:
        assert state_family_residuals(combo.poly, r, s) == {}
    # a generic straight line does NOT kill it: weight lambda = kappa/16
    bogus = combo.poly.substitute({LAMBDA: Fraction(7, 9), CC: Fraction(1, 2)})
    assert not bogus.is_zero


# ---------------------------------------------------------------------------
# constraint-solver oracle for mode -2
#
# Reconstructs the mode -2 operator from scratch: take the Euler/identity
# coefficients as fixed by the vacuum anchor, leave every P/Q coefficient an
# unknown rational, and impose the defining brackets on a spanning family of
# monomial states — with modes 1 and 2 of the same family, and with modes
# -1, 1, 2 of the mirror family (which must all commute; the lowering one is
# needed because a raising-only probe cannot see past the top of the index
# window).  The unique solution must be the welded operator, coefficient by
# coefficient.
# ---------------------------------------------------------------------------


def _monomials_of_bidegree(left: int, right: int) -> list[CoeffPoly]:
    out = []
    for pl in partitions_of(left):
        mono_l = CoeffPoly.one()
        for part in pl.parts:
            mono_l = mono_l * CoeffPoly.generator(a(part))
        for pr in partitions_of(right):
            mono = mono_l
            for part in pr.parts:
                mono = mono * CoeffPoly.generator(abar(part))
            out.append(mono)
    return out


def _unknown_basis(window: int):
    """(unknown id, target index m, side, monomial) for every candidate term."""
    unknowns = []
    uid = 0
    for m in range(1, window + 1):
        for mono in _monomials_of_bidegree(m + 2, 0):
            unknowns.append((uid, m, "a", mono))
            uid += 1
        # bar-side terms: left - right = 2 - m, weighted total <= m + 2
        for total in range(abs(2 - m), m + 3):
            if (total - (2 - m)) % 2:
                continue
            right = (total - (2 - m)) // 2
            left = total - right
            if left < 0 or right < 0:
                continue
            for mono in _monomials_of_bidegree(left, right):
                unknowns.append((uid, m, "abar", mono))
                uid += 1
    return unknowns


def _apply_unknown(unknowns, g, idc, state):
    """Action of the candidate operator; linear in the unknowns.

    Returns {None: known poly} plus {uid: poly multiplying that unknown}.
    """
    n_left, n_right = state.level
    eps = 2 * LAM + (n_left + n_right)
    out = {None: g * eps * state.poly + idc * state.poly}
    for uid, m, side, mono in unknowns:
        gen = a(m) if side == "a" else abar(m)
        d = state.poly.derivative(gen)
        if not d.is_zero:
            out[uid] = out.get(uid, ZERO) + mono * d
    return out


def _linear_equations(lin_combo):
    """Rows (coeff per unknown, rhs) from 'linear combination == 0'."""
    monomials = set()
    for poly in lin_combo.values():
        for mono, _ in poly.terms():
            monomials.add(mono)
    rows = []
    for mono in sorted(monomials):
        row = {}
        rhs = Fraction(0)
        for key, poly in lin_combo.items():
            coeff = dict(poly.terms()).get(mono, Fraction(0))
            if key is None:
                rhs = -coeff
            elif coeff:
                row[key] = coeff
        rows.append((row, rhs))
    return rows


def test_constraint_solver_recovers_mode_minus_two():
    window = 3
    probe = OperatorTable(max_index=window + 4)
    target = build_mode_operator(-2, max_index=window)

    g = target.e_coeff
    idc = target.id_coeff
    unknowns = _unknown_basis(window)
    n_unknowns = len(unknowns)

    states = []
    for left in range(4):
        for right in range(4):
            if left + right > 4:
                continue
            for mono in _monomials_of_bidegree(left, right):
                states.append(fresh_state(mono))

    rows = []
    rhs_list = []
    probes = ((1, False), (2, False), (1, True), (2, True), (-1, True))
    for upper_mode, mirror in probes:
        upper = probe.Lbar(upper_mode) if mirror else probe.L(upper_mode)
        for s in states:
            # same family: [L_up, T] s == (up + 2) L_{up-2} s (+ central at 2)
            # mirror family: [Lbar_up, T] s == 0
            if upper_mode < 0 and s.max_index() >= window:
                continue  # keep the unknown operator inside its index window
            t_s = _apply_unknown(unknowns, g, idc, s)
            mid_level = (s.level[0] + 2, s.level[1])
            lhs = {}
            for key, poly in t_s.items():
                image = upper.apply(StatePoly(poly, mid_level))
                if not image.poly.is_zero:
                    lhs[key] = image.poly
            up_s = upper.apply(s)
            if not up_s.is_zero:
                t_up = _apply_unknown(unknowns, g, idc, up_s)
                for key, poly in t_up.items():
                    lhs[key] = lhs.get(key, ZERO) - poly
            if not mirror:
                expect = probe.L(upper_mode - 2).apply(s).scale(upper_mode + 2)
                if upper_mode == 2:
                    expect = expect + s.scale(C * Fraction(1, 2))
                lhs[None] = lhs.get(None, ZERO) - expect.poly
            for row, rhs in _linear_equations(lhs):
                dense = [row.get(uid, Fraction(0)) for uid in range(n_unknowns)]
                rows.append(dense)
                rhs_list.append(rhs)

    solution = solve_unique(rows, rhs_list)

    recovered_a = {m: ZERO for m in range(1, window + 1)}
    recovered_abar = {m: ZERO for m in range(1, window + 1)}
    for (uid, m, side, mono), value in zip(unknowns, solution):
        if value:
            if side == "a":
                recovered_a[m] = recovered_a[m] + mono * value
            else:
                recovered_abar[m] = recovered_abar[m] + mono * value
    for m in range(1, window + 1):
        assert recovered_a[m] == target.d_a.get(m, ZERO), ("a", m)
        assert recovered_abar[m] == target.d_abar.get(m, ZERO), ("abar", m)
