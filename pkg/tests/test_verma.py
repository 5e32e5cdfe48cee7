"""Tests for the abstract highest-weight module and its Gram/Kac data."""

import json
from fractions import Fraction

import pytest

from loopcft.symbolic import CC, LAMBDA, CoeffPoly, partition_count, partitions_of
from loopcft.verma import (
    VermaVector,
    apply_mode,
    basis_vector,
    central_charge,
    cocycle,
    gram_entry,
    gram_matrix,
    gram_matrix_at,
    gram_rank_at,
    gram_report,
    kac_determinant,
    kac_lambda,
    normal_order,
    singular_vectors,
    vacuum,
)

LAM = CoeffPoly.generator(LAMBDA)
C = CoeffPoly.generator(CC)

KAPPAS = [Fraction(2), Fraction(8, 3), Fraction(3), Fraction(4)]


def test_highest_weight_axioms():
    for n in range(1, 7):
        assert apply_mode(n, vacuum()).is_zero
    v0 = apply_mode(0, vacuum())
    assert v0.coefficient(()) == LAM
    assert len(list(v0.terms())) == 1


def test_normal_order_goldens():
    assert normal_order((1, -1)).coefficient(()) == 2 * LAM
    assert normal_order((2, -2)).coefficient(()) == 4 * LAM + Fraction(1, 2) * C
    # straightening a disordered lowering word
    v = normal_order((-1, -2))
    assert v.coefficient((1, 2)) == CoeffPoly.one()
    assert v.coefficient((3,)) == CoeffPoly.constant(1)
    w = normal_order((-2, -1))
    assert w.coefficient((1, 2)) == CoeffPoly.one()
    assert w.coefficient((3,)) == CoeffPoly.zero()


def test_commutation_relation_exhaustive():
    """[L_a, L_b] = (a-b) L_{a+b} + (c/12)(a^3-a) delta on low-level states."""
    states = [basis_vector(p) for n in range(4) for p in partitions_of(n)]
    for a in range(-4, 5):
        for b in range(-4, 5):
            central = CoeffPoly.constant(0)
            if a + b == 0:
                central = C * Fraction(a**3 - a, 12)
            for v in states:
                lhs = apply_mode(a, apply_mode(b, v)) - apply_mode(b, apply_mode(a, v))
                rhs = apply_mode(a + b, v).scale(a - b) + v.scale(central)
                assert lhs == rhs, (a, b)


def _pair(u: VermaVector, v: VermaVector) -> CoeffPoly:
    total = CoeffPoly.zero()
    for ku, cu in u.terms():
        for kv, cv in v.terms():
            total = total + cu * cv * gram_entry(ku, kv)
    return total


def test_raising_is_adjoint_to_lowering():
    basis = [p for n in range(4) for p in partitions_of(n)]
    for n in range(1, 4):
        for pu in basis:
            for pv in basis:
                u, v = basis_vector(pu), basis_vector(pv)
                assert _pair(apply_mode(-n, u), v) == _pair(u, apply_mode(n, v))


def test_gram_goldens():
    assert gram_matrix(0) == ((CoeffPoly.one(),),)
    assert gram_matrix(1) == ((2 * LAM,),)
    g2 = gram_matrix(2)
    assert g2[0][0] == 4 * LAM * (2 * LAM + 1)
    assert g2[0][1] == 6 * LAM
    assert g2[1][0] == 6 * LAM
    assert g2[1][1] == 4 * LAM + Fraction(1, 2) * C


def test_gram_is_symmetric_up_to_level_6():
    for level in range(7):
        g = gram_matrix(level)
        n = len(g)
        assert n == partition_count(level)
        for i in range(n):
            for j in range(i):
                assert g[i][j] == g[j][i], (level, i, j)


def test_gram_entries_vanish_across_levels():
    assert gram_entry((1,), (2,)) == CoeffPoly.zero()
    assert gram_entry((), (1, 1)) == CoeffPoly.zero()


def test_central_charge_family():
    assert central_charge(Fraction(8, 3)) == 0
    assert central_charge(2) == -2
    assert central_charge(4) == 1
    assert central_charge(3) == Fraction(1, 2)
    with pytest.raises(ValueError):
        central_charge(0)


def test_degenerate_weights():
    assert kac_lambda(1, 1, Fraction(17, 5)) == 0
    assert kac_lambda(1, 2, 3) == Fraction(1, 2)
    assert kac_lambda(2, 1, 3) == Fraction(1, 16)
    assert kac_lambda(1, 3, 3) == Fraction(5, 3)
    for kappa in KAPPAS:
        assert kac_lambda(1, 2, kappa) == (6 - kappa) / (2 * kappa)
        assert kac_lambda(2, 1, kappa) == (3 * kappa - 8) / 16
    with pytest.raises(ValueError):
        kac_lambda(0, 1, 3)


def test_kac_determinant_small_levels():
    assert kac_determinant(0) == CoeffPoly.one()
    assert kac_determinant(1) == 2 * LAM
    d2 = kac_determinant(2)
    for kappa in KAPPAS:
        spec = d2.substitute({CC: central_charge(kappa)})
        expect = (
            32
            * LAM
            * (LAM - kac_lambda(1, 2, kappa))
            * (LAM - kac_lambda(2, 1, kappa))
        )
        assert spec == expect, kappa


def test_determinant_vanishes_exactly_at_degenerate_weights():
    for kappa in KAPPAS:
        charge = central_charge(kappa)
        for r, s in [(1, 2), (2, 1), (1, 3), (3, 1), (2, 2)]:
            level = r * s
            if level > 4:
                continue
            weight = kac_lambda(r, s, kappa)
            det = kac_determinant(level).substitute({LAMBDA: weight, CC: charge})
            assert det == CoeffPoly.zero(), (kappa, r, s)


def test_gram_rank_deficiency_at_degenerate_weights():
    for kappa in KAPPAS:
        charge = central_charge(kappa)
        for r, s in [(1, 2), (2, 1)]:
            level = r * s
            weight = kac_lambda(r, s, kappa)
            assert gram_rank_at(level, weight, charge) <= partition_count(level) - 1


def test_gram_full_rank_off_the_degenerate_set():
    weight = Fraction(37, 11)
    for kappa in KAPPAS:
        charge = central_charge(kappa)
        for level in range(5):
            assert gram_rank_at(level, weight, charge) == partition_count(level)


def test_singular_vector_goldens():
    # level 2 at the (1,2) weight of the kappa=3 family, basis [(1,1), (2)]
    sv = singular_vectors(2, Fraction(1, 2), Fraction(1, 2))
    assert sv == [[Fraction(1), Fraction(-4, 3)]]
    # off-degenerate weight at the same charge: no null states
    assert singular_vectors(2, Fraction(1, 3), Fraction(1, 2)) == []
    # level 1 at weight 0: the lowering of the vacuum is null
    assert singular_vectors(1, 0, Fraction(1, 2)) == [[Fraction(1)]]


def test_singular_vector_is_annihilated():
    """The level-2 kernel vector is killed by every positive mode."""
    null = basis_vector((1, 1)) + basis_vector((2,)).scale(Fraction(-4, 3))
    spec = {LAMBDA: Fraction(1, 2), CC: Fraction(1, 2)}
    for n in (1, 2):
        image = apply_mode(n, null).substitute(spec)
        assert image.is_zero, n


def test_cocycle_matches_closed_form():
    for n in range(-8, 9):
        for m in range(-8, 9):
            expect = Fraction(n**3 - n) if n + m == 0 else Fraction(0)
            assert cocycle(n, m) == expect, (n, m)


def test_gram_report_json():
    doc = json.loads(gram_report(2, Fraction(3)))
    assert doc["level"] == 2
    assert doc["basis"] == [[1, 1], [2]]
    assert doc["kappa"] == "3"
    assert len(doc["entries"]) == 2
    # symbolic variant carries the charge generator
    doc_sym = json.loads(gram_report(2))
    assert "c" in doc_sym["determinant"]
