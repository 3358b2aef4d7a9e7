from fractions import Fraction

import pytest

from ltlab import (
    CMOrder,
    cm_unit_group,
    delta_aq,
    empirical_main_factor,
    full_matrix_group,
    lambda_gamma,
    main_factor,
    make_curve,
    project,
    serre_image,
    serre_level,
)
from ltlab.constants import h_order, h_trace_count
from ltlab.errors import LevelTooLargeError, RamifiedPrimeError
from ltlab.galois import default_level, gl2_order, load_trace_counts, save_trace_counts

from oracles import brute_gl2_trace_counts


def test_full_group_small_levels():
    g2 = full_matrix_group(2)
    assert g2.order == 6
    assert g2.trace_counts == (4, 2)
    g5 = full_matrix_group(5)
    assert g5.order == 480
    assert g5.trace_counts[0] == 100 and g5.trace_counts[1] == 95
    g1 = full_matrix_group(1)
    assert g1.order == 1 and g1.trace_counts == (1,)


@pytest.mark.parametrize("n", [2, 3, 4, 6, 7, 9, 10, 12])
def test_full_group_matches_brute_enumeration(n):
    img = full_matrix_group(n)
    order, counts = brute_gl2_trace_counts(n)
    assert img.order == order == gl2_order(n)
    assert list(img.trace_counts) == counts


def test_gl2_closed_forms_all_ell_up_to_13():
    # matrix case of the prime-level cardinality formulas
    for ell in (2, 3, 5, 7, 11, 13):
        img = full_matrix_group(ell)
        assert img.order == h_order(ell, None)
        for r in range(ell):
            expect = h_trace_count(ell, r % ell == 0, None)
            assert img.trace_counts[r] == expect


@pytest.mark.parametrize("disc", [-4, -27])
def test_cm_unit_closed_forms_all_ell_up_to_13(disc):
    cm = CMOrder(disc)
    for ell in (2, 3, 5, 7, 11, 13):
        if cm.chi(ell) == 0:
            with pytest.raises(RamifiedPrimeError):
                cm_unit_group(cm, ell)
            continue
        img = cm_unit_group(cm, ell)
        assert img.order == h_order(ell, cm)
        for r in range(ell):
            assert img.trace_counts[r] == h_trace_count(ell, r % ell == 0, cm)


def test_cm_unit_examples():
    u5 = cm_unit_group(CMOrder(-4), 5)
    assert (u5.order, u5.trace_counts[0], u5.trace_counts[1]) == (16, 4, 3)
    u7 = cm_unit_group(CMOrder(-4), 7)
    assert (u7.order, u7.trace_counts[0], u7.trace_counts[1]) == (48, 6, 7)
    with pytest.raises(RamifiedPrimeError):
        cm_unit_group(CMOrder(-4), 2)


def test_serre_level():
    assert serre_level(-3) == 6
    assert serre_level(5) == 10
    assert serre_level(-2) == 8
    assert serre_level(-1) == 4
    with pytest.raises(ValueError):
        serre_level(12)  # not squarefree
    with pytest.raises(ValueError):
        serre_level(0)


def test_serre_image_anchors():
    img = serre_image(-3)
    assert img.level == 6
    assert img.order == 144 == gl2_order(6) // 2
    assert sum(img.trace_counts) == 144
    values = sorted({main_factor(img, r) for r in range(6)})
    assert values == [Fraction(1, 2), Fraction(3, 4), Fraction(9, 8), Fraction(7, 4)]


def test_delta_examples():
    g2 = full_matrix_group(2)
    assert delta_aq(g2, 0, 2) == Fraction(2, 3)
    img = serre_image(-3)
    assert delta_aq(img, 0, 1) == 1
    assert sum(delta_aq(img, a, 6) for a in range(6)) == 1
    with pytest.raises(ValueError):
        delta_aq(img, 0, 4)


def test_projection_consistency():
    img = serre_image(-3)
    for q in (1, 2, 3, 6):
        proj = project(img, q)
        for a in range(q):
            lhs = sum(
                Fraction(img.trace_counts[b], img.order)
                for b in range(6)
                if b % q == a
            )
            assert lhs == Fraction(proj.trace_counts[a], proj.order)
    # the two prime-level projections are the full groups
    assert project(img, 2).order == 6
    assert project(img, 3).order == 48


def test_main_factor_properties():
    triv = full_matrix_group(1)
    assert main_factor(triv, 0) == 1
    for image in (full_matrix_group(5), serre_image(-3)):
        avg = sum(main_factor(image, r) for r in range(image.level)) / image.level
        assert avg == 1


def test_lambda_gamma(serre_curve, cm_curve):
    assert lambda_gamma(cm_curve, 0, 5) == (2, 1)
    assert lambda_gamma(cm_curve, 3, 5) == (2, 0)
    assert lambda_gamma(serre_curve, 0, 5) == (1, 0)
    assert lambda_gamma(serre_curve, 7, 3) == (1, 0)


def test_budget():
    with pytest.raises(LevelTooLargeError):
        full_matrix_group(1000)
    with pytest.raises(LevelTooLargeError):
        full_matrix_group(97, budget=10**6)


def test_default_level(serre_curve, cm_curve):
    assert default_level(serre_curve) == 6
    assert default_level(cm_curve) == 12
    assert default_level(make_curve("x", 1, 1, level=30)) == 30
    with pytest.raises(ValueError):
        default_level(make_curve("x", 1, 1))


def test_empirical_main_factor_level_one(serre_table_small):
    mf, err = empirical_main_factor(serre_table_small, 1, 0)
    assert mf == 1 and err == 0


def test_empirical_main_factor_serre(serre_table_small):
    img = serre_image(-3)
    for r in range(6):
        mf, err = empirical_main_factor(serre_table_small, 6, r)
        assert abs(float(mf) - float(main_factor(img, r))) < 5 * err


def test_empirical_main_factor_cm(cm_table_small):
    # supersingular half sits in the r = 0 class; the correction removes it
    mf0, err0 = empirical_main_factor(cm_table_small, 12, 0)
    assert float(mf0) <= 12 * 2 * 0.02
    total = sum(empirical_main_factor(cm_table_small, 12, r)[0] for r in range(12))
    assert abs(float(total) / 12 - 1) < 0.05


def test_trace_counts_csv_round_trip(tmp_path):
    img = serre_image(-3)
    path = str(tmp_path / "counts.csv")
    save_trace_counts(img, path)
    loaded = load_trace_counts(path)
    assert loaded.level == img.level
    assert loaded.trace_counts == img.trace_counts
    assert loaded.order == img.order


def test_trace_counts_csv_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("0,3\n2,4\norder,7\n")  # missing residue 1
    with pytest.raises(ValueError):
        load_trace_counts(str(p))
    p.write_text("0,3\n1,4\n")  # no order line
    with pytest.raises(ValueError):
        load_trace_counts(str(p))
    p.write_text("0,3\n1,5\norder,7\n")  # counts do not sum to order
    with pytest.raises(ValueError):
        load_trace_counts(str(p))
