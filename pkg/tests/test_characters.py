from fractions import Fraction as F

import pytest

from qchar import QExp, equality_to_order
from qchar.builders import eta_power
from qchar.characters import (
    BivariateSeries,
    CharacterLabel,
    DeltaForm,
    F_series,
    WindowOverflow,
    affine_sl3_level1_chars,
    andrews_check,
    calibrated_delta,
    ch_Vs_explicit_n3,
    paired_sum_check,
    decomposition_char,
    full_lattice_vanishing_check,
    gl_supercharacter_ratio,
    paired_shift_check,
    osp_rhs,
    g_shift_check,
    psl3_branching_sum,
    psl_characters,
    psl_eta_quotient_n1,
    psl_supercharacter_check,
    qhyp_sl3_check,
    qhyp_sl3_lhs,
    signed_v_sum,
    sch_U12_closed,
    singlet_char,
    n3_double_sum,
    u_lowest,
    u_oracle,
    v_lowest_dimension,
    vacuum_char,
    weyl_dimension,
    weyl_oracle,
)
from qchar.jacobi import ct_character, hw_weight


def test_weyl_dimensions():
    assert weyl_dimension(3, [1, 1]) == 8
    assert weyl_dimension(4, [0, 1, 0]) == 6
    assert [v_lowest_dimension(3, s) for s in (-2, -1, 0, 1, 2, 3)] == [6, 3, 1, 3, 6, 10]


@pytest.mark.parametrize("n,s", [(2, 0), (2, 3), (3, 2), (3, -2), (4, 1), (5, -3)])
def test_oracle_lowest_term_is_weyl_dimension(n, s):
    v = weyl_oracle(n, s, hw_weight(n, s) + 2)
    assert v.valuation == hw_weight(n, s) + F(n + 1, 24)
    assert v.coefficient(v.valuation) == v_lowest_dimension(n, s)


def test_oracle_charge_conjugation_symmetry():
    for s in (1, 2, 3):
        assert equality_to_order(weyl_oracle(3, s, 12), weyl_oracle(3, -s, 12), 12).ok


def test_u_lowest_counts_both_neighbours():
    h, mult = u_lowest(3, 1)
    assert h == hw_weight(3, 1) and mult == 3
    h, mult = u_lowest(2, 1)
    assert mult == v_lowest_dimension(2, 1) + v_lowest_dimension(2, -1)


def test_bivariate_geometric_then_binomial_is_identity():
    b = BivariateSeries(12, step=2)
    b.geometric(1, 1, 2).geometric(-2, 3, 1)
    b.binomial(1, 1, 2, sign=-1).binomial(-2, 3, 1, sign=-1)
    for c in range(-b.window, b.window + 1):
        assert b.row(c) == ([1] + [0] * 11 if c == 0 else [0] * 12)


def test_bivariate_rejects_uncharged_weightless_factor():
    with pytest.raises(WindowOverflow):
        BivariateSeries(5).geometric(1, 0)


# lattice sums for n = 3

def test_full_lattice_sum_vanishes():
    assert full_lattice_vanishing_check(40).ok


def test_G_is_shifted_F3():
    assert g_shift_check(30).ok


def test_F3_lowest_coefficient():
    f = F_series(3, 10)
    assert f.coefficient(f.valuation) == 10


def test_paired_sum():
    assert paired_sum_check(30).ok


@pytest.mark.parametrize("m", range(6))
def test_paired_shift(m):
    assert paired_shift_check(m, 30).ok


def test_paired_shift_without_unit_offset():
    # without the +1 in the third factor the identity fails from m = 0 on
    assert paired_shift_check(0, 30, uncorrected=True).kind == "first_difference"


@pytest.mark.parametrize("s", range(5))
def test_explicit_n3_characters(s):
    assert equality_to_order(ch_Vs_explicit_n3(s, 25), weyl_oracle(3, s, 25), 25).ok


def test_double_sums():
    assert equality_to_order(n3_double_sum("ch-u0", 20), u_oracle(3, 0, 20), 20).ok
    assert equality_to_order(n3_double_sum("ch-u1", 20), u_oracle(3, 1, 20), 20).ok
    assert equality_to_order(n3_double_sum("ch-u1", 20), u_oracle(3, 2, 20), 20).ok
    assert equality_to_order(n3_double_sum("sch-u0", 20), u_oracle(3, 0, 20, "sch"), 20).ok


def test_supercharacter_double_sum_for_u1():
    s1 = ct_character(3, 1, "sch", 20)
    assert equality_to_order(n3_double_sum("sch-u1", 20), s1, 20).ok
    # keeping the ch-u0 linear factors gives a series starting at q^(-1/6)
    shown = n3_double_sum("sch-u1-unshifted", 20)
    assert shown.valuation == F(-1, 6) and shown.coefficient(F(-1, 6)) == F(1, 2)


def test_signed_lists():
    assert equality_to_order(signed_v_sum(1, 15), ct_character(3, 1, "sch", 15), 15).ok
    v = equality_to_order(signed_v_sum(2, 15), ct_character(3, 2, "sch", 15), 15)
    assert v.kind == "first_difference" and v.exponent == F(5, 6)


def test_sch_u12_closed_form():
    assert equality_to_order(sch_U12_closed(30), ct_character(3, 1, "sch", 30), 30).ok


# singlet, Andrews, decomposition

@pytest.mark.parametrize("k", [-2, -1, 0, 1, 2, 3])
def test_singlet_forms_agree(k):
    a, b = singlet_char(k, 30)
    assert equality_to_order(a, b, 30).ok


@pytest.mark.parametrize("m", range(-3, 5))
def test_andrews_expansion(m):
    assert andrews_check(m, 30).ok


def test_andrews_literal_lower_limit():
    v = andrews_check(1, 20, second_from=0)
    assert v.kind == "first_difference" and v.exponent == -1


def test_delta_calibration():
    assert calibrated_delta(3) == DeltaForm(F(0), F(1, 6))
    assert calibrated_delta(4) == DeltaForm(F(0), F(1, 8))


@pytest.mark.parametrize("n,s", [(3, -3), (3, -2), (3, -1), (3, 0), (3, 1), (3, 2), (3, 3), (4, 0), (4, 2), (4, -1)])
def test_decomposition(n, s):
    assert equality_to_order(decomposition_char(n, s, 12), weyl_oracle(n, s, 12), 12).ok


def test_qhyp_sl3():
    assert qhyp_sl3_check(25).ok
    lhs = qhyp_sl3_lhs(3)
    assert lhs.coefficient(lhs.valuation + 1) == 6


# vacuum, affine, psl, osp

def test_vacuum_character():
    v = vacuum_char(3, 3)
    assert v.valuation == F(1, 4)
    assert v.coefficients(3) == [1, 0, 9]
    assert vacuum_char(2, 3).coefficient(F(1, 6) + 2) == 4


@pytest.mark.parametrize("i", [0, 1, 2])
def test_affine_level_one(i):
    eta_form, lattice = affine_sl3_level1_chars(i, 20)
    assert equality_to_order(eta_form, lattice, 20).ok


def test_affine_vacuum_graded_dims():
    l0, _ = affine_sl3_level1_chars(0, 3)
    assert l0.coefficients(2) == [1, 8]


def test_psl_n1_eta_quotient():
    assert equality_to_order(psl_characters(1, 30), psl_eta_quotient_n1(30), 30).ok


def test_psl_uncorrected_forms():
    assert psl_characters(2, 3, uncorrected=True).coefficient(F(1, 12)) == -1
    assert psl_characters(2, 3).coefficient(F(1, 12)) == 1
    assert psl_characters(3, 3, uncorrected=True).valuation == 0
    assert psl_characters(3, 3).valuation == F(1, 12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_psl_supercharacter_is_eta_squared(n):
    assert psl_supercharacter_check(n, 12).ok


def test_gl_ratio_is_trivial():
    b = gl_supercharacter_ratio(2, 8)
    assert b.row(0)[0] == 1 and not any(b.row(0)[1:])
    assert not any(b.row(1))


def test_psl3_branching():
    assert equality_to_order(psl3_branching_sum(25), eta_power(2, 25), 25).ok


def test_osp():
    r = osp_rhs(4)
    assert r.valuation == F(7, 12)
    assert r.coefficients(2) == [1, 28]


# labels

def test_labels_round_trip_and_evaluate():
    lab = CharacterLabel.parse("sch:U[n=3]")
    assert str(lab) == "sch:U[n=3]"
    assert equality_to_order(lab.evaluate(10), ct_character(3, 0, "sch", 10), 10).ok
    assert str(CharacterLabel.parse(" ch:V[ s = 2, n=3 ]")) == "ch:V[n=3,s=2]"


@pytest.mark.parametrize("text", ["ch:V[n=3]", "ch:Q[n=3]", "ch:Uk[n=3,k=3]", "ch:psl[n=4]", "V[n=3,s=1]", "ch:L[i=5]"])
def test_bad_labels(text):
    with pytest.raises(ValueError):
        CharacterLabel.parse(text)


def test_exact_zero_not_mistaken_for_truncated():
    assert QExp.zero().prec is None
