from fractions import Fraction as F

import pytest

from qchar import QExp, equality_to_order
from qchar.builders import E2, E4, E6, eta_power
from qchar.characters import psl_characters
from qchar.jacobi import ct_character
from qchar.mlde import (
    CoefficientBasis,
    InsufficientOrder,
    LODE,
    Monomial,
    NotFound,
    Obstructed,
    OrderMismatch,
    eta2_mlde,
    find_lode,
    frobenius_solution,
    indicial_roots,
    lode_from_terms,
    mmlde_psl,
    monomials_of_weight,
    quintic_sl3,
    serre_derivative,
    solve_exact,
    theta_power,
    verify_lode,
)


def test_serre_derivative_examples():
    assert serre_derivative(QExp.constant(1), 0).is_zero
    eta2 = eta_power(2, 30)
    assert equality_to_order(eta2.theta(), (E2(30) * eta2).scale(F(1, 12)), 30).ok
    assert equality_to_order(serre_derivative(E4(30), 4), E6(30).scale(F(-1, 3)), 30).ok
    assert equality_to_order(serre_derivative(E6(30), 6), (E4(30) ** 2).scale(F(-1, 2)), 30).ok


def test_serre_needs_truncated_input():
    with pytest.raises(OrderMismatch):
        serre_derivative(QExp.constant(1), 4)


def test_theta_power_on_eta_squared():
    eta2 = eta_power(2, 30)
    assert equality_to_order(theta_power(eta2, 2), (E4(30) * eta2).scale(F(-1, 144)), 30).ok


def test_monomials():
    assert Monomial.parse("E4^2").weight == 8
    assert [str(m) for m in monomials_of_weight(["E4", "E6"], 12)] == ["E4^3", "E6^2"]
    assert [str(m) for m in monomials_of_weight(["E4", "E6"], 2)] == []


def test_lode_weight_check():
    with pytest.raises(ValueError):
        lode_from_terms(2, "serre", {0: {"E6": 1}})


def test_eta2_mlde_annihilates_eta_squared():
    assert verify_lode(eta2_mlde(), eta_power(2, 80), 80).ok


@pytest.mark.parametrize("k", [0, 1, 2])
def test_quintic_annihilates_supercharacters(k):
    assert verify_lode(quintic_sl3(), ct_character(3, k, "sch", 80), 80).ok


def test_quintic_rejects_wrong_coefficient():
    L = lode_from_terms(5, "serre", {3: {"E4": F(-7, 35)}, 2: {"E6": F(19, 216)},
                                      1: {"E4^2": F(-5, 324)}, 0: {"E4*E6": F(5, 1944)}})
    v = verify_lode(L, ct_character(3, 0, "sch", 20), 20)
    assert v.kind == "first_difference" and v.exponent == F(7, 6) and v.lhs == F(-5, 108)


def test_verify_refuses_short_input():
    with pytest.raises(OrderMismatch):
        verify_lode(eta2_mlde(), eta_power(2, 10), 20)


def test_find_quintic():
    L = find_lode(ct_character(3, 0, "sch", 80), 5, CoefficientBasis.of("E4,E6"))
    assert isinstance(L, LODE)
    assert L.text() == quintic_sl3().text()
    assert "7/36" in L.text() and "5/1944" in L.text()


def test_find_eta2_mlde():
    L = find_lode(eta_power(2, 40), 2, CoefficientBasis.of("E4,E6"))
    assert L.text() == "theta^2 + 1/144*E4"


def test_find_raw_mmlde_n1():
    L = find_lode(psl_characters(1, 60), 2, CoefficientBasis.of("E4,E42"), form="raw")
    assert L.text() == "D^2 - 1/6*E2*D - 1/720*E4 + 1/120*E42"


def test_find_lode_failures():
    basis = CoefficientBasis.of("E4,E6")
    with pytest.raises(InsufficientOrder):
        find_lode(eta_power(2, 5), 5, basis)
    # E4^3 and E6^2 give two weight-12 unknowns for the same equation at order 1
    r = find_lode(eta_power(2, 40), 6, basis)
    assert isinstance(r, NotFound) and r.kind == "ambiguous"
    assert r.describe().startswith("Ambiguous")
    r = find_lode(eta_power(2, 40) + eta_power(4, 40), 1, basis)
    assert isinstance(r, NotFound) and r.kind == "inconsistent"


def test_solve_exact():
    assert solve_exact([[F(2), F(1)], [F(1), F(3)]], [F(3), F(4)]) == ("unique", [1, 1])
    assert solve_exact([[F(1), F(1)], [F(2), F(2)]], [F(1), F(3)])[0] == "inconsistent"
    assert solve_exact([[F(1), F(1)], [F(2), F(2)]], [F(1), F(2)]) == ("ambiguous", 1)


def test_indicial_roots():
    assert indicial_roots(eta2_mlde()) == [F(1, 12), F(1, 12)]
    assert indicial_roots(quintic_sl3()) == [F(-1, 6), F(1, 6), F(1, 6), F(2, 3), F(5, 6)]
    for n in (1, 2, 3, 4):
        assert indicial_roots(mmlde_psl(n)) == [F(1, 12), F(1, 12)]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_mmlde_residuals(n):
    assert verify_lode(mmlde_psl(n), psl_characters(n, 60), 60).ok


def test_mmlde_rejects_uncorrected_n3_form():
    v = verify_lode(mmlde_psl(3), psl_characters(3, 60, uncorrected=True), 60)
    assert v.kind == "first_difference" and v.exponent == 0


@pytest.mark.parametrize("n", [2, 3])
def test_frobenius_matches_psl(n):
    y = frobenius_solution(mmlde_psl(n), F(1, 12), 30)
    assert equality_to_order(y, psl_characters(n, 30), 30).ok


def test_frobenius_from_eta2_mlde_is_eta_squared():
    assert equality_to_order(frobenius_solution(eta2_mlde(), F(1, 12), 30), eta_power(2, 30), 30).ok


def test_frobenius_obstruction():
    # theta^2 - 35/144 E4 has roots -5/12 and 7/12, one step apart
    L = lode_from_terms(2, "serre", {0: {"E4": F(-35, 144)}})
    assert indicial_roots(L) == [F(-5, 12), F(7, 12)]
    r = frobenius_solution(L, F(-5, 12), 10)
    assert r == Obstructed(1) and r.describe() == "Obstructed at level 1"
    y = frobenius_solution(L, F(7, 12), 10)
    assert verify_lode(L, y, 10).ok
    with pytest.raises(ValueError):
        frobenius_solution(L, F(1, 5), 10)
