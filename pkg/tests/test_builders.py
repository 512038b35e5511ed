from fractions import Fraction as F

import pytest

from qchar import NonConvergent, QExp, equality_to_order
from qchar.builders import (
    E2,
    E4,
    E6,
    E22,
    E42,
    WeightedLatticeSum1D,
    bernoulli,
    divisor_sigma_table,
    eta,
    eta_power,
    eta_product_form,
    euler_product,
    lattice_sum_1d,
    lattice_sum_2d,
    pochhammer,
    pochhammer_finite,
    qpoch_plus,
)


def test_bernoulli_values():
    assert [bernoulli(k) for k in range(7)] == [1, F(-1, 2), F(1, 6), 0, F(-1, 30), 0, F(1, 42)]
    assert bernoulli(12) == F(-691, 2730)


def test_eta_forms_agree_with_rescaling():
    for m in (1, 2, 3, F(1, 3)):
        assert equality_to_order(eta(30, m), eta_product_form(30, m), 30).ok
    assert eta(10).valuation == F(1, 24)
    assert eta(10, 3).valuation == F(1, 8)


def test_eta_powers():
    e8 = eta_power(-8, 20)
    assert e8.valuation == F(-1, 3)
    assert equality_to_order(e8 * eta_power(8, 21), QExp.constant(1), 20).ok
    # Jacobi: eta^3 = sum (-1)^n (2n+1) q^{(2n+1)^2/8}
    spec = WeightedLatticeSum1D((1, 2), F(1, 2), F(1, 2), 0, 0, -1, "nonneg")
    assert equality_to_order(eta_power(3, 40), lattice_sum_1d(spec, 40), 40).ok


def test_eisenstein_leading_terms():
    assert E2(4).coefficients(4) == [1, -24, -72, -96]
    assert E4(3).coefficients(3) == [1, 240, 2160]
    assert E6(3).coefficients(3) == [1, -504, -16632]
    assert divisor_sigma_table(3, 5) == [0, 1, 9, 28, 73]


def test_level_two_eisenstein_definitions():
    assert equality_to_order(E22(40), E2(40, 2).scale(2) - E2(40), 40).ok
    assert equality_to_order(E42(40), E4(40, 2).scale(2) - E4(40), 40).ok


def test_ramanujan_e4_squared():
    assert equality_to_order(E4(40) ** 2, E4(40) * E4(40), 40).ok
    # E4^3 - E6^2 = 1728 Delta = 1728 eta^24
    lhs = E4(30) ** 3 - E6(30) ** 2
    assert equality_to_order(lhs, eta_power(24, 30).scale(1728), 30).ok


def test_pochhammer():
    assert pochhammer_finite(2).coefficients(4) == [1, -1, -1, 1]
    assert equality_to_order(pochhammer(1, 30), euler_product(30), 30).ok
    with pytest.raises(NonConvergent):
        pochhammer(-1, 5)
    assert qpoch_plus(5, 2).coefficients(5) == [1, 2, 3, 6, 9]


def test_lattice_sum_2d_theta_product():
    both = lattice_sum_2d(lambda a, b: 1, (1, 0, 1, 0, 0, 0), 30)
    one = lattice_sum_1d(WeightedLatticeSum1D((1,), 1, 0, 0, 0), 30)
    assert equality_to_order(both, one * one, 30).ok


def test_lattice_sum_needs_definite_form():
    with pytest.raises(NonConvergent):
        lattice_sum_2d(lambda a, b: 1, (1, 2, 1, 0, 0, 0), 10)
    with pytest.raises(NonConvergent):
        WeightedLatticeSum1D((1,), -1, 0, 0, 0)
