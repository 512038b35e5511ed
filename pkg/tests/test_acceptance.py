"""Acceptance criteria 1-7, exact to the stated orders.

Each criterion may span several test functions named test_criterion_<k>_*;
the terminal summary prints one PASS/FAIL line per criterion.
"""

import json
import random
import time
from fractions import Fraction as F

import pytest

from qchar import QExp, equality_to_order
from qchar.builders import E2, eta_power, euler_pentagonal, euler_product
from qchar.characters import (
    F_series,
    affine_sl3_level1_chars,
    ch_U_n2_swapped,
    ch_Vs_explicit_n3,
    paired_sum_check,
    decomposition_char,
    full_lattice_vanishing_check,
    paired_shift_check,
    osp_rhs,
    g_shift_check,
    psl3_branching_sum,
    psl_characters,
    qhyp_sl3_check,
    qhyp_sl3_lhs,
    sch_U0_closed,
    n3_double_sum,
    u_oracle,
    weyl_oracle,
)
from qchar.harness.cli import main
from qchar.harness.evaluator import evaluate_case
from qchar.harness.grammar import parse_case_line
from qchar.harness.registry import REGISTRY
from qchar.jacobi import UnitPrefactor, ct_character, theta_star_data, tracked_equality
from qchar.mlde import (
    CoefficientBasis,
    LODE,
    eta2_mlde,
    find_lode,
    indicial_roots,
    mmlde_psl,
    quintic_sl3,
    verify_lode,
)


def assert_equal(lhs, rhs, order):
    v = equality_to_order(lhs, rhs, order)
    assert v.ok, v


# 1

def _random_qexp(rng):
    step = rng.choice([1, 2, 3, 4, 6, 8, 24])
    shift = F(rng.randint(-6, 6), rng.choice([1, 2, 3, 8, 24]))
    coeffs = [F(rng.randint(-40, 40), rng.randint(1, 7)) for _ in range(rng.randint(0, 12))]
    prec = None if rng.random() < 0.3 else shift + F(rng.randint(0, 20), step)
    return QExp.from_coefficients(coeffs, shift, step, prec)


def test_criterion_1_pentagonal_eta():
    t0 = time.perf_counter()
    assert_equal(euler_pentagonal(200).qshift(F(1, 24)), euler_product(200).qshift(F(1, 24)), 200 + F(1, 24))
    assert time.perf_counter() - t0 < 10


def test_criterion_1_ring_laws():
    rng = random.Random(20240501)
    t0 = time.perf_counter()
    for _ in range(1000):
        x, y, z = (_random_qexp(rng) for _ in range(3))
        for lhs, rhs in (
            ((x + y) + z, x + (y + z)),
            (x + y, y + x),
            ((x * y) * z, x * (y * z)),
            (x * y, y * x),
            (x * (y + z), x * y + x * z),
        ):
            ps = [p for p in (lhs.prec, rhs.prec) if p is not None]
            v = equality_to_order(lhs, rhs, min(ps) if ps else 40)
            assert v.ok or v.kind == "insufficient", v
    assert time.perf_counter() - t0 < 10


# 2

def test_criterion_2_full_lattice_vanishing():
    assert full_lattice_vanishing_check(40).ok


def test_criterion_2_g_shift():
    assert g_shift_check(30).ok


@pytest.mark.parametrize("m", range(6))
def test_criterion_2_paired_sums(m):
    assert paired_sum_check(30).ok
    assert paired_shift_check(m, 30).ok


def test_criterion_2_double_sums():
    assert_equal(n3_double_sum("ch-u0", 20), u_oracle(3, 0, 20), 20)
    assert_equal(n3_double_sum("ch-u1", 20), u_oracle(3, 1, 20), 20)
    assert_equal(n3_double_sum("sch-u0", 20), u_oracle(3, 0, 20, "sch"), 20)


def test_criterion_2_F3_lowest_coefficient():
    f = F_series(3, 5)
    assert f.coefficient(f.valuation) == 10


# 3

_T3 = {"elapsed": 0.0}


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    _T3["elapsed"] += time.perf_counter() - t0
    return out


def test_criterion_3_sch_u_closed_form():
    lhs = _timed(lambda: ct_character(3, 0, "sch", 50))
    assert_equal(lhs, sch_U0_closed(50), 50)


def test_criterion_3_n2_closed_form():
    # (1/3) eta(4tau)^2/(eta^3 eta(2tau)) (4 E2(2tau) - E2(4tau))
    lhs = _timed(lambda: ct_character(2, 0, "ch", 50))
    assert_equal(lhs, ch_U_n2_swapped(50), 50)


def test_criterion_3_theta_star_value():
    data = _timed(lambda: theta_star_data(60))
    # theta*(0) = -2 pi eta^3: prefactor i^2 (2 pi)
    assert tracked_equality(data["value"], (UnitPrefactor(2, 1), eta_power(3, 60)), 60).ok


def test_criterion_3_theta_star_second():
    data = _timed(lambda: theta_star_data(60))
    # theta*''(0) = (1/12) (2 pi i)^2 E2 eta^3
    rhs = (UnitPrefactor(2, 2), (E2(60) * eta_power(3, 60)).scale(F(1, 12)))
    assert tracked_equality(data["second"], rhs, 60).ok


def test_criterion_3_runtime():
    assert _T3["elapsed"] < 60


# 4

@pytest.mark.parametrize("k", [0, 1, 2])
def test_criterion_4_quintic(k):
    assert verify_lode(quintic_sl3(), ct_character(3, k, "sch", 80), 80).ok


def test_criterion_4_find_quintic():
    L = find_lode(ct_character(3, 0, "sch", 80), 5, CoefficientBasis.of("E4,E6"))
    assert isinstance(L, LODE)
    got = {j: dict((name, c) for c, name in L.coefficients[j].terms) for j in range(5)}
    assert got == {4: {}, 3: {"E4": F(-7, 36)}, 2: {"E6": F(19, 216)},
                   1: {"E4^2": F(-5, 324)}, 0: {"E4*E6": F(5, 1944)}}


def test_criterion_4_eta2_mlde():
    assert verify_lode(eta2_mlde(), eta_power(2, 80), 80).ok


@pytest.mark.parametrize("n", [1, 2, 3])
def test_criterion_4_mmlde(n):
    assert verify_lode(mmlde_psl(n), psl_characters(n, 60), 60).ok
    assert F(1, 12) in indicial_roots(mmlde_psl(n))


# 5

@pytest.mark.parametrize("s", range(5))
def test_criterion_5_explicit_n3(s):
    assert_equal(weyl_oracle(3, s, 25), ch_Vs_explicit_n3(s, 25), 25)


@pytest.mark.parametrize("s", range(-2, 3))
def test_criterion_5_decomposition(s):
    assert_equal(decomposition_char(3, s, 12), weyl_oracle(3, s, 12), 12)


def test_criterion_5_qhyp():
    assert qhyp_sl3_check(25).ok
    lhs = qhyp_sl3_lhs(3)
    assert lhs.coefficient(lhs.valuation + 1) == 6


# 6

def test_criterion_6_branching():
    assert_equal(psl3_branching_sum(25), eta_power(2, 25), 25)


def test_criterion_6_affine():
    for i in (0, 1, 2):
        eta_form, lattice = affine_sl3_level1_chars(i, 20)
        assert_equal(eta_form, lattice, 20)
    l0, _ = affine_sl3_level1_chars(0, 3)
    assert l0.coefficients(2) == [1, 8]


def test_criterion_6_osp():
    r = osp_rhs(5)
    assert r.valuation == F(7, 12)
    assert r.coefficients(2) == [1, 28]


# 7

def _strip(text):
    out = []
    for line in text.splitlines():
        rec = json.loads(line)
        rec.pop("timing")
        out.append(rec)
    return out


def test_criterion_7_corpus_cold_and_warm(tmp_path, capsys):
    argv = ["verify", "corpus/paper.idn", "--order-default", "30", "--cache", str(tmp_path),
            "--format", "report"]
    t0 = time.perf_counter()
    assert main(argv) == 0
    cold_t = time.perf_counter() - t0
    cold = capsys.readouterr().out
    t0 = time.perf_counter()
    assert main(argv) == 0
    warm_t = time.perf_counter() - t0
    warm = capsys.readouterr().out
    assert cold_t < 600 and warm_t < 60
    assert _strip(cold) == _strip(warm)
    assert all(r["verdict"] == "equal" for r in _strip(cold))


def test_criterion_7_mutation():
    case = parse_case_line(
        "check mutated : lode_serre(5; 1, 0, -7/36*E4, 19/216*E6, -5/324*E4^2, 5/1943*E4*E6) "
        "annihilates ct_char(3, 0, \"sch\") @ 40", 1, REGISTRY.keys())
    r = evaluate_case(case)
    assert r.verdict == "first_difference"
    assert set(r.witness) == {"exponent", "lhs", "rhs"}
