"""Rate layer: closed forms against hand-derived values and against the
quadrature path, plus the derived sequences s(n) and t(n)."""

import math

import numpy as np
import pytest
from scipy import special

from coalsim.measure import (CustomDensity, LambdaMeasure, bolthausen_sznitman,
                             kingman, parse_measure, power_beta)
from coalsim.rates import (EULER_GAMMA, RateFunctions, dust_diagnostic,
                           invert_mu, merger_rate, merger_size_distribution,
                           mu_derivatives, rate_of_decrease, rates_for,
                           rv_exponent_estimate, s_sequence, t_c_sequence,
                           t_sequence, total_jump_rate)

KINGMAN = kingman()
BS = bolthausen_sznitman()
PB_HALF = power_beta(1.0, 0.5)        # density p**-0.5, alpha = 1.5


def bs_pair_rate(b, k):
    # lam(b, k) for the uniform density: (k-2)! (b-k)! / (b-1)!
    return (math.factorial(k - 2) * math.factorial(b - k)
            / math.factorial(b - 1))


def pb_half_mu(x):
    # mu for density p**-0.5: -2x + 2/3 + Gamma(-3/2) Gamma(1+x)/Gamma(x-1/2)
    coef = 4.0 * math.sqrt(math.pi) / 3.0
    ratio = math.exp(math.lgamma(1.0 + x) - math.lgamma(x - 0.5))
    return -2.0 * x + 2.0 / 3.0 + coef * ratio


# ---------------------------------------------------------------------------
# merger rates

def test_kingman_rates():
    r = rates_for(kingman(2.0))
    assert r.merger_rate(7, 2) == 2.0
    assert r.merger_rate(7, 3) == 0.0
    np.testing.assert_allclose(r.total_jump_rate(np.array([2, 5, 10])),
                               [2.0, 20.0, 90.0], rtol=1e-14)
    # every jump removes exactly one block
    assert r.mean_decrement(17) == pytest.approx(1.0, rel=1e-12)


def test_bs_pair_rates_closed_form():
    r = rates_for(BS)
    for b, k in [(2, 2), (4, 2), (4, 3), (4, 4), (12, 5), (30, 30)]:
        assert r.merger_rate(b, k) == pytest.approx(bs_pair_rate(b, k),
                                                    rel=1e-12)
    for b in [2, 3, 9, 40]:
        assert r.total_jump_rate(b) == pytest.approx(b - 1.0, rel=1e-12)


def test_dirac_rates():
    r = rates_for(parse_measure("dirac:p=0.5,m=2"))
    assert r.merger_rate(2, 2) == pytest.approx(2.0, rel=1e-14)
    assert r.merger_rate(4, 3) == pytest.approx(2.0 * 0.5 * 0.5, rel=1e-14)
    # b = 2: single possible merger, total rate equals the pair rate
    assert r.total_jump_rate(2) == pytest.approx(2.0, rel=1e-13)
    # mu at an atom: m (xp - 1 + (1-p)**x) / p**2
    assert r.rate_of_decrease(3.0) == pytest.approx(
        8.0 * (1.5 - 1.0 + 0.125), rel=1e-13)


def test_merger_rate_validation():
    r = rates_for(KINGMAN)
    with pytest.raises(ValueError):
        r.merger_rate(5.0, 2)
    with pytest.raises(ValueError):
        r.merger_rate(5, 1)
    with pytest.raises(ValueError):
        r.merger_rate(5, 6)
    with pytest.raises(ValueError):
        r.total_jump_rate(1)
    with pytest.raises(ValueError):
        r.total_jump_rate(2.5)
    with pytest.raises(ValueError):
        RateFunctions(LambdaMeasure())


@pytest.mark.parametrize("text", [
    "kingman:0.5 + dirac:p=0.3,m=1.5",
    "bolthausen-sznitman",
    "powerbeta:c=2.0,a=0.5,b=1.7",
])
def test_pair_rate_pascal_recursion(text):
    # lam(b, k) = lam(b+1, k) + lam(b+1, k+1) holds for every measure
    r = rates_for(parse_measure(text))
    for b in range(2, 13):
        for k in range(2, b + 1):
            assert r.merger_rate(b, k) == pytest.approx(
                r.merger_rate(b + 1, k) + r.merger_rate(b + 1, k + 1),
                rel=1e-11)


def test_closed_forms_match_quadrature():
    measure = power_beta(1.3, 0.5, 2.5)
    closed = RateFunctions(measure)
    quad = RateFunctions(measure, use_closed_forms=False)
    for b, k in [(2, 2), (6, 3), (15, 11)]:
        assert closed.merger_rate(b, k) == pytest.approx(
            quad.merger_rate(b, k), rel=1e-9)
    for b in [2, 7, 25]:
        assert closed.total_jump_rate(b) == pytest.approx(
            quad.total_jump_rate(b), rel=1e-9)
    for x in [1.0, 3.7, 40.0]:
        assert closed.rate_of_decrease(x) == pytest.approx(
            quad.rate_of_decrease(x), rel=1e-9, abs=1e-12)


def test_powerbeta_gamma_pole_cases():
    # a in {1, 2} with b != 1 dodges the continued-Beta pole via per-k sums
    for params in ["powerbeta:c=1.0,a=1.0,b=2.0", "powerbeta:c=0.7,a=2.0,b=0.5"]:
        measure = parse_measure(params)
        closed = RateFunctions(measure)
        quad = RateFunctions(measure, use_closed_forms=False)
        for b in [2, 5, 20]:
            assert closed.total_jump_rate(b) == pytest.approx(
                quad.total_jump_rate(b), rel=1e-9)
        for x in [2.0, 9.5]:
            assert closed.rate_of_decrease(x) == pytest.approx(
                quad.rate_of_decrease(x), rel=1e-8)


def test_weights_sum_to_total_rate():
    r = rates_for(parse_measure("kingman:0.25 + bolthausen-sznitman"
                                " + dirac:p=0.4,m=0.3"))
    for b in [2, 3, 8, 30]:
        assert r.merger_size_weights(b).sum() == pytest.approx(
            r.total_jump_rate(b), rel=1e-11)
        dist = r.merger_size_distribution(b)
        assert dist.shape == (b - 1,)
        assert dist.sum() == pytest.approx(1.0, rel=1e-12)
        assert np.all(dist >= 0)


def test_mean_decrement_bs():
    # mu(b)/lam(b) = b (H_b - 1) / (b - 1)
    r = rates_for(BS)
    assert r.mean_decrement(3) == pytest.approx(2.5 / 2.0, rel=1e-12)
    mean_from_dist = np.arange(2, 10) @ r.merger_size_distribution(9) - 1.0
    assert r.mean_decrement(9) == pytest.approx(mean_from_dist + 0.0, rel=1e-12)


# ---------------------------------------------------------------------------
# mu

def test_kingman_mu_and_derivatives():
    r = rates_for(kingman(3.0))
    x = 7.25
    mu, d1, d2 = r.mu_derivatives(x)
    assert mu == pytest.approx(3.0 * x * (x - 1.0) / 2.0, rel=1e-14)
    assert d1 == pytest.approx(3.0 * (x - 0.5), rel=1e-14)
    assert d2 == pytest.approx(3.0, rel=1e-14)


def test_bs_mu_frozen_values():
    r = rates_for(BS)
    assert r.rate_of_decrease(1.0) == pytest.approx(0.0, abs=1e-13)
    assert r.rate_of_decrease(2.0) == pytest.approx(1.0, rel=1e-12)
    assert r.rate_of_decrease(3.0) == pytest.approx(2.5, rel=1e-12)
    assert r.rate_of_decrease(4.0) == pytest.approx(13.0 / 3.0, rel=1e-12)
    x = 17.5
    assert r.rate_of_decrease(x) == pytest.approx(
        x * (special.digamma(x + 1.0) + EULER_GAMMA - 1.0), rel=1e-13)


def test_pb_half_mu_frozen_values():
    r = rates_for(PB_HALF)
    for x in [1.0, 2.0, 3.5, 10.0, 250.0]:
        assert r.rate_of_decrease(x) == pytest.approx(pb_half_mu(x),
                                                      rel=1e-11, abs=1e-11)


@pytest.mark.parametrize("measure", [KINGMAN, BS, PB_HALF])
def test_mu_zero_at_one_increasing_convex(measure):
    r = rates_for(measure)
    assert abs(r.rate_of_decrease(1.0)) < 1e-12
    grid = np.linspace(1.0, 50.0, 40)
    mu = r.rate_of_decrease(grid)
    assert np.all(np.diff(mu) > 0)
    assert np.all(np.diff(mu, 2) > -1e-9)


@pytest.mark.parametrize("measure", [BS, PB_HALF])
def test_mu_derivatives_match_finite_differences(measure):
    r = rates_for(measure)
    for x in [2.0, 11.0, 300.0]:
        mu, d1, d2 = r.mu_derivatives(x)
        f = r.rate_of_decrease
        h = 1e-5 * x
        assert d1 == pytest.approx((f(x + h) - f(x - h)) / (2.0 * h), rel=1e-6)
        # wider step: the second difference amplifies roundoff by 1/h**2
        h = 1e-3 * x
        assert d2 == pytest.approx(
            (f(x + h) - 2.0 * mu + f(x - h)) / h ** 2, rel=1e-3)


def test_invert_mu_round_trip():
    for measure in [KINGMAN, BS, PB_HALF]:
        r = rates_for(measure)
        for x in [1.0, 1.5, 7.3, 150.0]:
            assert r.invert_mu(r.rate_of_decrease(x)) == pytest.approx(
                x, rel=1e-9)
        with pytest.raises(ValueError):
            r.invert_mu(-1.0)
    assert invert_mu(KINGMAN, 0.0) == 1.0


def test_kappa_is_mu_over_x():
    r = rates_for(BS)
    assert r.kappa(8.0) == pytest.approx(r.rate_of_decrease(8.0) / 8.0,
                                         rel=1e-14)


def test_mu_interpolator_tracks_exact():
    r = rates_for(PB_HALF)
    approx = r.mu_interpolator()
    x = np.array([3.3, 47.0, 1.2e4])
    np.testing.assert_allclose(approx(x), r.rate_of_decrease(x), rtol=1e-5)


# ---------------------------------------------------------------------------
# scale sequences

def test_s_at_kingman_frozen():
    # s solves s(s-1)/2 = (n-1)/2: for n = 101, s = (1 + sqrt(401))/2
    assert s_sequence(KINGMAN, 101.0) == pytest.approx(
        (1.0 + math.sqrt(401.0)) / 2.0, rel=1e-10)


def test_s_growth_exponents():
    # s(n) ~ n**((alpha-1)/alpha): exponent 1/2 for kingman, 1/3 for alpha 3/2
    ns = np.geomspace(1e3, 1e6, 7)
    for measure, expo in [(KINGMAN, 0.5), (PB_HALF, 1.0 / 3.0)]:
        s = rates_for(measure).s_at(ns)
        assert np.all(np.diff(s) > 0)
        slope = np.polyfit(np.log(ns), np.log(s), 1)[0]
        assert slope == pytest.approx(expo, abs=0.02)
    with pytest.raises(ValueError):
        s_sequence(KINGMAN, 1.0)


def test_t_sequence_formula_and_clamps():
    n = math.exp(math.exp(2.0))       # loglog n = 2 exactly
    expected = 2.0 - math.log(2.0) + math.log(2.0) / 2.0
    assert t_sequence(n) == pytest.approx(expected, rel=1e-12)
    assert t_sequence(2.0) == 0.0     # iterated log not yet positive
    np.testing.assert_allclose(t_sequence(np.array([2.0, n])), [0.0, expected])
    with pytest.raises(ValueError):
        t_sequence(1.0)


def test_t_c_sequence():
    n = math.exp(math.exp(2.0))
    assert t_c_sequence(n, 1.0) == pytest.approx(t_sequence(n), rel=1e-12)
    assert t_c_sequence(n, 2.0) == pytest.approx(
        t_sequence(n) - math.log(2.0) / 2.0, rel=1e-12)
    assert t_c_sequence(n, 1e9) == 0.0
    with pytest.raises(ValueError):
        t_c_sequence(n, 0.0)


# ---------------------------------------------------------------------------
# H transform

def test_H_kingman_constant():
    r = rates_for(kingman(3.0))
    for u in [0.0, 0.2, 1.0]:
        assert r.H_function(u) == pytest.approx(1.5, rel=1e-14)
    assert r.h_function(0.5) == 0.0


def test_H_bs_closed_form():
    # uniform density: H(u) = -u log u + u**2/2, h(z) = -log z - 1 + z
    r = rates_for(BS)
    assert r.H_function(0.0) == 0.0
    assert r.H_function(1.0) == pytest.approx(0.5, rel=1e-10)
    for u in [0.01, 0.5, 0.9]:
        assert r.H_function(u) == pytest.approx(
            -u * math.log(u) + u * u / 2.0, rel=1e-10)
    assert r.H_function(0.5) == pytest.approx(0.4715735902799727, rel=1e-10)
    for z in [0.1, 0.5, 1.0]:
        assert r.h_function(z) == pytest.approx(-math.log(z) - 1.0 + z,
                                                rel=1e-9, abs=1e-12)
    with pytest.raises(ValueError):
        r.H_function(1.5)
    with pytest.raises(ValueError):
        r.h_function(-0.1)


def test_H_pb_half_closed_form():
    # density p**-0.5: H(u) = (8/3) sqrt(u) - 2u + u**2/3
    r = rates_for(PB_HALF)
    for u in [1e-4, 0.3, 1.0]:
        assert r.H_function(u) == pytest.approx(
            8.0 / 3.0 * math.sqrt(u) - 2.0 * u + u * u / 3.0, rel=1e-9)


def test_H_dirac():
    r = rates_for(parse_measure("dirac:p=0.5,m=2"))
    # below the atom: m (u/p - u**2/(2 p**2)); at/above: m/2
    assert r.H_function(0.25) == pytest.approx(2.0 * (0.5 - 0.125), rel=1e-13)
    assert r.H_function(0.75) == pytest.approx(1.0, rel=1e-13)


def test_mu_matches_tail_transform():
    # mu(x) / (Gamma(3-alpha) x**2 H(1/x)) -> 1 for regularly varying mu
    x = 1e6
    for measure, alpha in [(BS, 1.0), (PB_HALF, 1.5)]:
        r = rates_for(measure)
        ratio = r.rate_of_decrease(x) / (
            special.gamma(3.0 - alpha) * x * x * r.H_function(1.0 / x))
        assert 0.9 < ratio < 1.1


# ---------------------------------------------------------------------------
# diagnostics

def test_dust_diagnostic_rules():
    assert dust_diagnostic(KINGMAN).verdict == "dustless"
    assert dust_diagnostic(BS).verdict == "dustless"
    assert dust_diagnostic(PB_HALF).verdict == "dustless"
    assert dust_diagnostic(power_beta(1.0, 1.5)).verdict == "dusty"
    assert dust_diagnostic(parse_measure("dirac:p=0.5,m=1")).verdict == "dusty"
    declared = LambdaMeasure(densities=(
        CustomDensity(lambda p: p, left_exponent=2.0),))
    assert dust_diagnostic(declared).verdict == "dusty"


def test_dust_diagnostic_trend_fallback():
    # declared exponent <= 1 forces the empirical mu(n)/n trend rule
    undeclared = LambdaMeasure(densities=(
        CustomDensity(lambda p: 1.0 / np.sqrt(p), left_exponent=0.5),))
    diag = dust_diagnostic(undeclared)
    assert diag.verdict == "dustless"
    assert "mu(n)/n" in diag.rule


def test_rv_exponent_estimates():
    assert rv_exponent_estimate(KINGMAN) == pytest.approx(2.0, abs=1e-3)
    assert rv_exponent_estimate(PB_HALF) == pytest.approx(1.5, abs=0.01)
    # uniform measure: slowly varying log factor biases the slope upward
    assert 1.0 < rv_exponent_estimate(BS) < 1.15


# ---------------------------------------------------------------------------
# front door

def test_functional_wrappers_and_cache():
    assert rates_for(BS) is rates_for(BS)
    assert merger_rate(BS, 5, 3) == pytest.approx(bs_pair_rate(5, 3), rel=1e-12)
    assert total_jump_rate(BS, 5) == pytest.approx(4.0, rel=1e-12)
    assert merger_size_distribution(BS, 4).shape == (3,)
    assert rate_of_decrease(KINGMAN, 4.0) == pytest.approx(6.0, rel=1e-14)
    assert mu_derivatives(KINGMAN, 4.0)[1] == pytest.approx(3.5, rel=1e-14)
