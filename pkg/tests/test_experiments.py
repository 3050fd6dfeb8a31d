"""Experiment layer: the KS machinery, config and report plumbing, regime
guards, and small-scale runs of every runner."""

import json
import math

import numpy as np
import pytest

from coalsim.experiments import (CATALOG, ExperimentConfig, ExperimentReport,
                                 RegimeError, Statistic, _decimated_ecdf,
                                 integral_inverse_mu, known_rv_exponent,
                                 ks_statistic, parse_r_rule, run_bs_extremes,
                                 run_experiment, run_factorial_replay,
                                 run_independence, run_lln,
                                 run_order_statistics, run_tail_identity,
                                 run_typical_length, two_sample_ks)
from coalsim.measure import (CustomDensity, LambdaMeasure,
                             bolthausen_sznitman, kingman, parse_measure,
                             power_beta)
from coalsim.rates import rates_for


# ---------------------------------------------------------------------------
# KS machinery

def test_ks_single_sample_at_median():
    assert ks_statistic([0.0], lambda x: np.full_like(x, 0.5)) == 0.5


def test_ks_constant_sample_at_upper_endpoint():
    # four copies of the top point: sup_i |i/4 - 1| = 3/4
    samples = np.ones(4)
    assert ks_statistic(samples, lambda x: np.ones_like(x)) == 0.75


def test_ks_inverse_transform_bound():
    rng = np.random.Generator(np.random.Philox(key=np.uint64(123456789)))
    u = rng.random(100_000)
    assert ks_statistic(u, lambda x: x) <= 0.0062


def test_ks_empty_rejected():
    with pytest.raises(ValueError):
        ks_statistic([], lambda x: x)


def test_two_sample_ks():
    assert two_sample_ks([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert two_sample_ks([1.0], [2.0]) == 1.0
    assert two_sample_ks([1.0, 3.0], [2.0, 4.0]) == 0.5


# ---------------------------------------------------------------------------
# config / report plumbing

def test_config_validation():
    good = dict(measure="kingman", theorem="T1.1", n=100, replications=100)
    ExperimentConfig(**good)
    with pytest.raises(ValueError):
        ExperimentConfig(**{**good, "theorem": "T9.9"})
    with pytest.raises(ValueError):
        ExperimentConfig(**{**good, "n": 1})
    with pytest.raises(ValueError):
        ExperimentConfig(**{**good, "replications": 99})
    with pytest.raises(ValueError):
        ExperimentConfig(**good, threads=0)
    with pytest.raises(ValueError):
        ExperimentConfig(**good, tolerances={"ks": 0.0})


def test_config_round_trip():
    cfg = ExperimentConfig("kingman", "T1.1", 100, 200, seed=5,
                           params={"k": 2}, tolerances={"ks": 0.1}, threads=2)
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    assert cfg.tolerance("ks", 0.05) == 0.1
    assert cfg.tolerance("other", 0.05) == 0.05
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({**cfg.to_dict(), "bogus": 1})


def test_statistic_dict_uses_pass_key():
    d = Statistic("x", 1.0, se=0.1, target=1.0, tol=0.5, passed=True).to_dict()
    assert set(d) == {"name", "value", "se", "target", "tol", "pass"}


def test_report_json_stability_and_verdict():
    stats = [Statistic("a", 1.0, passed=True), Statistic("b", 2.0)]
    cfg = {"measure": "kingman", "theorem": "T1.1", "n": 10, "threads": 4}
    rep = ExperimentReport(config=cfg, statistics=stats, seed=1,
                           runtime_ms=12.5)
    assert rep.verdict == "PASS"
    doc = json.loads(rep.to_json())
    assert "threads" not in doc["config"]
    assert "runtime_ms" not in doc
    assert "runtime_ms" in json.loads(rep.to_json(include_runtime=True))
    failing = ExperimentReport(config=cfg, statistics=[
        Statistic("a", 1.0, passed=False)], seed=1)
    assert failing.verdict == "FAIL"
    assert "[PASS]" in str(rep)
    assert "FAIL" in str(failing)


# ---------------------------------------------------------------------------
# helpers

def test_parse_r_rule():
    assert parse_r_rule("n", 100) == 100.0
    assert parse_r_rule("n/2", 100) == 50.0
    assert parse_r_rule("n^0.5", 100) == pytest.approx(10.0)
    assert parse_r_rule("n*0.25", 100) == 25.0
    assert parse_r_rule("37", 100) == 37.0
    assert parse_r_rule(12, 100) == 12.0
    assert parse_r_rule(" N/4 ", 100) == 25.0
    with pytest.raises(ValueError):
        parse_r_rule("", 100)
    with pytest.raises(ValueError):
        parse_r_rule("half", 100)


def test_known_rv_exponent():
    assert known_rv_exponent(kingman()) == 2.0
    assert known_rv_exponent(bolthausen_sznitman()) == 1.0
    assert known_rv_exponent(power_beta(1.0, 0.5)) == 1.5
    assert known_rv_exponent(parse_measure("dirac:p=0.5,m=1")) == 1.0
    assert known_rv_exponent(
        parse_measure("kingman + powerbeta:c=1,a=0.5,b=1")) == 2.0
    custom = LambdaMeasure(densities=(CustomDensity(lambda p: p),))
    assert known_rv_exponent(custom) is None


def test_integral_inverse_mu_kingman():
    # int 2/(x(x-1)) dx = 2 log((x-1)/x)
    rates = rates_for(kingman())
    lo, hi = 5.0, 100.0
    expect = 2.0 * (math.log(99.0 / 100.0) - math.log(4.0 / 5.0))
    assert integral_inverse_mu(rates, lo, hi) == pytest.approx(expect,
                                                               rel=1e-9)
    assert integral_inverse_mu(rates, 5.0, 5.0) == 0.0


def test_decimated_ecdf():
    small = _decimated_ecdf(np.array([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(small,
                               [[1.0, 1 / 3], [2.0, 2 / 3], [3.0, 1.0]])
    big = _decimated_ecdf(np.arange(2000.0), points=512)
    assert big.shape[0] <= 512
    assert big[-1, 0] == 1999.0
    assert big[-1, 1] == 1.0
    assert np.all(np.diff(big[:, 0]) > 0)


# ---------------------------------------------------------------------------
# regime guards

def test_regime_guards():
    base = dict(n=2000, replications=100)
    with pytest.raises(RegimeError):
        run_typical_length(ExperimentConfig(
            "powerbeta:c=1,a=1.5,b=1", "T1.1", **base))
    with pytest.raises(RegimeError):
        run_order_statistics(ExperimentConfig(
            "bolthausen-sznitman", "T1.5", **base))
    with pytest.raises(RegimeError):
        run_bs_extremes(ExperimentConfig("kingman", "T1.6", **base))
    with pytest.raises(RegimeError):
        run_tail_identity(ExperimentConfig(
            "kingman", "T4.1", **base, params={"r_rule": 1}))
    with pytest.raises(RegimeError):
        run_lln(ExperimentConfig(
            "kingman", "P2.1", **base, params={"r_rule": "n*0.9"}))
    with pytest.raises(RegimeError):
        # integral of 1/mu too large for the small-integral regime
        run_lln(ExperimentConfig(
            "kingman", "P2.1", **base, params={"r_rule": 2}))
    with pytest.raises(ValueError):
        run_typical_length(ExperimentConfig(
            "kingman", "T1.1", **base, params={"scale": "bogus"}))
    with pytest.raises(ValueError):
        run_independence(ExperimentConfig(
            "kingman", "T1.2", **base, params={"k": 9}))


# ---------------------------------------------------------------------------
# runners, small scale

def stat_names(report):
    return [s.name for s in report.statistics]


def test_run_typical_length_small():
    cfg = ExperimentConfig("kingman", "T1.1", 200, 2000,
                           tolerances={"ks": 0.2, "envelope": 0.2})
    rep = run_typical_length(cfg)
    assert stat_names(rep) == ["ks_vs_limit", "envelope_gap", "scaled_mean"]
    assert rep.verdict == "PASS"
    res = rep.config["resolved"]
    assert res["alpha"] == 2.0 and res["alpha_source"] == "family"
    assert res["scale_rule"] == "mu_over_n"
    assert res["scale"] == pytest.approx(199.0 / 2.0)
    assert "scaled_length" in rep.ecdf_grids
    assert rep.ecdf_grids["scaled_length"].shape[1] == 2


def test_run_typical_length_log_scale():
    cfg = ExperimentConfig("bolthausen-sznitman", "T1.3", 300, 500,
                           params={"scale": "log_n"},
                           tolerances={"ks": 0.5, "envelope": 0.5})
    rep = run_typical_length(cfg)
    assert rep.config["resolved"]["scale_rule"] == "log_n"
    assert rep.config["resolved"]["scale"] == pytest.approx(math.log(300.0))


def test_run_independence_small():
    cfg = ExperimentConfig("kingman", "T1.2", 100, 1000,
                           tolerances={"corr": 0.15, "gap": 0.15})
    rep = run_independence(cfg)
    assert stat_names(rep) == ["max_abs_corr", "joint_product_gap"]
    assert rep.config["resolved"]["k"] == 2
    assert rep.verdict == "PASS"
    solo = run_independence(ExperimentConfig(
        "kingman", "T1.2", 100, 100, params={"k": 1}))
    assert solo.verdict == "PASS"
    assert all(s.value == 0.0 for s in solo.statistics)


def test_run_tail_identity_small():
    cfg = ExperimentConfig("kingman:2", "T4.1", 400, 2000,
                           tolerances={"exceedance": 0.1})
    rep = run_tail_identity(cfg)
    assert stat_names(rep) == ["exceedance_prob", "envelope_gap"]
    res = rep.config["resolved"]
    assert res["r_level"] == 200.0
    assert res["mu_ratio"] == pytest.approx(200.0 * 199.0 / (400.0 * 399.0))
    assert res["envelope"] == [0.25, 0.5]
    assert rep.verdict == "PASS"


def test_run_lln_small():
    cfg = ExperimentConfig("kingman", "P2.1", 2000, 200)
    rep = run_lln(cfg)
    assert stat_names(rep) == ["time_over_integral", "harmonic_sum"]
    res = rep.config["resolved"]
    assert res["r_level"] == pytest.approx(math.sqrt(2000.0))
    # kingman drops one block per jump: the harmonic sum is deterministic
    # up to float summation order
    harmonic = next(s for s in rep.statistics if s.name == "harmonic_sum")
    assert harmonic.se < 1e-12
    assert rep.verdict == "PASS"


def test_run_order_statistics_small():
    cfg = ExperimentConfig("kingman", "T1.5", 500, 1000,
                           params={"ell": 2, "x_grid": (1.0, 2.0)},
                           tolerances={"ks": 0.3, "count_moments": 1.0})
    rep = run_order_statistics(cfg)
    assert stat_names(rep) == ["ks_max_vs_limit",
                               "count_mean_rel_err_x1",
                               "count_var_rel_err_x1",
                               "count_mean_rel_err_x2",
                               "count_var_rel_err_x2"]
    res = rep.config["resolved"]
    assert res["alpha"] == 2.0
    assert res["ell"] == 2
    assert res["s_n"] == pytest.approx(
        (1.0 + math.sqrt(4.0 * 499.0 + 1.0)) / 2.0)
    assert "scaled_max" in rep.ecdf_grids
    assert rep.verdict == "PASS"


def test_run_order_statistics_alpha_override():
    cfg = ExperimentConfig("kingman", "T1.5", 300, 500,
                           params={"alpha": 1.5},
                           tolerances={"ks": 1.0, "count_moments": 50.0})
    rep = run_order_statistics(cfg)
    assert rep.config["resolved"]["alpha_source"] == "config"
    assert rep.config["resolved"]["alpha"] == 1.5


def test_run_bs_extremes_trend_and_moments():
    cfg = ExperimentConfig("bolthausen-sznitman", "T1.6", 300, 500,
                           params={"trend_grid": (300, 600)},
                           tolerances={"trend_rise": 0.5})
    rep = run_bs_extremes(cfg)
    names = stat_names(rep)
    assert names[:2] == ["ks_logistic_n300", "ks_logistic_n600"]
    assert "trend_max_rise" in names
    assert "centered_max_n300" in rep.ecdf_grids
    assert rep.verdict == "PASS"

    moments = run_bs_extremes(ExperimentConfig(
        "bolthausen-sznitman", "L9.2", 500, 2000,
        params={"t_grid": (0.5,), "r": 1}))
    assert stat_names(moments) == ["moment_zscore_r1_t0.5"]
    assert moments.config["resolved"]["r"] == 1
    assert moments.verdict == "PASS"


def test_run_bs_extremes_c_branch():
    cfg = ExperimentConfig("bolthausen-sznitman", "L9.2", 150, 500,
                           params={"t_grid": (), "c": 1.0, "c_reps": 500},
                           tolerances={"c_mean": 0.5})
    rep = run_bs_extremes(cfg)
    assert "scaled_count_mean" in stat_names(rep)
    res = rep.config["resolved"]
    assert res["c"] == 1.0 and res["c_n"] == 150
    assert res["t_c"] > 0.0


def test_run_factorial_replay_exact_law():
    cfg = ExperimentConfig("kingman", "L7.1", 50, 2000,
                           params={"variance_paths": 100})
    rep = run_factorial_replay(cfg)
    assert stat_names(rep) == ["replay_zscore_r1", "replay_zscore_r2",
                               "max_var_minus_mean"]
    assert rep.config["resolved"]["r_values"] == [1, 2]
    assert rep.verdict == "PASS"
    var_stat = next(s for s in rep.statistics
                    if s.name == "max_var_minus_mean")
    assert var_stat.value <= 1e-9


def test_run_experiment_dispatch_and_determinism():
    cfg = ExperimentConfig("kingman:2", "T4.1", 400, 1000)
    via_dispatch = run_experiment(cfg)
    direct = run_tail_identity(cfg)
    assert via_dispatch.to_json() == direct.to_json()
    again = run_experiment(cfg)
    assert via_dispatch.to_json() == again.to_json()
    assert set(CATALOG.values()) == {
        "typical", "independence", "order_statistics", "bs_extremes",
        "lln", "tail_identity", "factorial_replay"}
