import numpy as np
import pytest

from greengap.engine import Level, simulate_level
from greengap.errors import ConfigurationError, InversionError
from greengap.sensitivity import SweepSpec, implicit_parameter, run_sweep, simulated_rate


def test_gamma_zero_gives_no_adopters(default_config):
    rows = run_sweep(default_config, SweepSpec("gamma", [0.0], ["L1"]))
    assert rows == [(0.0, Level.L1, 0.0)]


def test_price_at_mean_close_to_default(default_config):
    mean_price = default_config.dist_price.mean()
    rows = run_sweep(default_config, SweepSpec("price", [mean_price]))
    for _, level, rate in rows:
        base = simulate_level(default_config, level).implementation_rate
        assert abs(rate - base) <= 0.05


def test_cost_sweep_decreasing(default_config):
    grid = [0, 2000, 5000, 10000, 20000, 40000]
    rows = run_sweep(default_config, SweepSpec("delta_c", grid))
    for level in (Level.L1, Level.L2, Level.L3):
        seq = [r for _, lv, r in rows if lv is level]
        assert all(b <= a for a, b in zip(seq, seq[1:]))


def test_gamma_one_reproduces_default(default_config):
    rows = run_sweep(default_config, SweepSpec("gamma", [1.0], ["L1"]))
    assert rows[0][2] == simulate_level(default_config, "L1").implementation_rate


def test_domain_checks():
    with pytest.raises(ConfigurationError):
        SweepSpec("gamma", [1.5])
    with pytest.raises(ConfigurationError):
        SweepSpec("b", [0.0])
    with pytest.raises(ConfigurationError):
        SweepSpec("lambda", [1.0])
    with pytest.raises(ConfigurationError):
        SweepSpec("price", [])


def test_inversion_at_default_rate_returns_one(default_config):
    target = simulate_level(default_config, "L1").implementation_rate
    res = implicit_parameter(default_config, "gamma", target)
    assert res.solution == pytest.approx(1.0, abs=0.02)


def test_inversion_deterministic_and_round_trip(default_config):
    a = implicit_parameter(default_config, "r", 0.6)
    b = implicit_parameter(default_config, "r", 0.6)
    assert a == b
    assert abs(simulated_rate(default_config, "r", a.solution, Level.L1) - 0.6) <= 0.01
    assert a.to_dict()["iterations"] == a.iterations


def test_unreachable_target_reports_bracket(default_config):
    with pytest.raises(InversionError) as info:
        implicit_parameter(default_config, "gamma", 0.99)
    assert info.value.bracket == (0.0, 1.0)
    assert info.value.bracket_rates[0] == 0.0


def test_diminishing_marginal_subsidy_impact(default_config):
    # subsidy-equivalent cost grid: once the rate passes 0.5, increments shrink
    base_cost = default_config.dist_delta_c
    from greengap.config import CalibrationConfig
    from greengap.distributions import Weibull

    rates = []
    for s in np.linspace(0.0, 1.0, 11):
        cfg = CalibrationConfig(dist_delta_c=Weibull(base_cost.shape, base_cost.scale * max(1 - s, 1e-9)))
        rates.append(simulate_level(cfg, "L2").implementation_rate)
    incs = np.diff(rates)
    tail = [inc for r, inc in zip(rates[1:], incs) if r > 0.5]
    assert all(b <= a + 0.03 for a, b in zip(tail, tail[1:]))
