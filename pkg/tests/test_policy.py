import numpy as np
import pytest

from greengap.config import CalibrationConfig
from greengap.decision import FirmDraw, annuity_factor
from greengap.engine import Level, evaluate, level0_inputs
from greengap.errors import ConfigurationError
from greengap.policy import (
    PolicySpec,
    SaturationWarning,
    apply_policy,
    equivalent_subsidy_for_tax,
    policy_impact,
    policy_sweep,
    shift_sweep,
    shift_weights,
    write_sweep_csv,
)

FIRM = FirmDraw(delta_c=10367.0, price=0.07, delta_q=43280.0, r=0.08, n=15, b=2)


def test_apply_policy_examples():
    assert apply_policy(FIRM, PolicySpec()) == FIRM
    assert apply_policy(FIRM, PolicySpec(tax_rate=0.07)).price == pytest.approx(0.0749)
    sub = apply_policy(FIRM, PolicySpec(subsidy_rate=0.27))
    assert sub.delta_c == pytest.approx(7567.91)
    assert FIRM.delta_c - sub.delta_c == pytest.approx(2799.09)
    assert (sub.r, sub.n, sub.b, sub.delta_q) == (FIRM.r, FIRM.n, FIRM.b, FIRM.delta_q)


def test_policy_spec_validation():
    with pytest.raises(ConfigurationError):
        PolicySpec(tax_rate=-0.1)
    with pytest.raises(ConfigurationError):
        PolicySpec(subsidy_rate=1.2)


def test_identity_policy_bit_identical(default_config, default_population):
    for level in ("L1", "L2", "L3", "Ensemble"):
        imp = policy_impact(default_config, PolicySpec(), level, default_population)
        assert imp.delta_pp == 0.0 and imp.delta_mean_value == 0.0 and imp.avg_transfer == 0.0


def test_equivalent_subsidy():
    cfg = CalibrationConfig()
    assert equivalent_subsidy_for_tax(cfg, 0.0) == 0.0
    s = equivalent_subsidy_for_tax(cfg, 0.07)
    assert 0.25 <= s <= 0.29
    assert equivalent_subsidy_for_tax(cfg, 0.14) == pytest.approx(2 * s, rel=1e-12)
    with pytest.warns(SaturationWarning):
        assert equivalent_subsidy_for_tax(cfg, 1.0) == 1.0


def test_equal_transfer_at_matched_pair():
    cfg = CalibrationConfig()
    s = equivalent_subsidy_for_tax(cfg, 0.07)
    x = level0_inputs(cfg)
    subsidy = s * x["delta_c"]
    tax = 0.07 * x["price"] * x["delta_q"] * annuity_factor(x["r"], x["n"])
    assert abs(subsidy - tax) / tax < 0.01


def test_level1_tax_value_equals_transfer(default_config, default_population):
    imp = policy_impact(default_config, PolicySpec(tax_rate=0.07), "L1", default_population)
    assert imp.delta_mean_value == pytest.approx(imp.avg_transfer, rel=1e-9)


def test_subsidy_value_is_mean_subsidy(default_config, default_population):
    for level in ("L1", "L2"):
        imp = policy_impact(default_config, PolicySpec(subsidy_rate=0.27), level, default_population)
        assert imp.delta_mean_value == pytest.approx(0.27 * default_population.delta_c.mean(), rel=1e-9)


def test_sweep_monotone_in_rates(default_config):
    rows = policy_sweep(
        default_config,
        tax_grid=np.linspace(0, 0.3, 7),
        subsidy_grid=np.linspace(0, 1, 11),
        levels=("L1", "L2", "L3", "Ensemble"),
    )
    assert len(rows) == (7 + 11) * 4
    for kind in ("tax", "subsidy"):
        for level in Level:
            seq = [r.impact.policy_rate for r in rows if r.policy_kind == kind and r.impact.level_tag is level]
            assert all(b >= a for a, b in zip(seq, seq[1:]))


def test_zero_subsidy_grid(default_config, tmp_path):
    rows = policy_sweep(default_config, subsidy_grid=[0.0])
    assert all(r.impact.delta_pp == 0 for r in rows)
    path = tmp_path / "sweep.csv"
    write_sweep_csv(rows, path)
    header = path.read_text().splitlines()[0]
    assert header == "policy_kind,rate,level,baseline_rate,policy_rate,delta_pp,delta_mean_value,avg_transfer,marginal_pp"


def test_marginal_impact_sums_to_total(default_config):
    rows = policy_sweep(default_config, subsidy_grid=[0.0, 0.25, 0.5, 0.75], levels=("L2",))
    assert sum(r.marginal_pp for r in rows) == pytest.approx(rows[-1].impact.delta_pp)


def test_shift_weights_path():
    assert shift_weights(0).as_tuple() == (0, 0, 1)
    assert shift_weights(1).as_tuple() == (0, 1, 0)
    assert shift_weights(2).as_tuple() == (1, 0, 0)
    assert shift_weights(0.25).as_tuple() == (0, 0.25, 0.75)
    with pytest.raises(ConfigurationError):
        shift_weights(2.5)


def test_shift_sweep_endpoints(default_config, default_population):
    path = shift_sweep(default_config, 3)
    assert [p for p, _ in path] == [0.0, 1.0, 2.0]
    for (_, rate), level in zip(path, ("L3", "L2", "L1")):
        assert rate == np.mean(evaluate(default_population, level, default_config) > 0)
    with pytest.raises(ConfigurationError):
        shift_sweep(default_config, 1)


def test_shift_first_stage_pointwise_monotone(default_config):
    path = shift_sweep(default_config, 11)
    first = [r for p, r in path if p <= 1.0]
    assert all(b >= a for a, b in zip(first, first[1:]))
