"""
Tax, subsidy and decision-level-shifting policies.

A tax at rate ``t`` multiplies each firm's electricity price by ``1 + t``; a
subsidy at rate ``s`` multiplies its investment cost by ``1 - s``. Baseline
and policy runs always share one population, so a rate difference is the
policy effect and not sampling noise.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .decision import EnsembleWeights, FirmDraw, annuity_factor, levels_from_uniform
from .distributions import uniforms
from .engine import FIELD_SLOTS, Level, draw_population, evaluate, level0_inputs
from .errors import ConfigurationError

__all__ = [
    "PolicySpec",
    "PolicyImpact",
    "SweepRow",
    "SaturationWarning",
    "apply_policy",
    "tax_transfer",
    "policy_impact",
    "equivalent_subsidy_for_tax",
    "policy_sweep",
    "shift_weights",
    "shift_sweep",
    "write_sweep_csv",
    "SWEEP_COLUMNS",
]


class SaturationWarning(UserWarning):
    """The subsidy needed to match a tax would exceed 100%."""


@dataclass(frozen=True)
class PolicySpec:
    tax_rate: float = 0.0
    subsidy_rate: float = 0.0

    def __post_init__(self):
        if not (self.tax_rate >= 0 and math.isfinite(self.tax_rate)):
            raise ConfigurationError(f"tax rate must be >= 0, got {self.tax_rate}")
        if not 0.0 <= self.subsidy_rate <= 1.0:
            raise ConfigurationError(f"subsidy rate must lie in [0, 1], got {self.subsidy_rate}")

    @property
    def is_identity(self):
        return self.tax_rate == 0.0 and self.subsidy_rate == 0.0


@dataclass(frozen=True)
class PolicyImpact:
    level_tag: Level
    policy: PolicySpec
    baseline_rate: float
    policy_rate: float
    delta_pp: float
    delta_mean_value: float
    avg_transfer: float

    @property
    def relative_change(self):
        """Rate change relative to the baseline rate (0.064 for +6.4%)."""
        return self.policy_rate / self.baseline_rate - 1.0 if self.baseline_rate else math.inf


def apply_policy(firm, policy):
    """
    Copy of ``firm`` with taxed price and subsidised cost.

    Works on a single :class:`FirmDraw` or a whole
    :class:`~greengap.engine.Population`.
    """
    if policy.is_identity:
        return firm
    changes = {
        "price": (1.0 + policy.tax_rate) * firm.price,
        "delta_c": (1.0 - policy.subsidy_rate) * firm.delta_c,
    }
    if isinstance(firm, FirmDraw):
        return replace(firm, **changes)
    return firm.replace(**changes)


def tax_transfer(population, tax_rate, first_year):
    """Per-firm discounted lifetime tax saving, ``t * p * dq * annuity(r, n)``."""
    return tax_rate * population.price * population.delta_q * annuity_factor(population.r, population.n, first_year)


def _impact(config, population, baseline_values, policy, level):
    policy_values = evaluate(apply_policy(population, policy), level, config)
    base_rate = float(np.mean(baseline_values > 0))
    pol_rate = float(np.mean(policy_values > 0))
    transfer = policy.subsidy_rate * population.delta_c
    if policy.tax_rate:
        transfer = transfer + tax_transfer(population, policy.tax_rate, config.first_year)
    return PolicyImpact(
        level,
        policy,
        base_rate,
        pol_rate,
        100.0 * (pol_rate - base_rate),
        float(np.mean(policy_values) - np.mean(baseline_values)),
        float(np.mean(transfer)),
    )


def policy_impact(config, policy, level_tag, population=None):
    """
    Rate and mean-value change caused by ``policy`` at one level.

    ``avg_transfer`` is the mean subsidy payment plus the mean discounted
    lifetime tax saving. The tax part is always the full discounted sum, even
    for levels that only perceive the payback window, so taxes and subsidies
    are compared on the same fiscal footing.
    """
    level = Level.parse(level_tag)
    if level is Level.L0:
        raise ConfigurationError("policy impacts are simulated for L1, L2, L3 or Ensemble")
    if population is None:
        population = draw_population(config)
    baseline = evaluate(population, level, config)
    return _impact(config, population, baseline, policy, level)


def equivalent_subsidy_for_tax(config, tax_rate):
    """
    Subsidy rate whose average payment equals the average discounted tax saving.

    Both sides are evaluated at the distribution means (the representative
    firm), so the result is linear in ``tax_rate`` until it saturates at 1.
    A saturated result emits :class:`SaturationWarning`.
    """
    if not tax_rate >= 0:
        raise ConfigurationError(f"tax rate must be >= 0, got {tax_rate}")
    x = level0_inputs(config)
    saving = tax_rate * x["price"] * x["delta_q"] * annuity_factor(x["r"], x["n"], config.first_year)
    s = saving / x["delta_c"]
    if s > 1.0:
        warnings.warn(
            f"tax {tax_rate:.4g} needs a subsidy of {s:.4g} > 100%; clipped to 1",
            SaturationWarning,
            stacklevel=2,
        )
        return 1.0
    return float(s)


@dataclass(frozen=True)
class SweepRow:
    policy_kind: str
    rate: float
    impact: PolicyImpact
    marginal_pp: float
    """Rate change in p.p. since the previous grid point (first point: since no policy)."""

    def as_csv_row(self):
        i = self.impact
        return [
            self.policy_kind,
            repr(self.rate),
            i.level_tag.value,
            repr(i.baseline_rate),
            repr(i.policy_rate),
            repr(i.delta_pp),
            repr(i.delta_mean_value),
            repr(i.avg_transfer),
            repr(self.marginal_pp),
        ]


SWEEP_COLUMNS = [
    "policy_kind",
    "rate",
    "level",
    "baseline_rate",
    "policy_rate",
    "delta_pp",
    "delta_mean_value",
    "avg_transfer",
    "marginal_pp",
]


def policy_sweep(config, tax_grid=(), subsidy_grid=(), levels=(Level.L1, Level.L2, Level.L3)):
    """
    One :class:`SweepRow` per (policy kind, grid rate, level).

    Tax points carry no subsidy and vice versa. Rows are ordered by kind,
    level, then grid index.
    """
    if not len(tax_grid) and not len(subsidy_grid):
        raise ConfigurationError("policy_sweep needs a nonempty tax or subsidy grid")
    levels = [Level.parse(lv) for lv in levels]
    population = draw_population(config)
    rows = []
    for kind, grid in (("tax", tax_grid), ("subsidy", subsidy_grid)):
        specs = [PolicySpec(tax_rate=float(g)) if kind == "tax" else PolicySpec(subsidy_rate=float(g)) for g in grid]
        for level in levels:
            baseline = evaluate(population, level, config)
            prev = None
            for rate, spec in zip(grid, specs):
                impact = _impact(config, population, baseline, spec, level)
                marginal = impact.delta_pp if prev is None else 100.0 * (impact.policy_rate - prev)
                rows.append(SweepRow(kind, float(rate), impact, marginal))
                prev = impact.policy_rate
    return rows


def write_sweep_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for row in rows:
            w.writerow(row.as_csv_row())


def shift_weights(position):
    """
    Ensemble weights along the level-shift path.

    Position 0 is all-behavioural, 1 all-satisficing, 2 all-optimizing, with
    linear interpolation in between.
    """
    if not 0.0 <= position <= 2.0:
        raise ConfigurationError(f"shift position must lie in [0, 2], got {position}")
    if position <= 1.0:
        return EnsembleWeights(0.0, position, 1.0 - position)
    return EnsembleWeights(position - 1.0, 2.0 - position, 0.0)


def shift_sweep(config, steps):
    """
    Ensemble implementation rate at ``steps`` evenly spaced shift positions.

    Each position redraws only the level assignment; the firm parameters and
    the level uniforms come from the same seed, so firms move between levels
    one at a time as the position advances.

    Returns
    -------
    list of (position, rate)
    """
    if int(steps) < 2:
        raise ConfigurationError("shift_sweep needs at least 2 steps")
    population = draw_population(config)
    values = {k: evaluate(population, lv, config) > 0 for k, lv in ((1, Level.L1), (2, Level.L2), (3, Level.L3))}
    u = uniforms(config.seed, np.arange(len(population), dtype=np.uint64), FIELD_SLOTS["level"])
    out = []
    for pos in np.linspace(0.0, 2.0, int(steps)):
        lv = levels_from_uniform(u, shift_weights(float(pos)))
        adopt = np.select([lv == 1, lv == 2], [values[1], values[2]], values[3])
        out.append((float(pos), float(adopt.mean())))
    return out
