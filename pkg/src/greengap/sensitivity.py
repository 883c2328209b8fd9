"""
One-at-a-time parameter sweeps and implicit-parameter inversion.

Sweeping or inverting a parameter replaces its distribution with a point
mass shared by every firm; all other parameters keep their heterogeneity and
their draws, because each field has its own random slot.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .engine import Level, draw_population, evaluate
from .errors import ConfigurationError, InversionError

__all__ = [
    "SWEEPABLE",
    "SweepSpec",
    "InversionResult",
    "run_sweep",
    "implicit_parameter",
    "simulated_rate",
    "write_sweep_csv",
]

# legal closed domains for point values
SWEEPABLE = {
    "price": (0.0, math.inf),
    "delta_q": (0.0, math.inf),
    "delta_c": (0.0, math.inf),
    "b": (1.0, 5.0),
    "r": (0.0, math.inf),
    "n": (0.0, math.inf),
    "gamma": (0.0, 1.0),
}

DEFAULT_BRACKETS = {"gamma": (0.0, 1.0), "r": (0.0, 2.0)}


def _check_value(parameter, value):
    if parameter not in SWEEPABLE:
        raise ConfigurationError(f"cannot sweep {parameter!r}; choose from {sorted(SWEEPABLE)}")
    lo, hi = SWEEPABLE[parameter]
    if not (lo <= value <= hi and math.isfinite(value)):
        raise ConfigurationError(f"{parameter}={value} outside its domain [{lo}, {hi}]")


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    grid: tuple
    levels: tuple = (Level.L1, Level.L2, Level.L3)

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        object.__setattr__(self, "levels", tuple(Level.parse(lv) for lv in self.levels))
        if not self.grid:
            raise ConfigurationError("sweep grid must be nonempty")
        for g in self.grid:
            _check_value(self.parameter, g)
        if Level.L0 in self.levels:
            raise ConfigurationError("sweeps run on simulated levels only")


def simulated_rate(config, parameter, value, level):
    """Implementation rate with ``parameter`` fixed at ``value`` for all firms."""
    _check_value(parameter, value)
    cfg = config.with_point(parameter, value)
    return float(np.mean(evaluate(draw_population(cfg), level, cfg) > 0))


def run_sweep(config, spec):
    """
    Implementation rate at every grid value and level.

    Returns
    -------
    list of (parameter_value, level, implementation_rate)
    """
    rows = []
    for value in spec.grid:
        cfg = config.with_point(spec.parameter, value)
        population = draw_population(cfg)
        for level in spec.levels:
            rate = float(np.mean(evaluate(population, level, cfg) > 0))
            rows.append((value, level, rate))
    return rows


def write_sweep_csv(parameter, rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["parameter", "value", "level", "rate"])
        for value, level, rate in rows:
            w.writerow([parameter, repr(value), level.value, repr(rate)])


@dataclass(frozen=True)
class InversionResult:
    parameter: str
    target: float
    solution: float
    achieved_rate: float
    iterations: int
    level: Level = Level.L1

    def to_dict(self):
        return {
            "parameter": self.parameter,
            "level": self.level.value,
            "target": self.target,
            "solution": self.solution,
            "achieved_rate": self.achieved_rate,
            "iterations": self.iterations,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"


def implicit_parameter(config, parameter, target_rate, level_tag=Level.L1, bracket=None, rate_tol=0.005, width_tol=1e-4):
    """
    Value of ``gamma`` or ``r`` at which the simulated rate hits ``target_rate``.

    Bisection on a fixed population: the rate is a monotone step function of
    the parameter, so the search is deterministic. It stops when the rate is
    within ``rate_tol`` of the target or the bracket is narrower than
    ``width_tol``.

    Raises
    ------
    InversionError
        If the target lies outside the rates reached at the bracket ends.
    """
    if parameter not in DEFAULT_BRACKETS:
        raise ConfigurationError(f"implicit inversion supports {sorted(DEFAULT_BRACKETS)}, not {parameter!r}")
    if not 0.0 < target_rate < 1.0:
        raise ConfigurationError(f"target rate must lie in (0, 1), got {target_rate}")
    level = Level.parse(level_tag)
    lo, hi = DEFAULT_BRACKETS[parameter] if bracket is None else bracket
    rate = lambda x: simulated_rate(config, parameter, x, level)

    r_lo, r_hi = rate(lo), rate(hi)
    evals = 2
    for x, rx in ((hi, r_hi), (lo, r_lo)):
        if abs(rx - target_rate) < rate_tol:
            return InversionResult(parameter, target_rate, float(x), rx, evals, level)
    if not min(r_lo, r_hi) <= target_rate <= max(r_lo, r_hi):
        raise InversionError(
            f"target rate {target_rate} not reachable by {parameter} in [{lo}, {hi}] "
            f"(rates {r_lo:.4f} .. {r_hi:.4f})",
            bracket=(lo, hi),
            bracket_rates=(r_lo, r_hi),
        )
    increasing = r_hi > r_lo
    mid, r_mid = lo, r_lo
    while hi - lo >= width_tol:
        mid = 0.5 * (lo + hi)
        r_mid = rate(mid)
        evals += 1
        if abs(r_mid - target_rate) < rate_tol:
            break
        if (r_mid < target_rate) == increasing:
            lo = mid
        else:
            hi = mid
    return InversionResult(parameter, target_rate, float(mid), r_mid, evals, level)
