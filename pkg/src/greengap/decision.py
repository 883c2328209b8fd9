"""
Decision protocols for a single adoption decision.

Four ways a firm can value the same investment:

* level 0, engineering NPV of a representative firm,
* level 1, NPV with private discount rates and a benefit weight ``gamma``,
* level 2, undiscounted payback benefit up to a threshold of ``b`` years,
* level 3, the level-2 sums passed through a loss-averse value function.

All protocol functions accept scalars or equally-shaped numpy arrays.

Benefit streams run over integer years ``first_year .. horizon``. The
default ``first_year=1`` counts savings from the end of the first year, so a
payback threshold of ``b`` years counts ``b`` annual savings. Passing
``first_year=0`` also counts a saving in the investment year itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import SampleStream, uniforms
from .errors import ConfigurationError, DomainError

__all__ = [
    "FirmDraw",
    "BehaviouralConstants",
    "EnsembleWeights",
    "DEFAULT_FIRST_YEAR",
    "annuity_factor",
    "npv_level0",
    "npv_level1",
    "npb_level2",
    "npb_level3",
    "assign_level",
    "levels_from_uniform",
    "decide",
]

DEFAULT_FIRST_YEAR = 1


@dataclass(frozen=True)
class FirmDraw:
    """Realized parameters of one simulated firm."""

    delta_c: float
    price: float
    delta_q: float
    r: float
    n: int
    b: int
    gamma: float = 1.0
    level: int = 1

    def __post_init__(self):
        if self.delta_c < 0 or self.price < 0 or self.delta_q < 0 or self.r < 0:
            raise ConfigurationError(f"costs, prices, savings and rates must be nonnegative: {self}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigurationError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.n < 0:
            raise ConfigurationError(f"lifetime must be nonnegative, got {self.n}")
        if self.b not in (1, 2, 3, 4, 5):
            raise ConfigurationError(f"payback threshold must be an integer in 1..5, got {self.b}")
        if self.level not in (1, 2, 3):
            raise ConfigurationError(f"level must be 1, 2 or 3, got {self.level}")


@dataclass(frozen=True)
class BehaviouralConstants:
    """Loss aversion ``lam`` and curvature exponents of the value function.

    ``alpha`` bends the benefit sum, ``beta`` the cost.
    """

    lam: float = 2.25
    alpha: float = 0.88
    beta: float = 0.88

    def __post_init__(self):
        if not self.lam >= 1.0:
            raise ConfigurationError(f"loss aversion must be >= 1, got {self.lam}")
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ConfigurationError(f"{name} must lie in (0, 1], got {v}")


@dataclass(frozen=True)
class EnsembleWeights:
    """Probabilities that a firm decides on level 1, 2 or 3."""

    p1: float = 0.4
    p2: float = 0.3
    p3: float = 0.3

    def __post_init__(self):
        ps = (self.p1, self.p2, self.p3)
        if any(not 0.0 <= p <= 1.0 for p in ps):
            raise ConfigurationError(f"ensemble weights must lie in [0, 1], got {ps}")
        if abs(sum(ps) - 1.0) > 1e-9:
            raise ConfigurationError(f"ensemble weights must sum to 1, got {sum(ps)}")

    def as_tuple(self):
        return (self.p1, self.p2, self.p3)


def annuity_factor(r, horizon, first_year=DEFAULT_FIRST_YEAR):
    """
    ``sum((1 + r) ** -t for t in range(first_year, horizon + 1))`` in closed form.

    Uses ``expm1``/``log1p`` so rates close to zero keep full precision; the
    zero-rate limit is the payment count. Empty sums (``horizon <
    first_year``) are 0.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= -1.0):
        raise DomainError("discount rate must exceed -1")
    m = np.maximum(np.asarray(horizon, dtype=float) - first_year + 1.0, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        lr = np.log1p(r)
        geometric = np.exp(-first_year * lr) * -np.expm1(-m * lr) * (1.0 + r) / r
    out = np.where(r == 0.0, m, geometric)
    return out if out.ndim else float(out)


def npv_level0(delta_c, price, delta_q, r, n, first_year=DEFAULT_FIRST_YEAR):
    """Engineering NPV of the representative firm."""
    if np.any(np.asarray(r) == -1.0):
        raise DomainError("discount rate of -1 makes the discount factor undefined")
    return -delta_c + price * delta_q * annuity_factor(r, n, first_year)


def npv_level1(firm, first_year=DEFAULT_FIRST_YEAR):
    """Optimizing NPV: private rate ``r``, lifetime ``n`` and benefit weight ``gamma``."""
    return -firm.delta_c + firm.gamma * firm.price * firm.delta_q * annuity_factor(firm.r, firm.n, first_year)


def _payback_sum(firm, first_year):
    count = np.maximum(np.asarray(firm.b, dtype=float) - first_year + 1.0, 0.0)
    return firm.price * firm.delta_q * count


def npb_level2(firm, first_year=DEFAULT_FIRST_YEAR):
    """Satisficing NPB: undiscounted savings up to the payback threshold ``b``."""
    return -firm.delta_c + _payback_sum(firm, first_year)


def npb_level3(firm, consts=BehaviouralConstants(), first_year=DEFAULT_FIRST_YEAR):
    """
    Behavioural NPB: ``-lam * cost**beta + benefits**alpha``.

    Raises
    ------
    DomainError
        If the cost or the payback benefit sum is negative.
    """
    benefits = _payback_sum(firm, first_year)
    cost = np.asarray(firm.delta_c, dtype=float)
    if np.any(cost < 0) or np.any(np.asarray(benefits) < 0):
        raise DomainError("fractional power of a negative cost or benefit sum")
    value = -consts.lam * cost**consts.beta + np.asarray(benefits, dtype=float) ** consts.alpha
    return value if np.ndim(value) else float(value)


def levels_from_uniform(u, weights):
    """Map uniforms to levels 1/2/3 by the cumulative ensemble weights."""
    u = np.asarray(u, dtype=float)
    p1, p2, _ = weights.as_tuple()
    return np.where(u < p1, 1, np.where(u < p1 + p2, 2, 3)).astype(np.int8)


def assign_level(weights, stream, slot=6):
    """Categorical level draw for one firm stream."""
    if not isinstance(stream, SampleStream):
        raise ConfigurationError("assign_level needs a SampleStream")
    return int(levels_from_uniform(uniforms(stream.seed, stream.stream_id, slot), weights))


_PROTOCOLS = {
    1: lambda f, c, fy: npv_level1(f, fy),
    2: lambda f, c, fy: npb_level2(f, fy),
    3: lambda f, c, fy: npb_level3(f, c, fy),
}


def decide(firm, consts=BehaviouralConstants(), first_year=DEFAULT_FIRST_YEAR):
    """
    Evaluate ``firm`` under its assigned level.

    Returns
    -------
    value : float
    adopt : bool
        ``value > 0``; a value of exactly zero does not adopt.
    """
    value = float(_PROTOCOLS[firm.level](firm, consts, first_year))
    if math.isnan(value):
        raise DomainError(f"protocol produced NaN for {firm}")
    return value, value > 0.0
