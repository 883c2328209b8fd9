"""Calibration parameters and their JSON file format."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from .decision import DEFAULT_FIRST_YEAR, BehaviouralConstants, EnsembleWeights
from .distributions import PointMass, TruncatedNormal, Weibull, spec_from_dict
from .errors import ConfigurationError

__all__ = ["CalibrationConfig", "DEFAULT_SEED", "load_config", "save_config"]

DEFAULT_SEED = 42

_DIST_FIELDS = ("delta_c", "price", "delta_q", "r", "n", "b")


@dataclass(frozen=True)
class CalibrationConfig:
    """
    Everything needed to draw a firm population and evaluate it.

    The defaults are the electric-motor calibration: Weibull fits for cost
    premium, electricity price and annual savings, literature-based
    truncated normals for discount rate, lifetime and payback threshold.
    """

    dist_delta_c: object = Weibull(1.51, 11493.28)
    dist_price: object = Weibull(2.46, 0.08)
    dist_delta_q: object = Weibull(1.34, 68426.27)
    dist_r: object = TruncatedNormal(0.08, 0.03, 0.0)
    dist_n: object = TruncatedNormal(15.0, 3.0, 0.0)
    dist_b: object = TruncatedNormal(2.0, 1.0, 1.0, 5.0)
    gamma: float = 1.0
    behavioural: BehaviouralConstants = field(default_factory=BehaviouralConstants)
    ensemble: EnsembleWeights = field(default_factory=EnsembleWeights)
    trials: int = 10_000
    seed: int = DEFAULT_SEED
    first_year: int = DEFAULT_FIRST_YEAR

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigurationError(f"trials must be a positive integer, got {self.trials}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigurationError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.first_year not in (0, 1):
            raise ConfigurationError(f"first_year must be 0 or 1, got {self.first_year}")
        for name in _DIST_FIELDS:
            if not hasattr(getattr(self, "dist_" + name), "mean"):
                raise ConfigurationError(f"dist_{name} is not a distribution spec")

    def distribution(self, name):
        return getattr(self, "dist_" + name)

    def with_distribution(self, name, spec):
        return replace(self, **{"dist_" + name: spec})

    def with_point(self, name, value):
        """Copy with one parameter fixed for every firm (``gamma`` included)."""
        if name == "gamma":
            return replace(self, gamma=float(value))
        return self.with_distribution(name, PointMass(float(value)))

    def to_dict(self):
        out = {name: self.distribution(name).to_dict() for name in _DIST_FIELDS}
        out.update(
            gamma=self.gamma,
            behavioural={"lambda": self.behavioural.lam, "alpha": self.behavioural.alpha, "beta": self.behavioural.beta},
            ensemble={"p1": self.ensemble.p1, "p2": self.ensemble.p2, "p3": self.ensemble.p3},
            trials=self.trials,
            seed=self.seed,
            first_year=self.first_year,
        )
        return out

    @classmethod
    def from_dict(cls, data):
        """Inverse of :meth:`to_dict`; missing keys fall back to the defaults."""
        if not isinstance(data, dict):
            raise ConfigurationError("calibration must be a JSON object")
        unknown = set(data) - set(_DIST_FIELDS) - {"gamma", "behavioural", "ensemble", "trials", "seed", "first_year"}
        if unknown:
            raise ConfigurationError(f"unknown calibration keys: {sorted(unknown)}")
        kwargs = {}
        for name in _DIST_FIELDS:
            if name in data:
                kwargs["dist_" + name] = spec_from_dict(data[name])
        if "behavioural" in data:
            beh = data["behavioural"]
            kwargs["behavioural"] = BehaviouralConstants(
                float(beh.get("lambda", 2.25)), float(beh.get("alpha", 0.88)), float(beh.get("beta", 0.88))
            )
        if "ensemble" in data:
            ens = data["ensemble"]
            kwargs["ensemble"] = EnsembleWeights(float(ens["p1"]), float(ens["p2"]), float(ens["p3"]))
        for key, conv in (("gamma", float), ("trials", int), ("seed", int), ("first_year", int)):
            if key in data:
                kwargs[key] = conv(data[key])
        return cls(**kwargs)


def _json_default(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    raise TypeError(f"not JSON serializable: {obj!r}")


def save_config(config, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2, default=_json_default)
        fh.write("\n")


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from None
    return CalibrationConfig.from_dict(data)
