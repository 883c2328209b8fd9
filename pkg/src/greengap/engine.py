"""
Monte Carlo engine: firm populations, per-level simulation and summaries.
"""

from __future__ import annotations

import csv
import enum
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import NamedTuple, Optional

import numpy as np

from .decision import FirmDraw, levels_from_uniform, npb_level2, npb_level3, npv_level0, npv_level1
from .distributions import sample_many, uniforms
from .errors import ConfigurationError, StateError

__all__ = [
    "Level",
    "Population",
    "Stats",
    "SimulationResult",
    "FIELD_SLOTS",
    "default_workers",
    "draw_population",
    "evaluate",
    "simulate_level",
    "simulate_all",
    "summarize",
    "histogram",
    "level0_inputs",
]

# Fixed sub-draw order inside each firm stream; new fields must be appended.
FIELD_SLOTS = {"delta_c": 0, "price": 1, "delta_q": 2, "r": 3, "n": 4, "b": 5, "level": 6}

RETAIN_LIMIT = 1_000_000


class Level(str, enum.Enum):
    L0 = "L0"
    L1 = "L1"
    L2 = "L2"
    L3 = "L3"
    ENSEMBLE = "Ensemble"

    @classmethod
    def parse(cls, value):
        """Accept ``Level`` members, ``"L2"``, ``"2"``, ``2``, ``"ensemble"``, ``"E"``."""
        if isinstance(value, cls):
            return value
        text = str(value).strip()
        if text.lower() in ("e", "ensemble"):
            return cls.ENSEMBLE
        if text.isdigit():
            text = "L" + text
        try:
            return cls(text.upper())
        except ValueError:
            raise ConfigurationError(f"unknown level {value!r}") from None


def default_workers():
    """Worker count: ``GREENGAP_THREADS`` if set, else the machine's CPU count."""
    env = os.environ.get("GREENGAP_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigurationError(f"GREENGAP_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ConfigurationError("GREENGAP_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


@dataclass
class Population:
    """Struct-of-arrays view of ``len(self)`` firms; indexing yields a :class:`FirmDraw`."""

    delta_c: np.ndarray
    price: np.ndarray
    delta_q: np.ndarray
    r: np.ndarray
    n: np.ndarray
    b: np.ndarray
    level: np.ndarray
    gamma: float = 1.0

    def __len__(self):
        return self.delta_c.shape[0]

    def __getitem__(self, i):
        return FirmDraw(
            float(self.delta_c[i]),
            float(self.price[i]),
            float(self.delta_q[i]),
            float(self.r[i]),
            int(self.n[i]),
            int(self.b[i]),
            float(self.gamma),
            int(self.level[i]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def replace(self, **changes):
        kw = {f.name: getattr(self, f.name) for f in fields(self)}
        kw.update(changes)
        return Population(**kw)


def _draw_chunk(config, ids):
    seed = config.seed
    cols = {
        name: sample_many(config.distribution(name), seed, ids, FIELD_SLOTS[name])
        for name in ("delta_c", "price", "delta_q", "r", "n", "b")
    }
    # sums are indexed by whole years
    cols["n"] = np.maximum(np.rint(cols["n"]), 0).astype(np.int64)
    cols["b"] = np.rint(cols["b"]).astype(np.int64)
    cols["level"] = levels_from_uniform(uniforms(seed, ids, FIELD_SLOTS["level"]), config.ensemble)
    return cols


def draw_population(config, workers=None):
    """
    Draw ``config.trials`` firms.

    Firm ``i`` takes every parameter from stream ``i`` at a fixed slot, so the
    result is identical for any ``workers`` value.
    """
    trials = int(config.trials)
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise ConfigurationError("workers must be >= 1")
    ids = np.arange(trials, dtype=np.uint64)
    chunks = [c for c in np.array_split(ids, min(workers, trials)) if c.size]
    if len(chunks) == 1:
        parts = [_draw_chunk(config, chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(lambda c: _draw_chunk(config, c), chunks))
    cols = {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}

    for name in ("delta_c", "price", "delta_q", "r"):
        if np.any(cols[name] < 0):
            raise ConfigurationError(f"distribution for {name} produced negative values")
    if np.any((cols["b"] < 1) | (cols["b"] > 5)):
        raise ConfigurationError("payback thresholds must round to 1..5 years")
    return Population(gamma=float(config.gamma), **cols)


def level0_inputs(config):
    """Representative-firm inputs: the analytic mean of each distribution."""
    return {
        "delta_c": config.dist_delta_c.mean(),
        "price": config.dist_price.mean(),
        "delta_q": config.dist_delta_q.mean(),
        "r": config.dist_r.mean(),
        "n": int(round(config.dist_n.mean())),
    }


def evaluate(population, level, config):
    """Per-firm decision values of ``population`` under ``level`` (not L0)."""
    level = Level.parse(level)
    fy = config.first_year
    if level is Level.L1:
        return npv_level1(population, fy)
    if level is Level.L2:
        return npb_level2(population, fy)
    if level is Level.L3:
        return npb_level3(population, config.behavioural, fy)
    if level is Level.ENSEMBLE:
        values = np.empty(len(population))
        for k, fn in ((1, npv_level1), (2, npb_level2)):
            mask = population.level == k
            if mask.any():
                values[mask] = fn(_subset(population, mask), fy)
        mask = population.level == 3
        if mask.any():
            values[mask] = npb_level3(_subset(population, mask), config.behavioural, fy)
        return values
    raise ConfigurationError("level 0 is evaluated analytically; use simulate_level")


def _subset(population, mask):
    return population.replace(
        **{name: getattr(population, name)[mask] for name in ("delta_c", "price", "delta_q", "r", "n", "b", "level")}
    )


class Stats(NamedTuple):
    mean: float
    median: float
    min: float
    max: float
    std: float


@dataclass
class SimulationResult:
    """Implementation rate and value summary for one level."""

    level_tag: Level
    trials: int
    adopters: int
    implementation_rate: float
    stats: Stats
    values: Optional[np.ndarray] = None
    adopt_flags: Optional[np.ndarray] = None

    def to_dict(self):
        return {
            "level": self.level_tag.value,
            "trials": self.trials,
            "adopters": self.adopters,
            "implementation_rate": self.implementation_rate,
            "stats": self.stats._asdict(),
        }

    def write_values_csv(self, path):
        if self.values is None:
            raise StateError("per-firm values were not retained")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["firm", "value", "adopt"])
            for i, (v, a) in enumerate(zip(self.values, self.adopt_flags)):
                w.writerow([i, repr(float(v)), int(a)])


def summarize(values, level_tag, retain=True):
    values = np.asarray(values, dtype=float)
    adopt = values > 0.0
    adopters = int(adopt.sum())
    stats = Stats(
        float(values.mean()),
        float(np.median(values)),
        float(values.min()),
        float(values.max()),
        float(values.std()),
    )
    return SimulationResult(
        Level.parse(level_tag),
        int(values.size),
        adopters,
        adopters / values.size,
        stats,
        values if retain else None,
        adopt if retain else None,
    )


def simulate_level(config, level_tag, population=None, retain_values=None, workers=None):
    """
    Simulate one decision level over the population drawn from ``config``.

    L1-L3 evaluate every firm under that protocol regardless of its assigned
    level; ``Ensemble`` honours each firm's assignment. ``L0`` is the single
    representative firm built from distribution means. Pass ``population`` to
    reuse draws across levels or policies.
    """
    level = Level.parse(level_tag)
    if level is Level.L0:
        x = level0_inputs(config)
        value = npv_level0(x["delta_c"], x["price"], x["delta_q"], x["r"], x["n"], config.first_year)
        return summarize([value], level)
    if population is None:
        population = draw_population(config, workers)
    retain = len(population) <= RETAIN_LIMIT if retain_values is None else retain_values
    return summarize(evaluate(population, level, config), level, retain)


def simulate_all(config, levels=tuple(Level), retain_values=None, workers=None):
    """All requested levels on one shared population."""
    population = draw_population(config, workers)
    return {
        Level.parse(lv): simulate_level(config, lv, population, retain_values)
        for lv in levels
    }


def histogram(result, bin_count):
    """
    Equal-width bins over ``[min, max]`` of the retained values.

    Returns
    -------
    list of (lower, upper, count)
    """
    if result.values is None:
        raise StateError("histogram needs retained values; rerun with retain_values=True")
    if int(bin_count) < 1:
        raise ConfigurationError("bin_count must be >= 1")
    bin_count = int(bin_count)
    v = result.values
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        return [(lo, hi, int(v.size))] + [(hi, hi, 0)] * (bin_count - 1)
    counts, edges = np.histogram(v, bins=bin_count, range=(lo, hi))
    return [(float(edges[i]), float(edges[i + 1]), int(c)) for i, c in enumerate(counts)]


def results_to_json(results, path=None):
    payload = {"results": [r.to_dict() for r in results]}
    text = json.dumps(payload, indent=2) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
