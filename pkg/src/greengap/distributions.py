"""
Parametric distributions, counter-based random streams and Weibull fitting.

Every random draw in greengap is a pure function of ``(seed, stream_id, slot,
attempt)``: a 64-bit counter hash turns that tuple into a uniform variate,
which is then pushed through an inverse CDF. Firm ``i`` of a population uses
``stream_id = i`` and one fixed slot per sampled field, so results never
depend on chunking, ordering or the number of workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from scipy import special

from .errors import ConfigurationError, DataError, FitError, SamplingError

__all__ = [
    "Weibull",
    "TruncatedNormal",
    "PointMass",
    "EmpiricalDiscrete",
    "DistributionSpec",
    "SampleStream",
    "uniforms",
    "sample",
    "sample_many",
    "mean",
    "spec_from_dict",
    "spec_to_dict",
    "fit_weibull_mle",
    "Moments",
    "moment_diagnostics",
    "MAX_REJECTION_ATTEMPTS",
]

MAX_REJECTION_ATTEMPTS = 10_000

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_SLOT_MULT = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def _mix64(x):
    # splitmix64 finalizer; a bijection on uint64 with full avalanche
    x = x ^ (x >> np.uint64(30))
    x = x * _M1
    x = x ^ (x >> np.uint64(27))
    x = x * _M2
    return x ^ (x >> np.uint64(31))


def uniforms(seed, stream_ids, slot=0, attempt=0):
    """
    Uniform variates on the open interval (0, 1) from the counter hash.

    Parameters
    ----------
    seed : int
        64-bit unsigned master seed.
    stream_ids : int or array_like of int
        One independent stream per entry (one per firm).
    slot : int
        Which quantity of the stream is being drawn.
    attempt : int or array_like of int
        Rejection-sampling attempt counter.

    Returns
    -------
    ndarray of float64
        Same shape as ``np.broadcast(stream_ids, attempt)``.
    """
    with np.errstate(over="ignore"):
        key = _mix64(np.asarray(int(seed) & _MASK64, dtype=np.uint64) + _GOLDEN)
        ids = np.asarray(stream_ids, dtype=np.uint64)
        h = _mix64(key + ids * _GOLDEN)
        ctr = (np.uint64(int(slot) & 0xFFFFFFFF) << np.uint64(32)) | np.asarray(attempt, dtype=np.uint64)
        h = _mix64(h ^ (ctr * _SLOT_MULT + _GOLDEN))
        h = _mix64(h + key)
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)


@dataclass(frozen=True)
class SampleStream:
    """Handle on one deterministic substream (one per firm index)."""

    seed: int
    stream_id: int

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not 0 <= int(value) <= _MASK64:
                raise ConfigurationError(f"{name} must be a 64-bit unsigned integer, got {value}")

    def uniform(self, slot=0, attempt=0):
        return float(uniforms(self.seed, self.stream_id, slot, attempt))


def _finite(x):
    return x is not None and math.isfinite(x)


@dataclass(frozen=True)
class Weibull:
    """Two-parameter Weibull, ``F(x) = 1 - exp(-(x/scale)**shape)``."""

    shape: float
    scale: float

    kind = "weibull"

    def __post_init__(self):
        if not (self.shape > 0 and math.isfinite(self.shape)):
            raise ConfigurationError(f"Weibull shape must be positive, got {self.shape}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ConfigurationError(f"Weibull scale must be positive, got {self.scale}")

    def mean(self):
        return self.scale * math.gamma(1.0 + 1.0 / self.shape)

    def cdf(self, x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return -np.expm1(-((x / self.scale) ** self.shape))

    def ppf(self, u):
        return self.scale * (-np.log1p(-np.asarray(u, dtype=float))) ** (1.0 / self.shape)

    def to_dict(self):
        return {"kind": self.kind, "shape": self.shape, "scale": self.scale}


@dataclass(frozen=True)
class TruncatedNormal:
    """Normal(mu, sigma) conditioned on ``min <= x <= max``.

    Use ``-inf`` / ``inf`` for an open side. Sampling redraws out-of-range
    values instead of clamping them, so no mass piles up on the bounds.
    """

    mu: float
    sigma: float
    min: float = -math.inf
    max: float = math.inf

    kind = "truncated_normal"

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise ConfigurationError(f"mu must be finite, got {self.mu}")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ConfigurationError(f"sigma must be positive, got {self.sigma}")
        if not self.min < self.max:
            raise ConfigurationError(f"need min < max, got [{self.min}, {self.max}]")

    def _std_bounds(self):
        return (self.min - self.mu) / self.sigma, (self.max - self.mu) / self.sigma

    def mean(self):
        a, b = self._std_bounds()
        mass = special.ndtr(b) - special.ndtr(a)
        if mass <= 0:
            raise ConfigurationError("truncation interval carries no probability mass")
        pdf = lambda z: 0.0 if math.isinf(z) else math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
        return self.mu + self.sigma * (pdf(a) - pdf(b)) / mass

    def cdf(self, x):
        a, b = self._std_bounds()
        z = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        lo = special.ndtr(a)
        return np.clip((special.ndtr(z) - lo) / (special.ndtr(b) - lo), 0.0, 1.0)

    def to_dict(self):
        return {
            "kind": self.kind,
            "mu": self.mu,
            "sigma": self.sigma,
            "min": self.min if _finite(self.min) else None,
            "max": self.max if _finite(self.max) else None,
        }


@dataclass(frozen=True)
class PointMass:
    value: float

    kind = "point"

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ConfigurationError(f"point mass value must be finite, got {self.value}")

    def mean(self):
        return float(self.value)

    def to_dict(self):
        return {"kind": self.kind, "value": self.value}


@dataclass(frozen=True)
class EmpiricalDiscrete:
    """Finite support ``values`` with probabilities ``weights``."""

    values: tuple
    weights: tuple

    kind = "empirical"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if not self.values or len(self.values) != len(self.weights):
            raise ConfigurationError("empirical values and weights must be nonempty and equally long")
        if any(w < 0 for w in self.weights):
            raise ConfigurationError("empirical weights must be nonnegative")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ConfigurationError(f"empirical weights sum to {sum(self.weights)}, not 1")

    def mean(self):
        return float(np.dot(self.values, self.weights))

    def ppf(self, u):
        cum = np.cumsum(self.weights)
        idx = np.searchsorted(cum, np.asarray(u, dtype=float), side="right")
        return np.asarray(self.values)[np.minimum(idx, len(self.values) - 1)]

    def to_dict(self):
        return {"kind": self.kind, "values": list(self.values), "weights": list(self.weights)}


DistributionSpec = Union[Weibull, TruncatedNormal, PointMass, EmpiricalDiscrete]

_KINDS = {cls.kind: cls for cls in (Weibull, TruncatedNormal, PointMass, EmpiricalDiscrete)}


def spec_from_dict(data):
    """Build a distribution from its tagged JSON object."""
    try:
        kind = data["kind"]
        if kind == "weibull":
            return Weibull(float(data["shape"]), float(data["scale"]))
        if kind == "truncated_normal":
            lo, hi = data.get("min"), data.get("max")
            return TruncatedNormal(
                float(data["mu"]),
                float(data["sigma"]),
                -math.inf if lo is None else float(lo),
                math.inf if hi is None else float(hi),
            )
        if kind == "point":
            return PointMass(float(data["value"]))
        if kind == "empirical":
            return EmpiricalDiscrete(data["values"], data["weights"])
    except (KeyError, TypeError) as exc:
        raise ConfigurationError(f"malformed distribution object {data!r}: {exc}") from None
    raise ConfigurationError(f"unknown distribution kind {kind!r}; expected one of {sorted(_KINDS)}")


def spec_to_dict(spec):
    return spec.to_dict()


def mean(spec):
    """Analytic mean of ``spec``."""
    return spec.mean()


def _truncnorm_many(spec, seed, ids, slot):
    out = np.empty(ids.shape, dtype=float)
    pending = np.arange(ids.size)
    for attempt in range(MAX_REJECTION_ATTEMPTS):
        z = special.ndtri(uniforms(seed, ids[pending], slot, attempt))
        x = spec.mu + spec.sigma * z
        ok = (x >= spec.min) & (x <= spec.max)
        out[pending[ok]] = x[ok]
        pending = pending[~ok]
        if pending.size == 0:
            return out
    raise SamplingError(
        f"{pending.size} truncated-normal draws still outside [{spec.min}, {spec.max}] "
        f"after {MAX_REJECTION_ATTEMPTS} attempts"
    )


def sample_many(spec, seed, stream_ids, slot=0):
    """
    Draw one value per stream id.

    Parameters
    ----------
    spec : DistributionSpec
    seed : int
    stream_ids : array_like of int
    slot : int
        Field index inside each stream; different slots are independent.

    Returns
    -------
    ndarray of float64
    """
    ids = np.asarray(stream_ids, dtype=np.uint64).ravel()
    if isinstance(spec, PointMass):
        return np.full(ids.shape, float(spec.value))
    if isinstance(spec, TruncatedNormal):
        return _truncnorm_many(spec, seed, ids, slot)
    if isinstance(spec, (Weibull, EmpiricalDiscrete)):
        return np.asarray(spec.ppf(uniforms(seed, ids, slot)), dtype=float)
    raise ConfigurationError(f"not a distribution spec: {spec!r}")


def sample(spec, stream, slot=0):
    """One draw from ``spec`` on ``stream`` (see :func:`sample_many`)."""
    return float(sample_many(spec, stream.seed, [stream.stream_id], slot)[0])


def _profile_score(k, logx, mean_logx):
    # d/dk of the profile log-likelihood, divided by n; increasing in k
    w = np.exp(k * (logx - logx.max()))
    sw = w.sum()
    a = (w * logx).sum() / sw
    b = (w * logx * logx).sum() / sw
    return a - 1.0 / k - mean_logx, b - a * a + 1.0 / (k * k)


def fit_weibull_mle(samples, tol=1e-8, max_iter=200):
    """
    Maximum-likelihood (shape, scale) of a two-parameter Weibull.

    The shape solves the profile score equation
    ``sum(x**k log x) / sum(x**k) - 1/k - mean(log x) = 0`` with a bracketed
    Newton iteration that falls back to bisection whenever a Newton step leaves
    the bracket. The scale then follows in closed form.

    Raises
    ------
    DataError
        Fewer than 10 samples or a nonpositive sample.
    FitError
        Degenerate data or no convergence within ``max_iter`` iterations.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 10:
        raise DataError(f"need at least 10 samples for a Weibull fit, got {x.size}")
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise DataError("Weibull fit requires strictly positive finite samples")
    logx = np.log(x)
    mean_logx = logx.mean()
    if np.ptp(logx) < 1e-12 * max(1.0, abs(mean_logx)):
        raise FitError("all samples equal: the Weibull MLE shape diverges")

    lo, hi = 1e-3, 1.0
    if _profile_score(lo, logx, mean_logx)[0] > 0:
        raise FitError("profile score positive at shape=1e-3; data too dispersed to fit")
    grow = 0
    while _profile_score(hi, logx, mean_logx)[0] < 0:
        lo, hi = hi, hi * 2.0
        grow += 1
        if grow > 60:
            raise FitError("could not bracket the Weibull shape")

    k = 0.5 * (lo + hi)
    for _ in range(max_iter):
        g, dg = _profile_score(k, logx, mean_logx)
        if g < 0:
            lo = k
        else:
            hi = k
        step = g / dg if dg > 0 else math.inf
        k_new = k - step
        if not lo < k_new < hi:
            k_new = 0.5 * (lo + hi)
        if abs(k_new - k) < tol or hi - lo < tol:
            k = k_new
            break
        k = k_new
    else:
        raise FitError(f"Weibull shape did not converge in {max_iter} iterations")

    shift = logx.max()
    scale = math.exp(shift + math.log(np.mean(np.exp(k * (logx - shift)))) / k)
    return float(k), float(scale)


class Moments(NamedTuple):
    mean: float
    median: float
    min: float
    max: float
    std: float
    skewness: float
    kurtosis: float
    p95: float


def moment_diagnostics(samples):
    """
    Summary statistics used for the Cullen-Frey style diagnostics.

    ``std`` uses ``ddof=1``; ``skewness`` and ``kurtosis`` are the
    bias-corrected sample estimators (kurtosis is Pearson's, i.e. 3 for a
    normal). Both are NaN when the sample has no spread or too few points.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise DataError(f"need at least 2 samples, got {x.size}")
    n = x.size
    m = x.mean()
    d = x - m
    m2 = np.mean(d**2)
    std = math.sqrt(m2 * n / (n - 1))
    skew = kurt = math.nan
    if m2 > 0 and n >= 3:
        g1 = np.mean(d**3) / m2**1.5
        skew = float(g1 * math.sqrt(n * (n - 1)) / (n - 2))
    if m2 > 0 and n >= 4:
        g2 = np.mean(d**4) / m2**2 - 3.0
        kurt = float(((n + 1) * g2 + 6.0) * (n - 1) / ((n - 2) * (n - 3)) + 3.0)
    return Moments(
        float(m),
        float(np.median(x)),
        float(x.min()),
        float(x.max()),
        std,
        skew,
        kurt,
        float(np.percentile(x, 95)),
    )
