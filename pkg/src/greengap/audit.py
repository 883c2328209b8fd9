"""
Energy-audit records: CSV ingestion, outlier filtering, median scaling and
calibration.

Input schema (UTF-8, comma separated, header required)::

    year,cost_usd,annual_kwh_saved,electricity_price_usd_per_kwh,implemented

``implemented`` accepts ``0``/``1``/``true``/``false`` (any case).
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_SEED, CalibrationConfig
from .decision import BehaviouralConstants, EnsembleWeights
from .distributions import TruncatedNormal, Weibull, fit_weibull_mle, moment_diagnostics
from .errors import CalibrationError, DataError, FitError, SchemaError

__all__ = [
    "COLUMNS",
    "AuditRecord",
    "ScaledDataset",
    "LiteratureBlock",
    "load_csv",
    "filter_outliers",
    "scale_to_median",
    "calibrate",
    "summary_rows",
]

log = logging.getLogger(__name__)

COLUMNS = ("year", "cost_usd", "annual_kwh_saved", "electricity_price_usd_per_kwh", "implemented")

_BOOL = {"1": True, "0": False, "true": True, "false": False}


@dataclass(frozen=True)
class AuditRecord:
    cost: float
    annual_kwh_saved: float
    price: float
    implemented: bool
    year: int

    def __post_init__(self):
        if not (self.price > 0 and math.isfinite(self.price)):
            raise DataError(f"price must be positive, got {self.price}")
        if not (self.annual_kwh_saved > 0 and math.isfinite(self.annual_kwh_saved)):
            raise DataError(f"annual kWh saved must be positive, got {self.annual_kwh_saved}")
        if not (self.cost >= 0 and math.isfinite(self.cost)):
            raise DataError(f"cost must be nonnegative, got {self.cost}")

    @property
    def payback_years(self):
        return self.cost / (self.price * self.annual_kwh_saved)


def load_csv(path, report=None):
    """
    Parse an audit extract.

    Parameters
    ----------
    path : str or path-like
    report : list, optional
        Receives one ``"line N: message"`` string per malformed row. Without
        it, any malformed row raises :class:`DataError` listing all of them.

    Returns
    -------
    list of AuditRecord
        Well-formed rows in file order.
    """
    records, problems = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: missing header row")
        header = [h.strip() for h in reader.fieldnames]
        missing = [c for c in COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing required column(s) {', '.join(missing)}")
        reader.fieldnames = header
        for row in reader:
            line = reader.line_num
            try:
                flag = row["implemented"].strip().lower()
                if flag not in _BOOL:
                    raise DataError(f"implemented={row['implemented']!r} is not one of 0/1/true/false")
                records.append(
                    AuditRecord(
                        cost=_number(row, "cost_usd"),
                        annual_kwh_saved=_number(row, "annual_kwh_saved"),
                        price=_number(row, "electricity_price_usd_per_kwh"),
                        implemented=_BOOL[flag],
                        year=int(_number(row, "year")),
                    )
                )
            except (DataError, AttributeError) as exc:
                problems.append(f"line {line}: {exc}")
    if problems:
        if report is None:
            raise DataError(f"{path}: {len(problems)} malformed row(s)\n" + "\n".join(problems))
        report.extend(problems)
    return records


def _number(row, column):
    text = row[column]
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise DataError(f"column {column}: cannot parse {text!r} as a number") from None
    if not math.isfinite(value):
        raise DataError(f"column {column}: non-finite value {text!r}")
    return value


def filter_outliers(records, min_cost=1.0, max_payback_years=20.0):
    """Drop zero-cost rows and rows whose simple payback exceeds ``max_payback_years``."""
    if not (min_cost > 0 and max_payback_years > 0):
        raise DataError("filter thresholds must be positive")
    kept = [r for r in records if r.cost >= min_cost and r.payback_years <= max_payback_years]
    log.info("filter_outliers kept %d of %d records", len(kept), len(records))
    return kept


@dataclass
class ScaledDataset:
    """Audit columns rescaled to the median project.

    ``summary`` maps column name to :class:`~greengap.distributions.Moments`
    for the absolute, relative and median-scaled columns.
    """

    scaled_cost: np.ndarray
    scaled_kwh: np.ndarray
    price: np.ndarray
    observed_rate: float
    summary: dict = field(default_factory=dict)

    def __len__(self):
        return self.scaled_cost.size


def scale_to_median(records):
    """
    Relative values scaled to the median project.

    ``scaled_cost = cost / kwh * median(kwh)`` and ``scaled_kwh = kwh / cost *
    median(cost)``; prices pass through.
    """
    if len(records) < 2:
        raise DataError(f"need at least 2 records to scale, got {len(records)}")
    cost = np.array([r.cost for r in records], dtype=float)
    kwh = np.array([r.annual_kwh_saved for r in records], dtype=float)
    price = np.array([r.price for r in records], dtype=float)
    if np.any(cost <= 0) or np.any(kwh <= 0):
        raise DataError("zero cost or savings in scaling input; run filter_outliers first")
    cost_per_kwh = cost / kwh
    kwh_per_cost = kwh / cost
    scaled_cost = cost_per_kwh * np.median(kwh)
    scaled_kwh = kwh_per_cost * np.median(cost)
    columns = {
        "cost": cost,
        "annual_kwh_saved": kwh,
        "price": price,
        "annual_benefit": price * kwh,
        "payback_years": cost / (price * kwh),
        "cost_per_kwh": cost_per_kwh,
        "kwh_per_cost": kwh_per_cost,
        "scaled_cost": scaled_cost,
        "scaled_kwh": scaled_kwh,
    }
    return ScaledDataset(
        scaled_cost,
        scaled_kwh,
        price,
        float(np.mean([r.implemented for r in records])),
        {name: moment_diagnostics(col) for name, col in columns.items()},
    )


def summary_rows(dataset):
    """Table rows ``(column, mean, median, min, p95, max, std)`` for CSV output."""
    return [
        (name, m.mean, m.median, m.min, m.p95, m.max, m.std)
        for name, m in dataset.summary.items()
    ]


@dataclass(frozen=True)
class LiteratureBlock:
    """Calibration inputs taken from the literature rather than the audit data."""

    r: object = TruncatedNormal(0.08, 0.03, 0.0)
    n: object = TruncatedNormal(15.0, 3.0, 0.0)
    b: object = TruncatedNormal(2.0, 1.0, 1.0, 5.0)
    behavioural: BehaviouralConstants = field(default_factory=BehaviouralConstants)
    ensemble: EnsembleWeights = field(default_factory=EnsembleWeights)


def calibrate(dataset, literature=LiteratureBlock(), trials=10_000, seed=DEFAULT_SEED):
    """Weibull MLE fits for cost, price and savings plus the literature block."""
    if dataset is None or len(dataset) == 0:
        raise CalibrationError("cannot calibrate from an empty dataset")
    fitted = {}
    for name, column in (("delta_c", dataset.scaled_cost), ("price", dataset.price), ("delta_q", dataset.scaled_kwh)):
        try:
            fitted[name] = Weibull(*fit_weibull_mle(column))
        except (FitError, DataError) as exc:
            raise CalibrationError(f"Weibull fit failed for column {name}: {exc}") from exc
    return CalibrationConfig(
        dist_delta_c=fitted["delta_c"],
        dist_price=fitted["price"],
        dist_delta_q=fitted["delta_q"],
        dist_r=literature.r,
        dist_n=literature.n,
        dist_b=literature.b,
        behavioural=literature.behavioural,
        ensemble=literature.ensemble,
        trials=trials,
        seed=seed,
    )
