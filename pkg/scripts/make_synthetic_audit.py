"""
Write the synthetic motor-audit extract shipped in ``greengap/data``.

The rows are NOT real audit data. They are a stratified (Latin hypercube)
sample whose columns follow piecewise log-normal quantile functions pinned to
published summary quantiles of whole-motor replacement recommendations
(min, median, 95th percentile, max). Cost per kWh is paired with project size
through a Gaussian copula with correlation ``PAIRING_CORRELATION``; the
pairing seed was picked so the median-scaled columns land near the published
medians. Six zero-cost or implausibly expensive rows are mixed in for the
outlier filter to remove, and exactly 124 of the 275 clean rows are flagged
as implemented.

Usage::

    python scripts/make_synthetic_audit.py [out.csv]
"""

import csv
import sys
from pathlib import Path

import numpy as np
from scipy.special import ndtri

SEED = 405
PAIRING_CORRELATION = -0.3
N_CLEAN = 275
N_IMPLEMENTED = 124

# min, median, 95th percentile, max
KWH_KNOTS = (999.0, 46_050.0, 708_940.0, 5_645_400.0)
COST_PER_KWH_KNOTS = (0.03, 0.19, 0.54, 0.79)
PRICE_KNOTS = (0.020, 0.070, 0.130, 0.220)

OUTLIERS = [
    [2009, 0.0, 25_000.0, 0.065, 0],
    [2010, 0.0, 61_200.0, 0.081, 1],
    [2011, 0.0, 8_900.0, 0.052, 0],
    [2012, 0.0, 143_000.0, 0.072, 0],
    [2010, 2_450_000.0, 31_000.0, 0.069, 0],
    [2013, 980_000.0, 12_500.0, 0.090, 0],
]


def quantile(knots, u, n=N_CLEAN):
    z_knots = [ndtri(0.5 / n), 0.0, ndtri(0.95), ndtri(1 - 0.5 / n)]
    return np.exp(np.interp(ndtri(u), z_knots, np.log(knots)))


def build_rows():
    rng = np.random.default_rng(SEED)
    u = (np.arange(N_CLEAN) + 0.5) / N_CLEAN
    kwh = quantile(KWH_KNOTS, u)
    a = PAIRING_CORRELATION
    latent = a * ndtri(u) + np.sqrt(1 - a * a) * rng.standard_normal(N_CLEAN)
    cost_per_kwh = np.empty(N_CLEAN)
    cost_per_kwh[np.argsort(latent)] = quantile(COST_PER_KWH_KNOTS, u)
    price = quantile(PRICE_KNOTS, rng.permutation(u))
    cost = cost_per_kwh * kwh
    assert (cost / (price * kwh)).max() < 20

    order = rng.permutation(N_CLEAN)
    years = rng.integers(2008, 2014, N_CLEAN)
    implemented = np.zeros(N_CLEAN, dtype=int)
    implemented[rng.choice(N_CLEAN, N_IMPLEMENTED, replace=False)] = 1
    rows = [
        [int(years[j]), round(float(cost[i]), 2), round(float(kwh[i]), 1), round(float(price[i]), 4), int(implemented[j])]
        for j, i in enumerate(order)
    ]
    for k, row in enumerate(OUTLIERS):
        rows.insert(17 + 41 * k, row)
    return rows


def main(out):
    rows = build_rows()
    with open(out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["year", "cost_usd", "annual_kwh_saved", "electricity_price_usd_per_kwh", "implemented"])
        w.writerows(rows)
    print(f"wrote {len(rows)} rows to {out}")


if __name__ == "__main__":
    default = Path(__file__).resolve().parents[1] / "src" / "greengap" / "data" / "motor_audits_synthetic.csv"
    main(sys.argv[1] if len(sys.argv) > 1 else default)
