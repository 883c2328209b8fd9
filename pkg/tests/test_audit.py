import numpy as np
import pytest

from greengap.audit import AuditRecord, LiteratureBlock, calibrate, filter_outliers, load_csv, scale_to_median
from greengap.distributions import TruncatedNormal, Weibull, sample_many
from greengap.errors import CalibrationError, DataError, SchemaError

HEADER = "year,cost_usd,annual_kwh_saved,electricity_price_usd_per_kwh,implemented\n"


def rec(cost, kwh, price=0.07, implemented=False):
    return AuditRecord(cost, kwh, price, implemented, 2010)


def test_load_header_only(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text(HEADER)
    assert load_csv(p) == []


def test_load_one_row(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text(HEADER + "2011,8224.5,46050,0.07,TRUE\n")
    assert load_csv(p) == [AuditRecord(8224.5, 46050.0, 0.07, True, 2011)]


def test_missing_column(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("year,cost_usd,annual_kwh_saved,implemented\n2011,1,2,0\n")
    with pytest.raises(SchemaError, match="electricity_price_usd_per_kwh"):
        load_csv(p)


def test_bad_rows_are_reported_with_line_numbers(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text(HEADER + "2011,100,1000,0.07,1\n2011,abc,1000,0.07,0\n2012,100,1000,0.07,maybe\n")
    with pytest.raises(DataError, match="line 3"):
        load_csv(p)
    report = []
    records = load_csv(p, report=report)
    assert len(records) == 1
    assert report[0].startswith("line 3:") and "cost_usd" in report[0]
    assert report[1].startswith("line 4:")


def test_bundled_extract(audit_csv):
    records = load_csv(audit_csv)
    kept = filter_outliers(records)
    assert len(kept) == 275
    assert abs(np.mean([r.implemented for r in kept]) - 0.45) < 0.01


def test_filter_examples():
    zero = rec(0.0, 1000)
    typical = rec(0.07 * 1000 * 2.65, 1000)
    pricey = rec(0.07 * 1000 * 25, 1000)
    assert filter_outliers([zero, typical, pricey]) == [typical]
    clean = [rec(100, 1000), rec(200, 3000)]
    assert filter_outliers(clean) == clean
    once = filter_outliers([zero, typical, pricey, rec(5, 10)])
    assert filter_outliers(once) == once


def test_scale_identity_and_equal_kwh():
    same = [rec(100, 1000)] * 3
    ds = scale_to_median(same)
    assert np.allclose(ds.scaled_cost, 100) and np.allclose(ds.scaled_kwh, 1000)
    ds = scale_to_median([rec(10, 100), rec(30, 100)])
    assert list(ds.scaled_cost) == [10.0, 30.0]
    with pytest.raises(DataError):
        scale_to_median([rec(10, 100)])
    with pytest.raises(DataError):
        scale_to_median([rec(0, 100), rec(1, 100)])


def test_scaling_ratio_identity():
    records = [rec(c, q) for c, q in [(120, 900), (4000, 61000), (77, 150), (9000, 20000), (55, 5000)]]
    ds = scale_to_median(records)
    med_kwh = np.median([r.annual_kwh_saved for r in records])
    med_cost = np.median([r.cost for r in records])
    for r, sc, sk in zip(records, ds.scaled_cost, ds.scaled_kwh):
        expected = (r.cost / r.annual_kwh_saved) ** 2 * med_kwh / med_cost
        assert sc / sk == pytest.approx(expected, rel=1e-12)
    assert len(ds) == len(records)


def test_calibrate_round_trip_from_table_weibulls():
    n = 10_000
    cost = sample_many(Weibull(1.51, 11493.28), 1, np.arange(n))
    price = sample_many(Weibull(2.46, 0.08), 2, np.arange(n))
    kwh = sample_many(Weibull(1.34, 68426.27), 3, np.arange(n))

    class Direct:
        scaled_cost, scaled_kwh = cost, kwh

        def __len__(self):
            return n

    Direct.price = price
    cfg = calibrate(Direct())
    for got, (k, lam) in zip(
        (cfg.dist_delta_c, cfg.dist_price, cfg.dist_delta_q),
        ((1.51, 11493.28), (2.46, 0.08), (1.34, 68426.27)),
    ):
        assert abs(got.shape / k - 1) < 0.05 and abs(got.scale / lam - 1) < 0.05
    assert cfg.dist_n == TruncatedNormal(15.0, 3.0, 0.0)
    assert cfg.dist_n.to_dict() == {"kind": "truncated_normal", "mu": 15.0, "sigma": 3.0, "min": 0.0, "max": None}


def test_calibrate_sample_refit_round_trip(audit_csv):
    from greengap.distributions import fit_weibull_mle
    from greengap.engine import draw_population

    cfg = calibrate(scale_to_median(filter_outliers(load_csv(audit_csv))))
    pop = draw_population(cfg)
    for fitted, column in ((cfg.dist_delta_c, pop.delta_c), (cfg.dist_price, pop.price), (cfg.dist_delta_q, pop.delta_q)):
        k, lam = fit_weibull_mle(column)
        assert abs(k / fitted.shape - 1) < 0.07 and abs(lam / fitted.scale - 1) < 0.07


def test_calibrate_errors():
    with pytest.raises(CalibrationError):
        calibrate(None)
    ds = scale_to_median([rec(100, 1000)] * 12)
    with pytest.raises(CalibrationError, match="delta_c"):
        calibrate(ds, LiteratureBlock())
