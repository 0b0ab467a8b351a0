import math
import os
import pathlib

import numpy as np
import pytest
from scipy import stats

import trendshift as ts

DATA = pathlib.Path(
    os.environ.get("TRENDSHIFT_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data")
)
HADCRUT = DATA / "HadCRUT.5.0.1.0.analysis.summary_series.global.annual.csv"


@pytest.fixture(scope="module")
def hadcrut():
    return ts.load(str(HADCRUT), "hadcrut")


def test_load(hadcrut):
    assert hadcrut.start_year == 1850
    assert len(hadcrut) == 173
    assert hadcrut.slice(1970, 2022).start_year == 1970


def test_detect_continuous(hadcrut):
    spec = ts.ModelSpec("continuous", "piecewise_ar1", min_seg_len=10, max_m=5)
    fit = ts.detect(hadcrut.values, spec)
    assert [hadcrut.year_of(t) for t in fit.changepoints] == [1963]
    assert fit.objective == pytest.approx(-268.4019067057, abs=1e-7)
    assert fit.continuity_gap() < 1e-10


def test_search_matches_exhaustive():
    rng = np.random.default_rng(3)
    y = list(0.02 * np.arange(1, 31) + 0.1 * rng.standard_normal(30))
    spec = ts.ModelSpec("discontinuous", "piecewise_ar1", min_seg_len=5, max_m=3)
    taus, obj = ts.exhaustive_search(y, spec)
    fit = ts.detect(y, spec)
    assert fit.changepoints == taus
    assert fit.objective == obj


def test_slope_difference_statistic(hadcrut):
    s = hadcrut.slice(1970, 2022)
    t = ts.t_statistic(s.values, s.index_of(2012))
    assert t == pytest.approx(0.6368557445, abs=5e-8)  # profile-likelihood oracle
    tmax, k, _ = ts.t_max(s.values)
    assert tmax >= abs(t)
    assert ts.fixed_k_critical_value(54) == pytest.approx(stats.t.ppf(0.975, 51), rel=1e-10)


def test_ar_loglik_dense():
    rng = np.random.default_rng(1)
    phi, sigma, n = 0.6, 0.8, 25
    e = rng.standard_normal(n)
    idx = np.arange(n)
    cov = sigma**2 / (1 - phi**2) * phi ** np.abs(idx[:, None] - idx[None, :])
    _, logdet = np.linalg.slogdet(cov)
    dense = -0.5 * (n * math.log(2 * math.pi) + logdet + e @ np.linalg.solve(cov, e))
    assert ts.ar_loglik(list(e), [phi], sigma) == pytest.approx(dense, abs=1e-8)


def test_monte_carlo_is_thread_invariant():
    null = ts.null_preset("hadcrut", 54)
    a = ts.mc_null_quantile(null, 1000, seed=5, threads=1)
    b = ts.mc_null_quantile(null, 1000, seed=5, threads=3)
    assert a.q == b.q
    slope, pct, sd = ts.min_detectable_slope(null, 0.019, 43, 54, a.q)
    assert slope == pytest.approx(0.019 + a.q * sd)


def test_diagnostics():
    r = ts.shapiro_wilk([1, 2, 4])
    assert r.w == pytest.approx(0.9642857143, rel=1e-8)
    x = [math.sin(t * t) + 0.5 * math.sin(3 * t) for t in range(1, 61)]
    fg = ts.fisher_gallagher_test(x, 10, 0)
    assert fg.statistic == pytest.approx(19.577887693792, rel=1e-10)


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        ts.ModelSpec("sideways")
    with pytest.raises(ValueError):
        ts.ar_loglik([0.1, 0.2], [1.5], 1.0)
    with pytest.raises(ValueError):
        ts.parse("year,anomaly\n2000,0.1\n2002,0.2\n")
