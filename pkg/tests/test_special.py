import numpy as np
import pytest
from scipy import stats

from divemeta import special as S

PS = np.concatenate([[1e-12, 1e-8, 1e-4, 0.01], np.linspace(0.05, 0.95, 19), [0.99, 1 - 1e-4, 1 - 1e-8]])


@pytest.mark.parametrize("p", PS)
def test_norm_ppf_matches_scipy(p):
    assert S.norm_ppf(p) == pytest.approx(stats.norm.ppf(p), rel=1e-12, abs=1e-13)


@pytest.mark.parametrize("x", [-30.0, -8.0, -1.3, 0.0, 0.7, 5.0])
def test_norm_cdf_pdf(x):
    assert S.norm_cdf(x) == pytest.approx(stats.norm.cdf(x), rel=1e-12, abs=1e-300)
    assert S.norm_pdf(x) == pytest.approx(stats.norm.pdf(x), rel=1e-13)


@pytest.mark.parametrize("a", [0.05, 0.5, 1.0, 3.3, 40.0, 5000.0])
@pytest.mark.parametrize("p", [1e-6, 0.25, 0.5, 0.75, 0.999])
def test_gamma_ppf_matches_scipy(a, p):
    assert S.gamma_std_ppf(p, a) == pytest.approx(stats.gamma.ppf(p, a), rel=1e-10)


@pytest.mark.parametrize("a", [0.3, 2.0, 17.0])
@pytest.mark.parametrize("x", [0.01, 1.0, 5.0, 30.0])
def test_gammainc_and_pdf(a, x):
    assert S.gammainc_lower(a, x) == pytest.approx(stats.gamma.cdf(x, a), rel=1e-12, abs=1e-15)
    assert S.gamma_std_pdf(a, x) == pytest.approx(stats.gamma.pdf(x, a), rel=1e-12)


@pytest.mark.parametrize("df", [1.0, 2.0, 3.0, 7.0, 29.0, 500.0])
@pytest.mark.parametrize("p", [0.001, 0.025, 0.4, 0.5, 0.975, 0.9995])
def test_t_ppf_matches_scipy(df, p):
    q = S.t_ppf(p, df)
    assert q == pytest.approx(stats.t.ppf(p, df), rel=1e-9, abs=1e-12)
    assert S.t_cdf(q, df) == pytest.approx(p, rel=1e-12)


@pytest.mark.parametrize("df", [1.0, 4.0, 60.0])
@pytest.mark.parametrize("t", [-12.0, -1.0, 0.0, 2.5, 40.0])
def test_t_cdf_sf_pdf(df, t):
    assert S.t_cdf(t, df) == pytest.approx(stats.t.cdf(t, df), rel=1e-11)
    assert S.t_sf(t, df) == pytest.approx(stats.t.sf(t, df), rel=1e-11)
    assert S.t_pdf(t, df) == pytest.approx(stats.t.pdf(t, df), rel=1e-12)


def test_betainc_complement_consistent():
    for a, b, x in [(0.5, 3.0, 0.2), (4.0, 0.5, 0.9), (10.0, 10.0, 0.5)]:
        lo = S.betainc(a, b, x, 1 - x)
        hi = S.betainc(b, a, 1 - x, x)
        assert lo + hi == pytest.approx(1.0, abs=1e-14)
        assert lo == pytest.approx(stats.beta.cdf(x, a, b), rel=1e-12)
