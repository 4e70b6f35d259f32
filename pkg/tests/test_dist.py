import math

import numpy as np
import pytest
from scipy import stats

from divemeta import dist
from divemeta.dist import Family
from divemeta.errors import InvalidParams, ProbabilityOutOfRange

FAMILIES = [
    Family.normal(5.0, 2.0),
    Family.lognormal(2.0, 1.0),
    Family.lognormal(3.0, 2.0),
    Family.weibull(0.7, 3.0),
    Family.weibull(4.0, 10.0),
    Family.gamma(0.5, 2.0),
    Family.gamma(30.0, 0.1),
    Family.skewnormal(5.0, 5.0, 5.0),
    Family.skewnormal(5.0, 10.0, 10.0),
    Family.skewnormal(0.0, 1.0, -3.0),
]
GRID = [1e-6, 0.001, 0.05, 0.25, 0.5, 0.75, 0.95, 0.999, 1 - 1e-6]

SCIPY = {
    "normal": lambda a, b: stats.norm(a, b),
    "lognormal": lambda a, b: stats.lognorm(b, scale=math.exp(a)),
    "weibull": lambda a, b: stats.weibull_min(a, scale=b),
    "gamma": lambda a, b: stats.gamma(a, scale=1 / b),
}


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f"{f.tag.value}{f.params}")
def test_quantile_cdf_round_trip(fam):
    for p in GRID:
        assert dist.cdf(fam, dist.quantile(fam, p)) == pytest.approx(p, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f"{f.tag.value}{f.params}")
def test_pdf_is_cdf_derivative(fam):
    for p in (0.1, 0.5, 0.9):
        x = dist.quantile(fam, p)
        h = 1e-5 * max(1.0, abs(x))
        fd = (dist.cdf(fam, x + h) - dist.cdf(fam, x - h)) / (2 * h)
        assert dist.pdf(fam, x) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("fam", [f for f in FAMILIES if f.tag.value in SCIPY], ids=str)
def test_against_scipy(fam):
    ref = SCIPY[fam.tag.value](*fam.params)
    for p in GRID:
        assert dist.quantile(fam, p) == pytest.approx(ref.ppf(p), rel=1e-10)
    x = ref.ppf(0.3)
    assert dist.pdf(fam, x) == pytest.approx(ref.pdf(x), rel=1e-11)


def test_skewnormal_against_scipy_and_shape_zero():
    fam = Family.skewnormal(1.0, 2.0, 4.0)
    ref = stats.skewnorm(4.0, loc=1.0, scale=2.0)
    for p in (0.01, 0.5, 0.99):
        assert dist.quantile(fam, p) == pytest.approx(ref.ppf(p), rel=1e-8)
    flat = Family.skewnormal(1.0, 2.0, 0.0)
    nrm = Family.normal(1.0, 2.0)
    for p in (0.1, 0.7):
        assert dist.quantile(flat, p) == pytest.approx(dist.quantile(nrm, p), rel=1e-12)


def test_skewnormal_medians():
    assert dist.median(Family.skewnormal(5, 5, 5)) == pytest.approx(8.3724, abs=1e-4)
    assert dist.median(Family.skewnormal(5, 10, 10)) == pytest.approx(11.7449, abs=1e-4)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f"{f.tag.value}{f.params}")
def test_sampler_matches_cdf(fam):
    x = dist.sample(fam, 20000, np.random.default_rng(11))
    if fam.tag.value in SCIPY:
        ref_cdf = SCIPY[fam.tag.value](*fam.params).cdf
    else:
        ref_cdf = np.vectorize(lambda v: dist.cdf(fam, v))
    assert stats.kstest(x, ref_cdf).statistic < 0.015
    iqr = dist.quantile(fam, 0.75) - dist.quantile(fam, 0.25)
    assert np.median(x) == pytest.approx(dist.median(fam), abs=0.05 * iqr)


def test_median_variance():
    assert dist.median_variance(Family.normal(0, 1), 100) == pytest.approx(math.pi / 200, rel=1e-12)
    # log-normal closed form: 2 pi sdlog^2 e^{2 meanlog} / (4 n)
    assert dist.median_variance(Family.lognormal(2, 1), 100) == pytest.approx(2 * math.pi * math.exp(4) / 400, rel=1e-12)


def test_invalid_inputs():
    with pytest.raises(InvalidParams):
        Family.normal(0, -1)
    with pytest.raises(InvalidParams):
        Family.gamma(1.0, 0.0)
    with pytest.raises(InvalidParams):
        Family("normal", (1.0,))
    with pytest.raises(ProbabilityOutOfRange):
        dist.quantile(Family.normal(0, 1), 1.0)
