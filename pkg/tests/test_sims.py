import math
import warnings

import numpy as np
import pytest

from ajel import ParameterError, chi2_df1_cdf
from ajel.sims import (CSV_COLUMNS, PWM_CHI2_THETA, Distribution, ExperimentSpec,
                       ks_distance_chi2_df1, preset_specs, results_to_csv,
                       run_experiment, sample_chi2_1, sample_exponential,
                       wilks_diagnostic)


def test_generators():
    rng = np.random.default_rng(1)
    x = sample_chi2_1(rng, 200_000)
    assert x.min() > 0 and x.mean() == pytest.approx(1.0, abs=0.015)
    e = sample_exponential(2.0, rng, 200_000)
    assert np.mean(e > math.log(2) / 2) == pytest.approx(0.5, abs=0.005)
    assert e.min() > 0
    with pytest.raises(ParameterError):
        sample_exponential(0.0, rng, 3)
    with pytest.raises(ParameterError):
        Distribution("cauchy")


def test_pwm_theta_constant():
    # E[X F(X)] for chi-square(1) by quadrature on the density
    from scipy.integrate import quad
    dens = lambda x: math.exp(-x / 2) / math.sqrt(2 * math.pi * x)
    val, _ = quad(lambda x: x * chi2_df1_cdf(x) * dens(x), 0, math.inf)
    assert PWM_CHI2_THETA == pytest.approx(val, abs=1e-8)


def _small_spec(**kw):
    base = dict(sizes=(15,), generators=(Distribution("normal", (0.0, 1.0)),),
                kernel="mean", theta_true=0.0, replications=60, seed=7)
    base.update(kw)
    return ExperimentSpec(**base)


def test_run_experiment_is_deterministic_across_workers():
    spec = _small_spec()
    a = run_experiment(spec, workers=1)
    b = run_experiment(spec, workers=3)
    assert a == b
    assert results_to_csv([a]) == results_to_csv([b])
    assert run_experiment(_small_spec(seed=8)) != a


def test_cell_bookkeeping():
    res = run_experiment(_small_spec())
    assert len(res.cells) == 4 and res.ordering_violations == 0
    for c in res.cells:
        p = c.covered / c.valid
        assert c.coverage_pct == 100 * p
        assert c.coverage_se_pct == 100 * math.sqrt(p * (1 - p) / c.valid)
        assert c.valid + c.failed == 60 and c.mean_length > 0
    for lv in (0.9, 0.95):
        assert res.cell("AJEL", lv).covered >= res.cell("JEL", lv).covered
        assert res.cell("AJEL", lv).failed == 0


def test_two_sample_spec_and_dict_round_trip():
    spec = preset_specs("table2", seed=3, quick=True)[0]
    assert spec.sizes == (10, 10) and spec.replications == 100
    assert ExperimentSpec.from_dict(spec.to_dict()) == spec
    x, y = spec.draw(5)
    assert len(x) == 10 and len(y) == 10
    np.testing.assert_array_equal(spec.draw(5)[1], y)
    with pytest.raises(ParameterError):
        preset_specs("table9")


def test_csv_layout():
    res = run_experiment(_small_spec(replications=10))
    lines = results_to_csv([res]).splitlines()
    assert lines[0].split(",") == CSV_COLUMNS
    assert len(lines) == 5


def test_ks_distance():
    assert ks_distance_chi2_df1([1e9]) == pytest.approx(1.0)
    q = np.array([chi2_df1_cdf(v) for v in (0.1, 1.0, 3.0)])
    assert ks_distance_chi2_df1([0.1, 1.0, 3.0]) == pytest.approx(
        max(np.max(np.arange(1, 4) / 3 - q), np.max(q - np.arange(3) / 3)))


def test_wilks_degenerate_warns():
    spec = _small_spec(generators=(Distribution("normal", (1.0, 0.0)),), theta_true=1.0,
                       replications=5)
    with pytest.warns(RuntimeWarning):
        ks, stats = wilks_diagnostic(spec)
    assert np.all(stats == 0.0) and ks == pytest.approx(1.0)


def test_wilks_pwm_statistics_finite():
    spec = preset_specs("table1", seed=1, quick=True)[0]
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        _, stats = wilks_diagnostic(spec)
    assert np.all(np.isfinite(stats)) and np.all(stats >= 0)
