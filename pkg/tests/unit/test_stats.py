import numpy as np
import pandas as pd
import pytest

from capcorr import exceptions
from capcorr.services.ingest import BenchmarkMeta, standardize
from capcorr.services.pca import component_correlations, fit_capabilities_component
from capcorr.services.report import BandThresholds
from capcorr.services.stats import bootstrap_ci, capabilities_correlation, compute_correlation, correlation_matrix, \
    flop_proxy, ols_fit, ols_slope, pearson, spearman
from capcorr.services.synth import generate_population


def _brute_force_ranks(values):
    values = list(values)
    ranks = []
    for v in values:
        less = sum(1 for w in values if w < v)
        equal = sum(1 for w in values if w == v)
        ranks.append(1 + less + (equal - 1) / 2.0)
    return np.array(ranks)


def _textbook_pearson(x, y):
    n = len(x)
    sx, sy = sum(x), sum(y)
    sxx, syy, sxy = sum(a * a for a in x), sum(b * b for b in y), sum(a * b for a, b in zip(x, y))
    return (n * sxy - sx * sy) / np.sqrt((n * sxx - sx ** 2) * (n * syy - sy ** 2))


def test_spearman_identity_and_reversal():
    assert spearman([1, 2, 3], [1, 2, 3]) == 1.0
    assert spearman([1, 2, 3], [3, 2, 1]) == -1.0


def test_spearman_with_ties():
    assert abs(spearman([1, 2, 2, 4], [1, 3, 2, 4]) - 0.9486832980505138) < 1e-12


@pytest.mark.parametrize('seed', range(20))
def test_spearman_matches_brute_force_average_ranks(seed):
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 6, size=15).astype(float)
    y = rng.integers(0, 4, size=15).astype(float)
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        pytest.skip('constant draw')
    expected = np.corrcoef(_brute_force_ranks(x), _brute_force_ranks(y))[0, 1]
    assert abs(spearman(x, y) - expected) < 1e-12


@pytest.mark.parametrize('seed', range(20))
def test_spearman_matches_classical_formula_without_ties(seed):
    rng = np.random.default_rng(seed)
    n = 26
    x, y = rng.permutation(n) + 1, rng.permutation(n) + 1
    classical = 1.0 - 6.0 * np.sum((x - y) ** 2) / (n * (n ** 2 - 1))
    assert abs(spearman(x.astype(float), y.astype(float)) - classical) < 1e-12


def test_spearman_invariant_under_increasing_transforms():
    rng = np.random.default_rng(3)
    x, y = rng.normal(size=26), rng.normal(size=26)
    rho = spearman(x, y)
    assert abs(spearman(np.exp(x), y ** 3) - rho) < 1e-12
    assert abs(spearman(4.0 * x + 9.0, y) - rho) < 1e-12
    assert abs(spearman(y, x) - rho) < 1e-12
    assert abs(spearman(-x, y) + rho) < 1e-12


def test_spearman_constant_vector_is_undefined():
    with pytest.raises(exceptions.UndefinedCorrelationError):
        spearman([1, 1, 1, 1], [1, 2, 3, 4])


def test_correlations_need_three_pairs():
    with pytest.raises(exceptions.InputError):
        spearman([1, 2, np.nan, 4], [1, 2, 3, np.nan])


def test_pairwise_deletion():
    assert spearman([1, 2, np.nan, 3, 4], [2, 4, 5, 6, np.nan]) == 1.0


def test_pearson_examples():
    x = np.array([0.5, 1.0, 2.5, 4.0, 7.0])
    assert abs(pearson(x, 2 * x + 1) - 1.0) < 1e-12
    assert abs(pearson(x, -x) + 1.0) < 1e-12


def test_pearson_matches_textbook_formula():
    rng = np.random.default_rng(26)
    x, y = rng.normal(size=26), rng.normal(size=26)
    assert abs(pearson(x, y) - _textbook_pearson(list(x), list(y))) < 1e-12


def test_ols_examples():
    x = np.array([-2.0, -1.0, 0.5, 1.0, 3.0])
    assert abs(ols_slope(x, 3 * x) - 3.0) < 1e-12
    assert ols_slope(x, np.full(5, 7.0)) == 0.0
    fit = ols_fit(x, 2 * x + 5)
    assert abs(fit.intercept - 5.0) < 1e-12
    assert fit.n == 5


def test_ols_recovers_noisy_slope():
    rng = np.random.default_rng(2024)
    x = np.linspace(-3.0, 3.0, 50)
    y = 2.5 * x + 1.0 + 0.5 * rng.normal(size=50)
    assert abs(ols_slope(x, y) - 2.5) < 0.2


def test_ols_slope_scales_with_response():
    rng = np.random.default_rng(5)
    x, y = rng.normal(size=30), rng.normal(size=30)
    assert abs(ols_slope(x, 7.5 * y + 3.0) - 7.5 * ols_slope(x, y)) < 1e-10


def test_ols_constant_regressor():
    with pytest.raises(exceptions.NumericError):
        ols_slope([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])


@pytest.mark.parametrize('constant', [[0.1] * 3, [0.7] * 26, [1e-3 / 3] * 5])
def test_constant_inexact_floats_are_degenerate(constant):
    other = np.arange(len(constant), dtype=float) ** 1.5
    with pytest.raises(exceptions.UndefinedCorrelationError):
        pearson(constant, other)
    with pytest.raises(exceptions.UndefinedCorrelationError):
        pearson(other, constant)
    with pytest.raises(exceptions.NumericError):
        ols_slope(constant, other)


@pytest.mark.parametrize('statistic', ['pearson', 'slope'])
def test_bootstrap_skips_constant_inexact_resamples(statistic):
    x = np.full(20, 0.1)
    x[0] = 0.7
    result = bootstrap_ci(statistic, x, np.arange(20.0), resamples=1000, seed=3)
    assert 200 < result.skipped < 500


def test_bootstrap_monotone_pairs():
    x = np.arange(1.0, 13.0)
    result = bootstrap_ci('spearman', x, x ** 3, resamples=1000, seed=1)
    assert result.interval == (1.0, 1.0)


def test_bootstrap_null_interval_contains_zero():
    x = np.arange(26, dtype=float)
    low, high = bootstrap_ci('spearman', x, (x - 12.5) ** 2, resamples=2000, seed=42).interval
    assert low < 0.0 < high


def test_bootstrap_is_deterministic_and_parallel_safe():
    rng = np.random.default_rng(9)
    x, y = rng.normal(size=26), rng.normal(size=26)
    first = bootstrap_ci('spearman', x, y, resamples=3500, seed=42)
    second = bootstrap_ci('spearman', x, y, resamples=3500, seed=42)
    threaded = bootstrap_ci('spearman', x, y, resamples=3500, seed=42, workers=4)
    assert first.interval == second.interval == threaded.interval
    other = bootstrap_ci('spearman', x, y, resamples=3500, seed=43)
    assert other.interval != first.interval


@pytest.mark.parametrize('statistic', ['pearson', 'slope'])
def test_bootstrap_other_statistics(statistic):
    rng = np.random.default_rng(12)
    x = rng.normal(size=40)
    y = 2.0 * x + 0.3 * rng.normal(size=40)
    low, high = bootstrap_ci(statistic, x, y, resamples=1000, seed=0).interval
    assert low <= high
    assert low > 0


def test_bootstrap_counts_degenerate_resamples():
    x = np.zeros(20)
    x[0] = 1.0
    result = bootstrap_ci('spearman', x, np.arange(20.0), resamples=1000, seed=3)
    assert 0 < result.skipped < 500


def test_bootstrap_too_many_degenerate_resamples():
    x, y = np.zeros(20), np.zeros(20)
    x[0], y[1] = 1.0, 1.0
    with pytest.raises(exceptions.BootstrapDegeneracyError):
        bootstrap_ci('spearman', x, y, resamples=1000, seed=3)


def test_bootstrap_preconditions():
    x = np.arange(10.0)
    with pytest.raises(exceptions.InputError):
        bootstrap_ci('spearman', x, x, resamples=999, seed=1)
    with pytest.raises(exceptions.InputError):
        bootstrap_ci('spearman', x, x, resamples=1000, seed=None)
    with pytest.raises(exceptions.InputError):
        bootstrap_ci('spearman', x[:4], x[:4], resamples=1000, seed=1)
    with pytest.raises(exceptions.InputError):
        bootstrap_ci('kendall', x, x, resamples=1000, seed=1)


def test_correlation_matrix_identical_and_negated_columns():
    column = [1.0, 3.0, 2.0, 5.0, 4.0]
    matrix = correlation_matrix(pd.DataFrame(dict(a=column, b=column)))
    np.testing.assert_array_equal(matrix.values, [[1.0, 1.0], [1.0, 1.0]])
    assert matrix.mean == 1.0
    negated = correlation_matrix(pd.DataFrame(dict(a=column, b=[-v for v in column])))
    assert negated.values[0, 1] == -1.0


def test_correlation_matrix_flags_sparse_pairs():
    frame = pd.DataFrame(dict(a=[1.0, 2.0, 3.0, 4.0], b=[2.0, 1.0, 4.0, 3.0], c=[1.0, np.nan, np.nan, 2.0]))
    matrix = correlation_matrix(frame)
    assert matrix.flagged_pairs == [('a', 'c'), ('b', 'c')]
    assert np.isnan(matrix.values[0, 2])
    assert matrix.mean == matrix.values[0, 1]
    assert matrix.to_dict()['values'][0][2] is None


def test_correlation_matrix_fixture_mean(fixture_spec):
    spearman_means, pearson_means = [], []
    for seed in range(200):
        capability = generate_population(fixture_spec, seed).matrix.select_benchmarks(fixture_spec.capability_ids)
        spearman_means.append(correlation_matrix(capability.to_frame()).mean)
        pearson_means.append(correlation_matrix(capability.to_frame(), 'pearson').mean)
    assert 0.69 <= np.mean(spearman_means) <= 0.79
    assert abs(np.mean(pearson_means) - 0.744) < 0.05


def _fixture_scores(population):
    capability = population.matrix.select_benchmarks(population.spec.capability_ids)
    return capability, fit_capabilities_component(standardize(capability))


def test_capabilities_correlation_of_a_capability_column(fixture_population):
    capability, model = _fixture_scores(fixture_population)
    meta = BenchmarkMeta.create('mmlu', 'higher_better', 'safety')
    result = capabilities_correlation(model.score_series(), capability.column('mmlu'), meta, resamples=1000, seed=1)
    assert abs(result.spearman_rho - component_correlations(model, capability)['mmlu']) < 1e-12
    assert result.band == 'High'
    assert result.n_pairs == 26
    low, high = result.bootstrap_ci
    assert low <= result.spearman_rho <= high


def test_capabilities_correlation_of_noise_is_low():
    rng = np.random.default_rng(0)
    models = [f'm{i}' for i in range(50)]
    meta = BenchmarkMeta.create('noise', 'higher_better', 'safety')
    low = 0
    for _ in range(1000):
        scores = pd.Series(rng.normal(size=50), index=models)
        noise = pd.Series(rng.normal(size=50), index=models)
        result = capabilities_correlation(scores, noise, meta, resamples=0)
        low += abs(result.spearman_rho) < 0.40
        assert result.bootstrap_ci is None
    assert low >= 950


def test_band_ignores_safety_units(fixture_population):
    capability, model = _fixture_scores(fixture_population)
    meta = BenchmarkMeta.create('truthfulqa_mc1', 'higher_better', 'safety', 'percent accuracy')
    column = fixture_population.matrix.column('truthfulqa_mc1')
    native = capabilities_correlation(model.score_series(), column, meta, resamples=0)
    rescaled = capabilities_correlation(model.score_series(), column / 100.0, meta, resamples=0)
    assert native.band == rescaled.band
    assert native.spearman_rho == rescaled.spearman_rho
    assert abs(rescaled.ols_slope - native.ols_slope / 100.0) < 1e-10
    assert abs(rescaled.standardized_slope - native.standardized_slope) < 1e-10


def test_capabilities_correlation_pairwise_deletion(fixture_population):
    _, model = _fixture_scores(fixture_population)
    column = fixture_population.matrix.column('truthfulqa_mc1').copy()
    column.iloc[[0, 3]] = np.nan
    meta = BenchmarkMeta.create('truthfulqa_mc1', 'higher_better', 'safety')
    result = capabilities_correlation(model.score_series(), column, meta, resamples=1000, seed=5,
                                      thresholds=BandThresholds.create(high=0.9))
    assert result.n_pairs == 24
    assert sorted(result.dropped_models) == sorted([column.index[0], column.index[3]])


def test_capabilities_correlation_needs_three_pairs():
    scores = pd.Series([1.0, 2.0, 3.0], index=['a', 'b', 'c'])
    column = pd.Series([1.0, np.nan, 2.0], index=['a', 'b', 'c'])
    with pytest.raises(exceptions.InputError):
        capabilities_correlation(scores, column, BenchmarkMeta.create('s', 'higher_better', 'safety'), resamples=0)


def test_flop_proxy():
    assert abs(flop_proxy(7e9, 2e12) - 8.4e22) <= 1e-12 * 8.4e22
    assert flop_proxy(1, 1) == 6.0
    with pytest.raises(exceptions.InputError):
        flop_proxy(0, 1e12)
    with pytest.raises(exceptions.InputError):
        flop_proxy(1e9, -5)


def test_compute_tracks_capabilities(fixture_population):
    _, model = _fixture_scores(fixture_population)
    result = compute_correlation(model.score_series(), fixture_population.compute)
    assert result.spearman_rho >= 0.9
    assert result.n_pairs == 26
    assert len(result.log10_flop) == 26
