import numpy as np
import pytest

from capcorr import exceptions
from capcorr.services.ingest import ScoreMatrix, standardize
from capcorr.services.pca import CapabilitiesModel, capabilities_scores, component_correlations, \
    fit_capabilities_component, orient_loadings, refit_subset
from capcorr.services.synth import generate_population


def _random_matrix(seed, m=30, b=12):
    rng = np.random.default_rng(seed)
    cells = rng.normal(size=(m, b)) + rng.normal(size=(m, 1))
    return ScoreMatrix([f'model_{i}' for i in range(m)], [f'bench_{j}' for j in range(b)], cells)


def _svd_oracle(values):
    u, s, vt = np.linalg.svd(values, full_matrices=False)
    loadings, scores = vt[0], u[:, 0] * s[0]
    if loadings.sum() < 0:
        loadings, scores = -loadings, -scores
    return loadings, scores, s[0] ** 2 / np.sum(s ** 2)


def _capability_columns(population):
    return population.matrix.select_benchmarks(population.spec.capability_ids)


@pytest.mark.parametrize('seed', range(100))
def test_fit_matches_svd_oracle(seed):
    standardized = standardize(_random_matrix(seed))
    model = fit_capabilities_component(standardized)
    loadings, scores, explained = _svd_oracle(np.asarray(standardized.values))
    np.testing.assert_allclose(model.loadings, loadings, rtol=0, atol=1e-8)
    np.testing.assert_allclose(model.scores, scores, rtol=0, atol=1e-8)
    assert abs(model.explained_variance_ratio - explained) < 1e-8
    assert abs(np.linalg.norm(model.loadings) - 1.0) < 1e-10
    assert model.loadings.sum() > 0
    assert 1.0 / 12 <= model.explained_variance_ratio <= 1.0


def test_identical_columns():
    column = np.array([1.0, 2.0, 4.0, 7.0, 11.0])
    matrix = ScoreMatrix(['a', 'b', 'c', 'd', 'e'], ['x', 'y'], np.column_stack([column, column]))
    model = fit_capabilities_component(standardize(matrix))
    np.testing.assert_allclose(model.loadings, [1 / np.sqrt(2), 1 / np.sqrt(2)], rtol=0, atol=1e-10)
    assert abs(model.explained_variance_ratio - 1.0) < 1e-10


def test_pairwise_identical_columns_explain_everything():
    column = np.array([3.0, 1.0, 4.0, 1.5, 9.0, 2.6])
    matrix = ScoreMatrix([f'm{i}' for i in range(6)], ['a', 'b', 'c'],
                         np.column_stack([column, 2 * column + 1, 0.5 * column]))
    model = fit_capabilities_component(standardize(matrix))
    assert abs(model.explained_variance_ratio - 1.0) < 1e-10


def test_fixture_explained_variance(fixture_spec):
    ratios = []
    for seed in range(50):
        population = generate_population(fixture_spec, seed)
        ratios.append(fit_capabilities_component(standardize(_capability_columns(population))).explained_variance_ratio)
    assert 0.72 <= np.mean(ratios) <= 0.80


def test_single_benchmark_projection_is_standardized_column():
    matrix = ScoreMatrix(['a', 'b', 'c', 'd'], ['only'], np.array([[1.0], [3.0], [2.0], [6.0]]))
    standardized = standardize(matrix)
    model = CapabilitiesModel(benchmarks=['only'], loadings=[1.0], explained_variance_ratio=1.0, eigenvalue=1.0,
                              column_means=standardized.means, column_stds=standardized.stds,
                              models=standardized.models, scores=standardized.values[:, 0])
    scores = capabilities_scores(model, standardized)
    np.testing.assert_array_equal(scores.to_numpy(), standardized.values[:, 0])


def test_fit_requires_two_benchmarks():
    matrix = ScoreMatrix(['a', 'b', 'c'], ['only'], np.array([[1.0], [2.0], [4.0]]))
    with pytest.raises(exceptions.InputError):
        fit_capabilities_component(standardize(matrix))


def test_fit_requires_three_models():
    matrix = ScoreMatrix(['a', 'b'], ['x', 'y'], np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(exceptions.InputError):
        fit_capabilities_component(standardize(matrix))


def test_projection_reproduces_stored_scores(fixture_population):
    capability = _capability_columns(fixture_population)
    standardized = standardize(capability)
    model = fit_capabilities_component(standardized)
    np.testing.assert_array_equal(capabilities_scores(model, standardized).to_numpy(), model.scores)
    np.testing.assert_allclose(model.project(capability).to_numpy(), model.scores, rtol=0, atol=1e-12)


def test_projection_rejects_mismatched_columns(fixture_population):
    standardized = standardize(_capability_columns(fixture_population))
    model = fit_capabilities_component(standardized)
    reordered = standardized.select_benchmarks(list(reversed(standardized.benchmarks)))
    with pytest.raises(exceptions.InputError):
        capabilities_scores(model, reordered)


def test_scores_invariant_under_positive_affine_maps(fixture_population):
    capability = _capability_columns(fixture_population)
    cells = np.array(capability.cells)
    cells[:, 0] = 100.0 * cells[:, 0] + 55.0
    cells[:, 5] = 0.01 * cells[:, 5] - 3.0
    transformed = ScoreMatrix(capability.models, capability.benchmarks, cells)
    left = fit_capabilities_component(standardize(capability))
    right = fit_capabilities_component(standardize(transformed))
    np.testing.assert_allclose(left.scores, right.scores, rtol=0, atol=1e-10)


def test_scores_follow_row_and_column_permutations(fixture_population):
    capability = _capability_columns(fixture_population)
    model = fit_capabilities_component(standardize(capability))
    models = list(reversed(capability.models))
    benchmarks = list(capability.benchmarks[3:]) + list(capability.benchmarks[:3])
    permuted = fit_capabilities_component(standardize(capability.select_models(models).select_benchmarks(benchmarks)))
    expected = model.score_series().loc[models].to_numpy()
    np.testing.assert_allclose(permuted.scores, expected, rtol=0, atol=1e-10)


def test_power_iteration_matches_eigh(fixture_population):
    standardized = standardize(_capability_columns(fixture_population))
    eigh = fit_capabilities_component(standardized, solver='eigh')
    power = fit_capabilities_component(standardized, solver='power')
    np.testing.assert_allclose(power.loadings, eigh.loadings, rtol=0, atol=1e-8)
    assert abs(power.explained_variance_ratio - eigh.explained_variance_ratio) < 1e-8
    assert power.solver == 'power'


def test_power_iteration_budget_exhausted(fixture_population):
    standardized = standardize(_capability_columns(fixture_population))
    with pytest.raises(exceptions.EigensolverConvergenceError):
        fit_capabilities_component(standardized, solver='power', max_iterations=1)


def test_unknown_solver(fixture_population):
    standardized = standardize(_capability_columns(fixture_population))
    with pytest.raises(exceptions.InputError):
        fit_capabilities_component(standardized, solver='lanczos')


def test_orient_loadings_sign_rules():
    np.testing.assert_array_equal(orient_loadings(np.array([-0.6, -0.8])), [0.6, 0.8])
    np.testing.assert_array_equal(orient_loadings(np.array([0.0, -0.6, 0.6])), [0.0, 0.6, -0.6])


def test_refit_without_exclusions_is_identical(fixture_population):
    capability = _capability_columns(fixture_population)
    assert refit_subset(capability) == fit_capabilities_component(standardize(capability))


def test_refit_subset_matches_oracle(fixture_population):
    capability = _capability_columns(fixture_population)
    model = refit_subset(capability, ['bbh', 'lambada'])
    assert model.excluded_benchmarks == ('bbh', 'lambada')
    assert 'bbh' not in model.benchmarks and len(model.benchmarks) == 10
    kept = [b for b in capability.benchmarks if b not in ('bbh', 'lambada')]
    loadings, scores, explained = _svd_oracle(np.asarray(standardize(capability.select_benchmarks(kept)).values))
    assert abs(model.explained_variance_ratio - explained) < 1e-8
    np.testing.assert_allclose(model.scores, scores, rtol=0, atol=1e-8)


def test_refit_subset_needs_two_columns(fixture_population):
    capability = _capability_columns(fixture_population)
    with pytest.raises(exceptions.InputError):
        refit_subset(capability, list(capability.benchmarks[1:]))


def test_refit_subset_unknown_benchmark(fixture_population):
    with pytest.raises(exceptions.InputError):
        refit_subset(_capability_columns(fixture_population), ['not_a_benchmark'])


def test_model_json_reload(tmp_path, fixture_population):
    model = refit_subset(_capability_columns(fixture_population), ['gpqa'])
    assert CapabilitiesModel.from_json(model.to_json()) == model
    path = tmp_path / 'capabilities.json'
    path.write_text(model.to_json())
    reloaded = CapabilitiesModel.load(str(path))
    np.testing.assert_array_equal(reloaded.scores, model.scores)
    assert reloaded.excluded_benchmarks == ('gpqa',)


def test_model_json_rejects_shape_mismatch(fixture_population):
    data = fit_capabilities_component(standardize(_capability_columns(fixture_population))).to_dict()
    data['loadings'] = data['loadings'][:-1]
    with pytest.raises(exceptions.InputError):
        CapabilitiesModel.from_dict(data)


def test_component_correlations(fixture_population):
    capability = _capability_columns(fixture_population)
    model = fit_capabilities_component(standardize(capability))
    correlations = component_correlations(model, capability)
    assert list(correlations) == list(model.benchmarks)
    assert all(0.0 < rho <= 1.0 for rho in correlations.values())
