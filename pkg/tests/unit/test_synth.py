import json

import numpy as np
import pytest

from capcorr import exceptions
from capcorr.services.ingest import orient, parse_benchmark_meta, standardize
from capcorr.services.pca import fit_capabilities_component
from capcorr.services.stats import flop_proxy, pearson, spearman
from capcorr.services.synth import SyntheticSpec, analytic_capability_correlation, analytic_expected_correlation, \
    analytic_expected_spearman, analytic_explained_variance, analytic_score_spearman, generate_population


def _resized(spec, n_models):
    data = spec.to_dict()
    data['n_models'] = n_models
    return SyntheticSpec(data)


def _score_spearman(population, safety_id):
    oriented = orient(population.matrix, population.meta)
    capability = oriented.select_benchmarks(population.spec.capability_ids)
    model = fit_capabilities_component(standardize(capability))
    return spearman(model.scores, oriented.column(safety_id).to_numpy())


def test_same_seed_same_population(fixture_spec):
    first, second = generate_population(fixture_spec, 7), generate_population(fixture_spec, 7)
    assert first.matrix == second.matrix
    assert first.truth_json() == second.truth_json()
    assert first.compute_csv() == second.compute_csv()
    assert generate_population(fixture_spec, 8).matrix != first.matrix


def test_seed_falls_back_to_spec(fixture_spec):
    assert generate_population(fixture_spec).seed == 20240601
    assert generate_population(fixture_spec).matrix == generate_population(fixture_spec, 20240601).matrix


def test_population_shape_and_metadata(fixture_population):
    matrix = fixture_population.matrix
    assert matrix.shape == (26, 16)
    assert matrix.models[0] == 'model_001'
    meta = parse_benchmark_meta(json.loads(fixture_population.meta_json()))
    by_id = {item.id: item for item in meta}
    assert by_id['wmdp_bio'].lower_is_better
    assert not by_id['wmdp_bio'].is_capability
    assert by_id['mmlu'].is_capability
    assert by_id['truthfulqa_mc1'].unit == 'percent accuracy'


def test_truth_record(fixture_population):
    truth = json.loads(fixture_population.truth_json())
    assert truth['bit_generator'] == 'PCG64'
    assert truth['seed'] == 20240601
    assert len(truth['latent']) == 26
    assert truth['expected_correlation']['wmdp_bio'] == 0.0
    assert abs(truth['capability_correlation'] - 0.744) < 1e-9


def test_degenerate_factor_model():
    spec = SyntheticSpec(dict(n_models=10, capability_loadings=[1.0, 1.0, 1.0],
                              safety_specs=[dict(id='copy', loading=1.0)], seed=3))
    population = generate_population(spec)
    cells = np.asarray(population.matrix.cells)
    np.testing.assert_allclose(cells[:, 1], cells[:, 0], rtol=0, atol=1e-12)
    np.testing.assert_allclose(cells[:, 3], cells[:, 0], rtol=0, atol=1e-12)
    model = fit_capabilities_component(standardize(population.matrix.select_benchmarks(spec.capability_ids)))
    assert abs(model.explained_variance_ratio - 1.0) < 1e-10
    assert analytic_expected_correlation(spec, 'copy') == 1.0
    assert abs(analytic_explained_variance(spec) - 1.0) < 1e-12


def test_analytic_expected_correlation_examples():
    spec = SyntheticSpec(dict(n_models=5, capability_loadings=[0.9, 0.9], seed=1, safety_specs=[
        dict(id='zero', loading=0.0, noise_sd=1.0),
        dict(id='partial', loading=0.6, noise_sd=0.8),
    ]))
    assert analytic_expected_correlation(spec, 'zero') == 0.0
    assert abs(analytic_expected_correlation(spec, 'partial') - 0.6) < 1e-12
    assert abs(analytic_expected_spearman(0.6) - 6.0 / np.pi * np.arcsin(0.3)) < 1e-12


def test_analytic_capability_targets(fixture_spec):
    assert abs(analytic_capability_correlation(fixture_spec) - 0.744) < 1e-9
    assert abs(analytic_explained_variance(fixture_spec) - (0.744 + 0.256 / 12)) < 1e-9


def test_null_safety_column_stays_low(fixture_spec):
    spec = _resized(fixture_spec, 50)
    low = sum(abs(_score_spearman(generate_population(spec, seed), 'wmdp_bio')) < 0.40 for seed in range(1000))
    assert low >= 950


@pytest.mark.parametrize('safety_id', ['truthfulqa_mc1', 'wmdp_bio', 'machiavelli', 'bbq_ambiguous'])
def test_capabilities_correlation_recovers_truth(fixture_spec, safety_id):
    spec = _resized(fixture_spec, 50)
    estimates = [_score_spearman(generate_population(spec, seed), safety_id) for seed in range(500)]
    assert abs(np.mean(estimates) - analytic_score_spearman(spec, safety_id)) < 0.05


@pytest.mark.parametrize('loading', [0.0, 0.3, 0.6, 0.9])
def test_capabilities_correlation_recovers_truth_across_loadings(fixture_spec, loading):
    data = fixture_spec.to_dict()
    data['n_models'] = 50
    data['safety_specs'] = [dict(id='safety', loading=loading, distinct_factor_weight=0.3)]
    spec = SyntheticSpec(data)
    estimates = [_score_spearman(generate_population(spec, seed), 'safety') for seed in range(500)]
    assert abs(np.mean(estimates) - analytic_score_spearman(spec, 'safety')) < 0.05


def test_estimates_converge_with_many_models(fixture_spec):
    spec = _resized(fixture_spec, 500)
    latent_errors, score_errors = [], []
    for seed in range(100):
        population = generate_population(spec, seed)
        column = orient(population.matrix, population.meta).column('truthfulqa_mc1').to_numpy()
        latent_errors.append(abs(pearson(population.latent.to_numpy(), column) -
                                 analytic_expected_correlation(spec, 'truthfulqa_mc1')))
        score_errors.append(abs(_score_spearman(population, 'truthfulqa_mc1') -
                                analytic_score_spearman(spec, 'truthfulqa_mc1')))
    assert np.mean(latent_errors) < 0.03
    assert np.mean(score_errors) < 0.03


def test_lower_better_columns_are_emitted_reversed():
    spec = SyntheticSpec(dict(n_models=400, capability_loadings=[0.9, 0.9, 0.9], seed=5, safety_specs=[
        dict(id='harm', loading=0.9, direction='lower_better', scale=10.0, offset=50.0)
    ]))
    population = generate_population(spec)
    raw = population.matrix.column('harm').to_numpy()
    assert pearson(population.latent.to_numpy(), raw) < -0.8
    assert abs(raw.mean() - 50.0) < 2.0


def test_compute_block_tracks_latent(fixture_population):
    compute = fixture_population.compute
    assert list(compute.columns) == ['params', 'train_tokens']
    assert (compute['params'] > 0).all()
    log_flop = np.log10(flop_proxy(compute['params'].to_numpy(), compute['train_tokens'].to_numpy()))
    assert pearson(fixture_population.latent.to_numpy(), log_flop) > 0.9
    assert fixture_population.compute_csv().startswith('model,params,train_tokens\n')


def test_no_compute_block():
    spec = SyntheticSpec(dict(n_models=6, capability_loadings=[0.5, 0.5], seed=1))
    population = generate_population(spec)
    assert population.compute is None
    assert population.compute_csv() is None


@pytest.mark.parametrize('data', [
    dict(n_models=4, capability_loadings=[0.5, 0.5], seed=1),
    dict(n_models=10, capability_loadings=[1.5, 0.5], seed=1),
    dict(n_models=10, capability_loadings=[0.5, 0.5], capability_ids=['a'], seed=1),
    dict(n_models=10, capability_loadings=[0.5, 0.5], capability_ids=['a', 'b'],
         safety_specs=[dict(id='a', loading=0.2)], seed=1),
    dict(n_models=10, capability_loadings=[0.5], safety_specs=[dict(id='s', loading=-1.5)], seed=1),
    dict(n_models=10, capability_loadings=[0.5], safety_specs=[dict(id='s', loading=0.5, scale=0.0)], seed=1),
])
def test_invalid_specs(data):
    with pytest.raises(exceptions.InvalidSyntheticSpecError):
        SyntheticSpec(data)


def test_seed_required():
    spec = SyntheticSpec(dict(n_models=10, capability_loadings=[0.5, 0.5]))
    with pytest.raises(exceptions.InvalidSyntheticSpecError):
        generate_population(spec)
