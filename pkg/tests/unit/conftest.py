import os

import pytest

from capcorr import utilities
from capcorr.services.synth import SyntheticSpec, generate_population, generate_prediction_log

DATA_DIRECTORY = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'data')


@pytest.fixture()
def fixture_spec_path():
    return os.path.join(DATA_DIRECTORY, 'fixture_spec.json')


@pytest.fixture()
def fixture_spec(fixture_spec_path):
    return SyntheticSpec.load(fixture_spec_path)


@pytest.fixture()
def fixture_population(fixture_spec):
    return generate_population(fixture_spec)


@pytest.fixture()
def analysis_workspace(tmp_path, fixture_population):
    # scores.csv, meta.json and compute.csv of the fixture population plus an output directory
    paths = dict(
        scores=str(tmp_path / 'scores.csv'),
        meta=str(tmp_path / 'meta.json'),
        compute=str(tmp_path / 'compute.csv'),
        out=str(tmp_path / 'out')
    )
    utilities.write_text_file(paths['scores'], fixture_population.matrix.to_long_csv())
    utilities.write_text_file(paths['meta'], fixture_population.meta_json())
    utilities.write_text_file(paths['compute'], fixture_population.compute_csv())
    return paths


@pytest.fixture()
def prediction_log_paths(tmp_path):
    log_dir = tmp_path / 'logs'
    utilities.makedirs(str(log_dir))
    paths = []
    for i, scale in enumerate((0.5, 1.0, 2.0)):
        log = generate_prediction_log(400, 4, scale=scale, seed=100 + i, name=f'model_{i}')
        path = str(log_dir / f'model_{i}.jsonl')
        utilities.write_text_file(path, log.to_jsonl())
        paths.append(path)
    return paths
