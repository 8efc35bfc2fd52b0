import io

import numpy as np
import pytest

from capcorr import exceptions
from capcorr.services.ingest import BenchmarkMeta, ScoreMatrix, filter_complete, load_benchmark_meta, \
    load_score_table, load_score_text, orient, parse_benchmark_meta, standardize, validate_meta

LONG_TABLE = """model,benchmark,score
Qwen-1.5 0.5B Chat,MMLU,31.5
Qwen-1.5 0.5B Chat,WMDP,0.62
Mixtral 8x22B,MMLU,77.8
Mixtral 8x22B,WMDP,0.71
Llama-3 8B Instruct,MMLU,66.6
Llama-3 8B Instruct,WMDP,0.68
"""


def test_load_long_table():
    matrix = load_score_text(LONG_TABLE)
    assert matrix.models == ('Qwen-1.5 0.5B Chat', 'Mixtral 8x22B', 'Llama-3 8B Instruct')
    assert matrix.benchmarks == ('MMLU', 'WMDP')
    assert matrix.cells[1, 0] == 77.8
    assert matrix.is_complete()


def test_load_long_table_from_stream():
    matrix = load_score_table(io.BytesIO(LONG_TABLE.encode('utf-8')), 'long')
    assert matrix.shape == (3, 2)


def test_long_and_wide_layouts_agree(fixture_population):
    matrix = fixture_population.matrix
    long_matrix = load_score_text(matrix.to_long_csv(), 'long')
    wide_matrix = load_score_text(matrix.to_wide_csv(), 'wide')
    assert long_matrix == wide_matrix
    assert long_matrix == matrix
    assert long_matrix.shape == (26, 16)


def test_layout_detected_from_header(fixture_population):
    assert load_score_text(fixture_population.matrix.to_wide_csv()) == fixture_population.matrix


def test_wide_empty_cell_is_missing():
    matrix = load_score_text('model,a,b\nm1,1.0,\nm2,2.0,3.0\n')
    assert np.isnan(matrix.cells[0, 1])
    assert not matrix.is_complete()


def test_single_row_fails_min_models():
    with pytest.raises(exceptions.InputError):
        load_score_text('model,benchmark,score\nm1,b1,0.5\n')


def test_short_row_reports_line_number():
    with pytest.raises(exceptions.ReadScoreTableError) as e:
        load_score_text('model,benchmark,score\nm1,b1,0.5\nm2,b1\n')
    assert e.value.line == 3


def test_long_row_reports_line_number():
    with pytest.raises(exceptions.ReadScoreTableError) as e:
        load_score_text('model,benchmark,score\nm1,b1,0.5\nm2,b1,0.7,extra\n')
    assert e.value.line == 3


def test_duplicate_cell_rejected():
    with pytest.raises(exceptions.ReadScoreTableError) as e:
        load_score_text('model,benchmark,score\nm1,b1,0.5\nm2,b1,0.6\nm1,b1,0.7\n')
    assert e.value.line == 4
    assert 'line 2' in str(e.value)


def test_non_numeric_score_rejected():
    with pytest.raises(exceptions.ReadScoreTableError) as e:
        load_score_text('model,benchmark,score\nm1,b1,0.5\nm2,b1,high\n')
    assert e.value.line == 3


def test_bad_long_header_rejected():
    with pytest.raises(exceptions.ReadScoreTableError):
        load_score_text('name,benchmark,score\nm1,b1,0.5\nm2,b1,0.6\n', 'long')


def test_unknown_layout_rejected():
    with pytest.raises(exceptions.UnknownFormatError):
        load_score_text(LONG_TABLE, 'tall')


def test_orient_negates_lower_better():
    matrix = load_score_text(LONG_TABLE)
    meta = [BenchmarkMeta.create('MMLU', 'higher_better', 'capability', 'percent'),
            BenchmarkMeta.create('WMDP', 'lower_better', 'safety', 'accuracy')]
    oriented = orient(matrix, meta)
    assert oriented.cells[0, 1] == -0.62
    assert oriented.cells[0, 0] == 31.5
    assert oriented.negated == ('WMDP',)


def test_orient_twice_is_identity():
    matrix = load_score_text(LONG_TABLE)
    meta = [BenchmarkMeta.create('MMLU', 'higher_better', 'capability'),
            BenchmarkMeta.create('WMDP', 'lower_better', 'safety')]
    twice = orient(orient(matrix, meta), meta)
    assert twice == matrix
    assert twice.negated == ()


def test_orient_all_higher_better_is_identity():
    matrix = load_score_text(LONG_TABLE)
    meta = [BenchmarkMeta.create('MMLU', 'higher_better', 'capability'),
            BenchmarkMeta.create('WMDP', 'higher_better', 'safety')]
    assert orient(matrix, meta) == matrix


def test_orient_requires_metadata():
    matrix = load_score_text(LONG_TABLE)
    with pytest.raises(exceptions.ReadMetadataError):
        orient(matrix, [BenchmarkMeta.create('MMLU', 'higher_better', 'capability')])


def test_standardize_symmetric_column():
    matrix = ScoreMatrix(['m1', 'm2', 'm3'], ['b'], np.array([[1.0], [2.0], [3.0]]))
    standardized = standardize(matrix)
    np.testing.assert_allclose(standardized.values[:, 0], [-1.0, 0.0, 1.0], atol=1e-15)


def test_standardize_zero_variance_names_column():
    matrix = ScoreMatrix(['m1', 'm2', 'm3'], ['flat'], np.array([[10.0], [10.0], [10.0]]))
    with pytest.raises(exceptions.ZeroVarianceError) as e:
        standardize(matrix)
    assert e.value.column == 'flat'


def test_standardize_rejects_missing_cells():
    matrix = ScoreMatrix(['m1', 'm2', 'm3'], ['b'], np.array([[1.0], [np.nan], [3.0]]))
    with pytest.raises(exceptions.InputError):
        standardize(matrix)


def test_standardize_moments_and_inverse():
    rng = np.random.default_rng(7)
    cells = rng.normal(50.0, 12.0, size=(26, 12))
    matrix = ScoreMatrix([f'm{i}' for i in range(26)], [f'b{j}' for j in range(12)], cells)
    standardized = standardize(matrix)
    values = np.asarray(standardized.values)
    assert np.all(np.abs(values.mean(axis=0)) < 1e-10)
    assert np.all(np.abs(values.var(axis=0, ddof=1) - 1.0) < 1e-8)
    np.testing.assert_allclose(standardized.destandardize().cells, cells, rtol=0, atol=1e-12)


def test_standardize_invariant_under_positive_affine_maps():
    rng = np.random.default_rng(11)
    cells = rng.normal(size=(20, 4))
    transformed = cells.copy()
    transformed[:, 2] = 3.5 * transformed[:, 2] + 40.0
    models, benchmarks = [f'm{i}' for i in range(20)], ['a', 'b', 'c', 'd']
    left = standardize(ScoreMatrix(models, benchmarks, cells))
    right = standardize(ScoreMatrix(models, benchmarks, transformed))
    np.testing.assert_allclose(left.values, right.values, rtol=0, atol=1e-12)


def _scattered_missing_matrix():
    cells = np.arange(20, dtype=float).reshape(5, 4)
    cells[0, 1] = np.nan
    cells[2, 1] = np.nan
    cells[3, 3] = np.nan
    return ScoreMatrix(['m1', 'm2', 'm3', 'm4', 'm5'], ['a', 'b', 'c', 'd'], cells)


def test_filter_drop_models_removes_incomplete_rows():
    filtered = filter_complete(_scattered_missing_matrix(), 'drop_models')
    assert filtered.models == ('m2', 'm5')
    assert filtered.benchmarks == ('a', 'b', 'c', 'd')
    assert filtered.filter_report.dropped_models == ('m1', 'm3', 'm4')


def test_filter_drop_benchmarks_removes_incomplete_columns():
    filtered = filter_complete(_scattered_missing_matrix(), 'drop_benchmarks')
    assert filtered.models == ('m1', 'm2', 'm3', 'm4', 'm5')
    assert filtered.benchmarks == ('a', 'c')
    assert filtered.filter_report.dropped_benchmarks == ('b', 'd')


def test_filter_single_missing_cell():
    cells = np.ones((3, 2)) * np.array([[1.0], [2.0], [3.0]])
    cells[1, 0] = np.nan
    filtered = filter_complete(ScoreMatrix(['m1', 'm2', 'm3'], ['a', 'b'], cells), 'drop_models')
    assert filtered.models == ('m1', 'm3')


def test_filter_strict_rejects_missing_cells():
    with pytest.raises(exceptions.InputError):
        filter_complete(_scattered_missing_matrix(), 'strict')


@pytest.mark.parametrize('policy', ['strict', 'drop_models', 'drop_benchmarks'])
def test_filter_complete_matrix_unchanged(policy, fixture_population):
    filtered = filter_complete(fixture_population.matrix, policy)
    assert filtered == fixture_population.matrix


def test_filter_too_few_models_left():
    cells = np.array([[1.0, np.nan], [2.0, 3.0], [np.nan, 4.0]])
    with pytest.raises(exceptions.InputError):
        filter_complete(ScoreMatrix(['m1', 'm2', 'm3'], ['a', 'b'], cells), 'drop_models')


def test_filter_unknown_policy():
    with pytest.raises(exceptions.InputError):
        filter_complete(_scattered_missing_matrix(), 'impute')


def test_load_benchmark_meta():
    meta = load_benchmark_meta(io.BytesIO(b'[{"id": "MMLU", "direction": "higher_better", "role": "capability", '
                                          b'"unit": "percent"}]'))
    assert meta[0].id == 'MMLU'
    assert meta[0].is_capability
    assert not meta[0].lower_is_better


def test_benchmark_meta_requires_direction():
    with pytest.raises(exceptions.ReadMetadataError):
        parse_benchmark_meta([{'id': 'MMLU', 'role': 'capability'}])


def test_benchmark_meta_rejects_duplicates():
    entry = {'id': 'MMLU', 'direction': 'higher_better', 'role': 'capability'}
    with pytest.raises(exceptions.ReadMetadataError):
        parse_benchmark_meta([entry, dict(entry)])


def test_validate_meta_rejects_unknown_benchmarks():
    meta = [BenchmarkMeta.create('MMLU', 'higher_better', 'capability'),
            BenchmarkMeta.create('GPQA', 'higher_better', 'capability')]
    with pytest.raises(exceptions.ReadMetadataError):
        validate_meta(['MMLU'], meta)
