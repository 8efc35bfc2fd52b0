from __future__ import annotations

import json
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from capcorr import const
from capcorr import exceptions
from capcorr.services.ingest.meta import BenchmarkMeta


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=float, copy=True)
    values.setflags(write=False)
    return values


def normalize_policy(policy: str) -> str:
    policy = str(policy).strip().lower().replace('-', '_')
    if policy not in const.FILTER_POLICIES:
        raise exceptions.InputError(f'unknown missing-cell policy {policy!r}; '
                                    f'must be one of: {", ".join(const.FILTER_POLICIES)}')
    return policy


class FilterReport:

    def __init__(self, policy: str, dropped_models: Sequence[str] = (), dropped_benchmarks: Sequence[str] = ()):
        """What `filter_complete` removed to obtain a complete matrix
        Args:
            policy: The missing-cell policy that was applied
            dropped_models: Models removed because they had missing cells
            dropped_benchmarks: Benchmarks removed because they had missing cells
        """
        self.policy = policy
        self.dropped_models = tuple(dropped_models)
        self.dropped_benchmarks = tuple(dropped_benchmarks)

    def to_dict(self) -> Dict:
        return dict(policy=self.policy, dropped_models=list(self.dropped_models),
                    dropped_benchmarks=list(self.dropped_benchmarks))

    def __str__(self) -> str:
        return json.dumps(self.to_dict())


class ScoreMatrix:
    """
    A model x benchmark table of raw scores in benchmark-native units; missing cells are NaN
    """

    def __init__(self, models: Sequence[str], benchmarks: Sequence[str], cells: np.ndarray,
                 negated: Sequence[str] = (), filter_report: Optional[FilterReport] = None):
        """
        Args:
            models: Ordered, unique model identifiers
            benchmarks: Ordered, unique benchmark identifiers
            cells: A (models x benchmarks) array; NaN marks a missing cell
            negated: Benchmarks whose scores were negated by `orient`
            filter_report: Set when the matrix was produced by `filter_complete`
        """
        self.models = tuple(str(m) for m in models)
        self.benchmarks = tuple(str(b) for b in benchmarks)
        self.cells = _frozen(cells)
        self.negated = tuple(b for b in self.benchmarks if b in set(negated))
        self.filter_report = filter_report
        self._validate()

    def _validate(self) -> None:
        if len(set(self.models)) != len(self.models):
            raise exceptions.InputError('model identifiers must be unique')
        if len(set(self.benchmarks)) != len(self.benchmarks):
            raise exceptions.InputError('benchmark identifiers must be unique')
        if len(self.models) < const.MIN_MODELS:
            raise exceptions.InputError(f'a score matrix needs at least {const.MIN_MODELS} models, '
                                        f'got {len(self.models)}')
        if len(self.benchmarks) < const.MIN_BENCHMARKS:
            raise exceptions.InputError(f'a score matrix needs at least {const.MIN_BENCHMARKS} benchmark')
        if self.cells.shape != (len(self.models), len(self.benchmarks)):
            raise exceptions.InputError(f'cells have shape {self.cells.shape}, expected '
                                        f'{(len(self.models), len(self.benchmarks))}')
        if np.isinf(self.cells).any():
            raise exceptions.InputError('every present cell must be finite')

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> ScoreMatrix:
        """Build a matrix from a wide DataFrame indexed by model with one column per benchmark
        Args:
            frame: The wide DataFrame
        Returns:
            A `ScoreMatrix`
        """
        return cls(list(frame.index), list(frame.columns), frame.to_numpy(dtype=float))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.cells.shape

    @property
    def missing(self) -> np.ndarray:
        return np.isnan(self.cells)

    def is_complete(self) -> bool:
        return not self.missing.any()

    def benchmark_index(self, benchmark: str) -> int:
        try:
            return self.benchmarks.index(benchmark)
        except ValueError:
            raise exceptions.InputError(f'{benchmark!r} is not a benchmark of this matrix')

    def column(self, benchmark: str) -> pd.Series:
        """A single benchmark column
        Args:
            benchmark: The benchmark identifier
        Returns:
            A float Series indexed by model; missing cells are NaN
        """
        return pd.Series(self.cells[:, self.benchmark_index(benchmark)], index=list(self.models), name=benchmark)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(np.array(self.cells), index=list(self.models), columns=list(self.benchmarks))
        frame.index.name = const.WIDE_LAYOUT_MODEL_COLUMN
        return frame

    def select_benchmarks(self, benchmarks: Iterable[str]) -> ScoreMatrix:
        benchmarks = list(benchmarks)
        idx = [self.benchmark_index(b) for b in benchmarks]
        return ScoreMatrix(self.models, benchmarks, self.cells[:, idx], negated=self.negated,
                           filter_report=self.filter_report)

    def select_models(self, models: Iterable[str]) -> ScoreMatrix:
        models = list(models)
        lookup = {m: i for i, m in enumerate(self.models)}
        try:
            idx = [lookup[m] for m in models]
        except KeyError as e:
            raise exceptions.InputError(f'{e.args[0]!r} is not a model of this matrix')
        return ScoreMatrix(models, self.benchmarks, self.cells[idx, :], negated=self.negated,
                           filter_report=self.filter_report)

    def to_long_csv(self) -> str:
        """Render as `model,benchmark,score` rows; missing cells are omitted
        Returns:
            The CSV document
        """
        rows = [(model, benchmark, self.cells[i, j])
                for i, model in enumerate(self.models)
                for j, benchmark in enumerate(self.benchmarks)
                if not np.isnan(self.cells[i, j])]
        long_frame = pd.DataFrame(rows, columns=const.LONG_LAYOUT_HEADER)
        return long_frame.to_csv(index=False, lineterminator='\n')

    def to_wide_csv(self) -> str:
        """Render with one row per model and one column per benchmark; missing cells are empty
        Returns:
            The CSV document
        """
        return self.to_frame().to_csv(na_rep='', lineterminator='\n')

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScoreMatrix):
            return NotImplemented
        return (self.models == other.models and self.benchmarks == other.benchmarks and
                np.array_equal(self.cells, other.cells, equal_nan=True))

    def __repr__(self):
        return f'ScoreMatrix({len(self.models)} models x {len(self.benchmarks)} benchmarks)'


class StandardizedMatrix:
    """
    A complete matrix whose columns have sample mean 0 and sample variance 1, with the standardizer retained
    """

    def __init__(self, models: Sequence[str], benchmarks: Sequence[str], values: np.ndarray, means: np.ndarray,
                 stds: np.ndarray):
        self.models = tuple(models)
        self.benchmarks = tuple(benchmarks)
        self.values = _frozen(values)
        self.means = _frozen(means)
        self.stds = _frozen(stds)
        if np.isnan(self.values).any():
            raise exceptions.InputError('a standardized matrix cannot have missing cells')

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def select_benchmarks(self, benchmarks: Iterable[str]) -> StandardizedMatrix:
        benchmarks = list(benchmarks)
        try:
            idx = [self.benchmarks.index(b) for b in benchmarks]
        except ValueError as e:
            raise exceptions.InputError(str(e))
        return StandardizedMatrix(self.models, benchmarks, self.values[:, idx], self.means[idx], self.stds[idx])

    def destandardize(self) -> ScoreMatrix:
        """Invert the standardization
        Returns:
            The raw-unit `ScoreMatrix`
        """
        return ScoreMatrix(self.models, self.benchmarks, self.values * self.stds + self.means)

    def __repr__(self):
        return f'StandardizedMatrix({len(self.models)} models x {len(self.benchmarks)} benchmarks)'


def orient(matrix: ScoreMatrix, meta: List[BenchmarkMeta]) -> ScoreMatrix:
    """Negate lower_better columns so that every column reads "higher is better"
    Args:
        matrix: The raw score matrix
        meta: Metadata for (at least) every benchmark in the matrix
    Returns:
        The oriented `ScoreMatrix`; `negated` records the columns flipped relative to the raw scores
    """
    meta_map = {item.id: item for item in meta}
    missing = [b for b in matrix.benchmarks if b not in meta_map]
    if missing:
        raise exceptions.ReadMetadataError(f'no metadata for benchmark(s): {", ".join(missing)}')
    signs = np.array([-1.0 if meta_map[b].lower_is_better else 1.0 for b in matrix.benchmarks])
    flipped = {b for b in matrix.benchmarks if meta_map[b].lower_is_better}
    negated = set(matrix.negated).symmetric_difference(flipped)
    return ScoreMatrix(matrix.models, matrix.benchmarks, matrix.cells * signs, negated=negated,
                       filter_report=matrix.filter_report)


def filter_complete(matrix: ScoreMatrix, policy: str = const.DEFAULT_FILTER_POLICY) -> ScoreMatrix:
    """Remove missingness so the matrix can be standardized
    Args:
        matrix: The score matrix
        policy: strict (error on any missing cell), drop_models or drop_benchmarks
    Returns:
        A complete `ScoreMatrix` with a `FilterReport` attached
    """
    policy = normalize_policy(policy)
    missing = matrix.missing
    dropped_models, dropped_benchmarks = [], []
    if policy == 'strict':
        if missing.any():
            rows, cols = np.nonzero(missing)
            first = f'{matrix.models[rows[0]]}/{matrix.benchmarks[cols[0]]}'
            raise exceptions.InputError(f'{int(missing.sum())} missing cell(s) under the strict policy '
                                        f'(first: {first})')
        keep_models, keep_benchmarks = list(matrix.models), list(matrix.benchmarks)
    elif policy == 'drop_models':
        incomplete = missing.any(axis=1)
        dropped_models = [m for m, bad in zip(matrix.models, incomplete) if bad]
        keep_models = [m for m, bad in zip(matrix.models, incomplete) if not bad]
        keep_benchmarks = list(matrix.benchmarks)
    else:
        incomplete = missing.any(axis=0)
        dropped_benchmarks = [b for b, bad in zip(matrix.benchmarks, incomplete) if bad]
        keep_benchmarks = [b for b, bad in zip(matrix.benchmarks, incomplete) if not bad]
        keep_models = list(matrix.models)
    if len(keep_models) < const.MIN_MODELS or len(keep_benchmarks) < const.MIN_BENCHMARKS:
        raise exceptions.InputError(f'policy {policy} leaves {len(keep_models)} model(s) and '
                                    f'{len(keep_benchmarks)} benchmark(s); need at least {const.MIN_MODELS} and '
                                    f'{const.MIN_BENCHMARKS}')
    model_idx = [matrix.models.index(m) for m in keep_models]
    benchmark_idx = [matrix.benchmarks.index(b) for b in keep_benchmarks]
    return ScoreMatrix(keep_models, keep_benchmarks, matrix.cells[np.ix_(model_idx, benchmark_idx)],
                       negated=matrix.negated,
                       filter_report=FilterReport(policy, dropped_models, dropped_benchmarks))


def standardize(matrix: ScoreMatrix) -> StandardizedMatrix:
    """Standardize every column to sample mean 0 and sample (m - 1) variance 1
    Args:
        matrix: A complete score matrix
    Returns:
        A `StandardizedMatrix` retaining per-column means and standard deviations
    """
    if not matrix.is_complete():
        raise exceptions.InputError('standardize requires a complete matrix; apply filter_complete first')
    cells = np.asarray(matrix.cells)
    for j, benchmark in enumerate(matrix.benchmarks):
        if np.ptp(cells[:, j]) == 0:
            raise exceptions.ZeroVarianceError(benchmark)
    means = cells.mean(axis=0)
    stds = cells.std(axis=0, ddof=1)
    return StandardizedMatrix(matrix.models, matrix.benchmarks, (cells - means) / stds, means, stds)


def standardize_column(column: pd.Series) -> pd.Series:
    """Standardize one benchmark column, ignoring missing cells
    Args:
        column: Scores indexed by model
    Returns:
        The standardized column; missing cells stay NaN
    """
    present = column.dropna()
    if len(present) < 2 or np.ptp(present.to_numpy()) == 0:
        raise exceptions.ZeroVarianceError(str(column.name))
    return (column - present.mean()) / present.std(ddof=1)


def pair_columns(scores: pd.Series, column: pd.Series) -> Tuple[pd.Series, pd.Series, List[str]]:
    """Pairwise deletion over two model-indexed series
    Args:
        scores: Capabilities scores indexed by model
        column: Another per-model column; NaN marks a missing value
    Returns:
        The paired scores and column values, both sorted by ascending score (ties keep input order), and the models
        from either input without a complete pair
    """
    column_present = column.dropna()
    scores_present = scores.dropna()
    paired = [m for m in scores_present.index if m in column_present.index]
    paired_set, score_models = set(paired), set(scores.index)
    unpaired = [m for m in scores.index if m not in paired_set]
    unpaired += [m for m in column.index if m not in paired_set and m not in score_models]
    x = scores_present.loc[paired].sort_values(kind='mergesort')
    return x, column_present.loc[x.index], [str(m) for m in unpaired]
