from __future__ import annotations

import json
from typing import Dict, Iterable, Optional, Tuple, Union

import numpy as np
import pandas as pd

from capcorr import const
from capcorr import exceptions
from capcorr import utilities
from capcorr.services.base import schemas
from capcorr.services.ingest.matrix import ScoreMatrix, StandardizedMatrix, standardize
from capcorr.services.stats.correlation import spearman


class CapabilitiesModel:
    """
    The fitted capabilities component: the standardizer, the unit PC1 loadings and the per-model scores
    """

    def __init__(self, benchmarks, loadings, explained_variance_ratio: float, eigenvalue: float, column_means,
                 column_stds, models, scores, excluded_benchmarks=(), solver: str = const.DEFAULT_EIGENSOLVER):
        self.benchmarks = tuple(benchmarks)
        self.loadings = np.asarray(loadings, dtype=float)
        self.explained_variance_ratio = float(explained_variance_ratio)
        self.eigenvalue = float(eigenvalue)
        self.column_means = np.asarray(column_means, dtype=float)
        self.column_stds = np.asarray(column_stds, dtype=float)
        self.models = tuple(models)
        self.scores = np.asarray(scores, dtype=float)
        self.excluded_benchmarks = tuple(excluded_benchmarks)
        self.solver = solver
        for array in (self.loadings, self.column_means, self.column_stds, self.scores):
            array.setflags(write=False)

    def score_series(self) -> pd.Series:
        return pd.Series(np.array(self.scores), index=list(self.models), name='capabilities_score')

    def project(self, matrix: ScoreMatrix) -> pd.Series:
        """Place models on this capabilities scale using the stored standardizer
        Args:
            matrix: Oriented raw scores holding (at least) every fitted benchmark; those columns must be complete
        Returns:
            Capabilities scores indexed by model
        """
        sub = matrix.select_benchmarks(self.benchmarks)
        if not sub.is_complete():
            raise exceptions.InputError('cannot project models with missing capability scores')
        z = (np.asarray(sub.cells) - self.column_means) / self.column_stds
        return pd.Series(z @ self.loadings, index=list(sub.models), name='capabilities_score')

    def to_dict(self) -> Dict:
        return dict(
            benchmarks=list(self.benchmarks),
            loadings=[float(v) for v in self.loadings],
            explained_variance_ratio=self.explained_variance_ratio,
            eigenvalue=self.eigenvalue,
            column_means=[float(v) for v in self.column_means],
            column_stds=[float(v) for v in self.column_stds],
            models=list(self.models),
            scores=[float(v) for v in self.scores],
            excluded_benchmarks=list(self.excluded_benchmarks),
            solver=self.solver
        )

    @classmethod
    def from_dict(cls, data: Dict, source: Optional[str] = '<capabilities model>') -> CapabilitiesModel:
        data = schemas.load_or_raise(schemas.CapabilitiesModelSchema(), data, exceptions.InputError, source)
        return cls(**data)

    def to_json(self) -> str:
        return utilities.dumps_json(self.to_dict())

    @classmethod
    def from_json(cls, text: str, source: Optional[str] = '<capabilities model>') -> CapabilitiesModel:
        try:
            return cls.from_dict(json.loads(text), source=source)
        except ValueError as e:
            raise exceptions.InputError(f'{source} is not valid JSON; {e}')

    @classmethod
    def load(cls, path: str) -> CapabilitiesModel:
        return cls.from_dict(utilities.load_json_file(path), source=path)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CapabilitiesModel):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self):
        return (f'CapabilitiesModel({len(self.benchmarks)} benchmarks, {len(self.models)} models, '
                f'evr={self.explained_variance_ratio:.4f})')


def orient_loadings(loadings: np.ndarray, tolerance: float = const.LOADING_SUM_ZERO_TOLERANCE) -> np.ndarray:
    """Fix the sign of a unit eigenvector: positive sum, or when the sum is zero, a positive first nonzero entry
    Args:
        loadings: The eigenvector
        tolerance: Magnitude below which a sum or entry counts as zero
    Returns:
        The eigenvector or its negation
    """
    total = loadings.sum()
    if abs(total) > tolerance:
        return loadings if total > 0 else -loadings
    for value in loadings:
        if abs(value) > tolerance:
            return loadings if value > 0 else -loadings
    return loadings


def _leading_eigh(correlation: np.ndarray) -> Tuple[float, np.ndarray]:
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(correlation)
    except np.linalg.LinAlgError as e:
        raise exceptions.EigensolverConvergenceError(str(e))
    return float(eigenvalues[-1]), eigenvectors[:, -1]


def _leading_power(correlation: np.ndarray, max_iterations: int, tolerance: float,
                   seed: int) -> Tuple[float, np.ndarray]:
    rng = np.random.default_rng(seed)
    n = correlation.shape[0]
    x = rng.normal(size=n)
    x /= np.linalg.norm(x)
    for _ in range(max_iterations):
        y = correlation @ x
        y_norm = np.linalg.norm(y)
        if y_norm == 0:
            x = rng.normal(size=n)
            x /= np.linalg.norm(x)
            continue
        x = y / y_norm
        eigenvalue = float(x @ correlation @ x)
        residual = np.linalg.norm(correlation @ x - eigenvalue * x)
        if residual <= tolerance * max(1.0, abs(eigenvalue)):
            return eigenvalue, x
    raise exceptions.EigensolverConvergenceError(f'power iteration exceeded {max_iterations} iterations '
                                                 f'(tolerance {tolerance})')


def leading_eigenpair(correlation: np.ndarray, solver: Optional[str] = const.DEFAULT_EIGENSOLVER,
                      max_iterations: Optional[int] = const.POWER_ITERATION_MAX_ITERATIONS,
                      tolerance: Optional[float] = const.POWER_ITERATION_TOLERANCE,
                      seed: Optional[int] = const.POWER_ITERATION_SEED) -> Tuple[float, np.ndarray]:
    """The largest eigenvalue of a symmetric matrix and its unit eigenvector
    Args:
        correlation: A symmetric positive semi-definite matrix
        solver: eigh (LAPACK) or power (power iteration with a residual stopping test)
        max_iterations: Power iteration budget
        tolerance: Power iteration residual tolerance, relative to the eigenvalue
        seed: Seed for the power iteration starting vector
    Returns:
        (eigenvalue, eigenvector)
    """
    if solver not in const.EIGENSOLVERS:
        raise exceptions.UnknownFormatError(solver, const.EIGENSOLVERS)
    if not np.all(np.isfinite(correlation)):
        raise exceptions.EigensolverConvergenceError('the correlation matrix has non-finite entries')
    if solver == 'eigh':
        return _leading_eigh(correlation)
    return _leading_power(correlation, max_iterations, tolerance, seed)


def fit_capabilities_component(matrix: StandardizedMatrix, solver: Optional[str] = const.DEFAULT_EIGENSOLVER,
                               max_iterations: Optional[int] = const.POWER_ITERATION_MAX_ITERATIONS,
                               tolerance: Optional[float] = const.POWER_ITERATION_TOLERANCE,
                               excluded_benchmarks: Iterable[str] = ()) -> CapabilitiesModel:
    """Fit the first principal component of standardized capability benchmarks
    Args:
        matrix: Standardized capability columns
        solver: eigh or power
        max_iterations: Power iteration budget
        tolerance: Power iteration residual tolerance
        excluded_benchmarks: Benchmarks left out of the fit, recorded on the result
    Returns:
        A `CapabilitiesModel`
    """
    m, b = matrix.shape
    if b < const.MIN_CAPABILITY_BENCHMARKS:
        raise exceptions.InputError(f'the capabilities component needs at least {const.MIN_CAPABILITY_BENCHMARKS} '
                                    f'capability benchmarks, got {b}')
    if m < const.MIN_PCA_MODELS:
        raise exceptions.InputError(f'the capabilities component needs at least {const.MIN_PCA_MODELS} models, '
                                    f'got {m}')
    values = np.asarray(matrix.values)
    correlation = values.T @ values / (m - 1)
    eigenvalue, vector = leading_eigenpair(correlation, solver=solver, max_iterations=max_iterations,
                                           tolerance=tolerance)
    loadings = orient_loadings(vector / np.linalg.norm(vector))
    explained = min(eigenvalue / np.trace(correlation), 1.0)
    return CapabilitiesModel(
        benchmarks=matrix.benchmarks,
        loadings=loadings,
        explained_variance_ratio=explained,
        eigenvalue=eigenvalue,
        column_means=matrix.means,
        column_stds=matrix.stds,
        models=matrix.models,
        scores=values @ loadings,
        excluded_benchmarks=excluded_benchmarks,
        solver=solver
    )


def capabilities_scores(model: CapabilitiesModel, matrix: StandardizedMatrix) -> pd.Series:
    """Project standardized rows onto the capabilities component
    Args:
        model: The fitted model
        matrix: Standardized scores whose columns match the model's benchmarks in order
    Returns:
        Capabilities scores indexed by model
    """
    if tuple(matrix.benchmarks) != tuple(model.benchmarks):
        raise exceptions.InputError(f'matrix columns {list(matrix.benchmarks)} do not match the fitted benchmarks '
                                    f'{list(model.benchmarks)}')
    return pd.Series(np.asarray(matrix.values) @ model.loadings, index=list(matrix.models),
                     name='capabilities_score')


def refit_subset(matrix: ScoreMatrix, excluded_benchmarks: Iterable[str] = (),
                 solver: Optional[str] = const.DEFAULT_EIGENSOLVER,
                 max_iterations: Optional[int] = const.POWER_ITERATION_MAX_ITERATIONS,
                 tolerance: Optional[float] = const.POWER_ITERATION_TOLERANCE) -> CapabilitiesModel:
    """Standardize and fit the capabilities component on every column except the excluded ones
    Args:
        matrix: Complete, oriented capability scores
        excluded_benchmarks: Benchmarks to leave out
        solver: eigh or power
        max_iterations: Power iteration budget
        tolerance: Power iteration residual tolerance
    Returns:
        A `CapabilitiesModel` labeled with the exclusions
    """
    excluded = list(dict.fromkeys(excluded_benchmarks))
    unknown = [b for b in excluded if b not in matrix.benchmarks]
    if unknown:
        raise exceptions.InputError(f'cannot exclude unknown benchmark(s): {", ".join(unknown)}')
    kept = [b for b in matrix.benchmarks if b not in set(excluded)]
    if len(kept) < const.MIN_CAPABILITY_BENCHMARKS:
        raise exceptions.InputError(f'excluding {", ".join(excluded)} leaves {len(kept)} capability benchmark(s); '
                                    f'need at least {const.MIN_CAPABILITY_BENCHMARKS}')
    standardized = standardize(matrix.select_benchmarks(kept))
    return fit_capabilities_component(standardized, solver=solver, max_iterations=max_iterations,
                                      tolerance=tolerance, excluded_benchmarks=excluded)


def fit_capabilities_model(matrix: ScoreMatrix, excluded_benchmarks: Iterable[str] = (),
                           solver: Optional[str] = const.DEFAULT_EIGENSOLVER,
                           max_iterations: Optional[int] = const.POWER_ITERATION_MAX_ITERATIONS,
                           tolerance: Optional[float] = const.POWER_ITERATION_TOLERANCE) -> CapabilitiesModel:
    return refit_subset(matrix, excluded_benchmarks, solver=solver, max_iterations=max_iterations,
                        tolerance=tolerance)


def component_correlations(model: CapabilitiesModel, matrix: Union[ScoreMatrix, StandardizedMatrix]) -> \
        Dict[str, float]:
    """Spearman correlation of every fitted benchmark with the capabilities score
    Args:
        model: The fitted model
        matrix: Scores holding the fitted benchmarks for the fitted models
    Returns:
        A dictionary mapping benchmark to rho, in fitted-benchmark order
    """
    scores = model.score_series()
    if isinstance(matrix, StandardizedMatrix):
        frame = pd.DataFrame(np.asarray(matrix.values), index=list(matrix.models), columns=list(matrix.benchmarks))
    else:
        frame = matrix.to_frame()
    frame = frame.reindex(index=list(scores.index))
    result = {}
    for benchmark in model.benchmarks:
        if benchmark not in frame.columns:
            raise exceptions.InputError(f'{benchmark!r} is missing from the matrix')
        result[benchmark] = spearman(scores.to_numpy(), frame[benchmark].to_numpy(dtype=float))
    return result
