from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.stats import rankdata

from capcorr import const
from capcorr import exceptions

ArrayLike = Union[Sequence[float], np.ndarray, pd.Series]


def complete_pairs(x: ArrayLike, y: ArrayLike, minimum: int = const.MIN_CORRELATION_PAIRS) -> \
        Tuple[np.ndarray, np.ndarray]:
    """Pairwise deletion: keep only positions where both values are present
    Args:
        x: First vector
        y: Second vector, same length as x
        minimum: The smallest acceptable number of complete pairs
    Returns:
        The two filtered float arrays
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise exceptions.InputError(f'vectors must be one-dimensional and of equal length, got {x.shape} and '
                                    f'{y.shape}')
    keep = ~(np.isnan(x) | np.isnan(y))
    if int(keep.sum()) < minimum:
        raise exceptions.InputError(f'need at least {minimum} complete pairs, got {int(keep.sum())}')
    return x[keep], y[keep]


def rowwise_pearson(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Pearson correlation of every row of x with the matching row of y
    Args:
        x: A (rows x n) array
        y: A (rows x n) array
    Returns:
        One correlation per row, clipped to [-1, 1]; NaN where either row is constant
    """
    xm = x - x.mean(axis=1, keepdims=True)
    ym = y - y.mean(axis=1, keepdims=True)
    sxx = np.sum(xm * xm, axis=1)
    syy = np.sum(ym * ym, axis=1)
    sxy = np.sum(xm * ym, axis=1)
    degenerate = (np.ptp(x, axis=1) == 0) | (np.ptp(y, axis=1) == 0)
    with np.errstate(divide='ignore', invalid='ignore'):
        r = sxy / np.sqrt(sxx * syy)
    r = np.clip(r, -1.0, 1.0)
    r[degenerate] = np.nan
    return r


def rowwise_slope(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least-squares slope of y on x for every row; NaN where x is constant"""
    xm = x - x.mean(axis=1, keepdims=True)
    ym = y - y.mean(axis=1, keepdims=True)
    sxx = np.sum(xm * xm, axis=1)
    with np.errstate(divide='ignore', invalid='ignore'):
        slope = np.sum(xm * ym, axis=1) / sxx
    slope[np.ptp(x, axis=1) == 0] = np.nan
    return slope


def average_ranks(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Ranks starting at 1; tied values receive the mean of the rank range they span"""
    return rankdata(values, method='average', axis=axis)


def _checked(r: float, what: str) -> float:
    if np.isnan(r):
        raise exceptions.UndefinedCorrelationError(f'{what} needs at least two distinct values in each vector')
    return float(r)


def pearson(x: ArrayLike, y: ArrayLike) -> float:
    """Pearson product-moment correlation with pairwise deletion
    Args:
        x: First vector
        y: Second vector
    Returns:
        r in [-1, 1]
    """
    x, y = complete_pairs(x, y)
    return _checked(rowwise_pearson(x[np.newaxis, :], y[np.newaxis, :])[0], 'pearson')


def spearman(x: ArrayLike, y: ArrayLike) -> float:
    """Spearman rank correlation: the Pearson correlation of average ranks, with pairwise deletion
    Args:
        x: First vector
        y: Second vector
    Returns:
        rho in [-1, 1]
    """
    x, y = complete_pairs(x, y)
    return _checked(rowwise_pearson(average_ranks(x)[np.newaxis, :], average_ranks(y)[np.newaxis, :])[0],
                    'spearman')


class OlsFit:

    def __init__(self, slope: float, intercept: float, n: int):
        self.slope = slope
        self.intercept = intercept
        self.n = n

    def __repr__(self):
        return f'OlsFit(slope={self.slope!r}, intercept={self.intercept!r}, n={self.n})'


def ols_fit(x: ArrayLike, y: ArrayLike) -> OlsFit:
    """Least-squares line y = slope * x + intercept, with pairwise deletion
    Args:
        x: Regressor (capabilities scores)
        y: Response (safety scores in native units)
    Returns:
        An `OlsFit`
    """
    x, y = complete_pairs(x, y)
    slope = rowwise_slope(x[np.newaxis, :], y[np.newaxis, :])[0]
    if np.isnan(slope):
        raise exceptions.NumericError('ols slope is undefined because the regressor has zero variance')
    return OlsFit(float(slope), float(y.mean() - slope * x.mean()), len(x))


def ols_slope(x: ArrayLike, y: ArrayLike) -> float:
    return ols_fit(x, y).slope


class CorrelationMatrix:

    def __init__(self, benchmarks: Sequence[str], values: np.ndarray, flagged_pairs: List[Tuple[str, str]],
                 method: str = 'spearman'):
        """A symmetric benchmark x benchmark correlation matrix with unit diagonal
        Args:
            benchmarks: The benchmark identifiers, in row/column order
            values: The matrix; NaN marks pairs that could not be computed
            flagged_pairs: The (i, j) benchmark pairs left out of the summary
            method: spearman or pearson
        """
        self.benchmarks = tuple(benchmarks)
        self.values = values
        self.flagged_pairs = list(flagged_pairs)
        self.method = method
        upper = values[np.triu_indices(len(self.benchmarks), k=1)]
        upper = upper[~np.isnan(upper)]
        self.off_diagonal = upper
        self.mean = float(upper.mean()) if len(upper) else None
        self.std = float(upper.std(ddof=1)) if len(upper) > 1 else (0.0 if len(upper) else None)

    def to_dict(self) -> Dict:
        return dict(
            method=self.method,
            benchmarks=list(self.benchmarks),
            values=[[None if np.isnan(v) else float(v) for v in row] for row in self.values],
            mean=self.mean,
            std=self.std,
            flagged_pairs=[list(pair) for pair in self.flagged_pairs]
        )


def correlation_matrix(frame: pd.DataFrame, method: Optional[str] = 'spearman') -> CorrelationMatrix:
    """Pairwise-deletion correlation matrix across benchmark columns
    Args:
        frame: A wide DataFrame with one column per benchmark (NaN = missing)
        method: spearman or pearson
    Returns:
        A `CorrelationMatrix` with the mean and standard deviation of its upper triangle
    """
    if method not in ('spearman', 'pearson'):
        raise exceptions.UnknownFormatError(method, ['spearman', 'pearson'])
    benchmarks = [str(c) for c in frame.columns]
    if len(benchmarks) < 2:
        raise exceptions.InputError('a correlation matrix needs at least 2 columns')
    statistic = spearman if method == 'spearman' else pearson
    b = len(benchmarks)
    values = np.eye(b)
    flagged = []
    for i in range(b):
        for j in range(i + 1, b):
            try:
                r = statistic(frame.iloc[:, i].to_numpy(dtype=float), frame.iloc[:, j].to_numpy(dtype=float))
            except (exceptions.InputError, exceptions.UndefinedCorrelationError):
                r = np.nan
                flagged.append((benchmarks[i], benchmarks[j]))
            values[i, j] = values[j, i] = r
    return CorrelationMatrix(benchmarks, values, flagged, method=method)
