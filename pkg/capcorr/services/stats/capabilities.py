from __future__ import annotations

from typing import Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd

from capcorr import const
from capcorr import exceptions
from capcorr import utilities
from capcorr.services.ingest.matrix import pair_columns, standardize_column
from capcorr.services.ingest.meta import BenchmarkMeta
from capcorr.services.report.bands import BandThresholds, classify_band
from capcorr.services.stats.bootstrap import bootstrap_ci
from capcorr.services.stats.correlation import ols_fit, ols_slope, pearson, spearman

COMPUTE_TABLE_HEADER = ['model', 'params', 'train_tokens']


class CorrelationResult:

    def __init__(self, benchmark: str, direction: str, unit: str, spearman_rho: float, pearson_r: float,
                 ols_slope: float, ols_intercept: float, standardized_slope: float, n_pairs: int,
                 dropped_models=(), bootstrap_ci: Optional[Tuple[float, float]] = None,
                 bootstrap_resamples: int = 0, bootstrap_skipped: int = 0, band: Optional[str] = None):
        """How strongly one safety benchmark tracks the capabilities score
        Args:
            benchmark: The safety benchmark identifier
            direction: The benchmark's raw direction (the statistics use the oriented column)
            unit: The benchmark's native unit
            spearman_rho: Spearman correlation with the capabilities score
            pearson_r: Pearson correlation with the capabilities score
            ols_slope: Oriented safety units per capabilities-score unit
            ols_intercept: Intercept of the same fit
            standardized_slope: Slope after standardizing the safety scores to mean 0 and variance 1
            n_pairs: Models with both values present
            dropped_models: Models removed by pairwise deletion
            bootstrap_ci: Percentile interval for spearman_rho, when it was computed
            bootstrap_resamples: Number of resamples behind the interval
            bootstrap_skipped: Degenerate resamples left out of the interval
            band: The band label
        """
        self.benchmark = benchmark
        self.direction = direction
        self.unit = unit
        self.spearman_rho = spearman_rho
        self.pearson_r = pearson_r
        self.ols_slope = ols_slope
        self.ols_intercept = ols_intercept
        self.standardized_slope = standardized_slope
        self.n_pairs = n_pairs
        self.dropped_models = list(dropped_models)
        self.bootstrap_ci = bootstrap_ci
        self.bootstrap_resamples = bootstrap_resamples
        self.bootstrap_skipped = bootstrap_skipped
        self.band = band

    def to_dict(self) -> Dict:
        return dict(
            benchmark=self.benchmark,
            direction=self.direction,
            unit=self.unit,
            spearman_rho=self.spearman_rho,
            pearson_r=self.pearson_r,
            ols_slope=self.ols_slope,
            ols_intercept=self.ols_intercept,
            standardized_slope=self.standardized_slope,
            n_pairs=self.n_pairs,
            dropped_models=list(self.dropped_models),
            bootstrap_ci=None if self.bootstrap_ci is None else list(self.bootstrap_ci),
            bootstrap_resamples=self.bootstrap_resamples,
            bootstrap_skipped=self.bootstrap_skipped,
            band=self.band
        )

    def __repr__(self):
        return f'CorrelationResult({self.benchmark!r}, rho={self.spearman_rho:.4f}, band={self.band})'


def capabilities_correlation(cap_scores: pd.Series, safety_column: pd.Series, meta: BenchmarkMeta,
                             resamples: Optional[int] = const.DEFAULT_BOOTSTRAP_RESAMPLES,
                             seed: Optional[int] = None, workers: Optional[int] = 1,
                             thresholds: Optional[BandThresholds] = None) -> CorrelationResult:
    """Correlate one oriented safety column with the capabilities score
    Args:
        cap_scores: Capabilities scores indexed by model
        safety_column: The oriented safety column indexed by model
        meta: The safety benchmark's metadata
        resamples: Bootstrap resamples; 0 or None skips the interval
        seed: Bootstrap seed; required when resamples is set
        workers: Bootstrap threads
        thresholds: Band boundaries
    Returns:
        A `CorrelationResult`
    """
    x, y, dropped = pair_columns(cap_scores, safety_column)
    if len(x) < const.MIN_CORRELATION_PAIRS:
        raise exceptions.InputError(f'{meta.id}: only {len(x)} model(s) have both a capabilities score and a '
                                    f'safety score; need at least {const.MIN_CORRELATION_PAIRS}')
    rho = spearman(x.to_numpy(), y.to_numpy())
    r = pearson(x.to_numpy(), y.to_numpy())
    fit = ols_fit(x.to_numpy(), y.to_numpy())
    standardized = ols_slope(x.to_numpy(), standardize_column(y).to_numpy())
    ci, skipped = None, 0
    if resamples and len(x) >= const.MIN_BOOTSTRAP_PAIRS:
        result = bootstrap_ci('spearman', x.to_numpy(), y.to_numpy(), resamples=resamples, seed=seed,
                              workers=workers)
        ci, skipped = result.interval, result.skipped
    return CorrelationResult(
        benchmark=meta.id,
        direction=meta.direction,
        unit=meta.unit or '',
        spearman_rho=rho,
        pearson_r=r,
        ols_slope=fit.slope,
        ols_intercept=fit.intercept,
        standardized_slope=standardized,
        n_pairs=len(x),
        dropped_models=dropped,
        bootstrap_ci=ci,
        bootstrap_resamples=int(resamples) if ci is not None else 0,
        bootstrap_skipped=skipped,
        band=classify_band(rho, thresholds)
    )


def flop_proxy(params: Union[float, np.ndarray], train_tokens: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Training compute estimate: 6 x parameters x training tokens
    Args:
        params: Parameter count(s)
        train_tokens: Training token count(s)
    Returns:
        FLOP estimate(s)
    """
    params_arr = np.asarray(params, dtype=float)
    tokens_arr = np.asarray(train_tokens, dtype=float)
    if not (np.all(np.isfinite(params_arr)) and np.all(params_arr > 0)):
        raise exceptions.InputError('parameter counts must be positive and finite')
    if not (np.all(np.isfinite(tokens_arr)) and np.all(tokens_arr > 0)):
        raise exceptions.InputError('training token counts must be positive and finite')
    flop = const.FLOP_PER_PARAMETER_TOKEN * params_arr * tokens_arr
    return float(flop) if flop.ndim == 0 else flop


def load_compute_table(path: str) -> pd.DataFrame:
    """Read a `model,params,train_tokens` CSV
    Args:
        path: The CSV path
    Returns:
        A DataFrame indexed by model with float columns params and train_tokens
    """
    with utilities.open_input_file(path, 'rb') as f:
        try:
            frame = pd.read_csv(f, dtype={'model': str}, keep_default_na=False, encoding='utf-8')
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise exceptions.InputError(f'{path}: could not parse compute table; {e}')
    if list(frame.columns) != COMPUTE_TABLE_HEADER:
        raise exceptions.InputError(f'{path}: compute table header must be {",".join(COMPUTE_TABLE_HEADER)}')
    if frame['model'].duplicated().any():
        raise exceptions.InputError(f'{path}: duplicate model rows '
                                    f'{", ".join(frame["model"][frame["model"].duplicated()])}')
    values = frame[['params', 'train_tokens']].apply(pd.to_numeric, errors='coerce')
    bad = values.isna().any(axis=1) | (values <= 0).any(axis=1)
    if bad.any():
        raise exceptions.InputError(f'{path}: line {int(bad.to_numpy().argmax()) + 2}: params and train_tokens must '
                                    f'be positive numbers')
    values.index = frame['model'].astype(str)
    return values


class ComputeCorrelation:

    def __init__(self, spearman_rho: float, n_pairs: int, log10_flop: Dict[str, float]):
        self.spearman_rho = spearman_rho
        self.n_pairs = n_pairs
        self.log10_flop = log10_flop

    def to_dict(self) -> Dict:
        return dict(spearman_rho=self.spearman_rho, n_pairs=self.n_pairs, log10_flop=dict(self.log10_flop))


def compute_correlation(cap_scores: pd.Series, compute: pd.DataFrame) -> ComputeCorrelation:
    """Spearman correlation between log10 training compute and the capabilities score
    Args:
        cap_scores: Capabilities scores indexed by model
        compute: A frame indexed by model with params and train_tokens columns
    Returns:
        A `ComputeCorrelation`
    """
    log_flop = pd.Series(np.log10(flop_proxy(compute['params'].to_numpy(), compute['train_tokens'].to_numpy())),
                         index=compute.index)
    x, y, _ = pair_columns(cap_scores, log_flop)
    rho = spearman(x.to_numpy(), y.to_numpy())
    return ComputeCorrelation(rho, len(x), {str(m): float(v) for m, v in y.items()})
