from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional

import numpy as np

from capcorr import const
from capcorr import exceptions
from capcorr.services.stats.correlation import ArrayLike, average_ranks, complete_pairs, rowwise_pearson, \
    rowwise_slope


class BootstrapResult:

    def __init__(self, low: float, high: float, resamples: int, skipped: int, statistic: str):
        self.low = low
        self.high = high
        self.resamples = resamples
        self.skipped = skipped
        self.statistic = statistic

    @property
    def interval(self):
        return self.low, self.high

    def to_dict(self) -> Dict:
        return dict(statistic=self.statistic, ci=[self.low, self.high], resamples=self.resamples,
                    skipped=self.skipped)

    def __repr__(self):
        return f'BootstrapResult({self.statistic}, ({self.low!r}, {self.high!r}), skipped={self.skipped})'


def chunk_sizes(resamples: int, chunk_size: int = const.BOOTSTRAP_CHUNK_SIZE) -> List[int]:
    full, rest = divmod(resamples, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def _resample_chunk(seed_sequence: np.random.SeedSequence, size: int, x: np.ndarray, y: np.ndarray,
                    statistic: str) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed_sequence))
    idx = rng.integers(0, len(x), size=(size, len(x)))
    xs, ys = x[idx], y[idx]
    if statistic == 'spearman':
        return rowwise_pearson(average_ranks(xs, axis=1), average_ranks(ys, axis=1))
    elif statistic == 'pearson':
        return rowwise_pearson(xs, ys)
    return rowwise_slope(xs, ys)


def bootstrap_ci(statistic: str, x: ArrayLike, y: ArrayLike,
                 resamples: Optional[int] = const.DEFAULT_BOOTSTRAP_RESAMPLES,
                 seed: Optional[int] = None, workers: Optional[int] = 1,
                 confidence: Optional[float] = const.BOOTSTRAP_CONFIDENCE,
                 chunk_size: Optional[int] = const.BOOTSTRAP_CHUNK_SIZE) -> BootstrapResult:
    """Percentile bootstrap interval for a paired statistic

    Resamples are drawn in fixed-size chunks; chunk k draws from the k-th child of SeedSequence(seed) through a
    PCG64 generator. Chunks are reassembled in order, so the interval is identical for any number of workers.

    Args:
        statistic: spearman, pearson or slope
        x: First vector (capabilities scores)
        y: Second vector (safety scores)
        resamples: Number of with-replacement resamples (>= 1000)
        seed: The root seed; required
        workers: Threads used to evaluate chunks
        confidence: Central coverage of the interval
        chunk_size: Resamples per seed chunk
    Returns:
        A `BootstrapResult`
    """
    if statistic not in const.BOOTSTRAP_STATISTICS:
        raise exceptions.UnknownFormatError(statistic, const.BOOTSTRAP_STATISTICS)
    if seed is None:
        raise exceptions.InputError('bootstrap_ci requires an explicit seed')
    if resamples is None or resamples < const.MIN_BOOTSTRAP_RESAMPLES:
        raise exceptions.InputError(f'bootstrap needs at least {const.MIN_BOOTSTRAP_RESAMPLES} resamples, '
                                    f'got {resamples}')
    if not 0 < confidence < 1:
        raise exceptions.InputError(f'confidence must lie in (0, 1), got {confidence}')
    x, y = complete_pairs(x, y, minimum=const.MIN_BOOTSTRAP_PAIRS)

    sizes = chunk_sizes(resamples, chunk_size)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(child, size, x, y, statistic) for child, size in zip(children, sizes)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            chunks = list(executor.map(lambda job: _resample_chunk(*job), jobs))
    else:
        chunks = [_resample_chunk(*job) for job in jobs]
    values = np.concatenate(chunks)

    degenerate = np.isnan(values)
    skipped = int(degenerate.sum())
    if skipped > const.BOOTSTRAP_MAX_SKIPPED_FRACTION * resamples:
        raise exceptions.BootstrapDegeneracyError(skipped, resamples)
    alpha = (1.0 - confidence) / 2.0
    low, high = np.percentile(values[~degenerate], [100.0 * alpha, 100.0 * (1.0 - alpha)])
    return BootstrapResult(float(low), float(high), resamples, skipped, statistic)
