from __future__ import annotations

import math
from typing import Dict, List, Optional, Sequence

import numpy as np

from capcorr import const
from capcorr import exceptions
from capcorr.services.calibration.predictions import PredictionLog


def normalize_scheme(scheme: str) -> str:
    scheme = str(scheme).strip().lower().replace('-', '_')
    if scheme not in const.BIN_SCHEMES:
        raise exceptions.UnknownFormatError(scheme, const.BIN_SCHEMES)
    return scheme


class ConfidenceBins:

    def __init__(self, mean_confidence: Sequence[float], accuracy: Sequence[float], weights: Sequence[float],
                 counts: Optional[Sequence[int]] = None, scheme: Optional[str] = const.DEFAULT_BIN_SCHEME,
                 bin_count: Optional[int] = None, assignments: Optional[np.ndarray] = None,
                 top_label_brier: Optional[float] = None):
        """Occupied confidence bins, ordered by confidence
        Args:
            mean_confidence: Mean top-label confidence of each bin
            accuracy: Fraction of correct predictions in each bin
            weights: Fraction of records in each bin; sums to 1
            counts: Records per bin
            scheme: equal_mass or equal_width
            bin_count: The requested number of bins (occupied bins may be fewer)
            assignments: The bin index of every record
            top_label_brier: mean((confidence - correct)^2) over the binned records
        """
        self.mean_confidence = np.asarray(mean_confidence, dtype=float)
        self.accuracy = np.asarray(accuracy, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.counts = None if counts is None else np.asarray(counts, dtype=int)
        self.scheme = scheme
        self.bin_count = len(self.weights) if bin_count is None else bin_count
        self.assignments = assignments
        self.top_label_brier = top_label_brier
        if not (self.mean_confidence.shape == self.accuracy.shape == self.weights.shape) or \
                self.weights.ndim != 1 or len(self.weights) == 0:
            raise exceptions.InputError('bins need matching, non-empty confidence, accuracy and weight vectors')
        for name, values in (('confidence', self.mean_confidence), ('accuracy', self.accuracy),
                             ('weight', self.weights)):
            if (values < 0).any() or (values > 1).any():
                raise exceptions.InputError(f'every bin {name} must lie in [0, 1]')
        if abs(self.weights.sum() - 1.0) > const.BIN_WEIGHT_TOLERANCE:
            raise exceptions.InputError(f'bin weights sum to {self.weights.sum()!r}, not 1')
        if (np.diff(self.mean_confidence) < 0).any():
            raise exceptions.InputError('bins must be ordered by confidence')

    @classmethod
    def from_summary(cls, mean_confidence: Sequence[float], accuracy: Sequence[float],
                     weights: Sequence[float]) -> ConfidenceBins:
        """Bins from per-bin summaries given in any order"""
        order = np.argsort(np.asarray(mean_confidence, dtype=float), kind='stable')
        return cls(np.asarray(mean_confidence, dtype=float)[order], np.asarray(accuracy, dtype=float)[order],
                   np.asarray(weights, dtype=float)[order])

    def __len__(self):
        return len(self.weights)

    def to_rows(self) -> List[Dict]:
        return [dict(mean_confidence=float(self.mean_confidence[b]), accuracy=float(self.accuracy[b]),
                     weight=float(self.weights[b]),
                     count=None if self.counts is None else int(self.counts[b]))
                for b in range(len(self))]


def brier_multiclass(log: PredictionLog) -> float:
    """Mean over records of (1/K) * sum_k (p_k - 1[y = k])^2
    Args:
        log: The prediction log
    Returns:
        The score, within [0, 2/K]
    """
    if log is None or log.n_records == 0:
        raise exceptions.InputError('brier score of an empty log')
    one_hot = np.eye(log.n_classes)[log.labels]
    return float(np.mean(np.sum((log.probs - one_hot) ** 2, axis=1) / log.n_classes))


def top_label_brier(log: PredictionLog) -> float:
    return float(np.mean((log.confidences - log.correct) ** 2))


def _equal_mass_assignments(confidences: np.ndarray, bin_count: int) -> np.ndarray:
    n = len(confidences)
    if bin_count > n:
        raise exceptions.InputError(f'equal_mass binning needs at least as many records as bins; got {n} records '
                                    f'for {bin_count} bins')
    order = np.argsort(confidences, kind='stable')
    size = math.ceil(n / bin_count)
    chunk = np.arange(n) // size
    # equal confidences share the bin of their first occurrence
    _, first, inverse = np.unique(confidences[order], return_index=True, return_inverse=True)
    sorted_assignment = chunk[first[inverse]]
    assignments = np.empty(n, dtype=int)
    assignments[order] = sorted_assignment
    return assignments


def _equal_width_assignments(confidences: np.ndarray, bin_count: int) -> np.ndarray:
    edges = np.linspace(0.0, 1.0, bin_count + 1)
    return np.digitize(confidences, edges[1:-1])


def bin_confidences(log: PredictionLog, scheme: Optional[str] = const.DEFAULT_BIN_SCHEME,
                    bin_count: Optional[int] = const.DEFAULT_BIN_COUNT) -> ConfidenceBins:
    """Group records by top-label confidence
    Args:
        log: The prediction log
        scheme: equal_mass (runs of ceil(N / bins) sorted records; ties never straddle bins) or equal_width
            (bins partitioning [0, 1], with 1.0 in the last bin)
        bin_count: Requested number of bins (>= 2)
    Returns:
        `ConfidenceBins` holding only occupied bins
    """
    scheme = normalize_scheme(scheme)
    if bin_count is None or bin_count < 2:
        raise exceptions.InputError(f'bin count must be at least 2, got {bin_count}')
    confidences, correct = log.confidences, log.correct
    if scheme == 'equal_mass':
        raw = _equal_mass_assignments(confidences, bin_count)
    else:
        raw = _equal_width_assignments(confidences, bin_count)
    occupied, assignments, counts = np.unique(raw, return_inverse=True, return_counts=True)
    mean_confidence = np.array([confidences[assignments == b].mean() for b in range(len(occupied))])
    accuracy = np.array([correct[assignments == b].mean() for b in range(len(occupied))])
    return ConfidenceBins(mean_confidence, accuracy, counts / log.n_records, counts=counts, scheme=scheme,
                          bin_count=bin_count, assignments=assignments, top_label_brier=top_label_brier(log))


def rmsce(bins: ConfidenceBins) -> float:
    """Root mean squared calibration error: sqrt(sum_b w_b (a_b - c_b)^2)"""
    return float(np.sqrt(np.sum(bins.weights * (bins.accuracy - bins.mean_confidence) ** 2)))


def ece(bins: ConfidenceBins) -> float:
    """Expected calibration error: sum_b w_b |a_b - c_b|"""
    return float(np.sum(bins.weights * np.abs(bins.accuracy - bins.mean_confidence)))


class BrierDecomposition:

    def __init__(self, calibration_term: float, refinement_term: float, residual: Optional[float] = None):
        self.calibration_term = calibration_term
        self.refinement_term = refinement_term
        self.residual = residual

    def __iter__(self):
        return iter((self.calibration_term, self.refinement_term))

    def to_dict(self) -> Dict:
        return dict(calibration_term=self.calibration_term, refinement_term=self.refinement_term,
                    residual=self.residual)


def brier_decomposition(bins: ConfidenceBins) -> BrierDecomposition:
    """Split the top-label Brier score into a calibration term and a refinement term
    Args:
        bins: Confidence bins
    Returns:
        A `BrierDecomposition`; residual is top-label Brier minus the two terms (within-bin confidence variance),
        present when the bins came from a log
    """
    calibration_term = rmsce(bins) ** 2
    refinement_term = float(np.sum(bins.weights * bins.accuracy * (1.0 - bins.accuracy)))
    residual = None
    if bins.top_label_brier is not None:
        residual = float(bins.top_label_brier - (calibration_term + refinement_term))
    return BrierDecomposition(calibration_term, refinement_term, residual)

