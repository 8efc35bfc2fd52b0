from typing import Dict, List, Optional

import pandas as pd

from capcorr import const
from capcorr import exceptions
from capcorr.services.calibration.metrics import bin_confidences, brier_decomposition, brier_multiclass, ece, \
    normalize_scheme, rmsce
from capcorr.services.calibration.predictions import PredictionLog
from capcorr.services.calibration.temperature import apply_temperature, negative_log_likelihood, temperature_fit
from capcorr.services.stats.correlation import spearman


class CalibrationReport:

    def __init__(self, name: str, n_records: int, n_classes: int, accuracy: float, brier: float,
                 top_label_brier: float, rmsce: float, ece: float, decomposition: Dict, scheme: str,
                 bin_count: int, bins: List[Dict], temperature: Optional[Dict] = None):
        """Every calibration metric of one model's prediction log
        Args:
            name: The model
            n_records: Records in the log
            n_classes: K
            accuracy: Top-label accuracy
            brier: Multiclass Brier score with 1/K averaging
            top_label_brier: mean((confidence - correct)^2)
            rmsce: Root mean squared calibration error
            ece: Expected calibration error
            decomposition: calibration_term, refinement_term and residual
            scheme: The binning scheme
            bin_count: The requested number of bins
            bins: Per-bin mean_confidence, accuracy, weight and count
            temperature: The fitted temperature with NLL before and after, and the tuned brier, rmsce and ece
        """
        self.name = name
        self.n_records = n_records
        self.n_classes = n_classes
        self.accuracy = accuracy
        self.brier = brier
        self.top_label_brier = top_label_brier
        self.rmsce = rmsce
        self.ece = ece
        self.decomposition = decomposition
        self.scheme = scheme
        self.bin_count = bin_count
        self.bins = bins
        self.temperature = temperature

    @property
    def safety_scores(self) -> Dict[str, float]:
        """Calibration metrics flipped so that higher is safer"""
        scores = dict(one_minus_brier=1.0 - self.brier, one_minus_rmsce=1.0 - self.rmsce)
        if self.temperature is not None:
            scores['one_minus_brier_tuned'] = 1.0 - self.temperature['brier']
            scores['one_minus_rmsce_tuned'] = 1.0 - self.temperature['rmsce']
        return scores

    def to_dict(self) -> Dict:
        return dict(
            name=self.name,
            n_records=self.n_records,
            n_classes=self.n_classes,
            accuracy=self.accuracy,
            brier=self.brier,
            top_label_brier=self.top_label_brier,
            rmsce=self.rmsce,
            ece=self.ece,
            decomposition=dict(self.decomposition),
            scheme=self.scheme,
            bin_count=self.bin_count,
            bins=list(self.bins),
            temperature=None if self.temperature is None else dict(self.temperature),
            safety_scores=self.safety_scores
        )

    def __repr__(self):
        return f'CalibrationReport({self.name!r}, brier={self.brier:.4f}, rmsce={self.rmsce:.4f})'


def calibration_report(log: PredictionLog, scheme: Optional[str] = const.DEFAULT_BIN_SCHEME,
                       bin_count: Optional[int] = const.DEFAULT_BIN_COUNT,
                       temperature: Optional[bool] = False) -> CalibrationReport:
    """Compute every calibration metric for one log
    Args:
        log: The prediction log
        scheme: equal_mass or equal_width
        bin_count: Requested bins
        temperature: Also fit a temperature and report the tuned Brier score and RMSCE
    Returns:
        A `CalibrationReport`
    """
    scheme = normalize_scheme(scheme)
    bins = bin_confidences(log, scheme, bin_count)
    tuned = None
    if temperature:
        value = temperature_fit(log)
        scaled = apply_temperature(log, value)
        tuned_bins = bin_confidences(scaled, scheme, bin_count)
        tuned = dict(
            value=value,
            nll_before=negative_log_likelihood(log.logits, log.labels),
            nll_after=negative_log_likelihood(log.logits, log.labels, value),
            brier=brier_multiclass(scaled),
            rmsce=rmsce(tuned_bins),
            ece=ece(tuned_bins)
        )
    return CalibrationReport(
        name=log.name,
        n_records=log.n_records,
        n_classes=log.n_classes,
        accuracy=log.accuracy,
        brier=brier_multiclass(log),
        top_label_brier=bins.top_label_brier,
        rmsce=rmsce(bins),
        ece=ece(bins),
        decomposition=brier_decomposition(bins).to_dict(),
        scheme=scheme,
        bin_count=bin_count,
        bins=bins.to_rows(),
        temperature=tuned
    )


def _shared_metrics(reports: List[CalibrationReport]) -> List[str]:
    keys = [set(report.safety_scores) for report in reports]
    return sorted(set.intersection(*keys)) if keys else []


def accuracy_correlations(reports: List[CalibrationReport]) -> Dict[str, Optional[float]]:
    """Spearman correlation, across models, between each safety-oriented calibration score and accuracy
    Args:
        reports: One report per model (at least 3)
    Returns:
        A dictionary mapping metric to rho; None where the correlation is undefined
    """
    if len(reports) < const.MIN_CORRELATION_PAIRS:
        raise exceptions.InputError(f'accuracy correlations need at least {const.MIN_CORRELATION_PAIRS} models, got '
                                    f'{len(reports)}')
    accuracy = [report.accuracy for report in reports]
    result = {}
    for metric in _shared_metrics(reports):
        try:
            result[metric] = spearman(accuracy, [report.safety_scores[metric] for report in reports])
        except exceptions.UndefinedCorrelationError:
            result[metric] = None
    return result


def export_safety_scores(reports: List[CalibrationReport]) -> str:
    """Write the safety-oriented calibration scores as a long score table
    Args:
        reports: One report per model; names must be unique
    Returns:
        A `model,benchmark,score` CSV document
    """
    names = [report.name for report in reports]
    if len(set(names)) != len(names):
        raise exceptions.InputError('calibration reports must have unique model names to be exported')
    metrics = _shared_metrics(reports)
    rows = [(report.name, metric, report.safety_scores[metric]) for report in reports for metric in metrics]
    return pd.DataFrame(rows, columns=const.LONG_LAYOUT_HEADER).to_csv(index=False, lineterminator='\n')
