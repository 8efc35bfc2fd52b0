from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp

from capcorr import const
from capcorr import exceptions
from capcorr.services.calibration.predictions import PredictionLog


def negative_log_likelihood(logits: np.ndarray, labels: np.ndarray, temperature: Optional[float] = 1.0) -> float:
    """Mean negative log-likelihood of softmax(logits / temperature)
    Args:
        logits: An (N x K) matrix
        labels: Class indices
        temperature: T > 0
    Returns:
        The mean NLL
    """
    scaled = np.asarray(logits, dtype=float) / temperature
    picked = scaled[np.arange(len(labels)), labels]
    return float(np.mean(logsumexp(scaled, axis=1) - picked))


def temperature_fit(log: PredictionLog, bounds=const.TEMPERATURE_LOG_BOUNDS,
                    tolerance: Optional[float] = const.TEMPERATURE_LOG_TOLERANCE) -> float:
    """Fit the single temperature that minimizes negative log-likelihood
    Args:
        log: A prediction log carrying logits for every record
        bounds: Search interval for log T
        tolerance: Absolute tolerance on log T
    Returns:
        T > 0; 1.0 when the objective is flat or no candidate improves on T = 1
    """
    if not log.has_logits:
        raise exceptions.InputError('temperature fitting needs logits for every record')
    if log.n_records < const.MIN_TEMPERATURE_RECORDS:
        raise exceptions.InputError(f'temperature fitting needs at least {const.MIN_TEMPERATURE_RECORDS} records, '
                                    f'got {log.n_records}')
    logits, labels = log.logits, log.labels
    if (np.ptp(logits, axis=1) == 0).all():
        return 1.0

    def objective(log_temperature: float) -> float:
        value = negative_log_likelihood(logits, labels, float(np.exp(log_temperature)))
        if not np.isfinite(value):
            raise exceptions.NumericError(f'negative log-likelihood is not finite at log T = {log_temperature}')
        return value

    baseline = objective(0.0)
    result = minimize_scalar(objective, bounds=bounds, method='bounded', options=dict(xatol=tolerance))
    if not result.fun < baseline - const.TEMPERATURE_NLL_SLACK:
        return 1.0
    return float(np.exp(result.x))


def apply_temperature(log: PredictionLog, temperature: float) -> PredictionLog:
    """Rescale logits by 1 / T and re-normalize
    Args:
        log: A prediction log carrying logits
        temperature: T > 0
    Returns:
        A new `PredictionLog` whose logits are the scaled logits
    """
    if not log.has_logits:
        raise exceptions.InputError('applying a temperature needs logits for every record')
    if not temperature > 0:
        raise exceptions.InputError(f'temperature must be positive, got {temperature}')
    return PredictionLog.from_logits(log.example_ids, log.logits / temperature, log.labels, name=log.name)
