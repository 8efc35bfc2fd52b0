from typing import Optional

import numpy as np
from scipy.special import softmax

from capcorr import exceptions
from capcorr.services.calibration.predictions import PredictionLog


def generate_prediction_log(n_records: int, n_classes: int, scale: Optional[float] = 1.0, seed: Optional[int] = None,
                            logit_sd: Optional[float] = 2.0, name: Optional[str] = 'synthetic') -> PredictionLog:
    """Draw a log whose labels follow softmax(base logits) and whose reported logits are scale * base logits

    At scale 1 the reported probabilities are calibrated by construction, so the NLL-optimal temperature is near
    `scale`.

    Args:
        n_records: Records to draw
        n_classes: K >= 2
        scale: Factor applied to the base logits before they are reported
        seed: Root seed; required
        logit_sd: Standard deviation of the base logits
        name: The model name carried by the log
    Returns:
        A `PredictionLog` with logits
    """
    if seed is None:
        raise exceptions.InputError('generate_prediction_log requires an explicit seed')
    if n_records < 1 or n_classes < 2:
        raise exceptions.InputError('need at least 1 record and 2 classes')
    if not scale > 0:
        raise exceptions.InputError(f'scale must be positive, got {scale}')
    logit_stream, label_stream = [np.random.Generator(np.random.PCG64(child))
                                  for child in np.random.SeedSequence(seed).spawn(2)]
    base = logit_sd * logit_stream.standard_normal((n_records, n_classes))
    cumulative = np.cumsum(softmax(base, axis=1), axis=1)
    draws = label_stream.random(n_records)
    labels = np.minimum((cumulative < draws[:, np.newaxis]).sum(axis=1), n_classes - 1)
    width = len(str(n_records))
    example_ids = [f'ex_{i:0{width}d}' for i in range(n_records)]
    return PredictionLog.from_logits(example_ids, scale * base, labels, name=name)
