from __future__ import annotations

import json
import os
from typing import BinaryIO, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from marshmallow import ValidationError
from scipy.special import softmax

from capcorr import const
from capcorr import exceptions
from capcorr import utilities
from capcorr.services.base import schemas


class PredictionLog:
    """
    Per-example predictions of one model: an N x K probability matrix, optional logits and integer labels
    """

    def __init__(self, example_ids: Sequence[str], probs: np.ndarray, labels: Sequence[int],
                 logits: Optional[np.ndarray] = None, name: Optional[str] = ''):
        """
        Args:
            example_ids: One identifier per record
            probs: An (N x K) matrix; rows sum to 1
            labels: Class indices in [0, K)
            logits: An (N x K) matrix, when the log carried logits for every record
            name: The model the predictions belong to
        """
        self.example_ids = tuple(str(e) for e in example_ids)
        self.probs = np.array(probs, dtype=float)
        self.labels = np.array(labels, dtype=int)
        self.logits = None if logits is None else np.array(logits, dtype=float)
        self.name = name or ''
        for array in (self.probs, self.labels, self.logits):
            if array is not None:
                array.setflags(write=False)
        self._validate()

    def _validate(self) -> None:
        if len(self.example_ids) == 0:
            raise exceptions.InputError('a prediction log needs at least one record')
        if self.probs.ndim != 2 or self.probs.shape[0] != len(self.example_ids):
            raise exceptions.InputError(f'probs must be an (N x K) matrix with N={len(self.example_ids)}')
        if self.probs.shape[1] < 2:
            raise exceptions.InputError('a prediction log needs at least 2 classes')
        if self.labels.shape != (self.n_records,):
            raise exceptions.InputError('there must be exactly one label per record')
        if self.logits is not None and self.logits.shape != self.probs.shape:
            raise exceptions.InputError('logits must have the same shape as probs')
        if ((self.labels < 0) | (self.labels >= self.n_classes)).any():
            raise exceptions.InputError(f'labels must lie in [0, {self.n_classes})')
        if not np.all(np.isfinite(self.probs)) or (self.probs < 0).any() or (self.probs > 1).any():
            raise exceptions.InputError('probabilities must lie in [0, 1]')
        if (np.abs(self.probs.sum(axis=1) - 1.0) > const.PROBABILITY_SUM_TOLERANCE).any():
            raise exceptions.InputError(f'probabilities must sum to 1 within {const.PROBABILITY_SUM_TOLERANCE}')

    @property
    def n_records(self) -> int:
        return self.probs.shape[0]

    @property
    def n_classes(self) -> int:
        return self.probs.shape[1]

    @property
    def has_logits(self) -> bool:
        return self.logits is not None

    @property
    def confidences(self) -> np.ndarray:
        return self.probs.max(axis=1)

    @property
    def predictions(self) -> np.ndarray:
        # np.argmax returns the lowest index among ties
        return self.probs.argmax(axis=1)

    @property
    def correct(self) -> np.ndarray:
        return (self.predictions == self.labels).astype(float)

    @property
    def accuracy(self) -> float:
        return float(self.correct.mean())

    @classmethod
    def from_logits(cls, example_ids: Sequence[str], logits: np.ndarray, labels: Sequence[int],
                    name: Optional[str] = '') -> PredictionLog:
        logits = np.asarray(logits, dtype=float)
        return cls(example_ids, softmax(logits, axis=1), labels, logits=logits, name=name)

    def to_records(self) -> List[Dict]:
        records = []
        for i, example_id in enumerate(self.example_ids):
            record = dict(example_id=example_id, probs=[float(p) for p in self.probs[i]], label=int(self.labels[i]))
            if self.logits is not None:
                record['logits'] = [float(z) for z in self.logits[i]]
            records.append(record)
        return records

    def to_jsonl(self) -> str:
        return ''.join(json.dumps(record, sort_keys=True) + '\n' for record in self.to_records())

    def __repr__(self):
        return f'PredictionLog({self.name!r}, {self.n_records} records, K={self.n_classes})'


def _record_arrays(record: Dict, line: int, n_classes: Optional[int]) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    probs, logits = record['probs'], record['logits']
    k = len(probs) if probs is not None else len(logits)
    if k < 2:
        raise exceptions.ReadPredictionLogError(f'need at least 2 classes, got {k}', line=line)
    if n_classes is not None and k != n_classes:
        raise exceptions.ReadPredictionLogError(f'record has {k} classes, earlier records have {n_classes}',
                                                line=line)
    if record['label'] >= k:
        raise exceptions.ReadPredictionLogError(f'label {record["label"]} is not a class index in [0, {k})',
                                                line=line)
    logits = None if logits is None else np.asarray(logits, dtype=float)
    if probs is None:
        return softmax(logits), logits
    probs = np.asarray(probs, dtype=float)
    if (probs < 0).any() or (probs > 1).any():
        raise exceptions.ReadPredictionLogError('probabilities must lie in [0, 1]', line=line)
    if abs(probs.sum() - 1.0) > const.PROBABILITY_SUM_TOLERANCE:
        raise exceptions.ReadPredictionLogError(f'probabilities sum to {probs.sum()!r}, not 1', line=line)
    return probs, logits


def parse_prediction_records(records: Iterable[Tuple[int, object]], name: Optional[str] = '') -> PredictionLog:
    """Validate decoded records and assemble a `PredictionLog`
    Args:
        records: (line number, decoded JSON value) pairs
        name: The model the predictions belong to
    Returns:
        A `PredictionLog`; logits are kept only when every record carried them
    """
    schema = schemas.PredictionRecordSchema()
    ids, probs, logits, labels = [], [], [], []
    n_classes = None
    for line, raw in records:
        if not isinstance(raw, dict):
            raise exceptions.ReadPredictionLogError('each record must be a JSON object', line=line)
        try:
            record = schema.load(raw)
        except ValidationError as e:
            raise exceptions.ReadPredictionLogError(schemas.format_validation_error(e), line=line)
        p, z = _record_arrays(record, line, n_classes)
        n_classes = len(p)
        ids.append(record['example_id'])
        probs.append(p)
        logits.append(z)
        labels.append(record['label'])
    if not ids:
        raise exceptions.ReadPredictionLogError('the log has no records')
    all_logits = None if any(z is None for z in logits) else np.vstack(logits)
    return PredictionLog(ids, np.vstack(probs), labels, logits=all_logits, name=name)


def load_prediction_log(source: BinaryIO, name: Optional[str] = '') -> PredictionLog:
    """Read a JSON Lines prediction log: one {"example_id", "probs" or "logits", "label"} object per line
    Args:
        source: A binary stream of UTF-8 JSON Lines; blank lines are ignored
        name: The model the predictions belong to
    Returns:
        A `PredictionLog`
    """
    def decoded():
        for i, raw_line in enumerate(source):
            try:
                text = raw_line.decode('utf-8').strip()
            except UnicodeDecodeError as e:
                raise exceptions.ReadPredictionLogError(f'not UTF-8; {e}', line=i + 1)
            if not text:
                continue
            try:
                yield i + 1, json.loads(text)
            except ValueError as e:
                raise exceptions.ReadPredictionLogError(f'invalid JSON; {e}', line=i + 1)

    return parse_prediction_records(decoded(), name=name)


def prediction_log_name(path: str) -> str:
    base = os.path.basename(path)
    for suffix in ('.jsonl', '.json'):
        if base.endswith(suffix):
            return base[:-len(suffix)]
    return base


def load_prediction_log_file(path: str, name: Optional[str] = None) -> PredictionLog:
    """Read a prediction log from disk
    Args:
        path: The JSON Lines file
        name: The model name; defaults to the file name without its extension
    Returns:
        A `PredictionLog`
    """
    try:
        f = utilities.open_input_file(path, 'rb')
    except exceptions.InputError as e:
        raise exceptions.ReadPredictionLogError(str(e))
    with f:
        try:
            return load_prediction_log(f, name=name or prediction_log_name(path))
        except exceptions.ReadPredictionLogError as e:
            raise exceptions.ReadPredictionLogError(f'{path}; {e.detail}', line=e.line)
