import json
import os
from typing import Dict, Iterable, Optional

from marshmallow import Schema, ValidationError, fields, pre_load, validate, validates_schema
from yaml import SafeLoader
from yaml import load
from yaml import YAMLError

from capcorr import const
from capcorr import exceptions
from capcorr import utilities
from capcorr.services.base import schemas


class RunConfigSchema(Schema):
    scores = fields.String(load_default=None, allow_none=True)
    meta = fields.String(load_default=None, allow_none=True)
    model = fields.String(load_default=None, allow_none=True)
    bundle = fields.String(load_default=None, allow_none=True)
    compute = fields.String(load_default=None, allow_none=True)
    spec = fields.String(load_default=None, allow_none=True)
    export = fields.String(load_default=None, allow_none=True)
    logs = fields.List(fields.String(), load_default=list)
    exclude = fields.List(fields.String(), load_default=list)
    layout = fields.String(load_default=None, allow_none=True, validate=validate.OneOf(['long', 'wide']))
    policy = fields.String(load_default=const.DEFAULT_FILTER_POLICY, validate=validate.OneOf(const.FILTER_POLICIES))
    solver = fields.String(load_default=const.DEFAULT_EIGENSOLVER, validate=validate.OneOf(const.EIGENSOLVERS))
    max_iterations = fields.Integer(load_default=const.POWER_ITERATION_MAX_ITERATIONS, validate=validate.Range(min=1))
    tolerance = fields.Float(load_default=const.POWER_ITERATION_TOLERANCE,
                             validate=validate.Range(min=0, min_inclusive=False))
    bootstrap = fields.Integer(load_default=const.DEFAULT_BOOTSTRAP_RESAMPLES,
                               validate=validate.Range(min=const.MIN_BOOTSTRAP_RESAMPLES))
    seed = fields.Integer(load_default=None, allow_none=True, validate=validate.Range(min=0))
    workers = fields.Integer(load_default=1, validate=validate.Range(min=1))
    bins = fields.Integer(load_default=const.DEFAULT_BIN_COUNT, validate=validate.Range(min=2))
    scheme = fields.String(load_default=const.DEFAULT_BIN_SCHEME, validate=validate.OneOf(const.BIN_SCHEMES))
    temperature = fields.Boolean(load_default=False)
    out = fields.String(load_default=None, allow_none=True)
    high_band = fields.Float(load_default=const.HIGH_BAND_THRESHOLD)
    moderate_band = fields.Float(load_default=const.MODERATE_BAND_THRESHOLD)
    negative_band = fields.Float(load_default=const.NEGATIVE_BAND_THRESHOLD)

    @pre_load
    def normalize_spellings(self, data, **kwargs):
        data = dict(data)
        for key in list(data):
            if '-' in key:
                data[key.replace('-', '_')] = data.pop(key)
        for key in ('scheme', 'policy'):
            if isinstance(data.get(key), str):
                data[key] = data[key].strip().lower().replace('-', '_')
        for key in ('exclude', 'logs'):
            value = data.get(key)
            if isinstance(value, str):
                value = [value]
            if isinstance(value, (list, tuple)):
                data[key] = [item.strip() for entry in value for item in str(entry).split(',') if item.strip()]
        return data

    @validates_schema
    def validate_bands(self, data, **kwargs):
        if not -1.0 <= data['negative_band'] < data['moderate_band'] < data['high_band'] <= 1.0:
            raise ValidationError('band thresholds must satisfy -1 <= negative < moderate < high <= 1')


class RunConfig(schemas.SchemaToObject):

    def __init__(self, json_data: Optional[Dict] = None, source: Optional[str] = '<config>'):
        """Settings for one pipeline run; every value not given falls back to the defaults in `capcorr.const`

        Args:
            json_data: A dictionary of settings; keys may use hyphens or underscores
            source: Where the settings came from, used in error messages
        """
        self.scores = None
        self.meta = None
        self.model = None
        self.bundle = None
        self.compute = None
        self.spec = None
        self.export = None
        self.logs = []
        self.exclude = []
        self.layout = None
        self.policy = const.DEFAULT_FILTER_POLICY
        self.solver = const.DEFAULT_EIGENSOLVER
        self.max_iterations = const.POWER_ITERATION_MAX_ITERATIONS
        self.tolerance = const.POWER_ITERATION_TOLERANCE
        self.bootstrap = const.DEFAULT_BOOTSTRAP_RESAMPLES
        self.seed = None
        self.workers = 1
        self.bins = const.DEFAULT_BIN_COUNT
        self.scheme = const.DEFAULT_BIN_SCHEME
        self.temperature = False
        self.out = None
        self.high_band = const.HIGH_BAND_THRESHOLD
        self.moderate_band = const.MODERATE_BAND_THRESHOLD
        self.negative_band = const.NEGATIVE_BAND_THRESHOLD
        self.source = source
        try:
            super().__init__(dict(json_data or {}), RunConfigSchema())
        except ValidationError as e:
            raise exceptions.ReadConfigError(f'{source}: {schemas.format_validation_error(e)}')

    @classmethod
    def load(cls, path: Optional[str] = None, overrides: Optional[Dict] = None) -> 'RunConfig':
        """Read a JSON or YAML config file and apply overrides on top of it
        Args:
            path: A .json, .yml or .yaml file; optional
            overrides: Settings that win over the file (usually command-line flags); None values are ignored
        Returns:
            A validated `RunConfig`
        """
        data = {}
        if path:
            data = read_config_file(path)
        for key, value in (overrides or {}).items():
            if value is None or value is False or (isinstance(value, (list, tuple)) and not value):
                continue
            data[key.replace('-', '_')] = value
        return cls(data, source=path or '<flags>')

    def require(self, names: Iterable[str]) -> None:
        missing = [name for name in names if not getattr(self, name)]
        if missing:
            raise exceptions.ReadConfigError(f'{self.source}: missing required setting(s): '
                                             f'{", ".join("--" + name for name in missing)}')

    def require_seed(self) -> int:
        if self.seed is None:
            raise exceptions.ReadConfigError(f'{self.source}: this run has randomized steps; --seed is required')
        return self.seed

    def band_thresholds(self) -> Dict:
        return dict(high=self.high_band, moderate=self.moderate_band, negative=self.negative_band)


def read_config_file(path: str) -> Dict:
    """Decode a config file; .yml and .yaml files are parsed as YAML, anything else as JSON
    Args:
        path: The config file path
    Returns:
        The decoded mapping
    """
    try:
        f = utilities.open_input_file(path, 'r')
    except exceptions.InputError as e:
        raise exceptions.ReadConfigError(str(e))
    with f:
        try:
            if os.path.splitext(path)[1].lower() in ('.yml', '.yaml'):
                data = load(f, Loader=SafeLoader)
            else:
                data = json.load(f)
        except (ValueError, YAMLError) as e:
            raise exceptions.ReadConfigError(f'{path} could not be parsed; {e}')
    if not isinstance(data, dict):
        raise exceptions.ReadConfigError(f'{path} must contain a mapping of settings')
    return data
