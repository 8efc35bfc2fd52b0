import json
from typing import Dict, Type, Union

from marshmallow import Schema, fields, validate, validates_schema, ValidationError

from capcorr import const


class SchemaToObject:
    def __init__(self, json_data: Union[Dict, str], object_schema: Schema):

        if type(json_data) == dict:
            self.data = object_schema.load(json_data)
        elif type(json_data) == str:
            self.data = object_schema.loads(json_data)
        else:
            raise ValidationError("Invalid input type. must be one of: str, dict")

        for key, value in self.data.items():
            setattr(self, key, value)

    def json(self) -> str:
        return json.dumps(self.data)


def format_validation_error(e: ValidationError) -> str:
    """Flatten a marshmallow error dictionary into a single line
    Args:
        e: The `ValidationError` raised while loading
    Returns:
        A compact, deterministic description of every failing field
    """
    messages = e.messages
    if isinstance(messages, dict):
        return json.dumps(messages, sort_keys=True)
    return str(messages)


def load_or_raise(schema: Schema, data: Union[Dict, list], error_cls: Type[Exception], source: str,
                  many: bool = False):
    """Load data through a schema, re-raising validation errors as a domain exception that names the source
    Args:
        schema: The schema to load with
        data: The decoded JSON document
        error_cls: An `InputError` subclass accepting a single message argument
        source: A description of where the data came from (usually a path)
        many: If True, data is a list of objects
    Returns:
        The deserialized data
    """
    try:
        return schema.load(data, many=many)
    except ValidationError as e:
        raise error_cls(f'{source}: {format_validation_error(e)}')


class BenchmarkMetaSchema(Schema):
    id = fields.String(required=True, validate=validate.Length(1))
    direction = fields.String(required=True, validate=validate.OneOf(const.DIRECTIONS))
    role = fields.String(required=True, validate=validate.OneOf(const.ROLES))
    unit = fields.String(required=False, load_default='')


class PredictionRecordSchema(Schema):
    example_id = fields.String(required=True)
    probs = fields.List(fields.Float(allow_nan=False), required=False, load_default=None)
    logits = fields.List(fields.Float(allow_nan=False), required=False, load_default=None)
    label = fields.Integer(required=True, strict=True, validate=validate.Range(min=0))

    @validates_schema
    def validate_prediction(self, data, **kwargs):
        probs, logits = data.get('probs'), data.get('logits')
        if probs is None and logits is None:
            raise ValidationError('one of "probs" or "logits" is required')
        if probs is not None and logits is not None and len(probs) != len(logits):
            raise ValidationError('"probs" and "logits" must have the same length')


class SafetySpecSchema(Schema):
    id = fields.String(required=True, validate=validate.Length(1))
    loading = fields.Float(required=True, validate=validate.Range(-1.0, 1.0))
    distinct_factor_weight = fields.Float(required=False, load_default=0.0, validate=validate.Range(min=0.0))
    noise_sd = fields.Float(required=False, load_default=None, allow_none=True, validate=validate.Range(min=0.0))
    direction = fields.String(required=False, load_default=const.HIGHER_BETTER,
                              validate=validate.OneOf(const.DIRECTIONS))
    scale = fields.Float(required=False, load_default=1.0, validate=validate.Range(min=0.0, min_inclusive=False))
    offset = fields.Float(required=False, load_default=0.0)
    unit = fields.String(required=False, load_default='')


class ComputeSpecSchema(Schema):
    log10_flop_mean = fields.Float(required=False, load_default=22.0)
    log10_flop_sd = fields.Float(required=False, load_default=1.0,
                                 validate=validate.Range(min=0.0, min_inclusive=False))
    noise_sd = fields.Float(required=False, load_default=0.1, validate=validate.Range(min=0.0))


class SyntheticSpecSchema(Schema):
    n_models = fields.Integer(required=True, strict=True, validate=validate.Range(min=const.MIN_SYNTHETIC_MODELS))
    capability_loadings = fields.List(fields.Float(validate=validate.Range(0.0, 1.0)), required=True,
                                      validate=validate.Length(min=1))
    capability_ids = fields.List(fields.String(validate=validate.Length(1)), required=False, load_default=None)
    capability_noise_sd = fields.List(fields.Float(validate=validate.Range(min=0.0)), required=False,
                                      load_default=None)
    safety_specs = fields.List(fields.Nested(SafetySpecSchema), required=False, load_default=list)
    compute = fields.Nested(ComputeSpecSchema, required=False, load_default=None, allow_none=True)
    seed = fields.Integer(required=False, load_default=None, allow_none=True, validate=validate.Range(min=0))

    @validates_schema
    def validate_shapes(self, data, **kwargs):
        b = len(data['capability_loadings'])
        for name in ('capability_ids', 'capability_noise_sd'):
            if data.get(name) is not None and len(data[name]) != b:
                raise ValidationError(f'"{name}" must have one entry per capability loading ({b})')


class CapabilitiesModelSchema(Schema):
    benchmarks = fields.List(fields.String(), required=True, validate=validate.Length(min=1))
    loadings = fields.List(fields.Float(allow_nan=False), required=True)
    explained_variance_ratio = fields.Float(required=True, validate=validate.Range(0.0, 1.0 + 1e-9))
    eigenvalue = fields.Float(required=True)
    column_means = fields.List(fields.Float(allow_nan=False), required=True)
    column_stds = fields.List(fields.Float(allow_nan=False), required=True)
    models = fields.List(fields.String(), required=True)
    scores = fields.List(fields.Float(allow_nan=False), required=True)
    excluded_benchmarks = fields.List(fields.String(), required=False, load_default=list)
    solver = fields.String(required=False, load_default=const.DEFAULT_EIGENSOLVER,
                           validate=validate.OneOf(const.EIGENSOLVERS))

    @validates_schema
    def validate_shapes(self, data, **kwargs):
        b = len(data['benchmarks'])
        for name in ('loadings', 'column_means', 'column_stds'):
            if len(data[name]) != b:
                raise ValidationError(f'"{name}" must have one entry per benchmark ({b})')
        if len(data['scores']) != len(data['models']):
            raise ValidationError('"scores" must have one entry per model')


class BandThresholdsSchema(Schema):
    high = fields.Float(required=True, validate=validate.Range(-1.0, 1.0))
    moderate = fields.Float(required=True, validate=validate.Range(-1.0, 1.0))
    negative = fields.Float(required=True, validate=validate.Range(-1.0, 1.0))

    @validates_schema
    def validate_order(self, data, **kwargs):
        if not data['negative'] < data['moderate'] < data['high']:
            raise ValidationError('band thresholds must satisfy negative < moderate < high')


class CorrelationResultSchema(Schema):
    benchmark = fields.String(required=True)
    direction = fields.String(required=True, validate=validate.OneOf(const.DIRECTIONS))
    unit = fields.String(required=True)
    spearman_rho = fields.Float(required=True, validate=validate.Range(-1.0, 1.0))
    pearson_r = fields.Float(required=True, validate=validate.Range(-1.0, 1.0))
    ols_slope = fields.Float(required=True)
    ols_intercept = fields.Float(required=True)
    standardized_slope = fields.Float(required=True)
    n_pairs = fields.Integer(required=True, validate=validate.Range(min=const.MIN_CORRELATION_PAIRS))
    dropped_models = fields.List(fields.String(), required=True)
    bootstrap_ci = fields.List(fields.Float(), required=True, allow_none=True,
                               validate=validate.Length(equal=2))
    bootstrap_resamples = fields.Integer(required=True)
    bootstrap_skipped = fields.Integer(required=True)
    band = fields.String(required=True)


class ScatterRowSchema(Schema):
    model = fields.String(required=True)
    capabilities_score = fields.Float(required=True)
    safety_score = fields.Float(required=True)


class ScatterTableSchema(Schema):
    benchmark = fields.String(required=True)
    rows = fields.List(fields.Nested(ScatterRowSchema), required=True)
    omitted_models = fields.List(fields.String(), required=True)


class CorrelationMatrixSchema(Schema):
    method = fields.String(required=True)
    benchmarks = fields.List(fields.String(), required=True)
    values = fields.List(fields.List(fields.Float(allow_none=True)), required=True)
    mean = fields.Float(required=True, allow_none=True)
    std = fields.Float(required=True, allow_none=True)
    flagged_pairs = fields.List(fields.List(fields.String()), required=True)


class ComputeCorrelationSchema(Schema):
    spearman_rho = fields.Float(required=True)
    n_pairs = fields.Integer(required=True)
    log10_flop = fields.Dict(keys=fields.String(), values=fields.Float(), required=True)


class FilterReportSchema(Schema):
    policy = fields.String(required=True, validate=validate.OneOf(const.FILTER_POLICIES))
    dropped_models = fields.List(fields.String(), required=True)
    dropped_benchmarks = fields.List(fields.String(), required=True)


class ProvenanceSchema(Schema):
    tool_version = fields.String(required=True)
    schema_version = fields.Integer(required=True)
    seed = fields.Integer(required=True, allow_none=True)
    bootstrap_resamples = fields.Integer(required=True)
    input_digests = fields.Dict(keys=fields.String(), values=fields.String(), required=True)
    filter = fields.Nested(FilterReportSchema, required=True)
    excluded_benchmarks = fields.List(fields.String(), required=True)
    bands = fields.Nested(BandThresholdsSchema, required=True)
    notes = fields.List(fields.String(), required=True)


class AnalysisBundleSchema(Schema):
    capabilities = fields.Nested(CapabilitiesModelSchema, required=True)
    component_correlations = fields.Dict(keys=fields.String(), values=fields.Float(), required=True)
    correlations = fields.List(fields.Nested(CorrelationResultSchema), required=True)
    correlation_matrix = fields.Nested(CorrelationMatrixSchema, required=True)
    scatter = fields.List(fields.Nested(ScatterTableSchema), required=True)
    compute = fields.Nested(ComputeCorrelationSchema, required=False, allow_none=True)
    calibration = fields.Dict(required=False, allow_none=True)
    provenance = fields.Nested(ProvenanceSchema, required=True)

    @validates_schema
    def validate_unique_benchmarks(self, data, **kwargs):
        ids = [result['benchmark'] for result in data['correlations']]
        if len(ids) != len(set(ids)):
            raise ValidationError('every safety benchmark must appear exactly once')
