import logging
import os
from typing import Dict, List, Optional, Tuple

import pandas as pd

from capcorr import const
from capcorr import exceptions
from capcorr import utilities
from capcorr.logger import get_logger
from capcorr.services.base.config import RunConfig
from capcorr.services.calibration import CalibrationReport, accuracy_correlations, calibration_report, \
    prediction_log_name, \
    load_prediction_log_file
from capcorr.services.ingest import BenchmarkMeta, ScoreMatrix, filter_complete, load_benchmark_meta_file, \
    load_score_file, orient, standardize, validate_meta
from capcorr.services.pca import CapabilitiesModel, component_correlations, fit_capabilities_component
from capcorr.services.report import AnalysisBundle, BandThresholds, scatter_data, write_report
from capcorr.services.stats import capabilities_correlation, compute_correlation, correlation_matrix, \
    load_compute_table


class AnalysisInputs:

    def __init__(self, matrix: ScoreMatrix, meta: List[BenchmarkMeta], input_digests: Dict[str, str],
                 compute: Optional[pd.DataFrame] = None):
        """The loaded inputs of one analysis
        Args:
            matrix: Raw scores in benchmark-native units
            meta: Metadata for every benchmark of the matrix
            input_digests: sha256 of every input file, keyed by role
            compute: params and train_tokens per model, when a compute table was given
        """
        self.matrix = matrix
        self.meta = meta
        self.meta_map = validate_meta(matrix.benchmarks, meta)
        self.oriented = orient(matrix, meta)
        self.input_digests = input_digests
        self.compute = compute

    @property
    def capability_benchmarks(self) -> List[str]:
        return [b for b in self.matrix.benchmarks if self.meta_map[b].is_capability]

    @property
    def safety_benchmarks(self) -> List[str]:
        return [b for b in self.matrix.benchmarks if not self.meta_map[b].is_capability]


def input_digests(config: RunConfig) -> Dict[str, str]:
    """Fingerprint the data files of a run; fitted models and bundles are derived data and are left out"""
    digests = {}
    check_log_names(config.logs)
    for role in ('scores', 'meta', 'compute'):
        path = getattr(config, role)
        if path:
            digests[role] = utilities.get_filepath_sha256_hash(path)
    for path in config.logs:
        digests[f'logs/{prediction_log_name(path)}'] = utilities.get_filepath_sha256_hash(path)
    return digests


def check_log_names(paths: List[str]) -> None:
    """Prediction logs are named after their files; two logs with the same name would overwrite each other's
    report, export rows and digest"""
    seen = {}
    for path in paths:
        name = prediction_log_name(path)
        if name in seen:
            raise exceptions.InputError(f'prediction logs {seen[name]} and {path} are both named {name}; rename one '
                                        f'of them')
        seen[name] = path


def load_inputs(config: RunConfig) -> AnalysisInputs:
    """Read the score table, the metadata and the optional compute table named by a config
    Args:
        config: The run configuration; scores and meta are required
    Returns:
        `AnalysisInputs`
    """
    config.require(['scores', 'meta'])
    matrix = load_score_file(config.scores, config.layout)
    meta = load_benchmark_meta_file(config.meta)
    compute = load_compute_table(config.compute) if config.compute else None
    return AnalysisInputs(matrix, meta, input_digests(config), compute=compute)


def capability_matrix(inputs: AnalysisInputs, excluded_benchmarks: List[str], policy: str) -> ScoreMatrix:
    """Select the oriented capability columns that feed the capabilities component and remove missingness
    Args:
        inputs: The loaded inputs
        excluded_benchmarks: Capability benchmarks to leave out of the fit
        policy: strict, drop_models or drop_benchmarks
    Returns:
        A complete `ScoreMatrix` with its `FilterReport` attached
    """
    capability = inputs.capability_benchmarks
    not_capability = [b for b in excluded_benchmarks if b not in capability]
    if not_capability:
        raise exceptions.InputError(f'only capability benchmarks can be excluded; got {", ".join(not_capability)}')
    kept = [b for b in capability if b not in set(excluded_benchmarks)]
    if len(kept) < const.MIN_CAPABILITY_BENCHMARKS:
        raise exceptions.InputError(f'{len(kept)} capability benchmark(s) remain after exclusions; need at least '
                                    f'{const.MIN_CAPABILITY_BENCHMARKS}')
    return filter_complete(inputs.oriented.select_benchmarks(kept), policy)


def fit_model(inputs: AnalysisInputs, config: RunConfig) -> CapabilitiesModel:
    """Fit the capabilities component on the configured capability benchmarks
    Args:
        inputs: The loaded inputs
        config: The run configuration
    Returns:
        A `CapabilitiesModel`
    """
    excluded = list(dict.fromkeys(config.exclude))
    filtered = capability_matrix(inputs, excluded, config.policy)
    return fit_capabilities_component(standardize(filtered), solver=config.solver,
                                      max_iterations=config.max_iterations, tolerance=config.tolerance,
                                      excluded_benchmarks=excluded)


def check_model(model: CapabilitiesModel, filtered: ScoreMatrix) -> None:
    if tuple(model.benchmarks) != tuple(filtered.benchmarks) or tuple(model.models) != tuple(filtered.models):
        raise exceptions.InputError('the capabilities model was not fitted on these scores; its benchmarks or models '
                                    'differ from the filtered score table')


def calibration_reports(config: RunConfig, logger: Optional[logging.Logger] = None) -> List[CalibrationReport]:
    """Calibration reports for every prediction log of a config
    Args:
        config: The run configuration
        logger: Where progress goes
    Returns:
        One `CalibrationReport` per log, in the order given
    """
    reports = []
    check_log_names(config.logs)
    for path in config.logs:
        log = load_prediction_log_file(path)
        report = calibration_report(log, scheme=config.scheme, bin_count=config.bins, temperature=config.temperature)
        if logger:
            logger.info(f'{report.name}: accuracy {report.accuracy:.4f}, brier {report.brier:.4f}, '
                        f'rmsce {report.rmsce:.4f}, ece {report.ece:.4f}.')
        reports.append(report)
    return reports


def calibration_document(reports: List[CalibrationReport]) -> Dict:
    correlations = None
    if len(reports) >= const.MIN_CORRELATION_PAIRS:
        correlations = accuracy_correlations(reports)
    return dict(reports=[report.to_dict() for report in reports], accuracy_correlations=correlations)


def calibration_section(config: RunConfig, logger: Optional[logging.Logger] = None) -> Optional[Dict]:
    if not config.logs:
        return None
    return calibration_document(calibration_reports(config, logger))


def assemble_bundle(inputs: AnalysisInputs, model: CapabilitiesModel, config: RunConfig,
                    logger: Optional[logging.Logger] = None) -> AnalysisBundle:
    """Correlate every safety benchmark with a fitted capabilities score and collect the results
    Args:
        inputs: The loaded inputs
        model: The capabilities model, fitted on these inputs
        config: The run configuration
        logger: Where progress goes
    Returns:
        An `AnalysisBundle`
    """
    if config.exclude and list(dict.fromkeys(config.exclude)) != list(model.excluded_benchmarks):
        raise exceptions.InputError(f'--exclude {",".join(config.exclude)} does not match the exclusions the '
                                    f'capabilities model was fitted with ({",".join(model.excluded_benchmarks)})')
    filtered = capability_matrix(inputs, list(model.excluded_benchmarks), config.policy)
    check_model(model, filtered)
    thresholds = BandThresholds.create(config.high_band, config.moderate_band, config.negative_band)
    cap_scores = model.score_series()
    safety = inputs.safety_benchmarks
    if safety:
        config.require_seed()

    notes = []
    correlations, scatter = [], []
    for benchmark in safety:
        column = inputs.oriented.column(benchmark)
        result = capabilities_correlation(cap_scores, column, inputs.meta_map[benchmark],
                                          resamples=config.bootstrap, seed=config.seed, workers=config.workers,
                                          thresholds=thresholds)
        if logger:
            logger.info(f'{benchmark}: rho {result.spearman_rho:.4f} over {result.n_pairs} models ({result.band}).')
        if result.dropped_models:
            notes.append(f'{benchmark}: pairwise deletion left out {", ".join(result.dropped_models)}')
        if result.bootstrap_ci is None:
            notes.append(f'{benchmark}: no bootstrap interval, fewer than {const.MIN_BOOTSTRAP_PAIRS} paired models')
        correlations.append(result)
        scatter.append(scatter_data(cap_scores, column, benchmark))

    kept = [b for b in inputs.capability_benchmarks if b not in set(model.excluded_benchmarks)]
    matrix = correlation_matrix(inputs.oriented.select_benchmarks(kept).to_frame())
    compute = None
    if inputs.compute is not None:
        compute = compute_correlation(cap_scores, inputs.compute)
        if logger:
            logger.info(f'Training compute: rho {compute.spearman_rho:.4f} over {compute.n_pairs} models.')

    provenance = dict(
        tool_version=const.VERSION,
        schema_version=const.REPORT_SCHEMA_VERSION,
        seed=config.seed,
        bootstrap_resamples=config.bootstrap,
        input_digests=dict(inputs.input_digests),
        filter=filtered.filter_report.to_dict(),
        excluded_benchmarks=list(model.excluded_benchmarks),
        bands=thresholds.to_dict(),
        notes=notes
    )
    return AnalysisBundle.from_parts(
        capabilities=model,
        component_correlations=component_correlations(model, filtered),
        correlations=correlations,
        correlation_matrix=matrix,
        scatter=scatter,
        provenance=provenance,
        compute=compute,
        calibration=calibration_section(config, logger)
    )


def analyze(config: RunConfig, logger: Optional[logging.Logger] = None) -> Tuple[CapabilitiesModel, AnalysisBundle]:
    """Orient, filter, standardize, fit, score, correlate and write (when an output directory is set)
    Args:
        config: The run configuration
        logger: Where progress goes
    Returns:
        The fitted `CapabilitiesModel` and the `AnalysisBundle`
    """
    inputs = load_inputs(config)
    model = fit_model(inputs, config)
    if logger:
        logger.info(f'Fitted the capabilities component on {len(model.benchmarks)} benchmarks and '
                    f'{len(model.models)} models; explained variance {model.explained_variance_ratio:.4f}.')
    bundle = assemble_bundle(inputs, model, config, logger)
    if config.out:
        utilities.write_text_file(os.path.join(config.out, const.CAPABILITIES_MODEL_NAME), model.to_json())
        for path in write_report(bundle, config.out):
            if logger:
                logger.debug(f'Wrote {path}')
    return model, bundle


def exit_status(error: Exception) -> int:
    """0 for success, 1 for bad input or unwritable output, 2 for numerical failure"""
    if isinstance(error, exceptions.NumericError):
        return 2
    if isinstance(error, (exceptions.InputError, exceptions.WriteReportError)):
        return 1
    raise error


def run_pipeline(config: RunConfig, logger: Optional[logging.Logger] = None) -> \
        Tuple[Optional[AnalysisBundle], int]:
    """Run a whole analysis and report how it ended
    Args:
        config: The run configuration
        logger: Where progress and errors go
    Returns:
        The `AnalysisBundle` (None on failure) and the exit status
    """
    if logger is None:
        logger = get_logger('pipeline')
    try:
        _, bundle = analyze(config, logger)
    except (exceptions.InputError, exceptions.NumericError, exceptions.WriteReportError) as e:
        logger.error(str(e))
        return None, exit_status(e)
    return bundle, 0
