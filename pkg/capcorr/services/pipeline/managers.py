import json
import logging
import os
from typing import List, Optional

from capcorr import const
from capcorr import utilities
from capcorr.logger import get_logger
from capcorr.services.base.config import RunConfig
from capcorr.services.pca import CapabilitiesModel
from capcorr.services.pipeline import analysis
from capcorr.services.report import load_bundle, render_report, write_report
from capcorr.services.calibration import export_safety_scores
from capcorr.services.synth import SyntheticSpec, generate_population


class BaseManager:

    def __init__(self, name: str, verbose: Optional[bool] = False, stdout: Optional[bool] = True):
        """
        Args:
            name: The name of the manager, used by its logger
            verbose: Include detailed debug messages
            stdout: Print diagnostics to the console (standard error)
        """
        log_level = None
        if verbose:
            log_level = logging.DEBUG
        self.name = name
        self.stdout = stdout
        self.verbose = verbose
        self.logger = get_logger(str(name), level=log_level, stdout=stdout)

    def load_config(self, config: Optional[str], **overrides) -> RunConfig:
        run_config = RunConfig.load(config, overrides)
        self.logger.debug(f'Settings: {json.dumps(run_config.data, sort_keys=True)}')
        return run_config


class AnalyzeManager(BaseManager):

    def __init__(self, verbose: Optional[bool] = False, stdout: Optional[bool] = True):
        """Run the full analysis: capabilities component, safety correlations and report
        Args:
            verbose: Include detailed debug messages
            stdout: Print diagnostics to the console (standard error)
        """
        super().__init__('analyze', verbose=verbose, stdout=stdout)

    def analyze(self, config: Optional[str] = None, scores: Optional[str] = None, meta: Optional[str] = None,
                layout: Optional[str] = None, exclude: Optional[List[str]] = None, policy: Optional[str] = None,
                solver: Optional[str] = None, max_iterations: Optional[int] = None, tolerance: Optional[float] = None,
                bootstrap: Optional[int] = None, seed: Optional[int] = None,
                workers: Optional[int] = None, compute: Optional[str] = None, logs: Optional[List[str]] = None,
                bins: Optional[int] = None, scheme: Optional[str] = None, temperature: Optional[bool] = False,
                high_band: Optional[float] = None, moderate_band: Optional[float] = None,
                negative_band: Optional[float] = None, out: Optional[str] = None) -> Optional[str]:
        """Score every model on the capabilities component and correlate each safety benchmark with it
        Args:
            config: A JSON or YAML file of settings; flags override it
            scores: The model x benchmark score table (CSV)
            meta: The benchmark metadata (JSON)
            layout: long or wide; detected from the header when omitted
            exclude: Capability benchmarks to leave out of the capabilities score (comma-separated or repeated)
            policy: Missing-cell policy; strict, drop_models or drop_benchmarks
            solver: Eigensolver; eigh or power
            max_iterations: Iteration cap of the power solver
            tolerance: Convergence tolerance of the power solver
            bootstrap: Bootstrap resamples for the Spearman interval (at least 1000)
            seed: Seed for the bootstrap; required when there are safety benchmarks
            workers: Bootstrap threads
            compute: A model,params,train_tokens table to correlate with the capabilities score
            logs: Prediction logs (JSON Lines) to add calibration reports for
            bins: Calibration bins
            scheme: Calibration binning scheme; equal_mass or equal_width
            temperature: Fit a temperature for every prediction log
            high_band: Lowest correlation in the High band
            moderate_band: Lowest correlation in the Moderate band
            negative_band: Highest correlation in the Negative band
            out: Output directory for capabilities.json, report.json, report.md and scatter CSVs
        Returns:
            The report JSON when no output directory is given
        """
        run_config = self.load_config(config, scores=scores, meta=meta, layout=layout, exclude=exclude,
                                      policy=policy, solver=solver, max_iterations=max_iterations, tolerance=tolerance,
                                      bootstrap=bootstrap, seed=seed, workers=workers, compute=compute, logs=logs,
                                      bins=bins, scheme=scheme, temperature=temperature,
                                      high_band=high_band, moderate_band=moderate_band, negative_band=negative_band,
                                      out=out)
        _, bundle = analysis.analyze(run_config, self.logger)
        if run_config.out:
            self.logger.info(f'Report written to {run_config.out}.')
            return None
        return render_report(bundle, 'json')


class PcaManager(BaseManager):

    def __init__(self, verbose: Optional[bool] = False, stdout: Optional[bool] = True):
        """Fit the capabilities component
        Args:
            verbose: Include detailed debug messages
            stdout: Print diagnostics to the console (standard error)
        """
        super().__init__('pca', verbose=verbose, stdout=stdout)

    def fit(self, config: Optional[str] = None, scores: Optional[str] = None, meta: Optional[str] = None,
            layout: Optional[str] = None, exclude: Optional[List[str]] = None, policy: Optional[str] = None,
            solver: Optional[str] = None, max_iterations: Optional[int] = None, tolerance: Optional[float] = None,
            out: Optional[str] = None) -> Optional[str]:
        """Fit the first principal component of the standardized capability benchmarks
        Args:
            config: A JSON or YAML file of settings; flags override it
            scores: The model x benchmark score table (CSV)
            meta: The benchmark metadata (JSON)
            layout: long or wide; detected from the header when omitted
            exclude: Capability benchmarks to leave out of the capabilities score
            policy: Missing-cell policy; strict, drop_models or drop_benchmarks
            solver: Eigensolver; eigh or power
            max_iterations: Iteration cap of the power solver
            tolerance: Convergence tolerance of the power solver
            out: Output directory for capabilities.json
        Returns:
            The capabilities model JSON when no output directory is given
        """
        run_config = self.load_config(config, scores=scores, meta=meta, layout=layout, exclude=exclude,
                                      policy=policy, solver=solver, max_iterations=max_iterations, tolerance=tolerance,
                                      out=out)
        inputs = analysis.load_inputs(run_config)
        model = analysis.fit_model(inputs, run_config)
        self.logger.info(f'Explained variance {model.explained_variance_ratio:.4f} over '
                         f'{len(model.benchmarks)} benchmarks.')
        if run_config.out:
            path = os.path.join(run_config.out, const.CAPABILITIES_MODEL_NAME)
            utilities.write_text_file(path, model.to_json())
            self.logger.info(f'Capabilities model written to {path}.')
            return None
        return model.to_json()


class CorrelateManager(BaseManager):

    def __init__(self, verbose: Optional[bool] = False, stdout: Optional[bool] = True):
        """Correlate safety benchmarks with a fitted capabilities component
        Args:
            verbose: Include detailed debug messages
            stdout: Print diagnostics to the console (standard error)
        """
        super().__init__('correlate', verbose=verbose, stdout=stdout)

    def correlate(self, config: Optional[str] = None, model: Optional[str] = None, scores: Optional[str] = None,
                  meta: Optional[str] = None, layout: Optional[str] = None, policy: Optional[str] = None,
                  bootstrap: Optional[int] = None, seed: Optional[int] = None, workers: Optional[int] = None,
                  compute: Optional[str] = None, logs: Optional[List[str]] = None, bins: Optional[int] = None,
                  scheme: Optional[str] = None, temperature: Optional[bool] = False,
                  high_band: Optional[float] = None, moderate_band: Optional[float] = None,
                  negative_band: Optional[float] = None, out: Optional[str] = None) -> Optional[str]:
        """Correlate every safety benchmark with the scores of a saved capabilities model
        Args:
            config: A JSON or YAML file of settings; flags override it
            model: A capabilities.json written by the pca subcommand
            scores: The score table the model was fitted on (CSV)
            meta: The benchmark metadata (JSON)
            layout: long or wide; detected from the header when omitted
            policy: The missing-cell policy the model was fitted with
            bootstrap: Bootstrap resamples for the Spearman interval (at least 1000)
            seed: Seed for the bootstrap; required when there are safety benchmarks
            workers: Bootstrap threads
            compute: A model,params,train_tokens table to correlate with the capabilities score
            logs: Prediction logs (JSON Lines) to add calibration reports for
            bins: Calibration bins
            scheme: Calibration binning scheme; equal_mass or equal_width
            temperature: Fit a temperature for every prediction log
            high_band: Lowest correlation in the High band
            moderate_band: Lowest correlation in the Moderate band
            negative_band: Highest correlation in the Negative band
            out: Output directory for report.json
        Returns:
            The report JSON when no output directory is given
        """
        run_config = self.load_config(config, model=model, scores=scores, meta=meta, layout=layout, policy=policy,
                                      bootstrap=bootstrap, seed=seed, workers=workers, compute=compute, logs=logs,
                                      bins=bins, scheme=scheme, temperature=temperature, high_band=high_band,
                                      moderate_band=moderate_band, negative_band=negative_band, out=out)
        run_config.require(['model'])
        capabilities = CapabilitiesModel.load(run_config.model)
        inputs = analysis.load_inputs(run_config)
        bundle = analysis.assemble_bundle(inputs, capabilities, run_config, self.logger)
        document = render_report(bundle, 'json')
        if run_config.out:
            path = os.path.join(run_config.out, const.REPORT_JSON_NAME)
            utilities.write_text_file(path, document)
            self.logger.info(f'Analysis bundle written to {path}.')
            return None
        return document


class ReportManager(BaseManager):

    def __init__(self, verbose: Optional[bool] = False, stdout: Optional[bool] = True):
        """Render a saved analysis bundle
        Args:
            verbose: Include detailed debug messages
            stdout: Print diagnostics to the console (standard error)
        """
        super().__init__('report', verbose=verbose, stdout=stdout)

    def render(self, config: Optional[str] = None, bundle: Optional[str] = None, format: Optional[str] = None,
               out: Optional[str] = None) -> Optional[str]:
        """Render report.json, report.md and the scatter CSVs from a bundle
        Args:
            config: A JSON or YAML file of settings; flags override it
            bundle: A report.json written by the correlate or analyze subcommand
            format: json or markdown; the document printed when no output directory is given
            out: Output directory
        Returns:
            The rendered document when no output directory is given
        """
        run_config = self.load_config(config, bundle=bundle, out=out)
        run_config.require(['bundle'])
        analysis_bundle = load_bundle(run_config.bundle)
        if run_config.out:
            for path in write_report(analysis_bundle, run_config.out):
                self.logger.debug(f'Wrote {path}')
            self.logger.info(f'Report written to {run_config.out}.')
            return None
        return render_report(analysis_bundle, format or 'markdown')


class CalibrateManager(BaseManager):

    def __init__(self, verbose: Optional[bool] = False, stdout: Optional[bool] = True):
        """Calibration metrics for prediction logs
        Args:
            verbose: Include detailed debug messages
            stdout: Print diagnostics to the console (standard error)
        """
        super().__init__('calibrate', verbose=verbose, stdout=stdout)

    def calibrate(self, config: Optional[str] = None, logs: Optional[List[str]] = None, bins: Optional[int] = None,
                  scheme: Optional[str] = None, temperature: Optional[bool] = False, seed: Optional[int] = None,
                  out: Optional[str] = None, export: Optional[str] = None) -> Optional[str]:
        """Brier score, RMSCE, ECE and the Brier decomposition of every prediction log
        Args:
            config: A JSON or YAML file of settings; flags override it
            logs: Prediction logs (JSON Lines), one per model
            bins: Number of confidence bins
            scheme: equal_mass or equal_width (hyphens accepted)
            temperature: Also fit a temperature and report the tuned metrics
            seed: Accepted for config compatibility; calibration has no randomized stage
            out: Output file for the calibration JSON
            export: Output file for the safety-oriented scores as a model,benchmark,score table
        Returns:
            The calibration JSON when no output file is given
        """
        run_config = self.load_config(config, logs=logs, bins=bins, scheme=scheme, temperature=temperature,
                                      seed=seed, out=out, export=export)
        run_config.require(['logs'])
        reports = analysis.calibration_reports(run_config, self.logger)
        document = utilities.dumps_json(analysis.calibration_document(reports))
        if run_config.export:
            utilities.write_text_file(run_config.export, export_safety_scores(reports))
            self.logger.info(f'Safety scores written to {run_config.export}.')
        if run_config.out:
            utilities.write_text_file(run_config.out, document)
            self.logger.info(f'Calibration report written to {run_config.out}.')
            return None
        return document


class SimulateManager(BaseManager):

    def __init__(self, verbose: Optional[bool] = False, stdout: Optional[bool] = True):
        """Synthetic benchmark populations
        Args:
            verbose: Include detailed debug messages
            stdout: Print diagnostics to the console (standard error)
        """
        super().__init__('simulate', verbose=verbose, stdout=stdout)

    def simulate(self, config: Optional[str] = None, spec: Optional[str] = None, seed: Optional[int] = None,
                 layout: Optional[str] = None, out: Optional[str] = None) -> Optional[str]:
        """Draw a score table from a one-factor population spec
        Args:
            config: A JSON or YAML file of settings; flags override it
            spec: The population spec (JSON)
            seed: Root seed; falls back to the seed in the spec
            layout: long (default) or wide
            out: Output CSV; the metadata, ground truth and compute table are written next to it
        Returns:
            The score table when no output file is given
        """
        run_config = self.load_config(config, spec=spec, seed=seed, layout=layout, out=out)
        run_config.require(['spec'])
        population = generate_population(SyntheticSpec.load(run_config.spec), seed=run_config.seed)
        self.logger.info(f'Generated {len(population.matrix.models)} models x '
                         f'{len(population.matrix.benchmarks)} benchmarks with seed {population.seed}.')
        if run_config.layout == 'wide':
            table = population.matrix.to_wide_csv()
        else:
            table = population.matrix.to_long_csv()
        if not run_config.out:
            return table
        stem = os.path.splitext(run_config.out)[0]
        utilities.write_text_file(run_config.out, table)
        utilities.write_text_file(f'{stem}.meta.json', population.meta_json())
        utilities.write_text_file(f'{stem}.truth.json', population.truth_json())
        compute_table = population.compute_csv()
        if compute_table is not None:
            utilities.write_text_file(f'{stem}.compute.csv', compute_table)
        self.logger.info(f'Population written to {run_config.out}.')
        return None
