from __future__ import annotations

import hashlib
import json
import os
from collections import Counter
from typing import Dict, Iterable, List, Optional

import tabulate

from capcorr import const
from capcorr import exceptions
from capcorr import utilities
from capcorr.services.base import schemas
from capcorr.services.report.scatter import ScatterTable


class AnalysisBundle:
    """
    Everything one analysis produced, as schema-validated plain data
    """

    def __init__(self, data: Dict, source: Optional[str] = '<bundle>'):
        """
        Args:
            data: A dictionary matching `AnalysisBundleSchema`
            source: A description of where the data came from, used in error messages
        """
        self.data = schemas.load_or_raise(schemas.AnalysisBundleSchema(), data, exceptions.InputError, source)

    @classmethod
    def from_parts(cls, capabilities, component_correlations: Dict[str, float], correlations: Iterable,
                   correlation_matrix, scatter: Iterable[ScatterTable], provenance: Dict, compute=None,
                   calibration: Optional[Dict] = None) -> AnalysisBundle:
        """Assemble a bundle from analysis objects
        Args:
            capabilities: The `CapabilitiesModel`
            component_correlations: Spearman of each capability benchmark with the capabilities score
            correlations: One `CorrelationResult` per safety benchmark
            correlation_matrix: The `CorrelationMatrix` of the capability benchmarks
            scatter: One `ScatterTable` per safety benchmark
            provenance: Tool version, seed, input digests and the other run settings
            compute: A `ComputeCorrelation`, when a compute table was given
            calibration: Calibration reports and accuracy correlations, when prediction logs were given
        Returns:
            An `AnalysisBundle`
        """
        return cls(dict(
            capabilities=capabilities.to_dict(),
            component_correlations=dict(component_correlations),
            correlations=[result.to_dict() for result in correlations],
            correlation_matrix=correlation_matrix.to_dict(),
            scatter=[table.to_dict() for table in scatter],
            compute=None if compute is None else compute.to_dict(),
            calibration=calibration,
            provenance=provenance
        ))

    @property
    def capabilities(self) -> Dict:
        return self.data['capabilities']

    @property
    def correlations(self) -> List[Dict]:
        return self.data['correlations']

    @property
    def provenance(self) -> Dict:
        return self.data['provenance']

    @property
    def scatter_tables(self) -> List[ScatterTable]:
        return [ScatterTable.from_dict(table) for table in self.data['scatter']]

    def __eq__(self, other) -> bool:
        if not isinstance(other, AnalysisBundle):
            return NotImplemented
        return render_json(self) == render_json(other)


def load_bundle(path: str) -> AnalysisBundle:
    """Reload a bundle written as report.json
    Args:
        path: The report.json path
    Returns:
        An `AnalysisBundle`
    """
    return AnalysisBundle(utilities.load_json_file(path), source=path)


def loads_bundle(text: str, source: Optional[str] = '<bundle>') -> AnalysisBundle:
    try:
        return AnalysisBundle(json.loads(text), source=source)
    except ValueError as e:
        raise exceptions.InputError(f'{source} is not valid JSON; {e}')


def percent(value: Optional[float]) -> str:
    return '-' if value is None else f'{100.0 * value:.1f}%'


def render_json(bundle: AnalysisBundle) -> str:
    return utilities.dumps_json(bundle.data)


def _markdown_table(headers: List[str], rows: List[List[str]]) -> str:
    return tabulate.tabulate(rows, headers=headers, tablefmt='github', disable_numparse=True)


def render_markdown(bundle: AnalysisBundle) -> str:
    capabilities = bundle.capabilities
    provenance = bundle.provenance
    lines = ['# Capabilities correlation report', '']
    lines.append(f'capcorr {provenance["tool_version"]}, report schema {provenance["schema_version"]}, '
                 f'seed {provenance["seed"]}, {provenance["bootstrap_resamples"]} bootstrap resamples.')
    lines += ['', '## Capabilities component', '']
    lines.append(f'Explained variance: {percent(capabilities["explained_variance_ratio"])} of the standardized '
                 f'variance across {len(capabilities["benchmarks"])} capability benchmarks and '
                 f'{len(capabilities["models"])} models.')
    if capabilities['excluded_benchmarks']:
        lines.append(f'Excluded from the capabilities score: {", ".join(capabilities["excluded_benchmarks"])}.')
    lines.append('')
    component = bundle.data['component_correlations']
    lines.append(_markdown_table(
        ['Benchmark', 'Loading', 'Capabilities correlation'],
        [[b, f'{loading:.4f}', percent(component.get(b))]
         for b, loading in zip(capabilities['benchmarks'], capabilities['loadings'])]))
    lines.append('')
    ranked = sorted(zip(capabilities['models'], capabilities['scores']), key=lambda pair: -pair[1])
    lines.append(_markdown_table(['Model', 'Capabilities score'], [[m, f'{s:.2f}'] for m, s in ranked]))

    matrix = bundle.data['correlation_matrix']
    lines += ['', '## Capability benchmark correlations', '']
    lines.append(f'Mean pairwise {matrix["method"]} correlation: {percent(matrix["mean"])} '
                 f'(standard deviation {percent(matrix["std"])}).')
    if matrix['flagged_pairs']:
        lines.append('Pairs with fewer than 3 complete models: ' +
                     ', '.join(f'{a}/{b}' for a, b in matrix['flagged_pairs']) + '.')

    if bundle.correlations:
        lines += ['', '## Safety benchmarks', '']
        rows = []
        for result in bundle.correlations:
            ci = result['bootstrap_ci']
            rows.append([
                result['benchmark'],
                percent(result['spearman_rho']),
                '-' if ci is None else f'[{percent(ci[0])}, {percent(ci[1])}]',
                percent(result['pearson_r']),
                f'{result["ols_slope"]:.2f}',
                f'{result["standardized_slope"]:.3f}',
                str(result['n_pairs']),
                result['band']
            ])
        lines.append(_markdown_table(['Benchmark', 'Spearman', '95% CI', 'Pearson', 'Slope', 'Standardized slope',
                                      'n', 'Band'], rows))
        bands = provenance['bands']
        lines.append('')
        lines.append(f'Bands: High >= {percent(bands["high"])}, Moderate >= {percent(bands["moderate"])}, '
                     f'Negative <= {percent(bands["negative"])}, Low otherwise.')

    compute = bundle.data.get('compute')
    if compute is not None:
        lines += ['', '## Training compute', '']
        lines.append(f'Spearman correlation between log10 training FLOP and the capabilities score: '
                     f'{percent(compute["spearman_rho"])} over {compute["n_pairs"]} models.')

    calibration = bundle.data.get('calibration')
    if calibration:
        lines += ['', '## Calibration', '']
        rows = []
        for report in calibration['reports']:
            tuned = report['temperature']
            rows.append([report['name'], percent(report['accuracy']), f'{report["brier"]:.4f}',
                         f'{report["rmsce"]:.4f}', f'{report["ece"]:.4f}',
                         f'{report["decomposition"]["calibration_term"]:.4f}',
                         f'{report["decomposition"]["refinement_term"]:.4f}',
                         '-' if tuned is None else f'{tuned["value"]:.3f}'])
        lines.append(_markdown_table(['Model', 'Accuracy', 'Brier', 'RMSCE', 'ECE', 'Calibration term',
                                      'Refinement term', 'Temperature'], rows))
        if calibration.get('accuracy_correlations'):
            lines.append('')
            lines.append(_markdown_table(['Metric', 'Accuracy correlation'],
                                         [[k, percent(v)] for k, v in
                                          sorted(calibration['accuracy_correlations'].items())]))

    notes = list(provenance['notes'])
    dropped = provenance['filter']
    if dropped['dropped_models']:
        notes.append(f'Removed from the capabilities fit ({dropped["policy"]}): {", ".join(dropped["dropped_models"])}')
    if dropped['dropped_benchmarks']:
        notes.append(f'Removed from the capabilities fit ({dropped["policy"]}): '
                     f'{", ".join(dropped["dropped_benchmarks"])}')
    if notes:
        lines += ['', '## Notes', '']
        lines += [f'- {note}' for note in notes]
    return '\n'.join(lines) + '\n'


def render_report(bundle: AnalysisBundle, format: Optional[str] = 'json') -> str:
    """Render a bundle as a document
    Args:
        bundle: The analysis bundle
        format: json (canonical, full precision) or markdown (percentages with one decimal)
    Returns:
        The document
    """
    fmt = str(format).strip().lower()
    if fmt not in const.REPORT_FORMATS:
        raise exceptions.UnknownFormatError(fmt, const.REPORT_FORMATS)
    if fmt == 'json':
        return render_json(bundle)
    return render_markdown(bundle)


def scatter_filename(benchmark: str) -> str:
    safe = ''.join(c if c.isalnum() or c in '-_.' else '_' for c in benchmark)
    return f'{safe}.csv'


def scatter_filenames(benchmarks: Iterable[str]) -> Dict[str, str]:
    """One scatter file name per benchmark

    Benchmarks whose sanitized names clash (case-insensitively) get a suffix from the sha256 of their identifier, so
    no two benchmarks share a file.

    Args:
        benchmarks: The safety benchmark identifiers
    Returns:
        A mapping of benchmark to file name
    """
    names = {benchmark: scatter_filename(benchmark) for benchmark in benchmarks}
    clashes = Counter(name.lower() for name in names.values())
    for benchmark, name in names.items():
        if clashes[name.lower()] > 1:
            digest = hashlib.sha256(benchmark.encode('utf-8')).hexdigest()[:8]
            names[benchmark] = f'{name[:-len(".csv")]}-{digest}.csv'
    return names


def write_report(bundle: AnalysisBundle, out_dir: str) -> List[str]:
    """Write report.json, report.md and one scatter CSV per safety benchmark
    Args:
        bundle: The analysis bundle
        out_dir: The output directory
    Returns:
        The paths written
    """
    written = []
    for name, fmt in ((const.REPORT_JSON_NAME, 'json'), (const.REPORT_MARKDOWN_NAME, 'markdown')):
        path = os.path.join(out_dir, name)
        utilities.write_text_file(path, render_report(bundle, fmt))
        written.append(path)
    tables = bundle.scatter_tables
    names = scatter_filenames(table.benchmark for table in tables)
    for table in tables:
        path = os.path.join(out_dir, const.SCATTER_DIRECTORY_NAME, names[table.benchmark])
        utilities.write_text_file(path, table.to_csv())
        written.append(path)
    return written
