from __future__ import annotations

import math
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd
from marshmallow import ValidationError

from capcorr import const
from capcorr import exceptions
from capcorr import utilities
from capcorr.services.base import schemas
from capcorr.services.ingest.matrix import ScoreMatrix
from capcorr.services.ingest.meta import BenchmarkMeta

TOKENS_PER_PARAMETER = 20.0


class SyntheticSpec(schemas.SchemaToObject):

    def __init__(self, json_data: Union[Dict, str]):
        """A one-factor population: every column loads on a shared standard-normal capability factor

        Args:
            json_data: A dictionary (or JSON string) matching `SyntheticSpecSchema`
        """
        self.n_models = None
        self.capability_loadings = []
        self.capability_ids = None
        self.capability_noise_sd = None
        self.safety_specs = []
        self.compute = None
        self.seed = None
        try:
            super().__init__(json_data, schemas.SyntheticSpecSchema())
        except ValidationError as e:
            raise exceptions.InvalidSyntheticSpecError(schemas.format_validation_error(e))
        b = len(self.capability_loadings)
        width = max(2, len(str(b)))
        if self.capability_ids is None:
            self.capability_ids = [f'cap_{j + 1:0{width}d}' for j in range(b)]
        if self.capability_noise_sd is None:
            self.capability_noise_sd = [math.sqrt(max(0.0, 1.0 - lam ** 2)) for lam in self.capability_loadings]
        for safety in self.safety_specs:
            if safety['noise_sd'] is None:
                safety['noise_sd'] = math.sqrt(max(0.0, 1.0 - safety['loading'] ** 2 -
                                                   safety['distinct_factor_weight'] ** 2))
        self._validate()

    def _validate(self) -> None:
        ids = list(self.capability_ids) + [s['id'] for s in self.safety_specs]
        duplicated = sorted({i for i in ids if ids.count(i) > 1})
        if duplicated:
            raise exceptions.InvalidSyntheticSpecError(f'duplicate benchmark id(s): {", ".join(duplicated)}')
        for benchmark, lam, sd in zip(self.capability_ids, self.capability_loadings, self.capability_noise_sd):
            if lam ** 2 + sd ** 2 == 0:
                raise exceptions.InvalidSyntheticSpecError(f'{benchmark} has neither loading nor noise')
        for safety in self.safety_specs:
            if self.safety_variance(safety['id']) == 0:
                raise exceptions.InvalidSyntheticSpecError(f'{safety["id"]} has neither loading nor noise')

    @classmethod
    def load(cls, path: str) -> SyntheticSpec:
        try:
            return cls(utilities.load_json_file(path))
        except exceptions.InvalidSyntheticSpecError as e:
            raise exceptions.InvalidSyntheticSpecError(f'{path}; {e}')

    @property
    def safety_ids(self) -> List[str]:
        return [s['id'] for s in self.safety_specs]

    def safety_spec(self, safety_id: str) -> Dict:
        for safety in self.safety_specs:
            if safety['id'] == safety_id:
                return safety
        raise exceptions.InputError(f'{safety_id!r} is not a safety benchmark of this spec')

    def safety_variance(self, safety_id: str) -> float:
        safety = self.safety_spec(safety_id)
        return safety['loading'] ** 2 + safety['distinct_factor_weight'] ** 2 + safety['noise_sd'] ** 2

    def effective_capability_loadings(self) -> np.ndarray:
        """Correlation of every unit-variance capability column with the latent factor"""
        lam = np.asarray(self.capability_loadings, dtype=float)
        sd = np.asarray(self.capability_noise_sd, dtype=float)
        return lam / np.sqrt(lam ** 2 + sd ** 2)

    def to_dict(self) -> Dict:
        return dict(n_models=self.n_models, capability_loadings=list(self.capability_loadings),
                    capability_ids=list(self.capability_ids), capability_noise_sd=list(self.capability_noise_sd),
                    safety_specs=[dict(s) for s in self.safety_specs],
                    compute=None if self.compute is None else dict(self.compute), seed=self.seed)


class SyntheticPopulation:

    def __init__(self, spec: SyntheticSpec, seed: int, matrix: ScoreMatrix, meta: List[BenchmarkMeta],
                 latent: pd.Series, compute: Optional[pd.DataFrame] = None):
        """A generated population with its ground truth
        Args:
            spec: The generating spec
            seed: The root seed
            matrix: Raw scores (lower_better safety columns are emitted negated)
            meta: Metadata for every column
            latent: The capability factor of every model
            compute: params and train_tokens per model, when the spec has a compute block
        """
        self.spec = spec
        self.seed = seed
        self.matrix = matrix
        self.meta = meta
        self.latent = latent
        self.compute = compute

    def truth(self) -> Dict:
        return dict(
            seed=self.seed,
            bit_generator=const.RANDOM_BIT_GENERATOR,
            streams=list(const.SYNTHETIC_STREAMS),
            latent={str(m): float(g) for m, g in self.latent.items()},
            expected_correlation={s: analytic_expected_correlation(self.spec, s) for s in self.spec.safety_ids},
            expected_score_spearman={s: analytic_score_spearman(self.spec, s) for s in self.spec.safety_ids},
            capability_correlation=analytic_capability_correlation(self.spec),
            explained_variance=analytic_explained_variance(self.spec),
            spec=self.spec.to_dict()
        )

    def meta_json(self) -> str:
        return utilities.dumps_json([item.to_dict() for item in self.meta])

    def truth_json(self) -> str:
        return utilities.dumps_json(self.truth())

    def compute_csv(self) -> Optional[str]:
        if self.compute is None:
            return None
        frame = self.compute.copy()
        frame.index.name = 'model'
        return frame.to_csv(lineterminator='\n')


def model_ids(n_models: int) -> List[str]:
    width = max(3, len(str(n_models)))
    return [f'model_{i + 1:0{width}d}' for i in range(n_models)]


def stream_generators(seed: int) -> Dict[str, np.random.Generator]:
    """One independent PCG64 generator per named stream, spawned from SeedSequence(seed) in a fixed order"""
    children = np.random.SeedSequence(seed).spawn(len(const.SYNTHETIC_STREAMS))
    return {name: np.random.Generator(np.random.PCG64(child)) for name, child in zip(const.SYNTHETIC_STREAMS,
                                                                                   children)}


def generate_population(spec: SyntheticSpec, seed: Optional[int] = None) -> SyntheticPopulation:
    """Draw a population from a one-factor model
    Args:
        spec: The population spec
        seed: Root seed; falls back to the spec's seed
    Returns:
        A `SyntheticPopulation`
    """
    seed = spec.seed if seed is None else seed
    if seed is None:
        raise exceptions.InvalidSyntheticSpecError('a seed is required, either in the spec or as an argument')
    n, b, s = spec.n_models, len(spec.capability_loadings), len(spec.safety_specs)
    streams = stream_generators(seed)
    latent = streams['latent'].standard_normal(n)
    capability_noise = streams['capability_noise'].standard_normal((n, b))
    safety_distinct = streams['safety_distinct'].standard_normal((n, s))
    safety_noise = streams['safety_noise'].standard_normal((n, s))

    lam = np.asarray(spec.capability_loadings, dtype=float)
    sd = np.asarray(spec.capability_noise_sd, dtype=float)
    capability = (latent[:, np.newaxis] * lam + capability_noise * sd) / np.sqrt(lam ** 2 + sd ** 2)

    columns = [capability]
    meta = [BenchmarkMeta.create(benchmark, const.HIGHER_BETTER, const.CAPABILITY_ROLE)
            for benchmark in spec.capability_ids]
    for k, safety in enumerate(spec.safety_specs):
        unit = (safety['loading'] * latent + safety['distinct_factor_weight'] * safety_distinct[:, k] +
                safety['noise_sd'] * safety_noise[:, k]) / math.sqrt(spec.safety_variance(safety['id']))
        if safety['direction'] == const.LOWER_BETTER:
            native = safety['offset'] - safety['scale'] * unit
        else:
            native = safety['offset'] + safety['scale'] * unit
        columns.append(native[:, np.newaxis])
        meta.append(BenchmarkMeta.create(safety['id'], safety['direction'], const.SAFETY_ROLE, safety['unit']))

    models = model_ids(n)
    matrix = ScoreMatrix(models, list(spec.capability_ids) + spec.safety_ids, np.hstack(columns))
    compute = None
    if spec.compute is not None:
        block = spec.compute
        log10_flop = block['log10_flop_mean'] + block['log10_flop_sd'] * (
            latent + block['noise_sd'] * streams['compute'].standard_normal(n))
        params = np.sqrt(10.0 ** log10_flop / (const.FLOP_PER_PARAMETER_TOKEN * TOKENS_PER_PARAMETER))
        compute = pd.DataFrame(dict(params=params, train_tokens=TOKENS_PER_PARAMETER * params), index=models)
    return SyntheticPopulation(spec, seed, matrix, meta, pd.Series(latent, index=models, name='latent'), compute)


def analytic_expected_correlation(spec: SyntheticSpec, safety_id: str) -> float:
    """Pearson correlation between the latent factor and a safety column

    lambda_s / sqrt(lambda_s^2 + w^2 + noise_sd^2). For Gaussian data the matching Spearman correlation is
    `analytic_expected_spearman` of this value.

    Args:
        spec: The population spec
        safety_id: The safety benchmark
    Returns:
        The expected correlation
    """
    safety = spec.safety_spec(safety_id)
    return float(safety['loading'] / math.sqrt(spec.safety_variance(safety_id)))


def analytic_expected_spearman(r: float) -> float:
    """Spearman correlation of a bivariate normal pair with Pearson correlation r: (6 / pi) * arcsin(r / 2)"""
    return float(6.0 / math.pi * math.asin(r / 2.0))


def implied_capability_correlation(spec: SyntheticSpec) -> np.ndarray:
    loadings = spec.effective_capability_loadings()
    correlation = np.outer(loadings, loadings)
    np.fill_diagonal(correlation, 1.0)
    return correlation


def analytic_capability_correlation(spec: SyntheticSpec) -> Optional[float]:
    """Mean implied pairwise correlation between capability columns; None with a single column"""
    correlation = implied_capability_correlation(spec)
    b = correlation.shape[0]
    if b < 2:
        return None
    return float(correlation[np.triu_indices(b, k=1)].mean())


def analytic_explained_variance(spec: SyntheticSpec) -> float:
    """Largest eigenvalue of the implied capability correlation matrix divided by the number of columns"""
    correlation = implied_capability_correlation(spec)
    return float(np.linalg.eigvalsh(correlation)[-1] / correlation.shape[0])


def analytic_score_spearman(spec: SyntheticSpec, safety_id: str) -> float:
    """Expected Spearman correlation between the population capabilities score and a safety column
    Args:
        spec: The population spec
        safety_id: The safety benchmark
    Returns:
        The Gaussian Spearman mapping of corr(score, latent) * corr(latent, safety)
    """
    correlation = implied_capability_correlation(spec)
    eigenvalues, eigenvectors = np.linalg.eigh(correlation)
    direction = eigenvectors[:, -1]
    score_latent = abs(float(direction @ spec.effective_capability_loadings())) / math.sqrt(eigenvalues[-1])
    return analytic_expected_spearman(score_latent * analytic_expected_correlation(spec, safety_id))
