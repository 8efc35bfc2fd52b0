from __future__ import annotations

from typing import Dict, List, Optional

import pandas as pd

from capcorr import exceptions
from capcorr.services.ingest.matrix import pair_columns

SCATTER_HEADER = ['model', 'capabilities_score', 'safety_score']


class ScatterTable:

    def __init__(self, benchmark: str, rows: List[Dict], omitted_models=()):
        """Plot data for one safety benchmark
        Args:
            benchmark: The safety benchmark
            rows: model, capabilities_score and safety_score, ascending by capabilities score
            omitted_models: Models left out because one of the two values was missing
        """
        self.benchmark = benchmark
        self.rows = list(rows)
        self.omitted_models = list(omitted_models)

    @classmethod
    def from_dict(cls, data: Dict) -> ScatterTable:
        return cls(data['benchmark'], data['rows'], data['omitted_models'])

    def to_dict(self) -> Dict:
        return dict(benchmark=self.benchmark, rows=[dict(row) for row in self.rows],
                    omitted_models=list(self.omitted_models))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=SCATTER_HEADER)

    def to_csv(self) -> str:
        return self.to_frame().to_csv(index=False, lineterminator='\n')

    def __len__(self):
        return len(self.rows)


def scatter_data(cap_scores: pd.Series, safety_column: pd.Series, benchmark: Optional[str] = None) -> ScatterTable:
    """Pair capabilities scores with one safety column for external plotting
    Args:
        cap_scores: Capabilities scores indexed by model
        safety_column: Oriented safety scores indexed by model; NaN marks a missing score
        benchmark: The safety benchmark; defaults to the column name
    Returns:
        A `ScatterTable` sorted by ascending capabilities score
    """
    benchmark = str(benchmark if benchmark is not None else safety_column.name)
    x, y, omitted = pair_columns(cap_scores, safety_column)
    if len(x) == 0:
        raise exceptions.InputError(f'{benchmark}: no model has both a capabilities score and a safety score')
    rows = [dict(model=str(model), capabilities_score=float(score), safety_score=float(y.loc[model]))
            for model, score in x.items()]
    return ScatterTable(benchmark, rows, omitted)
