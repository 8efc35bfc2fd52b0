import io
import re
from typing import BinaryIO, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from capcorr import const
from capcorr import exceptions
from capcorr import utilities
from capcorr.services.ingest.matrix import ScoreMatrix

LAYOUTS = ['long', 'wide']
PANDAS_LINE_RE = re.compile(r'line (\d+)')


def _read_raw_rows(source: BinaryIO) -> pd.DataFrame:
    """Read every line of a CSV as strings; row i of the frame is line i + 1 of the file"""
    try:
        return pd.read_csv(source, header=None, dtype=str, keep_default_na=False, skip_blank_lines=False,
                           encoding='utf-8', on_bad_lines='error')
    except pd.errors.EmptyDataError:
        raise exceptions.ReadScoreTableError('the table is empty')
    except pd.errors.ParserError as e:
        match = PANDAS_LINE_RE.search(str(e))
        raise exceptions.ReadScoreTableError(f'malformed row; {e}', line=int(match.group(1)) if match else None)
    except UnicodeDecodeError as e:
        raise exceptions.ReadScoreTableError(f'the table is not UTF-8 encoded; {e}')


def _data_rows(raw: pd.DataFrame) -> List[Tuple[int, List[str]]]:
    """Yield (line number, stripped fields) for every non-blank data row; short rows are rejected"""
    rows = []
    width = raw.shape[1]
    for i, values in enumerate(raw.itertuples(index=False, name=None)):
        if i == 0:
            continue
        present = [v for v in values if not (isinstance(v, float) and np.isnan(v))]
        if not present:
            continue
        if len(present) != width:
            raise exceptions.ReadScoreTableError(f'malformed row; expected {width} fields, saw {len(present)}',
                                                 line=i + 1)
        rows.append((i + 1, [str(v).strip() for v in values]))
    return rows


def _header(raw: pd.DataFrame) -> List[str]:
    return [str(v).strip() for v in raw.iloc[0].tolist()]


def _parse_score(text: str, line: int) -> float:
    if text == '':
        return np.nan
    try:
        value = float(text)
    except ValueError:
        raise exceptions.ReadScoreTableError(f'non-numeric score {text!r}', line=line)
    if not np.isfinite(value):
        raise exceptions.ReadScoreTableError(f'score {text!r} is not finite', line=line)
    return value


def _load_long(raw: pd.DataFrame) -> ScoreMatrix:
    header = _header(raw)
    if header != const.LONG_LAYOUT_HEADER:
        raise exceptions.ReadScoreTableError(f'long layout header must be {",".join(const.LONG_LAYOUT_HEADER)}; '
                                             f'got {",".join(header)}', line=1)
    models, benchmarks = [], []
    cells: Dict[Tuple[str, str], float] = {}
    first_seen: Dict[Tuple[str, str], int] = {}
    for line, (model, benchmark, score) in _data_rows(raw):
        if not model or not benchmark:
            raise exceptions.ReadScoreTableError('model and benchmark must be non-empty', line=line)
        key = (model, benchmark)
        if key in first_seen:
            raise exceptions.ReadScoreTableError(f'duplicate cell ({model}, {benchmark}); first given on line '
                                                 f'{first_seen[key]}', line=line)
        first_seen[key] = line
        cells[key] = _parse_score(score, line)
        if model not in models:
            models.append(model)
        if benchmark not in benchmarks:
            benchmarks.append(benchmark)
    values = np.full((len(models), len(benchmarks)), np.nan)
    model_idx = {m: i for i, m in enumerate(models)}
    benchmark_idx = {b: j for j, b in enumerate(benchmarks)}
    for (model, benchmark), score in cells.items():
        values[model_idx[model], benchmark_idx[benchmark]] = score
    return ScoreMatrix(models, benchmarks, values)


def _load_wide(raw: pd.DataFrame) -> ScoreMatrix:
    header = _header(raw)
    if not header or header[0] != const.WIDE_LAYOUT_MODEL_COLUMN:
        raise exceptions.ReadScoreTableError(f'wide layout header must start with '
                                             f'"{const.WIDE_LAYOUT_MODEL_COLUMN}"', line=1)
    benchmarks = header[1:]
    if any(not b for b in benchmarks):
        raise exceptions.ReadScoreTableError('benchmark column names must be non-empty', line=1)
    duplicated = sorted({b for b in benchmarks if benchmarks.count(b) > 1})
    if duplicated:
        raise exceptions.ReadScoreTableError(f'duplicate benchmark column(s): {", ".join(duplicated)}', line=1)
    models, rows = [], []
    first_seen: Dict[str, int] = {}
    for line, fields in _data_rows(raw):
        model = fields[0]
        if not model:
            raise exceptions.ReadScoreTableError('model must be non-empty', line=line)
        if model in first_seen:
            raise exceptions.ReadScoreTableError(f'duplicate model row {model!r}; first given on line '
                                                 f'{first_seen[model]}', line=line)
        first_seen[model] = line
        models.append(model)
        rows.append([_parse_score(text, line) for text in fields[1:]])
    values = np.array(rows, dtype=float).reshape(len(models), len(benchmarks))
    return ScoreMatrix(models, benchmarks, values)


def detect_layout(header: List[str]) -> str:
    return 'long' if header == const.LONG_LAYOUT_HEADER else 'wide'


def load_score_table(source: BinaryIO, layout: Optional[str] = None) -> ScoreMatrix:
    """Load a model x benchmark score table from a UTF-8, comma-delimited CSV stream
    Args:
        source: A binary stream
        layout: long (`model,benchmark,score` rows) or wide (a `model` column plus one column per benchmark);
            detected from the header when omitted
    Returns:
        A `ScoreMatrix`; empty cells are missing
    """
    raw = _read_raw_rows(source)
    if layout is None:
        layout = detect_layout(_header(raw))
    layout = str(layout).lower()
    if layout not in LAYOUTS:
        raise exceptions.UnknownFormatError(layout, LAYOUTS)
    if layout == 'long':
        return _load_long(raw)
    return _load_wide(raw)


def load_score_file(path: str, layout: Optional[str] = None) -> ScoreMatrix:
    """Load a score table from disk
    Args:
        path: The path to the CSV file
        layout: long, wide or None to detect from the header
    Returns:
        A `ScoreMatrix`
    """
    try:
        f = utilities.open_input_file(path, 'rb')
    except exceptions.InputError as e:
        raise exceptions.ReadScoreTableError(str(e))
    with f:
        try:
            return load_score_table(f, layout)
        except exceptions.ReadScoreTableError as e:
            raise exceptions.ReadScoreTableError(f'{path}; {e.detail}', line=e.line)


def load_score_text(text: str, layout: Optional[str] = None) -> ScoreMatrix:
    return load_score_table(io.BytesIO(text.encode('utf-8')), layout)
