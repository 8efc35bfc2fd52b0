from capcorr.services.ingest.meta import BenchmarkMeta, load_benchmark_meta, load_benchmark_meta_file, \
    parse_benchmark_meta, validate_meta
from capcorr.services.ingest.matrix import FilterReport, ScoreMatrix, StandardizedMatrix, filter_complete, orient, \
    pair_columns, standardize, standardize_column
from capcorr.services.ingest.tables import load_score_file, load_score_table, load_score_text
