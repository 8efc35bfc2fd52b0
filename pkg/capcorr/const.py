VERSION = '0.3.0'
REPORT_SCHEMA_VERSION = 1

LOG_LEVEL_ENV_VARIABLE = 'CAPCORR_LOG'

# Score table ingestion
LONG_LAYOUT_HEADER = ['model', 'benchmark', 'score']
WIDE_LAYOUT_MODEL_COLUMN = 'model'
MIN_MODELS = 2
MIN_BENCHMARKS = 1

# Benchmark metadata vocabularies
HIGHER_BETTER = 'higher_better'
LOWER_BETTER = 'lower_better'
DIRECTIONS = [HIGHER_BETTER, LOWER_BETTER]
CAPABILITY_ROLE = 'capability'
SAFETY_ROLE = 'safety'
ROLES = [CAPABILITY_ROLE, SAFETY_ROLE]

FILTER_POLICIES = ['drop_models', 'drop_benchmarks', 'strict']
DEFAULT_FILTER_POLICY = 'drop_models'

# Capabilities component
EIGENSOLVERS = ['eigh', 'power']
DEFAULT_EIGENSOLVER = 'eigh'
POWER_ITERATION_MAX_ITERATIONS = 10000
POWER_ITERATION_TOLERANCE = 1e-12
POWER_ITERATION_SEED = 0
LOADING_SUM_ZERO_TOLERANCE = 1e-12
MIN_CAPABILITY_BENCHMARKS = 2
MIN_PCA_MODELS = 3

# Correlation statistics
MIN_CORRELATION_PAIRS = 3
DEFAULT_BOOTSTRAP_RESAMPLES = 10000
MIN_BOOTSTRAP_RESAMPLES = 1000
MIN_BOOTSTRAP_PAIRS = 5
BOOTSTRAP_CHUNK_SIZE = 1000
BOOTSTRAP_CONFIDENCE = 0.95
BOOTSTRAP_MAX_SKIPPED_FRACTION = 0.5
BOOTSTRAP_STATISTICS = ['spearman', 'pearson', 'slope']
FLOP_PER_PARAMETER_TOKEN = 6

# Correlation bands
HIGH_BAND_THRESHOLD = 0.60
MODERATE_BAND_THRESHOLD = 0.40
NEGATIVE_BAND_THRESHOLD = -0.40

# Calibration
PROBABILITY_SUM_TOLERANCE = 1e-6
BIN_SCHEMES = ['equal_mass', 'equal_width']
DEFAULT_BIN_SCHEME = 'equal_mass'
DEFAULT_BIN_COUNT = 15
BIN_WEIGHT_TOLERANCE = 1e-12
TEMPERATURE_LOG_BOUNDS = (-3.0, 3.0)
TEMPERATURE_LOG_TOLERANCE = 1e-4
TEMPERATURE_NLL_SLACK = 1e-9
MIN_TEMPERATURE_RECORDS = 10

# Synthetic populations
MIN_SYNTHETIC_MODELS = 5
SYNTHETIC_STREAMS = ['latent', 'capability_noise', 'safety_distinct', 'safety_noise', 'compute']
RANDOM_BIT_GENERATOR = 'PCG64'

# Report outputs
REPORT_JSON_NAME = 'report.json'
REPORT_MARKDOWN_NAME = 'report.md'
CAPABILITIES_MODEL_NAME = 'capabilities.json'
SCATTER_DIRECTORY_NAME = 'scatter'
REPORT_FORMATS = ['json', 'markdown']

