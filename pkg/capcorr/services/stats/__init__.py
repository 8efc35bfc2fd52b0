from capcorr.services.stats.correlation import CorrelationMatrix, OlsFit, complete_pairs, correlation_matrix, \
    ols_fit, ols_slope, pearson, spearman
from capcorr.services.stats.bootstrap import BootstrapResult, bootstrap_ci
from capcorr.services.stats.capabilities import ComputeCorrelation, CorrelationResult, \
    capabilities_correlation, compute_correlation, flop_proxy, load_compute_table
