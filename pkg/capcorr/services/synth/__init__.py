from capcorr.services.synth.population import SyntheticPopulation, SyntheticSpec, analytic_capability_correlation, \
    analytic_expected_correlation, analytic_expected_spearman, analytic_explained_variance, analytic_score_spearman, \
    generate_population, model_ids
from capcorr.services.synth.predictions import generate_prediction_log
