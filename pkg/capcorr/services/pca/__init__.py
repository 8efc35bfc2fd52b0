from capcorr.services.pca.component import CapabilitiesModel, capabilities_scores, component_correlations, \
    fit_capabilities_component, fit_capabilities_model, leading_eigenpair, orient_loadings, refit_subset
