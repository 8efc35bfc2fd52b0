from capcorr.services.pipeline.analysis import AnalysisInputs, analyze, assemble_bundle, calibration_section, \
    exit_status, fit_model, load_inputs, run_pipeline
