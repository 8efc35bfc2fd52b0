from capcorr.services.calibration.predictions import PredictionLog, load_prediction_log, load_prediction_log_file, \
    prediction_log_name, \
    parse_prediction_records
from capcorr.services.calibration.metrics import BrierDecomposition, ConfidenceBins, bin_confidences, \
    brier_decomposition, brier_multiclass, ece, rmsce, top_label_brier
from capcorr.services.calibration.temperature import apply_temperature, negative_log_likelihood, temperature_fit
from capcorr.services.calibration.report import CalibrationReport, accuracy_correlations, calibration_report, \
    export_safety_scores
