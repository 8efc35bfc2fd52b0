from capcorr.services.report.bands import BANDS, BandThresholds, classify_band
from capcorr.services.report.scatter import ScatterTable, scatter_data
from capcorr.services.report.bundle import AnalysisBundle, load_bundle, loads_bundle, render_report, \
    scatter_filenames, write_report
