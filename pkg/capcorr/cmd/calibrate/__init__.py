from capcorr.services.pipeline import managers
from capcorr.cmd.service_interfaces import SingleResponsibilityInterface

interface = \
    SingleResponsibilityInterface(cls=managers.CalibrateManager,
                                  interface_name='Calibrate',
                                  interface_description='Calibration metrics and temperature scaling for prediction '
                                                        'logs.',
                                  entry_method_name='calibrate',
                                  defaults=dict(stdout=True)
                                  )
