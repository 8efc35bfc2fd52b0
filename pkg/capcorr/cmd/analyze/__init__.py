from capcorr.services.pipeline import managers
from capcorr.cmd.service_interfaces import SingleResponsibilityInterface

interface = \
    SingleResponsibilityInterface(cls=managers.AnalyzeManager,
                                  interface_name='Analyze',
                                  interface_description='Fit the capabilities component, correlate every safety '
                                                        'benchmark with it and write the report.',
                                  entry_method_name='analyze',
                                  defaults=dict(stdout=True)
                                  )
