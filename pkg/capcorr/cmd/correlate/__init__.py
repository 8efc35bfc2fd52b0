from capcorr.services.pipeline import managers
from capcorr.cmd.service_interfaces import SingleResponsibilityInterface

interface = \
    SingleResponsibilityInterface(cls=managers.CorrelateManager,
                                  interface_name='Correlate',
                                  interface_description='Correlate safety benchmarks with a saved capabilities model '
                                                        'and write the analysis bundle.',
                                  entry_method_name='correlate',
                                  defaults=dict(stdout=True)
                                  )
