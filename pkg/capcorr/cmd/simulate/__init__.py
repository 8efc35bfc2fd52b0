from capcorr.services.pipeline import managers
from capcorr.cmd.service_interfaces import SingleResponsibilityInterface

interface = \
    SingleResponsibilityInterface(cls=managers.SimulateManager,
                                  interface_name='Simulate',
                                  interface_description='Draw a synthetic benchmark population from a one-factor '
                                                        'spec.',
                                  entry_method_name='simulate',
                                  defaults=dict(stdout=True)
                                  )
