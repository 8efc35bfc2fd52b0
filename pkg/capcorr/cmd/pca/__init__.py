from capcorr.services.pipeline import managers
from capcorr.cmd.service_interfaces import SingleResponsibilityInterface

interface = \
    SingleResponsibilityInterface(cls=managers.PcaManager,
                                  interface_name='Capabilities Component',
                                  interface_description='Fit the capabilities component and write capabilities.json.',
                                  entry_method_name='fit',
                                  defaults=dict(stdout=True)
                                  )
