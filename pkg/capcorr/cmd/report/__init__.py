from capcorr.services.pipeline import managers
from capcorr.cmd.service_interfaces import SingleResponsibilityInterface

interface = \
    SingleResponsibilityInterface(cls=managers.ReportManager,
                                  interface_name='Report',
                                  interface_description='Render an analysis bundle as JSON, markdown and scatter CSVs.',
                                  entry_method_name='render',
                                  defaults=dict(stdout=True)
                                  )
