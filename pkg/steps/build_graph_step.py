from services.ingest import build_graph
from services.settings import settings
from .base_step import BaseStep


class BuildGraphStep(BaseStep):
    """Step to turn cleaned trips into the evolving graph"""

    def execute(self, context):
        self.validate_input(context, ['trip_rows', 'params'])
        params = context['params']

        digits = params.get('digits') or settings.digits
        partitions = params.get('partitions') or settings.partitions
        self.log_step(f"Building graph at {digits} digits, {partitions} partitions")

        context['graph'] = build_graph(context['trip_rows'], digits, partitions)
        return context
