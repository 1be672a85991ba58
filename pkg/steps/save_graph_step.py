from services.storage import save
from .base_step import BaseStep


class SaveGraphStep(BaseStep):
    """Step to write the graph directory"""

    def execute(self, context):
        self.validate_input(context, ['graph', 'params'])
        params = context['params']

        report = context.get('cleaning_report')
        manifest = save(
            context['graph'],
            params['out'],
            cleaning_report=report.to_dict() if report else None,
            compress=bool(params.get('compress')),
            threads=params.get('threads', 1),
        )

        context['manifest'] = manifest
        context.setdefault('outputs', {})['graph'] = params['out']
        self.log_step(f"Graph saved to {params['out']}")
        return context
