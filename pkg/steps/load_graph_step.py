from services.storage import load_with_manifest
from .base_step import BaseStep


class LoadGraphStep(BaseStep):
    """Step to load and verify a graph directory"""

    def execute(self, context):
        self.validate_input(context, ['params'])
        params = context['params']

        graph, manifest = load_with_manifest(params['graph'], threads=params.get('threads', 1))

        context['graph'] = graph
        context['manifest'] = manifest
        context.setdefault('inputs', {})['graph'] = params['graph']
        self.log_step(f"Loaded {graph.meta.vertex_count} vertices, {graph.meta.edge_count} edges")
        return context
