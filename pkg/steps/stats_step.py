from services.analytics import at_resolution, degree_distribution, window_counts
from .base_step import BaseStep
from .hotspot_step import DIRECTIONS
from .window_options import window_from_params


class StatsStep(BaseStep):
    """Step to count locations and trips overall and per window at a resolution"""

    def execute(self, context):
        self.validate_input(context, ['graph', 'params'])
        params = context['params']
        digits = params.get('digits') or context['graph'].meta.resolution_digits
        threads = params.get('threads', 1)

        graph = at_resolution(context['graph'], digits, threads)
        window = window_from_params(params, graph)
        counts = window_counts(graph, digits, window, threads)

        context['totals'] = {'vertices': graph.meta.vertex_count, 'edges': graph.meta.edge_count}
        context['window_counts'] = counts
        context['window'] = window
        if params.get('top_degrees'):
            directions = DIRECTIONS[params.get('direction', 'both')]
            context['degree_distribution'] = degree_distribution(
                graph, digits, window, params['top_degrees'], directions, threads
            )
        self.log_step(f"{graph.meta.vertex_count} locations at {digits} digits, {len(counts)} windows")
        return context
