from services.analytics import edges_per_window, hotspot_share, hotspots
from services.tga_ops import Direction
from .base_step import BaseStep
from .window_options import window_from_params

DIRECTIONS = {
    'in': (Direction.IN,),
    'out': (Direction.OUT,),
    'both': (Direction.IN, Direction.OUT),
}


class HotspotStep(BaseStep):
    """Step to rank locations by in/out degree per window"""

    def execute(self, context):
        self.validate_input(context, ['graph', 'params'])
        params = context['params']
        graph = context['graph']

        window = window_from_params(params, graph)
        directions = DIRECTIONS[params.get('direction', 'both')]
        self.log_step(f"Top-{params['k']} at {params['digits']} digits over {window} windows")

        rows = hotspots(graph, params['digits'], window, params['k'], directions, params.get('threads', 1))
        shares = hotspot_share(rows, edges_per_window(graph, window))

        context['hotspots'] = rows
        context['hotspot_shares'] = shares
        context['window'] = window
        return context
