from services.analytics import RoutesReport, popular_routes, route_stats, top_route_pairs
from services.errors import ParameterError
from services.temporal import WindowSpec, parse_instant, parse_month
from .base_step import BaseStep


class RoutesStep(BaseStep):
    """Step to aggregate simultaneous trips per route and window"""

    def execute(self, context):
        self.validate_input(context, ['graph', 'params'])
        params = context['params']
        graph = context['graph']
        threads = params.get('threads', 1)

        span = self._span(params, graph)
        try:
            origin = parse_instant(params['window_origin']) if params.get('window_origin') else 0
            window = WindowSpec.fixed(params['window_seconds'], origin)
        except ValueError as e:
            raise ParameterError(f"Bad window option: {e}")

        report = RoutesReport()
        routes = popular_routes(graph, params['digits'], window, span, threads, report)
        pairs = top_route_pairs(graph, params['digits'], span or graph.meta.time_span, params['top'], threads)

        context['routes'] = routes
        context['route_stats'] = route_stats(routes)
        context['route_pairs'] = pairs
        context['routes_report'] = report
        self.log_step(f"{len(routes)} route windows, {len(pairs)} top route pairs")
        return context

    def _span(self, params, graph):
        if not params.get('month'):
            return None
        try:
            month = parse_month(params['month'])
        except ValueError:
            raise ParameterError(f"--month must be YYYY-MM, got {params['month']!r}")
        span = graph.meta.time_span
        if span is None or not month.overlaps(span):
            raise ParameterError(f"Month {params['month']} is outside the graph's time span")
        return month
