from services.run_report import RunReport
from services.temporal import format_instant
from .base_step import BaseStep


def _window_text(window):
    return {'start': format_instant(window.start), 'end': format_instant(window.end)}


class RunReportStep(BaseStep):
    """Step to assemble the RunReport from what the pipeline produced"""

    def execute(self, context):
        self.validate_input(context, ['command', 'params'])
        params = context['params']

        report = RunReport(
            command=context['command'],
            parameters={k: v for k, v in params.items() if k not in ('threads', 'report', 'log_level')},
            inputs=context.get('inputs', {}),
            outputs=context.get('outputs', {}),
            counts=self._counts(context),
            timings=dict(context.get('timings', {})),
            runtime={'threads': params.get('threads', 1)},
        )
        context['run_report'] = report
        return context

    def _counts(self, context):
        counts = {}
        if 'cleaning_report' in context:
            counts['cleaning'] = context['cleaning_report'].to_dict()
        if 'graph' in context:
            meta = context['graph'].meta
            counts['graph'] = {
                'vertices': meta.vertex_count,
                'edges': meta.edge_count,
                'resolution_digits': meta.resolution_digits,
            }
        if 'hotspots' in context:
            counts['hotspot_rows'] = len(context['hotspots'])
            counts['hotspot_shares'] = [
                {
                    'window': _window_text(s.window),
                    'direction': s.direction.value,
                    'top_degree': s.top_degree,
                    'edges': s.edges,
                    'share': round(float(s.share), 6),
                }
                for s in context['hotspot_shares']
            ]
        if 'routes' in context:
            counts['route_windows'] = len(context['routes'])
            counts['routes'] = context['routes_report'].to_dict()
            stats = context['route_stats'].to_dict()
            stats.pop('simultaneous_routes')
            counts['route_stats'] = stats
            counts['route_pairs'] = [
                {'source': p.source.key, 'dest': p.dest.key, 'trip_count': p.trip_count}
                for p in context['route_pairs']
            ]
        if 'window_counts' in context:
            counts['totals'] = context.get('totals', {})
            counts['windows'] = [
                {'window': _window_text(c.window), 'vertices': c.vertices, 'edges': c.edges}
                for c in context['window_counts']
            ]
        if 'degree_distribution' in context:
            counts['degree_distribution'] = [
                {'window': _window_text(d.window), 'direction': d.direction.value, 'degrees': list(d.degrees)}
                for d in context['degree_distribution']
            ]
        return counts
