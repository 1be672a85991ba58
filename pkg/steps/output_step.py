from services import exports
from .base_step import BaseStep


class OutputStep(BaseStep):
    """Step to write every result present in the context to its requested file"""

    def execute(self, context):
        self.validate_input(context, ['params'])
        params = context['params']
        outputs = context.setdefault('outputs', {})

        if 'hotspots' in context:
            outputs['hotspots'] = {
                'path': params['out'],
                'rows': exports.write_hotspots_csv(context['hotspots'], params['out']),
            }

        if 'routes' in context:
            outputs['routes'] = {
                'path': params['out'],
                'rows': exports.write_routes_csv(context['routes'], params['out']),
            }
            if params.get('stats'):
                exports.write_route_stats_json(context['route_stats'], params['stats'])
                outputs['stats'] = {'path': params['stats']}
            if params.get('geojson'):
                outputs['geojson'] = {
                    'path': params['geojson'],
                    'features': exports.write_route_geojson(context['route_pairs'], params['geojson']),
                }

        if 'window_counts' in context and params.get('out'):
            outputs['window_counts'] = {
                'path': params['out'],
                'rows': exports.write_window_counts_csv(context['window_counts'], params['out']),
            }

        self.log_step(f"Wrote {len(outputs)} output(s)")
        return context
