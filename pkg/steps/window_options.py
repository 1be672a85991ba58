from services.errors import ParameterError
from services.temporal import parse_instant, parse_window_option


def window_from_params(params, graph, key='window'):
    """Resolve the window flags of a command against the loaded graph"""
    try:
        origin = parse_instant(params['window_origin']) if params.get('window_origin') else 0
        return parse_window_option(params[key], graph.meta.time_span, origin)
    except ValueError as e:
        raise ParameterError(f"Bad window option: {e}")
