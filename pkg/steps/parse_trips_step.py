import os

from services.errors import ConfigurationError
from services.ingest import ColumnMap, parse_trips
from services.settings import settings
from .base_step import BaseStep


class ParseTripsStep(BaseStep):
    """Step to read trip CSVs into TripRows, counting malformed rows"""

    def execute(self, context):
        self.validate_input(context, ['params'])
        params = context['params']

        inputs = params.get('inputs') or []
        if not inputs:
            raise ConfigurationError("No trip input given")
        missing = [path for path in inputs if not os.path.isfile(path)]
        if missing:
            raise ConfigurationError(f"Trip input not found: {', '.join(missing)}")

        column_map = self._column_map(params)
        self.log_step(f"Parsing {len(inputs)} input file(s)")
        rows, errors = parse_trips(inputs, column_map, params.get('chunk_rows') or settings.chunk_rows)

        context['trip_rows'] = rows
        context['parse_errors'] = errors
        context.setdefault('inputs', {})['trips'] = list(inputs)
        self.log_step(f"{len(rows)} rows parsed, {errors} malformed")
        return context

    def _column_map(self, params):
        has_header = not params.get('no_header', False)
        delimiter = params.get('delimiter')
        if params.get('column_map'):
            return ColumnMap.from_file(
                params['column_map'],
                has_header=None if has_header else False,
                delimiter=delimiter,
            )
        return ColumnMap(has_header=has_header, delimiter=delimiter or ",")
