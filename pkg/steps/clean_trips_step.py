from services.ingest import clean_trips
from .base_step import BaseStep


class CleanTripsStep(BaseStep):
    """Step to apply the cleaning rules and fold parse errors into the report"""

    def execute(self, context):
        self.validate_input(context, ['trip_rows'])

        kept, report = clean_trips(context['trip_rows'])
        report.absorb_parse_errors(context.get('parse_errors', 0))

        context['trip_rows'] = kept
        context['cleaning_report'] = report
        self.log_step(
            f"Kept {report.total_kept} of {report.total_read} trips; rejected {report.rejected}"
        )
        return context
