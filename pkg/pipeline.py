"""
Single Pipeline Manager - Handles ingest and the three analysis commands
"""

from langchain_core.runnables import RunnableLambda

from services.log import get_logger
from steps.build_graph_step import BuildGraphStep
from steps.clean_trips_step import CleanTripsStep
from steps.hotspot_step import HotspotStep
from steps.load_graph_step import LoadGraphStep
from steps.output_step import OutputStep
from steps.parse_trips_step import ParseTripsStep
from steps.routes_step import RoutesStep
from steps.run_report_step import RunReportStep
from steps.save_graph_step import SaveGraphStep
from steps.stats_step import StatsStep

logger = get_logger(__name__)


class Pipeline:
    """One step chain per command; each chain passes a context dict along"""

    def __init__(self):
        logger.debug("🔧 Initializing Pipeline...")
        self.setup_pipelines()
        logger.debug("✓ Pipeline initialized")

    def setup_pipelines(self):
        """Setup the ingest chain and the load-analyze-write chains"""

        self.ingest_pipeline = (
            RunnableLambda(ParseTripsStep().run)
            | RunnableLambda(CleanTripsStep().run)
            | RunnableLambda(BuildGraphStep().run)
            | RunnableLambda(SaveGraphStep().run)
            | RunnableLambda(RunReportStep().run)
        )

        self.hotspots_pipeline = self._analysis_chain(HotspotStep())
        self.routes_pipeline = self._analysis_chain(RoutesStep())
        self.stats_pipeline = self._analysis_chain(StatsStep())

    def _analysis_chain(self, step):
        return (
            RunnableLambda(LoadGraphStep().run)
            | RunnableLambda(step.run)
            | RunnableLambda(OutputStep().run)
            | RunnableLambda(RunReportStep().run)
        )

    def _context(self, command, params):
        return {'command': command, 'params': dict(params), 'timings': {}}

    def _invoke(self, chain, command, params):
        logger.info(f"🚀 {command}: starting")
        context = chain.invoke(self._context(command, params))
        logger.info(f"✓ {command}: done in {sum(context['timings'].values()):.3f}s")
        return context['run_report']

    # Public interface
    def process_ingest(self, params):
        """Parse, clean, build and save a graph; returns the RunReport"""
        return self._invoke(self.ingest_pipeline, 'ingest', params)

    def process_hotspots(self, params):
        return self._invoke(self.hotspots_pipeline, 'hotspots', params)

    def process_routes(self, params):
        return self._invoke(self.routes_pipeline, 'routes', params)

    def process_stats(self, params):
        return self._invoke(self.stats_pipeline, 'stats', params)


# Global pipeline instance
pipeline = Pipeline()
