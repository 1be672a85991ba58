"""
Output writers for the command line: CSV tables, JSON documents and the
GeoJSON route map.
"""

import json
from typing import Iterable, List, Sequence

import geojson
import pandas as pd

from services.analytics import HotspotRow, RouteAggregate, RoutePair, RouteStats, WindowCount
from services.errors import StorageIOError
from services.log import get_logger
from services.temporal import format_instant

logger = get_logger(__name__)

HOTSPOT_COLUMNS = ["window_start", "window_end", "rank", "direction", "lat", "lon", "degree"]
ROUTE_COLUMNS = [
    "source_lat", "source_lon", "dest_lat", "dest_lon", "window_start",
    "num_trips", "total_passengers", "total_cost_cents", "total_duration_seconds",
]
WINDOW_COUNT_COLUMNS = ["window_start", "window_end", "vertices", "edges"]


def _write_frame(records: List[tuple], columns: List[str], path: str) -> int:
    frame = pd.DataFrame.from_records(records, columns=columns)
    try:
        frame.to_csv(path, index=False, lineterminator="\n")
    except OSError as e:
        raise StorageIOError(f"Cannot write {path}: {e}")
    logger.info("✓ Wrote %d rows to %s", len(frame), path)
    return len(frame)


def write_hotspots_csv(rows: Sequence[HotspotRow], path: str) -> int:
    records = [
        (format_instant(r.window.start), format_instant(r.window.end), r.rank,
         r.direction.value, r.cell.lat, r.cell.lon, r.degree)
        for r in rows
    ]
    return _write_frame(records, HOTSPOT_COLUMNS, path)


def write_routes_csv(routes: Sequence[RouteAggregate], path: str) -> int:
    records = [
        (a.source.lat, a.source.lon, a.dest.lat, a.dest.lon, format_instant(a.start),
         a.num_trips, a.total_passengers, a.total_cost_cents, a.total_duration_seconds)
        for a in routes
    ]
    return _write_frame(records, ROUTE_COLUMNS, path)


def write_window_counts_csv(counts: Sequence[WindowCount], path: str) -> int:
    records = [
        (format_instant(c.window.start), format_instant(c.window.end), c.vertices, c.edges)
        for c in counts
    ]
    return _write_frame(records, WINDOW_COUNT_COLUMNS, path)


def write_json(document: dict, path: str) -> None:
    try:
        with open(path, "w") as f:
            f.write(json.dumps(document, sort_keys=True, indent=2) + "\n")
    except OSError as e:
        raise StorageIOError(f"Cannot write {path}: {e}")
    logger.info("✓ Wrote %s", path)


def write_route_stats_json(stats: RouteStats, path: str) -> None:
    write_json(stats.to_dict(), path)


def _micro_to_degrees(micro: int) -> float:
    return micro / 1_000_000


def route_feature_collection(pairs: Iterable[RoutePair]) -> geojson.FeatureCollection:
    """One LineString per route pair, [lon, lat] order, ranked by trip count"""
    features = []
    for rank, pair in enumerate(pairs, start=1):
        line = geojson.LineString([
            (_micro_to_degrees(pair.source.lon_micro), _micro_to_degrees(pair.source.lat_micro)),
            (_micro_to_degrees(pair.dest.lon_micro), _micro_to_degrees(pair.dest.lat_micro)),
        ])
        features.append(geojson.Feature(geometry=line, properties={"num_trips": pair.trip_count, "rank": rank}))
    return geojson.FeatureCollection(features)


def write_route_geojson(pairs: Sequence[RoutePair], path: str) -> int:
    collection = route_feature_collection(pairs)
    try:
        with open(path, "w") as f:
            f.write(geojson.dumps(collection, sort_keys=True) + "\n")
    except OSError as e:
        raise StorageIOError(f"Cannot write {path}: {e}")
    logger.info("✓ Wrote %d route features to %s", len(collection["features"]), path)
    return len(collection["features"])
