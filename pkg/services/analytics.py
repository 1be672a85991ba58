"""
Transportation analytics built from the algebra: hotspots, popular routes,
route statistics and per-window graph counts.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import pandas as pd

from services.errors import ParameterError, PreconditionError
from services.graph_model import EvolvingGraph, GeoCell, VertexId, edge_frame
from services.log import get_logger
from services.temporal import (
    Interval,
    IntervalSet,
    Quantifier,
    TimeInstant,
    WindowKind,
    WindowSpec,
    windows_overlapping,
)
from services.tga_ops import Direction, aggregate_messages_degree, node_creation, temporal_zoom

logger = get_logger(__name__)


def at_resolution(g: EvolvingGraph, digits: int, threads: int = 1) -> EvolvingGraph:
    """g unchanged at its own resolution; node creation for a coarser one"""
    current = g.meta.resolution_digits
    if digits > current:
        raise PreconditionError(f"Graph is at {current} digits; cannot analyze at finer {digits}")
    if digits == current:
        return g
    return node_creation(g, digits, threads)


@dataclass(frozen=True)
class HotspotRow:
    window: Interval
    vid: VertexId
    cell: GeoCell
    direction: Direction
    degree: int
    rank: int


def _alive_by_window(g: EvolvingGraph, window: WindowSpec) -> Dict[Interval, List[VertexId]]:
    alive: Dict[Interval, List[VertexId]] = defaultdict(list)
    for v in g.vertices:
        for W in windows_overlapping(v.validity, window):
            alive[W].append(v.vid)
    return alive


def hotspots(
    g: EvolvingGraph,
    digits: int,
    window: WindowSpec,
    k: int,
    directions: Sequence[Direction] = (Direction.IN, Direction.OUT),
    threads: int = 1,
) -> List[HotspotRow]:
    """
    Top-k locations by in- and out-degree per window.

    Zoom to the windows (exists/exists), group to `digits`, count incident
    edges per window, rank by degree then ascending vid. Every vertex alive in
    a window is a candidate, zero degree included.
    """
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    zoomed = temporal_zoom(g, window, Quantifier.EXISTS, Quantifier.EXISTS, threads)
    grouped = at_resolution(zoomed, digits, threads)
    alive = _alive_by_window(grouped, window)

    rows: List[HotspotRow] = []
    for direction in sorted(set(directions), key=lambda d: d.value):
        degree: Dict[Tuple[VertexId, Interval], int] = {}
        for series in aggregate_messages_degree(grouped, direction, window, threads):
            for W, value in series.entries:
                degree[(series.vid, W)] = value
        for W, vids in alive.items():
            ranked = sorted(vids, key=lambda vid: (-degree.get((vid, W), 0), vid))[:k]
            for rank, vid in enumerate(ranked, start=1):
                rows.append(HotspotRow(W, vid, grouped.vertex(vid).cell, direction,
                                       degree.get((vid, W), 0), rank))
    rows.sort(key=lambda r: (r.window, r.direction.value, r.rank))
    logger.info("✓ Hotspots: %d rows over %d windows", len(rows), len(alive))
    return rows


def edges_per_window(g: EvolvingGraph, window: WindowSpec) -> Dict[Interval, int]:
    """Number of edges whose validity intersects each window"""
    counts: Counter = Counter()
    for e in g.edges:
        counts.update(windows_overlapping(IntervalSet((e.validity,)), window))
    return dict(counts)


@dataclass(frozen=True)
class HotspotShare:
    window: Interval
    direction: Direction
    top_degree: int
    edges: int

    @property
    def share(self) -> Fraction:
        return Fraction(self.top_degree, self.edges) if self.edges else Fraction(0)


def hotspot_share(rows: Iterable[HotspotRow], edge_counts: Dict[Interval, int]) -> List[HotspotShare]:
    """Combined top-k degree per (window, direction) against the window's edges"""
    totals: Dict[Tuple[Interval, Direction], int] = defaultdict(int)
    for r in rows:
        totals[(r.window, r.direction)] += r.degree
    return [
        HotspotShare(W, d, total, edge_counts.get(W, 0))
        for (W, d), total in sorted(totals.items(), key=lambda item: (item[0][0], item[0][1].value))
    ]


@dataclass(frozen=True)
class DegreeDistribution:
    window: Interval
    direction: Direction
    degrees: Tuple[int, ...]


def degree_distribution(
    g: EvolvingGraph,
    digits: int,
    window: WindowSpec,
    top: int,
    directions: Sequence[Direction] = (Direction.IN, Direction.OUT),
    threads: int = 1,
) -> List[DegreeDistribution]:
    """Non-increasing degrees of the top nodes per window, one entry per requested direction"""
    grouped: Dict[Tuple[Interval, Direction], List[int]] = defaultdict(list)
    for r in hotspots(g, digits, window, top, directions, threads):
        grouped[(r.window, r.direction)].append(r.degree)
    return [
        DegreeDistribution(W, d, tuple(degrees))
        for (W, d), degrees in sorted(grouped.items(), key=lambda item: (item[0][0], item[0][1].value))
    ]


@dataclass(frozen=True)
class WindowCount:
    window: Interval
    vertices: int
    edges: int


def window_counts(g: EvolvingGraph, digits: int, window: WindowSpec, threads: int = 1) -> List[WindowCount]:
    """Distinct locations alive and trips intersecting each window"""
    grouped = at_resolution(g, digits, threads)
    alive = _alive_by_window(grouped, window)
    edges = edges_per_window(grouped, window)
    windows = sorted(set(alive) | set(edges))
    return [WindowCount(W, len(alive.get(W, ())), edges.get(W, 0)) for W in windows]


@dataclass(frozen=True)
class RouteAggregate:
    source: GeoCell
    dest: GeoCell
    start: TimeInstant
    num_trips: int
    total_passengers: int
    total_cost_cents: int
    total_duration_seconds: int


@dataclass
class RoutesReport:
    trips_in_span: int = 0
    trips_outside_span: int = 0
    self_loop_trips: int = 0

    def to_dict(self) -> dict:
        return {
            "trips_in_span": self.trips_in_span,
            "trips_outside_span": self.trips_outside_span,
            "self_loop_trips": self.self_loop_trips,
        }


def window_starts(instants: pd.Series, window: WindowSpec) -> pd.Series:
    """Start of the tiling window containing each instant"""
    if window.kind is WindowKind.FIXED_DURATION:
        d, origin = window.duration_seconds, window.origin
        return origin + ((instants - origin) // d) * d
    return instants.map(lambda t: window.window_containing(int(t)).start).astype("int64")


def _route_frame(
    g: EvolvingGraph,
    span: Optional[Interval],
    report: RoutesReport,
) -> pd.DataFrame:
    frame = edge_frame(g)
    if span is not None:
        inside = (frame["start"] >= span.start) & (frame["start"] < span.end)
        report.trips_outside_span += int((~inside).sum())
        frame = frame[inside]
    report.trips_in_span += len(frame)
    loops = frame["src"] == frame["dst"]
    report.self_loop_trips += int(loops.sum())
    return frame[~loops]


def _with_cells(frame: pd.DataFrame, g: EvolvingGraph) -> pd.DataFrame:
    lat = {v.vid: v.cell.lat_micro for v in g.vertices}
    lon = {v.vid: v.cell.lon_micro for v in g.vertices}
    return frame.assign(
        src_lat=frame["src"].map(lat), src_lon=frame["src"].map(lon),
        dst_lat=frame["dst"].map(lat), dst_lon=frame["dst"].map(lon),
    )


def popular_routes(
    g: EvolvingGraph,
    digits: int,
    window: WindowSpec,
    span: Optional[Interval] = None,
    threads: int = 1,
    report: Optional[RoutesReport] = None,
) -> List[RouteAggregate]:
    """
    Group trips by (source cell, dest cell, start of the pickup's window).

    Each trip falls in exactly one window, the one containing its pickup.
    Self-loop routes are left out. Sorted by num_trips descending, then
    source, dest and start ascending.
    """
    report = report if report is not None else RoutesReport()
    grouped = at_resolution(g, digits, threads)
    frame = _route_frame(grouped, span, report)
    frame = frame.assign(window_start=window_starts(frame["start"], window))
    agg = (
        frame.groupby(["src", "dst", "window_start"], sort=True)
        .agg(
            num_trips=("eid", "size"),
            total_passengers=("passengers", "sum"),
            total_cost_cents=("fare_cents", "sum"),
            total_duration_seconds=("duration_seconds", "sum"),
        )
        .reset_index()
    )
    agg = _with_cells(agg, grouped).sort_values(
        ["num_trips", "src_lat", "src_lon", "dst_lat", "dst_lon", "window_start"],
        ascending=[False, True, True, True, True, True],
        kind="mergesort",
    )

    def cell(vid) -> GeoCell:
        return grouped.vertex(int(vid)).cell

    routes = [
        RouteAggregate(
            source=cell(r.src),
            dest=cell(r.dst),
            start=int(r.window_start),
            num_trips=int(r.num_trips),
            total_passengers=int(r.total_passengers),
            total_cost_cents=int(r.total_cost_cents),
            total_duration_seconds=int(r.total_duration_seconds),
        )
        for r in agg.itertuples(index=False)
    ]
    logger.info("✓ Popular routes: %d (route, window) groups, %d self-loop trips excluded",
                len(routes), report.self_loop_trips)
    return routes


@dataclass
class RouteStats:
    """Simultaneity summary of one popular_routes run"""

    max_simultaneous: Dict[Tuple[GeoCell, GeoCell], int] = field(default_factory=dict)
    # histogram[m] = routes whose busiest window had >= m trips, m >= 2
    histogram: Dict[int, int] = field(default_factory=dict)
    exact: Dict[int, int] = field(default_factory=dict)
    shared_trips: int = 0
    shared_passengers: int = 0

    @property
    def max_overall(self) -> int:
        return max(self.max_simultaneous.values(), default=0)

    @property
    def mean_passengers_per_shared_trip(self) -> Optional[Fraction]:
        if not self.shared_trips:
            return None
        return Fraction(self.shared_passengers, self.shared_trips)

    def to_dict(self) -> dict:
        busy = sorted(
            ((route, m) for route, m in self.max_simultaneous.items() if m >= 2),
            key=lambda item: (-item[1], item[0]),
        )
        mean = self.mean_passengers_per_shared_trip
        return {
            "routes": len(self.max_simultaneous),
            "max_simultaneous": self.max_overall,
            "histogram_at_least": {str(m): n for m, n in sorted(self.histogram.items())},
            "histogram_exactly": {str(m): n for m, n in sorted(self.exact.items())},
            "shared_trips": self.shared_trips,
            "shared_passengers": self.shared_passengers,
            "mean_passengers_per_shared_trip": None if mean is None else round(float(mean), 4),
            "simultaneous_routes": [
                {"source": src.key, "dest": dst.key, "max_simultaneous": m}
                for (src, dst), m in busy
            ],
        }


def route_stats(aggregates: Iterable[RouteAggregate]) -> RouteStats:
    stats = RouteStats()
    best = stats.max_simultaneous
    for a in aggregates:
        route = (a.source, a.dest)
        best[route] = max(best.get(route, 0), a.num_trips)
        if a.num_trips >= 2:
            stats.shared_trips += a.num_trips
            stats.shared_passengers += a.total_passengers
    exact = Counter(m for m in best.values() if m >= 2)
    stats.exact = dict(sorted(exact.items()))
    for m in range(2, stats.max_overall + 1):
        stats.histogram[m] = sum(n for top, n in exact.items() if top >= m)
    return stats


@dataclass(frozen=True)
class RoutePair:
    source: GeoCell
    dest: GeoCell
    trip_count: int


def top_route_pairs(
    g: EvolvingGraph,
    digits: int,
    month: Interval,
    n: int,
    threads: int = 1,
) -> List[RoutePair]:
    """Most frequent (source, dest) pairs over every trip picked up in `month`"""
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    if n == 0:
        return []
    grouped = at_resolution(g, digits, threads)
    frame = _route_frame(grouped, month, RoutesReport())
    counts = frame.groupby(["src", "dst"], sort=True).size().rename("trip_count").reset_index()
    counts = _with_cells(counts, grouped).sort_values(
        ["trip_count", "src_lat", "src_lon", "dst_lat", "dst_lon"],
        ascending=[False, True, True, True, True],
        kind="mergesort",
    ).head(n)
    return [
        RoutePair(grouped.vertex(int(r.src)).cell, grouped.vertex(int(r.dst)).cell, int(r.trip_count))
        for r in counts.itertuples(index=False)
    ]
