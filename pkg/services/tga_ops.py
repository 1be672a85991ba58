"""
Temporal graph algebra: node creation (structural zoom), temporal zoom with
quantifiers, and aggregate messages.

All operations are pure graph-to-graph (or graph-to-series) functions. Edge
partitions may be scanned by several threads; results are merged in
partition order and never depend on the thread count.
"""

from __future__ import annotations

import operator
from collections import defaultdict
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from itertools import chain
from typing import Any, Callable, Dict, Iterable, List, Optional, Set, Tuple

from services.errors import GraphIntegrityError, PreconditionError
from services.graph_model import (
    RESOLUTIONS,
    EdgeRecord,
    EvolvingGraph,
    GeoCell,
    VertexId,
    VertexRecord,
)
from services.ingest import quantize
from services.log import get_logger
from services.parallel import map_partitions
from services.temporal import (
    Interval,
    IntervalSet,
    Quantifier,
    WindowSpec,
    evaluate_quantifier,
    windows_overlapping,
)

logger = get_logger(__name__)


class Direction(Enum):
    IN = "in"
    OUT = "out"


GroupingFunction = Callable[[VertexRecord], GeoCell]


def geo_grouping(digits: int) -> GroupingFunction:
    """Group vertices by their cell rounded to `digits` decimals"""

    def group(v: VertexRecord) -> GeoCell:
        return GeoCell(
            quantize(v.cell.lat_micro, digits),
            quantize(v.cell.lon_micro, digits),
            digits,
        )

    return group


def group_vertices(
    g: EvolvingGraph,
    grouping: GroupingFunction,
    resolution_digits: int,
    threads: int = 1,
) -> EvolvingGraph:
    """
    Node creation with an arbitrary grouping function.

    One output vertex per group; its vid is the rank of the group cell in
    (lat_micro, lon_micro) order, not in the order of the "lat:lon" key text,
    and its validity is the temporal union of the members.
    Edges keep eid, attributes and validity and are re-pointed to the groups.
    """
    key_of = {v.vid: grouping(v) for v in g.vertices}
    members: Dict[GeoCell, List[Interval]] = defaultdict(list)
    for v in g.vertices:
        members[key_of[v.vid]].extend(v.validity)

    new_vid = {key: i for i, key in enumerate(sorted(members))}
    remap = {old: new_vid[key] for old, key in key_of.items()}
    vertices = [
        VertexRecord(new_vid[key], key, IntervalSet(tuple(intervals)))
        for key, intervals in members.items()
    ]

    def repoint(part: Tuple[EdgeRecord, ...]) -> List[EdgeRecord]:
        return [replace(e, src=remap[e.src], dst=remap[e.dst]) for e in part]

    edges = chain.from_iterable(map_partitions(repoint, g.partitions, threads))
    return EvolvingGraph.build(
        vertices, edges, resolution_digits, g.meta.partition_count, g.meta.window_spec
    )


def node_creation(g: EvolvingGraph, target_resolution_digits: int, threads: int = 1) -> EvolvingGraph:
    """Structural zoom to a strictly coarser geographic resolution"""
    current = g.meta.resolution_digits
    if target_resolution_digits not in RESOLUTIONS or target_resolution_digits >= current:
        raise PreconditionError(
            f"Node creation needs a resolution coarser than {current} digits, got {target_resolution_digits}"
        )
    zoomed = group_vertices(g, geo_grouping(target_resolution_digits), target_resolution_digits, threads)
    logger.info("✓ Node creation %d -> %d digits: %d -> %d vertices",
                current, target_resolution_digits, g.meta.vertex_count, zoomed.meta.vertex_count)
    return zoomed


@dataclass
class ZoomReport:
    """What temporal zoom left out"""

    vertices_dropped: int = 0
    edges_dropped: int = 0
    # an edge passed its quantifier for a window but an endpoint did not
    edge_windows_dropped: int = 0

    def to_dict(self) -> dict:
        return {
            "vertices_dropped": self.vertices_dropped,
            "edges_dropped": self.edges_dropped,
            "edge_windows_dropped": self.edge_windows_dropped,
        }


def temporal_zoom(
    g: EvolvingGraph,
    w: WindowSpec,
    vquant: Quantifier = Quantifier.EXISTS,
    equant: Quantifier = Quantifier.EXISTS,
    threads: int = 1,
    report: Optional[ZoomReport] = None,
) -> EvolvingGraph:
    """
    Coarsen time into the windows of w.

    An entity admitted to a window by its quantifier is alive for the whole
    window; an edge is admitted only where both endpoints are. Entities with
    no admitted window are dropped.
    """
    report = report if report is not None else ZoomReport()
    accepted: Dict[VertexId, Set[Interval]] = {}
    vertices = []
    for v in g.vertices:
        wins = [W for W in windows_overlapping(v.validity, w) if evaluate_quantifier(vquant, v.validity, W)]
        if not wins:
            report.vertices_dropped += 1
            continue
        accepted[v.vid] = set(wins)
        vertices.append(VertexRecord(v.vid, v.cell, IntervalSet(tuple(wins))))

    def zoom_partition(part: Tuple[EdgeRecord, ...]) -> Tuple[List[EdgeRecord], int, int]:
        kept, dropped, dropped_windows = [], 0, 0
        for e in part:
            ev = IntervalSet((e.validity,))
            wins = []
            for W in windows_overlapping(ev, w):
                if not evaluate_quantifier(equant, ev, W):
                    continue
                if W in accepted.get(e.src, ()) and W in accepted.get(e.dst, ()):
                    wins.append(W)
                else:
                    dropped_windows += 1
            if not wins:
                dropped += 1
                continue
            zoomed = IntervalSet(tuple(wins))
            if len(zoomed) != 1:
                raise GraphIntegrityError(f"edge {e.eid} would be split into {zoomed} by temporal zoom")
            kept.append(replace(e, validity=zoomed.intervals[0]))
        return kept, dropped, dropped_windows

    results = map_partitions(zoom_partition, g.partitions, threads)
    edges: List[EdgeRecord] = []
    for kept, dropped, dropped_windows in results:
        edges.extend(kept)
        report.edges_dropped += dropped
        report.edge_windows_dropped += dropped_windows

    zoomed = EvolvingGraph.build(vertices, edges, g.meta.resolution_digits, g.meta.partition_count, w)
    logger.info("✓ Temporal zoom %s (%s/%s): %d vertices, %d edges kept",
                w, vquant.value, equant.value, zoomed.meta.vertex_count, zoomed.meta.edge_count)
    return zoomed


@dataclass(frozen=True)
class MessageSeries:
    """Per-window values for one vertex; windows increasing, absent means no message"""

    vid: VertexId
    entries: Tuple[Tuple[Interval, Any], ...]

    def value_at(self, window: Interval, default: Any = 0) -> Any:
        for W, value in self.entries:
            if W == window:
                return value
        return default


DegreeSeries = MessageSeries

SendFunction = Callable[[EdgeRecord], Iterable[Tuple[VertexId, Any]]]
ReduceFunction = Callable[[Any, Any], Any]


def aggregate_messages(
    g: EvolvingGraph,
    send: SendFunction,
    reduce: ReduceFunction,
    w: WindowSpec,
    threads: int = 1,
) -> List[MessageSeries]:
    """
    General aggregate messages.

    send(edge) yields (vid, value) messages; each message is delivered in every
    window the edge's validity intersects and combined per (vid, window) with
    reduce, which must be commutative and associative.
    """

    def scan(part: Tuple[EdgeRecord, ...]) -> Dict[Tuple[VertexId, Interval], Any]:
        acc: Dict[Tuple[VertexId, Interval], Any] = {}
        for e in part:
            wins = windows_overlapping(IntervalSet((e.validity,)), w)
            for vid, value in send(e):
                for W in wins:
                    key = (vid, W)
                    acc[key] = reduce(acc[key], value) if key in acc else value
        return acc

    merged: Dict[Tuple[VertexId, Interval], Any] = {}
    for partial in map_partitions(scan, g.partitions, threads):
        for key, value in partial.items():
            merged[key] = reduce(merged[key], value) if key in merged else value

    by_vid: Dict[VertexId, List[Tuple[Interval, Any]]] = defaultdict(list)
    for (vid, W), value in merged.items():
        by_vid[vid].append((W, value))
    return [
        MessageSeries(v.vid, tuple(sorted(by_vid.get(v.vid, ()), key=lambda item: item[0])))
        for v in g.vertices
    ]


def _endpoint(direction: Direction) -> Callable[[EdgeRecord], VertexId]:
    if direction is Direction.IN:
        return operator.attrgetter("dst")
    return operator.attrgetter("src")


def aggregate_messages_degree(
    g: EvolvingGraph,
    direction: Direction,
    w: WindowSpec,
    threads: int = 1,
) -> List[DegreeSeries]:
    """In- or out-degree per window; parallel edges count individually"""
    endpoint = _endpoint(direction)
    return aggregate_messages(g, lambda e: ((endpoint(e), 1),), operator.add, w, threads)


EDGE_ATTRIBUTES = ("passengers", "fare_cents", "duration_seconds")


def _add_pairs(a: Tuple[int, int], b: Tuple[int, int]) -> Tuple[int, int]:
    return (a[0] + b[0], a[1] + b[1])


def aggregate_messages_attribute(
    g: EvolvingGraph,
    direction: Direction,
    attribute: str,
    w: WindowSpec,
    how: str = "sum",
    threads: int = 1,
) -> List[MessageSeries]:
    """Total or exact mean of an edge attribute over incident edges per window"""
    if attribute not in EDGE_ATTRIBUTES:
        raise ValueError(f"attribute must be one of {EDGE_ATTRIBUTES}, got {attribute!r}")
    endpoint = _endpoint(direction)
    value_of = operator.attrgetter(attribute)
    if how == "sum":
        return aggregate_messages(g, lambda e: ((endpoint(e), value_of(e)),), operator.add, w, threads)
    if how == "mean":
        pairs = aggregate_messages(g, lambda e: ((endpoint(e), (value_of(e), 1)),), _add_pairs, w, threads)
        return [
            MessageSeries(s.vid, tuple((W, Fraction(total, count)) for W, (total, count) in s.entries))
            for s in pairs
        ]
    raise ValueError(f"how must be 'sum' or 'mean', got {how!r}")
