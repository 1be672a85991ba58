"""
Evolving property multigraph: immutable vertex and edge tables, snapshots,
the tabular edge relation and invariant validation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import pandas as pd

from services.temporal import Interval, IntervalSet, TimeInstant, WindowSpec

VertexId = int

RESOLUTIONS = (4, 3, 2)
_MAX_LAT_MICRO = 90_000_000
_MAX_LON_MICRO = 180_000_000


def format_micro(micro: int, digits: int) -> str:
    """Render micro-degrees with exactly `digits` decimals (value must be a multiple)"""
    sign = "-" if micro < 0 else ""
    whole, frac = divmod(abs(micro), 1_000_000)
    text = f"{frac:06d}"[:digits]
    return f"{sign}{whole}.{text}"


@dataclass(frozen=True, order=True)
class GeoCell:
    """A lat/lon grid cell in integer micro-degrees at a decimal resolution"""

    lat_micro: int
    lon_micro: int
    resolution_digits: int = 4

    def __post_init__(self) -> None:
        if self.resolution_digits not in RESOLUTIONS:
            raise ValueError(f"resolution_digits must be one of {RESOLUTIONS}")
        step = 10 ** (6 - self.resolution_digits)
        if self.lat_micro % step or self.lon_micro % step:
            raise ValueError(f"cell ({self.lat_micro}, {self.lon_micro}) is off the {self.resolution_digits}-digit grid")

    @property
    def lat(self) -> str:
        return format_micro(self.lat_micro, self.resolution_digits)

    @property
    def lon(self) -> str:
        return format_micro(self.lon_micro, self.resolution_digits)

    @property
    def in_bounds(self) -> bool:
        return abs(self.lat_micro) <= _MAX_LAT_MICRO and abs(self.lon_micro) <= _MAX_LON_MICRO

    @property
    def key(self) -> str:
        """Canonical grouping key text, "lat:lon" """
        return f"{self.lat}:{self.lon}"


@dataclass(frozen=True)
class VertexRecord:
    vid: VertexId
    cell: GeoCell
    validity: IntervalSet


@dataclass(frozen=True)
class EdgeRecord:
    """One trip; duration_seconds is the original trip length even after zoom"""

    eid: int
    src: VertexId
    dst: VertexId
    validity: Interval
    passengers: int
    fare_cents: int
    duration_seconds: int

    @property
    def sort_key(self) -> Tuple[int, int, int, int]:
        return (self.src, self.dst, self.validity.start, self.eid)


class EdgeRow(NamedTuple):
    eid: int
    src: VertexId
    dst: VertexId
    start: TimeInstant
    end: TimeInstant
    passengers: int
    fare_cents: int
    duration_seconds: int


EDGE_COLUMNS = list(EdgeRow._fields)


@dataclass(frozen=True)
class GraphMeta:
    resolution_digits: int
    time_span: Optional[Interval]
    vertex_count: int
    edge_count: int
    partition_count: int
    window_spec: Optional[WindowSpec] = None


def partition_of(src: VertexId, vid_bound: int, partition_count: int) -> int:
    """Contiguous src ranges: partition p holds src in [p*B/P, (p+1)*B/P)"""
    if vid_bound <= 0:
        return 0
    return min(partition_count - 1, src * partition_count // vid_bound)


@dataclass(frozen=True)
class EvolvingGraph:
    """
    Immutable evolving multigraph.

    Vertices are sorted by vid. Edges live in meta.partition_count partitions
    split by contiguous src ranges, each sorted by (src, dst, start, eid), so the
    concatenation of partitions is the global edge order.
    """

    vertices: Tuple[VertexRecord, ...]
    partitions: Tuple[Tuple[EdgeRecord, ...], ...]
    meta: GraphMeta

    @classmethod
    def build(
        cls,
        vertices: Iterable[VertexRecord],
        edges: Iterable[EdgeRecord],
        resolution_digits: int,
        partition_count: int = 1,
        window_spec: Optional[WindowSpec] = None,
    ) -> EvolvingGraph:
        """Sort, partition and summarize; the only way graphs are assembled"""
        if partition_count < 1:
            raise ValueError(f"partition_count must be >= 1, got {partition_count}")
        vs = tuple(sorted(vertices, key=lambda v: v.vid))
        bound = vs[-1].vid + 1 if vs else 0
        buckets: List[List[EdgeRecord]] = [[] for _ in range(partition_count)]
        edge_list = list(edges)
        for e in edge_list:
            buckets[partition_of(e.src, bound, partition_count)].append(e)
        parts = tuple(tuple(sorted(b, key=lambda e: e.sort_key)) for b in buckets)
        meta = GraphMeta(
            resolution_digits=resolution_digits,
            time_span=_span(vs),
            vertex_count=len(vs),
            edge_count=len(edge_list),
            partition_count=partition_count,
            window_spec=window_spec,
        )
        return cls(vs, parts, meta)

    @property
    def edges(self) -> Iterator[EdgeRecord]:
        for part in self.partitions:
            yield from part

    @cached_property
    def vertex_index(self) -> Dict[VertexId, VertexRecord]:
        return {v.vid: v for v in self.vertices}

    def vertex(self, vid: VertexId) -> VertexRecord:
        return self.vertex_index[vid]


def _span(vertices: Sequence[VertexRecord]) -> Optional[Interval]:
    hulls = [v.validity.hull for v in vertices if v.validity]
    if not hulls:
        return None
    return Interval(min(h.start for h in hulls), max(h.end for h in hulls))


@dataclass(frozen=True)
class StaticSnapshot:
    t: TimeInstant
    vertex_ids: Tuple[VertexId, ...]
    edges: Tuple[EdgeRecord, ...]


def snapshot(g: EvolvingGraph, t: TimeInstant) -> StaticSnapshot:
    """Point-in-time view: entities whose validity covers t"""
    vids = tuple(v.vid for v in g.vertices if v.validity.contains(t))
    edges = tuple(e for e in g.edges if e.validity.contains(t))
    return StaticSnapshot(t, vids, edges)


def edge_relation(g: EvolvingGraph) -> List[EdgeRow]:
    return [
        EdgeRow(e.eid, e.src, e.dst, e.validity.start, e.validity.end,
                e.passengers, e.fare_cents, e.duration_seconds)
        for e in g.edges
    ]


def edge_frame(g: EvolvingGraph) -> pd.DataFrame:
    """The edge relation as a DataFrame, one row per edge in edge order"""
    rows = edge_relation(g)
    return pd.DataFrame.from_records(rows, columns=EDGE_COLUMNS).astype("int64")


def graph_from_relation(
    vertices: Iterable[VertexRecord],
    rows: Iterable[EdgeRow],
    resolution_digits: int,
    partition_count: int = 1,
    window_spec: Optional[WindowSpec] = None,
) -> EvolvingGraph:
    edges = (
        EdgeRecord(r.eid, r.src, r.dst, Interval(r.start, r.end),
                   r.passengers, r.fare_cents, r.duration_seconds)
        for r in rows
    )
    return EvolvingGraph.build(vertices, edges, resolution_digits, partition_count, window_spec)


@dataclass(frozen=True)
class Violation:
    kind: str
    entity: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} {self.entity}: {self.detail}"


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, entity: str, detail: str) -> None:
        self.violations.append(Violation(kind, entity, detail))

    def count(self, kind: str) -> int:
        return sum(1 for v in self.violations if v.kind == kind)


def validate(g: EvolvingGraph) -> ValidationReport:
    """Check every EvolvingGraph invariant; violations are returned, not raised"""
    report = ValidationReport()
    meta = g.meta

    prev = None
    for v in g.vertices:
        if prev is not None and v.vid <= prev:
            report.add("ordering", f"vertex {v.vid}", "vertex table not strictly sorted by vid")
        prev = v.vid
        if not v.validity:
            report.add("empty-validity", f"vertex {v.vid}", "vertex has no validity")
        if v.cell.resolution_digits != meta.resolution_digits:
            report.add("resolution", f"vertex {v.vid}",
                       f"cell at {v.cell.resolution_digits} digits in a {meta.resolution_digits}-digit graph")

    index = {v.vid: v for v in g.vertices}
    bound = g.vertices[-1].vid + 1 if g.vertices else 0
    seen_eids = set()
    edge_count = 0
    if len(g.partitions) != meta.partition_count:
        report.add("count", "graph", f"{len(g.partitions)} partitions, meta says {meta.partition_count}")
    for p, part in enumerate(g.partitions):
        last_key = None
        for e in part:
            edge_count += 1
            name = f"edge {e.eid}"
            if e.eid in seen_eids:
                report.add("duplicate-eid", name, "eid appears more than once")
            seen_eids.add(e.eid)
            if last_key is not None and e.sort_key < last_key:
                report.add("ordering", name, f"partition {p} not sorted by (src, dst, start, eid)")
            last_key = e.sort_key
            if partition_of(e.src, bound, len(g.partitions)) != p:
                report.add("partitioning", name, f"src {e.src} does not belong in partition {p}")
            if e.passengers < 0 or e.duration_seconds < 1:
                report.add("attribute", name, "negative passengers or non-positive duration")
            if meta.window_spec is None and e.duration_seconds != e.validity.length:
                report.add("attribute", name,
                           f"duration {e.duration_seconds}s differs from validity {e.validity}")
            for role, vid in (("src", e.src), ("dst", e.dst)):
                endpoint = index.get(vid)
                if endpoint is None:
                    report.add("referential", name, f"{role} {vid} does not exist")
                elif not endpoint.validity.covers(e.validity):
                    report.add("temporal", name,
                               f"alive {e.validity} outside {role} {vid} validity {endpoint.validity}")

    if meta.vertex_count != len(g.vertices):
        report.add("count", "graph", f"{len(g.vertices)} vertices, meta says {meta.vertex_count}")
    if meta.edge_count != edge_count:
        report.add("count", "graph", f"{edge_count} edges, meta says {meta.edge_count}")
    if meta.time_span != _span(g.vertices):
        report.add("count", "graph", f"time span {meta.time_span} does not match vertices")
    return report
