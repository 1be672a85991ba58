"""
Trip ingestion - parse TLC-style CSVs, apply the cleaning rules, quantize
coordinates and build the initial evolving graph.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_UP, Decimal, InvalidOperation
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import pandas as pd

from services.errors import ConfigurationError, EmptyGraphError
from services.graph_model import RESOLUTIONS, EdgeRecord, EvolvingGraph, GeoCell, VertexRecord
from services.log import get_logger
from services.temporal import Interval, IntervalSet, TimeInstant, parse_instant

logger = get_logger(__name__)

MAX_TRIP_SECONDS = 7200

ColumnRef = Union[str, int]

_REQUIRED_FIELDS = (
    "pickup_time", "dropoff_time",
    "pickup_lat", "pickup_lon", "dropoff_lat", "dropoff_lon",
    "passengers", "fare",
)


@dataclass(frozen=True)
class ColumnMap:
    """Where each required field lives: a header name, or a 0-based index"""

    pickup_time: ColumnRef = "tpep_pickup_datetime"
    dropoff_time: ColumnRef = "tpep_dropoff_datetime"
    pickup_lat: ColumnRef = "pickup_latitude"
    pickup_lon: ColumnRef = "pickup_longitude"
    dropoff_lat: ColumnRef = "dropoff_latitude"
    dropoff_lon: ColumnRef = "dropoff_longitude"
    passengers: ColumnRef = "passenger_count"
    fare: ColumnRef = "fare_amount"
    has_header: bool = True
    delimiter: str = ","

    def __post_init__(self) -> None:
        for name in _REQUIRED_FIELDS:
            ref = getattr(self, name)
            if ref is None or ref == "":
                raise ConfigurationError(f"Column map leaves {name} unmapped")
            if not self.has_header and not isinstance(ref, int):
                raise ConfigurationError(f"Without a header row {name} must be a column index, got {ref!r}")

    @classmethod
    def from_file(cls, path: str, **overrides) -> ColumnMap:
        """Load a JSON column map; unknown keys are a configuration error"""
        try:
            with open(path, "r") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"Cannot read column map {path}: {e}")
        unknown = set(data) - set(_REQUIRED_FIELDS) - {"has_header", "delimiter"}
        if unknown:
            raise ConfigurationError(f"Unknown column map keys: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    @property
    def references(self) -> List[ColumnRef]:
        return [getattr(self, name) for name in _REQUIRED_FIELDS]


@dataclass(frozen=True)
class TripRow:
    pickup_time: TimeInstant
    dropoff_time: TimeInstant
    pickup_lat: int
    pickup_lon: int
    dropoff_lat: int
    dropoff_lon: int
    passengers: int
    fare_cents: int


_MICRO = Decimal(1_000_000)
_CENTS = Decimal(100)
_ONE = Decimal(1)


def _decimal(text) -> Decimal:
    if not isinstance(text, str):
        raise ValueError(f"missing value {text!r}")
    value = Decimal(text.strip())
    if not value.is_finite():
        raise ValueError(f"not a finite number: {text!r}")
    return value


def parse_micro_degrees(text: str) -> int:
    """Decimal degrees text to integer micro-degrees, half away from zero"""
    return int((_decimal(text) * _MICRO).quantize(_ONE, rounding=ROUND_HALF_UP))


def parse_cents(text: str) -> int:
    """Decimal dollars text to integer cents, half away from zero"""
    return int((_decimal(text) * _CENTS).quantize(_ONE, rounding=ROUND_HALF_UP))


def _parse_count(text) -> int:
    if not isinstance(text, str):
        raise ValueError(f"missing value {text!r}")
    value = int(text.strip())
    if value < 0:
        raise ValueError(f"negative count {value}")
    return value


def _parse_row(values: Sequence) -> TripRow:
    pt, dt, plat, plon, dlat, dlon, pax, fare = values
    return TripRow(
        pickup_time=parse_instant(pt),
        dropoff_time=parse_instant(dt),
        pickup_lat=parse_micro_degrees(plat),
        pickup_lon=parse_micro_degrees(plon),
        dropoff_lat=parse_micro_degrees(dlat),
        dropoff_lon=parse_micro_degrees(dlon),
        passengers=_parse_count(pax),
        fare_cents=parse_cents(fare),
    )


def _resolve_columns(frame_columns: Sequence, column_map: ColumnMap) -> List:
    resolved = []
    for name, ref in zip(_REQUIRED_FIELDS, column_map.references):
        if column_map.has_header and isinstance(ref, str):
            if ref not in frame_columns:
                raise ConfigurationError(f"Column {ref!r} for {name} not found in header")
            resolved.append(ref)
        else:
            index = int(ref)
            if index < 0 or index >= len(frame_columns):
                raise ConfigurationError(f"Column index {index} for {name} out of range")
            resolved.append(frame_columns[index])
    return resolved


def parse_trips(
    sources: Union[str, os.PathLike, Iterable],
    column_map: Optional[ColumnMap] = None,
    chunk_rows: int = 100_000,
) -> Tuple[List[TripRow], int]:
    """
    Parse delimited trip records.

    Args:
        sources: one path or file object, or a list of them (read in order)
        column_map: field locations; the 2015-2016 yellow-cab schema by default
        chunk_rows: rows handed to the parser per chunk

    Returns:
        (rows that parsed in every mapped field, count of malformed rows)
    """
    column_map = column_map or ColumnMap()
    if isinstance(sources, (str, os.PathLike)) or hasattr(sources, "read"):
        sources = [sources]

    rows: List[TripRow] = []
    errors = 0
    for source in sources:
        parsed, bad = _parse_source(source, column_map, chunk_rows)
        rows.extend(parsed)
        errors += bad
    logger.info("✓ Parsed %d trip rows, %d malformed", len(rows), errors)
    return rows, errors


def _parse_source(source, column_map: ColumnMap, chunk_rows: int) -> Tuple[List[TripRow], int]:
    bad_lines = []

    def on_bad_line(fields):
        bad_lines.append(fields)
        return None

    name = getattr(source, "name", source)
    try:
        reader = pd.read_csv(
            source,
            sep=column_map.delimiter,
            header=0 if column_map.has_header else None,
            dtype=str,
            keep_default_na=False,
            # TLC files are unquoted; undecodable bytes turn into U+FFFD and fail field parsing
            quoting=csv.QUOTE_NONE,
            encoding_errors="replace",
            engine="python",
            on_bad_lines=on_bad_line,
            chunksize=chunk_rows,
        )
        rows: List[TripRow] = []
        errors = 0
        columns = None
        for chunk in reader:
            if columns is None:
                columns = _resolve_columns(list(chunk.columns), column_map)
            for values in chunk[columns].itertuples(index=False, name=None):
                try:
                    rows.append(_parse_row(values))
                except (ValueError, TypeError, ArithmeticError, InvalidOperation):
                    errors += 1
    except pd.errors.EmptyDataError:
        logger.warning("⚠️  %s is empty", name)
        return [], 0
    except OSError as e:
        raise ConfigurationError(f"Cannot read trip input {name}: {e}")
    return rows, errors + len(bad_lines)


CLEANING_RULES = ("malformed", "zero_coordinate", "non_positive_duration", "too_long")


@dataclass
class CleaningReport:
    """Per-rule rejection counts; a row is charged to the first rule it breaks"""

    total_read: int = 0
    total_kept: int = 0
    rejected: Dict[str, int] = field(default_factory=lambda: {rule: 0 for rule in CLEANING_RULES})
    out_of_range: int = 0

    @property
    def total_rejected(self) -> int:
        return sum(self.rejected.values())

    def absorb_parse_errors(self, count: int) -> CleaningReport:
        """Fold rows that never parsed into the report"""
        self.rejected["malformed"] += count
        self.total_read += count
        return self

    def to_dict(self) -> dict:
        return asdict(self)


def clean_trips(rows: Iterable[TripRow]) -> Tuple[List[TripRow], CleaningReport]:
    report = CleaningReport()
    kept: List[TripRow] = []
    for row in rows:
        report.total_read += 1
        rule = _broken_rule(row)
        if rule:
            report.rejected[rule] += 1
            continue
        if not _in_bounds(row):
            report.out_of_range += 1
        kept.append(row)
    report.total_kept = len(kept)
    if report.out_of_range:
        logger.warning("⚠️  %d kept trips have out-of-range coordinates", report.out_of_range)
    return kept, report


def _broken_rule(row: TripRow) -> Optional[str]:
    if 0 in (row.pickup_lat, row.pickup_lon, row.dropoff_lat, row.dropoff_lon):
        return "zero_coordinate"
    if row.dropoff_time <= row.pickup_time:
        return "non_positive_duration"
    if row.dropoff_time - row.pickup_time > MAX_TRIP_SECONDS:
        return "too_long"
    return None


def _in_bounds(row: TripRow) -> bool:
    return (
        abs(row.pickup_lat) <= 90_000_000 and abs(row.dropoff_lat) <= 90_000_000
        and abs(row.pickup_lon) <= 180_000_000 and abs(row.dropoff_lon) <= 180_000_000
    )


def quantize(coord_micro: int, digits: int) -> int:
    """Round micro-degrees to `digits` decimals, ties away from zero"""
    if digits not in RESOLUTIONS:
        raise ValueError(f"digits must be one of {RESOLUTIONS}, got {digits}")
    step = 10 ** (6 - digits)
    q, r = divmod(abs(coord_micro), step)
    if 2 * r >= step:
        q += 1
    return (-1 if coord_micro < 0 else 1) * q * step


def build_graph(rows: Sequence[TripRow], digits: int, partition_count: int = 1) -> EvolvingGraph:
    """
    One vertex per quantized location, one edge per trip.

    Vertex validity runs from the earliest incident pickup to the latest
    incident dropoff; vids follow (lat, lon) order and eids follow row order.
    """
    if not rows:
        raise EmptyGraphError("No trips left to build a graph from")

    def cell(lat: int, lon: int) -> GeoCell:
        return GeoCell(quantize(lat, digits), quantize(lon, digits), digits)

    hulls: Dict[GeoCell, List[int]] = {}
    ends = []
    for row in rows:
        src = cell(row.pickup_lat, row.pickup_lon)
        dst = cell(row.dropoff_lat, row.dropoff_lon)
        ends.append((src, dst))
        for c in (src, dst):
            hull = hulls.get(c)
            if hull is None:
                hulls[c] = [row.pickup_time, row.dropoff_time]
            else:
                hull[0] = min(hull[0], row.pickup_time)
                hull[1] = max(hull[1], row.dropoff_time)

    vid_of = {c: vid for vid, c in enumerate(sorted(hulls))}
    vertices = [
        VertexRecord(vid_of[c], c, IntervalSet((Interval(*hulls[c]),)))
        for c in hulls
    ]
    edges = [
        EdgeRecord(
            eid=eid,
            src=vid_of[src],
            dst=vid_of[dst],
            validity=Interval(row.pickup_time, row.dropoff_time),
            passengers=row.passengers,
            fare_cents=row.fare_cents,
            duration_seconds=row.dropoff_time - row.pickup_time,
        )
        for eid, (row, (src, dst)) in enumerate(zip(rows, ends))
    ]
    graph = EvolvingGraph.build(vertices, edges, digits, partition_count)
    logger.info("✓ Built graph: %d vertices, %d edges at %d digits",
                graph.meta.vertex_count, graph.meta.edge_count, digits)
    return graph
