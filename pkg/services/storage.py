"""
On-disk graph directory: one vertex file, one file per edge partition and a
JSON manifest written last as the commit point.

Layout:
    manifest.json
    vertices.csv        vid, lat_micro, lon_micro, validity
    edges-00000.csv     eid, src, dst, start, end, passengers, fare_cents, duration_seconds
    ...

Files are gzip-compressed (".csv.gz", mtime 0) when requested. Equal graphs
always produce byte-identical files.
"""

from __future__ import annotations

import csv
import gzip
import hashlib
import io
import json
import os
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from services.errors import LoadError, StorageIOError
from services.graph_model import (
    EDGE_COLUMNS,
    EdgeRecord,
    EvolvingGraph,
    GeoCell,
    GraphMeta,
    VertexRecord,
    validate,
)
from services.log import get_logger
from services.parallel import map_partitions
from services.temporal import Interval, IntervalSet, WindowSpec

logger = get_logger(__name__)

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"
VERTEX_COLUMNS = ["vid", "lat_micro", "lon_micro", "validity"]
_GRAPH_FILE = re.compile(r"^(vertices|edges-\d{5})\.csv(\.gz)?$")


@dataclass
class GraphManifest:
    format_version: int
    resolution_digits: int
    time_span: Optional[Tuple[int, int]]
    vertex_count: int
    edge_count: int
    partition_count: int
    compressed: bool = False
    window_spec: Optional[dict] = None
    cleaning_report: Optional[dict] = None
    # file name -> {"sha256": hex digest, "rows": data rows}
    files: Dict[str, dict] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "resolution_digits": self.resolution_digits,
            "time_span": list(self.time_span) if self.time_span else None,
            "vertex_count": self.vertex_count,
            "edge_count": self.edge_count,
            "partition_count": self.partition_count,
            "compressed": self.compressed,
            "window_spec": self.window_spec,
            "cleaning_report": self.cleaning_report,
            "files": self.files,
        }

    @classmethod
    def from_dict(cls, data: dict) -> GraphManifest:
        span = data.get("time_span")
        return cls(
            format_version=data["format_version"],
            resolution_digits=data["resolution_digits"],
            time_span=tuple(span) if span else None,
            vertex_count=data["vertex_count"],
            edge_count=data["edge_count"],
            partition_count=data["partition_count"],
            compressed=data.get("compressed", False),
            window_spec=data.get("window_spec"),
            cleaning_report=data.get("cleaning_report"),
            files=data.get("files", {}),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _file_names(partition_count: int, compressed: bool) -> Tuple[str, List[str]]:
    suffix = ".csv.gz" if compressed else ".csv"
    return "vertices" + suffix, [f"edges-{p:05d}{suffix}" for p in range(partition_count)]


def _encode(header: List[str], rows, compressed: bool) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    data = buf.getvalue().encode("utf-8")
    if compressed:
        data = gzip.compress(data, mtime=0)
    return data


def _vertex_rows(g: EvolvingGraph):
    for v in g.vertices:
        yield (v.vid, v.cell.lat_micro, v.cell.lon_micro, v.validity.encode())


def _edge_rows(part):
    for e in part:
        yield (e.eid, e.src, e.dst, e.validity.start, e.validity.end,
               e.passengers, e.fare_cents, e.duration_seconds)


def _read_existing_manifest(directory: str) -> Optional[dict]:
    path = os.path.join(directory, MANIFEST_NAME)
    if not os.path.exists(path):
        return None
    try:
        with open(path, "r") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise StorageIOError(f"Refusing to overwrite {directory}: unreadable manifest ({e})")


def save(
    g: EvolvingGraph,
    directory: str,
    cleaning_report: Optional[dict] = None,
    compress: bool = False,
    threads: int = 1,
) -> GraphManifest:
    """Write g into directory; the manifest goes last"""
    existing = _read_existing_manifest(directory)
    if existing is not None and existing.get("format_version") != FORMAT_VERSION:
        raise StorageIOError(
            f"Refusing to overwrite {directory}: format_version {existing.get('format_version')} != {FORMAT_VERSION}"
        )

    vertex_name, edge_names = _file_names(g.meta.partition_count, compress)
    payloads = [(vertex_name, _encode(VERTEX_COLUMNS, _vertex_rows(g), compress), g.meta.vertex_count)]
    encoded = map_partitions(
        lambda part: (_encode(EDGE_COLUMNS, _edge_rows(part), compress), len(part)),
        g.partitions,
        threads,
    )
    payloads.extend((name, data, rows) for name, (data, rows) in zip(edge_names, encoded))

    try:
        os.makedirs(directory, exist_ok=True)
        # the manifest is the commit point; none exists while files change
        manifest_path = os.path.join(directory, MANIFEST_NAME)
        if os.path.exists(manifest_path):
            os.remove(manifest_path)
        keep = {name for name, _, _ in payloads}
        for name in os.listdir(directory):
            if _GRAPH_FILE.match(name) and name not in keep:
                os.remove(os.path.join(directory, name))

        def write(item) -> None:
            name, data, _ = item
            with open(os.path.join(directory, name), "wb") as f:
                f.write(data)

        map_partitions(write, payloads, threads)
        meta = g.meta
        manifest = GraphManifest(
            format_version=FORMAT_VERSION,
            resolution_digits=meta.resolution_digits,
            time_span=(meta.time_span.start, meta.time_span.end) if meta.time_span else None,
            vertex_count=meta.vertex_count,
            edge_count=meta.edge_count,
            partition_count=meta.partition_count,
            compressed=compress,
            window_spec=meta.window_spec.to_dict() if meta.window_spec else None,
            cleaning_report=cleaning_report,
            files={name: {"sha256": hashlib.sha256(data).hexdigest(), "rows": rows}
                   for name, data, rows in payloads},
        )
        with open(manifest_path, "w") as f:
            f.write(manifest.dumps())
    except OSError as e:
        raise StorageIOError(f"Cannot write graph to {directory}: {e}")

    logger.info("✓ Saved graph to %s (%d vertices, %d edges, %d partitions)",
                directory, meta.vertex_count, meta.edge_count, meta.partition_count)
    return manifest


def read_manifest(directory: str) -> GraphManifest:
    path = os.path.join(directory, MANIFEST_NAME)
    if not os.path.exists(path):
        raise LoadError("missing manifest", path)
    try:
        with open(path, "r") as f:
            manifest = GraphManifest.from_dict(json.load(f))
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise LoadError(f"unreadable manifest: {e}", path)
    except OSError as e:
        raise StorageIOError(f"Cannot read {path}: {e}")
    if manifest.format_version != FORMAT_VERSION:
        raise LoadError(f"format_version {manifest.format_version} is not {FORMAT_VERSION}", path)
    return manifest


def _read_rows(path: str, header: List[str], compressed: bool) -> Tuple[bytes, List[List[str]]]:
    if not os.path.exists(path):
        raise LoadError("missing file", path)
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise StorageIOError(f"Cannot read {path}: {e}")
    try:
        text = (gzip.decompress(data) if compressed else data).decode("utf-8")
    except (OSError, EOFError, UnicodeDecodeError) as e:
        raise LoadError(f"cannot decode: {e}", path)
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != header:
        raise LoadError(f"header is not {','.join(header)}", path, 0)
    return data, rows[1:]


def _parse_vertex(row: List[str], digits: int) -> VertexRecord:
    vid, lat, lon, validity = row
    return VertexRecord(int(vid), GeoCell(int(lat), int(lon), digits), IntervalSet.decode(validity))


def _parse_edge(row: List[str]) -> EdgeRecord:
    eid, src, dst, start, end, pax, fare, duration = (int(x) for x in row)
    return EdgeRecord(eid, src, dst, Interval(start, end), pax, fare, duration)


def _load_file(path: str, header: List[str], compressed: bool, expected: dict, parse) -> list:
    data, rows = _read_rows(path, header, compressed)
    records = []
    for number, row in enumerate(rows, start=1):
        if len(row) != len(header):
            raise LoadError(f"expected {len(header)} fields, got {len(row)}", path, number)
        try:
            records.append(parse(row))
        except ValueError as e:
            raise LoadError(str(e), path, number)
    if len(records) != expected.get("rows"):
        raise LoadError(f"{len(records)} rows, manifest says {expected.get('rows')}", path)
    if hashlib.sha256(data).hexdigest() != expected.get("sha256"):
        raise LoadError("content digest does not match manifest", path)
    return records


def _locate(directory: str, files, entity: str) -> Tuple[str, Optional[int]]:
    """File and 1-based data row holding "vertex N" or "edge N"; the manifest for graph-wide faults"""
    kind, _, ident = entity.partition(" ")
    key = {"vertex": "vid", "edge": "eid"}.get(kind)
    found = (os.path.join(directory, MANIFEST_NAME), None)
    if key is None:
        return found
    for name, records in files:
        if not name.startswith("vertices" if kind == "vertex" else "edges"):
            continue
        for row, record in enumerate(records, start=1):
            if str(getattr(record, key)) == ident:
                # duplicates are reported where they repeat
                found = (os.path.join(directory, name), row)
    return found


def load_with_manifest(directory: str, threads: int = 1) -> Tuple[EvolvingGraph, GraphManifest]:
    manifest = read_manifest(directory)
    vertex_name, edge_names = _file_names(manifest.partition_count, manifest.compressed)
    for name in [vertex_name] + edge_names:
        if name not in manifest.files:
            raise LoadError(f"manifest does not list {name}", os.path.join(directory, MANIFEST_NAME))

    digits = manifest.resolution_digits
    vertices = _load_file(
        os.path.join(directory, vertex_name), VERTEX_COLUMNS, manifest.compressed,
        manifest.files[vertex_name], lambda row: _parse_vertex(row, digits),
    )
    partitions = map_partitions(
        lambda name: tuple(_load_file(
            os.path.join(directory, name), EDGE_COLUMNS, manifest.compressed,
            manifest.files[name], _parse_edge,
        )),
        edge_names,
        threads,
    )

    span = Interval(*manifest.time_span) if manifest.time_span else None
    meta = GraphMeta(
        resolution_digits=digits,
        time_span=span,
        vertex_count=manifest.vertex_count,
        edge_count=manifest.edge_count,
        partition_count=manifest.partition_count,
        window_spec=WindowSpec.from_dict(manifest.window_spec) if manifest.window_spec else None,
    )
    g = EvolvingGraph(tuple(vertices), tuple(partitions), meta)
    report = validate(g)
    if not report.ok:
        first = report.violations[0]
        files = [(vertex_name, vertices)] + list(zip(edge_names, partitions))
        path, row = _locate(directory, files, first.entity)
        raise LoadError(f"{len(report.violations)} invariant violations, first: {first}", path, row)
    logger.info("✓ Loaded graph from %s (%d vertices, %d edges)", directory, meta.vertex_count, meta.edge_count)
    return g, manifest


def load(directory: str, threads: int = 1) -> EvolvingGraph:
    return load_with_manifest(directory, threads)[0]
