import operator
from dataclasses import replace
from fractions import Fraction

import pytest

from helpers import random_graph, trip
from services.errors import PreconditionError
from services.graph_model import EvolvingGraph, snapshot, validate
from services.ingest import build_graph
from services.temporal import Interval, IntervalSet, Quantifier, WindowSpec, evaluate_quantifier
from services.tga_ops import (
    Direction,
    ZoomReport,
    aggregate_messages,
    aggregate_messages_attribute,
    aggregate_messages_degree,
    geo_grouping,
    group_vertices,
    node_creation,
    temporal_zoom,
)

A = (40_758_000, -73_985_500)
B = (40_758_400, -73_985_700)
C = (40_706_100, -74_008_700)


def fixture_graph(partitions=2):
    rows = [
        trip(0, 100, A, B, 1, 1000),
        trip(50, 120, B, C, 2, 2000),
        trip(200, 260, C, A, 3, 1500),
        trip(210, 230, A, B, 1, 500),
    ]
    return build_graph(rows, 4, partitions)


class TestNodeCreation:
    def test_vids_follow_cell_order_not_key_text(self):
        east, west = (40_750_000, -73_900_000), (40_750_000, -74_000_000)
        zoomed = node_creation(build_graph([trip(0, 60, east, west)], 4), 2)
        # "-73.90" sorts before "-74.00" as text
        assert [v.cell.key for v in zoomed.vertices] == ["40.75:-74.00", "40.75:-73.90"]
        assert [v.vid for v in zoomed.vertices] == [0, 1]

    def test_merges_nearby_cells(self):
        g = fixture_graph()
        zoomed = node_creation(g, 3)
        # A and B share the 3-digit cell 40.758:-73.986
        assert [v.cell.key for v in zoomed.vertices] == ["40.706:-74.009", "40.758:-73.986"]
        assert zoomed.meta.resolution_digits == 3
        assert zoomed.vertex(1).validity == IntervalSet.of((0, 260))
        assert validate(zoomed).ok

    def test_merged_validity_keeps_gaps(self):
        g = build_graph([trip(0, 10, A, C), trip(50, 60, B, C)], 4)
        zoomed = node_creation(g, 3)
        merged = next(v for v in zoomed.vertices if v.cell.key == "40.758:-73.986")
        assert merged.validity == IntervalSet.of((0, 10), (50, 60))
        assert snapshot(zoomed, 30).vertex_ids == (0,)

    def test_self_loops_are_kept(self):
        zoomed = node_creation(fixture_graph(), 3)
        loops = [e for e in zoomed.edges if e.src == e.dst]
        assert sorted(e.eid for e in loops) == [0, 3]

    def test_requires_strictly_coarser(self):
        g = fixture_graph()
        with pytest.raises(PreconditionError):
            node_creation(g, 4)
        with pytest.raises(PreconditionError):
            node_creation(node_creation(g, 2), 3)
        with pytest.raises(PreconditionError):
            node_creation(g, 1)

    def test_preserves_edge_count(self, rng):
        for _ in range(50):
            g = random_graph(rng)
            for digits in (3, 2):
                zoomed = node_creation(g, digits)
                assert zoomed.meta.edge_count == g.meta.edge_count
                assert validate(zoomed).ok

    def test_grouping_is_idempotent(self, rng):
        for _ in range(30):
            g = random_graph(rng)
            for digits in (3, 2):
                once = node_creation(g, digits)
                assert group_vertices(once, geo_grouping(digits), digits) == once

    def test_thread_count_does_not_matter(self, rng):
        for _ in range(10):
            g = random_graph(rng, partitions=6)
            assert node_creation(g, 2, threads=1) == node_creation(g, 2, threads=4)

    def test_snapshot_commutation(self, rng):
        for _ in range(200):
            g = random_graph(rng, max_locations=25, max_edges=100, horizon=200, max_duration=60)
            digits = rng.choice((3, 2))
            grouping = geo_grouping(digits)
            zoomed = node_creation(g, digits)
            key_of = {v.vid: grouping(v) for v in g.vertices}
            for t in range(0, 201):
                before = snapshot(g, t)
                after = snapshot(zoomed, t)
                assert {key_of[vid] for vid in before.vertex_ids} == \
                    {zoomed.vertex(vid).cell for vid in after.vertex_ids}
                assert {(e.eid, key_of[e.src], key_of[e.dst]) for e in before.edges} == \
                    {(e.eid, zoomed.vertex(e.src).cell, zoomed.vertex(e.dst).cell) for e in after.edges}


QUANTIFIERS = (Quantifier.EXISTS, Quantifier.MOST, Quantifier.ALWAYS)


def zoom_oracle(g, w, vq, eq):
    """Per window of w: the vertex ids and edge ids the quantifiers admit"""
    vertices, edges = {}, {}
    for v in g.vertices:
        win = w.window_containing(v.validity.hull.start)
        while win.start < v.validity.hull.end:
            if evaluate_quantifier(vq, v.validity, win):
                vertices.setdefault(win, set()).add(v.vid)
            win = w.window_containing(win.end)
    for e in g.edges:
        ev = IntervalSet((e.validity,))
        win = w.window_containing(e.validity.start)
        while win.start < e.validity.end:
            alive = vertices.get(win, set())
            if evaluate_quantifier(eq, ev, win) and e.src in alive and e.dst in alive:
                edges.setdefault(win, set()).add(e.eid)
            win = w.window_containing(win.end)
    return vertices, edges


def validity_by_id(per_window):
    wins = {}
    for win, ids in per_window.items():
        for i in ids:
            wins.setdefault(i, []).append(win)
    return {i: IntervalSet(tuple(ws)) for i, ws in wins.items()}


class TestTemporalZoom:
    def test_exists_example(self):
        g = fixture_graph()
        zoomed = temporal_zoom(g, WindowSpec.fixed(100))
        windows = {e.eid: e.validity for e in zoomed.edges}
        assert windows == {0: Interval(0, 100), 1: Interval(0, 200), 2: Interval(200, 300), 3: Interval(200, 300)}
        assert zoomed.meta.window_spec == WindowSpec.fixed(100)
        assert validate(zoomed).ok

    def test_durations_survive_zoom(self):
        zoomed = temporal_zoom(fixture_graph(), WindowSpec.fixed(100))
        assert sorted(e.duration_seconds for e in zoomed.edges) == [20, 60, 70, 100]

    def test_always_drops_partial_windows(self):
        report = ZoomReport()
        zoomed = temporal_zoom(fixture_graph(), WindowSpec.fixed(50), Quantifier.ALWAYS, Quantifier.ALWAYS,
                               report=report)
        assert {e.eid: e.validity for e in zoomed.edges} == {
            0: Interval(0, 100), 1: Interval(50, 100), 2: Interval(200, 250),
        }
        assert report.edges_dropped == 1
        assert validate(zoomed).ok

    def test_quantifier_oracle(self, rng):
        for _ in range(200):
            g = random_graph(rng, max_locations=25, max_edges=100, horizon=400, max_duration=150)
            for size in (20, 75, 160):
                w = WindowSpec.fixed(size, origin=rng.randrange(0, size))
                pairs = [(q, q) for q in QUANTIFIERS]
                if rng.random() < 0.1:
                    pairs = [(vq, eq) for vq in QUANTIFIERS for eq in QUANTIFIERS]
                for vq, eq in pairs:
                    zoomed = temporal_zoom(g, w, vq, eq)
                    vertices, edges = zoom_oracle(g, w, vq, eq)
                    assert {v.vid: v.validity for v in zoomed.vertices} == validity_by_id(vertices)
                    assert {e.eid: IntervalSet((e.validity,)) for e in zoomed.edges} == validity_by_id(edges)
                    assert validate(zoomed).ok

    def test_snapshots_match_every_second(self, rng):
        for _ in range(40):
            g = random_graph(rng, max_locations=15, max_edges=40, horizon=300, max_duration=100)
            size = rng.choice((20, 75, 160))
            w = WindowSpec.fixed(size, origin=rng.randrange(0, size))
            first = w.window_containing(g.meta.time_span.start).start
            last = w.window_containing(g.meta.time_span.end - 1).end
            for vq, eq in [(q, q) for q in QUANTIFIERS] + [(Quantifier.EXISTS, Quantifier.ALWAYS)]:
                zoomed = temporal_zoom(g, w, vq, eq)
                vertices, edges = zoom_oracle(g, w, vq, eq)
                for t in range(first - 1, last + 1):
                    win = w.window_containing(t)
                    view = snapshot(zoomed, t)
                    assert set(view.vertex_ids) == vertices.get(win, set())
                    assert {e.eid for e in view.edges} == edges.get(win, set())

    def test_exists_preserves_presence(self, rng):
        for _ in range(50):
            g = random_graph(rng, horizon=400)
            w = WindowSpec.fixed(rng.choice((10, 50, 130)))
            zoomed = temporal_zoom(g, w)
            assert zoomed.meta.vertex_count == g.meta.vertex_count
            assert zoomed.meta.edge_count == g.meta.edge_count
            for e, z in zip(sorted(g.edges, key=lambda e: e.eid), sorted(zoomed.edges, key=lambda e: e.eid)):
                assert z.validity.start == w.window_containing(e.validity.start).start
                assert z.validity.end == w.window_containing(e.validity.end - 1).end

    def test_quantifier_monotonicity(self, rng):
        for _ in range(50):
            g = random_graph(rng, horizon=400)
            w = WindowSpec.fixed(rng.choice((20, 60, 150)))
            kept = {}
            for q in QUANTIFIERS:
                z = temporal_zoom(g, w, q, q)
                kept[q] = ({v.vid for v in z.vertices}, {e.eid for e in z.edges})
            for i in (0, 1):
                assert kept[Quantifier.ALWAYS][i] <= kept[Quantifier.MOST][i] <= kept[Quantifier.EXISTS][i]

    def test_calendar_month_windows(self):
        g = build_graph([trip("2016-03-31 23:50:00", "2016-04-01 00:10:00", A, B)], 4)
        zoomed = temporal_zoom(g, WindowSpec.calendar_month())
        (edge,) = zoomed.edges
        assert edge.validity.length == (31 + 30) * 86400


class TestAggregateMessages:
    def test_degree_example(self):
        g = fixture_graph()
        out = aggregate_messages_degree(g, Direction.OUT, WindowSpec.fixed(100))
        by_vid = {s.vid: dict(s.entries) for s in out}
        a = next(v.vid for v in g.vertices if v.cell.lat_micro == A[0] and v.cell.lon_micro == A[1])
        assert by_vid[a] == {Interval(0, 100): 1, Interval(200, 300): 1}

    def test_vertex_without_messages_has_empty_series(self):
        g = build_graph([trip(0, 10, A, B)], 4)
        series = aggregate_messages_degree(g, Direction.OUT, WindowSpec.fixed(100))
        assert [len(s.entries) for s in series] == [1, 0]
        assert series[1].value_at(Interval(0, 100)) == 0

    def test_degree_counts_parallel_edges(self):
        g = build_graph([trip(0, 10, A, B), trip(5, 20, A, B), trip(30, 40, A, B)], 4)
        series = aggregate_messages_degree(g, Direction.IN, WindowSpec.fixed(100))
        dst = next(v.vid for v in g.vertices if v.cell.lat_micro == B[0])
        assert dict(series[dst].entries) == {Interval(0, 100): 3}

    def test_attribute_sum_and_mean(self):
        g = build_graph([trip(0, 10, A, B, fare_cents=1000), trip(5, 20, A, B, fare_cents=1501)], 4)
        w = WindowSpec.fixed(100)
        total = aggregate_messages_attribute(g, Direction.IN, "fare_cents", w)
        mean = aggregate_messages_attribute(g, Direction.IN, "fare_cents", w, how="mean")
        dst = next(v.vid for v in g.vertices if v.cell.lat_micro == B[0])
        assert total[dst].value_at(Interval(0, 100)) == 2501
        assert mean[dst].value_at(Interval(0, 100)) == Fraction(2501, 2)
        with pytest.raises(ValueError):
            aggregate_messages_attribute(g, Direction.IN, "tip_cents", w)
        with pytest.raises(ValueError):
            aggregate_messages_attribute(g, Direction.IN, "fare_cents", w, how="median")

    def test_invariant_to_partitions_and_threads(self, rng):
        def send(e):
            return ((e.src, (e.fare_cents, 1)), (e.dst, (e.passengers, 1)))

        def add(x, y):
            return (x[0] + y[0], x[1] + y[1])

        for _ in range(30):
            g = random_graph(rng, partitions=5, horizon=500)
            w = WindowSpec.fixed(rng.choice((30, 100, 300)))
            expected = aggregate_messages(g, send, add, w)
            permuted = EvolvingGraph(g.vertices, tuple(reversed(g.partitions)), g.meta)
            assert aggregate_messages(permuted, send, add, w) == expected
            shuffled = tuple(tuple(rng.sample(part, len(part))) for part in g.partitions)
            assert aggregate_messages(replace(g, partitions=shuffled), send, add, w, threads=4) == expected
            single = EvolvingGraph.build(g.vertices, g.edges, 4, 1)
            assert aggregate_messages(single, send, add, w) == expected

    def test_degree_sums_to_edge_windows(self, rng):
        for _ in range(20):
            g = random_graph(rng, horizon=500)
            w = WindowSpec.fixed(50)
            total = sum(v for s in aggregate_messages_degree(g, Direction.OUT, w) for _, v in s.entries)
            expected = sum(
                len(range(w.window_containing(e.validity.start).start, e.validity.end, 50)) for e in g.edges
            )
            assert total == expected
            assert aggregate_messages_degree(g, Direction.IN, w, threads=3) == \
                aggregate_messages_degree(g, Direction.IN, w)


def test_reduce_must_combine_with_operator():
    g = fixture_graph()
    series = aggregate_messages(g, lambda e: ((e.src, e.passengers),), operator.add, WindowSpec.fixed(1000))
    assert sum(s.value_at(Interval(0, 1000)) for s in series) == 7
