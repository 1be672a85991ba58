import pytest

from services.temporal import (
    Interval,
    IntervalSet,
    Quantifier,
    WindowSpec,
    evaluate_quantifier,
    format_instant,
    intersect_window,
    month_interval,
    parse_instant,
    parse_month,
    parse_window_option,
    union,
    windows_covering,
    windows_overlapping,
)

HORIZON = 1000


def random_set(rng, max_intervals=6):
    pairs = []
    for _ in range(rng.randint(0, max_intervals)):
        start = rng.randrange(0, HORIZON - 1)
        pairs.append((start, rng.randint(start + 1, min(HORIZON, start + 200))))
    return IntervalSet.of(*pairs)


def members(s):
    return {t for iv in s for t in range(iv.start, iv.end)}


def raw_members(pairs):
    return {t for s, e in pairs for t in range(s, e)}


def is_canonical(s):
    ivs = s.intervals
    return all(a.end < b.start for a, b in zip(ivs, ivs[1:]))


class TestInterval:
    def test_empty_interval_rejected(self):
        with pytest.raises(ValueError):
            Interval(5, 5)
        with pytest.raises(ValueError):
            Interval(6, 5)

    def test_half_open(self):
        iv = Interval(10, 20)
        assert iv.contains(10)
        assert not iv.contains(20)
        assert not iv.overlaps(Interval(20, 30))
        assert iv.overlaps(Interval(19, 30))


class TestIntervalSet:
    def test_union_coalesces_abutting(self):
        assert union(IntervalSet.of((0, 10)), IntervalSet.of((10, 20))) == IntervalSet.of((0, 20))

    def test_union_keeps_gaps(self):
        s = union(IntervalSet.of((0, 10)), IntervalSet.of((15, 20)))
        assert [(iv.start, iv.end) for iv in s] == [(0, 10), (15, 20)]

    def test_intersect_window_clips(self):
        s = intersect_window(IntervalSet.of((0, 10), (15, 20)), Interval(5, 17))
        assert s == IntervalSet.of((5, 10), (15, 17))

    def test_intersect_window_disjoint_is_empty(self):
        assert not intersect_window(IntervalSet.of((0, 10)), Interval(10, 20))

    def test_coalescing_canonical_set_is_identity(self):
        s = IntervalSet.of((0, 3), (5, 9))
        assert IntervalSet(s.intervals) == s

    def test_encode_decode(self):
        s = IntervalSet.of((0, 3), (5, 9))
        assert s.encode() == "0,3;5,9"
        assert IntervalSet.decode("0,3;5,9") == s
        assert IntervalSet.decode("") == IntervalSet()

    def test_brute_force_oracle(self, rng):
        window_lengths = (1, 7, 60, 250, 999)
        for _ in range(1000):
            pairs_a = [(iv.start, iv.end) for iv in random_set(rng)]
            a, b = IntervalSet.of(*pairs_a), random_set(rng)
            ma, mb = members(a), members(b)
            assert ma == raw_members(pairs_a)

            u = union(a, b)
            assert is_canonical(u)
            assert members(u) == ma | mb
            assert {t for t in range(HORIZON) if u.contains(t)} == ma | mb
            assert union(b, a) == u
            assert union(u, u) == u

            length = rng.choice(window_lengths)
            start = rng.randrange(0, HORIZON - length + 1)
            w = Interval(start, start + length)
            clipped = intersect_window(a, w)
            assert is_canonical(clipped)
            covered = ma & set(range(w.start, w.end))
            assert members(clipped) == covered

            exists = evaluate_quantifier(Quantifier.EXISTS, a, w)
            most = evaluate_quantifier(Quantifier.MOST, a, w)
            always = evaluate_quantifier(Quantifier.ALWAYS, a, w)
            assert exists == bool(covered)
            assert always == (len(covered) == w.length)
            assert most == (2 * len(covered) > w.length)
            assert not always or most
            assert not most or exists

    def test_union_is_associative(self, rng):
        for _ in range(200):
            a, b, c = random_set(rng), random_set(rng), random_set(rng)
            assert union(union(a, b), c) == union(a, union(b, c))


class TestQuantifiers:
    def test_exactly_half_is_not_most(self):
        v = IntervalSet.of((0, 5))
        assert not evaluate_quantifier(Quantifier.MOST, v, Interval(0, 10))
        assert evaluate_quantifier(Quantifier.MOST, IntervalSet.of((0, 6)), Interval(0, 10))

    def test_always_needs_every_second(self):
        v = IntervalSet.of((0, 5), (6, 10))
        assert not evaluate_quantifier(Quantifier.ALWAYS, v, Interval(0, 10))
        assert evaluate_quantifier(Quantifier.ALWAYS, IntervalSet.of((0, 10)), Interval(2, 8))

    def test_empty_validity_fails_every_quantifier(self):
        for q in Quantifier:
            assert not evaluate_quantifier(q, IntervalSet(), Interval(0, 10))


class TestWindows:
    def test_fixed_windows_with_origin(self):
        w = WindowSpec.fixed(600, origin=60)
        assert w.window_containing(60) == Interval(60, 660)
        assert w.window_containing(59) == Interval(-540, 60)

    def test_windows_overlapping_strictly_increasing(self, rng):
        for _ in range(200):
            s = random_set(rng)
            w = WindowSpec.fixed(rng.choice((1, 13, 100, 400)), origin=rng.randrange(0, 50))
            wins = windows_overlapping(s, w)
            assert all(a.start < b.start for a, b in zip(wins, wins[1:]))
            assert all(intersect_window(s, W) for W in wins)
            expected = {w.window_containing(t) for t in members(s)}
            assert set(wins) == expected

    def test_windows_overlapping_empty(self):
        assert windows_overlapping(IntervalSet(), WindowSpec.fixed(10)) == []

    def test_calendar_months(self):
        march = parse_month("2016-03")
        assert format_instant(march.start) == "2016-03-01 00:00:00"
        assert format_instant(march.end) == "2016-04-01 00:00:00"
        assert month_interval(2016, 12).end == parse_instant("2017-01-01 00:00:00")
        span = Interval(parse_instant("2016-02-28 10:00:00"), parse_instant("2016-03-02 10:00:00"))
        assert windows_covering(span, WindowSpec.calendar_month()) == [parse_month("2016-02"), march]

    def test_leap_february(self):
        feb = parse_month("2016-02")
        assert feb.length == 29 * 86400

    def test_parse_instant_round_trip(self):
        assert parse_instant("1970-01-01 00:00:00") == 0
        assert format_instant(parse_instant("2016-03-01 11:09:00")) == "2016-03-01 11:09:00"
        with pytest.raises(ValueError):
            parse_instant("2016-03-01T11:09:00")

    def test_window_option(self):
        span = Interval(100, 400)
        assert parse_window_option("month", span) == WindowSpec.calendar_month()
        assert parse_window_option("span", span) == WindowSpec.fixed(300, 100)
        assert parse_window_option("600", span, origin=60) == WindowSpec.fixed(600, 60)
        for bad in ("0", "-5", "weekly"):
            with pytest.raises(ValueError):
                parse_window_option(bad, span)

    def test_window_spec_dict_round_trip(self):
        for w in (WindowSpec.fixed(600, 60), WindowSpec.calendar_month()):
            assert WindowSpec.from_dict(w.to_dict()) == w
