"""
Temporal core - time instants, half-open intervals, interval sets, tiling
windows and quantifiers.

Time is a count of seconds since 1970-01-01 00:00:00 on the naive local
clock of the raw data. No time-zone arithmetic is ever applied.
"""

from __future__ import annotations

import calendar
from bisect import bisect_right
from dataclasses import dataclass
from datetime import datetime, timedelta
from enum import Enum
from typing import Iterable, List, Optional, Tuple

TimeInstant = int

TIMESTAMP_FORMAT = "%Y-%m-%d %H:%M:%S"
_EPOCH = datetime(1970, 1, 1)


def parse_instant(text: str) -> TimeInstant:
    """Parse "YYYY-MM-DD HH:MM:SS" into naive epoch seconds"""
    if not isinstance(text, str):
        raise ValueError(f"timestamp must be text, got {text!r}")
    dt = datetime.strptime(text.strip(), TIMESTAMP_FORMAT)
    return calendar.timegm(dt.timetuple())


def format_instant(seconds: TimeInstant) -> str:
    dt = _EPOCH + timedelta(seconds=seconds)
    return (
        f"{dt.year:04d}-{dt.month:02d}-{dt.day:02d} "
        f"{dt.hour:02d}:{dt.minute:02d}:{dt.second:02d}"
    )


@dataclass(frozen=True, order=True)
class Interval:
    """Half-open period [start, end); empty intervals cannot be built"""

    start: TimeInstant
    end: TimeInstant

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ValueError(f"Interval start ({self.start}) must be < end ({self.end})")

    @property
    def length(self) -> int:
        return self.end - self.start

    def contains(self, t: TimeInstant) -> bool:
        return self.start <= t < self.end

    def overlaps(self, other: Interval) -> bool:
        return self.start < other.end and other.start < self.end

    def covers(self, other: Interval) -> bool:
        return self.start <= other.start and other.end <= self.end

    def __str__(self) -> str:
        return f"[{self.start},{self.end})"


def _coalesce(intervals: Iterable[Interval]) -> Tuple[Interval, ...]:
    merged: List[Interval] = []
    for iv in sorted(intervals):
        if merged and iv.start <= merged[-1].end:
            last = merged[-1]
            if iv.end > last.end:
                merged[-1] = Interval(last.start, iv.end)
        else:
            merged.append(iv)
    return tuple(merged)


@dataclass(frozen=True)
class IntervalSet:
    """
    Canonical union of intervals: sorted, disjoint, never abutting.

    Whatever is passed in is coalesced at construction, so every instance is
    canonical.
    """

    intervals: Tuple[Interval, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "intervals", _coalesce(self.intervals))

    @classmethod
    def of(cls, *pairs: Tuple[int, int]) -> IntervalSet:
        return cls(tuple(Interval(s, e) for s, e in pairs))

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    @property
    def total_seconds(self) -> int:
        return sum(iv.length for iv in self.intervals)

    @property
    def hull(self) -> Optional[Interval]:
        if not self.intervals:
            return None
        return Interval(self.intervals[0].start, self.intervals[-1].end)

    def _locate(self, t: TimeInstant) -> Optional[Interval]:
        i = bisect_right(self.intervals, t, key=lambda iv: iv.start) - 1
        if i >= 0 and self.intervals[i].contains(t):
            return self.intervals[i]
        return None

    def contains(self, t: TimeInstant) -> bool:
        return self._locate(t) is not None

    def covers(self, w: Interval) -> bool:
        """True when every instant of w is in the set"""
        iv = self._locate(w.start)
        return iv is not None and w.end <= iv.end

    def union(self, other: IntervalSet) -> IntervalSet:
        return IntervalSet(self.intervals + other.intervals)

    def intersect_window(self, w: Interval) -> IntervalSet:
        clipped = []
        for iv in self.intervals:
            if iv.start >= w.end:
                break
            lo, hi = max(iv.start, w.start), min(iv.end, w.end)
            if lo < hi:
                clipped.append(Interval(lo, hi))
        return IntervalSet(tuple(clipped))

    def encode(self) -> str:
        """Storage form: semicolon-joined "start,end" pairs"""
        return ";".join(f"{iv.start},{iv.end}" for iv in self.intervals)

    @classmethod
    def decode(cls, text: str) -> IntervalSet:
        if not text:
            return cls()
        pairs = []
        for chunk in text.split(";"):
            start, end = chunk.split(",")
            pairs.append(Interval(int(start), int(end)))
        return cls(tuple(pairs))

    def __str__(self) -> str:
        return "{" + ",".join(str(iv) for iv in self.intervals) + "}"


def union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.union(b)


def intersect_window(s: IntervalSet, w: Interval) -> IntervalSet:
    return s.intersect_window(w)


class Quantifier(Enum):
    EXISTS = "exists"
    ALWAYS = "always"
    MOST = "most"


def evaluate_quantifier(q: Quantifier, validity: IntervalSet, window: Interval) -> bool:
    """Admission rule of temporal zoom for one entity and one window"""
    if q is Quantifier.EXISTS:
        return bool(validity.intersect_window(window))
    if q is Quantifier.ALWAYS:
        return validity.covers(window)
    # strict majority of seconds: exactly half is not most
    return validity.intersect_window(window).total_seconds > window.length // 2


class WindowKind(Enum):
    FIXED_DURATION = "fixed"
    CALENDAR_MONTH = "month"


def _month_start(year: int, month: int) -> TimeInstant:
    return calendar.timegm((year, month, 1, 0, 0, 0, 0, 0, 0))


def month_interval(year: int, month: int) -> Interval:
    """The calendar month as [first second, first second of next month)"""
    if month == 12:
        nxt = _month_start(year + 1, 1)
    else:
        nxt = _month_start(year, month + 1)
    return Interval(_month_start(year, month), nxt)


def parse_month(text: str) -> Interval:
    """Parse "YYYY-MM" into the month interval"""
    dt = datetime.strptime(text.strip(), "%Y-%m")
    return month_interval(dt.year, dt.month)


@dataclass(frozen=True)
class WindowSpec:
    """
    Tiling of the timeline into windows.

    FIXED_DURATION windows are [origin + k*duration, origin + (k+1)*duration)
    for every integer k; CALENDAR_MONTH windows are the naive calendar months.
    """

    kind: WindowKind
    duration_seconds: Optional[int] = None
    origin: TimeInstant = 0

    def __post_init__(self) -> None:
        if self.kind is WindowKind.FIXED_DURATION:
            if self.duration_seconds is None or self.duration_seconds < 1:
                raise ValueError(f"duration_seconds must be >= 1, got {self.duration_seconds}")
        elif self.duration_seconds is not None:
            raise ValueError("calendar-month windows take no duration")

    @classmethod
    def fixed(cls, duration_seconds: int, origin: TimeInstant = 0) -> WindowSpec:
        return cls(WindowKind.FIXED_DURATION, duration_seconds, origin)

    @classmethod
    def calendar_month(cls) -> WindowSpec:
        return cls(WindowKind.CALENDAR_MONTH)

    @classmethod
    def single(cls, span: Interval) -> WindowSpec:
        """One window exactly covering span"""
        return cls.fixed(span.length, span.start)

    def window_containing(self, t: TimeInstant) -> Interval:
        if self.kind is WindowKind.FIXED_DURATION:
            k = (t - self.origin) // self.duration_seconds
            start = self.origin + k * self.duration_seconds
            return Interval(start, start + self.duration_seconds)
        dt = _EPOCH + timedelta(seconds=t)
        return month_interval(dt.year, dt.month)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "duration_seconds": self.duration_seconds,
            "origin": self.origin,
        }

    @classmethod
    def from_dict(cls, data: dict) -> WindowSpec:
        return cls(WindowKind(data["kind"]), data.get("duration_seconds"), data.get("origin", 0))

    def __str__(self) -> str:
        if self.kind is WindowKind.CALENDAR_MONTH:
            return "month"
        return f"{self.duration_seconds}s@{format_instant(self.origin)}"


def windows_overlapping(s: IntervalSet, w: WindowSpec) -> List[Interval]:
    """Ordered, duplicate-free tiling windows that intersect s"""
    windows: List[Interval] = []
    for iv in s:
        win = w.window_containing(iv.start)
        while win.start < iv.end:
            if not windows or windows[-1].start < win.start:
                windows.append(win)
            win = w.window_containing(win.end)
    return windows


def windows_covering(span: Interval, w: WindowSpec) -> List[Interval]:
    return windows_overlapping(IntervalSet((span,)), w)


def parse_window_option(text: str, span: Optional[Interval], origin: TimeInstant = 0) -> WindowSpec:
    """
    Window flag value to a WindowSpec: "month", "span" (one window over the
    graph's time span) or a number of seconds aligned at origin.
    """
    value = str(text).strip().lower()
    if value == "month":
        return WindowSpec.calendar_month()
    if value == "span":
        if span is None:
            raise ValueError("an empty graph has no time span")
        return WindowSpec.single(span)
    try:
        seconds = int(value)
    except ValueError:
        raise ValueError(f"window must be 'month', 'span' or seconds, got {text!r}")
    if seconds < 1:
        raise ValueError(f"window seconds must be >= 1, got {seconds}")
    return WindowSpec.fixed(seconds, origin)
