"""Cumulative-mileage processes: trip logs, deterministic paths, and a stochastic
on/off driving model.

A realized path is a piecewise-linear nondecreasing cumulative-distance function
on [0, horizon] with piecewise-constant speed.  Deterministic models
(:class:`ConstantSpeed`, :class:`TripLogMileage`) produce the same path on every
call; :class:`AlternatingRenewal` draws i.i.d. paths from the caller's stream.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "Trip",
    "TripLog",
    "TripLogError",
    "ingest_trip_log",
    "MileagePath",
    "MileageModel",
    "ConstantSpeed",
    "TripLogMileage",
    "AlternatingRenewal",
]


class TripLogError(ValueError):
    """Trip-log parse or validation failure, carrying the offending line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Trip:
    """One logged trip: [start, end) in time units, covering `miles` of distance."""

    start: float
    end: float
    miles: float

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError(f"trip must satisfy 0 <= start < end, got {self!r}")
        if not (self.miles >= 0):
            raise ValueError(f"trip miles must be nonnegative, got {self!r}")

    @property
    def speed(self) -> float:
        return self.miles / (self.end - self.start)


@dataclass(frozen=True)
class TripLog:
    """Ordered, non-overlapping trips."""

    trips: tuple

    def __post_init__(self):
        for prev, cur in zip(self.trips, self.trips[1:]):
            if cur.start < prev.end:
                raise ValueError(f"trips overlap: {prev!r} and {cur!r}")
        object.__setattr__(self, "trips", tuple(self.trips))

    @property
    def total_miles(self) -> float:
        return float(sum(t.miles for t in self.trips))

    def __len__(self) -> int:
        return len(self.trips)


def ingest_trip_log(source) -> TripLog:
    """Parse a `start,end,miles` CSV into a validated, sorted :class:`TripLog`.

    `source` may be a path or an open text stream.  Rows may arrive unsorted;
    they are sorted by start time.  Overlaps, negative fields and malformed
    rows raise :class:`TripLogError` with the offending line number.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", newline="") as fh:
            return ingest_trip_log(fh)

    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["start", "end", "miles"]:
        raise TripLogError("expected header 'start,end,miles'", line=1)

    rows = []  # (trip, line_number)
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise TripLogError(f"expected 3 fields, got {len(row)}", line=line_no)
        try:
            start, end, miles = (float(v) for v in row)
        except ValueError:
            raise TripLogError(f"non-numeric field in {row!r}", line=line_no) from None
        try:
            trip = Trip(start, end, miles)
        except ValueError as exc:
            raise TripLogError(str(exc), line=line_no) from None
        rows.append((trip, line_no))

    rows.sort(key=lambda item: item[0].start)
    for (prev, _), (cur, cur_line) in zip(rows, rows[1:]):
        if cur.start < prev.end:
            raise TripLogError(
                f"trip {cur!r} overlaps previous trip {prev!r}", line=cur_line
            )
    return TripLog(tuple(trip for trip, _ in rows))


class MileagePath:
    """A realized cumulative-mileage trajectory on [0, horizon].

    Stored as breakpoint times plus the exact cumulative distance at each
    breakpoint; speed is the per-segment slope and is right-continuous.
    """

    def __init__(self, times: Sequence[float], cumdist: Sequence[float]):
        times = np.asarray(times, dtype=float)
        cumdist = np.asarray(cumdist, dtype=float)
        if times.ndim != 1 or times.shape != cumdist.shape or len(times) < 2:
            raise ValueError("times and cumdist must be 1-d arrays of equal length >= 2")
        if times[0] != 0.0:
            raise ValueError("path must start at time 0")
        if np.any(np.diff(times) <= 0):
            raise ValueError("breakpoint times must be strictly increasing")
        if cumdist[0] != 0.0:
            raise ValueError("cumulative distance must start at 0")
        if np.any(np.diff(cumdist) < 0):
            raise ValueError("cumulative distance must be nondecreasing")
        self.times = times
        self.cumdist = cumdist
        self.speeds = np.diff(cumdist) / np.diff(times)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def total_miles(self) -> float:
        return float(self.cumdist[-1])

    def _check_range(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if np.any(s < 0) or np.any(s > self.horizon):
            raise ValueError(f"time out of range [0, {self.horizon}]: {s!r}")
        return s

    def cumulative(self, s):
        """Distance driven by time s (piecewise-linear interpolation)."""
        arr = self._check_range(s)
        out = np.interp(arr, self.times, self.cumdist)
        return float(out) if np.isscalar(s) else out

    def speed_at(self, s):
        """Right-continuous instantaneous speed at time s (the last segment's
        speed applies at s == horizon)."""
        arr = self._check_range(s)
        idx = np.clip(np.searchsorted(self.times, arr, side="right") - 1, 0,
                      len(self.speeds) - 1)
        out = self.speeds[idx]
        return float(out) if np.isscalar(s) else out


class MileageModel:
    """Base class for mileage-process models."""

    #: deterministic models realize the same path on every call
    is_deterministic: bool = False

    def realize(self, horizon: float, rng: Optional[np.random.Generator] = None) -> MileagePath:
        raise NotImplementedError

    def expected_total_miles(self, horizon: float) -> Optional[float]:
        """Exact expected mileage over [0, horizon], or None when it must be
        estimated by simulation."""
        return None


@dataclass(frozen=True)
class ConstantSpeed(MileageModel):
    """Drive at a fixed speed for the whole horizon."""

    speed: float
    is_deterministic = True

    def __post_init__(self):
        if not (self.speed >= 0 and np.isfinite(self.speed)):
            raise ValueError(f"speed must be nonnegative, got {self.speed!r}")

    def realize(self, horizon, rng=None):
        _check_horizon(horizon)
        return MileagePath([0.0, horizon], [0.0, self.speed * horizon])

    def expected_total_miles(self, horizon):
        return self.speed * horizon


@dataclass(frozen=True)
class TripLogMileage(MileageModel):
    """Path reconstructed from a trip log: speed miles/(end-start) within each
    trip, zero between trips.  Cumulative distance at each trip end equals the
    running sum of logged miles exactly."""

    log: TripLog
    is_deterministic = True

    def realize(self, horizon, rng=None):
        _check_horizon(horizon)
        times = [0.0]
        cum = [0.0]
        for trip in self.log.trips:
            if trip.start >= horizon:
                break
            if trip.start > times[-1]:
                times.append(trip.start)
                cum.append(cum[-1])
            end = min(trip.end, horizon)
            if end > times[-1]:
                if end == trip.end:
                    gained = trip.miles
                else:
                    gained = trip.miles * (end - trip.start) / (trip.end - trip.start)
                times.append(end)
                cum.append(cum[-1] + gained)
        if times[-1] < horizon:
            times.append(horizon)
            cum.append(cum[-1])
        return MileagePath(times, cum)

    def expected_total_miles(self, horizon):
        return self.realize(horizon).total_miles


@dataclass(frozen=True)
class AlternatingRenewal(MileageModel):
    """Alternate exponential idle/drive sojourns, starting idle at t=0.

    While driving the speed is constant; while idle it is zero.  Sojourn
    durations are independent exponentials with the given means.
    """

    mean_drive: float
    mean_idle: float
    speed: float

    def __post_init__(self):
        if not (self.mean_drive > 0 and np.isfinite(self.mean_drive)):
            raise ValueError(f"mean_drive must be positive, got {self.mean_drive!r}")
        if not (self.mean_idle > 0 and np.isfinite(self.mean_idle)):
            raise ValueError(f"mean_idle must be positive, got {self.mean_idle!r}")
        if not (self.speed >= 0 and np.isfinite(self.speed)):
            raise ValueError(f"speed must be nonnegative, got {self.speed!r}")

    def realize(self, horizon, rng=None):
        _check_horizon(horizon)
        if rng is None:
            raise ValueError("AlternatingRenewal.realize requires a random generator")
        # Draw sojourns in fixed-size blocks so one vectorized call covers the
        # horizon almost surely; the block rule is deterministic given the seed.
        period = self.mean_idle + self.mean_drive
        expected_pairs = horizon / period
        block_pairs = max(4, math.ceil(expected_pairs + 6.0 * math.sqrt(expected_pairs + 1.0)))
        scales = np.tile([self.mean_idle, self.mean_drive], block_pairs)
        durations = rng.exponential(scales)
        ends = np.cumsum(durations)
        while ends[-1] < horizon:
            more = rng.exponential(scales)
            ends = np.concatenate([ends, ends[-1] + np.cumsum(more)])
        keep = ends < horizon
        boundary = np.concatenate([[0.0], ends[keep], [horizon]])
        n_segments = len(boundary) - 1
        seg_speeds = np.where(np.arange(n_segments) % 2 == 1, self.speed, 0.0)
        cum = np.concatenate([[0.0], np.cumsum(seg_speeds * np.diff(boundary))])
        return MileagePath(boundary, cum)


def _check_horizon(horizon: float) -> None:
    if not (horizon > 0 and np.isfinite(horizon)):
        raise ValueError(f"horizon must be positive and finite, got {horizon!r}")
