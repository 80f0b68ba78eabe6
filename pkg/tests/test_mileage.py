import io

import numpy as np
import pytest

from dcrm.mileage import (
    AlternatingRenewal,
    ConstantSpeed,
    MileagePath,
    Trip,
    TripLog,
    TripLogError,
    TripLogMileage,
    ingest_trip_log,
)


def log_from(text: str) -> TripLog:
    return ingest_trip_log(io.StringIO(text))


class TestIngest:
    def test_single_trip(self):
        log = log_from("start,end,miles\n0,1,30\n")
        assert len(log) == 1
        assert log.trips[0] == Trip(0.0, 1.0, 30.0)

    def test_overlap_reported_with_line_number(self):
        with pytest.raises(TripLogError, match="line 3") as exc:
            log_from("start,end,miles\n0,2,10\n1,3,10\n")
        assert exc.value.line == 3

    def test_header_only_gives_empty_log(self):
        log = log_from("start,end,miles\n")
        assert len(log) == 0
        path = TripLogMileage(log).realize(5.0)
        grid = np.linspace(0.0, 5.0, 101)
        assert np.all(path.cumulative(grid) == 0.0)

    def test_rows_are_sorted_by_start(self):
        log = log_from("start,end,miles\n2,3,5\n0,1,30\n")
        assert [t.start for t in log.trips] == [0.0, 2.0]

    def test_bad_header(self):
        with pytest.raises(TripLogError, match="line 1"):
            log_from("begin,end,miles\n0,1,30\n")

    def test_negative_miles(self):
        with pytest.raises(TripLogError, match="line 2"):
            log_from("start,end,miles\n0,1,-5\n")

    def test_start_not_before_end(self):
        with pytest.raises(TripLogError, match="line 2"):
            log_from("start,end,miles\n1,1,5\n")

    def test_non_numeric_field(self):
        with pytest.raises(TripLogError, match="line 3"):
            log_from("start,end,miles\n0,1,30\n2,three,5\n")

    def test_wrong_field_count(self):
        with pytest.raises(TripLogError, match="line 2"):
            log_from("start,end,miles\n0,1\n")

    def test_reads_from_file(self, tmp_path):
        p = tmp_path / "trips.csv"
        p.write_text("start,end,miles\n0,1,30\n")
        assert len(ingest_trip_log(p)) == 1


class TestRealize:
    def test_constant_speed(self):
        path = ConstantSpeed(30.0).realize(2.0)
        assert path.cumulative(2.0) == 60.0

    def test_trip_log_flat_after_trip(self):
        path = TripLogMileage(log_from("start,end,miles\n0,1,30\n")).realize(2.0)
        assert path.cumulative(1.0) == 30.0
        assert path.cumulative(2.0) == 30.0

    def test_trip_truncated_at_horizon(self):
        path = TripLogMileage(log_from("start,end,miles\n0,4,40\n")).realize(2.0)
        assert path.cumulative(2.0) == pytest.approx(20.0)

    def test_alternating_renewal_long_run_rate(self):
        # renewal-reward: long-run mileage rate = v * drive / (drive + idle)
        model = AlternatingRenewal(mean_drive=1.0, mean_idle=1.0, speed=30.0)
        horizon, n = 1000.0, 10_000
        rng = np.random.default_rng(5)
        rates = np.array([model.realize(horizon, rng).total_miles / horizon
                          for _ in range(n)])
        se = rates.std(ddof=1) / np.sqrt(n)
        assert abs(rates.mean() - 15.0) < 4.0 * se

    def test_alternating_renewal_requires_rng(self):
        with pytest.raises(ValueError):
            AlternatingRenewal(1.0, 1.0, 30.0).realize(1.0)

    def test_same_seed_same_path(self):
        model = AlternatingRenewal(0.5, 2.0, 25.0)
        a = model.realize(50.0, np.random.default_rng(123))
        b = model.realize(50.0, np.random.default_rng(123))
        assert np.array_equal(a.times, b.times)
        assert np.array_equal(a.cumdist, b.cumdist)

    @pytest.mark.parametrize("bad", [0.0, -1.0, np.inf])
    def test_bad_horizon(self, bad):
        with pytest.raises(ValueError):
            ConstantSpeed(30.0).realize(bad)


class TestSpeedAt:
    def test_constant(self):
        assert ConstantSpeed(30.0).realize(2.0).speed_at(0.5) == 30.0

    def test_zero_between_trips(self):
        path = TripLogMileage(log_from("start,end,miles\n0,1,30\n")).realize(2.0)
        assert path.speed_at(1.5) == 0.0
        assert path.speed_at(0.5) == 30.0

    def test_right_continuous_at_breaks(self):
        path = TripLogMileage(log_from("start,end,miles\n0.5,1,30\n")).realize(2.0)
        assert path.speed_at(0.5) == 60.0  # jumps up at trip start
        assert path.speed_at(1.0) == 0.0  # and down at trip end

    def test_out_of_range(self):
        path = ConstantSpeed(30.0).realize(2.0)
        with pytest.raises(ValueError):
            path.speed_at(-0.1)
        with pytest.raises(ValueError):
            path.speed_at(2.1)

    @pytest.mark.parametrize("make_path", [
        lambda: ConstantSpeed(30.0).realize(2.0),
        lambda: TripLogMileage(log_from(
            "start,end,miles\n0.2,1,24\n1.5,1.75,10\n")).realize(2.0),
        lambda: AlternatingRenewal(1.0, 0.5, 40.0).realize(
            10.0, np.random.default_rng(8)),
    ])
    def test_speed_integrates_back_to_cumulative(self, make_path):
        # midpoint rule per segment is exact for piecewise-constant speed
        path = make_path()
        mids = 0.5 * (path.times[:-1] + path.times[1:])
        integral = float(np.sum(path.speed_at(mids) * np.diff(path.times)))
        assert integral == pytest.approx(path.total_miles, rel=1e-9, abs=1e-12)


class TestPathInvariants:
    @pytest.mark.parametrize("make_path", [
        lambda: ConstantSpeed(12.0).realize(3.0),
        lambda: TripLogMileage(log_from(
            "start,end,miles\n0,0.5,10\n1,2.5,60\n")).realize(3.0),
        lambda: AlternatingRenewal(0.3, 0.7, 55.0).realize(
            3.0, np.random.default_rng(21)),
    ])
    def test_cumulative_nondecreasing_on_fine_grid(self, make_path):
        path = make_path()
        values = path.cumulative(np.linspace(0.0, path.horizon, 10_000))
        assert np.all(np.diff(values) >= 0)
        assert path.cumulative(0.0) == 0.0

    def test_trip_end_cumulative_is_exact_running_sum(self):
        text = "start,end,miles\n0,0.3,0.1\n0.3,0.7,0.2\n1,1.1,0.7\n"
        log = log_from(text)
        path = TripLogMileage(log).realize(2.0)
        running = 0.0
        for trip in log.trips:
            running += trip.miles
            assert path.cumulative(trip.end) == running  # exact, not approx

    def test_path_validation(self):
        with pytest.raises(ValueError):
            MileagePath([0.0, 1.0], [0.0, -1.0])  # decreasing
        with pytest.raises(ValueError):
            MileagePath([0.5, 1.0], [0.0, 1.0])  # does not start at 0
        with pytest.raises(ValueError):
            MileagePath([0.0, 0.0], [0.0, 0.0])  # zero-length segment
