import json

import pytest

from periphery_plots import summarize as sm
from periphery_plots.ingest import (
    EmptyDatasetError,
    InvalidFieldError,
    MalformedJsonError,
    MissingColumnError,
    TimeFormat,
    UnparseableTimeError,
    ZoneInvariantViolationError,
    dataset_extent,
    parse_csv,
    parse_spec,
    parse_timestamp,
    serialize_spec,
)
from periphery_plots.scene import AnnotationKind, MarkKind
from periphery_plots.timeline import ZoneKind


MINIMAL = {
    "time_column": "date",
    "time_format": "date_only",
    "tracks": [{"series": "tmax", "value_kind": "continuous"}],
    "initial_zones": [
        {"kind": "context", "start": "2015-01-01", "end": "2015-02-01"},
        {"kind": "focus", "start": "2015-02-01", "end": "2015-03-01"},
        {"kind": "context", "start": "2015-03-01", "end": "2015-04-01"},
    ],
}


def spec_json(**overrides):
    doc = json.loads(json.dumps(MINIMAL))
    doc.update(overrides)
    return json.dumps(doc)


class TestParseTimestamp:
    def test_date_only_is_midnight_utc(self):
        assert parse_timestamp("1970-01-02", TimeFormat.DATE_ONLY) == 86_400_000
        assert parse_timestamp("2015-01-01", TimeFormat.DATE_ONLY) == 1_420_070_400_000

    def test_epoch_millis(self):
        assert parse_timestamp("12345", TimeFormat.EPOCH_MILLIS) == 12345

    def test_iso8601(self):
        assert parse_timestamp("1970-01-01T00:00:01Z", TimeFormat.ISO8601) == 1000
        assert parse_timestamp("1970-01-01T01:00:00+01:00", TimeFormat.ISO8601) == 0

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_timestamp("not-a-date", TimeFormat.DATE_ONLY)


class TestParseSpec:
    def test_minimal_valid(self):
        spec = parse_spec(spec_json())
        assert spec.time_column == "date"
        assert len(spec.tracks) == 1
        assert spec.tracks[0].focus_plot is MarkKind.LINE
        assert spec.tracks[0].histogram_bins == 10
        assert [z.kind for z in spec.initial_zones] == [
            ZoneKind.CONTEXT, ZoneKind.FOCUS, ZoneKind.CONTEXT,
        ]

    def test_malformed_json(self):
        with pytest.raises(MalformedJsonError):
            parse_spec("{nope")

    def test_overlapping_zones_name_boundary(self):
        zones = [
            {"kind": "focus", "start": 0, "end": 10_000},
            {"kind": "context", "start": 5_000, "end": 20_000},
        ]
        with pytest.raises(ZoneInvariantViolationError) as err:
            parse_spec(spec_json(initial_zones=zones))
        assert any("initial_zones[0]" in d.location for d in err.value.diagnostics)

    def test_focus_fraction_out_of_range(self):
        with pytest.raises(InvalidFieldError) as err:
            parse_spec(spec_json(layout={"focus_fraction": 1.5}))
        assert any("focus_fraction" in d.location for d in err.value.diagnostics)

    def test_unknown_keys_rejected(self):
        with pytest.raises(InvalidFieldError) as err:
            parse_spec(spec_json(surprise=1))
        assert any(d.location == "surprise" for d in err.value.diagnostics)

    def test_annotations_require_continuous(self):
        tracks = [{
            "series": "w", "value_kind": "categorical", "annotations": ["mean_line"],
        }]
        with pytest.raises(InvalidFieldError):
            parse_spec(spec_json(tracks=tracks))

    def test_event_ticks_wrong_kind(self):
        tracks = [{"series": "x", "value_kind": "continuous", "focus_plot": "event_ticks"}]
        with pytest.raises(InvalidFieldError):
            parse_spec(spec_json(tracks=tracks))

    def test_no_focus_zone(self):
        zones = [
            {"kind": "context", "start": 0, "end": 10},
            {"kind": "context", "start": 10, "end": 20},
        ]
        with pytest.raises(ZoneInvariantViolationError):
            parse_spec(spec_json(initial_zones=zones))

    def test_policy_parsing(self):
        tracks = [{
            "series": "x", "value_kind": "continuous",
            "periphery_policy": {"mode": "auto", "path": "time_preserving", "t1": 10, "t2": 99},
        }]
        spec = parse_spec(spec_json(tracks=tracks))
        policy = spec.tracks[0].periphery_policy
        assert isinstance(policy, sm.AutoPolicy)
        assert (policy.t1, policy.t2) == (10, 99)
        assert policy.path is sm.SummarizationPath.TIME_PRESERVING

    def test_fixed_policy(self):
        tracks = [{
            "series": "x", "value_kind": "continuous",
            "periphery_policy": {"mode": "fixed", "plot_type": "nap"},
        }]
        spec = parse_spec(spec_json(tracks=tracks))
        assert spec.tracks[0].periphery_policy == sm.FixedPolicy(sm.PlotType.NAP)

    def test_roundtrip(self):
        tracks = [
            {
                "series": "x", "value_kind": "continuous", "focus_plot": "bar",
                "periphery_policy": {"mode": "fixed", "plot_type": "vap"},
                "annotations": ["mean_line", "quantile_band"],
                "histogram_bins": 14, "envelope_window": 7,
            },
            {"series": "w", "value_kind": "event"},
        ]
        spec = parse_spec(spec_json(tracks=tracks))
        assert parse_spec(serialize_spec(spec)) == spec

    def test_lock_flags_reach_layout(self):
        zones = json.loads(json.dumps(MINIMAL["initial_zones"]))
        zones[0]["lock_left"] = True
        zones[2]["lock_right"] = True
        spec = parse_spec(spec_json(initial_zones=zones))
        layout = spec.initial_layout()
        assert layout.locks == (True, False, False, True)


WEATHER_CSV = (
    "date,tmax\n"
    "2015-01-01,7.2\n"
    "2015-01-02,\n"
    "2015-01-03,8.0\n"
)


class TestParseCsv:
    def spec(self, tracks=None):
        return parse_spec(spec_json(tracks=tracks or MINIMAL["tracks"]))

    def test_missing_cells_omitted(self):
        dataset, diags = parse_csv(WEATHER_CSV.encode(), self.spec())
        assert len(dataset["tmax"]) == 2
        assert diags == []

    def test_out_of_order_rows_sorted(self):
        csv_data = "date,tmax\n2015-01-03,3.0\n2015-01-01,1.0\n2015-01-02,2.0\n"
        dataset, _ = parse_csv(csv_data.encode(), self.spec())
        ts = dataset["tmax"].timestamps
        assert list(ts) == sorted(ts)
        assert list(dataset["tmax"].values) == [1.0, 2.0, 3.0]

    def test_missing_column_fatal(self):
        with pytest.raises(MissingColumnError):
            parse_csv(b"date,other\n2015-01-01,1\n", self.spec())

    def test_unparseable_cell_diagnostic(self):
        csv_data = "date,tmax\n2015-01-01,oops\n2015-01-02,5.0\n"
        dataset, diags = parse_csv(csv_data.encode(), self.spec())
        assert len(dataset["tmax"]) == 1
        assert any("row 2" in d.location for d in diags)

    def test_nonfinite_dropped(self):
        csv_data = "date,tmax\n2015-01-01,inf\n2015-01-02,5.0\n"
        dataset, diags = parse_csv(csv_data.encode(), self.spec())
        assert len(dataset["tmax"]) == 1
        assert any("non-finite" in d.message for d in diags)

    def test_bad_time_rows_under_threshold_are_diagnostics(self):
        rows = ["date,tmax"] + [f"2015-01-{d:02d},1.0" for d in range(1, 21)] + ["garbage,1.0"]
        dataset, diags = parse_csv(("\n".join(rows) + "\n").encode(), self.spec())
        assert len(dataset["tmax"]) == 20
        assert len(diags) == 1

    def test_bad_time_rows_over_threshold_fatal(self):
        csv_data = "date,tmax\ngarbage,1.0\n2015-01-01,2.0\n"
        with pytest.raises(UnparseableTimeError):
            parse_csv(csv_data.encode(), self.spec())

    def test_event_series(self):
        tracks = [{"series": "storm", "value_kind": "event"}]
        csv_data = "date,storm\n2015-01-01,x\n2015-01-02,\n2015-01-03,x\n"
        dataset, _ = parse_csv(csv_data.encode(), parse_spec(spec_json(tracks=tracks)))
        assert len(dataset["storm"]) == 2
        assert dataset["storm"].values is None

    def test_categorical_series(self):
        tracks = [{"series": "weather", "value_kind": "categorical"}]
        csv_data = "date,weather\n2015-01-01,rain\n2015-01-02,sun\n2015-01-03,rain\n"
        dataset, _ = parse_csv(csv_data.encode(), parse_spec(spec_json(tracks=tracks)))
        assert dataset["weather"].values == ("rain", "sun", "rain")
        assert dataset["weather"].categories == ("rain", "sun")

    def test_observation_count_matches_naive_scan(self):
        import random
        rng = random.Random(5)
        lines = ["date,tmax"]
        expected = 0
        for d in range(1, 28):
            if rng.random() < 0.3:
                lines.append(f"2015-01-{d:02d},")
            else:
                lines.append(f"2015-01-{d:02d},{rng.uniform(-5, 15):.1f}")
                expected += 1
        dataset, _ = parse_csv(("\n".join(lines) + "\n").encode(), self.spec())
        assert len(dataset["tmax"]) == expected


class TestDatasetExtent:
    def test_half_open_extent(self):
        s = sm.Series("x", sm.ValueKind.CONTINUOUS, [10, 20, 30], [1.0, 2.0, 3.0])
        assert dataset_extent({"x": s}).start == 10
        assert dataset_extent({"x": s}).end == 31

    def test_single_observation(self):
        s = sm.Series("x", sm.ValueKind.EVENT, [5])
        ext = dataset_extent({"x": s})
        assert (ext.start, ext.end) == (5, 6)

    def test_empty_dataset(self):
        s = sm.Series("x", sm.ValueKind.CONTINUOUS, [], [])
        with pytest.raises(EmptyDatasetError):
            dataset_extent({"x": s})
