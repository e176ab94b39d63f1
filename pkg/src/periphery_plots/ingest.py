"""Figure-spec (JSON) and dataset (CSV) parsing.

Spec parsing is strict: unknown keys are rejected and every complaint
carries the JSON path it refers to. CSV parsing is forgiving by design:
dirty cells become row-level diagnostics and omitted observations, and
only a systemic failure (more than 10% of rows with unusable
timestamps, or a missing column) is fatal.
"""

from __future__ import annotations

import csv
import io
import json
import math
import enum
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone

from . import scene, summarize as sm
from .timeline import (
    TimeInterval, TimelineError, Zone, ZoneKind, ZoneLayout, new_layout, toggle_lock,
)


@dataclass(frozen=True)
class Diagnostic:
    """One validation complaint, tied to a JSON path or CSV row."""

    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.location}: {self.message}"


class IngestError(Exception):
    code = "IngestError"

    def __init__(self, message: str, diagnostics: list[Diagnostic] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class MalformedJsonError(IngestError):
    code = "MalformedJson"


class InvalidFieldError(IngestError):
    code = "InvalidField"


class ZoneInvariantViolationError(IngestError):
    code = "ZoneInvariantViolation"


class MissingColumnError(IngestError):
    code = "MissingColumn"


class UnparseableTimeError(IngestError):
    code = "UnparseableTime"


class EmptyDatasetError(IngestError):
    code = "EmptyDataset"


class TimeFormat(enum.Enum):
    EPOCH_MILLIS = "epoch_millis"
    ISO8601 = "iso8601"
    DATE_ONLY = "date_only"


_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)
_MS = timedelta(milliseconds=1)
_DAY_MS = 86_400_000


def parse_timestamp(cell: str, fmt: TimeFormat) -> int:
    """One time cell to integer epoch milliseconds UTC; raises ValueError."""
    cell = cell.strip()
    if not cell:
        raise ValueError("empty time cell")
    if fmt is TimeFormat.EPOCH_MILLIS:
        return int(cell)
    if fmt is TimeFormat.DATE_ONLY:
        d = datetime.strptime(cell, "%Y-%m-%d").date()
        return (d.toordinal() - date(1970, 1, 1).toordinal()) * _DAY_MS
    dt = datetime.fromisoformat(cell.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return (dt - _EPOCH) // _MS


@dataclass(frozen=True)
class LayoutConfig:
    focus_fraction: float = 0.5
    control_height_px: float = 40.0
    min_zone_width_ms: int = 1


@dataclass(frozen=True)
class ZoneSpec:
    kind: ZoneKind
    start: int
    end: int
    lock_left: bool = False
    lock_right: bool = False


@dataclass(frozen=True)
class TrackSpec:
    series: str
    value_kind: sm.ValueKind
    focus_plot: scene.MarkKind
    periphery_policy: sm.PlotPolicy = field(default_factory=sm.AutoPolicy)
    annotations: tuple[scene.AnnotationKind, ...] = ()
    histogram_bins: int = 10
    envelope_window: int = 5


@dataclass(frozen=True)
class FigureSpec:
    time_column: str
    time_format: TimeFormat
    tracks: tuple[TrackSpec, ...]
    initial_zones: tuple[ZoneSpec, ...]
    layout: LayoutConfig = LayoutConfig()
    axis_domain: TimeInterval | None = None

    def initial_layout(self, default_axis: TimeInterval | None = None) -> ZoneLayout:
        """Build the starting ZoneLayout, applying per-zone lock flags."""
        axis = self.axis_domain or default_axis
        if axis is None:
            lo = self.initial_zones[0].start
            hi = self.initial_zones[-1].end
            axis = TimeInterval(lo, hi)
        zones = [
            Zone(z.kind, TimeInterval(z.start, z.end)) for z in self.initial_zones
        ]
        try:
            layout = new_layout(zones, axis, self.layout.min_zone_width_ms)
        except TimelineError as exc:
            raise ZoneInvariantViolationError(str(exc)) from exc
        for i in range(len(self.initial_zones) + 1):
            left = self.initial_zones[i - 1].lock_right if i > 0 else False
            right = self.initial_zones[i].lock_left if i < len(self.initial_zones) else False
            if left or right:
                layout = toggle_lock(layout, i)
        return layout


_SPEC_KEYS = {"time_column", "time_format", "tracks", "initial_zones", "layout", "axis_domain"}
_TRACK_KEYS = {"series", "value_kind", "focus_plot", "periphery_policy",
               "annotations", "histogram_bins", "envelope_window"}
_ZONE_KEYS = {"kind", "start", "end", "lock_left", "lock_right"}
_LAYOUT_KEYS = {"focus_fraction", "control_height_px", "min_zone_width_ms"}
_POLICY_KEYS = {"mode", "path", "t1", "t2", "plot_type"}

_DEFAULT_FOCUS_PLOT = {
    sm.ValueKind.CONTINUOUS: scene.MarkKind.LINE,
    sm.ValueKind.CATEGORICAL: scene.MarkKind.EVENT_TICKS,
    sm.ValueKind.EVENT: scene.MarkKind.EVENT_TICKS,
}


def _enum_value(cls, raw, path, diags):
    try:
        return cls(raw)
    except ValueError:
        options = ", ".join(m.value for m in cls)
        diags.append(Diagnostic(path, f"expected one of {options}, got {raw!r}"))
        return None


def _reject_unknown(obj: dict, allowed: set[str], path: str, diags: list) -> None:
    for key in obj:
        if key not in allowed:
            diags.append(Diagnostic(f"{path}.{key}" if path else key, "unknown key"))


def _parse_zone_time(raw, fmt: TimeFormat, path: str, diags: list) -> int | None:
    if isinstance(raw, bool):
        diags.append(Diagnostic(path, "expected a timestamp"))
        return None
    if isinstance(raw, int):
        return raw
    if isinstance(raw, str):
        try:
            return parse_timestamp(raw, fmt)
        except ValueError as exc:
            diags.append(Diagnostic(path, f"unparseable time: {exc}"))
            return None
    diags.append(Diagnostic(path, f"expected epoch millis or a time string, got {type(raw).__name__}"))
    return None


def _parse_policy(raw, path: str, diags: list) -> sm.PlotPolicy | None:
    if not isinstance(raw, dict):
        diags.append(Diagnostic(path, "expected an object"))
        return None
    _reject_unknown(raw, _POLICY_KEYS, path, diags)
    mode = raw.get("mode")
    if mode == "fixed":
        ptype = _enum_value(sm.PlotType, raw.get("plot_type"), f"{path}.plot_type", diags)
        return sm.FixedPolicy(ptype) if ptype else None
    if mode == "auto":
        path_raw = raw.get("path", "value_preserving")
        spath = _enum_value(sm.SummarizationPath, path_raw, f"{path}.path", diags)
        t1, t2 = raw.get("t1", 50), raw.get("t2", 5000)
        if not (isinstance(t1, int) and isinstance(t2, int) and 0 < t1 < t2):
            diags.append(Diagnostic(path, f"thresholds must satisfy 0 < t1 < t2, got {t1!r}, {t2!r}"))
            return None
        return sm.AutoPolicy(spath, t1, t2) if spath else None
    diags.append(Diagnostic(f"{path}.mode", f"expected 'fixed' or 'auto', got {mode!r}"))
    return None


def _parse_track(raw, i: int, fmt: TimeFormat, diags: list) -> TrackSpec | None:
    path = f"tracks[{i}]"
    if not isinstance(raw, dict):
        diags.append(Diagnostic(path, "expected an object"))
        return None
    _reject_unknown(raw, _TRACK_KEYS, path, diags)
    name = raw.get("series")
    if not isinstance(name, str) or not name:
        diags.append(Diagnostic(f"{path}.series", "required non-empty string"))
        return None
    kind = _enum_value(sm.ValueKind, raw.get("value_kind"), f"{path}.value_kind", diags)
    if kind is None:
        return None
    if "focus_plot" in raw:
        focus_plot = _enum_value(scene.MarkKind, raw["focus_plot"], f"{path}.focus_plot", diags)
        if focus_plot is None:
            return None
        if focus_plot is scene.MarkKind.EVENT_TICKS and kind is sm.ValueKind.CONTINUOUS:
            diags.append(Diagnostic(f"{path}.focus_plot",
                                    "event_ticks applies to event or categorical series"))
        if focus_plot is not scene.MarkKind.EVENT_TICKS and kind is not sm.ValueKind.CONTINUOUS:
            diags.append(Diagnostic(f"{path}.focus_plot",
                                    f"{focus_plot.value} requires a continuous series"))
    else:
        focus_plot = _DEFAULT_FOCUS_PLOT[kind]

    policy: sm.PlotPolicy = sm.AutoPolicy()
    if "periphery_policy" in raw:
        parsed = _parse_policy(raw["periphery_policy"], f"{path}.periphery_policy", diags)
        if parsed is None:
            return None
        policy = parsed

    annotations = []
    for j, a in enumerate(raw.get("annotations", [])):
        akind = _enum_value(scene.AnnotationKind, a, f"{path}.annotations[{j}]", diags)
        if akind is None:
            continue
        if kind is not sm.ValueKind.CONTINUOUS:
            diags.append(Diagnostic(f"{path}.annotations[{j}]",
                                    f"{akind.value} requires a continuous series"))
            continue
        annotations.append(akind)

    bins = raw.get("histogram_bins", 10)
    if not isinstance(bins, int) or isinstance(bins, bool) or bins < 1:
        diags.append(Diagnostic(f"{path}.histogram_bins", f"expected integer >= 1, got {bins!r}"))
        bins = 10
    window = raw.get("envelope_window", 5)
    if not isinstance(window, int) or isinstance(window, bool) or window < 1 or window % 2 == 0:
        diags.append(Diagnostic(f"{path}.envelope_window",
                                f"expected odd integer >= 1, got {window!r}"))
        window = 5
    return TrackSpec(name, kind, focus_plot, policy, tuple(annotations), bins, window)


def parse_spec(text: str) -> FigureSpec:
    """Parse and validate a figure spec; raises with located diagnostics."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJsonError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise MalformedJsonError("spec must be a JSON object")

    diags: list[Diagnostic] = []
    _reject_unknown(raw, _SPEC_KEYS, "", diags)

    time_column = raw.get("time_column")
    if not isinstance(time_column, str) or not time_column:
        diags.append(Diagnostic("time_column", "required non-empty string"))
        time_column = ""
    fmt = _enum_value(TimeFormat, raw.get("time_format"), "time_format", diags) \
        or TimeFormat.ISO8601

    tracks = []
    raw_tracks = raw.get("tracks")
    if not isinstance(raw_tracks, list) or not raw_tracks:
        diags.append(Diagnostic("tracks", "at least one track is required"))
        raw_tracks = []
    for i, rt in enumerate(raw_tracks):
        t = _parse_track(rt, i, fmt, diags)
        if t is not None:
            tracks.append(t)
    kinds_by_series: dict[str, sm.ValueKind] = {}
    for i, t in enumerate(tracks):
        prior = kinds_by_series.setdefault(t.series, t.value_kind)
        if prior is not t.value_kind:
            diags.append(Diagnostic(f"tracks[{i}].value_kind",
                                    f"series {t.series!r} already declared as {prior.value}"))

    zones = []
    raw_zones = raw.get("initial_zones")
    if not isinstance(raw_zones, list) or not raw_zones:
        diags.append(Diagnostic("initial_zones", "at least one zone is required"))
        raw_zones = []
    for i, rz in enumerate(raw_zones):
        zpath = f"initial_zones[{i}]"
        if not isinstance(rz, dict):
            diags.append(Diagnostic(zpath, "expected an object"))
            continue
        _reject_unknown(rz, _ZONE_KEYS, zpath, diags)
        zkind = _enum_value(ZoneKind, rz.get("kind"), f"{zpath}.kind", diags)
        start = _parse_zone_time(rz.get("start"), fmt, f"{zpath}.start", diags)
        end = _parse_zone_time(rz.get("end"), fmt, f"{zpath}.end", diags)
        lock_left = rz.get("lock_left", False)
        lock_right = rz.get("lock_right", False)
        if not isinstance(lock_left, bool) or not isinstance(lock_right, bool):
            diags.append(Diagnostic(zpath, "lock flags must be booleans"))
            continue
        if zkind is None or start is None or end is None:
            continue
        if start >= end:
            diags.append(Diagnostic(zpath, f"zone start {start} must precede end {end}"))
            continue
        zones.append(ZoneSpec(zkind, start, end, lock_left, lock_right))

    layout_cfg = LayoutConfig()
    if "layout" in raw:
        rl = raw["layout"]
        if not isinstance(rl, dict):
            diags.append(Diagnostic("layout", "expected an object"))
        else:
            _reject_unknown(rl, _LAYOUT_KEYS, "layout", diags)
            ff = rl.get("focus_fraction", 0.5)
            ch = rl.get("control_height_px", 40)
            mw = rl.get("min_zone_width_ms", 1)
            if not isinstance(ff, (int, float)) or isinstance(ff, bool) or not 0 < ff < 1:
                diags.append(Diagnostic("layout.focus_fraction",
                                        f"expected a number in (0, 1), got {ff!r}"))
                ff = 0.5
            if not isinstance(ch, (int, float)) or isinstance(ch, bool) or ch <= 0:
                diags.append(Diagnostic("layout.control_height_px",
                                        f"expected a positive number, got {ch!r}"))
                ch = 40
            if not isinstance(mw, int) or isinstance(mw, bool) or mw < 1:
                diags.append(Diagnostic("layout.min_zone_width_ms",
                                        f"expected integer >= 1, got {mw!r}"))
                mw = 1
            layout_cfg = LayoutConfig(float(ff), float(ch), mw)

    axis_domain = None
    if "axis_domain" in raw:
        ra = raw["axis_domain"]
        if not isinstance(ra, dict) or set(ra) != {"start", "end"}:
            diags.append(Diagnostic("axis_domain", "expected {start, end}"))
        else:
            a0 = _parse_zone_time(ra["start"], fmt, "axis_domain.start", diags)
            a1 = _parse_zone_time(ra["end"], fmt, "axis_domain.end", diags)
            if a0 is not None and a1 is not None:
                if a0 >= a1:
                    diags.append(Diagnostic("axis_domain", "start must precede end"))
                else:
                    axis_domain = TimeInterval(a0, a1)

    if diags:
        raise InvalidFieldError(f"{len(diags)} invalid field(s)", diags)

    spec = FigureSpec(time_column, fmt, tuple(tracks), tuple(zones), layout_cfg, axis_domain)
    # Zone geometry checks last, so field-level problems surface first.
    zone_diags: list[Diagnostic] = []
    for i in range(len(zones) - 1):
        if zones[i].end != zones[i + 1].start:
            zone_diags.append(Diagnostic(
                f"initial_zones[{i}]",
                f"zone ends at {zones[i].end} but zone {i + 1} starts at {zones[i + 1].start}",
            ))
    focus_count = sum(1 for z in zones if z.kind is ZoneKind.FOCUS)
    if focus_count != 1:
        zone_diags.append(Diagnostic("initial_zones", f"expected exactly one focus zone, got {focus_count}"))
    for i, z in enumerate(zones):
        if z.end - z.start < layout_cfg.min_zone_width_ms:
            zone_diags.append(Diagnostic(
                f"initial_zones[{i}]",
                f"zone width {z.end - z.start} below minimum {layout_cfg.min_zone_width_ms}",
            ))
    if zone_diags:
        raise ZoneInvariantViolationError(f"{len(zone_diags)} zone problem(s)", zone_diags)
    return spec


def serialize_spec(spec: FigureSpec) -> str:
    """Canonical JSON for a spec; parse_spec(serialize_spec(s)) == s."""
    def policy(p: sm.PlotPolicy) -> dict:
        if isinstance(p, sm.FixedPolicy):
            return {"mode": "fixed", "plot_type": p.plot_type.value}
        return {"mode": "auto", "path": p.path.value, "t1": p.t1, "t2": p.t2}

    doc = {
        "time_column": spec.time_column,
        "time_format": spec.time_format.value,
        "tracks": [
            {
                "series": t.series,
                "value_kind": t.value_kind.value,
                "focus_plot": t.focus_plot.value,
                "periphery_policy": policy(t.periphery_policy),
                "annotations": [a.value for a in t.annotations],
                "histogram_bins": t.histogram_bins,
                "envelope_window": t.envelope_window,
            }
            for t in spec.tracks
        ],
        "initial_zones": [
            {
                "kind": z.kind.value,
                "start": z.start,
                "end": z.end,
                "lock_left": z.lock_left,
                "lock_right": z.lock_right,
            }
            for z in spec.initial_zones
        ],
        "layout": {
            "focus_fraction": spec.layout.focus_fraction,
            "control_height_px": spec.layout.control_height_px,
            "min_zone_width_ms": spec.layout.min_zone_width_ms,
        },
    }
    if spec.axis_domain is not None:
        doc["axis_domain"] = {"start": spec.axis_domain.start, "end": spec.axis_domain.end}
    return json.dumps(doc, indent=2)


# --- CSV --------------------------------------------------------------------


def parse_csv(data: bytes, spec: FigureSpec) -> tuple[dict[str, sm.Series], list[Diagnostic]]:
    """Parse one CSV into a Series per referenced column.

    Cell policy: empty cells omit the observation for that series;
    unparseable or non-finite cells omit it with a diagnostic. Rows with
    unusable timestamps are dropped entirely and become fatal past 10%.
    Observations are sorted by time afterwards, preserving file order
    among equal timestamps.
    """
    text = data.decode("utf-8-sig")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyDatasetError("CSV has no header row") from None
    header = [h.strip() for h in header]
    col_index = {name: i for i, name in enumerate(header)}

    if spec.time_column not in col_index:
        raise MissingColumnError(f"time column {spec.time_column!r} not in CSV header")
    wanted: dict[str, sm.ValueKind] = {}
    for t in spec.tracks:
        if t.series not in col_index:
            raise MissingColumnError(f"column {t.series!r} not in CSV header")
        wanted.setdefault(t.series, t.value_kind)

    t_col = col_index[spec.time_column]
    diags: list[Diagnostic] = []
    obs: dict[str, list[tuple[int, object]]] = {name: [] for name in wanted}
    n_rows = 0
    bad_time = 0
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        n_rows += 1
        try:
            ts = parse_timestamp(row[t_col], spec.time_format)
        except (ValueError, IndexError) as exc:
            bad_time += 1
            diags.append(Diagnostic(f"row {line_no}", f"unusable timestamp: {exc}"))
            continue
        for name, kind in wanted.items():
            i = col_index[name]
            cell = row[i].strip() if i < len(row) else ""
            if not cell:
                continue  # missingness: observation omitted
            if kind is sm.ValueKind.CONTINUOUS:
                try:
                    v = float(cell)
                except ValueError:
                    diags.append(Diagnostic(f"row {line_no}", f"{name}: unparseable number {cell!r}"))
                    continue
                if not math.isfinite(v):
                    diags.append(Diagnostic(f"row {line_no}", f"{name}: non-finite value {cell!r}"))
                    continue
                obs[name].append((ts, v))
            elif kind is sm.ValueKind.CATEGORICAL:
                obs[name].append((ts, cell))
            else:
                obs[name].append((ts, None))

    if n_rows and bad_time > 0.1 * n_rows:
        raise UnparseableTimeError(
            f"{bad_time} of {n_rows} rows have unusable timestamps (over the 10% limit)",
            diags,
        )

    dataset: dict[str, sm.Series] = {}
    for name, kind in wanted.items():
        pairs = sorted(obs[name], key=lambda p: p[0])
        ts = [p[0] for p in pairs]
        if kind is sm.ValueKind.EVENT:
            dataset[name] = sm.Series(name, kind, ts)
        else:
            dataset[name] = sm.Series(name, kind, ts, [p[1] for p in pairs])
    return dataset, diags


def dataset_extent(dataset: dict[str, sm.Series]) -> TimeInterval:
    """Smallest half-open interval covering every observation."""
    lo: int | None = None
    hi: int | None = None
    for series in dataset.values():
        if len(series) == 0:
            continue
        s_lo = int(series.timestamps[0])
        s_hi = int(series.timestamps[-1])
        lo = s_lo if lo is None else min(lo, s_lo)
        hi = s_hi if hi is None else max(hi, s_hi)
    if lo is None or hi is None:
        raise EmptyDatasetError("dataset has no observations")
    return TimeInterval(lo, hi + 1)
