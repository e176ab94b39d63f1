"""Figure composition: geometry, mark trees, and SVG output.

A composed figure is a control timeline above a stack of tracks; every
track shows the same zone columns, so boundaries line up vertically
across tracks. Composition returns a resolution-independent scene graph
whose interactive nodes carry semantic roles (``handle:i``, ``lock:i``,
``brush:i``, ``focus-plot:t``); serialization to SVG or JSON is a pure
function of the scene.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING
from xml.sax.saxutils import escape

from . import summarize as sm
from .timeline import TimeInterval, ZoneKind, ZoneLayout

if TYPE_CHECKING:
    from .ingest import FigureSpec, TrackSpec


class TooSmallError(Exception):
    code = "TooSmall"


class ScaleMismatchError(Exception):
    code = "ScaleMismatch"


class UnknownSeriesError(Exception):
    code = "UnknownSeries"


MIN_COLUMN_PX = 20.0
MIN_TRACK_PX = 30.0
TRACK_GAP_PX = 4.0

SCENE_VERSION = 1


class MarkKind(enum.Enum):
    LINE = "line"
    BAR = "bar"
    DOT = "dot"
    EVENT_TICKS = "event_ticks"


class AnnotationKind(enum.Enum):
    MEAN_LINE = "mean_line"
    QUANTILE_BAND = "quantile_band"


# --- geometry ---------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Region:
    x: float
    y: float
    width: float
    height: float

    @property
    def x1(self) -> float:
        return self.x + self.width

    @property
    def y1(self) -> float:
        return self.y + self.height


@dataclass(frozen=True)
class FigureGeometry:
    width: float
    height: float
    control_region: Region
    track_regions: tuple[Region, ...]
    zone_columns: tuple[tuple[float, float], ...]
    boundary_x: tuple[float, ...]


def _figure_geometry(
    kinds: tuple[ZoneKind, ...],
    n_tracks: int,
    width: float,
    height: float,
    focus_fraction: float,
    control_height: float,
) -> FigureGeometry:
    if width <= 0 or height <= 0:
        raise TooSmallError("figure width and height must be positive")
    if n_tracks < 1:
        raise TooSmallError("at least one track is required")

    n_ctx = sum(1 for k in kinds if k is ZoneKind.CONTEXT)
    focus_w = width * focus_fraction if n_ctx else width
    ctx_w = (width - focus_w) / n_ctx if n_ctx else 0.0
    columns = []
    x = 0.0
    for kind in kinds:
        w = focus_w if kind is ZoneKind.FOCUS else ctx_w
        if w < MIN_COLUMN_PX:
            raise TooSmallError(
                f"zone column of {w:.1f}px is below the {MIN_COLUMN_PX:.0f}px minimum"
            )
        columns.append((x, x + w))
        x += w
    boundary_x = tuple(c[0] for c in columns) + (columns[-1][1],)

    track_h = (height - control_height - TRACK_GAP_PX * n_tracks) / n_tracks
    if track_h < MIN_TRACK_PX:
        raise TooSmallError(
            f"track height of {track_h:.1f}px is below the {MIN_TRACK_PX:.0f}px minimum"
        )
    tracks = []
    y = control_height + TRACK_GAP_PX
    for _ in range(n_tracks):
        tracks.append(Region(0.0, y, width, track_h))
        y += track_h + TRACK_GAP_PX

    return FigureGeometry(
        width=width,
        height=height,
        control_region=Region(0.0, 0.0, width, control_height),
        track_regions=tuple(tracks),
        zone_columns=tuple(columns),
        boundary_x=boundary_x,
    )


def layout_figure(spec: "FigureSpec", width: float, height: float) -> FigureGeometry:
    """Geometry for a figure spec at a pixel size (columns shared by all tracks)."""
    kinds = tuple(z.kind for z in spec.initial_zones)
    return _figure_geometry(
        kinds, len(spec.tracks), width, height,
        spec.layout.focus_fraction, spec.layout.control_height_px,
    )


# --- scene nodes ------------------------------------------------------------


@dataclass(frozen=True)
class Style:
    fill: str | None = None
    stroke: str | None = None
    stroke_width: float | None = None
    stroke_dasharray: str | None = None
    opacity: float | None = None
    fill_opacity: float | None = None
    font_size: float | None = None
    text_anchor: str | None = None


@dataclass(frozen=True)
class Group:
    children: tuple = ()
    role: str | None = None


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    width: float
    height: float
    style: Style = Style()
    role: str | None = None


@dataclass(frozen=True)
class Line:
    x1: float
    y1: float
    x2: float
    y2: float
    style: Style = Style()
    role: str | None = None


@dataclass(frozen=True)
class Circle:
    cx: float
    cy: float
    r: float
    style: Style = Style()
    role: str | None = None


@dataclass(frozen=True)
class Path:
    points: tuple[tuple[float, float], ...]
    closed: bool = False
    style: Style = Style()
    role: str | None = None


@dataclass(frozen=True)
class Text:
    x: float
    y: float
    text: str
    style: Style = Style()
    role: str | None = None


SceneNode = Group | Rect | Line | Circle | Path | Text


@dataclass(frozen=True)
class Scene:
    root: Group
    geometry: FigureGeometry
    layout_echo: ZoneLayout
    hover: int | None = None


# Default palette: green handles and black locks follow the control-timeline
# description; mean annotations are dashed orange.
AXIS_STYLE = Style(fill="#ebebeb")
CONTEXT_BRUSH_STYLE = Style(fill="#9a9a9a", fill_opacity=0.3, stroke="#777777", stroke_width=0.5)
FOCUS_BRUSH_STYLE = Style(fill="#4878a8", fill_opacity=0.4, stroke="#2f5a85", stroke_width=0.5)
HANDLE_STYLE = Style(fill="#2e9e4f", stroke="#1b6332", stroke_width=0.5)
LOCK_ON_STYLE = Style(fill="#000000")
LOCK_OFF_STYLE = Style(fill="#ffffff", stroke="#000000", stroke_width=0.8)
ZONE_BG_STYLE = Style(fill="#ffffff", stroke="#d8d8d8", stroke_width=0.5)
MARK_COLOR = "#30506d"
MEAN_LINE_STYLE = Style(stroke="#ff8c00", stroke_width=1.5, stroke_dasharray="4,3")
QUANTILE_BAND_STYLE = Style(fill="#ff8c00", fill_opacity=0.15)
HOVER_STYLE = Style(stroke="#c62828", stroke_width=1.0)
LABEL_STYLE = Style(fill="#333333", font_size=10.0)

HANDLE_SIZE = 8.0
LOCK_SIZE = 8.0
LOCK_STRIP_PX = 14.0


def _scale_y(value_scale: tuple[float, float], region: Region):
    lo, hi = value_scale
    span = hi - lo
    return lambda v: region.y + region.height * (hi - v) / span


def _scale_x(interval: TimeInterval, region: Region):
    span = interval.end - interval.start
    return lambda t: region.x + region.width * (t - interval.start) / span


# --- zone plots -------------------------------------------------------------


def _need(condition: bool, what: str):
    if not condition:
        raise ScaleMismatchError(what)


def _raw_marks_node(
    data: sm.RawMarks,
    region: Region,
    value_scale,
    time_scale: TimeInterval | None,
    mark: MarkKind,
) -> SceneNode:
    if not data.timestamps:
        return Group()
    _need(time_scale is not None, "raw marks need a time scale")
    sx = _scale_x(time_scale, region)
    style = Style(stroke=MARK_COLOR, stroke_width=1.0)

    if mark is MarkKind.EVENT_TICKS or data.values is None:
        ticks = []
        if data.values is not None and isinstance(value_scale, tuple) and value_scale \
                and isinstance(value_scale[0], str):
            # Categorical ticks: one horizontal band per category, top-down.
            cats = value_scale
            band = region.height / len(cats)
            for t, label in zip(data.timestamps, data.values):
                try:
                    ci = cats.index(label)
                except ValueError:
                    continue
                y0 = region.y + ci * band
                ticks.append(Line(sx(t), y0 + band * 0.15, sx(t), y0 + band * 0.85, style))
        else:
            y0 = region.y + region.height * 0.2
            y1 = region.y + region.height * 0.8
            for t in data.timestamps:
                ticks.append(Line(sx(t), y0, sx(t), y1, style))
        return Group(tuple(ticks))

    _need(
        isinstance(value_scale, tuple) and len(value_scale) == 2
        and not isinstance(value_scale[0], str),
        "continuous marks need a numeric value scale",
    )
    sy = _scale_y(value_scale, region)
    pts = [(sx(t), sy(v)) for t, v in zip(data.timestamps, data.values)]

    if mark is MarkKind.LINE:
        if len(pts) == 1:
            return Circle(pts[0][0], pts[0][1], 2.0, Style(fill=MARK_COLOR))
        return Path(tuple(pts), style=Style(stroke=MARK_COLOR, stroke_width=1.0, fill="none"))
    if mark is MarkKind.DOT:
        return Group(tuple(Circle(px, py, 1.8, Style(fill=MARK_COLOR)) for px, py in pts))
    # Bars drop to the zero line when zero is on-scale, else to the region floor.
    lo, hi = value_scale
    base = sy(min(max(0.0, lo), hi))
    bar_w = max(0.5, min(6.0, region.width / max(1, len(pts)) * 0.7))
    bars = []
    for px, py in pts:
        y0, y1 = (py, base) if py <= base else (base, py)
        bars.append(Rect(px - bar_w / 2, y0, bar_w, y1 - y0, Style(fill=MARK_COLOR)))
    return Group(tuple(bars))


def _envelope_node(data: sm.Envelope, region: Region, value_scale, time_scale) -> SceneNode:
    if not data.timestamps:
        return Group()
    _need(time_scale is not None, "envelope needs a time scale")
    _need(
        isinstance(value_scale, tuple) and not isinstance(value_scale[0], str),
        "envelope needs a numeric value scale",
    )
    sx = _scale_x(time_scale, region)
    sy = _scale_y(value_scale, region)
    xs = [sx(t) for t in data.timestamps]
    band = tuple(zip(xs, map(sy, data.maxs))) + tuple(
        zip(reversed(xs), map(sy, reversed(data.mins)))
    )
    mean_line = tuple(zip(xs, map(sy, data.means)))
    children: list[SceneNode] = [
        Path(band, closed=True, style=Style(fill=MARK_COLOR, fill_opacity=0.25))
    ]
    if len(mean_line) == 1:
        children.append(Circle(mean_line[0][0], mean_line[0][1], 2.0, Style(fill=MARK_COLOR)))
    else:
        children.append(Path(mean_line, style=Style(stroke=MARK_COLOR, stroke_width=1.0, fill="none")))
    return Group(tuple(children))


def _histogram_node(data: sm.Histogram, region: Region, value_scale) -> SceneNode:
    max_count = max(data.counts) if data.counts else 0
    bars = []
    if data.categories is not None:
        band = region.height / max(1, len(data.categories))
        for i, count in enumerate(data.counts):
            length = region.width * (count / max_count) if max_count else 0.0
            bars.append(Rect(region.x, region.y + i * band + band * 0.1,
                             length, band * 0.8, Style(fill=MARK_COLOR, fill_opacity=0.8)))
        return Group(tuple(bars))
    _need(
        isinstance(value_scale, tuple) and not isinstance(value_scale[0], str),
        "numeric histogram needs a numeric value scale",
    )
    _need(data.bin_edges is not None, "numeric histogram carries bin edges")
    sy = _scale_y(value_scale, region)
    for j, count in enumerate(data.counts):
        y_top = sy(data.bin_edges[j + 1])
        y_bot = sy(data.bin_edges[j])
        length = region.width * (count / max_count) if max_count else 0.0
        bars.append(Rect(region.x, y_top, length, y_bot - y_top,
                         Style(fill=MARK_COLOR, fill_opacity=0.8)))
    return Group(tuple(bars))


def _bin_counts_node(data: sm.BinCounts, region: Region, time_scale) -> SceneNode:
    _need(time_scale is not None, "bin counts need a time scale")
    sx = _scale_x(time_scale, region)
    max_count = max(data.counts) if data.counts else 0
    bands = []
    for j, count in enumerate(data.counts):
        x0 = sx(data.bin_edges[j])
        x1 = sx(data.bin_edges[j + 1])
        opacity = count / max_count if max_count else 0.0
        bands.append(Rect(x0, region.y, x1 - x0, region.height,
                          Style(fill=MARK_COLOR, fill_opacity=opacity)))
    return Group(tuple(bands))


def _density_node(data: sm.DensityGrid, region: Region) -> SceneNode:
    nx = len(data.cells)
    ny = len(data.cells[0]) if nx else 0
    if not nx or not ny:
        return Group()
    max_count = max(max(row) for row in data.cells)
    cw = region.width / nx
    ch = region.height / ny
    cells = []
    for i, row in enumerate(data.cells):
        for j, count in enumerate(row):
            opacity = count / max_count if max_count else 0.0
            # Value bins grow upward: bin 0 sits at the region floor.
            cells.append(Rect(region.x + i * cw, region.y + region.height - (j + 1) * ch,
                              cw, ch, Style(fill=MARK_COLOR, fill_opacity=opacity)))
    return Group(tuple(cells))


def build_zone_plot(
    data: sm.PlotData,
    region: Region,
    value_scale=None,
    time_scale: TimeInterval | None = None,
    mark: MarkKind = MarkKind.LINE,
) -> SceneNode:
    """Turn one zone's plot data into marks within a region.

    Raw marks and envelopes map through both scales; histograms need
    only the value scale (bars run horizontally so the value axis stays
    vertical and annotations remain comparable with the focus plot);
    bin counts need only the time scale; density grids fill the region.
    """
    if isinstance(data, sm.RawMarks):
        return _raw_marks_node(data, region, value_scale, time_scale, mark)
    if isinstance(data, sm.Envelope):
        return _envelope_node(data, region, value_scale, time_scale)
    if isinstance(data, sm.Histogram):
        return _histogram_node(data, region, value_scale)
    if isinstance(data, sm.BinCounts):
        return _bin_counts_node(data, region, time_scale)
    if isinstance(data, sm.DensityGrid):
        return _density_node(data, region)
    raise TypeError(f"unknown plot data {data!r}")


def build_annotation(
    stats: sm.AnnotationStats,
    kind: AnnotationKind,
    region: Region,
    value_scale: tuple[float, float],
) -> SceneNode:
    """Derived-measure overlay, rendered identically across plot variants.

    Missing statistics (empty zones) yield an empty group rather than an
    error so sparse zones degrade quietly.
    """
    if kind is AnnotationKind.MEAN_LINE:
        if stats.mean is None:
            return Group()
        y = _scale_y(value_scale, region)(stats.mean)
        return Line(region.x, y, region.x1, y, MEAN_LINE_STYLE)
    if kind is AnnotationKind.QUANTILE_BAND:
        q1, q3 = stats.quantiles.get(0.25), stats.quantiles.get(0.75)
        if q1 is None or q3 is None:
            return Group()
        sy = _scale_y(value_scale, region)
        y_top, y_bot = sy(q3), sy(q1)
        return Rect(region.x, y_top, region.width, y_bot - y_top, QUANTILE_BAND_STYLE)
    raise ValueError(f"unknown annotation kind {kind!r}")


# --- control timeline and hover ---------------------------------------------


def build_control_timeline(layout: ZoneLayout, region: Region) -> SceneNode:
    """Axis bar, one brush per zone, and handle/lock squares per boundary.

    Handles appear only for unlocked boundaries; boundaries that have
    left the axis domain are clipped and lose their handle and lock
    squares until they return.
    """
    axis = layout.axis_domain
    sx = _scale_x(axis, region)
    brush_top = region.y + 2.0
    brush_h = region.height - LOCK_STRIP_PX - 4.0
    brush_cy = brush_top + brush_h / 2
    lock_cy = region.y + region.height - LOCK_STRIP_PX / 2

    children: list[SceneNode] = [
        Rect(region.x, brush_top, region.width, brush_h, AXIS_STYLE, role="axis")
    ]
    b = layout.boundaries
    for i, kind in enumerate(layout.kinds):
        x0 = max(sx(b[i]), region.x)
        x1 = min(sx(b[i + 1]), region.x1)
        if x1 <= x0:
            continue  # zone entirely off-axis
        style = FOCUS_BRUSH_STYLE if kind is ZoneKind.FOCUS else CONTEXT_BRUSH_STYLE
        children.append(Rect(x0, brush_top, x1 - x0, brush_h, style, role=f"brush:{i}"))
    for i, t in enumerate(b):
        if not axis.start <= t <= axis.end:
            continue
        x = sx(t)
        if not layout.locks[i]:
            children.append(Rect(x - HANDLE_SIZE / 2, brush_cy - HANDLE_SIZE / 2,
                                 HANDLE_SIZE, HANDLE_SIZE, HANDLE_STYLE, role=f"handle:{i}"))
        lock_style = LOCK_ON_STYLE if layout.locks[i] else LOCK_OFF_STYLE
        children.append(Rect(x - LOCK_SIZE / 2, lock_cy - LOCK_SIZE / 2,
                             LOCK_SIZE, LOCK_SIZE, lock_style, role=f"lock:{i}"))
    return Group(tuple(children), role="control-timeline")


def build_hover_indicator(time: int, geometry: FigureGeometry, layout: ZoneLayout) -> SceneNode:
    """Vertical time indicator across every track's focus column.

    Defined only while the hovered time lies inside the focus zone;
    anything else returns an empty group.
    """
    focus = layout.focus_interval
    if not focus.contains(time):
        return Group()
    x0, x1 = geometry.zone_columns[layout.focus_index]
    x = x0 + (x1 - x0) * (time - focus.start) / focus.width
    tracks = geometry.track_regions
    line = Line(x, tracks[0].y, x, tracks[-1].y1, HOVER_STYLE)
    label = _format_time(time)
    ly = geometry.control_region.y1 + 10.0
    anchor = "start" if x < geometry.width / 2 else "end"
    lx = x + 4.0 if anchor == "start" else x - 4.0
    text = Text(lx, ly, label, Style(fill="#c62828", font_size=10.0, text_anchor=anchor))
    return Group((line, text), role="hover-indicator")


def _format_time(ms: int) -> str:
    from datetime import datetime, timezone

    dt = datetime.fromtimestamp(ms / 1000.0, tz=timezone.utc)
    if ms % 86_400_000 == 0:
        return dt.strftime("%Y-%m-%d")
    return dt.strftime("%Y-%m-%d %H:%M:%S")


# --- composition ------------------------------------------------------------


def _track_scales(series: sm.Series) -> tuple[tuple[float, float], tuple[float, float]]:
    """(screen value scale with 5% padding, unpadded histogram domain)."""
    vr = series.value_range()
    if vr is None:
        return (0.0, 1.0), (0.0, 1.0)
    mn, mx = vr
    if mn == mx:
        return (mn - 0.5, mx + 0.5), (mn - 0.5, mx + 0.5)
    pad = 0.05 * (mx - mn)
    return (mn - pad, mx + pad), (mn, mx)


def _context_plot_data(
    track: "TrackSpec",
    series: sm.Series,
    slc: sm.SeriesSlice,
    zone: TimeInterval,
    hist_domain: tuple[float, float],
    plot_type: sm.PlotType,
) -> sm.PlotData:
    kind = series.value_kind
    if plot_type is sm.PlotType.TVAP:
        if kind is sm.ValueKind.CONTINUOUS and track.focus_plot is MarkKind.LINE:
            return sm.moving_average_envelope(slc, track.envelope_window)
        return sm.RawMarks(tuple(int(t) for t in slc.timestamps),
                           tuple(slc.values) if slc.values is not None else None)
    if plot_type is sm.PlotType.VAP:
        if kind is sm.ValueKind.CONTINUOUS:
            return sm.histogram(slc, hist_domain, track.histogram_bins)
        if kind is sm.ValueKind.CATEGORICAL:
            return sm.category_counts(slc)
        # Events carry no values; the time-preserving form stands in.
        return sm.time_bin_counts(slc, zone, track.histogram_bins)
    if plot_type is sm.PlotType.TAP:
        return sm.time_bin_counts(slc, zone, track.histogram_bins)
    # NAP
    if kind is sm.ValueKind.CONTINUOUS:
        return sm.density_grid(slc, zone, hist_domain,
                               track.histogram_bins, track.histogram_bins)
    return sm.time_bin_counts(slc, zone, track.histogram_bins)


def compose(
    dataset: dict[str, sm.Series],
    spec: "FigureSpec",
    layout: ZoneLayout,
    width: float,
    height: float,
    hover: int | None = None,
) -> Scene:
    """Assemble the full scene for the current layout state.

    Per track and zone: slice the series by the zone interval, pick the
    plot class (focus zones always render at full detail; context zones
    follow the track's periphery policy at the slice's own size), build
    the marks, then layer the requested annotations. Value scales are
    computed once per track from the whole series so zone plots and
    annotations stay comparable across zones.
    """
    geometry = _figure_geometry(
        layout.kinds, len(spec.tracks), width, height,
        spec.layout.focus_fraction, spec.layout.control_height_px,
    )
    zones = [
        (kind, TimeInterval(layout.boundaries[i], layout.boundaries[i + 1]))
        for i, kind in enumerate(layout.kinds)
    ]

    track_groups: list[SceneNode] = []
    for ti, track in enumerate(spec.tracks):
        series = dataset.get(track.series)
        if series is None:
            raise UnknownSeriesError(f"track {ti} references unknown series {track.series!r}")
        value_scale, hist_domain = _track_scales(series)
        track_region = geometry.track_regions[ti]
        zone_groups: list[SceneNode] = []
        for zi, (kind, zone) in enumerate(zones):
            x0, x1 = geometry.zone_columns[zi]
            region = Region(x0, track_region.y, x1 - x0, track_region.height)
            slc = series.slice(zone)
            is_focus = kind is ZoneKind.FOCUS

            if is_focus:
                data: sm.PlotData = sm.RawMarks(
                    tuple(int(t) for t in slc.timestamps),
                    tuple(slc.values) if slc.values is not None else None,
                )
            else:
                ptype = sm.select_plot_type(track.periphery_policy, len(slc))
                data = _context_plot_data(track, series, slc, zone, hist_domain, ptype)

            scale = series.categories if series.value_kind is sm.ValueKind.CATEGORICAL \
                else value_scale
            bg_role = f"focus-plot:{ti}" if is_focus else None
            children: list[SceneNode] = [
                Rect(region.x, region.y, region.width, region.height,
                     ZONE_BG_STYLE, role=bg_role),
                build_zone_plot(data, region, scale, zone, mark=track.focus_plot),
            ]
            if series.value_kind is sm.ValueKind.CONTINUOUS and track.annotations:
                stats = sm.summary_stats(slc)
                for akind in track.annotations:
                    note = build_annotation(stats, akind, region, value_scale)
                    children.append(Group((note,), role=f"annotation:{akind.value}:{ti}:{zi}"))
            zone_groups.append(Group(tuple(children), role=f"zone-plot:{ti}:{zi}"))
        track_groups.append(Group(tuple(zone_groups), role=f"track:{ti}"))

    children = [build_control_timeline(layout, geometry.control_region)]
    children.extend(track_groups)
    if hover is not None:
        children.append(build_hover_indicator(hover, geometry, layout))
    return Scene(root=Group(tuple(children)), geometry=geometry,
                 layout_echo=layout, hover=hover)


# --- serialization ----------------------------------------------------------


def _fmt(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def _dim(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else _fmt(v)


_STYLE_ATTRS = (
    ("fill", "fill", str),
    ("stroke", "stroke", str),
    ("stroke_width", "stroke-width", _fmt),
    ("stroke_dasharray", "stroke-dasharray", str),
    ("opacity", "opacity", _fmt),
    ("fill_opacity", "fill-opacity", _fmt),
    ("font_size", "font-size", _fmt),
    ("text_anchor", "text-anchor", str),
)


def _style_attrs(style: Style) -> str:
    parts = []
    for attr, name, conv in _STYLE_ATTRS:
        v = getattr(style, attr)
        if v is not None:
            parts.append(f' {name}="{conv(v)}"')
    return "".join(parts)


def _role_attr(role: str | None) -> str:
    return f' data-role="{escape(role)}"' if role else ""


def _node_svg(node: SceneNode, out: list[str]) -> None:
    if isinstance(node, Group):
        out.append(f"<g{_role_attr(node.role)}>")
        for child in node.children:
            _node_svg(child, out)
        out.append("</g>")
    elif isinstance(node, Rect):
        out.append(
            f'<rect x="{_fmt(node.x)}" y="{_fmt(node.y)}" width="{_fmt(node.width)}"'
            f' height="{_fmt(node.height)}"{_style_attrs(node.style)}{_role_attr(node.role)}/>'
        )
    elif isinstance(node, Line):
        out.append(
            f'<line x1="{_fmt(node.x1)}" y1="{_fmt(node.y1)}" x2="{_fmt(node.x2)}"'
            f' y2="{_fmt(node.y2)}"{_style_attrs(node.style)}{_role_attr(node.role)}/>'
        )
    elif isinstance(node, Circle):
        out.append(
            f'<circle cx="{_fmt(node.cx)}" cy="{_fmt(node.cy)}" r="{_fmt(node.r)}"'
            f'{_style_attrs(node.style)}{_role_attr(node.role)}/>'
        )
    elif isinstance(node, Path):
        if node.points:
            d = "M" + "L".join(f"{_fmt(x)} {_fmt(y)}" for x, y in node.points)
            if node.closed:
                d += "Z"
        else:
            d = ""
        out.append(f'<path d="{d}"{_style_attrs(node.style)}{_role_attr(node.role)}/>')
    elif isinstance(node, Text):
        out.append(
            f'<text x="{_fmt(node.x)}" y="{_fmt(node.y)}" font-family="sans-serif"'
            f'{_style_attrs(node.style)}{_role_attr(node.role)}>{escape(node.text)}</text>'
        )
    else:
        raise TypeError(f"unknown scene node {node!r}")


def to_svg(scene: Scene) -> str:
    """Standalone SVG 1.1 document; byte-deterministic for a given scene."""
    w, h = scene.geometry.width, scene.geometry.height
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_dim(w)}"'
        f' height="{_dim(h)}" viewBox="0 0 {_dim(w)} {_dim(h)}">',
    ]
    _node_svg(scene.root, out)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _node_json(node: SceneNode) -> dict:
    if isinstance(node, Group):
        d: dict = {"type": "group", "children": [_node_json(c) for c in node.children]}
    elif isinstance(node, Rect):
        d = {"type": "rect", "x": node.x, "y": node.y,
             "width": node.width, "height": node.height}
    elif isinstance(node, Line):
        d = {"type": "line", "x1": node.x1, "y1": node.y1, "x2": node.x2, "y2": node.y2}
    elif isinstance(node, Circle):
        d = {"type": "circle", "cx": node.cx, "cy": node.cy, "r": node.r}
    elif isinstance(node, Path):
        d = {"type": "path", "points": [[x, y] for x, y in node.points], "closed": node.closed}
    elif isinstance(node, Text):
        d = {"type": "text", "x": node.x, "y": node.y, "text": node.text}
    else:
        raise TypeError(f"unknown scene node {node!r}")
    if not isinstance(node, Group):
        style = {
            name: getattr(node.style, attr)
            for attr, name, _ in _STYLE_ATTRS
            if getattr(node.style, attr) is not None
        }
        if style:
            d["style"] = style
    if node.role:
        d["role"] = node.role
    return d


def to_json(scene: Scene) -> dict:
    """Scene as JSON-ready dicts (schema version SCENE_VERSION)."""
    geo = scene.geometry
    layout = scene.layout_echo

    def region(r: Region) -> dict:
        return {"x": r.x, "y": r.y, "width": r.width, "height": r.height}

    return {
        "scene_version": SCENE_VERSION,
        "width": geo.width,
        "height": geo.height,
        "geometry": {
            "control_region": region(geo.control_region),
            "track_regions": [region(r) for r in geo.track_regions],
            "zone_columns": [[x0, x1] for x0, x1 in geo.zone_columns],
            "boundary_x": list(geo.boundary_x),
        },
        "layout": {
            "boundaries": list(layout.boundaries),
            "kinds": [k.value for k in layout.kinds],
            "locks": list(layout.locks),
            "axis_domain": {"start": layout.axis_domain.start, "end": layout.axis_domain.end},
            "min_zone_width_ms": layout.min_zone_width,
        },
        "hover": scene.hover,
        "root": _node_json(scene.root),
    }
