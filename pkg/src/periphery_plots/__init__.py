"""Periphery plots: focus+context temporal visualization.

A focal time interval is contextualized by pre/post context zones, each
summarized at a level of detail chosen by data density. The package
provides the zone state machine, the summarization engine, scene
composition with SVG output, CSV/spec ingestion, an HTTP session
service, and a rendering CLI.
"""

from .timeline import (
    Hover,
    InteractionEvent,
    Pan,
    ResizeBoundary,
    TimeInterval,
    ToggleLock,
    Zone,
    ZoneKind,
    ZoneLayout,
    Zoom,
    apply_event,
    new_layout,
    pan,
    resize_boundary,
    toggle_lock,
    zone_intervals,
    zoom,
)
from .summarize import (
    AnnotationStats,
    AutoPolicy,
    BinCounts,
    DensityGrid,
    Envelope,
    FixedPolicy,
    Histogram,
    PlotType,
    RawMarks,
    Series,
    SeriesSlice,
    SummarizationPath,
    ValueKind,
    category_counts,
    density_grid,
    histogram,
    moving_average_envelope,
    select_plot_type,
    slice_series,
    summary_stats,
    time_bin_counts,
)
from .scene import (
    AnnotationKind,
    FigureGeometry,
    MarkKind,
    Scene,
    build_annotation,
    build_control_timeline,
    build_hover_indicator,
    build_zone_plot,
    compose,
    layout_figure,
    to_json,
    to_svg,
)
from .ingest import (
    Diagnostic,
    FigureSpec,
    TimeFormat,
    TrackSpec,
    ZoneSpec,
    dataset_extent,
    parse_csv,
    parse_spec,
    serialize_spec,
)

__version__ = "0.1.0"
