"""Series slicing and the periphery-plot summarization forms.

Four plot classes are produced here, ordered by how much they aggregate:
raw marks and moving-average envelopes keep both screen axes, value
histograms keep only the value axis, time-bin counts keep only the time
axis, and density grids keep neither. `select_plot_type` implements the
automatic transition between them as slice sizes cross the configured
thresholds.

All functions are pure and operate on immutable inputs. Binning follows
one edge rule everywhere: item x falls in bin floor((x - lo) / width),
the upper domain edge belongs to the last bin, and out-of-domain items
are excluded but counted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .timeline import TimeInterval


class WrongValueKindError(Exception):
    code = "WrongValueKind"


class ValueKind(enum.Enum):
    CONTINUOUS = "continuous"
    CATEGORICAL = "categorical"
    EVENT = "event"


class PlotType(enum.Enum):
    """Axis-preservation classes, from full detail to full aggregation."""

    TVAP = "tvap"  # time and value axes preserved
    TAP = "tap"    # time axis only
    VAP = "vap"    # value axis only
    NAP = "nap"    # neither

    @property
    def summarization_level(self) -> int:
        return {PlotType.TVAP: 0, PlotType.TAP: 1, PlotType.VAP: 1, PlotType.NAP: 2}[self]


class SummarizationPath(enum.Enum):
    VALUE_PRESERVING = "value_preserving"
    TIME_PRESERVING = "time_preserving"


@dataclass(frozen=True, slots=True)
class FixedPolicy:
    plot_type: PlotType


@dataclass(frozen=True, slots=True)
class AutoPolicy:
    """Threshold-driven transitions: n <= t1 full detail, n > t2 grid."""

    path: SummarizationPath = SummarizationPath.VALUE_PRESERVING
    t1: int = 50
    t2: int = 5000

    def __post_init__(self):
        if not 0 < self.t1 < self.t2:
            raise ValueError(f"thresholds must satisfy 0 < t1 < t2, got {self.t1}, {self.t2}")


PlotPolicy = FixedPolicy | AutoPolicy


def select_plot_type(policy: PlotPolicy, n: int) -> PlotType:
    """Pick the plot class for a slice of n observations."""
    if n < 0:
        raise ValueError("observation count cannot be negative")
    if isinstance(policy, FixedPolicy):
        return policy.plot_type
    if n <= policy.t1:
        return PlotType.TVAP
    if n <= policy.t2:
        if policy.path is SummarizationPath.VALUE_PRESERVING:
            return PlotType.VAP
        return PlotType.TAP
    return PlotType.NAP


class Series:
    """One variable's time-sorted observations.

    Continuous series hold finite float values, categorical series hold
    labels drawn from a fixed category order, event series hold no
    values at all (only occurrence times).
    """

    def __init__(
        self,
        name: str,
        value_kind: ValueKind,
        timestamps,
        values=None,
        units: str | None = None,
        categories: tuple[str, ...] | None = None,
    ):
        ts = np.asarray(timestamps, dtype=np.int64)
        if ts.ndim != 1:
            raise ValueError("timestamps must be one-dimensional")
        if ts.size > 1 and np.any(np.diff(ts) < 0):
            raise ValueError(f"series {name!r}: timestamps must be non-decreasing")
        self.name = name
        self.value_kind = value_kind
        self.timestamps = ts
        self.units = units
        if value_kind is ValueKind.CONTINUOUS:
            vals = np.asarray(values, dtype=np.float64)
            if vals.shape != ts.shape:
                raise ValueError(f"series {name!r}: {vals.size} values for {ts.size} timestamps")
            if vals.size and not np.all(np.isfinite(vals)):
                raise ValueError(f"series {name!r}: non-finite values are not storable")
            self.values = vals
            self.categories = None
        elif value_kind is ValueKind.CATEGORICAL:
            labels = tuple(values) if values is not None else ()
            if len(labels) != ts.size:
                raise ValueError(f"series {name!r}: {len(labels)} labels for {ts.size} timestamps")
            self.values = labels
            self.categories = categories if categories is not None else tuple(sorted(set(labels)))
        else:
            self.values = None
            self.categories = None

    def __len__(self) -> int:
        return int(self.timestamps.size)

    def __repr__(self) -> str:
        return f"Series({self.name!r}, {self.value_kind.value}, n={len(self)})"

    def slice(self, interval: TimeInterval) -> "SeriesSlice":
        """Restrict to observations with timestamp in [start, end)."""
        lo = int(np.searchsorted(self.timestamps, interval.start, side="left"))
        hi = int(np.searchsorted(self.timestamps, interval.end, side="left"))
        return SeriesSlice(self, interval, lo, hi)

    def value_range(self) -> tuple[float, float] | None:
        """Min/max over all observations; None for empty or valueless series."""
        if self.value_kind is not ValueKind.CONTINUOUS or len(self) == 0:
            return None
        return float(self.values.min()), float(self.values.max())


@dataclass(frozen=True)
class SeriesSlice:
    """Index range of a series restricted to one half-open interval."""

    series: Series
    interval: TimeInterval
    lo: int
    hi: int

    def __len__(self) -> int:
        return self.hi - self.lo

    @property
    def timestamps(self) -> np.ndarray:
        return self.series.timestamps[self.lo:self.hi]

    @property
    def values(self):
        if self.series.values is None:
            return None
        return self.series.values[self.lo:self.hi]


def slice_series(series: Series, interval: TimeInterval) -> SeriesSlice:
    return series.slice(interval)


# --- plot data ------------------------------------------------------------


@dataclass(frozen=True)
class RawMarks:
    """Full-detail observations for a TVAP plot; values None for events."""

    timestamps: tuple[int, ...]
    values: tuple | None


@dataclass(frozen=True)
class Envelope:
    """Sliding-window mean/min/max per observation (TVAP)."""

    timestamps: tuple[int, ...]
    means: tuple[float, ...]
    mins: tuple[float, ...]
    maxs: tuple[float, ...]


@dataclass(frozen=True)
class Histogram:
    """Value distribution (VAP): numeric bins or category counts."""

    counts: tuple[int, ...]
    bin_edges: tuple[float, ...] | None = None
    categories: tuple[str, ...] | None = None
    out_of_domain: int = 0


@dataclass(frozen=True)
class BinCounts:
    """Observations per time bin, values ignored (TAP)."""

    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]


@dataclass(frozen=True)
class DensityGrid:
    """Counts over a time x value grid (NAP); rows are time bins."""

    cells: tuple[tuple[int, ...], ...]
    time_edges: tuple[float, ...]
    value_edges: tuple[float, ...]
    out_of_domain: int = 0


PlotData = RawMarks | Envelope | Histogram | BinCounts | DensityGrid


@dataclass(frozen=True)
class AnnotationStats:
    count: int
    mean: float | None = None
    quantiles: dict[float, float] = field(default_factory=dict)
    min: float | None = None
    max: float | None = None


DEFAULT_QUANTILES = (0.25, 0.5, 0.75)


def _require_continuous(slc: SeriesSlice, op: str) -> None:
    if slc.series.value_kind is not ValueKind.CONTINUOUS:
        raise WrongValueKindError(
            f"{op} needs a continuous series, got {slc.series.value_kind.value}"
        )


def _bin_indices(x: np.ndarray, lo: float, hi: float, bins: int):
    """In-domain mask and bin index per item under the shared edge rule."""
    width = (hi - lo) / bins
    in_dom = (x >= lo) & (x <= hi)
    idx = np.floor((x - lo) / width)
    idx = np.clip(idx, 0, bins - 1).astype(np.int64)
    return in_dom, idx


def histogram(slc: SeriesSlice, value_domain: tuple[float, float], bins: int) -> Histogram:
    """Equal-width value histogram over [lo, hi]; hi belongs to the last bin."""
    if slc.series.value_kind is ValueKind.CATEGORICAL:
        return category_counts(slc)
    _require_continuous(slc, "histogram")
    lo, hi = float(value_domain[0]), float(value_domain[1])
    if bins < 1:
        raise ValueError("bins must be at least 1")
    if not lo < hi:
        raise ValueError(f"value domain must satisfy lo < hi, got ({lo}, {hi})")
    edges = tuple(lo + (hi - lo) * j / bins for j in range(bins)) + (hi,)
    vals = slc.values
    if len(slc) == 0:
        return Histogram(counts=(0,) * bins, bin_edges=edges)
    in_dom, idx = _bin_indices(vals, lo, hi, bins)
    counts = np.bincount(idx[in_dom], minlength=bins)
    return Histogram(
        counts=tuple(int(c) for c in counts),
        bin_edges=edges,
        out_of_domain=int(len(slc) - in_dom.sum()),
    )


def category_counts(slc: SeriesSlice) -> Histogram:
    """Per-category frequency over the series' fixed category order."""
    if slc.series.value_kind is not ValueKind.CATEGORICAL:
        raise WrongValueKindError("category counts need a categorical series")
    cats = slc.series.categories or ()
    index = {c: i for i, c in enumerate(cats)}
    counts = [0] * len(cats)
    extra = 0
    for label in slc.values:
        i = index.get(label)
        if i is None:
            extra += 1
        else:
            counts[i] += 1
    return Histogram(counts=tuple(counts), categories=cats, out_of_domain=extra)


def time_bin_counts(slc: SeriesSlice, interval: TimeInterval, bins: int) -> BinCounts:
    """Observations per equal-width time bin; any value kind."""
    if bins < 1:
        raise ValueError("bins must be at least 1")
    start, end = interval.start, interval.end
    edges = tuple(start + (end - start) * j / bins for j in range(bins)) + (float(end),)
    ts = slc.timestamps
    if ts.size == 0:
        return BinCounts(bin_edges=edges, counts=(0,) * bins)
    in_dom, idx = _bin_indices(ts, float(start), float(end), bins)
    counts = np.bincount(idx[in_dom], minlength=bins)
    return BinCounts(bin_edges=edges, counts=tuple(int(c) for c in counts))


def moving_average_envelope(slc: SeriesSlice, window: int) -> Envelope:
    """Mean/min/max over a centered index window, truncated at the ends.

    The window is counted in observations rather than duration, so the
    result is well-defined for irregular sampling.
    """
    _require_continuous(slc, "moving_average_envelope")
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be an odd positive integer, got {window}")
    k = (window - 1) // 2
    ts = slc.timestamps
    vals = slc.values
    n = ts.size
    means, mins, maxs = [], [], []
    for i in range(n):
        seg = vals[max(0, i - k):min(n, i + k + 1)]
        means.append(float(seg.mean()))
        mins.append(float(seg.min()))
        maxs.append(float(seg.max()))
    return Envelope(
        timestamps=tuple(int(t) for t in ts),
        means=tuple(means),
        mins=tuple(mins),
        maxs=tuple(maxs),
    )


def density_grid(
    slc: SeriesSlice,
    interval: TimeInterval,
    value_domain: tuple[float, float],
    nx: int,
    ny: int,
) -> DensityGrid:
    """nx x ny counts over time x value, same edge rules as the 1-D bins."""
    _require_continuous(slc, "density_grid")
    if nx < 1 or ny < 1:
        raise ValueError("grid dimensions must be at least 1")
    lo, hi = float(value_domain[0]), float(value_domain[1])
    if not lo < hi:
        raise ValueError(f"value domain must satisfy lo < hi, got ({lo}, {hi})")
    start, end = interval.start, interval.end
    t_edges = tuple(start + (end - start) * j / nx for j in range(nx)) + (float(end),)
    v_edges = tuple(lo + (hi - lo) * j / ny for j in range(ny)) + (hi,)
    ts, vals = slc.timestamps, slc.values
    grid = np.zeros((nx, ny), dtype=np.int64)
    out = 0
    if ts.size:
        t_in, t_idx = _bin_indices(ts, float(start), float(end), nx)
        v_in, v_idx = _bin_indices(vals, lo, hi, ny)
        keep = t_in & v_in
        np.add.at(grid, (t_idx[keep], v_idx[keep]), 1)
        out = int(ts.size - keep.sum())
    return DensityGrid(
        cells=tuple(tuple(int(c) for c in row) for row in grid),
        time_edges=t_edges,
        value_edges=v_edges,
        out_of_domain=out,
    )


def summary_stats(slc: SeriesSlice, probs: tuple[float, ...] = DEFAULT_QUANTILES) -> AnnotationStats:
    """Count plus mean/min/max/quantiles for non-empty continuous slices.

    Quantiles interpolate linearly between order statistics at position
    p*(n-1). Non-continuous or empty slices report the count only.
    """
    n = len(slc)
    if slc.series.value_kind is not ValueKind.CONTINUOUS or n == 0:
        return AnnotationStats(count=n)
    vals = slc.values
    qs = np.quantile(vals, probs)
    return AnnotationStats(
        count=n,
        mean=float(vals.mean()),
        quantiles={float(p): float(q) for p, q in zip(probs, qs)},
        min=float(vals.min()),
        max=float(vals.max()),
    )
