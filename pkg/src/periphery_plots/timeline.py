"""Zone state machine for the control timeline.

A layout is a contiguous run of focus/context zones over integer
epoch-millisecond time, plus one lock flag per zone boundary. All
operations are pure: they take a layout and return a new one, clamping
rather than failing wherever the requested motion would break an
invariant. The only hard failures are direct manipulation of a locked
handle and out-of-range indices.

Boundary conventions: a layout with k zones has k+1 boundaries;
boundary i is the shared point between zone i-1 and zone i, boundary 0
is the left edge of the first zone and boundary k the right edge of the
last. Zone i spans the half-open interval [boundary i, boundary i+1).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import floor


class TimelineError(Exception):
    """Base for zone layout errors; `code` is the wire-format tag."""

    code = "TimelineError"


class EmptyLayoutError(TimelineError):
    code = "EmptyLayout"


class NotContiguousError(TimelineError):
    code = "NotContiguous"


class NoFocusError(TimelineError):
    code = "NoFocus"


class MultipleFocusError(TimelineError):
    code = "MultipleFocus"


class ZoneTooNarrowError(TimelineError):
    code = "ZoneTooNarrow"


class BoundaryLockedError(TimelineError):
    code = "BoundaryLocked"


class IndexOutOfRangeError(TimelineError):
    code = "IndexOutOfRange"


class ZoneKind(enum.Enum):
    FOCUS = "focus"
    CONTEXT = "context"


@dataclass(frozen=True, slots=True)
class TimeInterval:
    """Half-open interval [start, end) in integer epoch milliseconds UTC."""

    start: int
    end: int

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError(f"interval start {self.start} must precede end {self.end}")

    @property
    def width(self) -> int:
        return self.end - self.start

    def contains(self, t: int) -> bool:
        return self.start <= t < self.end


@dataclass(frozen=True, slots=True)
class Zone:
    kind: ZoneKind
    interval: TimeInterval


@dataclass(slots=True)
class ZoneLayout:
    """Validated zone sequence; construct through `new_layout`.

    Stored as the boundary-time vector plus per-zone kinds, which keeps
    contiguity structural and event application cheap. `zones` rebuilds
    the Zone view on demand. Layouts are value objects: every operation
    returns a new instance and nothing in the package mutates one, so
    they are safe to share across threads.
    """

    boundaries: tuple[int, ...]
    kinds: tuple[ZoneKind, ...]
    locks: tuple[bool, ...]
    axis_domain: TimeInterval
    min_zone_width: int

    @property
    def zones(self) -> tuple[Zone, ...]:
        b = self.boundaries
        return tuple(
            Zone(kind, TimeInterval(b[i], b[i + 1])) for i, kind in enumerate(self.kinds)
        )

    @property
    def zone_count(self) -> int:
        return len(self.kinds)

    @property
    def focus_index(self) -> int:
        return self.kinds.index(ZoneKind.FOCUS)

    @property
    def focus_interval(self) -> TimeInterval:
        i = self.focus_index
        return TimeInterval(self.boundaries[i], self.boundaries[i + 1])

    def check_invariants(self) -> None:
        """Raise TimelineError if any structural invariant is violated."""
        b, kinds, locks = self.boundaries, self.kinds, self.locks
        n = len(kinds)
        if not n:
            raise EmptyLayoutError("layout has no zones")
        if len(b) != n + 1 or len(locks) != n + 1:
            raise TimelineError("boundary/lock vector length mismatch")
        focus = kinds.count(ZoneKind.FOCUS)
        if focus == 0:
            raise NoFocusError("layout has no focus zone")
        if focus > 1:
            raise MultipleFocusError(f"layout has {focus} focus zones")
        min_w = self.min_zone_width
        if min_w <= 0:
            raise TimelineError("min_zone_width must be positive")
        prev = b[0]
        for i in range(1, n + 1):
            cur = b[i]
            if cur - prev < min_w:
                if cur <= prev:
                    raise NotContiguousError(
                        f"boundary {i} does not advance past boundary {i - 1}"
                    )
                raise ZoneTooNarrowError(
                    f"zone {i - 1} width {cur - prev} below minimum {min_w}"
                )
            prev = cur


def new_layout(
    zones: list[Zone] | tuple[Zone, ...],
    axis_domain: TimeInterval,
    min_zone_width: int = 1,
) -> ZoneLayout:
    """Validate a zone sequence and return a layout with all locks open."""
    if not zones:
        raise EmptyLayoutError("at least one zone is required")
    for i in range(len(zones) - 1):
        if zones[i].interval.end != zones[i + 1].interval.start:
            raise NotContiguousError(
                f"zone {i} ends at {zones[i].interval.end} but zone {i + 1} "
                f"starts at {zones[i + 1].interval.start}"
            )
    boundaries = tuple(z.interval.start for z in zones) + (zones[-1].interval.end,)
    layout = ZoneLayout(
        boundaries=boundaries,
        kinds=tuple(z.kind for z in zones),
        locks=(False,) * (len(zones) + 1),
        axis_domain=axis_domain,
        min_zone_width=min_zone_width,
    )
    layout.check_invariants()
    return layout


def zone_intervals(layout: ZoneLayout) -> list[tuple[ZoneKind, TimeInterval]]:
    """Zones in temporal order as (kind, interval) pairs."""
    b = layout.boundaries
    return [
        (kind, TimeInterval(b[i], b[i + 1])) for i, kind in enumerate(layout.kinds)
    ]


def _check_index(layout: ZoneLayout, boundary_index: int) -> None:
    if not 0 <= boundary_index <= layout.zone_count:
        raise IndexOutOfRangeError(
            f"boundary index {boundary_index} outside [0, {layout.zone_count}]"
        )


def resize_boundary(layout: ZoneLayout, boundary_index: int, new_time: int) -> ZoneLayout:
    """Drag one boundary handle, pushing zones ahead of the motion.

    The zone behind the motion resizes; every zone ahead translates
    rigidly until the first locked boundary, whose inner neighbour zone
    absorbs the displacement instead (stretching or compressing).
    Motion is clamped so the absorber keeps `min_zone_width` and the
    dragged handle stays inside the axis domain; pushed zones may leave
    the axis domain.
    """
    i = boundary_index
    if not 0 <= i <= len(layout.kinds):
        raise IndexOutOfRangeError(
            f"boundary index {i} outside [0, {len(layout.kinds)}]"
        )
    if layout.locks[i]:
        raise BoundaryLockedError(f"boundary {i} is locked")

    b = layout.boundaries
    axis = layout.axis_domain
    target = min(max(new_time, axis.start), axis.end)
    delta = target - b[i]
    if delta == 0:
        return layout

    n = len(layout.kinds)
    min_w = layout.min_zone_width
    locks = layout.locks
    if delta > 0:
        # First locked boundary ahead (to the right); its inner zone absorbs.
        stop = n + 1
        for j in range(i + 1, n + 1):
            if locks[j]:
                stop = j
                delta = min(delta, b[j] - b[j - 1] - min_w)
                break
        lo = i
    else:
        lo = 0
        for j in range(i - 1, -1, -1):
            if locks[j]:
                lo = j + 1
                delta = max(delta, -(b[j + 1] - b[j] - min_w))
                break
        stop = i + 1
    if delta == 0:
        return layout

    nb = b[:lo] + tuple(t + delta for t in b[lo:stop]) + b[stop:]
    return ZoneLayout(nb, layout.kinds, locks, axis, min_w)


def toggle_lock(layout: ZoneLayout, boundary_index: int) -> ZoneLayout:
    """Flip one boundary lock; geometry is untouched."""
    _check_index(layout, boundary_index)
    locks = list(layout.locks)
    locks[boundary_index] = not locks[boundary_index]
    return ZoneLayout(
        layout.boundaries, layout.kinds, tuple(locks), layout.axis_domain,
        layout.min_zone_width,
    )


def pan(layout: ZoneLayout, delta: int) -> ZoneLayout:
    """Translate every unlocked boundary by `delta` milliseconds.

    Locked boundaries stay put, so zones spanning a locked/unlocked
    boundary pair stretch or compress; `delta` is clamped to the largest
    magnitude keeping every such zone at least `min_zone_width` wide.
    With no locks this is a rigid translation and never clamps.
    """
    if delta == 0:
        return layout
    b, locks = layout.boundaries, layout.locks
    min_w = layout.min_zone_width
    lo = None  # tightest lower bound on delta
    hi = None
    for i in range(layout.zone_count):
        left_locked, right_locked = locks[i], locks[i + 1]
        if left_locked == right_locked:
            continue  # zone translates or is pinned; width unchanged
        slack = (b[i + 1] - b[i]) - min_w
        if left_locked:
            # Width grows with positive delta; shrinks when panning left.
            if lo is None or -slack > lo:
                lo = -slack
        else:
            if hi is None or slack < hi:
                hi = slack
    if lo is not None and delta < lo:
        delta = lo
    if hi is not None and delta > hi:
        delta = hi
    if delta == 0:
        return layout
    nb = tuple(t if locks[j] else t + delta for j, t in enumerate(b))
    return ZoneLayout(nb, layout.kinds, layout.locks, layout.axis_domain, min_w)


def _round_div_half_away(num: int, den: int) -> int:
    """round(num/den) with halves away from zero; den must be positive."""
    if num >= 0:
        return (2 * num + den) // (2 * den)
    return -((-2 * num + den) // (2 * den))


def _zoom_float(layout: ZoneLayout, factor: float, anchor: int) -> ZoneLayout | None:
    """Float-arithmetic zoom, returned only if integer verification passes."""
    b, locks = layout.boundaries, layout.locks
    min_w = layout.min_zone_width
    f = factor
    for i in range(len(layout.kinds)):
        l_locked, r_locked = locks[i], locks[i + 1]
        if l_locked and r_locked:
            continue
        if not l_locked and not r_locked:
            lo = min_w / (b[i + 1] - b[i])
            if f < lo:
                f = lo
            continue
        if l_locked:
            den = b[i + 1] - anchor
            num = min_w + b[i] - anchor
        else:
            den = b[i] - anchor
            num = b[i + 1] - anchor - min_w
        if den == 0:
            continue
        bound = num / den
        if den > 0:
            if l_locked and f < bound:
                f = bound
            elif not l_locked and f > bound:
                f = bound
        else:
            if l_locked and f > bound:
                f = bound
            elif not l_locked and f < bound:
                f = bound
    nb = tuple(
        t if locks[j]
        else anchor + (floor(x + 0.5) if (x := f * (t - anchor)) >= 0 else -floor(0.5 - x))
        for j, t in enumerate(b)
    )
    prev = nb[0]
    for j in range(1, len(nb)):
        cur = nb[j]
        if cur - prev < min_w:
            return None  # clamp landed on an edge; redo exactly
        prev = cur
    return ZoneLayout(nb, layout.kinds, locks, layout.axis_domain, min_w)


def zoom(layout: ZoneLayout, factor: float, anchor: int) -> ZoneLayout:
    """Rescale unlocked boundaries about `anchor` by `factor`.

    Each unlocked boundary maps to anchor + factor*(b - anchor), rounded
    to integer milliseconds (ties away from zero); locked boundaries are
    fixed. The factor is clamped toward 1 as far as needed to keep
    boundaries ordered and zone widths at least `min_zone_width`.
    Factors above 1 widen zones in data time (zoom out); below 1 narrow
    them (zoom in).

    Arithmetic runs in floats first and the result is verified in
    integers; when the clamp lands exactly on a feasibility edge the
    operation is redone with the factor treated as the exact rational
    its float bits denote, so invariants can never be lost to rounding.
    """
    if factor <= 0:
        raise ValueError("zoom factor must be positive")
    if factor == 1.0:
        return layout
    fast = _zoom_float(layout, factor, anchor)
    if fast is not None:
        return fast
    b, locks = layout.boundaries, layout.locks
    min_w = layout.min_zone_width
    p, q = float(factor).as_integer_ratio()  # exact rational, q > 0

    # Every consecutive boundary pair must satisfy b'[i+1] - b'[i] >= min_w.
    # Each pair yields a rational lower or upper bound on the factor; the
    # current layout satisfies all of them at factor 1, so clamping into
    # [max lower, min upper] always moves the factor toward 1.
    for i in range(layout.zone_count):
        l_locked, r_locked = locks[i], locks[i + 1]
        if l_locked and r_locked:
            continue
        if not l_locked and not r_locked:
            # f * width >= min_w -> lower bound min_w / width
            num, den = min_w, b[i + 1] - b[i]
        elif l_locked:
            # anchor + f*(b[i+1]-anchor) - b[i] >= min_w
            den = b[i + 1] - anchor
            num = min_w + b[i] - anchor
        else:
            # b[i+1] - anchor - f*(b[i]-anchor) >= min_w
            den = b[i] - anchor
            num = b[i + 1] - anchor - min_w
        if den == 0:
            continue  # constraint does not involve the factor
        if den < 0:
            num, den = -num, -den
            flip = True
        else:
            flip = False
        is_lower = (not l_locked and not r_locked) or l_locked
        if flip:
            is_lower = not is_lower
        # Compare p/q against num/den exactly.
        if is_lower:
            if p * den < num * q:
                p, q = num, den
        else:
            if p * den > num * q:
                p, q = num, den

    nb = tuple(
        t if locks[j] else anchor + _round_div_half_away(p * (t - anchor), q)
        for j, t in enumerate(b)
    )
    if nb == b:
        return layout
    return ZoneLayout(nb, layout.kinds, layout.locks, layout.axis_domain, min_w)


# --- interaction events ---------------------------------------------------
# Plain slotted dataclasses: cheap to build in bulk, treated as values.


@dataclass(slots=True)
class ResizeBoundary:
    boundary_index: int
    new_time: int


@dataclass(slots=True)
class ToggleLock:
    boundary_index: int


@dataclass(slots=True)
class Pan:
    delta_ms: int


@dataclass(slots=True)
class Zoom:
    factor: float
    anchor: int

    def __post_init__(self):
        if self.factor <= 0:
            raise ValueError("zoom factor must be positive")


@dataclass(slots=True)
class Hover:
    time: int | None


InteractionEvent = ResizeBoundary | ToggleLock | Pan | Zoom | Hover


def apply_event(layout: ZoneLayout, event: InteractionEvent) -> ZoneLayout:
    """Dispatch one interaction event; Hover is view state and a no-op here."""
    cls = type(event)
    if cls is ResizeBoundary:
        return resize_boundary(layout, event.boundary_index, event.new_time)
    if cls is Pan:
        return pan(layout, event.delta_ms)
    if cls is Zoom:
        return zoom(layout, event.factor, event.anchor)
    if cls is ToggleLock:
        return toggle_lock(layout, event.boundary_index)
    if cls is Hover:
        return layout  # view state only; no geometric effect
    raise TypeError(f"unknown interaction event {event!r}")
