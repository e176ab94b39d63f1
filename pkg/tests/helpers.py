"""Shared oracles and random generators for the test suite.

Oracles are deliberately naive (per-observation loops, exhaustive
searches) and independent of the library's vectorized implementations.
"""

import math

import numpy as np

from periphery_plots.timeline import (
    Hover,
    Pan,
    ResizeBoundary,
    TimeInterval,
    ToggleLock,
    Zone,
    ZoneKind,
    ZoneLayout,
    Zoom,
    new_layout,
)


# --- aggregation oracles ----------------------------------------------------


def histogram_oracle(values, lo, hi, bins):
    """Per-value loop under the shared edge rule; returns (counts, out)."""
    width = (hi - lo) / bins
    counts = [0] * bins
    out = 0
    for v in values:
        if v < lo or v > hi:
            out += 1
            continue
        idx = math.floor((v - lo) / width)
        idx = min(max(idx, 0), bins - 1)
        counts[idx] += 1
    return counts, out


def time_bin_oracle(timestamps, start, end, bins):
    width = (end - start) / bins
    counts = [0] * bins
    for t in timestamps:
        if t < start or t > end:
            continue
        idx = math.floor((t - start) / width)
        idx = min(max(idx, 0), bins - 1)
        counts[idx] += 1
    return counts


def density_oracle(timestamps, values, start, end, lo, hi, nx, ny):
    tw = (end - start) / nx
    vw = (hi - lo) / ny
    grid = [[0] * ny for _ in range(nx)]
    out = 0
    for t, v in zip(timestamps, values):
        if t < start or t > end or v < lo or v > hi:
            out += 1
            continue
        ti = min(max(math.floor((t - start) / tw), 0), nx - 1)
        vi = min(max(math.floor((v - lo) / vw), 0), ny - 1)
        grid[ti][vi] += 1
    return grid, out


def envelope_mean_oracle(values, window):
    """Exactly summed windowed means via math.fsum."""
    k = (window - 1) // 2
    n = len(values)
    means = []
    for i in range(n):
        seg = values[max(0, i - k):min(n, i + k + 1)]
        means.append(math.fsum(seg) / len(seg))
    return means


def quantile_oracle(values, p):
    """Linear interpolation between order statistics at p*(n-1)."""
    xs = sorted(values)
    pos = p * (len(xs) - 1)
    lo = math.floor(pos)
    hi = math.ceil(pos)
    if lo == hi:
        return xs[lo]
    return xs[lo] + (xs[hi] - xs[lo]) * (pos - lo)


def pan_clamp_oracle(layout: ZoneLayout, delta: int) -> tuple:
    """Largest-magnitude admissible pan, searched without the clamp formulas.

    Zone widths vary linearly in the pan delta, so the admissible set is
    an interval around zero: small magnitudes are scanned exhaustively
    and large ones bisected.
    """
    def boundaries_for(d):
        return tuple(
            t if layout.locks[j] else t + d for j, t in enumerate(layout.boundaries)
        )

    def valid(d):
        nb = boundaries_for(d)
        return all(
            nb[i + 1] - nb[i] >= layout.min_zone_width for i in range(len(nb) - 1)
        )

    if valid(delta):
        return boundaries_for(delta)
    step = 1 if delta > 0 else -1
    if abs(delta) <= 30_000:
        for d in range(delta, step, -step):
            if valid(d):
                return boundaries_for(d)
        return boundaries_for(0)
    lo, hi = 0, delta  # valid at lo, invalid at hi
    while abs(hi - lo) > 1:
        mid = (lo + hi) // 2
        if valid(mid):
            lo = mid
        else:
            hi = mid
    return boundaries_for(lo)


# --- scene helpers --------------------------------------------------------


def find_roles(node, out=None):
    """Map role -> node over a scene subtree (roles assumed unique)."""
    if out is None:
        out = {}
    role = getattr(node, "role", None)
    if role:
        out[role] = node
    for child in getattr(node, "children", ()):
        find_roles(child, out)
    return out


def iter_nodes(node):
    yield node
    for child in getattr(node, "children", ()):
        yield from iter_nodes(child)


# --- random generators --------------------------------------------------


def random_layout(rng: np.random.Generator) -> ZoneLayout:
    draws = rng.integers(0, 1 << 30, size=4).tolist()
    n = 3 + draws[0] % 5  # 3..7 zones
    min_w = 1 + draws[1] % 2000
    start = draws[2] % 2_000_000 - 1_000_000
    widths = (min_w + rng.integers(0, 50_000, size=n)).tolist()
    bounds = [start]
    for w in widths:
        bounds.append(bounds[-1] + w)
    focus = draws[3] % n
    zones = [
        Zone(ZoneKind.FOCUS if i == focus else ZoneKind.CONTEXT,
             TimeInterval(bounds[i], bounds[i + 1]))
        for i in range(n)
    ]
    return new_layout(zones, TimeInterval(bounds[0], bounds[-1]), min_w)


def random_events(rng: np.random.Generator, layout: ZoneLayout, count: int):
    """Pre-generated event stream; index ranges match the layout."""
    n_b = layout.zone_count + 1
    axis = layout.axis_domain
    span = axis.width
    raw = rng.random(size=(4, count))
    kinds = np.floor(raw[0] * 100).astype(np.int64).tolist()
    idxs = np.floor(raw[1] * n_b).astype(np.int64).tolist()
    times = np.floor(axis.start - span + raw[2] * 3 * span).astype(np.int64).tolist()
    factors = np.exp(np.log(0.2) + raw[3] * (np.log(5.0) - np.log(0.2))).tolist()
    deltas = np.floor(raw[3] * 2 * span - span).astype(np.int64).tolist()
    events = []
    append = events.append
    for i in range(count):
        k = kinds[i]
        if k < 35:
            append(ResizeBoundary(idxs[i], times[i]))
        elif k < 50:
            append(ToggleLock(idxs[i]))
        elif k < 70:
            append(Pan(deltas[i]))
        elif k < 90:
            append(Zoom(factors[i], times[i]))
        else:
            append(Hover(times[i] if k % 2 else None))
    return events


def run_event_fuzz(rng: np.random.Generator, n_sequences: int, max_len: int) -> int:
    """Apply random event sequences, checking every post-event layout.

    Raises AssertionError on the first violated invariant or moved
    locked boundary; returns the number of events applied. Kept outside
    the test modules so pytest's assertion rewriting stays out of the
    hot loop.
    """
    from periphery_plots.timeline import BoundaryLockedError, apply_event

    apply = apply_event
    rejected = BoundaryLockedError
    toggle_cls = ToggleLock
    total = 0
    lengths = rng.integers(1, max_len + 1, size=n_sequences).tolist()
    for length in lengths:
        layout = random_layout(rng)
        events = random_events(rng, layout, length)
        locked: tuple[int, ...] = ()
        for ev in events:
            prev = layout
            try:
                layout = apply(layout, ev)
            except rejected:
                total += 1  # rejected events leave the layout untouched
                continue
            layout.check_invariants()
            if type(ev) is toggle_cls:
                locked = tuple(j for j, on in enumerate(layout.locks) if on)
            else:
                pb, nb = prev.boundaries, layout.boundaries
                for j in locked:
                    if nb[j] != pb[j]:
                        raise AssertionError(
                            f"locked boundary {j} moved {pb[j]} -> {nb[j]} on {ev!r}"
                        )
                if layout.kinds is not prev.kinds:
                    raise AssertionError("event changed zone kinds")
            total += 1
    return total
