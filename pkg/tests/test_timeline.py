import numpy as np
import pytest

from periphery_plots.timeline import (
    BoundaryLockedError,
    EmptyLayoutError,
    Hover,
    IndexOutOfRangeError,
    MultipleFocusError,
    NoFocusError,
    NotContiguousError,
    Pan,
    ResizeBoundary,
    TimeInterval,
    ToggleLock,
    Zone,
    ZoneKind,
    ZoneTooNarrowError,
    Zoom,
    apply_event,
    new_layout,
    pan,
    resize_boundary,
    toggle_lock,
    zone_intervals,
    zoom,
)

from helpers import pan_clamp_oracle, random_events, random_layout


def zones_cfc():
    return [
        Zone(ZoneKind.CONTEXT, TimeInterval(0, 10_000)),
        Zone(ZoneKind.FOCUS, TimeInterval(10_000, 20_000)),
        Zone(ZoneKind.CONTEXT, TimeInterval(20_000, 30_000)),
    ]


def layout_cfc(min_w=1000):
    return new_layout(zones_cfc(), TimeInterval(0, 30_000), min_w)


class TestNewLayout:
    def test_valid_construction(self):
        lay = layout_cfc()
        assert lay.boundaries == (0, 10_000, 20_000, 30_000)
        assert lay.locks == (False,) * 4
        assert lay.focus_index == 1

    def test_overlapping_zones_rejected(self):
        zs = [
            Zone(ZoneKind.FOCUS, TimeInterval(0, 10)),
            Zone(ZoneKind.CONTEXT, TimeInterval(5, 20)),
        ]
        with pytest.raises(NotContiguousError):
            new_layout(zs, TimeInterval(0, 20))

    def test_no_focus_rejected(self):
        zs = [
            Zone(ZoneKind.CONTEXT, TimeInterval(0, 10)),
            Zone(ZoneKind.CONTEXT, TimeInterval(10, 20)),
        ]
        with pytest.raises(NoFocusError):
            new_layout(zs, TimeInterval(0, 20))

    def test_multiple_focus_rejected(self):
        zs = [
            Zone(ZoneKind.FOCUS, TimeInterval(0, 10)),
            Zone(ZoneKind.FOCUS, TimeInterval(10, 20)),
        ]
        with pytest.raises(MultipleFocusError):
            new_layout(zs, TimeInterval(0, 20))

    def test_empty_rejected(self):
        with pytest.raises(EmptyLayoutError):
            new_layout([], TimeInterval(0, 20))

    def test_narrow_zone_rejected(self):
        with pytest.raises(ZoneTooNarrowError):
            new_layout(zones_cfc(), TimeInterval(0, 30_000), min_zone_width=20_000)

    def test_gap_rejected(self):
        zs = [
            Zone(ZoneKind.FOCUS, TimeInterval(0, 10)),
            Zone(ZoneKind.CONTEXT, TimeInterval(11, 20)),
        ]
        with pytest.raises(NotContiguousError):
            new_layout(zs, TimeInterval(0, 20))


class TestResize:
    def test_push_translates_right_neighbour(self):
        out = resize_boundary(layout_cfc(), 2, 25_000)
        assert out.boundaries == (0, 10_000, 25_000, 35_000)
        # the pushed context retained its width and left the axis domain
        assert out.boundaries[3] - out.boundaries[2] == 10_000
        assert out.boundaries[3] > out.axis_domain.end

    def test_lock_absorbs_displacement(self):
        lay = toggle_lock(layout_cfc(), 3)
        out = resize_boundary(lay, 2, 25_000)
        assert out.boundaries == (0, 10_000, 25_000, 30_000)

    def test_min_width_clamps_at_lock(self):
        lay = toggle_lock(layout_cfc(min_w=2000), 3)
        out = resize_boundary(lay, 2, 29_500)
        assert out.boundaries == (0, 10_000, 28_000, 30_000)

    def test_locked_handle_rejected(self):
        lay = toggle_lock(layout_cfc(), 3)
        with pytest.raises(BoundaryLockedError):
            resize_boundary(lay, 3, 28_000)

    def test_index_out_of_range(self):
        with pytest.raises(IndexOutOfRangeError):
            resize_boundary(layout_cfc(), 4, 1000)
        with pytest.raises(IndexOutOfRangeError):
            resize_boundary(layout_cfc(), -1, 1000)

    def test_drag_confined_to_axis_domain(self):
        out = resize_boundary(layout_cfc(), 2, 95_000)
        assert out.boundaries[2] == 30_000  # clamped at the axis end

    def test_leftward_drag_mirrors_push(self):
        out = resize_boundary(layout_cfc(), 1, 5_000)
        assert out.boundaries == (-5_000, 5_000, 20_000, 30_000)

    def test_push_chain_translates_interior_zones(self):
        zs = [
            Zone(ZoneKind.CONTEXT, TimeInterval(0, 10)),
            Zone(ZoneKind.FOCUS, TimeInterval(10, 20)),
            Zone(ZoneKind.CONTEXT, TimeInterval(20, 30)),
            Zone(ZoneKind.CONTEXT, TimeInterval(30, 40)),
        ]
        lay = toggle_lock(new_layout(zs, TimeInterval(0, 40)), 4)
        out = resize_boundary(lay, 1, 15)
        # zone between the drag and the lock translated rigidly; last zone absorbed
        assert out.boundaries == (0, 15, 25, 35, 40)

    def test_noop_when_absorber_full(self):
        lay = toggle_lock(layout_cfc(min_w=10_000), 3)
        out = resize_boundary(lay, 2, 25_000)
        assert out.boundaries == lay.boundaries


class TestToggleLock:
    def test_flip_preserves_geometry(self):
        lay = layout_cfc()
        out = toggle_lock(lay, 0)
        assert out.locks[0] is True
        assert out.boundaries == lay.boundaries

    def test_involution(self):
        lay = layout_cfc()
        assert toggle_lock(toggle_lock(lay, 2), 2) == lay

    def test_lock_then_resize_rejected(self):
        lay = toggle_lock(layout_cfc(), 3)
        with pytest.raises(BoundaryLockedError):
            resize_boundary(lay, 3, 28_000)

    def test_index_checked(self):
        with pytest.raises(IndexOutOfRangeError):
            toggle_lock(layout_cfc(), 9)


class TestPan:
    def test_rigid_translation(self):
        out = pan(layout_cfc(), 5000)
        assert out.boundaries == (5000, 15_000, 25_000, 35_000)

    def test_locked_boundary_stretches_neighbour(self):
        lay = toggle_lock(layout_cfc(), 0)
        out = pan(lay, 5000)
        assert out.boundaries == (0, 15_000, 25_000, 35_000)

    def test_clamped_against_locks(self):
        # Frozen from the brute-force clamp oracle below.
        lay = toggle_lock(toggle_lock(layout_cfc(), 0), 1)
        out = pan(lay, -20_000)
        expected = pan_clamp_oracle(lay, -20_000)
        assert expected == (0, 10_000, 11_000, 21_000)
        assert out.boundaries == expected

    def test_clamp_matches_oracle_on_random_layouts(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            lay = random_layout(rng)
            for b in range(lay.zone_count + 1):
                if rng.random() < 0.4:
                    lay = toggle_lock(lay, b)
            delta = int(rng.integers(-200_000, 200_000))
            if delta == 0:
                continue
            assert pan(lay, delta).boundaries == pan_clamp_oracle(lay, delta)

    def test_inverse_without_clamping(self):
        lay = layout_cfc()
        assert pan(pan(lay, 12_345), -12_345) == lay


class TestZoom:
    def test_affine_map(self):
        out = zoom(layout_cfc(), 2.0, 15_000)
        assert out.boundaries == (-15_000, 5_000, 25_000, 45_000)

    def test_identity_factor(self):
        lay = layout_cfc()
        assert zoom(lay, 1.0, 15_000) == lay

    def test_inverse_on_integral_boundaries(self):
        lay = layout_cfc()
        assert zoom(zoom(lay, 2.0, 15_000), 0.5, 15_000) == lay

    def test_zoom_in_clamped_by_min_width(self):
        out = zoom(layout_cfc(min_w=1000), 0.01, 15_000)
        widths = [out.boundaries[i + 1] - out.boundaries[i] for i in range(3)]
        assert all(w >= 1000 for w in widths)
        assert min(widths) == 1000  # clamped exactly to the feasible factor

    def test_locked_boundary_fixed(self):
        lay = toggle_lock(layout_cfc(), 2)
        out = zoom(lay, 1.5, 0)
        assert out.boundaries[2] == 20_000
        assert out.boundaries[0] == 0
        assert out.boundaries[1] == 15_000

    def test_rejects_nonpositive_factor(self):
        with pytest.raises(ValueError):
            zoom(layout_cfc(), 0.0, 0)


class TestZoneIntervals:
    def test_order_and_kinds(self):
        pairs = zone_intervals(layout_cfc())
        assert [k for k, _ in pairs] == [ZoneKind.CONTEXT, ZoneKind.FOCUS, ZoneKind.CONTEXT]
        assert pairs[1][1] == TimeInterval(10_000, 20_000)

    def test_single_zone(self):
        lay = new_layout([Zone(ZoneKind.FOCUS, TimeInterval(0, 10))], TimeInterval(0, 10))
        assert zone_intervals(lay) == [(ZoneKind.FOCUS, TimeInterval(0, 10))]

    def test_shifts_with_pan(self):
        before = zone_intervals(layout_cfc())
        after = zone_intervals(pan(layout_cfc(), 5000))
        for (_, b), (_, a) in zip(before, after):
            assert (a.start, a.end) == (b.start + 5000, b.end + 5000)


class TestProperties:
    def test_width_conservation_without_locks(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            lay = random_layout(rng)
            i = int(rng.integers(0, lay.zone_count + 1))
            t = int(rng.integers(lay.axis_domain.start, lay.axis_domain.end + 1))
            out = resize_boundary(lay, i, t)
            for z in range(lay.zone_count):
                if z in (i - 1, i):
                    continue
                w0 = lay.boundaries[z + 1] - lay.boundaries[z]
                w1 = out.boundaries[z + 1] - out.boundaries[z]
                assert w1 == w0

    def test_event_stream_preserves_invariants(self):
        rng = np.random.default_rng(13)
        for _ in range(150):
            lay = random_layout(rng)
            for ev in random_events(rng, lay, 40):
                prev = lay
                try:
                    lay = apply_event(lay, ev)
                except (BoundaryLockedError, IndexOutOfRangeError):
                    assert lay is prev
                    continue
                lay.check_invariants()
                assert lay.kinds == prev.kinds
                assert lay.zone_count == prev.zone_count
                if not isinstance(ev, ToggleLock):
                    assert lay.locks == prev.locks
                    for b, locked in enumerate(prev.locks):
                        if locked:
                            assert lay.boundaries[b] == prev.boundaries[b]

    def test_apply_event_dispatch(self):
        lay = layout_cfc()
        assert apply_event(lay, Pan(5000)) == pan(lay, 5000)
        assert apply_event(lay, ResizeBoundary(2, 25_000)) == resize_boundary(lay, 2, 25_000)
        assert apply_event(lay, ToggleLock(1)) == toggle_lock(lay, 1)
        assert apply_event(lay, Zoom(2.0, 15_000)) == zoom(lay, 2.0, 15_000)
        assert apply_event(lay, Hover(12_000)) == lay
