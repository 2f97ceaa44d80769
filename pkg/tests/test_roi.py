"""Cell rasterization and signal aggregation against brute-force oracles."""

import numpy as np
import pytest

from labpulse.color import LabFrame
from labpulse.errors import ConfigError, DegenerateCell, EmptyCell, LengthMismatch
from labpulse.roi import (
    CellSpec,
    LandmarkFrame,
    aggregate_cell,
    build_series,
    combine_series,
    default_cells,
    load_cells,
    rasterize_cell,
)

from oracles import rasterize_bruteforce


def lab_with_a(a_plane):
    a = np.asarray(a_plane, dtype=np.float64)
    px = np.zeros(a.shape + (3,))
    px[:, :, 1] = a
    return LabFrame(px)


def square_landmarks(x0, y0, x1, y1, width, height):
    """Four landmarks tracing a rectangle, normalized to frame size."""
    pts = np.array(
        [[x0 / width, y0 / height], [x1 / width, y0 / height], [x1 / width, y1 / height], [x0 / width, y1 / height]]
    )
    return LandmarkFrame(0, pts)


def random_convex_polygon(rng, n_vertices, width, height):
    angles = np.sort(rng.uniform(0, 2 * np.pi, n_vertices))
    radius = rng.uniform(0.2, 0.45)
    cx, cy = rng.uniform(0.3, 0.7, 2)
    xs = cx + radius * np.cos(angles)
    ys = cy + radius * np.sin(angles)
    return LandmarkFrame(0, np.column_stack([xs, ys]))


class TestRasterizeCell:
    def test_integer_aligned_square(self):
        lm = square_landmarks(0, 0, 2, 2, 8, 8)
        cell = CellSpec(0, (0, 1, 2, 3))
        assert rasterize_cell(cell, lm, 8, 8) == {(0, 0), (0, 1), (1, 0), (1, 1)}

    def test_collinear_triangle_is_degenerate(self):
        lm = LandmarkFrame(0, np.array([[0.1, 0.1], [0.5, 0.5], [0.3, 0.3]]))
        with pytest.raises(DegenerateCell):
            rasterize_cell(CellSpec(0, (0, 1, 2)), lm, 32, 32)

    def test_off_frame_polygon_is_degenerate(self):
        lm = LandmarkFrame(0, np.array([[1.5, 1.5], [1.8, 1.5], [1.65, 1.9]]))
        with pytest.raises(DegenerateCell):
            rasterize_cell(CellSpec(0, (0, 1, 2)), lm, 16, 16)

    def test_random_convex_polygons_match_bruteforce(self):
        rng = np.random.default_rng(21)
        cell = CellSpec(0, (0, 1, 2, 3, 4))
        for _ in range(25):
            lm = random_convex_polygon(rng, 5, 32, 32)
            got = rasterize_cell(cell, lm, 32, 32)
            want = rasterize_bruteforce(lm.points[:, 0] * 32, lm.points[:, 1] * 32, 32, 32)
            assert got == want

    def test_boundary_pixel_centers_count_as_inside(self):
        # Rectangle whose edges pass exactly through pixel centers.
        lm = square_landmarks(0.5, 0.5, 2.5, 2.5, 8, 8)
        got = rasterize_cell(CellSpec(0, (0, 1, 2, 3)), lm, 8, 8)
        assert got == {(x, y) for x in range(3) for y in range(3)}

    def test_bad_landmark_index(self):
        lm = square_landmarks(0, 0, 2, 2, 8, 8)
        with pytest.raises(ConfigError):
            rasterize_cell(CellSpec(0, (0, 1, 2, 9)), lm, 8, 8)


class TestAggregateCell:
    def test_single_pixel_absolute_value(self):
        lab = lab_with_a([[-3.0]])
        assert aggregate_cell(lab, {(0, 0)}) == 3.0

    def test_three_four_five(self):
        lab = lab_with_a([[3.0, 4.0]])
        assert aggregate_cell(lab, {(0, 0), (1, 0)}) == 5.0

    def test_random_pixels_match_direct_loop(self):
        rng = np.random.default_rng(3)
        a = rng.normal(0, 10, (8, 8))
        lab = lab_with_a(a)
        pixels = {(int(x), int(y)) for x, y in rng.integers(0, 8, (16, 2))}
        total = 0.0
        for x, y in pixels:
            total += a[y, x] ** 2
        assert aggregate_cell(lab, pixels) == pytest.approx(np.sqrt(total), rel=1e-12)

    def test_empty_set_raises(self):
        with pytest.raises(EmptyCell):
            aggregate_cell(lab_with_a([[1.0]]), set())

    def test_out_of_bounds_pixel_raises(self):
        with pytest.raises(ValueError):
            aggregate_cell(lab_with_a([[1.0]]), {(5, 5)})

    def test_absolute_homogeneity(self):
        rng = np.random.default_rng(4)
        a = rng.normal(0, 5, (6, 6))
        pixels = {(x, y) for x in range(6) for y in range(3)}
        for c in (0.0, 0.37, 2.0, 11.5):
            scaled = aggregate_cell(lab_with_a(c * a), pixels)
            base = aggregate_cell(lab_with_a(a), pixels)
            assert scaled == pytest.approx(c * base, rel=1e-12, abs=1e-12)

    def test_enumeration_order_invariance(self):
        rng = np.random.default_rng(5)
        a = rng.normal(0, 5, (6, 6))
        pixels = [(x, y) for x in range(6) for y in range(6)]
        shuffled = list(pixels)
        rng.shuffle(shuffled)
        assert aggregate_cell(lab_with_a(a), pixels) == aggregate_cell(lab_with_a(a), shuffled)

    def test_zero_pixel_contributes_nothing(self):
        a = np.zeros((4, 4))
        a[0, 0] = 3.0
        a[0, 1] = 4.0
        lab = lab_with_a(a)
        assert aggregate_cell(lab, {(0, 0), (1, 0)}) == aggregate_cell(lab, {(0, 0), (1, 0), (2, 2)})


class TestBuildSeries:
    CELL = CellSpec(0, (0, 1, 2, 3))

    def _frames(self, a_values, size=8):
        frames = []
        for v in a_values:
            frames.append(lab_with_a(np.full((size, size), v)))
        return frames

    def _landmarks(self, n):
        return [square_landmarks(1, 1, 5, 5, 8, 8) for _ in range(n)]

    def test_single_frame_equals_aggregate(self):
        frames = self._frames([2.5])
        lms = self._landmarks(1)
        series = build_series(frames, lms, [self.CELL], frame_rate=30.0, normalize_by_pixel_count=False)
        pixels = rasterize_cell(self.CELL, lms[0], 8, 8)
        assert len(series) == 1
        assert series[0].samples[0] == pytest.approx(aggregate_cell(frames[0], pixels), rel=1e-12)

    def test_constant_frames_give_constant_series(self):
        series = build_series(self._frames([1.5] * 10), self._landmarks(10), [self.CELL])
        assert np.all(series[0].samples == series[0].samples[0])

    def test_oscillating_frames_match_per_frame_oracle(self):
        values = 3.0 + 2.0 * np.sin(np.arange(30) / 3.0)
        frames = self._frames(values)
        lms = self._landmarks(30)
        series = build_series(frames, lms, [self.CELL], normalize_by_pixel_count=False)
        pixels = rasterize_cell(self.CELL, lms[0], 8, 8)
        expected = [aggregate_cell(f, pixels) for f in frames]
        np.testing.assert_allclose(series[0].samples, expected, rtol=1e-12)

    def test_normalization_divides_by_sqrt_count(self):
        frames = self._frames([2.0])
        lms = self._landmarks(1)
        raw = build_series(frames, lms, [self.CELL], normalize_by_pixel_count=False)[0].samples[0]
        norm = build_series(frames, lms, [self.CELL], normalize_by_pixel_count=True)[0].samples[0]
        count = len(rasterize_cell(self.CELL, lms[0], 8, 8))
        assert norm == pytest.approx(raw / np.sqrt(count), rel=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            build_series(self._frames([1, 2]), self._landmarks(3), [self.CELL])

    def test_missing_landmarks_hold_previous_value(self):
        frames = self._frames([1.0, 2.0, 3.0])
        lms = self._landmarks(3)
        lms[1] = None
        series = build_series(frames, lms, [self.CELL], normalize_by_pixel_count=True)
        assert series[0].samples[1] == series[0].samples[0]
        assert series[0].samples[2] != series[0].samples[1]

    def test_leading_gap_takes_first_valid_value(self):
        frames = self._frames([1.0, 2.0])
        lms = self._landmarks(2)
        lms[0] = None
        series = build_series(frames, lms, [self.CELL])
        assert series[0].samples[0] == series[0].samples[1]

    def test_never_valid_cell_raises(self):
        frames = self._frames([1.0, 2.0])
        with pytest.raises(DegenerateCell):
            build_series(frames, [None, None], [self.CELL])

    def test_no_cells_rejected(self):
        with pytest.raises(ConfigError):
            build_series(self._frames([1.0]), self._landmarks(1), [])

    def test_combine_is_elementwise_mean(self):
        frames = self._frames([1.0, 2.0])
        lms = self._landmarks(2)
        cells = [self.CELL, CellSpec(1, (0, 1, 2, 3))]
        series = build_series(frames, lms, cells)
        np.testing.assert_allclose(
            combine_series(series), (series[0].samples + series[1].samples) / 2.0
        )


class TestCellConfig:
    def test_default_cells_are_well_formed(self):
        cells = default_cells()
        assert len(cells) == 7
        for cell in cells:
            assert len(cell.vertex_landmark_indices) >= 3
            assert max(cell.vertex_landmark_indices) < 468

    def test_load_cells_roundtrip(self, tmp_path):
        path = tmp_path / "cells.json"
        path.write_text('[{"cell_id": 3, "landmarks": [0, 1, 2], "name": "t"}]')
        cells = load_cells(path)
        assert cells[0].cell_id == 3
        assert cells[0].vertex_landmark_indices == (0, 1, 2)

    def test_load_cells_rejects_bad_entries(self, tmp_path):
        path = tmp_path / "cells.json"
        path.write_text('[{"cell_id": 1, "landmarks": [0, 1]}]')
        with pytest.raises(ConfigError):
            load_cells(path)
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_cells(path)
