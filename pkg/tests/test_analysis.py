"""Inflow sweeps, dividing lines and coupling comparisons."""

import numpy as np
import pytest

from src.analysis import (
    HeatmapData,
    classify_regions,
    coherence_effect,
    compare_coherence,
    contour_lines,
    coupling_variants,
    extract_contours,
    heatmap_summary,
    inflow_axis,
    sweep_inflow,
    sweep_single_inflow,
)
from src.dynamics import steady_state
from src.errors import ValidationError


def _heatmap(z, mu_hyd=None, mu_dist=None, coupling="incoherent"):
    """Single-unit heatmap with P1 = z."""
    z = np.asarray(z, dtype=float)
    mu_hyd = np.linspace(0.0, 0.9, z.shape[1]) if mu_hyd is None else np.asarray(mu_hyd)
    mu_dist = np.linspace(0.0, 0.9, z.shape[0]) if mu_dist is None else np.asarray(mu_dist)
    return HeatmapData(
        m=1,
        coupling=coupling,
        mu_hyd=mu_hyd,
        mu_dist=mu_dist,
        values=np.stack([1.0 - z, z], axis=-1),
        converged=np.ones(z.shape, dtype=bool),
        distance=np.zeros(z.shape),
    )


class TestContourLines:
    def test_constant_grid_has_no_lines(self):
        assert contour_lines([0, 1, 2], [0, 1], np.full((2, 3), 0.3), 0.5) == []

    def test_horizontal_line(self):
        lines = contour_lines([0, 1, 2], [0, 1], [[0, 0, 0], [1, 1, 1]], 0.5)
        assert len(lines) == 1
        assert np.allclose(lines[0], [[0, 0.5], [1, 0.5], [2, 0.5]])

    def test_saddle_uses_centre_value(self):
        lines = contour_lines([0, 1], [0, 1], [[1, 0], [0, 1]], 0.5)
        assert len(lines) == 2
        assert np.allclose(lines[0], [[0.5, 0], [1, 0.5]])
        assert np.allclose(lines[1], [[0.5, 1], [0, 0.5]])

    def test_closed_loop_repeats_first_point(self):
        z = np.zeros((3, 3))
        z[1, 1] = 1.0
        lines = contour_lines([0, 1, 2], [0, 1, 2], z, 0.5)
        assert len(lines) == 1
        loop = lines[0]
        assert len(loop) == 5
        assert np.array_equal(loop[0], loop[-1])

    def test_bilinear_field_is_exact(self):
        x = y = np.linspace(0.0, 1.0, 5)
        z = np.outer(y, x)
        lines = contour_lines(x, y, z, 0.3)
        assert len(lines) == 1
        points = lines[0]
        assert np.max(np.abs(points[:, 0] * points[:, 1] - 0.3)) < 1e-12

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            contour_lines([0, 1], [0, 1, 2], np.zeros((2, 2)), 0.5)


class TestRegions:
    def test_levels_split_regions(self):
        heatmap = _heatmap([[0.05, 0.1, 0.5, 0.95]], mu_dist=[0.0])
        assert classify_regions(heatmap).tolist() == [[1, 2, 3, 4]]

    def test_bad_levels(self):
        heatmap = _heatmap(np.zeros((2, 2)))
        with pytest.raises(ValidationError) as exc:
            extract_contours(heatmap, levels=[0.5, 1.2])
        assert exc.value.code == "LEVEL_OUT_OF_RANGE"

    def test_out_of_range_level_gives_no_lines(self):
        heatmap = _heatmap([[0.2, 0.3], [0.3, 0.4]])
        contours = extract_contours(heatmap)
        assert contours.polylines(0.9) == []
        assert contours.polylines(0.1) == []
        assert [entry["level"] for entry in contours.to_json()] == [0.1, 0.5, 0.9]


class TestCoherenceEffect:
    def test_small_difference_is_insignificant(self):
        z = np.array([[0.1, 0.4], [0.5, 0.9]])
        effect = coherence_effect(_heatmap(z), _heatmap(z + 0.01, coupling="coherent"))
        assert effect.max_difference == pytest.approx(0.01)
        assert effect.max_step_variation == pytest.approx(0.5)
        assert effect.insignificant

    def test_large_difference_is_significant(self):
        z = np.array([[0.5, 0.5], [0.5, 0.6]])
        effect = coherence_effect(_heatmap(z), _heatmap(z - 0.3, coupling="coherent"))
        assert not effect.insignificant
        assert effect.to_dict()["k"] == 1

    def test_axes_must_match(self):
        z = np.zeros((2, 2))
        with pytest.raises(ValidationError) as exc:
            coherence_effect(_heatmap(z), _heatmap(np.zeros((3, 3))))
        assert exc.value.code == "GRID_MISMATCH"


class TestSweepChecks:
    def test_axis(self):
        assert np.allclose(inflow_axis(3, 0.9), [0.0, 0.45, 0.9])

    def test_axis_rejects_bad_values(self):
        with pytest.raises(ValidationError) as exc:
            inflow_axis(1, 1.0)
        assert set(exc.value.codes) == {"GRID_TOO_SMALL", "MU_OUT_OF_RANGE"}

    def test_sweep_needs_dissipation(self, config_factory):
        with pytest.raises(ValidationError) as exc:
            sweep_inflow(config_factory(m=1, gamma=0.0), grid=2)
        assert exc.value.code == "NO_DISSIPATION"

    def test_unknown_mode(self, single_unit):
        with pytest.raises(ValidationError) as exc:
            sweep_single_inflow(single_unit, mode="both")
        assert exc.value.code == "UNKNOWN_MODE"

    def test_target_out_of_range(self, single_unit):
        with pytest.raises(ValidationError) as exc:
            sweep_inflow(single_unit, grid=2, target=2)
        assert exc.value.code == "TARGET_OUT_OF_RANGE"


class TestSingleUnitSweep:
    @pytest.fixture
    def heatmap(self, single_unit):
        return sweep_inflow(single_unit, grid=11)

    def test_shape_and_convergence(self, heatmap):
        assert heatmap.shape == (11, 11)
        assert heatmap.values.shape == (11, 11, 2)
        assert heatmap.all_converged
        assert np.allclose(heatmap.values.sum(axis=-1), 1.0)

    def test_bonding_monotone_in_inflow(self, heatmap):
        p1 = heatmap.grid(1)
        # rows run along mu_dist, columns along mu_hyd
        assert np.all(np.diff(p1, axis=1) <= 1e-6)
        assert np.all(np.diff(p1, axis=0) >= -1e-6)

    def test_origin_matches_no_inflow(self, heatmap, single_unit):
        reference = steady_state(single_unit)
        assert np.allclose(heatmap.values[0, 0], reference.distribution, atol=1e-6)

    def test_frame_and_summary(self, heatmap):
        frame = heatmap.to_frame()
        assert list(frame.columns) == ["mu_hyd", "mu_dist", "P0", "P1", "converged"]
        assert len(frame) == 121
        # mu_hyd varies fastest
        assert frame["mu_hyd"].iloc[1] == pytest.approx(0.095)
        assert frame["mu_dist"].iloc[1] == 0.0
        summary = heatmap_summary(heatmap)
        assert summary["converged"] == 121
        assert summary["corners"]["(0,0)"] == pytest.approx(0.5, abs=1e-4)

    def test_contours_and_regions(self, heatmap):
        contours = extract_contours(heatmap)
        assert contours.count() >= 1
        for level in contours.levels:
            for line in contours.polylines(level):
                assert np.all((line >= 0.0) & (line <= 0.95 + 1e-12))
        regions = classify_regions(heatmap)
        assert regions.shape == (11, 11)
        assert regions.min() >= 1 and regions.max() <= 4

    def test_distortion_inflow_bonds(self, single_unit):
        curve = sweep_single_inflow(single_unit, mode="dist", grid=10, mu_max=0.9)
        assert curve.mu[-1] == pytest.approx(0.9)
        assert curve.probability(1)[-1] >= 0.9
        assert list(curve.to_frame().columns) == ["mu_dist", "P0", "P1", "converged"]


class TestPairSweep:
    def test_pair_monotonicity(self, config_factory):
        heatmap = sweep_inflow(config_factory(m=2), grid=6, target=2)
        p2, p0 = heatmap.grid(2), heatmap.grid(0)
        assert np.all(np.diff(p2, axis=0) >= -1e-6)
        assert np.all(np.diff(p2, axis=1) <= 1e-6)
        assert np.all(np.diff(p0, axis=1) >= -1e-6)
        assert np.all(np.diff(p0, axis=0) <= 1e-6)


class TestSweepExecution:
    def test_worker_count_invariance(self, single_unit):
        one = sweep_inflow(single_unit, grid=4, workers=1)
        many = sweep_inflow(single_unit, grid=4, workers=3)
        assert np.array_equal(one.values, many.values)
        assert np.array_equal(one.converged, many.converged)

    def test_cache_returns_stored_cells(self, single_unit, db_path):
        first = sweep_inflow(single_unit, grid=3, cache=db_path)
        second = sweep_inflow(single_unit, grid=3, cache=db_path)
        assert np.array_equal(first.values, second.values)
        assert np.array_equal(first.converged, second.converged)


class TestCoherenceComparison:
    def test_needs_two_units(self, single_unit):
        with pytest.raises(ValidationError) as exc:
            coupling_variants(single_unit)
        assert exc.value.code == "COHERENT_REQUIRES_M_GE_2"

    def test_variants_reset_caps(self, config_factory):
        incoherent, coherent = coupling_variants(config_factory(m=3, coupling="coherent"))
        assert incoherent.spec.phonon_cap_hyd == 1
        assert coherent.spec.phonon_cap_hyd == 3

    @pytest.mark.slow
    @pytest.mark.parametrize("m, expected", [(2, ["-", "+", "-"]), (3, ["-", "+", "+", "-"])])
    def test_shared_modes_favour_mixed_bonding(self, config_factory, m, expected):
        comparison = compare_coherence(config_factory(m=m, dt=0.05))
        assert comparison.converged
        assert comparison.signs() == expected
        assert np.all(np.abs(comparison.differences) > 1e-4)

    @pytest.mark.slow
    def test_four_units_full_column(self, config_factory):
        comparison = compare_coherence(config_factory(m=4, dt=0.05))
        assert comparison.converged
        # trapped excited units break the k <-> m-k mirror
        assert comparison.signs() == ["-", "+", "+", "-", "-"]

    def test_pair_comparison_runs(self, config_factory):
        comparison = compare_coherence(config_factory(m=2, mu_hyd=0.3, mu_dist=0.3), method="direct")
        assert comparison.coherent.method == "direct"
        assert len(comparison.differences) == 3
        assert comparison.coherent.distribution.sum() == pytest.approx(1.0)
        assert comparison.to_dict()["signs"] == comparison.signs()
