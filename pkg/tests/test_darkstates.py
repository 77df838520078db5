"""Exact dark-state kernels, the closed-form catalogue and their stationarity."""

import itertools

import numpy as np
import pytest

from src.darkstates import (
    DarkVector,
    collective_lowering,
    dark_basis,
    four_unit_catalog,
    in_span,
    known_dark_vectors,
    register_index,
    triad_vector,
    verify_dark,
)
from src.dynamics import BlockDensityMatrix, build_system, dark_population, initial_state, propagate


@pytest.fixture
def coherent_triple(config_factory):
    return build_system(config_factory(m=3, coupling="coherent"))


@pytest.fixture
def coherent_quad(config_factory):
    return build_system(config_factory(m=4, coupling="coherent"))


def _permuted(vector, order):
    mapping = {tuple(levels[p] for p in order): c for levels, c in vector.coefficients}
    return DarkVector.from_mapping(mapping)


class TestLowering:
    def test_register_index(self):
        assert register_index((0, 0, 0)) == 0
        assert register_index((1, 0, 0)) == 9
        assert register_index((2, 2, 2)) == 26

    def test_excited_unit_relaxes(self):
        ket = np.zeros(27, dtype=np.int64)
        ket[register_index((1, 2, 0))] = 1
        hyd = collective_lowering(3, "hyd") @ ket
        dist = collective_lowering(3, "dist") @ ket
        assert np.flatnonzero(hyd).tolist() == [register_index((1, 0, 0))]
        assert np.flatnonzero(dist).tolist() == [register_index((1, 1, 0))]

    def test_sum_mode(self):
        total = collective_lowering(2, "sum")
        assert (total != collective_lowering(2, "hyd") + collective_lowering(2, "dist")).nnz == 0
        # |22> has four relaxation paths
        assert total[:, register_index((2, 2))].sum() == 4


def _dense_dark_dimensions(m):
    """Kernel size of the stacked lowerings per excitation number, by numerical rank."""
    stacked = np.vstack([collective_lowering(m, mode).toarray() for mode in ("hyd", "dist")]).astype(float)
    excited = np.array([levels.count(2) for levels in itertools.product(range(3), repeat=m)])
    dims = {}
    for n2 in range(1, m + 1):
        columns = np.flatnonzero(excited == n2)
        dims[n2] = len(columns) - np.linalg.matrix_rank(stacked[:, columns])
    return dims


class TestKernel:
    def test_pair_has_no_dark_states(self):
        basis = dark_basis(2)
        assert basis.dimension == 0
        assert basis.vectors == []

    @pytest.mark.parametrize("m", [3, 4])
    def test_dimensions_match_dense_rank(self, m):
        assert dark_basis(m).dimensions() == _dense_dark_dimensions(m)

    def test_triple_kernel_is_the_triad(self):
        basis = dark_basis(3)
        assert basis.dimension == 1
        assert basis.dimensions() == {1: 1, 2: 0, 3: 0}
        assert basis.vectors[0].coefficients == triad_vector().coefficients
        assert basis.vectors[0].n2 == 1

    def test_four_unit_catalog_in_kernel(self):
        basis = dark_basis(4).vectors
        catalog = four_unit_catalog()
        assert len(catalog) == 11
        for vector in catalog:
            assert in_span(vector, basis), vector.name

    def test_kernel_closed_under_unit_permutation(self):
        basis = dark_basis(4).vectors
        for vector in basis:
            assert in_span(_permuted(vector, (3, 2, 1, 0)), basis)
            assert in_span(_permuted(vector, (1, 0, 2, 3)), basis)

    def test_non_dark_ket_not_in_span(self):
        ket = DarkVector.from_labels({"120": 1})
        assert not in_span(ket, dark_basis(3).vectors)

    def test_kernel_vectors_are_annihilated(self):
        for vector in dark_basis(4).vectors:
            register = vector.register_vector()
            assert not np.any(collective_lowering(4, "hyd") @ register)
            assert not np.any(collective_lowering(4, "dist") @ register)

    @pytest.mark.slow
    def test_five_unit_kernel(self):
        basis = dark_basis(5)
        assert basis.dimension > 0
        for vector in basis.vectors:
            register = vector.register_vector()
            assert not np.any(collective_lowering(5, "hyd") @ register)
            assert not np.any(collective_lowering(5, "dist") @ register)

    def test_unit_count_out_of_range(self):
        with pytest.raises(ValueError):
            dark_basis(7)

    def test_known_vectors(self):
        assert known_dark_vectors(2) == []
        assert len(known_dark_vectors(3)) == 1
        assert len(known_dark_vectors(4)) == 11


class TestVerification:
    def test_triad_is_dark(self, coherent_triple):
        report = verify_dark(triad_vector(), coherent_triple)
        assert report.passed
        assert report.hyd_residual == report.dist_residual == 0
        assert report.lindblad_residual <= 1e-12
        assert report.missing_kets == []

    def test_four_unit_catalog_is_dark(self, coherent_quad):
        for vector in four_unit_catalog():
            report = verify_dark(vector, coherent_quad)
            assert report.passed, vector.name
            assert report.lindblad_residual <= 1e-12

    def test_single_ket_fails(self, coherent_triple):
        report = verify_dark(DarkVector.from_labels({"120": 1}, "single"), coherent_triple)
        assert not report.passed
        assert report.hyd_residual == 1
        assert report.to_dict()["passed"] is False


class TestStationarity:
    def test_dark_state_does_not_move(self, coherent_triple):
        v, missing = triad_vector().space_vector(coherent_triple)
        assert missing == []
        rho = BlockDensityMatrix.from_vector(coherent_triple.layout, v)
        before = rho.data.copy()
        propagate(coherent_triple, rho, 1000, 0.1)
        assert np.max(np.abs(rho.data - before)) < 1e-9

    def test_dark_component_is_kept(self, coherent_triple):
        layout = coherent_triple.layout
        v, _ = triad_vector().space_vector(coherent_triple)
        mixed = BlockDensityMatrix(
            layout,
            0.8 * initial_state(layout).data + 0.2 * BlockDensityMatrix.from_vector(layout, v).data,
        )
        populations = [dark_population(mixed, v)]
        for _ in range(20):
            propagate(coherent_triple, mixed, 50, 0.1)
            populations.append(dark_population(mixed, v))
        assert populations[0] == pytest.approx(0.2)
        assert np.all(np.diff(populations) >= -1e-9)
        assert min(populations) >= 0.2 - 1e-9
