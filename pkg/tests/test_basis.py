"""State enumeration and block partition."""

import numpy as np
import pytest

from src.basis import (
    LEVEL_EXCITED,
    BasisState,
    ClosureMode,
    enumerate_states,
    expected_coherent_dimension,
    operator_routing,
    parse_ket,
    partition_blocks,
    sector_charge,
)
from src.dynamics import build_system
from src.errors import RoutingError
from src.model import ClusterSpec, Coupling, RateConfig, validate
from src.operators import build_jump_operators, hamiltonian_matrix


def _spec(m, coupling="incoherent"):
    return validate(ClusterSpec(m=m, coupling=Coupling(coupling))).spec


def _partition(m, coupling="incoherent", closure=ClosureMode.DECAY, rates=None):
    config = validate(ClusterSpec(m=m, coupling=Coupling(coupling)), rates=rates or RateConfig())
    space = enumerate_states(config.spec, closure)
    operators = build_jump_operators(space, config.rates)
    return partition_blocks(space, hamiltonian_matrix(space, config.params), operators)


class TestEnumeration:
    def test_single_unit_space(self):
        space = enumerate_states(_spec(1))
        assert len(space) == 5
        assert [s.label() for s in space] == [
            "|0;0;0>", "|0;0;1>", "|0;0;2>", "|0;1;1>", "|1;0;0>",
        ]
        assert space.states[space.initial_index] == BasisState((0,), (0,), (LEVEL_EXCITED,))

    def test_incoherent_is_product(self):
        for m in (2, 3):
            assert len(enumerate_states(_spec(m))) == 5 ** m

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_coherent_closed_form(self, m):
        assert len(enumerate_states(_spec(m, "coherent"))) == expected_coherent_dimension(m)

    def test_coherent_pair_size(self):
        assert len(enumerate_states(_spec(2, "coherent"))) == 23
        assert expected_coherent_dimension(6) == 6075

    def test_sector_charge(self):
        spec = _spec(3, "coherent")
        assert sector_charge(BasisState((0,), (0,), (2, 2, 2)), spec) == (0, 0)
        assert sector_charge(BasisState((0,), (0,), (1, 2, 0)), spec) == (1, 1)
        assert sector_charge(BasisState((0,), (0,), (0, 2, 2)), spec) == (1, 0)

    def test_canonical_order(self):
        space = enumerate_states(_spec(2, "coherent"))
        assert list(space.states) == sorted(space.states)
        assert all(space.index[s] == i for i, s in enumerate(space.states))

    def test_pump_contains_decay(self):
        decay = enumerate_states(_spec(2))
        pump = enumerate_states(_spec(2), ClosureMode.PUMP)
        assert len(pump) > len(decay)
        assert set(decay.states) <= set(pump.states)
        assert all(max(s.p_hyd) <= 1 and max(s.p_dist) <= 1 for s in pump)

    def test_enumeration_is_deterministic(self):
        assert enumerate_states(_spec(3, "coherent")).states == enumerate_states(_spec(3, "coherent")).states

    def test_parse_ket(self):
        assert parse_ket("1201") == (1, 2, 0, 1)


class TestPartition:
    def test_single_unit_blocks(self):
        partition = _partition(1)
        assert [list(b) for b in partition.blocks] == [[0], [1], [2, 3, 4]]
        assert partition.summary() == {"org_dim": 5, "num_bls": 3, "max_dim_bl": 3,
                                       "memory_ratio": pytest.approx(11 / 25)}

    def test_blocks_cover_space_once(self):
        partition = _partition(3, "coherent")
        members = np.sort(np.concatenate(partition.blocks))
        assert np.array_equal(members, np.arange(partition.org_dim))
        assert [b[0] for b in partition.blocks] == sorted(b[0] for b in partition.blocks)

    def test_labels_are_conserved_charges(self):
        partition = _partition(2, "coherent")
        space = partition.space
        for label, members in zip(partition.labels, partition.blocks):
            assert {sector_charge(space.states[i], space.spec) for i in members} == {label}
        initial_block = partition.block_of[space.initial_index]
        assert partition.labels[initial_block] == (0, 0)
        assert partition.block_with_label((0, 0)) == [initial_block]

    def test_hamiltonian_never_crosses_blocks(self):
        partition = _partition(3)
        h = hamiltonian_matrix(partition.space, validate(ClusterSpec(m=3)).params).tocoo()
        assert np.all(partition.block_of[h.row] == partition.block_of[h.col])

    def test_every_leakage_has_one_target(self):
        partition = _partition(2, "coherent", ClosureMode.PUMP, RateConfig(mu_hyd=0.5, mu_dist=0.5))
        assert partition.routing
        assert partition.inflow_routing
        for (b, _), target in partition.routing.items():
            assert target is None or 0 <= target < partition.num_blocks

    def test_coherent_blocks_are_charge_sectors(self):
        partition = _partition(3, "coherent")
        assert partition.num_blocks == 10
        assert sorted(partition.labels) == [(d1, d2) for d1 in range(4) for d2 in range(4 - d1)]
        space = partition.space
        # zero-phonon kets without Hamiltonian partners share the (1, 1) block
        lone = [space.index[BasisState((0,), (0,), levels)] for levels in [(0, 1, 2), (1, 0, 2), (2, 1, 0)]]
        assert len({partition.block_of[i] for i in lone}) == 1
        assert partition.labels[partition.block_of[lone[0]]] == (1, 1)

    @pytest.mark.parametrize("m", [2, 3])
    @pytest.mark.parametrize("mu", [0.0, 0.4])
    def test_coherent_systems_build(self, config_factory, m, mu):
        system = build_system(config_factory(m=m, coupling="coherent", mu_hyd=mu, mu_dist=mu))
        partition = system.partition
        assert len(set(partition.labels)) == partition.num_blocks
        assert bool(partition.inflow_routing) == (mu > 0)
        members = np.sort(np.concatenate(partition.blocks))
        assert np.array_equal(members, np.arange(partition.org_dim))

    def test_coherent_hyd_decay_shifts_charge(self):
        partition = _partition(3, "coherent")
        hyd = next(op for op in build_jump_operators(partition.space, RateConfig()) if op.mode == "hyd")
        targets = 0
        for b, (d1, d2) in enumerate(partition.labels):
            target = partition.routing[(b, hyd.op_id)]
            if target is not None:
                assert partition.labels[target] == (d1 + 1, d2)
                targets += 1
        assert targets > 0
        initial = partition.block_of[partition.space.initial_index]
        assert partition.labels[partition.routing[(initial, hyd.op_id)]] == (1, 0)

    def test_routing_of_single_unit(self):
        partition = _partition(1)
        space = partition.space
        config = validate(ClusterSpec(m=1))
        operators = build_jump_operators(space, config.rates)
        hyd = next(op for op in operators if op.mode == "hyd")
        routing = operator_routing(partition, hyd)
        # leaking the hyd phonon of |1;0;0> lands in the bonded ground state
        assert routing[(2, hyd.op_id)] == 0
        assert routing[(0, hyd.op_id)] is None

    def test_inflow_needs_pump_closure(self):
        space = enumerate_states(_spec(1))
        with pytest.raises(RoutingError) as exc:
            build_jump_operators(space, RateConfig(mu_hyd=0.5))
        assert exc.value.code == "BLOCK_ROUTING_MISS"


class TestBlockStatistics:
    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_incoherent_blocks_factorize(self, m):
        summary = _partition(m).summary()
        assert summary["org_dim"] == 5 ** m
        assert summary["num_bls"] == 3 ** m
        assert summary["max_dim_bl"] == 3 ** m
        assert summary["memory_ratio"] == pytest.approx(11 ** m / 25 ** m)

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_coherent_one_block_per_charge(self, m):
        summary = _partition(m, "coherent").summary()
        assert summary["org_dim"] == expected_coherent_dimension(m)
        assert summary["num_bls"] == (m + 1) * (m + 2) // 2
        assert summary["max_dim_bl"] == 3 ** m

    @pytest.mark.slow
    def test_incoherent_six_units(self):
        summary = _partition(6).summary()
        assert (summary["org_dim"], summary["num_bls"], summary["max_dim_bl"]) == (15625, 729, 729)
        assert f"{100 * summary['memory_ratio']:.3f}%" == "0.726%"

    @pytest.mark.slow
    def test_coherent_six_units(self):
        summary = _partition(6, "coherent").summary()
        assert (summary["org_dim"], summary["num_bls"], summary["max_dim_bl"]) == (6075, 28, 729)
        assert f"{100 * summary['memory_ratio']:.3f}%" == "7.739%"
