"""Tests for the global order, the global retractions and the net transfer."""
from fractions import Fraction

import numpy as np
import pytest

from construction.basis_assembly import (
    NetEquivalence,
    ambient_sample,
    commutation_failures,
    extract_net,
    k_global,
    perturb,
    perturbation_grid,
    project_rho,
    retraction_tables,
    transfer_basis,
    varphi,
)
from construction.errors import CapExceededError, GridExhaustedError, NotRealizedError
from construction.linf_core import lipschitz_constants_of_tables, min_pairwise_distance, sup_distance
from data.reference_systems import P0_BOUNDARIES

F = Fraction


@pytest.fixture(scope="module")
def tables(p0):
    return retraction_tables(p0)


@pytest.fixture(scope="module")
def net(p0):
    return perturb(p0, extract_net(p0, 2))


class TestKGlobal:
    def test_reference_value(self):
        assert k_global(2) == 2240

    def test_small_lambda(self):
        assert k_global(1) == max(10 * 5 * 5, 25 * 20, 1)


class TestGlobalOrder:
    def test_origin_first(self, p0):
        assert p0.order.point(1) == (0, 0, 0)
        assert p0.order.points[1:5] == ((-2, 0, 0), (-1, 0, 0), (1, 0, 0), (2, 0, 0))

    def test_shell_block_follows(self, p0):
        assert p0.order.points[5:9] == ((-3, 0, 0), (3, 0, 0), (-4, 0, 0), (4, 0, 0))
        assert p0.order.point(10) == (-4, -1, 0)

    def test_boundaries(self, p0):
        assert p0.order.boundaries == P0_BOUNDARIES
        kinds = [(s.kind, s.stage, s.start, s.end) for s in p0.order.segments]
        assert kinds == [("M1", 1, 1, 5), ("C", 1, 6, 9), ("E", 2, 10, 81)]

    def test_segment_lookup(self, p0):
        assert p0.order.segment_of(5).kind == "M1"
        assert p0.order.segment_of(6).kind == "C"
        assert p0.order.segment_of(81).kind == "E"

    def test_index_round_trip(self, p0):
        for i in (1, 9, 10, 81):
            assert p0.order.index_of(p0.order.point(i)) == i

    def test_lookup_errors(self, p0):
        with pytest.raises(NotRealizedError):
            p0.order.index_of((9, 9, 9))
        with pytest.raises(ValueError):
            p0.order.point(0)

    def test_prefix(self, p0):
        assert len(p0.order.prefix(9)) == 9
        assert set(p0.order.prefix(9)) == p0.chain.stage(1).d_set


class TestGlobalRetractions:
    def test_first_block_goes_through_coarse_retraction(self, p0):
        assert varphi(p0, 4, (1, 1, 0)) == (1, 0, 0)
        assert varphi(p0, 3, (1, 1, 0)) == (0, 0, 0)

    def test_first_block_composes(self, p0):
        assert varphi(p0, 4, varphi(p0, 10, (1, 1, 0))) == varphi(p0, 4, (1, 1, 0))

    def test_shell_segment(self, p0):
        assert varphi(p0, 6, (4, 3, 0)) == (2, 0, 0)
        assert varphi(p0, 6, (-4, 3, 0)) == (-3, 0, 0)

    def test_fixes_prefix(self, p0):
        for i in (1, 5, 9, 40):
            for x in p0.order.prefix(i):
                assert varphi(p0, i, x) == x

    def test_tables(self, tables):
        assert tables.shape == (81, 81)
        assert not tables[0].any()
        assert np.array_equal(tables[80], np.arange(81))

    def test_images_stay_in_prefix(self, tables):
        for i in range(1, 82):
            assert tables[i - 1].max() < i

    def test_commutation(self, tables):
        assert commutation_failures(tables) == []

    def test_commutation_failure_detected(self, tables):
        broken = tables.copy()
        broken[3, 20] = 2
        assert commutation_failures(broken)

    def test_lipschitz_bound(self, p0, tables):
        constants = lipschitz_constants_of_tables(p0.order.points, tables)
        assert constants[-1] == 1
        assert max(constants) <= k_global(2)

    def test_table_cap(self, p0):
        with pytest.raises(CapExceededError):
            retraction_tables(p0, cap=100)


class TestNet:
    def test_rho_is_identity_for_zero_extension(self, p0):
        for m in p0.chain.points:
            assert project_rho(p0, m).values == m

    def test_rho_carries_rational_extension(self, affine_context):
        con = affine_context.construction
        assert project_rho(con, (1, 0, 0)).values == (1, F(1, 2), F(1, 4))
        assert project_rho(con, (2, 1, 0)).values == (2, 1, F(1, 2))

    def test_rho_displacement_on_affine(self, affine_context):
        con = affine_context.construction
        moved = 0
        for m in con.chain.points:
            rho = project_rho(con, m)
            assert sup_distance(rho, m) <= 1
            moved += rho.values != m
        assert moved > 0

    def test_greedy_clusters(self, p0):
        equiv = extract_net(p0, 2)
        assert len(equiv.clusters) == 9
        assert all(len(c) == 9 for c in equiv.clusters)
        assert equiv.representatives[0] == (-4, -4, 0)
        assert min_pairwise_distance(equiv.representatives) > 2

    def test_a_must_exceed_one(self, p0):
        with pytest.raises(ValueError):
            extract_net(p0, 1)

    def test_grid(self):
        grid = perturbation_grid(3)
        assert len(grid) == 27
        assert grid[0] == (0, 0, 0)
        assert len(set(grid)) == 27

    def test_perturbation(self, p0, net):
        assert len(net.mu) == 81
        assert len(set(net.mu.values())) == 81
        assert min_pairwise_distance(list(net.mu.values())) >= F(1, 2)
        assert net.distortion == net.forward * net.backward
        assert net.b(2) == 9

    def test_grid_exhausted(self, p0):
        with pytest.raises(GridExhaustedError) as excinfo:
            perturb(p0, extract_net(p0, 8))
        assert excinfo.value.available == 27
        assert excinfo.value.needed > 27

    def test_transfer(self, p0, tables, net):
        constants = lipschitz_constants_of_tables(p0.order.points, tables)
        transferred = transfer_basis(p0, net, tables, constants)
        assert transferred.points[0] == net.mu[(0, 0, 0)]
        assert transferred.tables is tables
        assert all(c <= transferred.bound for c in transferred.constants)
        assert len(transferred.prefix(5)) == 5

    def test_transfer_needs_perturbation(self, p0, tables):
        with pytest.raises(ValueError):
            transfer_basis(p0, extract_net(p0, 2), tables, [F(1)])

    def test_unperturbed_has_no_distortion(self):
        assert NetEquivalence(F(2), {}, (), ()).distortion is None


class TestAmbientSample:
    def test_full_grid(self, p0):
        sample = ambient_sample(p0, 20_000, 0)
        assert len(sample) == 17 * 17
        assert sample[0] == (-4, -4, 0)
        assert (F(1, 2), F(-7, 2), 0) in sample

    def test_capped_sample_is_seeded(self, p0):
        first = ambient_sample(p0, 10, 3)
        assert len(first) == 10
        assert first == ambient_sample(p0, 10, 3)
