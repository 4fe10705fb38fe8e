"""Tests for the quantized blocks and the coarse retractions."""
import pytest

from construction.errors import CapExceededError, NotRealizedError, StageError
from construction.linf_core import integer_ball
from construction.net_blocks import build_blocks, build_chain, inverse_restriction, phi, psi
from data.reference_systems import P0_CARDINALITIES


class TestBlocks:
    def test_cardinalities(self, p0_chain):
        assert p0_chain.cardinalities() == P0_CARDINALITIES

    def test_first_block(self, p0_chain):
        assert p0_chain.stage(1).m_points == ((-2, 0, 0), (-1, 0, 0), (0, 0, 0), (1, 0, 0), (2, 0, 0))

    def test_shell_block(self, p0_chain):
        assert p0_chain.stage(1).c_points == ((-4, 0, 0), (-3, 0, 0), (3, 0, 0), (4, 0, 0))

    def test_restriction_is_bijective(self, p0_chain):
        blocks = p0_chain.stage(2)
        assert sorted(blocks.m_table) == integer_ball(2, 4)
        assert sorted(blocks.d_table) == integer_ball(2, 8)

    def test_blocks_are_nested(self, p0_chain):
        assert p0_chain.stage(1).d_set <= p0_chain.stage(2).m_set

    def test_birth_stage(self, p0_chain):
        assert p0_chain.birth_stage[(1, 0, 0)] == 1
        assert p0_chain.birth_stage[(3, 0, 0)] == 2
        assert p0_chain.birth_stage[(0, 1, 0)] == 2

    def test_realized_points(self, p0_chain):
        assert len(p0_chain.points) == 81
        assert p0_chain.contains((4, -4, 0))
        assert not p0_chain.contains((5, 0, 0))

    def test_cap(self, p0_system):
        with pytest.raises(CapExceededError) as info:
            build_blocks(p0_system, 1, None, cap=8)
        assert info.value.predicted == 9

    def test_stage_needs_previous(self, p0_system):
        with pytest.raises(StageError):
            build_blocks(p0_system, 2, None)

    def test_depth_out_of_range(self, p0_system):
        with pytest.raises(StageError):
            build_chain(p0_system, 4)

    def test_unrealized_stage(self, p0_chain):
        with pytest.raises(StageError):
            p0_chain.stage(3)


class TestInverseRestriction:
    def test_m_block(self, p0_chain):
        assert inverse_restriction(p0_chain.stage(2), (3, -1)) == (3, -1, 0)

    def test_d_block(self, p0_chain):
        assert inverse_restriction(p0_chain.stage(1), (4,), "D") == (4, 0, 0)

    def test_outside_m_block(self, p0_chain):
        with pytest.raises(NotRealizedError):
            inverse_restriction(p0_chain.stage(1), (4,))

    def test_unknown_block(self, p0_chain):
        with pytest.raises(ValueError):
            inverse_restriction(p0_chain.stage(1), (0,), "C")


class TestCoarseRetractions:
    def test_phi_truncates(self, p0_chain):
        assert phi(p0_chain, 1, (4, 3, 0)) == (2, 0, 0)
        assert phi(p0_chain, 2, (4, 3, 0)) == (4, 3, 0)

    def test_phi_identity_past_n_max(self, p0_chain):
        assert phi(p0_chain, 9, (-3, 2, 0)) == (-3, 2, 0)

    def test_phi_unrealized(self, p0_chain):
        with pytest.raises(NotRealizedError):
            phi(p0_chain, 1, (9, 9, 9))

    def test_psi_restricts_to_previous_d_block(self, p0_chain):
        assert psi(p0_chain, 2, (4, 2, 0)) == (4, 0, 0)
        assert psi(p0_chain, 2, (-1, -4, 0)) == (-1, 0, 0)

    def test_psi_is_retraction_onto_d(self, p0_chain):
        lower = p0_chain.stage(1).d_set
        for x in p0_chain.stage(2).m_points:
            y = psi(p0_chain, 2, x)
            assert y in lower
            if x in lower:
                assert y == x

    def test_psi_needs_stage_two(self, p0_chain):
        with pytest.raises(StageError):
            psi(p0_chain, 1, (0, 0, 0))
