"""Tests for exact sup-norm vectors, lattice enumeration and Lipschitz constants."""
from fractions import Fraction

import pytest

from construction.errors import StageError
from construction.linf_core import (
    QVec,
    StageChain,
    as_fraction,
    covering_radius,
    distance_matrix,
    entire_part,
    integer_ball,
    integer_shell,
    join,
    lipschitz_constant,
    lipschitz_constant_points,
    lipschitz_constants_of_tables,
    min_pairwise_distance,
    predicted_ball_size,
    quantize,
    restrict,
    sup_distance,
    sup_norm,
    truncate,
)

F = Fraction


class TestAsFraction:
    def test_accepts_exact_values(self):
        assert as_fraction(3) == F(3)
        assert as_fraction("7/4") == F(7, 4)
        assert as_fraction(F(-1, 3)) == F(-1, 3)

    def test_refuses_floats_and_bools(self):
        with pytest.raises(TypeError):
            as_fraction(0.5)
        with pytest.raises(TypeError):
            as_fraction(True)

    def test_refuses_garbage_strings(self):
        with pytest.raises(ValueError):
            as_fraction("one half")


class TestStageChain:
    def test_sizes_and_deltas(self):
        chain = StageChain((1, 2, 3))
        assert chain.n_max == 3
        assert chain.dimension == 3
        assert list(chain.gamma(2)) == [0, 1]
        assert list(chain.delta(1)) == [0]
        assert list(chain.delta(3)) == [2]

    def test_frozen_past_last_stage(self):
        chain = StageChain((1, 2, 3))
        assert chain.size(7) == 3
        assert list(chain.delta(4)) == []

    def test_stage_of(self):
        chain = StageChain((1, 3, 4))
        assert [chain.stage_of(i) for i in range(4)] == [1, 2, 2, 3]

    def test_rejects_non_increasing_sizes(self):
        with pytest.raises(ValueError):
            StageChain((2, 2))

    def test_rejects_stage_zero(self):
        with pytest.raises(StageError):
            StageChain((1, 2)).size(0)


class TestQVec:
    def test_missing_coordinates_read_as_zero(self):
        v = QVec.from_mapping({2: F(1, 2)})
        assert v[0] == 0
        assert v[2] == F(1, 2)

    def test_support_is_sorted(self):
        v = QVec.on((3, 1), (5, 7))
        assert v.support == (1, 3)
        assert v.values == (F(7), F(5))

    def test_duplicate_support_rejected(self):
        with pytest.raises(ValueError):
            QVec.on((1, 1), (0, 0))

    def test_arithmetic_and_norm(self):
        a = QVec.from_point((1, F(-5, 2)))
        b = QVec.from_mapping({1: 1, 2: 3})
        assert (a + b).as_dict() == {0: 1, 1: F(-3, 2), 2: 3}
        assert (a - b).sup_norm() == F(7, 2)

    def test_to_point_needs_integers(self):
        assert QVec.from_point((2, -1)).to_point() == (2, -1)
        with pytest.raises(ValueError):
            QVec.from_point((F(1, 2),)).to_point()


class TestOperators:
    def test_entire_part_rounds_toward_zero(self):
        assert entire_part(F(7, 4)) == 1
        assert entire_part(F(-9, 4)) == -2
        assert entire_part(F(-1, 2)) == 0

    def test_quantize(self):
        v = quantize(QVec.from_point((F(7, 4), F(-9, 4), F(1, 2))))
        assert v.values == (1, -2, 0)

    def test_truncate(self):
        assert truncate(QVec.from_point((3, -5)), 4).values == (3, -4)

    def test_truncate_rejects_negative_radius(self):
        with pytest.raises(ValueError):
            truncate(QVec.from_point((1,)), -1)

    def test_restrict_and_join(self):
        chain = StageChain((1, 2, 3))
        v = QVec.from_point((4, 5, 6))
        low = restrict(v, 2, chain)
        assert low.as_dict() == {0: 4, 1: 5}
        assert join(low, QVec.from_mapping({2: 6})) == v

    def test_restrict_stage_out_of_range(self):
        with pytest.raises(StageError):
            restrict(QVec.from_point((1,)), 4, StageChain((1, 2, 3)))

    def test_join_overlap(self):
        with pytest.raises(ValueError):
            join(QVec.from_point((1,)), QVec.from_point((2,)))

    def test_sup_metric(self):
        assert sup_norm((F(-3, 2), 1)) == F(3, 2)
        assert sup_distance((0, 0), (1, -3)) == 3
        with pytest.raises(ValueError):
            sup_distance((0,), (0, 0))


class TestLattice:
    def test_ball_is_lexicographic(self):
        ball = integer_ball(2, 1)
        assert len(ball) == predicted_ball_size(2, 1) == 9
        assert ball[0] == (-1, -1)
        assert ball == sorted(ball)

    def test_shell(self):
        shell = integer_shell(1, 3)
        assert shell == [(-3,), (3,)]
        assert len(integer_shell(2, 2)) == 25 - 9

    def test_negative_radius(self):
        with pytest.raises(ValueError):
            integer_ball(2, -1)


class TestLipschitz:
    table = [((0,), (0,)), ((1,), (2,)), ((3,), (2,))]

    def test_pairwise_constant(self):
        assert lipschitz_constant(self.table) == 2

    def test_threaded_matches_serial(self):
        assert lipschitz_constant(self.table, workers=3) == lipschitz_constant(self.table)

    def test_single_point_is_zero(self):
        assert lipschitz_constant([((0,), (5,))]) == 0

    def test_coincident_points(self):
        with pytest.raises(ValueError):
            lipschitz_constant([((1,), (0,)), ((1,), (2,))])

    def test_vectorized_agrees(self):
        domain = [p for p, _ in self.table]
        image = [q for _, q in self.table]
        assert lipschitz_constant_points(domain, image) == 2

    def test_vectorized_rational_coordinates(self):
        domain = [(F(0),), (F(1, 2),), (F(3, 2),)]
        image = [(0,), (1,), (F(5, 4),)]
        assert lipschitz_constant_points(domain, image, workers=2) == 2

    def test_near_tie_resolved_exactly(self):
        # both stretched pairs have ratio 1.0 in floating point
        big = 10**17
        domain = [(0, 0), (big, 0), (0, 3 * big), (big - 1, 3 * big)]
        image = [(0, 0), (big + 1, 0), (0, 3 * big), (big, 3 * big)]
        assert lipschitz_constant_points(domain, image) == F(big, big - 1)
        assert lipschitz_constant(list(zip(domain, image))) == F(big, big - 1)

    def test_tables(self):
        points = [(0,), (1,), (3,)]
        identity, collapse = [0, 1, 2], [0, 0, 0]
        to_far = [0, 2, 2]
        assert lipschitz_constants_of_tables(points, [identity, collapse, to_far]) == [1, 0, 3]

    def test_distance_matrix_scaled(self):
        dist, denominator = distance_matrix([(F(1, 2),), (F(3, 2),)])
        assert denominator == 2
        assert dist.tolist() == [[0, 2], [2, 0]]


class TestCertificates:
    def test_min_pairwise_distance(self):
        assert min_pairwise_distance([(0, 0), (2, 1), (F(5, 2), 1)]) == F(1, 2)
        assert min_pairwise_distance([(0,)]) is None

    def test_covering_radius(self):
        radius, worst = covering_radius([(0,), (3,), (F(7, 2),)], [(0,), (4,)])
        assert radius == 1
        assert worst == 1

    def test_covering_radius_needs_centers(self):
        with pytest.raises(ValueError):
            covering_radius([(0,)], [])
