import math
import warnings
import unittest
from fractions import Fraction

import pytest
from parameterized import parameterized, param

from birational_dynamics_tools.heights import (
    c_sequence,
    canonical_height,
    finite_place_constant,
    height_tail_bound,
    hprime_batch,
    hprime_recursion_check,
    lee_admissible,
    lee_defect,
    lee_kappa,
    lee_scan,
    lift_bound_constant,
    naive_height,
    sample_points,
    total_c1_constant,
)
from birational_dynamics_tools.projcore import cremona_pair, henon_pair, normalize
from birational_dynamics_tools.projcore.birational import Direction
from birational_dynamics_tools.utils import IndeterminateEvaluation, SpecificationError

HENON_ORIGIN_HEIGHT = 0.229116


class TestNaiveHeights(unittest.TestCase):
    @parameterized.expand(
        [
            param([1, 1, 1], 0.0),
            param([2, 4, 6], math.log(3)),
            param([Fraction(1, 2), 1, 0], math.log(2)),
            param([-7, 3, 5], math.log(7)),
        ]
    )
    def test_naive_height(self, coords, expected):
        assert naive_height(coords) == pytest.approx(expected)

    def test_henon_constants(self):
        F = henon_pair().forward
        assert lift_bound_constant(F) == pytest.approx(math.log(3) / 2)
        assert finite_place_constant(F) == 0.0
        assert total_c1_constant(F) == pytest.approx(math.log(3) / 2)

    def test_cleared_denominators_enter_the_lift_constant(self):
        F = henon_pair(a=Fraction(1, 2)).forward
        assert lift_bound_constant(F) == pytest.approx(math.log(6) / 2)

    def test_tail_bound(self):
        assert height_tail_bound(math.log(3) / 2, 2, 12) == pytest.approx(math.log(3) / 2 / 2**11)

    def test_tail_bound_needs_degree_two(self):
        with self.assertRaises(AssertionError):
            height_tail_bound(1.0, 1, 5)


class TestCanonicalHeights(unittest.TestCase):
    def test_henon_origin(self):
        estimate = canonical_height(henon_pair(), normalize([0, 0, 1]), direction="plus", cutoff_N=12)
        assert estimate.direction is Direction.FORWARD
        assert estimate.c1_constant == pytest.approx(math.log(3) / 2)
        assert abs(estimate.value - HENON_ORIGIN_HEIGHT) <= 2 * estimate.tail_bound
        assert len(estimate.sequence) == 13

    def test_increments_are_bounded(self):
        estimate = canonical_height(henon_pair(), normalize([0, 0, 1]), cutoff_N=12)
        for n in range(12):
            increment = estimate.sequence[n + 1] - estimate.sequence[n]
            assert increment <= estimate.c1_constant * 2.0**-n + 1e-12, f"step {n}: {increment}"

    def test_last_delta_is_below_tail_bound(self):
        estimate = canonical_height(henon_pair(), normalize([0, 0, 1]), cutoff_N=12)
        assert estimate.last_delta <= 2 * estimate.tail_bound

    def test_minus_direction(self):
        estimate = canonical_height(henon_pair(), normalize([1, 2, 1]), direction="minus", cutoff_N=8)
        assert estimate.direction is Direction.BACKWARD
        assert estimate.value > 0
        assert estimate.to_dict()["direction"] == "backward"

    def test_fixed_point_of_cremona_has_height_zero(self):
        estimate = canonical_height(cremona_pair(), normalize([1, 1, 1]), cutoff_N=6)
        assert estimate.value == 0.0

    def test_orbit_through_indeterminacy(self):
        with self.assertRaises(IndeterminateEvaluation) as context:
            canonical_height(henon_pair(), normalize([0, 1, 0]), cutoff_N=4)
        assert context.exception.step == 0


class TestLeeScan(unittest.TestCase):
    @parameterized.expand(
        [
            param([1, 2, 1], 0.75 * math.log(2)),
            param([2, 1, 1], math.log(6) / 2 - 1.25 * math.log(2)),
        ]
    )
    def test_lee_defect_at_point(self, coords, expected):
        assert lee_defect(henon_pair(), normalize(coords)) == pytest.approx(expected)

    def test_lee_defect_example_value(self):
        assert lee_defect(henon_pair(), normalize([2, 1, 1])) == pytest.approx(0.0294, abs=1e-4)

    def test_admissible_points_avoid_the_line_at_infinity(self):
        pair = henon_pair()
        assert lee_admissible(pair, normalize([2, 1, 1]))
        assert not lee_admissible(pair, normalize([3, 5, 0]))
        assert not lee_admissible(pair, normalize([0, 1, 0]))

    def test_scan_of_explicit_points(self):
        points = [normalize([1, 2, 1]), normalize([0, 1, 0])]
        with self.assertWarns(UserWarning):
            report = lee_scan(henon_pair(), points=points, validate=False)
        assert report.skipped == 1
        assert report.sample_size == 1
        assert report.min_defect == pytest.approx(0.75 * math.log(2))
        assert report.estimated_C == 0.0

    def test_random_scan(self):
        report = lee_scan(henon_pair(), count=40, bound=10, seed=3)
        table = report.to_table()
        assert all(not point.endswith(":0]") for point in table["point"])
        assert list(table.columns) == ["point", "h", "h_f", "h_finv", "defect"]
        assert len(table) == report.sample_size
        assert report.min_defect == pytest.approx(table["defect"].min())
        assert math.isfinite(report.estimated_C)
        assert report.estimated_C >= 0.0

    def test_scan_refuses_invalid_pair(self):
        pair = henon_pair()
        broken = type(pair)(
            forward=pair.forward,
            backward=henon_pair(a=2).backward,
            s=1,
            ind_forward=pair.ind_forward,
            ind_backward=pair.ind_backward,
        )
        with self.assertRaisesRegex(SpecificationError, "fails validation"):
            lee_scan(broken, count=5)


class TestShiftedHeights(unittest.TestCase):
    def test_kappa(self):
        assert lee_kappa(C=1.0, d=2, delta=2) == pytest.approx(-4.0)
        assert lee_kappa(C=0.0, d=2, delta=2) == 0.0

    def test_kappa_undefined_for_linear_maps(self):
        with self.assertRaises(AssertionError):
            lee_kappa(C=1.0, d=1, delta=2)

    def test_c_sequence(self):
        c = c_sequence(4, 2)
        assert c == [1, Fraction(5, 4), Fraction(17, 16)]
        assert c[1] / c[0] == Fraction(5, 4)
        assert c[2] / c[1] == Fraction(17, 20)

    def test_recursion_without_shift(self):
        report = hprime_recursion_check(henon_pair(), normalize([1, 2, 1]), N=4, C=0.0)
        assert report.kappa == 0.0
        assert report.D == 4
        assert len(report.values) == 5
        assert report.values[0] == pytest.approx(math.log(2))
        assert report.values[1] == pytest.approx(2 * math.log(2))
        assert report.observed_ratios[0] == pytest.approx(2.0)
        assert report.required_ratios == [Fraction(5, 4), Fraction(17, 20), Fraction(65, 68), Fraction(257, 260)]
        assert report.final_bound == pytest.approx(math.log(2) * 257 / 256)
        assert report.to_dict()["required_ratios"][0] == "5/4"
        assert report.step_holds[0]

    def test_recursion_needs_defined_orbit(self):
        with self.assertRaises(IndeterminateEvaluation):
            hprime_recursion_check(henon_pair(), normalize([0, 1, 0]), N=3)

    def test_batch_matches_single_runs(self):
        pair = henon_pair()
        points = [normalize([1, 2, 1]), normalize([3, -1, 2])]
        reports = hprime_batch(pair, points, N=3)
        assert [report.values for report in reports] == [
            hprime_recursion_check(pair, point, N=3).values for point in points
        ]

    def test_batch_with_process_pool(self):
        pair = henon_pair()
        points = [normalize([1, 2, 1]), normalize([3, -1, 2]), normalize([5, 4, 3])]
        serial = hprime_batch(pair, points, N=3)
        parallel = hprime_batch(pair, points, N=3, workers=2)
        assert [report.values for report in parallel] == [report.values for report in serial]
        assert [report.point for report in parallel] == points

    def test_scanned_constant_carries_the_recursion(self):
        pair = henon_pair()
        scan = lee_scan(pair, count=1000, bound=100, seed=0)
        assert math.isfinite(scan.estimated_C)
        points = sample_points(k=2, count=100, bound=100, seed=1, exclude=lambda x: not lee_admissible(pair, x))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            reports = hprime_batch(pair, points, N=6, C=scan.estimated_C)
        assert len(reports) == 100
        failed = [str(report.point) for report in reports if not report.passed]
        assert failed == []
