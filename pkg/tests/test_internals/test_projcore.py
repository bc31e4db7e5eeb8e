import unittest
from fractions import Fraction
from pathlib import Path
from tempfile import mkdtemp

import pytest
from parameterized import parameterized, param

from birational_dynamics_tools.projcore import (
    HomogeneousMap,
    LocusDescription,
    compose,
    common_factor_degree,
    cremona_pair,
    degree_sequence,
    dump_pair,
    dynamical_degree_estimate,
    evaluate,
    henon_pair,
    linear_map,
    load_pair,
    normalize,
    orbit,
    pair_from_dict,
    pair_to_dict,
    random_points,
    regular_pair_p3,
    stability_evidence,
    strip_common_factor,
    twisted_pair,
    validate_pair,
    vanishes_on,
)
from birational_dynamics_tools.utils import (
    DimensionMismatch,
    IndeterminateEvaluation,
    ResourceLimit,
    SingularMatrix,
    SpecificationError,
    ZeroVector,
)

ROTATION_INVERSE = [
    [Fraction(99, 101), Fraction(20, 101), 0],
    [Fraction(-20, 101), Fraction(99, 101), 0],
    [0, 0, 1],
]


class TestPoints(unittest.TestCase):
    @parameterized.expand(
        [
            param([2, 4, 6], (1, 2, 3)),
            param([-1, 2, 0], (1, -2, 0)),
            param([Fraction(1, 2), Fraction(1, 3), 1], (3, 2, 6)),
            param(["0", "-3/4", "1/2"], (0, 3, -2)),
        ]
    )
    def test_normalize(self, raw_coords, expected):
        assert normalize(raw_coords).coords == expected

    def test_normalize_zero_vector(self):
        with self.assertRaisesRegex(ZeroVector, "zero vector"):
            normalize([0, 0, 0])

    def test_scaled_representatives_are_equal(self):
        assert normalize([3, 6, -9]) == normalize([-1, -2, 3])

    def test_random_points_are_reproducible(self):
        first = random_points(k=2, count=10, bound=5, seed=7)
        second = random_points(k=2, count=10, bound=5, seed=7)
        assert first == second
        assert all(point.max_abs() <= 5 for point in first)

    def test_random_points_exclusion(self):
        points = random_points(k=2, count=50, bound=3, seed=0, exclude=lambda x: x[2] == 0)
        assert all(point[2] != 0 for point in points)


class TestPolynomialMaps(unittest.TestCase):
    def test_content_is_normalized(self):
        F = HomogeneousMap.from_terms([[(2, (2, 0, 0))], [(4, (1, 1, 0))], [(6, (0, 0, 2))]])
        assert F.polys == (((1, (2, 0, 0)),), ((2, (1, 1, 0)),), ((3, (0, 0, 2)),))

    def test_rational_terms_clear_denominators(self):
        F = HomogeneousMap.from_rational_terms([[(Fraction(1, 2), (1, 0))], [(Fraction(1, 3), (0, 1))]])
        assert F.polys == (((3, (1, 0)),), ((2, (0, 1)),))

    def test_mixed_degrees_rejected(self):
        with self.assertRaisesRegex(SpecificationError, "mix total degrees"):
            HomogeneousMap.from_terms([[(1, (2, 0, 0))], [(1, (1, 0, 0))], [(1, (0, 0, 2))]])

    def test_exponent_length_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            HomogeneousMap.from_terms([[(1, (2, 0))], [(1, (1, 1, 0))], [(1, (0, 0, 2))]], degree=2)

    def test_henon_orbit(self):
        pair = henon_pair()
        points = orbit(pair.forward, normalize([0, 0, 1]), 4)
        assert [point.coords for point in points] == [(0, 0, 1), (1, 0, 1), (2, 1, 1), (6, 2, 1), (39, 6, 1)]

    def test_indeterminate_evaluation_carries_step(self):
        pair = henon_pair()
        with self.assertRaises(IndeterminateEvaluation) as context:
            evaluate(pair.forward, normalize([0, 1, 0]), step=3)
        assert context.exception.step == 3

    def test_cremona_involution_has_common_factor(self):
        sigma = cremona_pair().forward
        square = compose(sigma, sigma)
        assert square.degree == 4
        assert square.may_have_common_factor
        assert common_factor_degree(square) == 3
        reduced, factor_degree = strip_common_factor(square)
        assert factor_degree == 3
        assert reduced == HomogeneousMap.identity(2)

    def test_composition_budget(self):
        F = henon_pair().forward
        with self.assertRaises(ResourceLimit):
            compose(F, F, monomial_budget=3)

    def test_linear_map_dimension(self):
        with self.assertRaises(DimensionMismatch):
            linear_map([[1, 0], [0, 1, 0]])


class TestDegreeSequences(unittest.TestCase):
    def test_henon_degrees(self):
        assert degree_sequence(henon_pair(), N=6) == [2, 4, 8, 16, 32, 64]

    def test_henon_inverse_degrees(self):
        assert degree_sequence(henon_pair(), direction="backward", N=4) == [2, 4, 8, 16]

    def test_cremona_degrees(self):
        assert degree_sequence(cremona_pair(), N=2) == [2, 1]

    def test_dynamical_degree_estimate(self):
        assert dynamical_degree_estimate([2, 4, 8, 16]) == pytest.approx(2.0)

    def test_degree_budget(self):
        with self.assertRaises(ResourceLimit):
            degree_sequence(henon_pair(), N=6, monomial_budget=50)


class TestBirationalPairs(unittest.TestCase):
    @parameterized.expand(
        [
            param("henon", henon_pair),
            param("cremona", cremona_pair),
            param("regular_p3", regular_pair_p3),
            param("twisted_henon", lambda: twisted_pair(henon_pair(), ROTATION_INVERSE, side="left")),
        ]
    )
    def test_built_in_pairs_validate(self, _, factory):
        report = validate_pair(factory(), witnesses=10)
        assert report.passed, report.messages
        assert report.witnesses_checked > 0

    def test_wrong_inverse_fails_birationality(self):
        pair = henon_pair()
        broken = type(pair)(
            forward=pair.forward,
            backward=henon_pair(a=2).backward,
            s=1,
            ind_forward=pair.ind_forward,
            ind_backward=pair.ind_backward,
        )
        report = validate_pair(broken, witnesses=5)
        assert not report.birational
        assert not report.passed

    def test_wrong_locus_fails(self):
        pair = henon_pair()
        broken = type(pair)(
            forward=pair.forward,
            backward=pair.backward,
            s=1,
            ind_forward=LocusDescription.points(normalize([0, 0, 1])),
            ind_backward=pair.ind_backward,
        )
        report = validate_pair(broken, witnesses=5)
        assert not report.loci_vanish

    def test_linear_locus_vanishing(self):
        pair = regular_pair_p3()
        assert vanishes_on(pair.backward, pair.ind_backward)
        assert not vanishes_on(pair.forward, pair.ind_backward)

    def test_dependent_generators_rejected(self):
        with self.assertRaisesRegex(SpecificationError, "not projectively independent"):
            LocusDescription.linear(normalize([1, 0, 0, 0]), normalize([2, 0, 0, 0]))

    def test_twist_of_singular_matrix(self):
        with self.assertRaises(SingularMatrix):
            twisted_pair(henon_pair(), [[1, 1, 1], [1, 1, 1], [0, 0, 1]])

    def test_twisted_loci_are_transported(self):
        pair = twisted_pair(henon_pair(), ROTATION_INVERSE, side="left")
        assert pair.ind_forward.generators == (normalize([0, 1, 0]),)
        assert pair.ind_backward.generators == (normalize([99, 20, 0]),)

    def test_stability_evidence_henon(self):
        evidence = stability_evidence(henon_pair(), N=20)
        assert evidence.holds
        assert evidence.checked_to == 20

    def test_stability_evidence_cremona_fails(self):
        evidence = stability_evidence(cremona_pair(), N=5)
        assert not evidence.holds
        assert evidence.failure_step == 0


class TestSpecificationFiles(unittest.TestCase):
    def setUp(self):
        self.test_dir = Path(mkdtemp())

    def test_round_trip(self):
        pair = twisted_pair(henon_pair(a=Fraction(1, 2), b=3), ROTATION_INVERSE, side="right")
        file_path = self.test_dir / "twisted.json"
        dump_pair(pair, file_path)
        loaded = load_pair(file_path)
        assert loaded.forward == pair.forward
        assert loaded.backward == pair.backward
        assert loaded.ind_forward == pair.ind_forward
        assert loaded.ind_backward == pair.ind_backward

    def test_family_specification(self):
        pair = pair_from_dict(dict(family="henon", a="1", b="1"))
        assert pair.forward == henon_pair().forward

    def test_family_with_twist(self):
        A_inverse = [[str(entry) for entry in row] for row in ROTATION_INVERSE]
        specification = dict(family="henon", twist=dict(side="left", A_inverse=A_inverse))
        pair = pair_from_dict(specification)
        assert pair.ind_backward.generators == (normalize([99, 20, 0]),)

    def test_declared_degree_mismatch(self):
        specification = pair_to_dict(henon_pair())
        specification["degree_forward"] = 3
        with self.assertRaisesRegex(SpecificationError, "field 'degree_forward': declared 3, found 2"):
            pair_from_dict(specification, source="henon.json")

    def test_schema_violation_names_field(self):
        specification = pair_to_dict(henon_pair())
        specification["s"] = "one"
        with self.assertRaisesRegex(SpecificationError, "henon.json: field 's'"):
            pair_from_dict(specification, source="henon.json")

    def test_malformed_json_reports_line(self):
        file_path = self.test_dir / "broken.json"
        file_path.write_text('{\n  "family": "henon",\n  "a": \n}\n')
        with self.assertRaisesRegex(SpecificationError, "line 4"):
            load_pair(file_path)

    def test_complex_specification_refused(self):
        specification = pair_to_dict(henon_pair())
        specification["forward"][1][0]["c"] = ["1.0", "0.5"]
        with self.assertRaisesRegex(SpecificationError, "complex coefficients"):
            pair_from_dict(specification)
