import json
import math
import unittest
from fractions import Fraction
from pathlib import Path
from tempfile import mkdtemp

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from parameterized import parameterized, param

from birational_dynamics_tools.greenc import (
    CProjPoint,
    EnergyMethod,
    complex_pair,
    complex_pair_from_dict,
    energy_partial_sum,
    export_grid,
    fs_distance,
    fs_volume_density,
    green_partial,
    mu_grid_k2,
    phi_f,
)
from birational_dynamics_tools.heights import canonical_height
from birational_dynamics_tools.projcore import (
    henon_pair,
    normalize,
    pair_to_dict,
    regular_pair_p3,
    twisted_pair,
)
from birational_dynamics_tools.utils import NearIndeterminate, ResourceLimit, WrongDimension, ZeroVector

ROTATION_INVERSE = [
    [Fraction(99, 101), Fraction(20, 101), 0],
    [Fraction(-20, 101), Fraction(99, 101), 0],
    [0, 0, 1],
]


class TestPotentials(unittest.TestCase):
    @parameterized.expand(
        [
            param("orthogonal", [1, 0, 0], [0, 1, 0], 1.0),
            param("equal", [1, 2, 3], [2, 4, 6], 0.0),
            param("diagonal", [1, 1, 0], [1, 0, 0], 1 / math.sqrt(2)),
            param("complex_scaling", [1j, 1, 0], [-1, 1j, 0], 0.0),
        ]
    )
    def test_fs_distance(self, _, p, q, expected):
        assert fs_distance(np.array(p, dtype=complex), np.array(q, dtype=complex)) == pytest.approx(expected, abs=1e-12)

    def test_zero_point(self):
        with self.assertRaises(ZeroVector):
            CProjPoint.from_coords([0, 0, 0])

    def test_phi_is_independent_of_representative(self):
        F = complex_pair(henon_pair()).forward
        p = np.array([0.3 + 0.1j, -1.2, 1.0])
        assert phi_f(F, p) == pytest.approx(phi_f(F, 7.5j * p))

    def test_phi_near_indeterminacy(self):
        F = complex_pair(henon_pair()).forward
        with self.assertRaises(NearIndeterminate) as context:
            phi_f(F, np.array([0, 1, 0], dtype=complex), step=5)
        assert context.exception.step == 5

    def test_green_partial_sums(self):
        F = complex_pair(henon_pair()).forward
        partial_sums = green_partial(F, CProjPoint.from_coords([0, 0, 1]), N=3)
        assert partial_sums[0] == pytest.approx(0.0, abs=1e-15)
        assert partial_sums[1] == pytest.approx(math.log(2) / 4)

    def test_green_partial_matches_height_on_integral_orbit(self):
        F = complex_pair(henon_pair()).forward
        partial_sums = green_partial(F, np.array([0, 0, 1], dtype=complex), N=8)
        estimate = canonical_height(henon_pair(), normalize([0, 0, 1]), cutoff_N=9)
        assert partial_sums[-1] == pytest.approx(estimate.value, rel=1e-9)

    def test_green_partial_deltas_are_geometric(self):
        F = complex_pair(henon_pair()).forward
        partial_sums = green_partial(F, CProjPoint.from_coords([2, 1, 1]), N=20)
        deltas = np.abs(np.diff(partial_sums))
        bounds = 0.5 ** np.arange(20) * (0.5 * math.log(3))
        assert np.all(deltas <= bounds)

    def test_green_partial_at_fixed_point(self):
        F = complex_pair(henon_pair()).forward
        assert_allclose(green_partial(F, CProjPoint.from_coords([1, 0, 0]), N=5), 0.0, atol=1e-15)


class TestComplexSpecifications(unittest.TestCase):
    def test_complex_coefficients(self):
        specification = pair_to_dict(henon_pair())
        specification["forward"][1][0]["c"] = ["1.0", "0.5"]
        pair = complex_pair_from_dict(specification)
        assert pair.k == 2
        assert pair.forward.max_abs_coefficient() == pytest.approx(abs(1 + 0.5j))
        assert pair.rational is None

    def test_rational_specification_keeps_exact_pair(self):
        pair = complex_pair_from_dict(dict(family="henon", a="1", b="1"))
        assert pair.rational is not None
        assert pair.d == 2 and pair.delta == 2

    def test_lift_matches_exact_evaluation(self):
        pair = henon_pair()
        values = complex_pair(pair).forward.evaluate(np.array([[2, 1, 1], [6, 2, 1]], dtype=complex))
        assert_array_equal(values.real, [[6, 2, 1], [39, 6, 1]])


class TestEnergy(unittest.TestCase):
    def test_henon_terms_vanish(self):
        series = energy_partial_sum(complex_pair(henon_pair()), N=10)
        assert series.terms == [0.0] * 11
        assert series.decay_fit == 0.0
        assert series.is_cauchy

    def test_rotation_twist_decays_geometrically(self):
        pair = complex_pair(twisted_pair(henon_pair(), ROTATION_INVERSE, side="left"))
        series = energy_partial_sum(pair, N=12, side="forward")
        expected = [0.5 * math.log(99) * 2.0**-n for n in range(13)]
        assert_allclose(series.terms, expected, rtol=1e-9)
        assert series.decay_fit == pytest.approx(0.5, rel=1e-6)
        assert series.is_cauchy
        assert series.partial_sums[-1] == pytest.approx(sum(expected))

    def test_backward_side_of_henon(self):
        series = energy_partial_sum(complex_pair(henon_pair()), N=5, side="backward")
        assert series.side.value == "backward"
        assert series.terms == [0.0] * 6

    def test_distance_proxy(self):
        series = energy_partial_sum(complex_pair(henon_pair()), N=4, method="distance-proxy")
        assert series.term_kind is EnergyMethod.DISTANCE_PROXY
        assert_allclose(series.terms, 0.0, atol=1e-15)

    def test_monte_carlo_needs_linear_locus(self):
        with self.assertRaises(WrongDimension):
            energy_partial_sum(complex_pair(henon_pair()), N=3, method="monte-carlo")

    def test_point_method_needs_point_locus(self):
        with self.assertRaises(WrongDimension):
            energy_partial_sum(complex_pair(regular_pair_p3()), N=3, side="forward")

    def test_monte_carlo_on_linear_locus(self):
        pair = complex_pair(regular_pair_p3())
        with self.assertWarns(UserWarning):
            series = energy_partial_sum(pair, N=2, side="forward", method="monte-carlo", samples=200, seed=4)
        assert series.approximate
        assert series.samples == 200 and series.seed == 4
        assert len(series.terms) == 3
        assert np.all(np.isfinite(series.terms))
        content = series.to_dict()
        assert content["term_kind"] == "monte-carlo"
        assert content["notes"]

    def test_monte_carlo_is_seeded(self):
        pair = complex_pair(regular_pair_p3())
        with self.assertWarns(UserWarning):
            first = energy_partial_sum(pair, N=1, method="monte-carlo", samples=100, seed=9)
        with self.assertWarns(UserWarning):
            second = energy_partial_sum(pair, N=1, method="monte-carlo", samples=100, seed=9)
        assert first.terms == second.terms


class TestGridMeasure(unittest.TestCase):
    def setUp(self):
        self.test_dir = Path(mkdtemp())

    def test_level_zero_is_fubini_study(self):
        box = ((-1.0, 1.0),) * 4
        resolution = 16
        grid = mu_grid_k2(complex_pair(henon_pair()), n=0, box=box, resolution=resolution)
        centers = -1.0 + (np.arange(resolution) + 0.5) * 2.0 / resolution
        x1, y1, x2, y2 = np.meshgrid(centers, centers, centers, centers, indexing="ij")
        expected = fs_volume_density(x1 + 1j * y1, x2 + 1j * y2) * grid.cell_volume
        assert grid.total_mass == pytest.approx(expected.sum(), rel=0.05)
        assert grid.masked_nodes == 0

    def test_cell_cap(self):
        with self.assertRaises(ResourceLimit):
            mu_grid_k2(complex_pair(henon_pair()), n=1, resolution=20, max_cells=10_000)

    def test_only_plane_maps(self):
        with self.assertRaises(WrongDimension):
            mu_grid_k2(complex_pair(regular_pair_p3()), n=1, resolution=4)

    def test_export(self):
        grid = mu_grid_k2(complex_pair(henon_pair()), n=1, resolution=6)
        paths = export_grid(grid, self.test_dir / "mu_grid_1.bin")
        assert paths["binary"].stat().st_size == 8 * 6**4
        masses = np.fromfile(paths["binary"], dtype="<f8").reshape((6,) * 4)
        assert_allclose(masses, grid.cell_masses)
        sidecar = json.loads(paths["sidecar"].read_text())
        assert sidecar["resolution"] == 6
        assert sidecar["axes"] == ["re_z", "im_z", "re_w", "im_w"]
        assert sidecar["total_mass"] == pytest.approx(grid.total_mass)
        assert paths["marginal"].name == "mu_grid_1_marginal.csv"
        assert len(paths["marginal"].read_text().splitlines()) == 1 + 6**2

    def test_henon_level_three_is_normalized(self):
        pair = complex_pair(henon_pair())
        coarse = mu_grid_k2(pair, n=3, box=((-3.0, 3.0),) * 4, resolution=20)
        fine = mu_grid_k2(pair, n=3, box=((-3.0, 3.0),) * 4, resolution=40)
        assert 0.9 <= fine.total_mass <= 1.1
        assert fine.clamped_mass_fraction < 0.05
        assert fine.cell_masses.sum() == pytest.approx(fine.total_mass)
        assert np.all(fine.cell_masses >= 0)
        assert abs(fine.total_mass - coarse.total_mass) / fine.total_mass < 0.02
