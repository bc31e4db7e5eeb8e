"""Comparison of empirical periodic-point measures against a fixed library of bounded test functions."""
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .numeric import PeriodicPointSet
from ..greenc.grid import GridMeasure
from ..greenc.lift import CProjPoint
from ..greenc.potentials import fs_distance
from ..utils.errors import DegenerateLine, EmptySet, WrongDimension

TEST_FUNCTION_LIBRARY_VERSION = "1.0"
CUTOFF_RADIUS = 3.0
RADIAL_BINS = (0.0, 1.0, 2.0, 3.0, np.inf)

TestFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _cutoff(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    radius = np.sqrt(np.abs(z) ** 2 + np.abs(w) ** 2)
    return np.exp(-((radius / CUTOFF_RADIUS) ** 6))


def _radial_bin(low: float, high: float) -> TestFunction:
    def indicator(z, w):
        radius = np.sqrt(np.abs(z) ** 2 + np.abs(w) ** 2)
        return ((radius >= low) & (radius < high)).astype(float)

    return indicator


def _build_library() -> Dict[str, TestFunction]:
    library = {"1": lambda z, w: np.ones(np.shape(z))}
    moments = {
        "Re z": lambda z, w: z.real,
        "Im z": lambda z, w: z.imag,
        "Re w": lambda z, w: w.real,
        "Im w": lambda z, w: w.imag,
        "|z|^2": lambda z, w: np.abs(z) ** 2,
        "|w|^2": lambda z, w: np.abs(w) ** 2,
        "Re(z conj w)": lambda z, w: (z * np.conj(w)).real,
    }
    for label, moment in moments.items():
        library[f"cutoff * {label}"] = lambda z, w, moment=moment: moment(z, w) * _cutoff(z, w)
    for low, high in zip(RADIAL_BINS[:-1], RADIAL_BINS[1:]):
        library[f"1[{low:g} <= r < {high:g}]"] = _radial_bin(low, high)
    return library


TEST_FUNCTIONS = _build_library()


@dataclass
class DiscrepancyReport:
    """Integrals of every test function (rows) against every measure (columns) and the discrepancies between them."""

    integrals: pd.DataFrame
    consecutive_discrepancies: List[float]
    grid_discrepancies: List[float]
    max_abs_difference: float
    library_version: str = TEST_FUNCTION_LIBRARY_VERSION

    @property
    def test_functions(self) -> List[str]:
        return list(self.integrals.index)

    @property
    def trend_non_increasing(self) -> bool:
        values = self.consecutive_discrepancies
        return all(later <= earlier for earlier, later in zip(values, values[1:]))

    def to_table(self) -> pd.DataFrame:
        return self.integrals.reset_index().rename(columns={"index": "function"})

    def to_dict(self) -> dict:
        return dict(
            library_version=self.library_version,
            measures=list(self.integrals.columns),
            consecutive_discrepancies=self.consecutive_discrepancies,
            grid_discrepancies=self.grid_discrepancies,
            max_abs_difference=self.max_abs_difference,
            trend_non_increasing=self.trend_non_increasing,
        )


def _empirical_integrals(point_set: PeriodicPointSet) -> Dict[str, float]:
    coords = point_set.affine_coords()
    z, w = coords[:, 0], coords[:, 1]
    return {label: float(np.mean(function(z, w))) for label, function in TEST_FUNCTIONS.items()}


def _grid_integrals(grid: GridMeasure) -> Dict[str, float]:
    """Integrals against the grid measure renormalized to a probability measure on its box."""
    axes = [
        low + (np.arange(grid.resolution) + 0.5) * (high - low) / grid.resolution for low, high in grid.box
    ]
    re_z, im_z, re_w, im_w = np.meshgrid(*axes, indexing="ij")
    z, w = re_z + 1j * im_z, re_w + 1j * im_w
    weights = grid.cell_masses / grid.total_mass
    return {label: float(np.sum(function(z, w) * weights)) for label, function in TEST_FUNCTIONS.items()}


def equidist_report(sets: Sequence[PeriodicPointSet], grid: Optional[GridMeasure] = None) -> DiscrepancyReport:
    """
    Evaluate the test-function library against the empirical measures of the sets (in the given order) and the grid.

    Consecutive discrepancies compare set i with set i+1; grid discrepancies compare every set with the grid.

    Raises
    ------
    EmptySet
        If a set is empty, the grid carries no mass, or fewer than two measures are supplied.
    """
    if len(sets) + (grid is not None) < 2:
        raise EmptySet("An equidistribution report needs at least two sets, or one set and a grid.")
    columns: Dict[str, Dict[str, float]] = {}
    for point_set in sets:
        if point_set.is_empty:
            raise EmptySet(f"The period-{point_set.period} set is empty.")
        if point_set.affine_coords().shape[1] != 2:
            raise WrongDimension("Equidistribution reports are defined for maps of P^2.")
        columns[f"period {point_set.period}"] = _empirical_integrals(point_set)
    if grid is not None:
        if grid.total_mass <= 0:
            raise EmptySet("The grid measure carries no mass.")
        columns[f"grid mu_{grid.n}"] = _grid_integrals(grid)
    integrals = pd.DataFrame(columns)

    def discrepancy(first: str, second: str) -> float:
        return float(np.max(np.abs(integrals[first] - integrals[second])))

    set_columns = list(integrals.columns[: len(sets)])
    consecutive = [discrepancy(first, second) for first, second in zip(set_columns, set_columns[1:])]
    grid_discrepancies = []
    if grid is not None:
        grid_discrepancies = [discrepancy(column, integrals.columns[-1]) for column in set_columns]
    all_pairs = [
        discrepancy(first, second)
        for index, first in enumerate(integrals.columns)
        for second in integrals.columns[index + 1 :]
    ]
    return DiscrepancyReport(
        integrals=integrals,
        consecutive_discrepancies=consecutive,
        grid_discrepancies=grid_discrepancies,
        max_abs_difference=max(all_pairs),
    )


def line_distance(x: CProjPoint, line: Tuple[CProjPoint, CProjPoint]) -> float:
    """Fubini-Study distance from x to the projective line spanned by two points."""
    basis, _ = np.linalg.qr(np.stack([line[0].coords, line[1].coords], axis=1))
    residual = x.coords - basis @ (basis.conj().T @ x.coords)
    return float(min(np.linalg.norm(residual), 1.0))


def line_mass(point_set: PeriodicPointSet, line: Tuple[CProjPoint, CProjPoint], eps: float = 1e-2) -> float:
    """
    Fraction of the points of the set within Fubini-Study distance eps of a projective line.

    Raises
    ------
    DegenerateLine
        If the two points spanning the line coincide projectively.
    """
    assert eps > 0, f"eps ({eps}) must be positive!"
    if fs_distance(*line) < 1e-12:
        raise DegenerateLine(f"The points {line[0]} and {line[1]} do not span a line.")
    if point_set.is_empty:
        return 0.0
    near = sum(line_distance(point, line) <= eps for point in point_set.points)
    return near / len(point_set)
