"""Double-precision complex lifts, points of complex projective space and complex map specifications."""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from ..projcore.birational import BirationalPair, LocusDescription, LocusKind
from ..projcore.points import RatProjPoint
from ..projcore.polymaps import HomogeneousMap
from ..projcore.specification import MAP_SPECIFICATION_SCHEMA, is_complex_specification, pair_from_dict
from ..utils.dict import load_dict_from_file
from ..utils.errors import DimensionMismatch, SpecificationError, ZeroVector
from ..utils.json_schema import load_schema, validate_with_diagnostics
from ..utils.types import FilePathType

UNIT_NORM_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class CProjPoint:
    """A point of P^k(C) stored as a unit vector in C^(k+1) (Euclidean norm)."""

    coords: np.ndarray

    def __post_init__(self):
        norm = np.linalg.norm(self.coords)
        assert abs(norm - 1) <= UNIT_NORM_TOLERANCE, f"CProjPoint coordinates must have unit norm (found {norm})."

    @classmethod
    def from_coords(cls, raw_coords) -> "CProjPoint":
        coords = np.asarray(raw_coords, dtype=complex)
        norm = np.linalg.norm(coords)
        if norm == 0:
            raise ZeroVector("A projective point needs a nonzero coordinate vector.")
        return cls(coords=coords / norm)

    @classmethod
    def from_rational(cls, point: RatProjPoint) -> "CProjPoint":
        return cls.from_coords(point.to_array())

    @property
    def k(self) -> int:
        return len(self.coords) - 1

    def __str__(self):
        return "[" + " : ".join(f"{value:.6g}" for value in self.coords) + "]"


def sup_norm(values: np.ndarray) -> np.ndarray:
    return np.max(np.abs(values), axis=-1)


def euclidean_norm(values: np.ndarray) -> np.ndarray:
    return np.linalg.norm(values, axis=-1)


class ComplexLift:
    """
    A homogeneous polynomial lift with complex coefficients, evaluated in vectorised form.

    Monomials are stored once as an exponent matrix of shape (T, k+1); `matrix` of shape (k+1, T) holds the
    coefficient of monomial t in coordinate i. Inputs may carry any leading batch shape.
    """

    def __init__(self, k_plus_1: int, degree: int, exponents: np.ndarray, matrix: np.ndarray):
        assert exponents.shape[1] == k_plus_1, "Exponent vectors must have k+1 entries."
        assert matrix.shape == (k_plus_1, exponents.shape[0]), "Coefficient matrix does not match the monomials."
        assert np.all(exponents.sum(axis=1) == degree), f"Every monomial must have total degree {degree}."
        self.k_plus_1 = k_plus_1
        self.degree = degree
        self.exponents = exponents
        self.matrix = matrix

    @classmethod
    def from_terms(cls, polys: Sequence[Sequence], degree: Optional[int] = None) -> "ComplexLift":
        """Build from per-coordinate lists of (complex coefficient, exponent vector)."""
        monomials = sorted({tuple(int(value) for value in exponents) for poly in polys for _, exponents in poly})
        if not monomials:
            raise SpecificationError("All coordinate polynomials are identically zero.")
        degrees = {sum(exponents) for exponents in monomials}
        if len(degrees) > 1 or (degree is not None and degrees != {degree}):
            raise SpecificationError(f"Coordinate polynomials are not homogeneous: total degrees {sorted(degrees)}.")
        index = {exponents: position for position, exponents in enumerate(monomials)}
        matrix = np.zeros((len(polys), len(monomials)), dtype=complex)
        for row, poly in enumerate(polys):
            for coefficient, exponents in poly:
                if len(exponents) != len(polys):
                    raise DimensionMismatch(f"Exponent vector {exponents} does not match {len(polys)} coordinates.")
                matrix[row, index[tuple(int(value) for value in exponents)]] += complex(coefficient)
        return cls(len(polys), degrees.pop(), np.array(monomials, dtype=int), matrix)

    @property
    def k(self) -> int:
        return self.k_plus_1 - 1

    def max_monomials(self) -> int:
        return int(np.max(np.count_nonzero(self.matrix, axis=1)))

    def max_abs_coefficient(self) -> float:
        return float(np.max(np.abs(self.matrix)))

    def _monomials(self, points: np.ndarray, exponents: np.ndarray) -> np.ndarray:
        return np.prod(points[..., None, :] ** exponents, axis=-1)

    def evaluate(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=complex)
        if points.shape[-1] != self.k_plus_1:
            raise DimensionMismatch(f"Points have {points.shape[-1]} coordinates; the lift expects {self.k_plus_1}.")
        return self._monomials(points, self.exponents) @ self.matrix.T

    def jacobian(self, points) -> np.ndarray:
        """Complex Jacobian dF_i/dx_j with shape (..., k+1, k+1)."""
        points = np.asarray(points, dtype=complex)
        columns = []
        for j in range(self.k_plus_1):
            factors = self.exponents[:, j]
            reduced = self.exponents.copy()
            reduced[:, j] = np.maximum(reduced[:, j] - 1, 0)
            columns.append((self._monomials(points, reduced) * factors) @ self.matrix.T)
        return np.stack(columns, axis=-1)

    def __repr__(self):
        return f"ComplexLift(P^{self.k}, degree={self.degree}, monomials={len(self.exponents)})"


def complex_lift(F: HomogeneousMap) -> ComplexLift:
    """Convert an exact integer lift."""
    return ComplexLift.from_terms([[(complex(c), e) for c, e in poly] for poly in F.polys], degree=F.degree)


@dataclass(frozen=True, eq=False)
class ComplexLocus:
    """Declared indeterminacy locus over C: a list of points, or the span of its generators."""

    kind: LocusKind
    generators: np.ndarray
    declared_dimension: int

    @classmethod
    def from_rational(cls, locus: LocusDescription) -> "ComplexLocus":
        generators = np.array([CProjPoint.from_rational(point).coords for point in locus.generators])
        return cls(kind=locus.kind, generators=generators, declared_dimension=locus.declared_dimension)

    @property
    def points(self):
        assert self.kind is LocusKind.POINT_LIST, "Only point-list loci consist of isolated points."
        return [CProjPoint.from_coords(row) for row in self.generators]

    def orthonormal_basis(self) -> np.ndarray:
        """Rows spanning the same linear subspace, orthonormal for the Hermitian product."""
        q, _ = np.linalg.qr(self.generators.T)
        return q[:, : self.declared_dimension + 1].T


@dataclass(frozen=True, eq=False)
class ComplexPair:
    forward: ComplexLift
    backward: ComplexLift
    s: int
    ind_forward: ComplexLocus
    ind_backward: ComplexLocus
    name: Optional[str] = None
    rational: Optional[BirationalPair] = field(default=None, repr=False)

    def __post_init__(self):
        if self.forward.k_plus_1 != self.backward.k_plus_1:
            raise DimensionMismatch(f"Forward lift acts on P^{self.forward.k}, backward on P^{self.backward.k}.")
        if not 1 <= self.s <= self.k - 1:
            raise SpecificationError(f"s must lie in [1, {self.k - 1}] for maps of P^{self.k}; received {self.s}.")

    @property
    def k(self) -> int:
        return self.forward.k

    @property
    def d(self) -> int:
        return self.forward.degree

    @property
    def delta(self) -> int:
        return self.backward.degree


def complex_pair(pair: BirationalPair) -> ComplexPair:
    return ComplexPair(
        forward=complex_lift(pair.forward),
        backward=complex_lift(pair.backward),
        s=pair.s,
        ind_forward=ComplexLocus.from_rational(pair.ind_forward),
        ind_backward=ComplexLocus.from_rational(pair.ind_backward),
        name=pair.name,
        rational=pair,
    )


def _complex_value(value) -> complex:
    if isinstance(value, list):
        return complex(float(str(value[0])), float(str(value[1])))
    return complex(Fraction(str(value).strip()))


def _complex_locus(locus: dict) -> ComplexLocus:
    generators = np.array([[_complex_value(value) for value in point] for point in locus["generators"]])
    norms = np.linalg.norm(generators, axis=1)
    if np.any(norms == 0):
        raise ZeroVector("A locus generator is the zero vector.")
    return ComplexLocus(
        kind=LocusKind(locus["kind"]), generators=generators / norms[:, None], declared_dimension=locus["dim"]
    )


def complex_pair_from_dict(specification: dict, source: str = "input") -> ComplexPair:
    """
    Build a complex pair from a map specification; rational specifications go through pair_from_dict first.

    Raises
    ------
    SpecificationError
        If the specification is malformed or its declared degrees disagree with the polynomials.
    """
    if not is_complex_specification(specification):
        return complex_pair(pair_from_dict(specification, source=source))
    validate_with_diagnostics(instance=specification, schema=load_schema(MAP_SPECIFICATION_SCHEMA), source=source)
    try:
        lifts = {
            label: ComplexLift.from_terms(
                [[(_complex_value(term["c"]), term["e"]) for term in poly] for poly in specification[label]],
                degree=specification[degree_key],
            )
            for label, degree_key in (("forward", "degree_forward"), ("backward", "degree_backward"))
        }
        pair = ComplexPair(
            forward=lifts["forward"],
            backward=lifts["backward"],
            s=specification["s"],
            ind_forward=_complex_locus(specification["ind_forward"]),
            ind_backward=_complex_locus(specification["ind_backward"]),
            name=specification.get("name"),
        )
    except (ValueError, DimensionMismatch) as error:
        raise SpecificationError(f"{source}: {error}") from error
    if pair.k != specification["k"]:
        raise SpecificationError(f"{source}: field 'k': declared {specification['k']}, found {pair.k}")
    return pair


def load_complex_pair(file_path: FilePathType) -> ComplexPair:
    """Load any map specification (rational, complex or family) for the numerical commands."""
    return complex_pair_from_dict(load_dict_from_file(file_path=file_path), source=str(file_path))
