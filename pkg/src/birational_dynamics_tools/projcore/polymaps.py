"""Homogeneous polynomial lifts with integer coefficients, their evaluation and iteration."""
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy.polys.domains import ZZ
from sympy.polys.rings import xring

from .points import RatProjPoint, normalize
from ..utils.errors import DimensionMismatch, IndeterminateEvaluation, SpecificationError
from ..utils.types import ExponentType, MatrixType, RationalType, TermType


@lru_cache(maxsize=None)
def polynomial_ring(k_plus_1: int):
    """Return the sympy ring Z[x0, ..., xk] together with its generators."""
    return xring(",".join(f"x{index}" for index in range(k_plus_1)), ZZ)


def _collect_terms(terms: Iterable[Tuple[RationalType, Sequence[int]]]) -> Dict[ExponentType, RationalType]:
    collected = defaultdict(int)
    for coefficient, exponents in terms:
        collected[tuple(int(value) for value in exponents)] += coefficient
    return {exponents: coefficient for exponents, coefficient in collected.items() if coefficient != 0}


def evaluate_terms(terms: Iterable[TermType], coords: Sequence):
    """Value of the polynomial sum c * prod(x_i^e_i) at coords."""
    return sum(
        coefficient * math.prod(value**exponent for value, exponent in zip(coords, exponents) if exponent)
        for coefficient, exponents in terms
    )


@dataclass(frozen=True)
class HomogeneousMap:
    """
    A polynomial lift F = (F_0, ..., F_k) of a rational self-map of P^k.

    Each coordinate is a tuple of (coefficient, exponent vector) terms sorted by decreasing exponent vector; the
    coefficient content over all coordinates is 1. Use the from_* constructors, which normalize, rather than
    building instances by hand.
    """

    k_plus_1: int
    degree: int
    polys: Tuple[Tuple[TermType, ...], ...]
    may_have_common_factor: bool = field(default=False, compare=False)

    def __post_init__(self):
        assert self.degree >= 1, f"The degree of a homogeneous map must be at least 1 (received {self.degree})."
        if len(self.polys) != self.k_plus_1:
            raise DimensionMismatch(f"Expected {self.k_plus_1} coordinate polynomials, found {len(self.polys)}.")
        coefficients = []
        for index, poly in enumerate(self.polys):
            for coefficient, exponents in poly:
                if len(exponents) != self.k_plus_1:
                    raise DimensionMismatch(
                        f"Coordinate {index} has exponent vector {exponents} of length {len(exponents)}; "
                        f"expected {self.k_plus_1}."
                    )
                if sum(exponents) != self.degree or min(exponents) < 0:
                    raise SpecificationError(
                        f"Coordinate {index} is not homogeneous of degree {self.degree}: found monomial {exponents}."
                    )
                assert coefficient != 0, "Zero coefficients must be dropped before construction."
                coefficients.append(coefficient)
        if not coefficients:
            raise SpecificationError("All coordinate polynomials are identically zero.")
        assert math.gcd(*coefficients) == 1, "Coefficient content must be 1; use HomogeneousMap.from_terms()."

    @classmethod
    def from_terms(cls, polys: Sequence[Iterable[Tuple[int, Sequence[int]]]], degree: Optional[int] = None):
        """Build a content-normalized map from integer terms, merging repeated monomials and dropping zeros."""
        collected = [_collect_terms(terms) for terms in polys]
        k_plus_1 = len(collected)
        if degree is None:
            degrees = {sum(exponents) for poly in collected for exponents in poly}
            if not degrees:
                raise SpecificationError("All coordinate polynomials are identically zero.")
            if len(degrees) > 1:
                raise SpecificationError(f"Coordinate polynomials mix total degrees {sorted(degrees)}.")
            degree = degrees.pop()
        content = math.gcd(*(int(coefficient) for poly in collected for coefficient in poly.values()))
        content = content or 1
        return cls(
            k_plus_1=k_plus_1,
            degree=degree,
            polys=tuple(
                tuple((int(poly[exponents]) // content, exponents) for exponents in sorted(poly, reverse=True))
                for poly in collected
            ),
        )

    @classmethod
    def from_rational_terms(cls, polys: Sequence[Iterable[Tuple[RationalType, Sequence[int]]]], degree=None):
        """Clear the denominators of rational coefficients, then content-normalize."""
        rational_polys = [[(Fraction(coefficient), exponents) for coefficient, exponents in terms] for terms in polys]
        denominators = [coefficient.denominator for terms in rational_polys for coefficient, _ in terms]
        common_denominator = math.lcm(*denominators) if denominators else 1
        return cls.from_terms(
            [
                [(int(coefficient * common_denominator), exponents) for coefficient, exponents in terms]
                for terms in rational_polys
            ],
            degree=degree,
        )

    @classmethod
    def from_ring_elements(cls, elements: Sequence, degree: Optional[int] = None):
        return cls.from_terms(
            [[(int(coefficient), monomial) for monomial, coefficient in element.terms()] for element in elements],
            degree=degree,
        )

    @classmethod
    def identity(cls, k: int):
        return linear_map([[int(row == column) for column in range(k + 1)] for row in range(k + 1)])

    @property
    def k(self) -> int:
        return self.k_plus_1 - 1

    @property
    def monomial_count(self) -> int:
        """Total number of stored monomials over all coordinates."""
        return sum(len(poly) for poly in self.polys)

    @property
    def max_monomials(self) -> int:
        return max(len(poly) for poly in self.polys)

    @property
    def max_abs_coefficient(self) -> int:
        return max(abs(coefficient) for poly in self.polys for coefficient, _ in poly)

    def to_ring_elements(self) -> List:
        ring, _ = polynomial_ring(self.k_plus_1)
        return [ring.from_dict({exponents: coefficient for coefficient, exponents in poly}) for poly in self.polys]

    def values_at(self, coords: Sequence) -> List:
        """
        Evaluate the coordinate polynomials at coords.

        Works for any coordinate type closed under + and * with integers: ints, Fractions, sympy ring elements,
        p-adic numbers.
        """
        if len(coords) != self.k_plus_1:
            raise DimensionMismatch(f"Point has {len(coords)} coordinates; the map expects {self.k_plus_1}.")
        return [evaluate_terms(poly, coords) for poly in self.polys]

    def __str__(self):
        return "[" + " : ".join(str(element.as_expr()) for element in self.to_ring_elements()) + "]"


def linear_map(matrix: MatrixType) -> HomogeneousMap:
    """Degree-one lift x -> M x of a square rational matrix."""
    size = len(matrix)
    if any(len(row) != size for row in matrix):
        lengths = [len(row) for row in matrix]
        raise DimensionMismatch(f"Linear maps need a square matrix; received rows of lengths {lengths}.")
    unit_vectors = [tuple(int(index == column) for index in range(size)) for column in range(size)]
    return HomogeneousMap.from_rational_terms(
        [[(Fraction(entry), unit_vectors[column]) for column, entry in enumerate(row)] for row in matrix], degree=1
    )


def evaluate(F: HomogeneousMap, x: RatProjPoint, step: int = 0) -> RatProjPoint:
    """Return the normalized image F(x); raise IndeterminateEvaluation if every coordinate vanishes."""
    values = F.values_at(x.coords)
    if not any(values):
        raise IndeterminateEvaluation(step=step, message=f"{F} vanishes identically at {x} (step {step}).")
    return normalize(values)


def orbit(F: HomogeneousMap, x: RatProjPoint, N: int) -> List[RatProjPoint]:
    """Return [x, f(x), ..., f^N(x)], evaluating point by point and normalizing every step."""
    assert N >= 0, f"The orbit length N ({N}) must be non-negative!"
    points = [x]
    for step in range(N):
        points.append(evaluate(F, points[-1], step=step))
    return points
