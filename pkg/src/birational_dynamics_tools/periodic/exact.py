"""Exact fixed points of the quadratic Henon family."""
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

from sympy import Poly, Rational, Symbol, conjugate, roots, simplify

from ..greenc.lift import CProjPoint
from ..utils.errors import DegenerateFamily
from ..utils.types import RationalType


@dataclass
class HenonFixedPoints:
    """
    Fixed points (x, b x) of (x, y) -> (x^2 + y + a, b x), where x runs over the roots of x^2 + (b - 1) x + a.

    `roots` holds the exact sympy roots with their multiplicities; `embeddings` the points [x : b x : 1] of P^2(C).
    """

    a: Fraction
    b: Fraction
    quadratic: Tuple[Fraction, Fraction, Fraction]
    discriminant: Fraction
    roots: List[Tuple[object, int]]
    points: List[Tuple[object, object]]
    embeddings: List[CProjPoint]

    @property
    def is_galois_invariant(self) -> bool:
        """The root set is closed under complex conjugation (always true for a rational quadratic)."""
        exact_roots = [root for root, _ in self.roots]
        return all(any(simplify(conjugate(root) - other) == 0 for other in exact_roots) for root in exact_roots)

    @property
    def rational(self) -> bool:
        return self.discriminant >= 0 and all(root.is_rational for root, _ in self.roots)

    def to_dict(self) -> dict:
        return dict(
            a=self.a,
            b=self.b,
            quadratic=[str(coefficient) for coefficient in self.quadratic],
            discriminant=self.discriminant,
            roots=[dict(x=str(root), multiplicity=multiplicity) for root, multiplicity in self.roots],
            points=[[str(x), str(y)] for x, y in self.points],
            embeddings=[[complex(value) for value in point.coords] for point in self.embeddings],
            galois_invariant=self.is_galois_invariant,
        )


def fixed_points_exact_henon(a: RationalType = 1, b: RationalType = 1) -> HenonFixedPoints:
    """
    Solve the fixed-point equations exactly: y = b x turns x^2 + y + a = x into x^2 + (b - 1) x + a = 0.

    Raises
    ------
    DegenerateFamily
        If b = 0.
    """
    a, b = Fraction(a), Fraction(b)
    if b == 0:
        raise DegenerateFamily("The Henon map with b = 0 is not birational.")
    x = Symbol("x")
    quadratic = (Fraction(1), b - 1, a)
    polynomial = Poly(x**2 + Rational(str(b - 1)) * x + Rational(str(a)), x)
    exact_roots = sorted(roots(polynomial).items(), key=lambda item: (complex(item[0]).real, complex(item[0]).imag))
    points = [(root, Rational(str(b)) * root) for root, _ in exact_roots]
    embeddings = [CProjPoint.from_coords([complex(px), complex(py), 1]) for px, py in points]
    return HenonFixedPoints(
        a=a,
        b=b,
        quadratic=quadratic,
        discriminant=(b - 1) ** 2 - 4 * a,
        roots=exact_roots,
        points=points,
        embeddings=embeddings,
    )
