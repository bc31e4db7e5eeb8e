"""Built-in birational families."""
from fractions import Fraction
from typing import Tuple

from sympy import Matrix, Rational

from .birational import BirationalPair, LocusDescription
from .composition import compose
from .points import normalize
from .polymaps import HomogeneousMap, linear_map
from ..utils.errors import DegenerateFamily, DimensionMismatch, SingularMatrix
from ..utils.types import MatrixType, RationalType


def henon_pair(a: RationalType = 1, b: RationalType = 1) -> BirationalPair:
    """
    The quadratic Henon map f = [x^2 + y t + a t^2 : b x t : t^2] of P^2 with
    f^-1 = [y t / b : x t - y^2 / b^2 - a t^2 : t^2], I_f = [0:1:0] and I_{f^-1} = [1:0:0].
    """
    a, b = Fraction(a), Fraction(b)
    if b == 0:
        raise DegenerateFamily("The Henon map with b = 0 is not birational.")
    forward = HomogeneousMap.from_rational_terms(
        [
            [(1, (2, 0, 0)), (1, (0, 1, 1)), (a, (0, 0, 2))],
            [(b, (1, 0, 1))],
            [(1, (0, 0, 2))],
        ],
        degree=2,
    )
    backward = HomogeneousMap.from_rational_terms(
        [
            [(1 / b, (0, 1, 1))],
            [(1, (1, 0, 1)), (-1 / b**2, (0, 2, 0)), (-a, (0, 0, 2))],
            [(1, (0, 0, 2))],
        ],
        degree=2,
    )
    return BirationalPair(
        forward=forward,
        backward=backward,
        s=1,
        ind_forward=LocusDescription.points(normalize([0, 1, 0])),
        ind_backward=LocusDescription.points(normalize([1, 0, 0])),
        name=f"henon(a={a}, b={b})",
    )


def cremona_pair() -> BirationalPair:
    """The standard quadratic involution [yz : xz : xy], paired with itself."""
    sigma = HomogeneousMap.from_terms([[(1, (0, 1, 1))], [(1, (1, 0, 1))], [(1, (1, 1, 0))]])
    coordinate_points = LocusDescription.points(normalize([1, 0, 0]), normalize([0, 1, 0]), normalize([0, 0, 1]))
    return BirationalPair(
        forward=sigma,
        backward=sigma,
        s=1,
        ind_forward=coordinate_points,
        ind_backward=coordinate_points,
        name="cremona",
    )


def regular_pair_p3() -> BirationalPair:
    """
    The polynomial automorphism (x, y, z) -> (y, z + y^2, x + z^2) of C^3 extended to P^3.

    Its inverse (X, Y, Z) -> (Z - (Y - X^2)^2, X, Y - X^2) has degree 4, so d = 2, delta = 4 and s = 2. The forward
    map is undefined at the point [1:0:0:0] and the inverse on the line {x = t = 0}.
    """
    forward = HomogeneousMap.from_terms(
        [
            [(1, (0, 1, 0, 1))],
            [(1, (0, 0, 1, 1)), (1, (0, 2, 0, 0))],
            [(1, (1, 0, 0, 1)), (1, (0, 0, 2, 0))],
            [(1, (0, 0, 0, 2))],
        ]
    )
    # z t^3 - (y t - x^2)^2 = z t^3 - y^2 t^2 + 2 x^2 y t - x^4
    backward = HomogeneousMap.from_terms(
        [
            [(1, (0, 0, 1, 3)), (-1, (0, 2, 0, 2)), (2, (2, 1, 0, 1)), (-1, (4, 0, 0, 0))],
            [(1, (1, 0, 0, 3))],
            [(1, (0, 1, 0, 3)), (-1, (2, 0, 0, 2))],
            [(1, (0, 0, 0, 4))],
        ]
    )
    return BirationalPair(
        forward=forward,
        backward=backward,
        s=2,
        ind_forward=LocusDescription.points(normalize([1, 0, 0, 0])),
        ind_backward=LocusDescription.linear(normalize([0, 1, 0, 0]), normalize([0, 0, 1, 0])),
        name="regular_p3",
    )


def invert_matrix(matrix: MatrixType) -> Tuple[Tuple[Fraction, ...], ...]:
    """Exact inverse of a square rational matrix."""
    sympy_matrix = Matrix([[Rational(str(Fraction(entry))) for entry in row] for row in matrix])
    if sympy_matrix.rows != sympy_matrix.cols:
        raise DimensionMismatch(f"Cannot invert a {sympy_matrix.rows}x{sympy_matrix.cols} matrix.")
    if sympy_matrix.det() == 0:
        raise SingularMatrix(f"The matrix {[[str(Fraction(e)) for e in row] for row in matrix]} is singular.")
    inverse = sympy_matrix.inv()
    return tuple(
        tuple(Fraction(int(inverse[row, column].p), int(inverse[row, column].q)) for column in range(inverse.cols))
        for row in range(inverse.rows)
    )


def twisted_pair(pair: BirationalPair, A_inverse: MatrixType, side: str = "right") -> BirationalPair:
    """
    Twist a pair by the linear automorphism A given through its inverse.

    side="right" builds f o A with inverse A^-1 o f^-1, I_{f o A} = A^-1(I_f) and unchanged I_{f^-1}.
    side="left" builds A o f with inverse f^-1 o A^-1, unchanged I_f and I_{(A o f)^-1} = A(I_{f^-1}).

    Raises
    ------
    SingularMatrix
        If A_inverse is not invertible over Q.
    """
    assert side in ("left", "right"), f"side must be 'left' or 'right' (received '{side}')."
    A_matrix = invert_matrix(A_inverse)
    if len(A_matrix) != pair.k + 1:
        raise DimensionMismatch(f"A {len(A_matrix)}x{len(A_matrix)} matrix cannot twist a map of P^{pair.k}.")
    A = linear_map(A_matrix)
    A_inv = linear_map(A_inverse)
    if side == "right":
        return BirationalPair(
            forward=compose(pair.forward, A, check_common_factor=False),
            backward=compose(A_inv, pair.backward, check_common_factor=False),
            s=pair.s,
            ind_forward=pair.ind_forward.transported(A_inv),
            ind_backward=pair.ind_backward,
            name=f"{pair.name} o A" if pair.name else None,
        )
    return BirationalPair(
        forward=compose(A, pair.forward, check_common_factor=False),
        backward=compose(pair.backward, A_inv, check_common_factor=False),
        s=pair.s,
        ind_forward=pair.ind_forward,
        ind_backward=pair.ind_backward.transported(A),
        name=f"A o {pair.name}" if pair.name else None,
    )
