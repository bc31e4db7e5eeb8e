"""Naive logarithmic heights and the constants bounding a lift."""
import math
from fractions import Fraction

from sympy import factorint

from ..projcore.points import RatProjPoint, normalize, random_points
from ..projcore.polymaps import HomogeneousMap

sample_points = random_points


def naive_height(x) -> float:
    """log max |x_i| over the coprime integer representative (nats)."""
    if not isinstance(x, RatProjPoint):
        x = normalize(x)
    return math.log(x.max_abs())


def lift_bound_constant(F: HomogeneousMap) -> float:
    """
    Archimedean constant with phi_f <= C for the sup norm.

    By the triangle inequality |F_i(p)| <= (number of monomials) * max|coefficient| * |p|^d, hence
    C = (1/d) log(max monomials per coordinate * max |coefficient|).
    """
    return math.log(F.max_monomials * F.max_abs_coefficient) / F.degree


def finite_place_constant(F: HomogeneousMap) -> float:
    """
    Sum over primes l of the local constants C_l = (1/d) max(0, -min v_l(c)) log l.

    Only primes dividing a coefficient denominator contribute, so the sum vanishes for integer lifts.
    """
    total = 0.0
    denominators = {Fraction(coefficient).denominator for poly in F.polys for coefficient, _ in poly}
    for denominator in denominators:
        for prime, exponent in factorint(denominator).items():
            total += exponent * math.log(prime)
    return total / F.degree


def total_c1_constant(F: HomogeneousMap) -> float:
    """The constant C_1 used in canonical-height tail bounds."""
    return lift_bound_constant(F) + finite_place_constant(F)
