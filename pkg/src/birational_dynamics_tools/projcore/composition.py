"""Formal composition of lifts and detection of common polynomial factors."""
import warnings
from dataclasses import dataclass, replace
from functools import reduce
from typing import List, Tuple

import numpy as np
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_add, gf_degree, gf_from_int_poly, gf_gcd, gf_mul, gf_pow

from .polymaps import HomogeneousMap, polynomial_ring
from ..utils.errors import DegenerateRestriction, DimensionMismatch, IndeterminateEvaluation, ResourceLimit

DEFAULT_MONOMIAL_BUDGET = 2_000_000
LINE_PARAMETER_RANGE = 10**6
# Restrictions are reduced modulo this Mersenne prime; a spurious common root has probability about degree^2 / p.
RESTRICTION_PRIME = 2**61 - 1


@dataclass(frozen=True)
class CommonFactorReport:
    degree: int
    agreement: int
    trials: int
    attempts: int
    observed: Tuple[int, ...]


def compose(
    F: HomogeneousMap,
    G: HomogeneousMap,
    check_common_factor: bool = True,
    monomial_budget: int = DEFAULT_MONOMIAL_BUDGET,
) -> HomogeneousMap:
    """
    Formal composition F o G, obtained by substituting the coordinates of G into F.

    The result has degree deg F * deg G and is content-normalized but never divided by a common polynomial factor;
    may_have_common_factor is set when common_factor_degree detects one.

    Raises
    ------
    DimensionMismatch
        If F and G act on projective spaces of different dimension.
    ResourceLimit
        If the composed map holds more than monomial_budget monomials.
    """
    if F.k_plus_1 != G.k_plus_1:
        raise DimensionMismatch(f"Cannot compose a map on P^{F.k} with a map on P^{G.k}.")
    _, generators = polynomial_ring(F.k_plus_1)
    substitution = list(zip(generators, G.to_ring_elements()))
    composed = []
    size = 0
    for element in F.to_ring_elements():
        composed.append(element.compose(substitution))
        size += len(composed[-1])
        if size > monomial_budget:
            raise ResourceLimit(
                f"Composition of degree {F.degree * G.degree} exceeds the budget of {monomial_budget} monomials."
            )
    if not any(composed):
        raise IndeterminateEvaluation(message=f"The composition {F} o {G} vanishes identically.")
    result = HomogeneousMap.from_ring_elements(composed, degree=F.degree * G.degree)
    if check_common_factor:
        result = replace(result, may_have_common_factor=common_factor_degree(result, trials=3, seed=0) > 0)
    return result


def _restrict_to_line(F: HomogeneousMap, base: np.ndarray, direction: np.ndarray) -> List[list]:
    """Coordinates of F restricted to the line base + u * direction, as dense polynomials in u over GF(p)."""
    p = RESTRICTION_PRIME
    forms = [gf_from_int_poly([int(q), int(b)], p) for b, q in zip(base, direction)]
    powers = {}

    def power(index: int, exponent: int) -> list:
        if (index, exponent) not in powers:
            powers[(index, exponent)] = gf_pow(forms[index], exponent, p, ZZ)
        return powers[(index, exponent)]

    restrictions = []
    for poly in F.polys:
        restricted = []
        for coefficient, exponents in poly:
            term = gf_from_int_poly([coefficient], p)
            for index, exponent in enumerate(exponents):
                if exponent:
                    term = gf_mul(term, power(index, exponent), p, ZZ)
            restricted = gf_add(restricted, term, p, ZZ)
        restrictions.append(restricted)
    return restrictions


def common_factor_report(F: HomogeneousMap, trials: int = 3, seed: int = 0) -> CommonFactorReport:
    """
    Estimate the degree of the gcd of the coordinates of F from univariate gcds on random lines.

    The minimum over trials is the generic value. When the trials disagree the number of lines is doubled once.

    Raises
    ------
    DegenerateRestriction
        If 10 * trials sampled lines all lie inside the common zero set of the coordinates.
    """
    assert trials >= 1, f"trials ({trials}) must be at least 1!"
    rng = np.random.default_rng(seed)
    target = trials
    observed = []
    attempts = 0
    while len(observed) < target:
        attempts += 1
        if attempts > 10 * target:
            raise DegenerateRestriction(
                f"{attempts - 1} random lines all lie inside the zero set of the coordinates of {F}."
            )
        base, direction = rng.integers(
            -LINE_PARAMETER_RANGE, LINE_PARAMETER_RANGE, endpoint=True, size=(2, F.k_plus_1)
        )
        restrictions = [restricted for restricted in _restrict_to_line(F, base, direction) if restricted]
        if not restrictions:
            continue
        gcd = reduce(lambda f, g: gf_gcd(f, g, RESTRICTION_PRIME, ZZ), restrictions)
        observed.append(gf_degree(gcd))
        if len(observed) == target == trials and len(set(observed)) > 1:
            warnings.warn(f"Random-line gcd degrees {observed} disagree; doubling the number of trials.")
            target = 2 * trials
    degree = min(observed)
    return CommonFactorReport(
        degree=degree,
        agreement=observed.count(degree),
        trials=len(observed),
        attempts=attempts,
        observed=tuple(observed),
    )


def common_factor_degree(F: HomogeneousMap, trials: int = 3, seed: int = 0) -> int:
    """Degree of the common factor of the coordinates of F (0 when they are coprime)."""
    return common_factor_report(F=F, trials=trials, seed=seed).degree


def strip_common_factor(F: HomogeneousMap) -> Tuple[HomogeneousMap, int]:
    """Divide the coordinates of F by their exact multivariate gcd over Z; return the reduced map and the gcd degree."""
    elements = F.to_ring_elements()
    gcd = reduce(lambda f, g: f.gcd(g), [element for element in elements if element])
    # the gcd of homogeneous polynomials is homogeneous
    factor_degree = sum(gcd.LM)
    if factor_degree == 0:
        return F, 0
    reduced = [element.exquo(gcd) for element in elements]
    return HomogeneousMap.from_ring_elements(reduced, degree=F.degree - factor_degree), factor_degree
