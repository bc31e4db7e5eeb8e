"""Birational pairs, their declared indeterminacy loci and the finite diagnostics run on them."""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from sympy import Matrix
from sympy.polys.domains import ZZ
from sympy.polys.rings import xring
from tqdm import tqdm

from .composition import DEFAULT_MONOMIAL_BUDGET, common_factor_degree, compose, strip_common_factor
from .points import RatProjPoint, random_points
from .polymaps import HomogeneousMap, evaluate
from ..utils.errors import DimensionMismatch, IndeterminateEvaluation, SpecificationError, WrongDimension

# Exact gcd stripping between composition steps is only attempted below this many monomials.
STRIP_MONOMIAL_LIMIT = 5_000


class Direction(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"

    @classmethod
    def _missing_(cls, value):
        # heights use plus/minus for the same two directions
        return {"plus": cls.FORWARD, "minus": cls.BACKWARD, "+": cls.FORWARD, "-": cls.BACKWARD}.get(value)


class LocusKind(Enum):
    POINT_LIST = "points"
    LINEAR_SUBSPACE = "linear"


@dataclass(frozen=True)
class LocusDescription:
    """
    A user-declared indeterminacy locus: either finitely many points or the projective span of its generators.
    """

    kind: LocusKind
    generators: Tuple[RatProjPoint, ...]
    declared_dimension: int

    def __post_init__(self):
        if not self.generators:
            raise SpecificationError("A locus needs at least one generator.")
        if len({point.k for point in self.generators}) != 1:
            labels = [str(point) for point in self.generators]
            raise DimensionMismatch(f"Locus generators live in different dimensions: {labels}.")
        if self.kind is LocusKind.POINT_LIST and self.declared_dimension != 0:
            raise SpecificationError(f"A point-list locus has dimension 0, not {self.declared_dimension}.")
        if self.kind is LocusKind.LINEAR_SUBSPACE:
            if len(self.generators) != self.declared_dimension + 1:
                raise SpecificationError(
                    f"A linear locus of dimension {self.declared_dimension} needs {self.declared_dimension + 1} "
                    f"generators; {len(self.generators)} were given."
                )
            if self._rank(self.generators) != len(self.generators):
                raise SpecificationError(
                    f"Generators {[str(p) for p in self.generators]} are not projectively independent."
                )

    @staticmethod
    def _rank(points) -> int:
        return Matrix([list(point.coords) for point in points]).rank()

    @classmethod
    def points(cls, *points: RatProjPoint):
        return cls(kind=LocusKind.POINT_LIST, generators=tuple(points), declared_dimension=0)

    @classmethod
    def linear(cls, *generators: RatProjPoint):
        return cls(
            kind=LocusKind.LINEAR_SUBSPACE, generators=tuple(generators), declared_dimension=len(generators) - 1
        )

    @property
    def k(self) -> int:
        return self.generators[0].k

    def contains(self, point: RatProjPoint) -> bool:
        if self.kind is LocusKind.POINT_LIST:
            return point in self.generators
        return self._rank(self.generators + (point,)) == len(self.generators)

    def transported(self, linear: HomogeneousMap) -> "LocusDescription":
        """Image of the locus under an invertible linear map."""
        assert linear.degree == 1, "Only linear maps transport loci."
        return LocusDescription(
            kind=self.kind,
            generators=tuple(evaluate(linear, point) for point in self.generators),
            declared_dimension=self.declared_dimension,
        )

    def __str__(self):
        return f"{self.kind.value}({', '.join(str(point) for point in self.generators)})"


@dataclass(frozen=True)
class BirationalPair:
    """
    A birational self-map of P^k given by a lift and a lift of its inverse.

    s is the exponent with d^s = delta^(k-s); ind_forward and ind_backward are the declared loci I_f and I_{f^-1}.
    """

    forward: HomogeneousMap
    backward: HomogeneousMap
    s: int
    ind_forward: LocusDescription
    ind_backward: LocusDescription
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if self.forward.k_plus_1 != self.backward.k_plus_1:
            raise DimensionMismatch(f"Forward map acts on P^{self.forward.k}, backward on P^{self.backward.k}.")
        for label, locus in (("ind_forward", self.ind_forward), ("ind_backward", self.ind_backward)):
            if locus.k != self.k:
                raise DimensionMismatch(f"{label} lives in P^{locus.k}; the maps act on P^{self.k}.")
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

    def map_for(self, direction) -> HomogeneousMap:
        return self.forward if Direction(direction) is Direction.FORWARD else self.backward

    def degree_for(self, direction) -> int:
        return self.map_for(direction).degree

    def inverse(self) -> "BirationalPair":
        """The pair describing f^-1, whose exponent is k - s."""
        return BirationalPair(
            forward=self.backward,
            backward=self.forward,
            s=self.k - self.s,
            ind_forward=self.ind_backward,
            ind_backward=self.ind_forward,
            name=f"inverse of {self.name}" if self.name else None,
        )

    def avoids_loci(self, point: RatProjPoint) -> bool:
        return not (self.ind_forward.contains(point) or self.ind_backward.contains(point))


@dataclass
class ValidationReport:
    degrees_consistent: bool
    loci_vanish: bool
    dims_match: bool
    birational: bool
    witnesses_checked: int = 0
    messages: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.degrees_consistent and self.loci_vanish and self.dims_match and self.birational


def vanishes_on(F: HomogeneousMap, locus: LocusDescription) -> bool:
    """
    Check that every coordinate of F vanishes on the locus.

    Point lists are checked pointwise; linear subspaces symbolically on the parametrization sum_j lambda_j g_j.
    """
    if locus.kind is LocusKind.POINT_LIST:
        return all(not any(F.values_at(point.coords)) for point in locus.generators)
    _, parameters = xring(",".join(f"l{index}" for index in range(len(locus.generators))), ZZ)
    parametrization = [
        sum(generator[index] * parameter for generator, parameter in zip(locus.generators, parameters))
        for index in range(F.k_plus_1)
    ]
    return all(not value for value in F.values_at(parametrization))


def validate_pair(pair: BirationalPair, witnesses: int = 20, seed: int = 0, bound: int = 1000) -> ValidationReport:
    """
    Run the consistency checks of a birational pair and collect failures in a report instead of raising.

    Besides the degree identity, locus vanishing and locus dimensions, birationality is witnessed pointwise:
    backward(forward(x)) must equal x at `witnesses` seeded random points off the declared loci.
    """
    k, s, d, delta = pair.k, pair.s, pair.d, pair.delta
    messages = []

    degrees_consistent = d**s == delta ** (k - s)
    if not degrees_consistent:
        messages.append(f"d^s = {d}^{s} = {d**s} differs from delta^(k-s) = {delta}^{k - s} = {delta ** (k - s)}.")

    loci_vanish = True
    checks = (("forward", pair.forward, pair.ind_forward), ("backward", pair.backward, pair.ind_backward))
    for label, F, locus in checks:
        if not vanishes_on(F, locus):
            loci_vanish = False
            messages.append(f"The {label} map does not vanish on its declared locus {locus}.")

    dims_match = pair.ind_forward.declared_dimension == k - s - 1 and pair.ind_backward.declared_dimension == s - 1
    if not dims_match:
        messages.append(
            f"Locus dimensions ({pair.ind_forward.declared_dimension}, {pair.ind_backward.declared_dimension}) "
            f"differ from (k-s-1, s-1) = ({k - s - 1}, {s - 1})."
        )

    birational = True
    checked = 0
    samples = random_points(k=k, count=witnesses, bound=bound, seed=seed, exclude=lambda x: not pair.avoids_loci(x))
    for point in samples:
        try:
            image = evaluate(pair.forward, point)
            round_trip = evaluate(pair.backward, image)
        except IndeterminateEvaluation:
            messages.append(f"Witness {point} maps into the indeterminacy of the inverse; skipped.")
            continue
        checked += 1
        if round_trip != point:
            birational = False
            messages.append(f"backward(forward({point})) = {round_trip}.")
    if checked == 0:
        birational = False
        messages.append("No witness point could be evaluated in both directions.")

    return ValidationReport(
        degrees_consistent=degrees_consistent,
        loci_vanish=loci_vanish,
        dims_match=dims_match,
        birational=birational,
        witnesses_checked=checked,
        messages=messages,
    )


def degree_sequence(
    pair: BirationalPair,
    direction=Direction.FORWARD,
    N: int = 1,
    monomial_budget: int = DEFAULT_MONOMIAL_BUDGET,
    trials: int = 3,
    seed: int = 0,
    display_progress: bool = False,
) -> List[int]:
    """
    Effective degrees [deg f, deg f^2, ..., deg f^N] of the iterates in the given direction.

    Each iterate is built as F o F^(n-1). Its effective degree is the formal degree minus the degree of the common
    factor of its coordinates. Factors found on small iterates are divided out exactly before the next composition.

    Raises
    ------
    ResourceLimit
        If an iterate exceeds monomial_budget monomials.
    """
    assert N >= 1, f"N ({N}) must be at least 1!"
    F = pair.map_for(direction)
    current = F
    degrees = []
    for n in tqdm(range(1, N + 1), desc="composing iterates", disable=not display_progress):
        if n > 1:
            current = compose(F, current, check_common_factor=False, monomial_budget=monomial_budget)
        factor_degree = common_factor_degree(current, trials=trials, seed=seed + n)
        degrees.append(current.degree - factor_degree)
        if factor_degree > 0 and current.monomial_count <= STRIP_MONOMIAL_LIMIT:
            current, _ = strip_common_factor(current)
    return degrees


def dynamical_degree_estimate(degrees: List[int]) -> float:
    """(deg f^N)^(1/N) for the last computed iterate."""
    assert degrees, "At least one degree is needed."
    return math.exp(math.log(degrees[-1]) / len(degrees))


@dataclass
class StabilityEvidence:
    """Finite evidence that no forward orbit of I_{f^-1} meets I_f and no backward orbit of I_f meets I_{f^-1}."""

    holds: bool
    checked_to: int
    failure_direction: Optional[str] = None
    failure_step: Optional[int] = None
    failure_point: Optional[RatProjPoint] = None


def _orbit_avoids(
    F: HomogeneousMap, start: RatProjPoint, avoided: LocusDescription, N: int, max_bits: Optional[int]
) -> Tuple[Optional[tuple], int]:
    """Return the (step, point) where the orbit meets `avoided` or leaves the domain, and the last step checked."""
    point = start
    for step in range(N + 1):
        if step > 0:
            if max_bits is not None and point.bit_size() > max_bits:
                return None, step - 1
            try:
                point = evaluate(F, point, step=step - 1)
            except IndeterminateEvaluation:
                return (step - 1, point), step - 1
        if avoided.contains(point):
            return (step, point), step
    return None, N


def stability_evidence(pair: BirationalPair, N: int, max_bits: Optional[int] = None) -> StabilityEvidence:
    """
    Follow the orbits of the indeterminacy points for N steps in both directions.

    With max_bits set, an orbit whose coordinates outgrow that many bits is abandoned and checked_to reports the
    last step reached by every orbit.

    Raises
    ------
    WrongDimension
        If a locus is not a point list, since positive-dimensional orbits cannot be followed pointwise.
    """
    for locus in (pair.ind_forward, pair.ind_backward):
        if locus.kind is not LocusKind.POINT_LIST:
            raise WrongDimension(
                f"Orbit evidence needs point-list loci; {locus} has dimension {locus.declared_dimension}."
            )
    sides = (
        (Direction.FORWARD, pair.forward, pair.ind_backward, pair.ind_forward),
        (Direction.BACKWARD, pair.backward, pair.ind_forward, pair.ind_backward),
    )
    checked_to = N
    for direction, F, starts, avoided in sides:
        for start in starts.generators:
            failure, reached = _orbit_avoids(F, start, avoided, N, max_bits)
            if failure is not None:
                step, point = failure
                return StabilityEvidence(
                    holds=False,
                    checked_to=step,
                    failure_direction=direction.value,
                    failure_step=step,
                    failure_point=point,
                )
            checked_to = min(checked_to, reached)
    return StabilityEvidence(holds=True, checked_to=checked_to)
