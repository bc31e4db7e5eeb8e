"""Algebraic-stability certificates for twisted quadratic Henon maps, decided with p-adic valuations."""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from tqdm import tqdm

from .valuation import DEFAULT_PRECISION, PadicNumber, check_prime, vp
from ..projcore.birational import BirationalPair, Direction, stability_evidence
from ..projcore.families import henon_pair, invert_matrix, twisted_pair
from ..projcore.points import RatProjPoint
from ..projcore.polymaps import evaluate_terms
from ..utils.dict import load_dict_from_file
from ..utils.errors import IndeterminateEvaluation, PrecisionExhausted
from ..utils.json_schema import load_schema, validate_with_diagnostics
from ..utils.types import FilePathType, MatrixType, RationalType, TermType

DEFAULT_SANITY_N = 50
# exact orbits of quadratic maps double their bit size every step; stop the exact search beyond this size
EXACT_ORBIT_MAX_BITS = 2**20
CERTIFICATION_SWEEP_SCHEMA = "certification_sweep_schema.json"


class Verdict(Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"


class ProofKind(Enum):
    INDUCTIVE = "inductive"
    FINITE_EVIDENCE = "finite-evidence"


@dataclass(frozen=True)
class ValuationOrbitRecord:
    """Normalized valuation vectors (minimum entry 0) along an orbit and the per-step y-dominance flags."""

    prime: int
    steps: Tuple[Tuple[Optional[int], ...], ...]
    flags: Tuple[bool, ...]

    def __post_init__(self):
        for step in self.steps:
            assert min(value for value in step if value is not None) == 0, f"Unnormalized valuation vector {step}."
        assert len(self.steps) == len(self.flags)

    @property
    def N(self) -> int:
        return len(self.steps) - 1


@dataclass(frozen=True)
class Hypothesis:
    name: str
    holds: bool
    valuations: Tuple[Optional[int], ...]


@dataclass(frozen=True)
class StabilityCertificate:
    verdict: Verdict
    proof_kind: ProofKind
    prime: int
    hypotheses: Tuple[Hypothesis, ...]
    invariant_checked_to: int
    orbit_valuations: Tuple[Tuple[Optional[int], ...], ...] = ()
    refutation_step: Optional[int] = None
    refutation_point: Optional[RatProjPoint] = None
    notes: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.verdict is Verdict.CERTIFIED:
            assert all(hypothesis.holds for hypothesis in self.hypotheses), "Certified with a failing hypothesis."
            assert self.proof_kind is ProofKind.INDUCTIVE, "Only the inductive argument certifies stability."
        if self.verdict is Verdict.REFUTED:
            assert self.refutation_step is not None, "A refutation needs the step where the orbit meets the locus."


def _padic_point(point: Sequence[RationalType], p: int, precision: int) -> List[PadicNumber]:
    return [PadicNumber.from_rational(value, p, precision) for value in point]


def _normalized_valuations(coords: Sequence[PadicNumber]) -> Tuple[Optional[int], ...]:
    finite = [value.valuation for value in coords if not value.is_zero]
    low = min(finite)
    return tuple(None if value.is_zero else value.valuation - low for value in coords)


def _dominant(valuations: Sequence[Optional[int]], index: int = 1) -> bool:
    if valuations[index] is None:
        return False
    others = [value for position, value in enumerate(valuations) if position != index]
    return all(value is None or valuations[index] < value for value in others)


def _padic_orbit(F, start: Sequence[PadicNumber], N: int, display_progress: bool = False) -> List[List[PadicNumber]]:
    """Iterate a lift over p-adic coordinates, rescaling every step so the smallest valuation is 0."""
    coords = list(start)
    prime, precision = coords[0].prime, coords[0].precision
    orbit = [coords]
    for step in tqdm(range(N), desc="p-adic orbit", disable=not display_progress):
        values = [
            value if isinstance(value, PadicNumber) else PadicNumber.from_rational(value, prime, precision)
            for value in F.values_at(coords)
        ]
        if not any(values):
            raise IndeterminateEvaluation(step=step)
        low = min(value.valuation for value in values if not value.is_zero)
        coords = [value.shifted(-low) for value in values]
        orbit.append(coords)
    return orbit


def orbit_valuations(
    pair: BirationalPair,
    start,
    p: int,
    N: int,
    direction=Direction.BACKWARD,
    precision: int = DEFAULT_PRECISION,
    display_progress: bool = False,
) -> ValuationOrbitRecord:
    """
    Valuations of the orbit of `start` under the forward or backward map of the pair.

    The orbit is computed in fixed relative precision; any cancellation that would make a valuation undecidable
    raises PrecisionExhausted instead of returning a wrong vector. The flag at step n says whether the second
    coordinate strictly dominates: v_p(y_n) < min(v_p(x_n), v_p(t_n)).

    Raises
    ------
    IndeterminateEvaluation
        With the first step at which the lift vanishes.
    """
    check_prime(p)
    assert N >= 0, f"N ({N}) must be non-negative!"
    coords = start.coords if isinstance(start, RatProjPoint) else start
    orbit = _padic_orbit(pair.map_for(direction), _padic_point(coords, p, precision), N, display_progress)
    steps = tuple(_normalized_valuations(point) for point in orbit)
    return ValuationOrbitRecord(prime=p, steps=steps, flags=tuple(_dominant(step) for step in steps))


def _henon_hypotheses(a: Fraction, b: Fraction, A_inverse: List[List[Fraction]], p: int) -> List[Hypothesis]:
    v_a, v_b = vp(a, p), vp(b, p)
    entries = [vp(entry, p) for row in A_inverse for entry in row]
    b2 = entries[4]
    others = entries[:4] + entries[5:]
    return [
        Hypothesis(name="|a|_p = 1", holds=v_a.value == 0, valuations=(v_a.to_json(),)),
        Hypothesis(name="|b|_p = 1", holds=v_b.value == 0, valuations=(v_b.to_json(),)),
        Hypothesis(
            name="|b_2|_p dominates the other entries of A^-1",
            holds=all(b2 < other for other in others),
            valuations=tuple(entry.to_json() for entry in entries),
        ),
    ]


def _as_fractions(henon_params, A_inverse_matrix) -> Tuple[Fraction, Fraction, List[List[Fraction]]]:
    a, b = (Fraction(str(value)) for value in henon_params)
    A_inverse = [[Fraction(str(entry)) for entry in row] for row in A_inverse_matrix]
    assert len(A_inverse) == 3 and all(len(row) == 3 for row in A_inverse), "A^-1 must be a 3x3 matrix."
    return a, b, A_inverse


def certify_stability_henon_A(
    henon_params: Tuple[RationalType, RationalType],
    A_inverse_matrix: MatrixType,
    p: int,
    sanity_N: int = DEFAULT_SANITY_N,
    precision: int = DEFAULT_PRECISION,
    verbose: bool = False,
) -> StabilityCertificate:
    """
    Decide algebraic stability of f o A for the quadratic Henon map f with parameters (a, b).

    When |a|_p = |b|_p = 1 and the middle entry b_2 of A^-1 is strictly p-adically larger than every other entry,
    the backward orbit of I_{f o A} keeps a strictly dominant middle coordinate forever (strong triangle inequality),
    so it never meets I_{f^-1} = [1:0:0]: the verdict is certified by induction and the invariant is also checked
    numerically up to sanity_N. Otherwise the orbits of both indeterminacy points are followed exactly; meeting the
    opposing locus refutes stability and anything else is inconclusive.

    Raises
    ------
    SingularMatrix
        If A_inverse_matrix is not invertible over Q.
    NotPrime
        If p is not a prime below 2^64.
    """
    check_prime(p)
    a, b, A_inverse = _as_fractions(henon_params, A_inverse_matrix)
    invert_matrix(A_inverse)
    hypotheses = _henon_hypotheses(a, b, A_inverse, p)
    notes = []

    if b == 0:
        notes.append("b = 0: the Henon map is not birational.")
        return StabilityCertificate(
            verdict=Verdict.INCONCLUSIVE,
            proof_kind=ProofKind.FINITE_EVIDENCE,
            prime=p,
            hypotheses=tuple(hypotheses),
            invariant_checked_to=0,
            notes=tuple(notes),
        )

    pair = twisted_pair(henon_pair(a, b), A_inverse=A_inverse, side="right")
    start = [row[1] for row in A_inverse]
    record = None
    try:
        record = orbit_valuations(pair, start, p=p, N=sanity_N, direction=Direction.BACKWARD, precision=precision)
    except (PrecisionExhausted, IndeterminateEvaluation) as error:
        notes.append(f"p-adic orbit stopped: {error}")
    orbit_record = record.steps if record is not None else ()

    if all(hypothesis.holds for hypothesis in hypotheses):
        if record is not None and all(record.flags):
            if verbose:
                print(f"Hypotheses hold at p={p}; dominance verified for n <= {sanity_N}.")
            return StabilityCertificate(
                verdict=Verdict.CERTIFIED,
                proof_kind=ProofKind.INDUCTIVE,
                prime=p,
                hypotheses=tuple(hypotheses),
                invariant_checked_to=sanity_N,
                orbit_valuations=orbit_record,
                notes=tuple(notes),
            )
        notes.append("Hypotheses hold but the finite dominance check failed.")

    evidence = stability_evidence(pair, N=sanity_N, max_bits=EXACT_ORBIT_MAX_BITS)
    if not evidence.holds:
        notes.append(f"The {evidence.failure_direction} orbit meets the opposing indeterminacy locus.")
        verdict = Verdict.REFUTED
    else:
        if evidence.checked_to < sanity_N:
            notes.append(f"Exact orbits outgrew {EXACT_ORBIT_MAX_BITS} bits after step {evidence.checked_to}.")
        verdict = Verdict.INCONCLUSIVE
    if verbose:
        print(f"Finite evidence at p={p}: {verdict.value} (checked to {evidence.checked_to}).")
    return StabilityCertificate(
        verdict=verdict,
        proof_kind=ProofKind.FINITE_EVIDENCE,
        prime=p,
        hypotheses=tuple(hypotheses),
        invariant_checked_to=evidence.checked_to,
        orbit_valuations=orbit_record,
        refutation_step=evidence.failure_step,
        refutation_point=evidence.failure_point,
        notes=tuple(notes),
    )


@dataclass
class ZariskiReport:
    prime: int
    N: int
    growth: List[bool] = field(default_factory=list)
    first_failure: Optional[int] = None
    escape_step: Optional[int] = None
    polynomial_checked: bool = False
    dominance: List[bool] = field(default_factory=list)
    valuations: List[Tuple[Optional[int], ...]] = field(default_factory=list)

    @property
    def all_hold(self) -> bool:
        return self.first_failure is None


def _exceeds_power_of_two(p: int, exponent: int, m: int) -> bool:
    """Exact test of p^exponent > 2^m."""
    if exponent <= 0:
        return False
    return p**exponent > 2**m


def _growth_holds(valuations: Sequence[Optional[int]], p: int, n: int) -> bool:
    """|y_n| > 2^(n+1) |x_n| > 4^(n+1) |t_n| != 0, compared as exact powers of p and 2."""
    v_x, v_y, v_t = valuations
    if v_t is None or v_x is None or v_y is None:
        return False
    return _exceeds_power_of_two(p, v_x - v_y, n + 1) and _exceeds_power_of_two(p, v_t - v_x, n + 1)


def zariski_density_check(
    henon_params: Tuple[RationalType, RationalType],
    A_inverse_matrix: MatrixType,
    p: int,
    N: int,
    P: Optional[Sequence[TermType]] = None,
    precision: int = DEFAULT_PRECISION,
) -> ZariskiReport:
    """
    Check the growth inequalities |y_n|_p > 2^(n+1)|x_n|_p > 4^(n+1)|t_n|_p != 0 along the backward orbit of
    A^-1(I_f) for n <= N and, if a homogeneous polynomial P is given, find the first n with P(x_n, y_n, t_n) != 0.

    P is a list of (coefficient, exponent vector) terms. Steps where cancellation leaves the value of P undecided
    count as not escaping.

    Raises
    ------
    IndeterminateEvaluation
        If the orbit is undefined before step N.
    """
    check_prime(p)
    a, b, A_inverse = _as_fractions(henon_params, A_inverse_matrix)
    pair = twisted_pair(henon_pair(a, b), A_inverse=A_inverse, side="right")
    start = _padic_point([row[1] for row in A_inverse], p, precision)
    orbit = _padic_orbit(pair.backward, start, N)
    report = ZariskiReport(prime=p, N=N, polynomial_checked=P is not None)
    for n, coords in enumerate(orbit):
        valuations = _normalized_valuations(coords)
        report.valuations.append(valuations)
        report.dominance.append(_dominant(valuations))
        report.growth.append(_growth_holds(valuations, p, n))
        if not report.growth[-1] and report.first_failure is None:
            report.first_failure = n
        if P is not None and report.escape_step is None:
            try:
                if evaluate_terms(P, coords):
                    report.escape_step = n
            except PrecisionExhausted:
                pass
    return report


def certificate_to_dict(certificate: StabilityCertificate) -> dict:
    return dict(
        verdict=certificate.verdict.value,
        proof_kind=certificate.proof_kind.value,
        prime=certificate.prime,
        hypotheses=[
            dict(name=hypothesis.name, holds=hypothesis.holds, valuations=list(hypothesis.valuations))
            for hypothesis in certificate.hypotheses
        ],
        invariant_checked_to=certificate.invariant_checked_to,
        orbit_valuations=[list(step) for step in certificate.orbit_valuations],
        refutation_step=certificate.refutation_step,
        refutation_point=certificate.refutation_point.to_strings() if certificate.refutation_point else None,
        notes=list(certificate.notes),
    )


def load_sweep(file_path: FilePathType) -> dict:
    """Load and validate a certification sweep file."""
    sweep = load_dict_from_file(file_path=file_path)
    validate_with_diagnostics(instance=sweep, schema=load_schema(CERTIFICATION_SWEEP_SCHEMA), source=str(file_path))
    return sweep


def sweep_certify(
    configurations: Sequence[dict], sanity_N: int = DEFAULT_SANITY_N, display_progress: bool = False
) -> List[StabilityCertificate]:
    """
    Certify every configuration {"a", "b", "A_inverse", "p"[, "sanity_N"]} of a sweep, in input order.

    Missing a and b default to 1.
    """
    return [
        certify_stability_henon_A(
            henon_params=(configuration.get("a", 1), configuration.get("b", 1)),
            A_inverse_matrix=configuration["A_inverse"],
            p=configuration["p"],
            sanity_N=configuration.get("sanity_N", sanity_N),
        )
        for configuration in tqdm(configurations, desc="certifying configurations", disable=not display_progress)
    ]
