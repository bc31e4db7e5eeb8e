"""The Lee lower bound on heights along both orbits and the shifted-height recursion built on it."""
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

import mpmath
import pandas as pd
from tqdm import tqdm

from .naive import naive_height, sample_points
from ..projcore.birational import BirationalPair, validate_pair
from ..projcore.points import RatProjPoint
from ..projcore.polymaps import evaluate, orbit
from ..utils.errors import IndeterminateEvaluation, SpecificationError

# working decimal digits for logarithms of orbit coordinates
HPRIME_DPS = 50
COMPARISON_MARGIN = 1e-12
LEE_SCAN_COLUMNS = ["point", "h", "h_f", "h_finv", "defect"]


def _defect(d: int, delta: int, h: float, h_f: float, h_finv: float) -> float:
    return h_f / d + h_finv / delta - (1 + 1 / (d * delta)) * h


def lee_admissible(pair: BirationalPair, x: RatProjPoint) -> bool:
    """
    True when x, f(x) and f^-1(x) all avoid both indeterminacy loci.

    Points failing this have no defined grand orbit and the Lee defect is unbounded below on them; for the Henon
    family they are exactly the points of the line at infinity t = 0.
    """
    if not pair.avoids_loci(x):
        return False
    try:
        return pair.avoids_loci(evaluate(pair.forward, x)) and pair.avoids_loci(evaluate(pair.backward, x))
    except IndeterminateEvaluation:
        return False


def lee_defect(pair: BirationalPair, x: RatProjPoint) -> float:
    """
    (1/d) h(f(x)) + (1/delta) h(f^-1(x)) - (1 + 1/(d delta)) h(x).

    The images are computed exactly; only the three logarithms are floating point.
    """
    return _defect(
        pair.d,
        pair.delta,
        naive_height(x),
        naive_height(evaluate(pair.forward, x)),
        naive_height(evaluate(pair.backward, x)),
    )


@dataclass
class LeeReport:
    sample_size: int
    min_defect: float
    argmin_point: RatProjPoint
    estimated_C: float
    skipped: int = 0
    rows: List[dict] = field(default_factory=list, repr=False)

    def to_table(self) -> pd.DataFrame:
        """One row per sampled point with columns point, h, h_f, h_finv, defect."""
        return pd.DataFrame(self.rows, columns=LEE_SCAN_COLUMNS)

    def to_dict(self) -> dict:
        return dict(
            sample_size=self.sample_size,
            min_defect=self.min_defect,
            argmin_point=str(self.argmin_point),
            estimated_C=self.estimated_C,
            skipped=self.skipped,
        )


def lee_scan(
    pair: BirationalPair,
    count: int = 1000,
    bound: int = 100,
    seed: int = 0,
    points: Optional[Sequence[RatProjPoint]] = None,
    validate: bool = True,
    display_progress: bool = False,
) -> LeeReport:
    """
    Minimum of the Lee defect over random rational points, and the constant C it suggests.

    Parameters
    ----------
    pair : BirationalPair
    count : int
        Number of points to sample; ignored when `points` is given. Sampled points satisfy lee_admissible.
    bound : int
        Coordinates are drawn uniformly from [-bound, bound].
    seed : int
    points : sequence of RatProjPoint, optional
        Explicit points to scan instead of a random sample.
    validate : bool
        Run validate_pair first and refuse pairs that fail it.
    display_progress : bool

    Raises
    ------
    SpecificationError
        If validation is requested and the pair fails it.
    """
    assert count >= 1, f"count ({count}) must be at least 1!"
    if validate:
        validation = validate_pair(pair, seed=seed)
        if not validation.passed:
            messages = "\n".join(validation.messages)
            raise SpecificationError(f"Refusing to scan a pair that fails validation:\n{messages}")
    if points is None:
        points = sample_points(
            k=pair.k, count=count, bound=bound, seed=seed, exclude=lambda point: not lee_admissible(pair, point)
        )
    rows, scanned = [], []
    skipped = 0
    for x in tqdm(points, desc="Scanning Lee defects", disable=not display_progress):
        try:
            h_f = naive_height(evaluate(pair.forward, x))
            h_finv = naive_height(evaluate(pair.backward, x))
        except IndeterminateEvaluation:
            skipped += 1
            continue
        h = naive_height(x)
        defect = _defect(pair.d, pair.delta, h, h_f, h_finv)
        rows.append(dict(point=str(x), h=h, h_f=h_f, h_finv=h_finv, defect=defect))
        scanned.append(x)
    if skipped:
        warnings.warn(f"{skipped} sampled points lie on an undeclared indeterminacy locus and were skipped.")
    assert rows, "Every scanned point was indeterminate."
    worst_index = min(range(len(rows)), key=lambda index: rows[index]["defect"])
    worst, argmin_point = rows[worst_index], scanned[worst_index]
    return LeeReport(
        sample_size=len(rows),
        min_defect=worst["defect"],
        argmin_point=argmin_point,
        estimated_C=max(0.0, -worst["defect"]),
        skipped=skipped,
        rows=rows,
    )


def lee_kappa(C: float, d: int, delta: int) -> float:
    """Shift kappa = -C D / (D + 1 - d - delta) turning the Lee inequality into a homogeneous one for h + kappa."""
    D = d * delta
    denominator = D + 1 - d - delta
    assert denominator != 0, f"The shift is undefined for d={d}, delta={delta}; both degrees must exceed 1."
    return -C * D / denominator


def c_sequence(D: int, N: int) -> List[Fraction]:
    """c_0 = 1 and c_n = (D^n + 1) / D^n for n = 1..N."""
    return [Fraction(1)] + [Fraction(D**n + 1, D**n) for n in range(1, N + 1)]


@dataclass
class HPrimeReport:
    """
    Values h'_0 = h'(x) and h'_n = d^-n h'(f^n x) + delta^-n h'(f^-n x) for n >= 1, with h' = h + kappa, checked
    against h'_n >= (c_n / c_(n-1)) h'_(n-1) at every step and against the telescoped bound h'_N >= c_N h'(x).
    """

    point: RatProjPoint
    lee_constant: float
    kappa: float
    D: int
    values: List[float]
    required_ratios: List[Fraction]
    observed_ratios: List[Optional[float]]
    step_holds: List[bool]
    vacuous_steps: List[int]
    final_bound: float
    final_bound_holds: bool
    min_orbit_defect: float

    @property
    def passed(self) -> bool:
        return all(self.step_holds) and self.final_bound_holds

    def to_dict(self) -> dict:
        return dict(
            point=str(self.point),
            lee_constant=self.lee_constant,
            kappa=self.kappa,
            D=self.D,
            values=self.values,
            required_ratios=[str(ratio) for ratio in self.required_ratios],
            observed_ratios=self.observed_ratios,
            step_holds=self.step_holds,
            vacuous_steps=self.vacuous_steps,
            final_bound=self.final_bound,
            final_bound_holds=self.final_bound_holds,
            min_orbit_defect=self.min_orbit_defect,
            passed=self.passed,
        )


def _at_least(left, right) -> bool:
    return left - right >= -COMPARISON_MARGIN * (1 + abs(left) + abs(right))


def hprime_recursion_check(pair: BirationalPair, x: RatProjPoint, N: int = 6, C: float = 0.0) -> HPrimeReport:
    """
    Verify the shifted-height recursion along the forward and backward orbits of x.

    Orbits are exact; the logarithms of their coordinates are taken with mpmath at 50 digits and the comparisons
    allow a relative margin of 1e-12. Steps with h'_(n-1) = 0 have no observed ratio and are reported as vacuous.

    Raises
    ------
    IndeterminateEvaluation
        If either orbit is undefined before step N.
    """
    assert N >= 1, f"N ({N}) must be at least 1!"
    assert C >= 0, f"The Lee constant C ({C}) must be non-negative!"
    d, delta = pair.d, pair.delta
    D = d * delta
    kappa = lee_kappa(C, d, delta)
    c = c_sequence(D, N)
    with mpmath.workdps(HPRIME_DPS):
        forward = [mpmath.log(point.max_abs()) for point in orbit(pair.forward, x, N)]
        backward = [mpmath.log(point.max_abs()) for point in orbit(pair.backward, x, N)]
        shift = mpmath.mpf(kappa)
        # h'_0 = h'(x), not the n = 0 case of the orbit sum
        values = [forward[0] + shift]
        values += [(forward[n] + shift) / d**n + (backward[n] + shift) / delta**n for n in range(1, N + 1)]

        required_ratios, observed_ratios, step_holds, vacuous_steps = [], [], [], []
        for n in range(1, N + 1):
            ratio = c[n] / c[n - 1]
            required_ratios.append(ratio)
            step_holds.append(_at_least(values[n], values[n - 1] * ratio.numerator / ratio.denominator))
            if values[n - 1] == 0:
                vacuous_steps.append(n)
                observed_ratios.append(None)
            else:
                observed_ratios.append(float(values[n] / values[n - 1]))
        final_bound = (forward[0] + shift) * c[N].numerator / c[N].denominator
        final_bound_holds = _at_least(values[N], final_bound)

        inverse_D = mpmath.mpf(1) / D
        defects = [forward[1] / d + backward[1] / delta - (1 + inverse_D) * forward[0]]
        for m in range(1, N):
            defects.append(forward[m + 1] / d + forward[m - 1] / delta - (1 + inverse_D) * forward[m])
            defects.append(backward[m - 1] / d + backward[m + 1] / delta - (1 + inverse_D) * backward[m])
        min_orbit_defect = float(min(defects))

    if vacuous_steps:
        warnings.warn(f"h'_(n-1) vanishes at steps {vacuous_steps}; the ratio check is vacuous there.")
    if min_orbit_defect < -C - COMPARISON_MARGIN:
        warnings.warn(
            f"The Lee constant C={C} does not cover the orbit of {x} (minimal defect {min_orbit_defect}); "
            "the recursion is not guaranteed."
        )
    return HPrimeReport(
        point=x,
        lee_constant=C,
        kappa=kappa,
        D=D,
        values=[float(value) for value in values],
        required_ratios=required_ratios,
        observed_ratios=observed_ratios,
        step_holds=step_holds,
        vacuous_steps=vacuous_steps,
        final_bound=float(final_bound),
        final_bound_holds=final_bound_holds,
        min_orbit_defect=min_orbit_defect,
    )


def _hprime_task(arguments) -> HPrimeReport:
    pair, x, N, C = arguments
    return hprime_recursion_check(pair, x, N=N, C=C)


def hprime_batch(
    pair: BirationalPair,
    points: Sequence[RatProjPoint],
    N: int = 6,
    C: float = 0.0,
    workers: int = 1,
    display_progress: bool = False,
) -> List[HPrimeReport]:
    """
    Run hprime_recursion_check on every point, in input order.

    With workers > 1 the points are spread over a process pool; results are identical to the serial run.
    """
    assert workers >= 1, f"workers ({workers}) must be at least 1!"
    tasks = [(pair, x, N, C) for x in points]
    if workers == 1:
        return [_hprime_task(task) for task in tqdm(tasks, desc="h' recursion", disable=not display_progress)]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(
            tqdm(executor.map(_hprime_task, tasks), total=len(tasks), desc="h' recursion", disable=not display_progress)
        )
