"""Multistart damped Newton search for periodic points in the affine chart t = 1."""
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from ..greenc.lift import ComplexLift, ComplexPair, CProjPoint, sup_norm
from ..greenc.potentials import fs_distance
from ..projcore.birational import LocusKind
from ..utils.errors import NoConvergence

DEFAULT_TOLERANCE = 1e-10
DAMPING_FACTOR = 0.5
MAX_NEWTON_STEPS = 200
MAX_HALVINGS = 20
POLISH_STEPS = 3
STARTS_PER_POINT = 50
DEFAULT_START_RADIUS = 3.0
ESCAPE_RADIUS = 1e8
# residual of f^m(x) - x below which x is taken to have period m
PERIOD_TOLERANCE = 1e-7


@dataclass
class PeriodicPointSet:
    period: int
    points: List[CProjPoint]
    multipliers: List[np.ndarray]
    residuals: List[float]
    least_periods: List[int]
    dedup_tol: float
    tol: float = DEFAULT_TOLERANCE
    starts: int = 0
    seed: int = 0
    exact_points: Optional[list] = None
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        assert len(self.points) == len(self.residuals) == len(self.multipliers) == len(self.least_periods)

    def __len__(self):
        return len(self.points)

    @property
    def is_empty(self) -> bool:
        return not self.points

    @property
    def saddle(self) -> List[bool]:
        return [bool(moduli.min() < 1 < moduli.max()) for moduli in self.multipliers]

    def affine_coords(self) -> np.ndarray:
        """Affine coordinates (x_0/x_k, ..., x_(k-1)/x_k) of every point, shape (count, k)."""
        if self.is_empty:
            return np.empty((0, 0), dtype=complex)
        coords = np.array([point.coords for point in self.points])
        return coords[:, :-1] / coords[:, -1:]

    def to_dict(self) -> dict:
        return dict(
            period=self.period,
            tol=self.tol,
            dedup_tol=self.dedup_tol,
            starts=self.starts,
            seed=self.seed,
            points=[
                dict(
                    coords=[[repr(value.real), repr(value.imag)] for value in affine],
                    residual=residual,
                    least_period=least_period,
                    multipliers=moduli.tolist(),
                    saddle=saddle,
                )
                for affine, residual, least_period, moduli, saddle in zip(
                    self.affine_coords(), self.residuals, self.least_periods, self.multipliers, self.saddle
                )
            ],
            exact_points=self.exact_points,
            notes=self.notes,
        )


def _iterate_with_jacobian(F: ComplexLift, points: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    F^n(p) and its Jacobian for a batch of points, both rescaled by the same factor after every step so that
    affine quotients and their derivatives are unchanged.
    """
    current = points
    jacobian = np.broadcast_to(np.eye(F.k_plus_1, dtype=complex), points.shape + (F.k_plus_1,)).copy()
    for _ in range(n):
        jacobian = F.jacobian(current) @ jacobian
        current = F.evaluate(current)
        scale = sup_norm(current)
        scale = np.where(scale > 0, scale, 1.0)
        current = current / scale[..., None]
        jacobian = jacobian / scale[..., None, None]
    return current, jacobian


def _affine_map(F: ComplexLift, z: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Affine image g(z), its Jacobian dg/dz and the last homogeneous coordinate of F^n(z, 1)."""
    points = np.concatenate([z, np.ones(z.shape[:-1] + (1,), dtype=complex)], axis=-1)
    image, jacobian = _iterate_with_jacobian(F, points, n)
    last = image[..., -1]
    safe = np.where(np.abs(last) > 0, last, np.nan)
    g = image[..., :-1] / safe[..., None]
    # quotient rule: dg_i/dz_j = (J_ij t - F_i J_kj) / t^2 over affine columns j
    affine_jacobian = (
        jacobian[..., :-1, :-1] * safe[..., None, None] - image[..., :-1, None] * jacobian[..., -1:, :-1]
    ) / (safe[..., None, None] ** 2)
    return g, affine_jacobian, last


def cycle_jacobian(F: ComplexLift, x: CProjPoint, n: int) -> np.ndarray:
    """Jacobian of the affine expression of f^n at x; its eigenvalues are the cycle multipliers."""
    coords = x.coords
    _, jacobian, _ = _affine_map(F, (coords[:-1] / coords[-1])[None, :], n)
    return jacobian[0]


def _residual(F: ComplexLift, z: np.ndarray, n: int) -> np.ndarray:
    g, _, _ = _affine_map(F, z, n)
    return np.linalg.norm(g - z, axis=-1)


def least_period(F: ComplexLift, x: CProjPoint, n: int, tolerance: float = PERIOD_TOLERANCE) -> int:
    """Smallest divisor m of n with |f^m(x) - x| below tolerance in affine coordinates."""
    z = (x.coords[:-1] / x.coords[-1])[None, :]
    for m in range(1, n + 1):
        if n % m == 0 and _residual(F, z, m)[0] < tolerance:
            return m
    return n


def _newton(F: ComplexLift, z: np.ndarray, n: int, tol: float, display_progress: bool) -> Tuple[np.ndarray, np.ndarray]:
    """Backtracking Newton on g(z) - z; every rejected trial step is halved (factor 0.5)."""
    identity = np.eye(z.shape[-1])
    g, jacobian, _ = _affine_map(F, z, n)
    residual = np.linalg.norm(g - z, axis=-1)
    active = np.isfinite(residual)
    polished = np.zeros(len(z), dtype=int)
    for _ in tqdm(range(MAX_NEWTON_STEPS), desc=f"Newton (period {n})", disable=not display_progress):
        if not active.any():
            break
        indices = np.flatnonzero(active)
        try:
            step = np.linalg.solve(jacobian[indices] - identity, (z[indices] - g[indices])[..., None])[..., 0]
        except np.linalg.LinAlgError:
            systems = zip(jacobian[indices] - identity, z[indices] - g[indices])
            step = np.stack([np.linalg.lstsq(matrix, rhs, rcond=None)[0] for matrix, rhs in systems])
        length = np.ones(len(indices))
        accepted = np.zeros(len(indices), dtype=bool)
        for _ in range(MAX_HALVINGS):
            pending = ~accepted
            trial = z[indices[pending]] + length[pending, None] * step[pending]
            trial_g, trial_jacobian, _ = _affine_map(F, trial, n)
            trial_residual = np.linalg.norm(trial_g - trial, axis=-1)
            better = np.isfinite(trial_residual) & (trial_residual < residual[indices[pending]])
            chosen = indices[pending][better]
            z[chosen] = trial[better]
            g[chosen] = trial_g[better]
            jacobian[chosen] = trial_jacobian[better]
            residual[chosen] = trial_residual[better]
            accepted[np.flatnonzero(pending)[better]] = True
            if accepted.all():
                break
            length[~accepted] *= DAMPING_FACTOR
        stalled = indices[~accepted]
        escaped = np.linalg.norm(z, axis=-1) > ESCAPE_RADIUS
        converged = residual < tol
        polished[converged & active] += 1
        active &= ~escaped & (polished <= POLISH_STEPS)
        active[stalled] = False
    return z, residual


def _deduplicate(candidates: List[np.ndarray], dedup_tol: float) -> List[CProjPoint]:
    """Sequential reduction over candidates sorted lexicographically by their affine coordinates."""
    order = sorted(range(len(candidates)), key=lambda i: tuple((v.real, v.imag) for v in candidates[i]))
    kept: List[CProjPoint] = []
    for index in order:
        point = CProjPoint.from_coords(np.append(candidates[index], 1.0))
        if all(fs_distance(point, other) > dedup_tol for other in kept):
            kept.append(point)
    return kept


def periodic_points_numeric(
    pair: ComplexPair,
    n: int = 1,
    starts: Optional[int] = None,
    seed: int = 0,
    tol: float = DEFAULT_TOLERANCE,
    radius: float = DEFAULT_START_RADIUS,
    display_progress: bool = False,
) -> PeriodicPointSet:
    """
    Points x of the affine chart with f^n(x) = x, found by damped Newton from random complex starts.

    Parameters
    ----------
    pair : ComplexPair
    n : int
        Period.
    starts : int, optional
        Number of random starts; defaults to 50 d^n.
    seed : int
    tol : float
        Residual tolerance; points are deduplicated at 10 tol in Fubini-Study distance.
    radius : float
        Real and imaginary parts of start coordinates are uniform in [-radius, radius].

    Returns
    -------
    PeriodicPointSet
        Possibly empty; an empty set carries a NoConvergence note and triggers a warning.
    """
    assert n >= 1, f"The period n ({n}) must be at least 1!"
    F = pair.forward
    if starts is None:
        starts = STARTS_PER_POINT * F.degree**n
    assert starts >= 0, f"starts ({starts}) must be non-negative!"
    dedup_tol = 10 * tol
    notes = []
    candidates = []
    if starts:
        rng = np.random.default_rng(seed)
        shape = (starts, pair.k)
        z = rng.uniform(-radius, radius, size=shape) + 1j * rng.uniform(-radius, radius, size=shape)
        with np.errstate(all="ignore"):
            z, residual = _newton(F, z, n, tol, display_progress)
        converged = np.isfinite(residual) & (residual < tol)
        discarded = int(np.count_nonzero(~converged))
        if discarded:
            notes.append(f"{discarded} of {starts} starts did not converge and were discarded.")
        candidates = list(z[converged])

    points = _deduplicate(candidates, dedup_tol)
    if pair.ind_forward.kind is LocusKind.POINT_LIST and pair.ind_backward.kind is LocusKind.POINT_LIST:
        loci = pair.ind_forward.points + pair.ind_backward.points
        points = [point for point in points if all(fs_distance(point, other) > dedup_tol for other in loci)]

    if not points:
        message = f"NoConvergence: no period-{n} point found from {starts} starts."
        notes.append(message)
        warnings.warn(message)
    affine = [point.coords[:-1] / point.coords[-1] for point in points]
    residuals = [float(_residual(F, z[None, :], n)[0]) for z in affine]
    multipliers = [np.sort(np.abs(np.linalg.eigvals(cycle_jacobian(F, point, n)))) for point in points]
    return PeriodicPointSet(
        period=n,
        points=points,
        multipliers=multipliers,
        residuals=residuals,
        least_periods=[least_period(F, point, n) for point in points],
        dedup_tol=dedup_tol,
        tol=tol,
        starts=starts,
        seed=seed,
        notes=notes,
    )


def require_points(point_set: PeriodicPointSet) -> PeriodicPointSet:
    """Raise NoConvergence for an empty set (used where an empty result is fatal)."""
    if point_set.is_empty:
        raise NoConvergence(point_set.notes[-1] if point_set.notes else f"No period-{point_set.period} point found.")
    return point_set

