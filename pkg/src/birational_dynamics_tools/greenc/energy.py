"""Partial sums of the finite energy condition along the orbits of the indeterminacy loci."""
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from .lift import ComplexLift, ComplexPair, sup_norm
from .potentials import fs_distance, iterate_normalized, phi_f, phi_values
from ..projcore.birational import Direction, LocusKind
from ..utils.checks import calculate_geometric_ratio, is_cauchy
from ..utils.errors import NearIndeterminate, WrongDimension

DEFAULT_MONTE_CARLO_SAMPLES = 2_000


class EnergyMethod(Enum):
    POINT_ORBIT_EXACT = "point-orbit-exact"
    DISTANCE_PROXY = "distance-proxy"
    MONTE_CARLO = "monte-carlo"


@dataclass
class EnergySeries:
    s: int
    terms: List[float]
    partial_sums: List[float]
    term_kind: EnergyMethod
    decay_fit: float
    side: Direction = Direction.FORWARD
    approximate: bool = False
    samples: Optional[int] = None
    seed: Optional[int] = None
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        assert len(self.terms) == len(self.partial_sums), "Every term needs its partial sum."

    @property
    def is_cauchy(self) -> bool:
        return is_cauchy(np.array(self.partial_sums), self.decay_fit)

    def to_table(self) -> pd.DataFrame:
        return pd.DataFrame(dict(n=range(len(self.terms)), term=self.terms, partial_sum=self.partial_sums))

    def to_dict(self) -> dict:
        return dict(
            s=self.s,
            side=self.side.value,
            term_kind=self.term_kind.value,
            approximate=self.approximate,
            samples=self.samples,
            seed=self.seed,
            decay_fit=self.decay_fit,
            is_cauchy=self.is_cauchy,
            terms=self.terms,
            partial_sums=self.partial_sums,
            notes=self.notes,
        )


def _side_data(pair: ComplexPair, side: Direction):
    """Lift, pushed locus, opposing locus, degree and codimension exponent for one half of the condition."""
    if side is Direction.FORWARD:
        return pair.forward, pair.ind_backward, pair.ind_forward, pair.d, pair.s
    return pair.backward, pair.ind_forward, pair.ind_backward, pair.delta, pair.k - pair.s


def _point_orbit_terms(F: ComplexLift, locus, weight: int, N: int, display_progress: bool) -> List[float]:
    orbits = [point.coords for point in locus.points]
    terms = []
    for n in tqdm(range(N + 1), desc="Energy terms", disable=not display_progress):
        terms.append(sum(phi_f(F, coords, step=n) for coords in orbits) / weight**n)
        if n < N:
            orbits = [iterate_normalized(F, coords) for coords in orbits]
    return terms


def _distance_proxy_terms(F: ComplexLift, locus, opposing, weight: int, N: int, display_progress: bool):
    orbits = [point.coords for point in locus.points]
    targets = opposing.points
    terms = []
    for n in tqdm(range(N + 1), desc="Energy terms", disable=not display_progress):
        term = 0.0
        for coords in orbits:
            distance = min(fs_distance(coords, target) for target in targets)
            if distance == 0:
                raise NearIndeterminate(step=n, message=f"The orbit meets the opposing locus at step {n}.")
            term += math.log(distance)
        terms.append(term / weight**n)
        if n < N:
            orbits = [iterate_normalized(F, coords) for coords in orbits]
    return terms


def _fs_gram_determinant(image: np.ndarray, tangent_images: np.ndarray) -> np.ndarray:
    """det of the Fubini-Study Gram matrix of tangent vectors w_i at q (unnormalized), batched over points."""
    q_norm2 = np.sum(np.abs(image) ** 2, axis=-1)
    inner = np.einsum("...ia,...ja->...ij", tangent_images, tangent_images.conj())
    projections = np.einsum("...ia,...a->...i", tangent_images, image.conj())
    gram = (inner * q_norm2[..., None, None] - projections[..., :, None] * projections[..., None, :].conj()) / (
        q_norm2[..., None, None] ** 2
    )
    return np.real(np.linalg.det(gram))


def _project_off(vectors: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Remove from each row of vectors (S, m, k+1) its component along the matching point (S, k+1)."""
    overlaps = np.einsum("sia,sa->si", vectors, points.conj()) / np.sum(np.abs(points) ** 2, axis=-1)[:, None]
    return vectors - overlaps[..., None] * points[:, None, :]


def _monte_carlo_terms(F: ComplexLift, locus, weight: int, N: int, samples: int, seed: int, display_progress: bool):
    """
    Average of phi(f^n p) times the density of (f^(n+1))^* omega^m on the m-dimensional linear locus, over points p
    drawn from the unitarily invariant measure on the locus.
    """
    basis = locus.orthonormal_basis()
    m = locus.declared_dimension
    rng = np.random.default_rng(seed)
    weights = rng.standard_normal((samples, m + 1)) + 1j * rng.standard_normal((samples, m + 1))
    points = weights @ basis
    points /= np.linalg.norm(points, axis=-1, keepdims=True)
    # orthonormal tangent directions at each sample: the basis projected off the point has rank m
    tangents = _project_off(np.broadcast_to(basis, (samples,) + basis.shape), points)
    _, _, right = np.linalg.svd(tangents, full_matrices=False)
    tangents = right[:, :m, :]

    terms = []
    current, pushed = points, tangents
    for n in tqdm(range(N + 1), desc="Energy terms (Monte Carlo)", disable=not display_progress):
        values = phi_values(F, current)
        jacobian = F.jacobian(current)
        image = F.evaluate(current)
        density = _fs_gram_determinant(image, np.einsum("sij,skj->ski", jacobian, pushed))
        usable = np.isfinite(values) & np.isfinite(density)
        if not usable.all():
            warnings.warn(f"{np.count_nonzero(~usable)} Monte Carlo samples hit the indeterminacy locus at step {n}.")
        terms.append(float(np.mean(np.where(usable, values * density, 0.0))) / weight**n)
        if n < N:
            # tangent representatives are rescaled together with their base point
            scale = sup_norm(image)[:, None]
            current = image / scale
            pushed = _project_off(np.einsum("sij,skj->ski", jacobian, pushed) / scale[:, None], current)
    return terms


def energy_partial_sum(
    pair: ComplexPair,
    N: int = 20,
    side="forward",
    method="point-orbit-exact",
    samples: int = DEFAULT_MONTE_CARLO_SAMPLES,
    seed: int = 0,
    display_progress: bool = False,
) -> EnergySeries:
    """
    Partial sums of one half of the finite energy condition.

    The forward side sums d^(-sn) times the integral of phi_f over f^n(I_{f^-1}); the backward side sums
    delta^(-(k-s)n) times the integral of the inverse potential over f^-n(I_f).

    Parameters
    ----------
    pair : ComplexPair
    N : int
        Last index of the series.
    side : str or Direction
        "forward" or "backward".
    method : str or EnergyMethod
        "point-orbit-exact" for 0-dimensional loci, "monte-carlo" for linear loci of positive dimension, or
        "distance-proxy" (k=2 only) for the log chordal distance between the orbit and the opposing locus.
    samples, seed : int
        Monte Carlo sample count and seed.

    Raises
    ------
    WrongDimension
        If the method does not match the dimension of the locus.
    NearIndeterminate
        If the orbit reaches an indeterminacy locus numerically.
    """
    side = Direction(side)
    method = EnergyMethod(method)
    F, locus, opposing, degree, exponent = _side_data(pair, side)
    weight = degree**exponent
    notes = []
    if method is EnergyMethod.MONTE_CARLO:
        if locus.kind is not LocusKind.LINEAR_SUBSPACE or locus.declared_dimension == 0:
            raise WrongDimension("The Monte Carlo estimator needs a linear locus of positive dimension.")
        terms = _monte_carlo_terms(F, locus, weight, N, samples, seed, display_progress)
        notes.append(f"Monte Carlo estimate with {samples} samples (seed {seed}); no convergence guarantee.")
        warnings.warn("Monte Carlo energy terms are approximate.")
    else:
        if locus.kind is not LocusKind.POINT_LIST or locus.declared_dimension != 0:
            raise WrongDimension(f"The {method.value} method needs a 0-dimensional locus.")
        if method is EnergyMethod.DISTANCE_PROXY:
            if pair.k != 2 or opposing.kind is not LocusKind.POINT_LIST:
                raise WrongDimension("The distance proxy is only defined for maps of P^2 with point loci.")
            terms = _distance_proxy_terms(F, locus, opposing, degree, N, display_progress)
        else:
            terms = _point_orbit_terms(F, locus, weight, N, display_progress)
    approximate = method is EnergyMethod.MONTE_CARLO
    return EnergySeries(
        s=pair.s,
        terms=terms,
        partial_sums=list(np.cumsum(terms).tolist()),
        term_kind=method,
        decay_fit=calculate_geometric_ratio(np.array(terms)),
        side=side,
        approximate=approximate,
        samples=samples if approximate else None,
        seed=seed if approximate else None,
        notes=notes,
    )
