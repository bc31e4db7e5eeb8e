"""The lift potential, Green-function partial sums and the Fubini-Study chordal distance."""
from typing import List, Union

import numpy as np

from .lift import ComplexLift, CProjPoint, sup_norm
from ..utils.errors import NearIndeterminate

# lift values with sup norm below this (relative to |p|^d) count as hitting the indeterminacy locus
INDETERMINACY_TOLERANCE = 1e-14

PointLike = Union[CProjPoint, np.ndarray]


def _coords(x: PointLike) -> np.ndarray:
    return x.coords if isinstance(x, CProjPoint) else np.asarray(x, dtype=complex)


def phi_values(F: ComplexLift, points: np.ndarray) -> np.ndarray:
    """Vectorised phi_f over a batch of points; entries at numerically indeterminate points are NaN."""
    points = np.asarray(points, dtype=complex)
    point_norms = sup_norm(points)
    image_norms = sup_norm(F.evaluate(points))
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.log(image_norms) / F.degree - np.log(point_norms)
    return np.where(image_norms < INDETERMINACY_TOLERANCE * point_norms**F.degree, np.nan, values)


def phi_f(F: ComplexLift, x: PointLike, step: int = 0) -> float:
    """
    phi_f(x) = (1/d) log |F(p)| - log |p| with the sup norm; independent of the representative p.

    Raises
    ------
    NearIndeterminate
        If |F(p)| < 1e-14 |p|^d.
    """
    value = phi_values(F, _coords(x))
    if np.isnan(value):
        raise NearIndeterminate(step=step, message=f"The lift vanishes numerically at {x} (step {step}).")
    return float(value)


def iterate_normalized(F: ComplexLift, coords: np.ndarray) -> np.ndarray:
    """F(p) rescaled to unit sup norm."""
    image = F.evaluate(coords)
    return image / sup_norm(image)


def green_partial(F: ComplexLift, x: PointLike, N: int) -> List[float]:
    """
    Partial sums G_n = sum_{m <= n} d^-m phi_f(f^m x) for n = 0..N.

    The orbit is renormalized to unit sup norm at every step.

    Raises
    ------
    NearIndeterminate
        With the step at which the orbit reaches the indeterminacy locus numerically.
    """
    assert N >= 0, f"N ({N}) must be non-negative!"
    coords = _coords(x)
    partial_sums = []
    total = 0.0
    for m in range(N + 1):
        total += phi_f(F, coords, step=m) / F.degree**m
        partial_sums.append(total)
        if m < N:
            coords = iterate_normalized(F, coords)
    return partial_sums


def fs_distance(p: PointLike, q: PointLike) -> float:
    """Chordal distance |p ^ q| / (|p| |q|) on P^k(C), with values in [0, 1]."""
    p, q = _coords(p), _coords(q)
    p = p / np.linalg.norm(p)
    q = q / np.linalg.norm(q)
    # norm of the component of q orthogonal to p
    return float(min(np.linalg.norm(q - np.vdot(p, q) * p), 1.0))
