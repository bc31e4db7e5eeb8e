"""Exact rational projective points."""
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np

from ..utils.errors import ZeroVector
from ..utils.types import RationalType


@dataclass(frozen=True)
class RatProjPoint:
    """
    A point of P^k(Q) stored as its canonical representative.

    The representative has coprime integer coordinates whose first nonzero entry is positive, so two points are
    equal exactly when their coordinate tuples are equal.
    """

    coords: Tuple[int, ...]

    def __post_init__(self):
        assert len(self.coords) >= 2, f"A projective point needs at least two coordinates (received {self.coords})."
        assert any(self.coords), "Not all coordinates of a projective point can be zero!"
        assert math.gcd(*self.coords) == 1, f"Coordinates {self.coords} are not coprime; use normalize()."
        leading = next(value for value in self.coords if value != 0)
        assert leading > 0, f"The first nonzero coordinate of {self.coords} must be positive; use normalize()."

    @property
    def k(self) -> int:
        """Dimension of the ambient projective space."""
        return len(self.coords) - 1

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, index):
        return self.coords[index]

    def __str__(self):
        return "[" + ":".join(str(value) for value in self.coords) + "]"

    def to_strings(self) -> List[str]:
        return [str(value) for value in self.coords]

    def max_abs(self) -> int:
        return max(abs(value) for value in self.coords)

    def bit_size(self) -> int:
        return self.max_abs().bit_length()

    def to_array(self) -> np.ndarray:
        """Complex representative scaled to unit sup norm; exact division first keeps huge coordinates finite."""
        scale = self.max_abs()
        return np.array([float(Fraction(value, scale)) for value in self.coords], dtype=complex)


def normalize(raw_coords: Iterable[RationalType]) -> RatProjPoint:
    """
    Return the canonical coprime-integer representative of the projective point with the given coordinates.

    Parameters
    ----------
    raw_coords : iterable of int, Fraction or decimal strings
        Homogeneous coordinates; rationals are cleared of denominators.

    Raises
    ------
    ZeroVector
        If every coordinate is zero.
    """
    fractions = [Fraction(value) for value in raw_coords]
    if not any(fractions):
        raise ZeroVector(f"Cannot normalize the zero vector {[str(value) for value in fractions]}.")
    common_denominator = math.lcm(*(value.denominator for value in fractions))
    integers = [int(value * common_denominator) for value in fractions]
    content = math.gcd(*integers)
    integers = [value // content for value in integers]
    leading = next(value for value in integers if value != 0)
    if leading < 0:
        integers = [-value for value in integers]
    return RatProjPoint(coords=tuple(integers))


def random_points(
    k: int,
    count: int,
    bound: int,
    seed: int = 0,
    exclude: Optional[Callable[[RatProjPoint], bool]] = None,
    max_attempts_factor: int = 100,
) -> List[RatProjPoint]:
    """
    Draw points with integer coordinates uniform in [-bound, bound]^(k+1), rejecting zero vectors and excluded points.

    Parameters
    ----------
    k : int
        Dimension of the projective space.
    count : int
        Number of points to return.
    bound : int
        Coordinate bound B.
    seed : int
        Seed of the numpy generator; identical seeds give identical samples.
    exclude : callable, optional
        Predicate returning True for points that must be rejected (typically membership in declared loci).
    """
    assert count >= 0, f"count ({count}) must be non-negative!"
    assert bound >= 1, f"bound ({bound}) must be at least 1!"
    rng = np.random.default_rng(seed)
    points = []
    attempts = 0
    while len(points) < count:
        attempts += 1
        assert attempts <= max_attempts_factor * max(count, 1), "Too many rejected samples; check the exclusion rule."
        raw = rng.integers(low=-bound, high=bound, endpoint=True, size=k + 1)
        if not raw.any():
            continue
        point = normalize(int(value) for value in raw)
        if exclude is not None and exclude(point):
            continue
        points.append(point)
    return points
