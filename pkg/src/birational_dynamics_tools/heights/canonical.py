"""Canonical heights as truncated limits with a one-sided geometric tail bound."""
from dataclasses import asdict, dataclass, field
from typing import List

from .naive import naive_height, total_c1_constant
from ..projcore.birational import BirationalPair, Direction
from ..projcore.points import RatProjPoint
from ..projcore.polymaps import orbit


@dataclass(frozen=True)
class HeightEstimate:
    """
    The N-th term d^-N h(f^N x) of the canonical height sequence.

    The limit satisfies h_hat <= value + tail_bound; no lower bound is claimed since the one-step inequality
    h(f(y)) >= d h(y) - C fails near the indeterminacy loci.
    """

    value: float
    cutoff_N: int
    tail_bound: float
    c1_constant: float
    last_delta: float
    direction: Direction = Direction.FORWARD
    sequence: List[float] = field(default_factory=list, compare=False)

    def __post_init__(self):
        assert self.value >= 0, f"Heights are non-negative (received {self.value})."
        assert self.tail_bound >= 0, f"The tail bound must be non-negative (received {self.tail_bound})."

    def to_dict(self) -> dict:
        content = asdict(self)
        content["direction"] = self.direction.value
        return content


def height_tail_bound(c1_constant: float, degree: int, cutoff_N: int) -> float:
    """Geometric tail C_1 d^(-N+1) / (d - 1) of the telescoped sum beyond the cutoff."""
    assert degree >= 2, f"Canonical heights need degree at least 2 (received {degree})."
    return c1_constant * float(degree) ** (1 - cutoff_N) / (degree - 1)


def canonical_height(
    pair: BirationalPair, x: RatProjPoint, direction="plus", cutoff_N: int = 12
) -> HeightEstimate:
    """
    Estimate h_hat^+ (direction "plus") or h_hat^- ("minus") of a rational point.

    Parameters
    ----------
    pair : BirationalPair
    x : RatProjPoint
    direction : str or Direction
        "plus"/"forward" iterates f, "minus"/"backward" iterates f^-1.
    cutoff_N : int
        Number of exact iterations.

    Raises
    ------
    IndeterminateEvaluation
        With the failing step if the orbit hits the indeterminacy locus before cutoff_N.
    """
    direction = Direction(direction)
    F = pair.map_for(direction)
    degree = F.degree
    c1_constant = total_c1_constant(F)
    tail_bound = height_tail_bound(c1_constant, degree, cutoff_N)
    points = orbit(F, x, cutoff_N)
    sequence = [naive_height(point) / degree**n for n, point in enumerate(points)]
    last_delta = abs(sequence[-1] - sequence[-2]) if cutoff_N > 0 else 0.0
    return HeightEstimate(
        value=sequence[-1],
        cutoff_N=cutoff_N,
        tail_bound=tail_bound,
        c1_constant=c1_constant,
        last_delta=last_delta,
        direction=direction,
        sequence=sequence,
    )
