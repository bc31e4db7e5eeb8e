"""Authors: the birational-dynamics-tools developers."""
from fractions import Fraction
from pathlib import Path
from typing import Sequence, Tuple, TypeVar, Union

FilePathType = TypeVar("FilePathType", str, Path)
RationalType = Union[int, Fraction]
MatrixType = Sequence[Sequence[RationalType]]
ExponentType = Tuple[int, ...]
TermType = Tuple[int, ExponentType]
BoxType = Tuple[Tuple[float, float], Tuple[float, float], Tuple[float, float], Tuple[float, float]]
