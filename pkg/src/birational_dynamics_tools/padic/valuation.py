"""p-adic valuations of rationals and a fixed relative-precision p-adic number."""
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from sympy import isprime, multiplicity

from ..utils.errors import NotPrime, PrecisionExhausted
from ..utils.types import RationalType

MAX_PRIME = 2**64
DEFAULT_PRECISION = 64


def check_prime(p: int) -> int:
    """Return p if it is a prime below 2^64, raise NotPrime otherwise (sympy's test is deterministic in that range)."""
    if not isinstance(p, int) or isinstance(p, bool):
        raise NotPrime(f"The prime must be an integer, received {p!r}.")
    if p >= MAX_PRIME:
        raise NotPrime(f"Primes are limited to values below 2^64 (received {p}).")
    if not isprime(p):
        raise NotPrime(f"{p} is not prime.")
    return p


@dataclass(frozen=True, order=True)
class PadicValuation:
    """v_p of a rational; math.inf for zero. |x|_p = p^(-value)."""

    value: Union[int, float]
    prime: int

    @property
    def is_infinite(self) -> bool:
        return self.value == math.inf

    def absolute_value(self) -> Fraction:
        if self.is_infinite:
            return Fraction(0)
        return Fraction(self.prime) ** (-self.value)

    def to_json(self):
        return None if self.is_infinite else int(self.value)

    def __int__(self):
        assert not self.is_infinite, "The valuation of zero is infinite."
        return int(self.value)

    def __str__(self):
        return "+inf" if self.is_infinite else str(self.value)


def _exact_vp(x: Fraction, p: int) -> Union[int, float]:
    if x == 0:
        return math.inf
    return multiplicity(p, x.numerator) - multiplicity(p, x.denominator)


def vp(x: RationalType, p: int) -> PadicValuation:
    """
    Exact p-adic valuation of a rational number.

    Raises
    ------
    NotPrime
        If p is not a prime below 2^64.
    """
    check_prime(p)
    return PadicValuation(value=_exact_vp(Fraction(x), p), prime=p)


class PadicNumber:
    """
    An element p^valuation * unit of Q_p known to `precision` p-adic digits beyond its valuation.

    Exact zero is tracked separately. Sums whose leading digits cancel lose relative precision; when all digits
    cancel the value cannot be told apart from zero and PrecisionExhausted is raised.
    """

    __slots__ = ("prime", "valuation", "unit", "precision")

    def __init__(self, prime: int, valuation: Union[int, float], unit: int, precision: int):
        self.prime = prime
        self.valuation = valuation
        self.unit = unit
        self.precision = precision

    @classmethod
    def from_rational(cls, x: RationalType, prime: int, precision: int = DEFAULT_PRECISION) -> "PadicNumber":
        x = Fraction(x)
        if x == 0:
            return cls.zero(prime, precision)
        valuation = _exact_vp(x, prime)
        numerator = x.numerator // prime ** max(valuation, 0)
        denominator = x.denominator // prime ** max(-valuation, 0)
        modulus = prime**precision
        return cls(prime, valuation, numerator * pow(denominator, -1, modulus) % modulus, precision)

    @classmethod
    def zero(cls, prime: int, precision: int = DEFAULT_PRECISION) -> "PadicNumber":
        return cls(prime, math.inf, 0, precision)

    @property
    def is_zero(self) -> bool:
        return self.valuation == math.inf

    def valuation_of(self) -> PadicValuation:
        return PadicValuation(value=self.valuation, prime=self.prime)

    def shifted(self, amount: int) -> "PadicNumber":
        """Multiply by p^amount."""
        if self.is_zero:
            return self
        return PadicNumber(self.prime, self.valuation + amount, self.unit, self.precision)

    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            assert other.prime == self.prime, f"Cannot combine {self.prime}-adic and {other.prime}-adic numbers."
            return other
        if isinstance(other, (int, Fraction)):
            return PadicNumber.from_rational(other, self.prime, self.precision)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        p = self.prime
        low = min(self.valuation, other.valuation)
        # absolute precision of the sum: both summands are known modulo p^absolute
        absolute = min(self.valuation + self.precision, other.valuation + other.precision)
        modulus = p ** (absolute - low)
        total = (self.unit * p ** (self.valuation - low) + other.unit * p ** (other.valuation - low)) % modulus
        if total == 0:
            raise PrecisionExhausted(
                f"Cancellation consumed all {absolute - low} digits of {p}-adic precision at valuation {low}."
            )
        lost = multiplicity(p, total)
        precision = absolute - low - lost
        return PadicNumber(p, low + lost, (total // p**lost) % p**precision, precision)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero:
            return self
        return PadicNumber(self.prime, self.valuation, (-self.unit) % self.prime**self.precision, self.precision)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero or other.is_zero:
            return PadicNumber.zero(self.prime, min(self.precision, other.precision))
        precision = min(self.precision, other.precision)
        modulus = self.prime**precision
        return PadicNumber(self.prime, self.valuation + other.valuation, self.unit * other.unit % modulus, precision)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero:
            raise ZeroDivisionError("p-adic division by zero")
        inverse = PadicNumber(
            self.prime, -other.valuation, pow(other.unit, -1, self.prime**other.precision), other.precision
        )
        return self * inverse

    def __pow__(self, exponent: int):
        assert isinstance(exponent, int) and exponent >= 0, "Only non-negative integer powers are supported."
        if exponent == 0:
            return PadicNumber(self.prime, 0, 1, self.precision)
        if self.is_zero:
            return self
        modulus = self.prime**self.precision
        return PadicNumber(self.prime, self.valuation * exponent, pow(self.unit, exponent, modulus), self.precision)

    def __bool__(self):
        return not self.is_zero

    def __repr__(self):
        if self.is_zero:
            return f"PadicNumber(0, p={self.prime})"
        return f"PadicNumber({self.prime}^{self.valuation} * {self.unit} + O(p^{self.valuation + self.precision}))"
