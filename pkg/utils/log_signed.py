"""
Sign / log-magnitude numbers for long products
"""
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from utils.errors import DomainError


@dataclass(frozen=True)
class LogSigned:
    """
    A real number stored as sign * exp(logmag)

    sign is one of -1, 0, +1; logmag is ignored when sign is 0.
    """
    sign: int
    logmag: float = 0.0

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise DomainError(f"sign must be -1, 0 or 1, got {self.sign}")

    @classmethod
    def one(cls) -> 'LogSigned':
        return cls(1, 0.0)

    @classmethod
    def zero(cls) -> 'LogSigned':
        return cls(0, 0.0)

    @classmethod
    def from_float(cls, value: float) -> 'LogSigned':
        if not math.isfinite(value):
            raise DomainError(f"Cannot represent non-finite value {value}")
        if value == 0.0:
            return cls.zero()
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    @classmethod
    def from_array(cls, values: Iterable[float]) -> 'LogSigned':
        """Product of the given factors"""
        arr = np.asarray(values if isinstance(values, np.ndarray) else list(values), dtype=float).ravel()
        if arr.size == 0:
            return cls.one()
        if not np.all(np.isfinite(arr)):
            raise DomainError("Cannot represent non-finite factor")
        if np.any(arr == 0.0):
            return cls.zero()
        sign = -1 if np.count_nonzero(arr < 0) % 2 else 1
        return cls(sign, float(math.fsum(np.log(np.abs(arr)))))

    @classmethod
    def ratio(cls, numerators: Iterable[float], denominators: Iterable[float]) -> 'LogSigned':
        """prod(numerators) / prod(denominators)"""
        return cls.from_array(numerators) / cls.from_array(denominators)

    def __mul__(self, other: 'LogSigned') -> 'LogSigned':
        if self.sign == 0 or other.sign == 0:
            return LogSigned.zero()
        return LogSigned(self.sign * other.sign, self.logmag + other.logmag)

    def __truediv__(self, other: 'LogSigned') -> 'LogSigned':
        if other.sign == 0:
            raise ZeroDivisionError("LogSigned division by zero")
        if self.sign == 0:
            return LogSigned.zero()
        return LogSigned(self.sign * other.sign, self.logmag - other.logmag)

    def __pow__(self, k: int) -> 'LogSigned':
        if self.sign == 0:
            if k <= 0:
                raise ZeroDivisionError("LogSigned zero to nonpositive power")
            return LogSigned.zero()
        return LogSigned(self.sign if k % 2 else 1, self.logmag * k)

    def __neg__(self) -> 'LogSigned':
        return LogSigned(-self.sign, self.logmag)

    def inverse(self) -> 'LogSigned':
        return LogSigned.one() / self

    def sqrt(self) -> 'LogSigned':
        if self.sign < 0:
            raise DomainError("Square root of a negative LogSigned")
        if self.sign == 0:
            return LogSigned.zero()
        return LogSigned(1, 0.5 * self.logmag)

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.logmag)

    def __float__(self) -> float:
        return self.to_float()

    def is_close(self, other: 'LogSigned', rtol: float = 1e-12) -> bool:
        """Relative comparison carried out in log space"""
        if self.sign == 0 or other.sign == 0:
            return self.sign == other.sign
        return self.sign == other.sign and abs(self.logmag - other.logmag) <= rtol
