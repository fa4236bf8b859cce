"""Elementary and complete homogeneous symmetric polynomials of a spectrum.

The primary path is the all-positive dynamic-programming recurrence carried
in the log domain, so the N! prefactor of the normalization constants never
overflows and no subtractions occur.  Newton's identities and a literal
brute-force enumerator are kept as independent cross-checks.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import InvalidParameterError, SizeGuardError

BRUTE_FORCE_GUARD = 10**8


@dataclass(frozen=True)
class LogValue:
    """A real number stored as ``sign * exp(log_magnitude)``."""

    log_magnitude: float
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise InvalidParameterError(f"sign must be -1, 0 or +1, got {self.sign}")
        if (self.sign == 0) != (self.log_magnitude == -math.inf):
            raise InvalidParameterError("sign is 0 exactly when log_magnitude is -inf")

    @classmethod
    def zero(cls) -> "LogValue":
        return cls(-math.inf, 0)

    @classmethod
    def one(cls) -> "LogValue":
        return cls(0.0, 1)

    @classmethod
    def from_log(cls, log_magnitude: float) -> "LogValue":
        """Positive value (or exact zero for ``-inf``) from its natural log."""
        if log_magnitude == -math.inf:
            return cls.zero()
        return cls(float(log_magnitude), 1)

    @classmethod
    def from_float(cls, x: float) -> "LogValue":
        if x == 0:
            return cls.zero()
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    def __mul__(self, other: "LogValue") -> "LogValue":
        if self.sign == 0 or other.sign == 0:
            return LogValue.zero()
        return LogValue(self.log_magnitude + other.log_magnitude, self.sign * other.sign)

    def __truediv__(self, other: "LogValue") -> "LogValue":
        if other.sign == 0:
            raise ZeroDivisionError("division by an exact zero LogValue")
        if self.sign == 0:
            return LogValue.zero()
        return LogValue(self.log_magnitude - other.log_magnitude, self.sign * other.sign)


class PolyKind(str, Enum):
    ELEMENTARY = "elementary"
    HOMOGENEOUS = "homogeneous"


@dataclass(frozen=True)
class PolySeries:
    """Values ``s_0 .. s_N`` of one symmetric-polynomial family."""

    kind: PolyKind
    values: tuple[LogValue, ...]
    spectrum_fingerprint: str

    def __post_init__(self):
        if not self.values or self.values[0] != LogValue.one():
            raise InvalidParameterError("value[0] must be exactly 1")

    def __len__(self):
        return len(self.values)

    def __getitem__(self, j: int) -> LogValue:
        return self.values[j]

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def log(self, j: int) -> float:
        return self.values[j].log_magnitude

    def linear(self) -> np.ndarray:
        """Values in linear scale (may overflow to inf for huge orders)."""
        return np.array([float(v) for v in self.values])


def fingerprint(lambdas) -> str:
    arr = np.ascontiguousarray(np.asarray(lambdas, dtype=float))
    return hashlib.sha1(arr.tobytes()).hexdigest()[:16]


def _check_lambdas(lambdas) -> np.ndarray:
    arr = np.asarray(lambdas, dtype=float).ravel()
    if np.any(~np.isfinite(arr)):
        raise InvalidParameterError("eigenvalues must be finite")
    if np.any(arr < 0):
        raise InvalidParameterError("eigenvalues must be non-negative")
    return arr


def _check_order(n_max: int) -> int:
    if int(n_max) != n_max or n_max < 0:
        raise InvalidParameterError(f"order must be a non-negative integer, got {n_max}")
    return int(n_max)


def _logaddexp(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


def _log_lambdas(arr: np.ndarray) -> list[float]:
    # largest contributions first
    ordered = np.sort(arr)[::-1]
    with np.errstate(divide="ignore"):
        return [float(x) for x in np.log(ordered)]


def elementary_symmetric(lambdas: Sequence[float], n_max: int) -> PolySeries:
    """e_0..e_{n_max}: sums over strictly increasing index tuples."""
    arr = _check_lambdas(lambdas)
    n_max = _check_order(n_max)
    log_e = np.full(n_max + 1, -np.inf)
    log_e[0] = 0.0
    for k, log_lam in enumerate(_log_lambdas(arr)):
        if log_lam == -math.inf:
            continue
        top = min(k + 1, n_max)
        # descending j: e_{j-1} still holds the value before this eigenvalue
        for j in range(top, 0, -1):
            log_e[j] = _logaddexp(log_e[j], log_lam + log_e[j - 1])
    values = tuple(LogValue.from_log(v) for v in log_e)
    return PolySeries(PolyKind.ELEMENTARY, values, fingerprint(arr))


def complete_homogeneous(lambdas: Sequence[float], n_max: int) -> PolySeries:
    """h_0..h_{n_max}: sums over non-decreasing index tuples (repeats allowed)."""
    arr = _check_lambdas(lambdas)
    n_max = _check_order(n_max)
    log_h = np.full(n_max + 1, -np.inf)
    log_h[0] = 0.0
    for log_lam in _log_lambdas(arr):
        if log_lam == -math.inf:
            continue
        # ascending j: h_{j-1} already includes this eigenvalue
        for j in range(1, n_max + 1):
            log_h[j] = _logaddexp(log_h[j], log_lam + log_h[j - 1])
    values = tuple(LogValue.from_log(v) for v in log_h)
    return PolySeries(PolyKind.HOMOGENEOUS, values, fingerprint(arr))


def symmetric_series(lambdas: Sequence[float], n_max: int, kind: PolyKind | str) -> PolySeries:
    kind = PolyKind(kind)
    if kind is PolyKind.ELEMENTARY:
        return elementary_symmetric(lambdas, n_max)
    return complete_homogeneous(lambdas, n_max)


def power_sums(lambdas: Sequence[float], k_max: int) -> np.ndarray:
    """p_k = sum_n lambda_n**k for k = 1..k_max (index 0 holds p_1)."""
    arr = _check_lambdas(lambdas)
    if int(k_max) != k_max or k_max < 1:
        raise InvalidParameterError("k_max must be a positive integer")
    ks = np.arange(1, int(k_max) + 1)
    return np.array([math.fsum(arr**k) for k in ks])


def newton_from_power_sums(p: Sequence[float], n_max: int, kind: PolyKind | str) -> PolySeries:
    """Symmetric polynomials from power sums via Newton's identities.

    ``p[k-1]`` holds p_k.  The elementary identity alternates in sign, so this
    is a cross-check path only.
    """
    kind = PolyKind(kind)
    n_max = _check_order(n_max)
    p = np.asarray(p, dtype=float).ravel()
    if len(p) < n_max:
        raise InvalidParameterError(f"need {n_max} power sums, got {len(p)}")
    s = [1.0]
    for n in range(1, n_max + 1):
        if kind is PolyKind.ELEMENTARY:
            terms = [(-1) ** (k - 1) * s[n - k] * p[k - 1] for k in range(1, n + 1)]
        else:
            terms = [s[n - k] * p[k - 1] for k in range(1, n + 1)]
        s.append(math.fsum(terms) / n)
    values = tuple(LogValue.from_float(v) for v in s)
    return PolySeries(kind, values, fingerprint(p))


def brute_force_ordered_sum(lambdas: Sequence[float], n: int, strict: bool) -> float:
    """Literal sum of lambda_{p1}...lambda_{pN} over p1 < ... < pN (or <= if not strict)."""
    arr = _check_lambdas(lambdas)
    n = _check_order(n)
    if n == 0:
        return 1.0
    if len(arr) ** n > BRUTE_FORCE_GUARD:
        raise SizeGuardError(
            f"{len(arr)}**{n} tuples exceeds the enumeration guard {BRUTE_FORCE_GUARD:.0e}"
        )
    combos = itertools.combinations if strict else itertools.combinations_with_replacement
    vals = [float(x) for x in arr]
    return math.fsum(math.prod(vals[i] for i in idx) for idx in combos(range(len(vals)), n))
