"""Normalization constants and bosonic-quality observables of composite pairs.

chi_N is N! times the complete homogeneous (boson constituents) or elementary
(fermion constituents) symmetric polynomial of the Schmidt eigenvalues.  From
the chi table follow the normalization ratios chi_{N+1}/chi_N, the amplitude
alpha_N of c|N> along |N-1>, and the squared norm of the leakage state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional, Sequence

import numpy as np

from .errors import (
    ContractViolation,
    DomainError,
    InvalidParameterError,
    NumericError,
    PauliBlockedError,
)
from .schmidt import SchmidtSpectrum, explicit_spectrum, schmidt_number
from .sympoly import LogValue, PolyKind, symmetric_series

NORMALIZATION_TOL = 1e-10
EPS_CLAMP = 1e-12


class Statistics(IntEnum):
    """Quantum statistics of the two constituents; the value is the sign s."""

    BOSON = 1
    FERMION = -1

    @property
    def s(self) -> int:
        return int(self)

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, value) -> "Statistics":
        if isinstance(value, Statistics):
            return value
        if isinstance(value, str):
            key = value.strip().lower()
            if key in ("boson", "bosons", "b", "+1", "1"):
                return cls.BOSON
            if key in ("fermion", "fermions", "f", "-1"):
                return cls.FERMION
        elif value in (1, -1):
            return cls(value)
        raise InvalidParameterError(f"unknown statistics {value!r}")


def _poly_kind(stats: Statistics) -> PolyKind:
    return PolyKind.HOMOGENEOUS if stats is Statistics.BOSON else PolyKind.ELEMENTARY


@dataclass(frozen=True)
class ChiTable:
    """chi_0..chi_{n_max} in the log domain for one statistics flag.

    ``tail_bounds[N]`` bounds the relative change of chi_N were the discarded
    tail of the spectrum restored (0 for exact tables).
    """

    stats: Statistics
    chi: tuple[LogValue, ...]
    source: str
    tail_bounds: tuple[float, ...]
    z: Optional[float] = None

    @property
    def n_max(self) -> int:
        return len(self.chi) - 1

    @property
    def tail_error_bound(self) -> float:
        return max(self.tail_bounds)

    def _check(self, n: int):
        if not 0 <= n <= self.n_max:
            raise InvalidParameterError(f"N={n} outside table range 0..{self.n_max}")

    def log_chi(self, n: int) -> float:
        self._check(n)
        return self.chi[n].log_magnitude

    def value(self, n: int) -> float:
        self._check(n)
        return float(self.chi[n])

    def is_blocked(self, n: int) -> bool:
        self._check(n)
        return self.chi[n].is_zero

    def values(self) -> np.ndarray:
        return np.array([float(c) for c in self.chi])


def _as_spectrum(spec) -> SchmidtSpectrum:
    if isinstance(spec, SchmidtSpectrum):
        return spec
    lam = np.asarray(spec, dtype=float)
    if abs(math.fsum(lam) - 1.0) > NORMALIZATION_TOL:
        raise ContractViolation(f"eigenvalues sum to {math.fsum(lam)!r}, expected 1")
    return explicit_spectrum(lam)


def _relative_tail_bounds(log_s: Sequence[float], tail: float) -> tuple[float, ...]:
    # restoring tail mass t changes s_N by at most sum_k s_{N-k} t^k
    if tail <= 0:
        return tuple(0.0 for _ in log_s)
    log_t = math.log(tail)
    out = [0.0]
    for n in range(1, len(log_s)):
        if log_s[n] == -math.inf:
            out.append(math.inf)
            continue
        terms = [log_s[n - k] + k * log_t - log_s[n] for k in range(1, n + 1)]
        peak = max(terms)
        out.append(math.exp(peak) * math.fsum(math.exp(t - peak) for t in terms))
    return tuple(out)


def chi_table(spec, stats, n_max: int) -> ChiTable:
    """chi_0..chi_{n_max} from the symmetric-polynomial recurrences."""
    stats = Statistics.parse(stats)
    spec = _as_spectrum(spec)
    if int(n_max) != n_max or n_max < 1:
        raise InvalidParameterError(f"n_max must be a positive integer, got {n_max}")
    n_max = int(n_max)
    series = symmetric_series(spec.lambdas, n_max, _poly_kind(stats))
    log_s = [v.log_magnitude for v in series.values]
    chi = tuple(
        LogValue.zero() if ls == -math.inf else LogValue(math.lgamma(n + 1) + ls, 1)
        for n, ls in enumerate(log_s)
    )
    return ChiTable(stats, chi, "dp", _relative_tail_bounds(log_s, spec.tail_mass), spec.z)


def chi_geometric_closed(z: float, stats, n_max: int) -> ChiTable:
    """Exact chi table for lambda_n = (1-z) z^n, no truncation involved."""
    stats = Statistics.parse(stats)
    if not (0 < z < 1):
        raise InvalidParameterError(f"z must lie in (0, 1), got {z}")
    if int(n_max) != n_max or n_max < 1:
        raise InvalidParameterError(f"n_max must be a positive integer, got {n_max}")
    log_1mz = math.log1p(-z)
    log_z = math.log(z)
    chi = [LogValue.one()]
    log_qfact = 0.0
    for n in range(1, int(n_max) + 1):
        log_qfact += math.log1p(-(z**n))
        log_chi = math.lgamma(n + 1) + n * log_1mz - log_qfact
        if stats is Statistics.FERMION:
            log_chi += n * (n - 1) / 2 * log_z
        chi.append(LogValue(log_chi, 1))
    return ChiTable(stats, tuple(chi), "closed-form-geometric", (0.0,) * len(chi), float(z))


def normalization_ratio(table: ChiTable, n: int) -> float:
    """chi_{N+1} / chi_N."""
    if table.is_blocked(n):
        raise PauliBlockedError(f"chi_{n} = 0 for {table.stats.label} constituents")
    if table.is_blocked(n + 1):
        return 0.0
    return math.exp(table.log_chi(n + 1) - table.log_chi(n))


def geometric_ratio(z: float, stats, n: int) -> float:
    """Closed-form chi_{N+1}/chi_N for the geometric spectrum."""
    stats = Statistics.parse(stats)
    if not (0 < z < 1):
        raise InvalidParameterError(f"z must lie in (0, 1), got {z}")
    r = (n + 1) * (1 - z) / -math.expm1((n + 1) * math.log(z))
    return r * z**n if stats is Statistics.FERMION else r


def alpha(table: ChiTable, n: int) -> float:
    """sqrt(chi_N / chi_{N-1})."""
    if n < 1:
        raise DomainError(f"alpha_N needs N >= 1, got {n}")
    if table.is_blocked(n - 1):
        raise PauliBlockedError(f"chi_{n - 1} = 0 for {table.stats.label} constituents")
    if table.is_blocked(n):
        return 0.0
    return math.exp(0.5 * (table.log_chi(n) - table.log_chi(n - 1)))


def epsilon_norm_sq(table: ChiTable, n: int) -> float:
    """<eps_N|eps_N> = 1 - N chi_N/chi_{N-1} + (N-1) chi_{N+1}/chi_N, for N >= 2."""
    if n < 2:
        raise DomainError(f"the leakage formula holds for N >= 2, got N={n}")
    lower = normalization_ratio(table, n - 1)
    upper = normalization_ratio(table, n)
    value = 1.0 - n * lower + (n - 1) * upper
    if value < 0:
        if value < -EPS_CLAMP:
            raise NumericError(f"negative leakage norm {value!r} at N={n}")
        value = 0.0
    return value


def asymptotic_ratio(k: float, n: int, stats) -> float:
    """Large-K prediction 1 + s N / K."""
    return 1.0 + Statistics.parse(stats).s * n / k


@dataclass(frozen=True)
class QualityRow:
    n: int
    chi: float
    log_chi: float
    blocked: bool
    alpha: Optional[float]
    eps_norm_sq: Optional[float]
    ratio: Optional[float]
    asymptotic_ratio: float


@dataclass(frozen=True)
class QualityReport:
    stats: Statistics
    K: float
    rows: tuple[QualityRow, ...]
    tail_error_bound: float

    @property
    def n_max(self) -> int:
        return len(self.rows)

    @property
    def pauli_limit(self) -> Optional[int]:
        """Largest N with chi_N > 0, or None if nothing is blocked in range."""
        blocked = [row.n for row in self.rows if row.blocked]
        return min(blocked) - 1 if blocked else None

    def row(self, n: int) -> QualityRow:
        return self.rows[n - 1]


def report_from_table(table: ChiTable, k: float) -> QualityReport:
    """Rows N = 1..table.n_max - 1 (the ratio at N needs chi_{N+1})."""
    stats = table.stats
    rows = []
    for n in range(1, table.n_max):
        blocked = table.is_blocked(n)
        a = eps = ratio = None
        if not blocked:
            a = alpha(table, n)
            ratio = normalization_ratio(table, n)
            if n >= 2:
                eps = epsilon_norm_sq(table, n)
        rows.append(
            QualityRow(
                n=n,
                chi=table.value(n),
                log_chi=table.log_chi(n),
                blocked=blocked,
                alpha=a,
                eps_norm_sq=eps,
                ratio=ratio,
                asymptotic_ratio=asymptotic_ratio(k, n, stats),
            )
        )
    return QualityReport(stats, k, tuple(rows), table.tail_error_bound)


def quality_report(spec, stats, n_max: int) -> QualityReport:
    """K, alpha_N, leakage, ratio and asymptotic prediction for N = 1..n_max."""
    spec = _as_spectrum(spec)
    table = chi_table(spec, stats, n_max + 1)
    return report_from_table(table, schmidt_number(spec))
