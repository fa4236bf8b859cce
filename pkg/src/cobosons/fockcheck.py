"""Second-quantized oracle for the composite pair operators.

States are sparse maps from pair-occupation vectors to amplitudes.  Because
the constituents only ever appear in blocks a_n^dag b_n^dag, the basis state
with k_n pairs in mode n is |k_n>_A |k_n>_B, and the sector occupations stay
equal.  For fermions the two-operator blocks commute with each other (moving
one block past another reorders an even number of fermion operators), so the
pair occupations need no sign bookkeeping; a block on an occupied mode gives
zero.  For bosons a_n^dag b_n^dag contributes sqrt(k+1) * sqrt(k+1) = k+1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np

from .coboson import Statistics
from .errors import ContractViolation, InvalidParameterError, NumericError, SizeGuardError

PRUNE_THRESHOLD = 1e-16
STATE_GUARD = 10**7
ORTHOGONALITY_TOL = 1e-12

Occupation = Tuple[int, ...]


@dataclass(frozen=True)
class FockState:
    stats: Statistics
    mode_count: int
    amplitudes: Dict[Occupation, complex] = field(default_factory=dict)
    pruned_weight: float = 0.0

    def __post_init__(self):
        for occ in self.amplitudes:
            if len(occ) != self.mode_count:
                raise InvalidParameterError(f"occupation {occ} has wrong length")
            if any(k < 0 for k in occ):
                raise InvalidParameterError(f"negative occupation in {occ}")
            if self.stats is Statistics.FERMION and any(k > 1 for k in occ):
                raise InvalidParameterError(f"fermionic occupation above 1 in {occ}")

    @classmethod
    def vacuum(cls, stats, mode_count: int) -> "FockState":
        stats = Statistics.parse(stats)
        return cls(stats, mode_count, {(0,) * mode_count: 1.0 + 0j})

    def norm_sq(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self.amplitudes.values())

    def inner(self, other: "FockState") -> complex:
        """<self|other>."""
        self._compatible(other)
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        terms = [
            self.amplitudes[occ].conjugate() * other.amplitudes[occ]
            for occ in small.amplitudes
            if occ in large.amplitudes
        ]
        return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))

    def scaled(self, factor: complex) -> "FockState":
        return FockState(
            self.stats,
            self.mode_count,
            {occ: a * factor for occ, a in self.amplitudes.items()},
            self.pruned_weight * abs(factor) ** 2,
        )

    def normalized(self) -> "FockState":
        nrm = self.norm_sq()
        if nrm == 0:
            raise NumericError("cannot normalize the zero state")
        return self.scaled(1.0 / math.sqrt(nrm))

    def __sub__(self, other: "FockState") -> "FockState":
        self._compatible(other)
        amps = dict(self.amplitudes)
        for occ, a in other.amplitudes.items():
            amps[occ] = amps.get(occ, 0.0) - a
        return FockState(self.stats, self.mode_count, amps, self.pruned_weight + other.pruned_weight)

    def __len__(self):
        return len(self.amplitudes)

    @property
    def is_zero(self) -> bool:
        return not self.amplitudes

    def _compatible(self, other: "FockState"):
        if self.stats is not other.stats or self.mode_count != other.mode_count:
            raise InvalidParameterError("states live in different Fock spaces")


@dataclass(frozen=True)
class PairOperator:
    """c^dag = sum_n sqrt(lambda_n) a_n^dag b_n^dag, or its adjoint c."""

    lambdas: np.ndarray
    direction: str = "create"

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float).ravel()
        if np.any(lam < 0):
            raise InvalidParameterError("eigenvalues must be non-negative")
        if math.fsum(lam) > 1 + 1e-12:
            raise InvalidParameterError("eigenvalues sum above 1")
        if self.direction not in ("create", "annihilate"):
            raise InvalidParameterError(f"unknown direction {self.direction!r}")
        object.__setattr__(self, "lambdas", lam)

    @property
    def mode_count(self) -> int:
        return len(self.lambdas)

    def adjoint(self) -> "PairOperator":
        return PairOperator(self.lambdas, "annihilate" if self.direction == "create" else "create")

    def __call__(self, state: FockState) -> FockState:
        if self.direction == "create":
            return apply_creation(self, state)
        return apply_annihilation(self, state)


def _check(op: PairOperator, state: FockState):
    if op.mode_count != state.mode_count:
        raise InvalidParameterError(
            f"operator has {op.mode_count} modes, state has {state.mode_count}"
        )


def _prune(stats, mode_count, amps, carried) -> FockState:
    kept = {}
    dropped = 0.0
    for occ, a in amps.items():
        if abs(a) < PRUNE_THRESHOLD:
            dropped += abs(a) ** 2
        else:
            kept[occ] = a
    return FockState(stats, mode_count, kept, carried + dropped)


def apply_creation(op: PairOperator, state: FockState) -> FockState:
    _check(op, state)
    fermion = state.stats is Statistics.FERMION
    roots = np.sqrt(op.lambdas)
    out: Dict[Occupation, complex] = {}
    for occ, amp in state.amplitudes.items():
        for n, root in enumerate(roots):
            if root == 0:
                continue
            k = occ[n]
            if fermion:
                if k:
                    continue
                factor = root
            else:
                factor = root * (k + 1)
            new = occ[:n] + (k + 1,) + occ[n + 1 :]
            out[new] = out.get(new, 0.0) + factor * amp
    return _prune(state.stats, state.mode_count, out, state.pruned_weight)


def apply_annihilation(op: PairOperator, state: FockState) -> FockState:
    _check(op, state)
    roots = np.sqrt(op.lambdas)
    out: Dict[Occupation, complex] = {}
    for occ, amp in state.amplitudes.items():
        for n, root in enumerate(roots):
            k = occ[n]
            if root == 0 or k == 0:
                continue
            # fermionic k is 1, so the bosonic factor k covers both cases
            new = occ[:n] + (k - 1,) + occ[n + 1 :]
            out[new] = out.get(new, 0.0) + root * k * amp
    return _prune(state.stats, state.mode_count, out, state.pruned_weight)


def _guard(mode_count: int, n: int):
    if mode_count**n > STATE_GUARD:
        raise SizeGuardError(
            f"{mode_count}**{n} exceeds the oracle state guard {STATE_GUARD:.0e}"
        )


def composite_chain(lambdas: Sequence[float], stats, n_max: int) -> list[FockState]:
    """Unnormalized states (c^dag)^N |0> for N = 0..n_max."""
    stats = Statistics.parse(stats)
    op = PairOperator(lambdas)
    if int(n_max) != n_max or n_max < 0:
        raise InvalidParameterError("n_max must be a non-negative integer")
    _guard(op.mode_count, int(n_max))
    chain = [FockState.vacuum(stats, op.mode_count)]
    for _ in range(int(n_max)):
        chain.append(apply_creation(op, chain[-1]))
    return chain


def chi_by_oracle(lambdas: Sequence[float], stats, n: int) -> float:
    """||(c^dag)^N |0>||^2 / N!."""
    state = composite_chain(lambdas, stats, n)[-1]
    return state.norm_sq() / math.factorial(n)


def chi_series_by_oracle(lambdas: Sequence[float], stats, n_max: int) -> list[float]:
    return [s.norm_sq() / math.factorial(n) for n, s in enumerate(composite_chain(lambdas, stats, n_max))]


@dataclass(frozen=True)
class EpsilonResult:
    alpha: float
    eps_norm_sq: float
    overlap_residual: float
    annihilated_norm_sq: float

    def __iter__(self):
        return iter((self.alpha, self.eps_norm_sq))


def epsilon_by_oracle(lambdas: Sequence[float], stats, n: int) -> EpsilonResult:
    """Split c|N> into alpha_N sqrt(N) |N-1> plus an orthogonal remainder."""
    if n < 2:
        raise InvalidParameterError(f"N must be >= 2, got {n}")
    stats = Statistics.parse(stats)
    chain = composite_chain(lambdas, stats, n)
    if chain[n].is_zero:
        raise NumericError(f"|{n}> vanishes (Pauli blocked)")
    ket_n = chain[n].normalized()
    ket_prev = chain[n - 1].normalized()
    c_ket = apply_annihilation(PairOperator(lambdas, "annihilate"), ket_n)
    overlap = ket_prev.inner(c_ket)
    eps = c_ket - ket_prev.scaled(overlap)
    residual = abs(ket_prev.inner(eps))
    if residual > ORTHOGONALITY_TOL:
        raise NumericError(f"leakage state not orthogonal to |N-1>: {residual!r}")
    a = overlap.real / math.sqrt(n)
    total = c_ket.norm_sq()
    return EpsilonResult(a, total - n * a * a, residual, total)


def delta_expectation(lambdas: Sequence[float], state: FockState) -> float:
    """<psi| sum_n lambda_n (a_n^dag a_n + b_n^dag b_n) |psi>; each pair counts twice."""
    lam = np.asarray(lambdas, dtype=float)
    return math.fsum(
        abs(a) ** 2 * 2.0 * math.fsum(lam[i] * k for i, k in enumerate(occ) if k)
        for occ, a in state.amplitudes.items()
    )


def commutator_expectation(
    lambdas: Sequence[float], stats, state: FockState, tol: float = 1e-10
) -> float:
    """<psi| c c^dag - c^dag c |psi> by explicit operator application."""
    stats = Statistics.parse(stats)
    if stats is not state.stats:
        raise InvalidParameterError("statistics flag does not match the state")
    if abs(state.norm_sq() - 1.0) > tol:
        raise ContractViolation(f"state norm^2 is {state.norm_sq()!r}, expected 1")
    create = PairOperator(lambdas, "create")
    annihilate = create.adjoint()
    # <psi|c c^dag|psi> = ||c^dag psi||^2, <psi|c^dag c|psi> = ||c psi||^2
    return apply_creation(create, state).norm_sq() - apply_annihilation(annihilate, state).norm_sq()


def composite_state(lambdas: Sequence[float], stats, n: int) -> FockState:
    """Normalized |N>."""
    return composite_chain(lambdas, stats, n)[-1].normalized()
