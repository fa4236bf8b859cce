"""Two-particle wavefunctions on grids, Schmidt spectra and entanglement measures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ContractViolation, InvalidParameterError, NumericError

DEFAULT_TOLERANCE = 1e-14
DEFAULT_POINTS = 256
CLAMP_THRESHOLD = 1e-14
NORM_TOL = 1e-10
SUM_TOL = 1e-12


@dataclass(frozen=True)
class GaussianParams:
    """Widths of the double-Gaussian amplitude.

    sigma_c is the width along x_A + x_B, sigma_r along x_A - x_B.
    """

    sigma_c: float
    sigma_r: float

    def __post_init__(self):
        for name in ("sigma_c", "sigma_r"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidParameterError(f"{name} must be positive, got {value}")

    @property
    def default_half_extent(self) -> float:
        return 5.0 * max(self.sigma_c, self.sigma_r)


def _uniform_step(coords: np.ndarray, name: str) -> float:
    if coords.ndim != 1 or len(coords) < 2:
        raise InvalidParameterError(f"{name} needs at least two samples")
    steps = np.diff(coords)
    step = float(steps.mean())
    if step <= 0 or np.any(steps <= 0):
        raise InvalidParameterError(f"{name} must be strictly increasing")
    if np.max(np.abs(steps - step)) > 1e-12 * max(abs(step), np.max(np.abs(coords))):
        raise InvalidParameterError(f"{name} must have a constant step")
    return step


@dataclass(frozen=True)
class WaveFunctionGrid:
    """Sampled amplitude Psi(x_A, x_B); rows index x_A, columns index x_B."""

    amplitudes: np.ndarray
    xa_coords: np.ndarray
    xb_coords: np.ndarray
    dxa: float = field(init=False)
    dxb: float = field(init=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        xa = np.asarray(self.xa_coords, dtype=float)
        xb = np.asarray(self.xb_coords, dtype=float)
        if amps.ndim != 2 or amps.shape != (len(xa), len(xb)):
            raise InvalidParameterError(
                f"amplitude shape {amps.shape} does not match coordinates ({len(xa)}, {len(xb)})"
            )
        if not np.all(np.isfinite(amps)):
            raise InvalidParameterError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "xa_coords", xa)
        object.__setattr__(self, "xb_coords", xb)
        object.__setattr__(self, "dxa", _uniform_step(xa, "xa_coords"))
        object.__setattr__(self, "dxb", _uniform_step(xb, "xb_coords"))

    @property
    def shape(self) -> tuple[int, int]:
        return self.amplitudes.shape

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.dxa * self.dxb)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm_sq() - 1.0) <= tol

    def normalize(self) -> "WaveFunctionGrid":
        nrm = self.norm_sq()
        if nrm == 0:
            raise InvalidParameterError("cannot normalize an all-zero grid")
        return WaveFunctionGrid(self.amplitudes / math.sqrt(nrm), self.xa_coords, self.xb_coords)


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Descending Schmidt eigenvalues plus the weight that was discarded.

    ``modes_a`` / ``modes_b`` hold the sampled mode functions as columns when
    the spectrum came from a grid decomposition; they never enter any
    compositeness quantity.
    """

    lambdas: np.ndarray
    tail_mass: float = 0.0
    source: str = "explicit"
    z: Optional[float] = None
    modes_a: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    modes_b: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float).ravel()
        if lam.size == 0:
            raise InvalidParameterError("spectrum needs at least one eigenvalue")
        if np.any(~np.isfinite(lam)) or np.any(lam < 0):
            raise InvalidParameterError("eigenvalues must be finite and non-negative")
        if np.any(np.diff(lam) > 0):
            raise InvalidParameterError("eigenvalues must be in non-increasing order")
        if self.tail_mass < 0:
            raise InvalidParameterError("tail_mass must be non-negative")
        total = math.fsum(lam) + self.tail_mass
        if abs(total - 1.0) > SUM_TOL:
            raise ContractViolation(f"eigenvalues plus tail sum to {total!r}, not 1")
        lam.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)

    def __len__(self):
        return len(self.lambdas)

    @property
    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.lambdas))


def build_gaussian_grid(
    params: GaussianParams,
    half_extent: Optional[float] = None,
    points_per_axis: int = DEFAULT_POINTS,
) -> WaveFunctionGrid:
    """Normalized samples of exp(-(xa+xb)^2/sc^2) * exp(-(xa-xb)^2/sr^2) on a square."""
    if half_extent is None:
        half_extent = params.default_half_extent
    if not (np.isfinite(half_extent) and half_extent > 0):
        raise InvalidParameterError(f"half_extent must be positive, got {half_extent}")
    if int(points_per_axis) != points_per_axis or points_per_axis < 16:
        raise InvalidParameterError("points_per_axis must be an integer >= 16")
    x = np.linspace(-half_extent, half_extent, int(points_per_axis))
    xa, xb = np.meshgrid(x, x, indexing="ij")
    # decaying relative-coordinate factor; a growing one is not normalizable
    amps = np.exp(-((xa + xb) ** 2) / params.sigma_c**2 - (xa - xb) ** 2 / params.sigma_r**2)
    return WaveFunctionGrid(amps, x, x).normalize()


def schmidt_decompose(grid: WaveFunctionGrid, rank_cut: Optional[int] = None) -> SchmidtSpectrum:
    """Weighted SVD of the sampled amplitude.

    Modes are normalized under the discrete inner product
    ``sum_i conj(f_i) g_i dx``; ``Psi = sum_n sqrt(lambda_n) modes_a[:, n] modes_b[:, n]``.
    """
    rows, cols = grid.shape
    if rank_cut is None:
        rank_cut = min(rows, cols)
    if int(rank_cut) != rank_cut or not 1 <= rank_cut <= min(rows, cols):
        raise InvalidParameterError(f"rank_cut must lie in [1, {min(rows, cols)}], got {rank_cut}")
    if not grid.is_normalized():
        raise ContractViolation(f"grid norm^2 is {grid.norm_sq()!r}; call normalize() first")
    weight = math.sqrt(grid.dxa * grid.dxb)
    try:
        u, s, vh = np.linalg.svd(grid.amplitudes * weight, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"singular value decomposition failed: {exc}") from exc
    rank_cut = int(rank_cut)
    lam = s[:rank_cut] ** 2
    lam[lam < CLAMP_THRESHOLD] = 0.0
    tail = max(0.0, 1.0 - math.fsum(lam))
    # keep the sum-to-one invariant exact when rounding pushes the kept mass above 1
    if math.fsum(lam) > 1.0:
        lam = lam / math.fsum(lam)
    modes_a = u[:, :rank_cut] / math.sqrt(grid.dxa)
    modes_b = vh[:rank_cut, :].T / math.sqrt(grid.dxb)
    return SchmidtSpectrum(lam, tail, "numeric-svd", None, modes_a, modes_b)


def reconstruct(spec: SchmidtSpectrum) -> np.ndarray:
    """Amplitude matrix rebuilt from the attached modes."""
    if spec.modes_a is None or spec.modes_b is None:
        raise InvalidParameterError("spectrum carries no mode functions")
    return (spec.modes_a * np.sqrt(spec.lambdas)) @ spec.modes_b.T


def geometric_spectrum(z: float, tolerance: float = DEFAULT_TOLERANCE) -> SchmidtSpectrum:
    """lambda_n = (1-z) z^n, truncated at the first M with z^M <= tolerance."""
    if not (0 <= z < 1):
        raise InvalidParameterError(f"z must lie in [0, 1), got {z}")
    if not (0 < tolerance < 1):
        raise InvalidParameterError(f"tolerance must lie in (0, 1), got {tolerance}")
    if z == 0:
        return SchmidtSpectrum(np.array([1.0]), 0.0, "geometric", 0.0)
    m = max(1, math.ceil(math.log(tolerance) / math.log(z)))
    while z**m > tolerance:
        m += 1
    while m > 1 and z ** (m - 1) <= tolerance:
        m -= 1
    lam = (1.0 - z) * z ** np.arange(m)
    return SchmidtSpectrum(lam, z**m, "geometric", float(z))


def geometric_spectrum_for_order(z: float, n_max: int, tolerance: float = DEFAULT_TOLERANCE) -> SchmidtSpectrum:
    """Geometric spectrum cut at tail <= tolerance * z**n_max.

    A fixed tail cut keeps only ~log(tol)/log(z) modes, which starves the
    fermionic constants near the Pauli edge; the extra factor keeps the
    relative truncation error of every chi_N, N <= n_max, near ``tolerance``.
    """
    if z == 0:
        return geometric_spectrum(0.0, tolerance)
    return geometric_spectrum(z, max(tolerance * z**n_max, 1e-300))


def uniform_spectrum(m: int) -> SchmidtSpectrum:
    """M equal eigenvalues 1/M."""
    if int(m) != m or m < 1:
        raise InvalidParameterError(f"mode count must be a positive integer, got {m}")
    return SchmidtSpectrum(np.full(int(m), 1.0 / m), 0.0, "uniform")


def explicit_spectrum(values: Sequence[float], normalize: bool = False) -> SchmidtSpectrum:
    """Spectrum from user-supplied eigenvalues (sorted descending here).

    Without ``normalize`` the values must sum to at most 1; the shortfall is
    recorded as tail mass.
    """
    lam = np.sort(np.asarray(values, dtype=float).ravel())[::-1]
    if lam.size == 0:
        raise InvalidParameterError("no eigenvalues given")
    if np.any(~np.isfinite(lam)) or np.any(lam < 0):
        raise InvalidParameterError("eigenvalues must be finite and non-negative")
    total = math.fsum(lam)
    if total == 0:
        raise InvalidParameterError("all eigenvalues are zero")
    if normalize:
        lam = lam / total
        total = math.fsum(lam)
    if total > 1.0 + SUM_TOL:
        raise ContractViolation(f"eigenvalues sum to {total!r} > 1")
    if total > 1.0:
        lam = lam / total
        total = 1.0
    return SchmidtSpectrum(lam, max(0.0, 1.0 - total), "explicit")


def schmidt_number(spec: SchmidtSpectrum | Sequence[float]) -> float:
    """Inverse purity 1 / sum lambda^2 of the kept eigenvalues."""
    lam = spec.lambdas if isinstance(spec, SchmidtSpectrum) else np.asarray(spec, dtype=float)
    purity = math.fsum(lam**2)
    if purity == 0:
        raise InvalidParameterError("all-zero spectrum has no Schmidt number")
    return 1.0 / purity


def entanglement_entropy(spec: SchmidtSpectrum | Sequence[float]) -> float:
    """-sum lambda log2 lambda in bits, with 0 log 0 = 0."""
    lam = spec.lambdas if isinstance(spec, SchmidtSpectrum) else np.asarray(spec, dtype=float)
    lam = lam[lam > 0]
    return float(-math.fsum(lam * np.log2(lam))) + 0.0


def z_from_widths(params: GaussianParams) -> float:
    return ((params.sigma_r - params.sigma_c) / (params.sigma_r + params.sigma_c)) ** 2


def k_from_z(z: float) -> float:
    if not (0 <= z < 1):
        raise InvalidParameterError(f"z must lie in [0, 1), got {z}")
    return (1.0 + z) / (1.0 - z)


def z_from_k(k: float) -> float:
    if not (np.isfinite(k) and k >= 1):
        raise InvalidParameterError(f"K must be finite and >= 1, got {k}")
    return (k - 1.0) / (k + 1.0)


# -- WFGRID v1 text format -------------------------------------------------

WFGRID_MAGIC = "WFGRID"
WFGRID_VERSION = "v1"


def format_wfgrid(grid: WaveFunctionGrid) -> str:
    rows, cols = grid.shape
    lines = [f"{WFGRID_MAGIC} {WFGRID_VERSION} {rows} {cols}"]
    lines.append(" ".join(f"{x:.17g}" for x in grid.xa_coords))
    lines.append(" ".join(f"{x:.17g}" for x in grid.xb_coords))
    for amp in grid.amplitudes.ravel():
        lines.append(f"{amp.real:.17g} {amp.imag:.17g}")
    return "\n".join(lines) + "\n"


def parse_wfgrid(text: str) -> WaveFunctionGrid:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InvalidParameterError("empty grid file")
    header = lines[0].split()
    if len(header) != 4 or header[0] != WFGRID_MAGIC or header[1] != WFGRID_VERSION:
        raise InvalidParameterError(f"bad WFGRID header: {lines[0]!r}")
    try:
        rows, cols = int(header[2]), int(header[3])
        if len(lines) < 3:
            raise InvalidParameterError("grid file is missing coordinate lines")
        xa = np.array([float(t) for t in lines[1].split()])
        xb = np.array([float(t) for t in lines[2].split()])
        body = lines[3:]
        if len(xa) != rows or len(xb) != cols:
            raise InvalidParameterError(
                f"header says {rows}x{cols} but got {len(xa)} xa and {len(xb)} xb coordinates"
            )
        if len(body) != rows * cols:
            raise InvalidParameterError(f"expected {rows * cols} amplitude lines, got {len(body)}")
        amps = np.empty(rows * cols, dtype=complex)
        for i, line in enumerate(body):
            parts = line.split()
            if len(parts) != 2:
                raise InvalidParameterError(f"amplitude line {i + 4} needs 're im'")
            amps[i] = complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        if isinstance(exc, InvalidParameterError):
            raise
        raise InvalidParameterError(f"malformed grid file: {exc}") from exc
    return WaveFunctionGrid(amps.reshape(rows, cols), xa, xb)


def read_wfgrid(path: str | Path) -> WaveFunctionGrid:
    return parse_wfgrid(Path(path).read_text())


def write_wfgrid(grid: WaveFunctionGrid, path: str | Path) -> None:
    Path(path).write_text(format_wfgrid(grid))
