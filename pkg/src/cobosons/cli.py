"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage, 3 numeric failure,
4 size guard, 5 I/O error.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import coboson, fockcheck, schmidt, sympoly
from .coboson import Statistics
from .errors import (
    ContractViolation,
    InvalidParameterError,
    NumericError,
    PauliBlockedError,
    SizeGuardError,
)

log = logging.getLogger("cobosons")

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC, EXIT_GUARD, EXIT_IO = range(6)

SWEEP_COLUMNS = (
    "z", "K", "N", "stats", "chi_log", "ratio", "alpha",
    "eps_norm_sq", "asymptotic_ratio", "abs_err_vs_asymptotic",
)


class UsageError(InvalidParameterError):
    pass


def _stats_list(value: str) -> list[Statistics]:
    if value == "both":
        return [Statistics.BOSON, Statistics.FERMION]
    return [Statistics.parse(value)]


def fmt(x: Optional[float]) -> str:
    if x is None:
        return ""
    return f"{x:.17g}"


# -- spectrum file -----------------------------------------------------------

def read_spectrum_file(path: str | Path) -> schmidt.SchmidtSpectrum:
    """One eigenvalue per line; '#' starts a comment. Normalized on load."""
    values = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise InvalidParameterError(f"{path}:{lineno}: not a number: {line!r}") from None
    if not values:
        raise InvalidParameterError(f"{path}: no eigenvalues")
    total = math.fsum(values)
    if abs(total - 1.0) > 1e-6:
        log.warning("spectrum in %s sums to %.12g; renormalizing", path, total)
    return schmidt.explicit_spectrum(values, normalize=True)


# -- report rendering ---------------------------------------------------------

def render_report(report: coboson.QualityReport) -> str:
    out = io.StringIO()
    out.write(f"[{report.stats.label}]  K = {report.K:.10g}\n")
    out.write(f"{'N':>4} {'chi_N':>16} {'ratio':>14} {'1+sN/K':>14} {'alpha_N':>14} {'|eps_N|^2':>14}\n")
    for row in report.rows:
        if row.blocked:
            out.write(f"{row.n:>4} {'0':>16}   Pauli blocked (chi_N = 0)\n")
            continue
        eps = "-" if row.eps_norm_sq is None else f"{row.eps_norm_sq:.8g}"
        out.write(
            f"{row.n:>4} {row.chi:>16.10g} {row.ratio:>14.10g} {row.asymptotic_ratio:>14.10g}"
            f" {row.alpha:>14.10g} {eps:>14}\n"
        )
    if report.pauli_limit is not None:
        out.write(f"note: fermionic composites Pauli blocked beyond N = {report.pauli_limit}\n")
    if report.tail_error_bound > 0:
        out.write(f"tail bound (relative): {report.tail_error_bound:.3g}\n")
    return out.getvalue()


def _analyze_spectrum(spec, n_max, stats_flag) -> str:
    lam = spec.lambdas
    parts = [
        f"modes kept: {len(lam)}  tail mass: {spec.tail_mass:.3g}",
        f"Schmidt number K = {schmidt.schmidt_number(spec):.12g}",
        f"entanglement entropy E = {schmidt.entanglement_entropy(spec):.12g} bits",
    ]
    lead = lam[lam > 0][:8]
    parts.append("leading lambdas: " + " ".join(f"{x:.10g}" for x in lead))
    if spec.nonzero_count >= 2:
        parts.append(f"fitted z (lambda_1/lambda_0) = {lam[1] / lam[0]:.12g}")
    text = "\n".join(parts) + "\n"
    for st in _stats_list(stats_flag):
        text += "\n" + render_report(coboson.quality_report(spec, st, n_max))
    return text


def cmd_analyze_gaussian(args) -> int:
    params = schmidt.GaussianParams(args.sigma_c, args.sigma_r)
    grid = schmidt.build_gaussian_grid(params, args.half_extent, args.points)
    spec = schmidt.schmidt_decompose(grid, args.rank_cut)
    z = schmidt.z_from_widths(params)
    print(f"sigma_c = {params.sigma_c:g}  sigma_r = {params.sigma_r:g}  grid {grid.shape[0]}x{grid.shape[1]}")
    print(f"analytic z = {z:.12g}  analytic K = {schmidt.k_from_z(z):.12g}")
    print(_analyze_spectrum(spec, args.n_max, args.stats), end="")
    return EXIT_OK


def cmd_analyze_grid(args) -> int:
    grid = schmidt.read_wfgrid(args.file)
    if not grid.is_normalized():
        log.warning("grid norm^2 is %.12g; normalizing", grid.norm_sq())
        grid = grid.normalize()
    spec = schmidt.schmidt_decompose(grid, args.rank_cut)
    print(f"grid {grid.shape[0]}x{grid.shape[1]}  dxa = {grid.dxa:.6g}  dxb = {grid.dxb:.6g}")
    print(_analyze_spectrum(spec, args.n_max, args.stats), end="")
    return EXIT_OK


def chi_values(method, stats, n, z=None, spec=None) -> dict:
    """chi_N, ratio, alpha_N, leakage and error bound by one of three routes."""
    if method == "closed":
        if z is None:
            raise UsageError("--method closed needs --z")
        table = coboson.chi_geometric_closed(z, stats, n + 1)
        bound = 0.0
    elif method == "dp":
        table = coboson.chi_table(spec, stats, n + 1)
        bound = table.tail_bounds[n]
    elif method == "oracle":
        chis = fockcheck.chi_series_by_oracle(spec.lambdas, stats, n + 1)
        table = coboson.ChiTable(
            stats,
            tuple(sympoly.LogValue.from_float(c) for c in chis),
            "oracle",
            coboson._relative_tail_bounds(
                [math.log(c) if c > 0 else -math.inf for c in
                 (c / math.factorial(k) for k, c in enumerate(chis))],
                spec.tail_mass,
            ),
            z,
        )
        bound = table.tail_bounds[n]
    else:
        raise UsageError(f"unknown method {method!r}")
    out = {"method": table.source, "stats": stats.label, "N": n, "chi": table.value(n),
           "chi_log": table.log_chi(n), "ratio": None, "alpha": None, "eps_norm_sq": None,
           "tail_bound": bound}
    if not table.is_blocked(n):
        out["ratio"] = coboson.normalization_ratio(table, n)
        if n >= 1:
            out["alpha"] = coboson.alpha(table, n)
        if n >= 2:
            out["eps_norm_sq"] = coboson.epsilon_norm_sq(table, n)
    if method == "oracle" and n >= 2 and not table.is_blocked(n):
        res = fockcheck.epsilon_by_oracle(spec.lambdas, stats, n)
        out["alpha"], out["eps_norm_sq"] = res.alpha, res.eps_norm_sq
    return out


def cmd_chi(args) -> int:
    if args.n < 0:
        raise UsageError("--n must be non-negative")
    spec = None
    if args.spectrum_file is not None:
        spec = read_spectrum_file(args.spectrum_file)
    else:
        if not (0 < args.z < 1):
            raise UsageError(f"--z must lie in (0, 1), got {args.z}")
        if args.method != "closed":
            spec = schmidt.geometric_spectrum(args.z, args.tol)
    for st in _stats_list(args.stats):
        vals = chi_values(args.method, st, args.n, args.z, spec)
        line = [f"method={vals['method']}", f"stats={vals['stats']}", f"N={vals['N']}",
                f"chi={fmt(vals['chi'])}"]
        if vals["ratio"] is None:
            line.append("ratio=blocked")
        else:
            line.append(f"ratio={fmt(vals['ratio'])}")
        line.append(f"alpha={fmt(vals['alpha']) or '-'}")
        line.append(f"eps_norm_sq={fmt(vals['eps_norm_sq']) or '-'}")
        line.append(f"error_bound={vals['tail_bound']:.3g}")
        print(" ".join(line))
    return EXIT_OK


# -- sweep ---------------------------------------------------------------------

@dataclass
class SweepConfig:
    N_values: list[int]
    z_values: Optional[list[float]] = None
    K_values: Optional[list[float]] = None
    stats: str = "both"
    output_path: Optional[str] = None
    format: str = "csv"
    jobs: int = 1

    def __post_init__(self):
        if (self.z_values is None) == (self.K_values is None):
            raise UsageError("give exactly one of z values or K values")
        if not self.N_values:
            raise UsageError("N list is empty")
        if any(int(n) != n or n < 1 for n in self.N_values):
            raise UsageError("N values must be positive integers")
        if self.z_values is not None:
            if not self.z_values:
                raise UsageError("z list is empty")
            if any(not (0 < z < 1) for z in self.z_values):
                raise UsageError("z values must lie in (0, 1)")
        else:
            if not self.K_values:
                raise UsageError("K list is empty")
            if any(not (k > 1 and math.isfinite(k)) for k in self.K_values):
                raise UsageError("K values must be finite and > 1")
        if self.stats not in ("boson", "fermion", "both"):
            raise UsageError(f"unknown stats {self.stats!r}")
        if self.format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")

    def points(self) -> list[tuple[float, float]]:
        """(z, K) pairs in sweep order."""
        if self.z_values is not None:
            return [(z, schmidt.k_from_z(z)) for z in self.z_values]
        return [(schmidt.z_from_k(k), k) for k in self.K_values]


def _sweep_point(z, k, n_values, stats_list) -> list[dict]:
    rows = []
    n_top = max(n_values) + 1
    tables = {st: coboson.chi_geometric_closed(z, st, n_top) for st in stats_list}
    for n in n_values:
        for st in stats_list:
            table = tables[st]
            ratio = coboson.normalization_ratio(table, n)
            pred = coboson.asymptotic_ratio(k, n, st)
            rows.append({
                "z": z, "K": k, "N": n, "stats": st.label,
                "chi_log": table.log_chi(n),
                "ratio": ratio,
                "alpha": coboson.alpha(table, n),
                "eps_norm_sq": coboson.epsilon_norm_sq(table, n) if n >= 2 else None,
                "asymptotic_ratio": pred,
                "abs_err_vs_asymptotic": abs(ratio - pred),
            })
    return rows


def run_sweep(config: SweepConfig) -> list[dict]:
    stats_list = _stats_list(config.stats)
    n_values = [int(n) for n in config.N_values]
    points = config.points()
    with ThreadPoolExecutor(max_workers=max(1, config.jobs)) as pool:
        # map preserves input order, so the output is deterministic
        chunks = pool.map(lambda p: _sweep_point(p[0], p[1], n_values, stats_list), points)
        return [row for chunk in chunks for row in chunk]


def format_sweep(rows: list[dict], fmt_name: str) -> str:
    if fmt_name == "json":
        return json.dumps(rows, indent=1, allow_nan=False) + "\n"
    lines = [",".join(SWEEP_COLUMNS)]
    for row in rows:
        lines.append(",".join(
            row[c] if isinstance(row[c], str) else (str(row[c]) if isinstance(row[c], int) else fmt(row[c]))
            for c in SWEEP_COLUMNS
        ))
    return "\n".join(lines) + "\n"


def cmd_sweep(args) -> int:
    config = SweepConfig(
        N_values=args.n,
        z_values=args.z,
        K_values=args.k,
        stats=args.stats,
        output_path=args.output,
        format=args.format,
        jobs=args.jobs,
    )
    text = format_sweep(run_sweep(config), config.format)
    if config.output_path in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            with open(config.output_path, "w", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {config.output_path}: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


# -- verify --------------------------------------------------------------------

def _rel(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def verify_suites(max_n=5, max_m=8, seed=0, trials=50, tol=1e-10) -> list[tuple[str, float, bool]]:
    """Run the oracle-equivalence suites; returns (name, max error, passed)."""
    if max_n < 2 or max_m < 1:
        raise UsageError("need max_n >= 2 and max_m >= 1")
    if max_m**max_n > fockcheck.STATE_GUARD:
        raise SizeGuardError(
            f"max_m**max_n = {max_m**max_n} exceeds the oracle guard {fockcheck.STATE_GUARD:.0e}"
        )
    rng = np.random.default_rng(seed)
    spectra = []
    for _ in range(trials):
        m = int(rng.integers(1, max_m + 1))
        spectra.append(schmidt.explicit_spectrum(rng.dirichlet(np.ones(m)), normalize=True))

    results = []

    err = 0.0
    for spec in spectra:
        for kind, strict in ((sympoly.PolyKind.ELEMENTARY, True), (sympoly.PolyKind.HOMOGENEOUS, False)):
            series = sympoly.symmetric_series(spec.lambdas, max_n, kind).linear()
            for n in range(max_n + 1):
                err = max(err, _rel(series[n], sympoly.brute_force_ordered_sum(spec.lambdas, n, strict)))
    results.append(("sympoly dp vs brute force", err, err <= tol))

    err = 0.0
    for z in np.round(np.arange(0.1, 1.0, 0.1), 10):
        spec = schmidt.geometric_spectrum_for_order(float(z), 20)
        for st in Statistics:
            dp = coboson.chi_table(spec, st, 20)
            closed = coboson.chi_geometric_closed(float(z), st, 20)
            for n in range(21):
                err = max(err, abs(math.expm1(dp.log_chi(n) - closed.log_chi(n))))
    results.append(("closed form vs dp", err, err <= tol))

    err_chi = err_eps = err_comm = 0.0
    for spec in spectra:
        lam = spec.lambdas
        k = schmidt.schmidt_number(spec)
        for st in Statistics:
            table = coboson.chi_table(spec, st, max_n + 1)
            chis = fockcheck.chi_series_by_oracle(lam, st, max_n)
            for n in range(max_n + 1):
                err_chi = max(err_chi, abs(chis[n] - table.value(n)) / max(1.0, table.value(n)))
            for n in range(2, max_n + 1):
                if table.is_blocked(n):
                    continue
                res = fockcheck.epsilon_by_oracle(lam, st, n)
                eps = coboson.epsilon_norm_sq(table, n)
                err_eps = max(err_eps, abs(res.alpha - coboson.alpha(table, n)), abs(res.eps_norm_sq - eps))
            one = fockcheck.composite_state(lam, st, 1)
            got = fockcheck.commutator_expectation(lam, st, one)
            err_comm = max(err_comm, abs(got - (1 + 2 * st.s / k)))
    results.append(("oracle chi vs dp", err_chi, err_chi <= tol))
    results.append(("oracle alpha/eps vs formulas", err_eps, err_eps <= tol))
    results.append(("oracle commutator vs 1 + 2s/K", err_comm, err_comm <= tol))
    return results


def cmd_verify(args) -> int:
    results = verify_suites(args.max_n, args.max_m, args.seed, args.trials)
    ok = True
    for name, err, passed in results:
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name:<34} max err {err:.3e}")
    print("all suites passed" if ok else "verification FAILED")
    return EXIT_OK if ok else EXIT_VERIFY


# -- entry point -----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cobosons", description="Bosonic quality of two-constituent composites.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def report_opts(p):
        p.add_argument("--n-max", type=int, default=5)
        p.add_argument("--stats", choices=("boson", "fermion", "both"), default="both")
        p.add_argument("--rank-cut", type=int, default=None)

    p = sub.add_parser("analyze-gaussian", help="decompose a double-Gaussian grid")
    p.add_argument("--sigma-c", type=float, required=True)
    p.add_argument("--sigma-r", type=float, required=True)
    p.add_argument("--half-extent", type=float, default=None)
    p.add_argument("--points", type=int, default=schmidt.DEFAULT_POINTS)
    report_opts(p)
    p.set_defaults(func=cmd_analyze_gaussian)

    p = sub.add_parser("analyze-grid", help="decompose a WFGRID v1 file")
    p.add_argument("file")
    report_opts(p)
    p.set_defaults(func=cmd_analyze_grid)

    p = sub.add_parser("chi", help="normalization constant and derived quantities")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--z", type=float)
    src.add_argument("--spectrum-file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--stats", choices=("boson", "fermion", "both"), default="both")
    p.add_argument("--method", choices=("closed", "dp", "oracle"), default="dp")
    p.add_argument("--tol", type=float, default=schmidt.DEFAULT_TOLERANCE,
                   help="tail-mass truncation for geometric spectra")
    p.set_defaults(func=cmd_chi)

    p = sub.add_parser("sweep", help="ratio-vs-K table for geometric spectra")
    pts = p.add_mutually_exclusive_group(required=True)
    pts.add_argument("--z", type=float, nargs="+")
    pts.add_argument("--k", type=float, nargs="+")
    p.add_argument("--n", type=int, nargs="*", required=True)
    p.add_argument("--stats", choices=("boson", "fermion", "both"), default="both")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the oracle-equivalence suites")
    p.add_argument("--max-n", type=int, default=5)
    p.add_argument("--max-m", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=50)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (NumericError, ContractViolation, PauliBlockedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
