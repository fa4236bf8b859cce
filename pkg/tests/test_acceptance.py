"""Exit criteria. Each test records one PASS/FAIL line in the terminal summary."""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from cobosons.cli import main
from cobosons.coboson import (
    Statistics,
    alpha,
    asymptotic_ratio,
    chi_geometric_closed,
    chi_table,
    epsilon_norm_sq,
    normalization_ratio,
)
from cobosons.fockcheck import (
    FockState,
    chi_series_by_oracle,
    commutator_expectation,
    composite_state,
    epsilon_by_oracle,
)
from cobosons.schmidt import (
    GaussianParams,
    build_gaussian_grid,
    explicit_spectrum,
    geometric_spectrum,
    geometric_spectrum_for_order,
    k_from_z,
    schmidt_decompose,
    schmidt_number,
    uniform_spectrum,
    z_from_k,
)

from conftest import ACCEPTANCE_LINES

B, F = Statistics.BOSON, Statistics.FERMION
Z_GRID = [round(0.1 * i, 10) for i in range(1, 10)]
N_TOP = 20


def record(label, ok, detail):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
    print(ACCEPTANCE_LINES[-1])
    assert ok, detail


def oracle_spectra():
    """50 random spectra with M <= 8 plus renormalized 12-mode geometric cuts."""
    rng = np.random.default_rng(2006)
    spectra = []
    for _ in range(50):
        m = int(rng.integers(1, 9))
        spectra.append(explicit_spectrum(rng.dirichlet(np.ones(m)), normalize=True))
    for z in (0.3, 0.5, 0.7):
        spectra.append(explicit_spectrum((1 - z) * z ** np.arange(12), normalize=True))
    return spectra


def test_1_closed_form_identity():
    start = time.perf_counter()
    worst = 0.0
    for z in Z_GRID:
        spec = geometric_spectrum_for_order(z, N_TOP)
        assert spec.tail_mass <= 1e-14
        for stats in (B, F):
            dp = chi_table(spec, stats, N_TOP)
            closed = chi_geometric_closed(z, stats, N_TOP)
            for n in range(N_TOP + 1):
                worst = max(worst, abs(math.expm1(dp.log_chi(n) - closed.log_chi(n))))
    elapsed = time.perf_counter() - start
    record(
        "1 closed form vs dp",
        worst <= 1e-10 and elapsed < 1.0,
        f"max rel err {worst:.2e} (tol 1e-10), {elapsed:.3f}s (limit 1s)",
    )


def test_2_ratio_signs_and_limits():
    ok = True
    for n in range(1, N_TOP + 1):
        bose = [normalization_ratio(chi_geometric_closed(z, B, n + 1), n) for z in Z_GRID]
        fermi = [normalization_ratio(chi_geometric_closed(z, F, n + 1), n) for z in Z_GRID]
        ok &= all(1 < r <= n + 1 for r in bose)
        ok &= all(0 < r < 1 for r in fermi)
        # bosonic ratio falls toward 1, fermionic ratio rises toward 1
        ok &= bool(np.all(np.diff(bose) < 0) and np.all(np.diff(fermi) > 0))
    limit_err = [abs(normalization_ratio(chi_geometric_closed(0.999, st, 2), 1) - 1) for st in (B, F)]
    ok &= max(limit_err) <= 1e-3
    # higher N: |ratio - 1| ~ N/K at z = 0.999, inside the criterion-3 envelope
    k = k_from_z(0.999)
    for n in range(2, N_TOP + 1):
        for st in (B, F):
            r = normalization_ratio(chi_geometric_closed(0.999, st, n + 1), n)
            ok &= abs(r - 1) <= n / k + 3 * (n / k) ** 2
    record(
        "2 ratio signs, monotonicity, z->1 limit",
        ok,
        f"N=1 |ratio-1| at z=0.999: {max(limit_err):.2e} (tol 1e-3)",
    )


def _residual(n, k, stats):
    spec = geometric_spectrum(z_from_k(k), 1e-14)
    table = chi_table(spec, stats, n + 1)
    return abs(normalization_ratio(table, n) - asymptotic_ratio(k, n, stats))


def test_3_asymptotic_law():
    ok = True
    shrink_seen = []
    worst_scaled = 0.0
    for n in (1, 2, 3, 5):
        for stats in (B, F):
            ks = [50 * n, 100 * n, 200 * n, 400 * n]
            res = [_residual(n, k, stats) for k in ks]
            for k, r in zip(ks, res):
                worst_scaled = max(worst_scaled, r / (n / k) ** 2)
                ok &= r <= 3 * (n / k) ** 2
            if n == 1:
                # 2(1-z)/(1-z^2) = 1 + 1/K exactly; no residual left to shrink
                for k in ks:
                    z = Fraction(k - 1, k + 1)
                    exact = 2 * (1 - z) / (1 - z**2) * (z if stats is F else 1)
                    ok &= exact == 1 + Fraction(stats.s, k)
                ok &= max(res) <= 1e-12
            else:
                shrink = [a / b for a, b in zip(res, res[1:])]
                shrink_seen += shrink
                ok &= all(3.2 <= s <= 4.8 for s in shrink)
    record(
        "3 asymptotic 1 + sN/K",
        ok,
        f"max residual/(N/K)^2 = {worst_scaled:.3f} (limit 3); "
        f"shrink per doubling {min(shrink_seen):.3f}..{max(shrink_seen):.3f} (4 +- 20%); N=1 exact",
    )


def test_4_uniform_exactness():
    worst = 0.0
    ok = True
    for m in (4, 8, 16, 64):
        spec = uniform_spectrum(m)
        for stats in (B, F):
            table = chi_table(spec, stats, m)
            for n in range(1, m):
                if stats is B:
                    poly = lambda j: Fraction(math.comb(m + j - 1, j), m**j)
                else:
                    poly = lambda j: Fraction(math.comb(m, j), m**j)
                exact = (n + 1) * poly(n + 1) / poly(n)
                ok &= exact == 1 + Fraction(stats.s * n, m)
                worst = max(worst, abs(normalization_ratio(table, n) - float(exact)))
    record("4 uniform spectrum ratio", ok and worst <= 1e-12, f"max abs err {worst:.2e} (tol 1e-12)")


def test_5_gaussian_pipeline():
    start = time.perf_counter()
    grid = build_gaussian_grid(GaussianParams(1.0, 3.0), half_extent=8.0, points_per_axis=512)
    spec = schmidt_decompose(grid)
    elapsed = time.perf_counter() - start
    expected = 0.75 * 0.25 ** np.arange(8)
    rel = np.max(np.abs(spec.lambdas[:8] / expected - 1))
    k_err = abs(schmidt_number(spec) / (5 / 3) - 1)
    record(
        "5 gaussian SVD pipeline",
        rel <= 1e-6 and k_err <= 1e-6 and elapsed < 30,
        f"lambda rel err {rel:.2e}, K rel err {k_err:.2e} (tol 1e-6), {elapsed:.2f}s (limit 30s)",
    )


def test_6_oracle_equivalence():
    chi_err = eps_err = 0.0
    for spec in oracle_spectra():
        lam = spec.lambdas
        for stats in (B, F):
            table = chi_table(spec, stats, 6)
            chis = chi_series_by_oracle(lam, stats, 5)
            for n in range(6):
                slack = table.tail_bounds[n] * table.value(n)
                chi_err = max(chi_err, abs(chis[n] - table.value(n)) - slack)
            for n in range(2, 6):
                if table.is_blocked(n):
                    continue
                res = epsilon_by_oracle(lam, stats, n)
                eps_err = max(
                    eps_err,
                    abs(res.alpha - alpha(table, n)),
                    abs(res.eps_norm_sq - epsilon_norm_sq(table, n)),
                )
    half = geometric_spectrum(0.5, 1e-14).lambdas
    targets = {B: (math.sqrt(4 / 3), 1 / 21), F: (math.sqrt(2 / 3), 2 / 21)}
    spot = 0.0
    for stats, (a, e) in targets.items():
        res = epsilon_by_oracle(half, stats, 2)
        spot = max(spot, abs(res.alpha - a), abs(res.eps_norm_sq - e))
    record(
        "6 fock oracle vs formulas",
        chi_err <= 1e-10 and eps_err <= 1e-10 and spot <= 1e-10,
        f"chi {chi_err:.2e}, alpha/eps {eps_err:.2e}, z=0.5 spot values {spot:.2e} (tol 1e-10)",
    )


def test_7_commutator():
    vac_err = one_err = 0.0
    for spec in oracle_spectra():
        lam = spec.lambdas
        k = schmidt_number(spec)
        for stats in (B, F):
            vac = FockState.vacuum(stats, len(lam))
            vac_err = max(vac_err, abs(commutator_expectation(lam, stats, vac) - 1))
            one = composite_state(lam, stats, 1)
            one_err = max(one_err, abs(commutator_expectation(lam, stats, one) - (1 + 2 * stats.s / k)))
    # vacuum value is the float sum of lambda_n; allow a few ulps of rounding
    record(
        "7 commutator expectations",
        vac_err <= 4 * np.finfo(float).eps and one_err <= 1e-12,
        f"vacuum |<[c,c+]> - 1| {vac_err:.2e} (<= 4 ulp), one-pair {one_err:.2e} (tol 1e-12)",
    )


def test_8_pauli_blocking():
    rng = np.random.default_rng(8)
    ok = True
    for m in range(1, 9):
        lam = np.concatenate([rng.dirichlet(np.ones(m)), np.zeros(3)])
        table = chi_table(explicit_spectrum(lam, normalize=True), F, m + 3)
        for n in range(m + 1, m + 4):
            ok &= table.chi[n].sign == 0 and table.value(n) == 0.0
        ok &= table.chi[m].sign == 1
    single = chi_table(explicit_spectrum([1.0]), B, 30)
    worst = max(abs(single.value(n) / math.factorial(n) - 1) for n in range(31))
    record(
        "8 pauli blocking and single-mode bosons",
        ok and worst <= 1e-12,
        f"fermionic zeros exact: {ok}; single-mode chi_N/N! rel err {worst:.2e} (tol 1e-12)",
    )


def test_9_sweep_determinism(tmp_path, capsys):
    args = ["sweep", "--z"] + [str(z) for z in Z_GRID] + ["--n", "1", "2", "3", "4", "5"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["-o", str(a)]) == 0
    assert main(args + ["-o", str(b), "--jobs", "4"]) == 0
    capsys.readouterr()
    same = a.read_bytes() == b.read_bytes()
    record("9 sweep determinism", same and b"\r" not in a.read_bytes(), f"{len(a.read_bytes())} bytes, identical: {same}")
