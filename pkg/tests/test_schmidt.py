import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cobosons.errors import ContractViolation, InvalidParameterError
from cobosons.schmidt import (
    GaussianParams,
    SchmidtSpectrum,
    WaveFunctionGrid,
    build_gaussian_grid,
    entanglement_entropy,
    explicit_spectrum,
    format_wfgrid,
    geometric_spectrum,
    geometric_spectrum_for_order,
    k_from_z,
    parse_wfgrid,
    reconstruct,
    schmidt_decompose,
    schmidt_number,
    uniform_spectrum,
    z_from_k,
    z_from_widths,
)

from conftest import normalized_lambdas


@pytest.fixture(scope="module")
def gaussian_13():
    grid = build_gaussian_grid(GaussianParams(1.0, 3.0), half_extent=8.0, points_per_axis=256)
    return grid, schmidt_decompose(grid)


def test_product_gaussian_is_separable():
    grid = build_gaussian_grid(GaussianParams(1.0, 1.0), half_extent=5.0, points_per_axis=128)
    spec = schmidt_decompose(grid)
    assert spec.lambdas[0] == pytest.approx(1.0, abs=1e-10)
    assert spec.tail_mass <= 1e-10
    assert schmidt_number(spec) == pytest.approx(1.0, abs=1e-10)


def test_gaussian_grid_is_normalized(gaussian_13):
    grid, _ = gaussian_13
    assert grid.norm_sq() == pytest.approx(1.0, abs=1e-10)
    assert grid.shape == (256, 256)


def test_gaussian_spectrum_is_geometric(gaussian_13):
    _, spec = gaussian_13
    expected = 0.75 * 0.25 ** np.arange(9)
    np.testing.assert_allclose(spec.lambdas[:9], expected, rtol=1e-6)


def test_modes_orthonormal(gaussian_13):
    grid, spec = gaussian_13
    for modes, dx in ((spec.modes_a, grid.dxa), (spec.modes_b, grid.dxb)):
        gram = modes[:, :12].conj().T @ modes[:, :12] * dx
        np.testing.assert_allclose(gram, np.eye(12), atol=1e-8)


@pytest.mark.parametrize("rank_cut", [1, 3, 10, 256])
def test_reconstruction_error_bounded_by_tail(gaussian_13, rank_cut):
    grid, _ = gaussian_13
    spec = schmidt_decompose(grid, rank_cut)
    err = np.sqrt(np.sum(np.abs(reconstruct(spec) - grid.amplitudes) ** 2) * grid.dxa * grid.dxb)
    assert err <= math.sqrt(spec.tail_mass) + 1e-8


def test_invalid_gaussian_parameters():
    with pytest.raises(InvalidParameterError):
        GaussianParams(1.0, -1.0)
    with pytest.raises(InvalidParameterError):
        build_gaussian_grid(GaussianParams(1.0, 1.0), half_extent=0.0)
    with pytest.raises(InvalidParameterError):
        build_gaussian_grid(GaussianParams(1.0, 1.0), points_per_axis=8)


def test_decompose_contracts(gaussian_13):
    grid, _ = gaussian_13
    with pytest.raises(InvalidParameterError):
        schmidt_decompose(grid, 0)
    unnormalized = WaveFunctionGrid(grid.amplitudes * 2, grid.xa_coords, grid.xb_coords)
    with pytest.raises(ContractViolation):
        schmidt_decompose(unnormalized)


def test_grid_validation():
    x = np.linspace(0, 1, 5)
    with pytest.raises(InvalidParameterError):
        WaveFunctionGrid(np.ones((5, 4)), x, x)
    with pytest.raises(InvalidParameterError):
        WaveFunctionGrid(np.ones((5, 5)), np.array([0, 1, 2, 4, 5.0]), x)
    with pytest.raises(InvalidParameterError):
        WaveFunctionGrid(np.ones((5, 5)), x[::-1], x)


def test_geometric_spectrum_examples():
    spec = geometric_spectrum(0.0, 1e-14)
    np.testing.assert_array_equal(spec.lambdas, [1.0])
    assert spec.tail_mass == 0.0
    spec = geometric_spectrum(0.5, 1e-14)
    np.testing.assert_array_equal(spec.lambdas[:3], [0.5, 0.25, 0.125])
    assert len(spec) == 47 == math.ceil(math.log(1e-14) / math.log(0.5))
    assert spec.tail_mass == 0.5**47
    for bad in (1.0, -0.1, 1.5):
        with pytest.raises(InvalidParameterError):
            geometric_spectrum(bad, 1e-14)


@given(st.floats(0.01, 0.99), st.sampled_from([1e-3, 1e-8, 1e-14]))
def test_geometric_truncation_is_minimal(z, tol):
    spec = geometric_spectrum(z, tol)
    m = len(spec)
    assert spec.tail_mass == z**m <= tol
    assert m == 1 or z ** (m - 1) > tol
    assert math.fsum(spec.lambdas) + spec.tail_mass == pytest.approx(1.0, abs=1e-12)
    assert schmidt_number(spec) == pytest.approx(k_from_z(z), rel=max(tol, 1e-12))


def test_geometric_for_order_deepens_cut():
    spec = geometric_spectrum_for_order(0.1, 20)
    assert spec.tail_mass <= 1e-14 * 0.1**20
    assert len(spec) > 20


def test_schmidt_number_examples():
    assert schmidt_number(explicit_spectrum([1.0])) == 1.0
    assert schmidt_number(uniform_spectrum(4)) == pytest.approx(4.0, rel=1e-15)
    assert schmidt_number(geometric_spectrum(0.5, 1e-14)) == pytest.approx(3.0, rel=1e-12)
    # direct summation oracle
    direct = 1 / sum((0.5 * 0.5**n) ** 2 for n in range(200))
    assert direct == pytest.approx(3.0, rel=1e-14)
    with pytest.raises(InvalidParameterError):
        schmidt_number([0.0, 0.0])


def test_entropy_examples():
    assert entanglement_entropy(explicit_spectrum([1.0])) == 0.0
    assert entanglement_entropy(uniform_spectrum(4)) == pytest.approx(2.0, rel=1e-15)
    direct = sum(k * 2.0**-k for k in range(1, 200))
    assert direct == pytest.approx(2.0, rel=1e-15)
    assert entanglement_entropy(geometric_spectrum(0.5, 1e-14)) == pytest.approx(2.0, abs=1e-10)


def test_width_and_k_conversions():
    assert z_from_widths(GaussianParams(2.0, 2.0)) == 0.0
    assert z_from_widths(GaussianParams(1.0, 3.0)) == 0.25
    assert z_from_widths(GaussianParams(3.0, 1.0)) == 0.25
    assert k_from_z(0.0) == 1.0
    assert k_from_z(0.5) == pytest.approx(3.0, rel=1e-15)
    assert k_from_z(0.5) == pytest.approx((1 - 0.25) / 0.25, rel=1e-15)
    assert z_from_k(3.0) == 0.5
    with pytest.raises(InvalidParameterError):
        k_from_z(1.0)
    with pytest.raises(InvalidParameterError):
        z_from_k(0.5)


@given(st.floats(0.0, 0.99))
def test_k_z_round_trip(z):
    assert z_from_k(k_from_z(z)) == pytest.approx(z, abs=1e-12)


@given(normalized_lambdas(max_size=10), st.randoms(use_true_random=False), st.integers(0, 5))
def test_schmidt_number_permutation_and_zeros(lam, rnd, zeros):
    base = schmidt_number(lam)
    perm = list(lam)
    rnd.shuffle(perm)
    assert schmidt_number(perm + [0.0] * zeros) == pytest.approx(base, rel=1e-13)
    assert base >= 1 - 1e-12
    assert (abs(base - 1) < 1e-9) == (max(lam) > 1 - 1e-9)


def test_modes_do_not_affect_measures(gaussian_13):
    _, spec = gaussian_13
    bare = SchmidtSpectrum(spec.lambdas, spec.tail_mass, "explicit")
    assert schmidt_number(bare) == schmidt_number(spec)
    assert entanglement_entropy(bare) == entanglement_entropy(spec)


def test_spectrum_invariants():
    with pytest.raises(InvalidParameterError):
        SchmidtSpectrum(np.array([0.25, 0.75]))
    with pytest.raises(ContractViolation):
        SchmidtSpectrum(np.array([0.75, 0.2]))
    with pytest.raises(ContractViolation):
        explicit_spectrum([0.9, 0.9])
    spec = explicit_spectrum([0.2, 0.5])
    np.testing.assert_array_equal(spec.lambdas, [0.5, 0.2])
    assert spec.tail_mass == pytest.approx(0.3)


def test_wfgrid_round_trip():
    x = np.linspace(-1, 1, 4)
    amps = np.arange(12).reshape(4, 3) + 1j * np.arange(12).reshape(4, 3)[::-1]
    grid = WaveFunctionGrid(amps, x, np.linspace(0, 2, 3))
    back = parse_wfgrid(format_wfgrid(grid))
    np.testing.assert_array_equal(back.amplitudes, grid.amplitudes)
    np.testing.assert_array_equal(back.xa_coords, grid.xa_coords)


@pytest.mark.parametrize(
    "text",
    [
        "WFGRID v1 2 2\n0 1\n0 1\n1 0\n1 0\n1 0\n",  # too few amplitude lines
        "WFGRID v1 2 2\n0 1 2\n0 1\n1 0\n1 0\n1 0\n1 0\n",  # wrong coordinate count
        "WFGRID v2 2 2\n0 1\n0 1\n1 0\n1 0\n1 0\n1 0\n",  # wrong version
        "WFGRID v1 2 2\n0 1\n0 1\n1 0\n1 0\n1 0\n1\n",  # missing imaginary part
        "",
    ],
)
def test_wfgrid_rejects_malformed(text):
    with pytest.raises(InvalidParameterError):
        parse_wfgrid(text)
