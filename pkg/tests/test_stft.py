"""Short-time Fourier transforms: oracles, energy identities, cross-relations."""

import math

import numpy as np
import pytest

from phaselab.grids import (
    GaussianAtomSpec,
    GridError,
    GridFunction,
    base_gaussian,
    fourier,
    gaussian_atom,
    make_base_grid,
    make_grid,
    symplectic_fourier,
)
from phaselab.stft import iter_stft_slices, stft, symplectic_stft

RNG = np.random.default_rng(1)


@pytest.fixture
def base_setup():
    g = make_base_grid(1, 32)
    phi = base_gaussian(g, width=0.8)
    f = base_gaussian(g, center=0.7, width=1.1, frequency=1.3)
    return g, f, phi


@pytest.fixture
def phase_setup():
    pg = make_grid(1, 16)
    a = gaussian_atom(pg, GaussianAtomSpec((0.5, -0.3), (2 * pg.h, pg.h), 0.45))
    Phi = gaussian_atom(pg, GaussianAtomSpec((0, 0), (0, 0), 0.45))
    return pg, a, Phi


def test_stft_matches_direct_sum_oracle(base_setup):
    g, f, phi = base_setup
    V = stft(f, phi)
    n, s, ax = g.count, g.spacing, g.axis
    for ix, ik in [(16, 16), (3, 25), (20, 9)]:
        shifted = np.roll(phi.values, ix - n // 2)
        want = (2 * math.pi) ** -0.5 * s * np.sum(
            f.values * np.conj(shifted) * np.exp(-1j * ax * ax[ik]))
        assert abs(V.values[ix, ik] - want) < 1e-12


def test_stft_center_value(base_setup):
    g, f, phi = base_setup
    V = stft(phi, phi)
    c = g.count // 2
    assert V.values[c, c] == pytest.approx((2 * math.pi) ** -0.5 * phi.norm2() ** 2, abs=1e-12)


def test_stft_zero_cases(base_setup):
    g, f, phi = base_setup
    zero = GridFunction(g, np.zeros(g.shape))
    assert np.all(stft(zero, phi).values == 0)
    with pytest.raises(GridError):
        stft(f, zero)


def test_stft_linearity(base_setup):
    g, f, phi = base_setup
    f2 = GridFunction(g, RNG.standard_normal(g.shape) + 1j * RNG.standard_normal(g.shape))
    lhs = stft(GridFunction(g, 2 * f.values + 1j * f2.values), phi).values
    rhs = 2 * stft(f, phi).values + 1j * stft(f2, phi).values
    assert np.max(np.abs(lhs - rhs)) < 1e-12
    # conjugate-linearity in the window
    lhs = stft(f, GridFunction(g, 1j * phi.values)).values
    assert np.max(np.abs(lhs + 1j * stft(f, phi).values)) < 1e-12


def test_moyal_energy_identity_ordinary():
    # direct-sum oracle at n = 16: quadrature norm of V equals ||f|| ||phi||
    g = make_base_grid(1, 16)
    f = GridFunction(g, RNG.standard_normal(g.shape) + 1j * RNG.standard_normal(g.shape))
    phi = base_gaussian(g, width=0.7)
    V = stft(f, phi)
    qnorm = math.sqrt(g.quadrature_weight**2 * np.sum(np.abs(V.values) ** 2))
    assert qnorm == pytest.approx(f.norm2() * phi.norm2(), rel=1e-10)


def test_moyal_energy_identity_symplectic(phase_setup):
    pg, a, Phi = phase_setup
    W = symplectic_stft(a, Phi)
    h = pg.symbol_grid.spacing
    qnorm = math.sqrt(h**4 * np.sum(np.abs(W.values) ** 2))
    assert qnorm == pytest.approx(a.norm2() * Phi.norm2(), rel=1e-10)


def test_fourier_covariance_of_stft(base_setup):
    # V_{F phi}(F f)(xi, -x) = e^{i<x, xi>} V_phi f(x, xi)
    g, f, phi = base_setup
    n, c, ax = g.count, g.count // 2, g.axis
    V = stft(f, phi)
    Vh = stft(fourier(f), fourier(phi))
    X, XI = np.meshgrid(ax, ax, indexing="ij")
    lhs = np.empty_like(V.values)
    for ix in range(n):
        for ik in range(n):
            lhs[ix, ik] = Vh.values[ik, (2 * c - ix) % n]
    rhs = np.exp(1j * X * XI) * V.values
    assert np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)) < 1e-10


def test_symplectic_stft_direct_sum_oracle(phase_setup):
    pg, a, Phi = phase_setup
    g = pg.symbol_grid
    W = symplectic_stft(a, Phi)
    h, ax, cn = g.spacing, g.axis, g.count // 2
    Z1, Z2 = np.meshgrid(ax, ax, indexing="ij")
    for idx in [(3, 12, 7, 9), (0, 5, 11, 2), (8, 8, 8, 8)]:
        ix1, ix2, iy1, iy2 = idx
        shifted = np.roll(Phi.values, (ix1 - cn, ix2 - cn), axis=(0, 1))
        want = (h * h / math.pi) * np.sum(
            a.values * np.conj(shifted) * np.exp(2j * (Z1 * ax[iy2] - ax[iy1] * Z2)))
        assert abs(W.values[idx] - want) < 1e-12


def test_symplectic_stft_zero_frequency_slice(phase_setup):
    pg, a, Phi = phase_setup
    g = pg.symbol_grid
    W = symplectic_stft(a, Phi)
    h, cn = g.spacing, g.count // 2
    for idx in [(8, 8), (3, 12)]:
        shifted = np.roll(Phi.values, (idx[0] - cn, idx[1] - cn), axis=(0, 1))
        want = (1 / math.pi) * h * h * np.sum(a.values * np.conj(shifted))
        assert abs(W.values[idx[0], idx[1], cn, cn] - want) < 1e-12


def test_stft_comparison_relation(phase_setup):
    # symplectic STFT(X, Y) = 2^d * ordinary STFT at (x, xi, -2 eta, 2 y)
    pg, a, Phi = phase_setup
    g = pg.symbol_grid
    n, cn = g.count, g.count // 2
    W = symplectic_stft(a, Phi)
    V = stft(a, Phi)  # frequency block on the dual (2h) grid
    rhs = np.empty_like(W.values)
    for ky in range(n):
        for ke in range(n):
            rhs[:, :, ky, ke] = 2 * V.values[:, :, (2 * cn - ke) % n, ky]
    assert np.max(np.abs(W.values - rhs)) / np.max(np.abs(W.values)) < 1e-10


def test_symplectic_fourier_covariance(phase_setup):
    pg, a, Phi = phase_setup
    g = pg.symbol_grid
    W = symplectic_stft(a, Phi)
    Wf = symplectic_stft(symplectic_fourier(a), symplectic_fourier(Phi))
    ax = g.axis
    X1, XI, Y1, ETA = np.meshgrid(ax, ax, ax, ax, indexing="ij")
    rhs = np.exp(2j * (X1 * ETA - Y1 * XI)) * np.transpose(W.values, (2, 3, 0, 1))
    assert np.max(np.abs(Wf.values - rhs)) / np.max(np.abs(W.values)) < 1e-10


def test_streaming_slices_match_materialized(phase_setup):
    pg, a, Phi = phase_setup
    for symplectic in (False, True):
        T = symplectic_stft(a, Phi) if symplectic else stft(a, Phi)
        for index, sl in iter_stft_slices(a, Phi, symplectic):
            assert np.allclose(sl, T.values[index], atol=1e-13)


def test_materialization_guard():
    pg = make_grid(1, 64)
    a = gaussian_atom(pg, GaussianAtomSpec((0, 0), (0, 0), 1.0))
    with pytest.raises(GridError):
        symplectic_stft(a, a)
