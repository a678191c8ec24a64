"""Twisted convolution, Weyl-type products, symbol/kernel maps and kernel algebra.

Every product here is computable along two independent routes:

* phase-space route: twisted convolution (direct double-sum oracle or the
  FFT-factorized fast path) feeding the product formula;
* operator route: symbols mapped to operator matrices on the companion base
  grid, composed as matrices, mapped back.

The phase-space identities are exact on the symplectically self-dual grid;
the operator route crosses the sampling of the half-sum coordinate and is
therefore only expected to agree to truncation accuracy on decaying symbols.

Kernels are carried in sheared coordinates ``(u, t) = (x - A(x-y), x - y)``,
where the partial Fourier transform linking symbols and kernels is an exact
unitary bijection; materializing the ``(x, y)`` matrix is a sampling step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grids import (
    Grid,
    GridError,
    GridFunction,
    PhaseGrid,
    centered_character_sum,
    require_same_grid,
    symplectic_fourier,
)


def quantization_matrix(A, d: int) -> np.ndarray:
    """Canonical d x d matrix from a scalar or array quantization parameter."""
    if np.isscalar(A):
        return float(A) * np.eye(d)
    A = np.asarray(A, dtype=float)
    if A.shape != (d, d):
        raise GridError(f"quantization matrix must be {d}x{d}, got {A.shape}")
    return A


def _require_half_integer(A: np.ndarray, what: str):
    if not np.allclose(2 * A, np.round(2 * A), atol=1e-12):
        raise GridError(f"{what} needs half-integer matrix entries to stay grid-aligned")


def _phase_of(a: GridFunction) -> PhaseGrid:
    g = a.grid
    if not g.is_symplectic:
        raise GridError("symbol must live on a phase grid")
    return PhaseGrid(g.dim // 2, g.count)


def point_reflection(a: GridFunction) -> GridFunction:
    """``a(X) -> a(-X)`` on the centered periodic grid."""
    idx = (2 * (a.grid.count // 2) - np.arange(a.grid.count)) % a.grid.count
    vals = a.values
    for ax in range(a.grid.dim):
        vals = np.take(vals, idx, axis=ax)
    return GridFunction(a.grid, vals)


def involution(a: GridFunction) -> GridFunction:
    """``a(X) -> conj(a(-X))``, the twisted-convolution adjoint."""
    return GridFunction(a.grid, np.conj(point_reflection(a).values))


# -- twisted convolution ------------------------------------------------------

def _phase_table(n: int, sign: int) -> np.ndarray:
    c = n // 2
    k = np.arange(n) - c
    return np.exp(sign * 2j * np.pi * np.outer(k, k) / n)


def twisted_convolution(a: GridFunction, b: GridFunction, method: str = "fast") -> GridFunction:
    """Twisted convolution ``(2/pi)^{d/2} h^{2d} sum_Y a(X-Y) b(Y) e^{2i sigma(X,Y)}``.

    ``method="direct"`` is the quadratic-cost double-sum oracle kept as the
    permanent reference; ``method="fast"`` factors the symplectic phase into
    per-axis transforms (FFT convolutions), identical output to roundoff.
    The fast factorization is implemented for d = 1; higher dimensions fall
    back to the direct path.
    """
    require_same_grid(a, b)
    phase = _phase_of(a)
    if method == "direct" or phase.d != 1:
        return _twisted_direct(a, b, phase)
    if method != "fast":
        raise GridError(f"unknown twisted convolution method {method!r}")
    return _twisted_fast(a, b, phase)


def _twisted_coeff(phase: PhaseGrid) -> float:
    return (2 / math.pi) ** (phase.d / 2) * phase.symbol_grid.quadrature_weight


def _twisted_direct(a: GridFunction, b: GridFunction, phase: PhaseGrid) -> GridFunction:
    """Direct double sum, chunked over output rows to bound memory."""
    g = a.grid
    n, d = g.count, phase.d
    c = n // 2
    idx = np.arange(n)
    coeff = _twisted_coeff(phase)
    if d == 1:
        P = _phase_table(n, +1)  # P[p, q] = e^{2pi i (p-c)(q-c)/n}
        out = np.empty((n, n), dtype=complex)
        bv = b.values
        for i1 in range(n):
            # ag[k1, i2, k2] = a[(i1-k1) index, (i2-k2) index]
            ag = a.values[
                (i1 - idx[:, None, None] + c) % n,
                (idx[None, :, None] - idx[None, None, :] + c) % n,
            ]
            # e^{2i sigma(X, Y)} = e^{2i(x2 y1 - x1 y2)} = P[i2, k1] * conj(P)[i1, k2]
            term = np.einsum("kml,kl,mk,l->m", ag, bv, P, np.conj(P[i1]), optimize=True)
            out[i1] = coeff * term
        return GridFunction(g, out)
    # generic dimension: flat gathered matrix in blocks
    shape = g.shape
    size = int(np.prod(shape))
    coords = [ix.ravel() for ix in np.meshgrid(*[idx] * g.dim, indexing="ij")]
    coords = np.stack(coords, axis=1)  # (size, 2d) integer indices
    centered = coords - c
    out = np.empty(size, dtype=complex)
    bflat = b.values.ravel()
    for start in range(0, size, 512):
        stop = min(start + 512, size)
        X = centered[start:stop]  # (chunk, 2d)
        diff = (X[:, None, :] - centered[None, :, :] + c) % n
        gather = a.values[tuple(diff[..., k] for k in range(g.dim))]
        # 2*sigma(X, Y) with h^2 = pi/n: (2pi/n) * sum_i (y_i * xi_i - x_i * eta_i)
        cross = X[:, None, d:] * centered[None, :, :d] - X[:, None, :d] * centered[None, :, d:]
        phase_arr = np.exp(2j * np.pi * np.sum(cross, axis=2) / n)
        out[start:stop] = coeff * np.sum(gather * phase_arr * bflat[None, :], axis=1)
    return GridFunction(g, out.reshape(shape))


def _twisted_fast(a: GridFunction, b: GridFunction, phase: PhaseGrid) -> GridFunction:
    """Per-axis factorization: FFT convolution in the second axis, explicit
    character sum in the first (d = 1)."""
    g = a.grid
    n = g.count
    c = n // 2
    coeff = _twisted_coeff(phase)
    Pm = _phase_table(n, -1)  # e^{-2pi i (p-c)(q-c)/n}
    Pp = np.conj(Pm)
    # a re-indexed by physical offsets: a_off[m1, m2] = a[(m1 + c) % n, (m2 + c) % n]
    roll_idx = (np.arange(n) + c) % n
    a_off = a.values[roll_idx][:, roll_idx]
    fa = np.fft.fft(a_off, axis=1)  # row-wise spectra over the second offset
    out = np.empty((n, n), dtype=complex)
    for i1 in range(n):
        bmod = b.values * Pm[i1][None, :]  # b[k1, k2] e^{-2i x1 y2}
        fb = np.fft.fft(bmod, axis=1)
        rows = (i1 - np.arange(n)) % n  # offset index of x1 - y1 per k1
        # circular convolution over k2: sum_k2 bmod[k1, k2] a_off[i1-k1, i2-k2]
        conv = np.fft.ifft(fb * fa[rows], axis=1)
        # sum over k1 with the remaining phase e^{+2i x2 y1} = Pp[i2, k1]
        out[i1] = coeff * np.einsum("km,mk->m", conv, Pp)
    return GridFunction(g, out)


def weyl_product(a: GridFunction, b: GridFunction, method: str = "fast") -> GridFunction:
    """Symbol product of operator composition in the symmetric quantization.

    Computed as ``(2*pi)^{-d/2} * (a twisted-conv symplectic_fourier(b))``;
    the constant symbol 1 is the unit.
    """
    phase = _phase_of(a)
    scaled = twisted_convolution(a, symplectic_fourier(b), method)
    return GridFunction(a.grid, (2 * math.pi) ** (-phase.d / 2) * scaled.values)


# -- symbol/kernel maps -------------------------------------------------------

@dataclass(frozen=True)
class KernelFunction:
    """Operator kernel in sheared coordinates ``(u, t) = (x - A(x-y), x - y)``.

    ``spectrum[u_index, t_index]`` holds ``K(x, y)`` directly; the ``u`` axes
    are the phase grid's position axes (n points, spacing h, periodic with
    extent L) and the ``t`` axes carry n points of spacing 2h (extent 2L).
    """

    phase: PhaseGrid
    A: np.ndarray
    spectrum: np.ndarray

    def __post_init__(self):
        expected = (self.phase.n,) * (2 * self.phase.d)
        if self.spectrum.shape != expected:
            raise GridError(f"kernel spectrum shape {self.spectrum.shape} != {expected}")


def symbol_to_kernel(a: GridFunction, A) -> KernelFunction:
    """Exact partial-transform route from a symbol to its operator kernel."""
    phase = _phase_of(a)
    d = phase.d
    A = quantization_matrix(A, d)
    _require_half_integer(A, "kernel map")
    g = a.grid
    # (2 pi)^{-d/2} * [(2 pi)^{-d/2} h^d sum_xi a(u, xi) e^{+i t xi}]
    coeff = (2 * math.pi) ** (-d) * g.quadrature_weight ** 0.5
    spec = coeff * centered_character_sum(a.values, range(d, 2 * d), +1)
    return KernelFunction(phase, A, spec)


def kernel_to_symbol(K: KernelFunction) -> GridFunction:
    """Inverse of :func:`symbol_to_kernel`; exact round trip."""
    phase = K.phase
    d = phase.d
    g = phase.symbol_grid
    t_spacing = 2 * phase.h
    coeff = (2 * math.pi) ** (d / 2) * (2 * math.pi) ** (-d / 2) * t_spacing**d
    vals = coeff * centered_character_sum(K.spectrum, range(d, 2 * d), -1)
    return GridFunction(g, vals)


def kernel_symbol_map(obj, A, direction: str):
    """Spec-facing dispatcher between the two kernel-map directions."""
    if direction == "symbol->kernel":
        return symbol_to_kernel(obj, A)
    if direction == "kernel->symbol":
        return kernel_to_symbol(obj)
    raise GridError(f"unknown direction {direction!r}")


def _kernel_sample_indices(phase: PhaseGrid, A: np.ndarray, offset: int = 0):
    """Index arrays mapping base-lattice pairs ``(x, y)`` into the (u, t) axes.

    ``offset = 0`` is the base grid itself, ``offset = 1`` the half-spacing
    staggered lattice.  Pairs from one lattice populate one parity class of
    the ``(u, t)`` checkerboard; both lattices together cover the full
    diamond of reachable cells.
    """
    base = phase.base_grid
    m, n = base.count, phase.n
    d = phase.d
    cm, cn = m // 2, n // 2
    twoA = np.round(2 * A).astype(int)
    i = np.arange(m) - cm
    # per-axis integer coordinates of x and y in units of the base spacing 2h
    grids = np.meshgrid(*([i] * (2 * d)), indexing="ij")  # x axes then y axes
    x = np.stack(grids[:d], axis=0)
    y = np.stack(grids[d:], axis=0)
    diff = x - y
    u_idx = []
    t_idx = []
    for axis in range(d):
        shear = sum(twoA[axis, l] * diff[l] for l in range(d))
        u = 2 * x[axis] + offset - shear  # in units of h
        u_idx.append((u + cn) % n)
        t_idx.append(diff[axis] + cn)  # in units of 2h, no wrap needed
    return tuple(u_idx) + tuple(t_idx)


@dataclass(frozen=True)
class OperatorMatrix:
    """Quadrature-scaled matrix of an operator on the companion base grid.

    ``matrix`` has shape ``(m^d, m^d)`` and already carries the ``(2h)^d``
    quadrature factor, so application and composition are plain matrix
    products (hence composition is exactly associative).
    """

    base: Grid
    matrix: np.ndarray

    def apply(self, f: GridFunction) -> GridFunction:
        if f.grid != self.base:
            raise GridError("operator/argument grid mismatch")
        out = self.matrix @ f.values.ravel()
        return GridFunction(self.base, out.reshape(self.base.shape))

    def compose(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if other.base != self.base:
            raise GridError("operator grid mismatch")
        return OperatorMatrix(self.base, self.matrix @ other.matrix)

    def kernel_values(self) -> np.ndarray:
        """Unscaled kernel samples ``K(x_i, y_j)``."""
        return self.matrix / self.base.quadrature_weight

    def hs_norm(self) -> float:
        """Quadrature Hilbert-Schmidt norm of the kernel."""
        w = self.base.quadrature_weight
        return float(np.sqrt(w**2 * np.sum(np.abs(self.kernel_values()) ** 2)))


def materialize_matrix(K: KernelFunction, offset: int = 0) -> OperatorMatrix:
    base = K.phase.base_grid
    m, d = base.count, K.phase.d
    samples = K.spectrum[_kernel_sample_indices(K.phase, K.A, offset)]
    mat = base.quadrature_weight * samples.reshape(m**d, m**d)
    return OperatorMatrix(base, mat)


def matrix_to_kernel(M: OperatorMatrix, phase: PhaseGrid, A, offset: int = 0,
                     into: KernelFunction | None = None) -> KernelFunction:
    """Scatter matrix samples back into the sheared-coordinate representation.

    One lattice offset fills one parity class of the spectrum; pass the
    result of the other offset via ``into`` to fill both.  Cells outside the
    reachable diamond stay zero, a truncation-level approximation for
    decaying kernels (and the reason the operator route carries a looser
    tolerance than the phase-space route).
    """
    d = phase.d
    A = quantization_matrix(A, d)
    _require_half_integer(A, "kernel map")
    kvals = M.kernel_values().reshape((phase.base_grid.count,) * (2 * d))
    spec = np.zeros((phase.n,) * (2 * d), dtype=complex) if into is None else into.spectrum.copy()
    spec[_kernel_sample_indices(phase, A, offset)] = kvals
    return KernelFunction(phase, A, spec)


def operator_matrix(a: GridFunction, A, offset: int = 0) -> OperatorMatrix:
    """Quadrature matrix of the quantized operator of a symbol."""
    return materialize_matrix(symbol_to_kernel(a, A), offset)


def symbol_of_matrix(M: OperatorMatrix, phase: PhaseGrid, A) -> GridFunction:
    return kernel_to_symbol(matrix_to_kernel(M, phase, A))


def compose_via_matrices(a: GridFunction, b: GridFunction, A) -> GridFunction:
    """Oracle route: compose quantized matrices on both lattice offsets and
    reassemble the product symbol from the two checkerboard classes."""
    phase = _phase_of(a)
    Ka, Kb = symbol_to_kernel(a, A), symbol_to_kernel(b, A)
    K = None
    for offset in (0, 1):
        Mc = materialize_matrix(Ka, offset).compose(materialize_matrix(Kb, offset))
        K = matrix_to_kernel(Mc, phase, A, offset, into=K)
    return kernel_to_symbol(K)


def weyl_product_via_operators(a: GridFunction, b: GridFunction) -> GridFunction:
    """Oracle route for the symmetric quantization."""
    return compose_via_matrices(a, b, 0.5)


def operator_matrix_to_json(M: OperatorMatrix) -> str:
    """One JSON document: base-grid header plus interleaved re/im entries,
    row-major (same layout contract as the grid-function serializers)."""
    import json

    flat = np.ascontiguousarray(M.matrix).ravel()
    data = np.empty(2 * flat.size)
    data[0::2] = flat.real
    data[1::2] = flat.imag
    return json.dumps({"d": M.base.dim, "n": M.base.count, "h": M.base.spacing,
                       "data": data.tolist()})


def operator_matrix_from_json(text: str) -> OperatorMatrix:
    import json

    doc = json.loads(text)
    base = Grid(int(doc["d"]), int(doc["n"]), float(doc["h"]))
    data = np.asarray(doc["data"], dtype=float)
    size = base.count**base.dim
    mat = (data[0::2] + 1j * data[1::2]).reshape(size, size)
    return OperatorMatrix(base, mat)


# -- calculi transform and general quantizations ------------------------------

def calculi_transform(a: GridFunction, A1, A2) -> GridFunction:
    """Transform a symbol between quantizations ``A1 -> A2``.

    Fourier-side multiplier ``exp(i <(A1-A2) w_xi, w_x>)``; with half-integer
    ``A1 - A2`` the multiplier is an exact grid character, the map is unitary
    and the transforms compose as a group.
    """
    phase = _phase_of(a)
    d = phase.d
    dA = quantization_matrix(A1, d) - quantization_matrix(A2, d)
    _require_half_integer(dA, "calculi transform")
    if not np.any(dA):
        return a
    g = a.grid
    n, c = g.count, g.count // 2
    ahat = centered_character_sum(a.values, range(2 * d), -1)
    k = np.arange(n) - c
    exponent = np.zeros(g.shape)
    for i in range(d):
        for l in range(d):
            if dA[i, l]:
                wx = k.reshape([-1 if ax == i else 1 for ax in range(2 * d)])
                wxi = k.reshape([-1 if ax == d + l else 1 for ax in range(2 * d)])
                exponent = exponent + dA[i, l] * (4 * math.pi / n) * wx * wxi
    ahat = ahat * np.exp(1j * exponent)
    vals = centered_character_sum(ahat, range(2 * d), +1) / float(n ** (2 * d))
    return GridFunction(g, vals)


def pseudo_product(a: GridFunction, b: GridFunction, A, method: str = "fast") -> GridFunction:
    """Symbol product for the ``A``-quantization, by conjugation with the
    calculi transform around the symmetric product."""
    phase = _phase_of(a)
    d = phase.d
    A = quantization_matrix(A, d)
    half = 0.5 * np.eye(d)
    if np.allclose(A, half, atol=0):
        return weyl_product(a, b, method)
    ta = calculi_transform(a, A, half)
    tb = calculi_transform(b, A, half)
    return calculi_transform(weyl_product(ta, tb, method), half, A)


# -- kernel composition -------------------------------------------------------

def compose_kernels(kernels: Sequence[np.ndarray], base: Grid):
    """Compose operator kernels; returns the matrix-route result and the
    enclosure-factorization residual.

    ``kernels`` are unscaled kernel sample arrays over ``base x base``.  The
    matrix route folds quadrature-scaled matrix products; for odd ``N >= 3``
    the result is recomputed through the two-sided enclosure factorization
    (outer factors paired with the interleaved inner pairing) and the max
    relative deviation between the routes is reported.
    """
    if len(kernels) < 1:
        raise GridError("need at least one kernel")
    m = base.count**base.dim
    mats = []
    for K in kernels:
        K = np.asarray(K, dtype=complex)
        if K.shape != (m, m):
            raise GridError(f"kernel shape {K.shape} != {(m, m)}")
        mats.append(K)
    w = base.quadrature_weight
    composed = mats[0]
    for K in mats[1:]:
        composed = composed @ (w * K)
    n_factors = len(mats)
    residual = None
    if n_factors >= 3 and n_factors % 2 == 1:
        factored = _enclosure_factorization(mats, w)
        scale = np.max(np.abs(composed))
        residual = float(np.max(np.abs(factored - composed)) / scale) if scale else 0.0
    return composed, residual


def _enclosure_factorization(mats: Sequence[np.ndarray], w: float) -> np.ndarray:
    """Outer-tensor / inner-pairing route for odd-length kernel composition.

    The two end kernels form the outer tensor ``G``; the interior splits by
    parity into ``H1`` (even slots, conjugated) and ``H2`` (odd slots), paired
    over the shared interior variables.
    """
    n_factors = len(mats)
    # twisted[j-1] = K_j for odd j, conj(K_j) for even j
    twisted = [mats[j - 1] if j % 2 == 1 else np.conj(mats[j - 1]) for j in range(1, n_factors + 1)]
    inner_even = [twisted[j - 1] for j in range(2, n_factors, 2)]
    inner_odd = [twisted[j - 1] for j in range(3, n_factors - 1, 2)]
    if n_factors == 3:
        # empty interior pairing: H(x1, x2) = conj(H1) = conj(K~_2)
        H = np.conj(inner_even[0])
    else:
        # H1(x1, ..., x_{N-1}) = prod_j K~_{2j}(x_{2j-1}, x_{2j}); consecutive
        # index pairs, so plain outer products keep the axes in order
        h1 = inner_even[0]
        for M in inner_even[1:]:
            h1 = np.tensordot(h1, M, axes=0)
        # H2(x2, ..., x_{N-2}) = prod_j K~_{2j+1}(x_{2j}, x_{2j+1})
        h2 = inner_odd[0]
        for M in inner_odd[1:]:
            h2 = np.tensordot(h2, M, axes=0)
        y_axes = n_factors - 3  # interior variables x_2 .. x_{N-2}
        # H(x1, x_{N-1}) = w^{y} sum_y H2(y) conj(H1)(x1, y, x_{N-1})
        H = np.tensordot(h2, np.conj(h1), axes=(tuple(range(y_axes)), tuple(range(1, 1 + y_axes))))
        H = (w**y_axes) * H
    G_left = twisted[0]  # K~_1 = K_1
    G_right = twisted[-1]  # K~_N = K_N (N odd)
    # result(x0, xN) = w^2 sum_{x1, x_{N-1}} K_1(x0,x1) K_N(x_{N-1},xN) H(x1, x_{N-1})
    return (w**2) * np.einsum("ab,cd,bc->ad", G_left, G_right, H, optimize=True)
