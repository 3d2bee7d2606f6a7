"""Low-dimensional ground truth: grid semigroups and phase-space transforms.

Conventions.  The operator is the Dirichlet finite-difference Laplacian plus
the diagonal potential on a cell-centered uniform grid, so the matching path
sampler preset is GENERATOR_LAPLACIAN.  A matrix M represents the kernel
K(y, z) times the cell volume, which makes matrix products compose like
operators and the matrix trace equal the operator trace.

The phase-space symbol of a kernel is its Fourier transform along the
antidiagonal.  On the grid, the antidiagonal through a center x_i carries a
step of twice the spacing, so the frequency grid is pi*k/(n*dx).  Entries
falling outside the matrix are zero-padded; a decay check converts that
truncation into a hard error wherever symbol accuracy is claimed.  Full-window
extraction (no check) is used for trace and pairing identities, where the
padding cancels between the two sides exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .brownian import resolve_variance
from .potentials import PotentialSpec

ORACLE_VARIANCE = 2.0  # the grid realizes the full-Laplacian convention


class DecayError(RuntimeError):
    """Kernel mass survives at the truncation edge; the grid is too small."""


class SupportError(RuntimeError):
    """A grid function is not supported well inside the grid."""


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid on [-L, L]^dim."""

    half_width: float
    n_grid: int
    dim: int = 1

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if self.n_grid < 16 or self.n_grid & (self.n_grid - 1):
            raise ValueError("n_grid must be a power of two, at least 16")
        if self.dim not in (1, 2):
            raise ValueError("the oracle is limited to 1 or 2 sites")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.n_grid

    def axis(self) -> np.ndarray:
        return (np.arange(self.n_grid) + 0.5) * self.spacing - self.half_width

    def points(self) -> np.ndarray:
        ax = self.axis()
        if self.dim == 1:
            return ax[:, None]
        mesh = np.meshgrid(ax, ax, indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, 2)

    @property
    def n_points(self) -> int:
        return self.n_grid**self.dim

    def xi_axis(self) -> np.ndarray:
        n = self.n_grid
        return (np.arange(n) - n // 2) * math.pi / (n * self.spacing)


def build_hamiltonian(V: PotentialSpec, grid: Grid) -> np.ndarray:
    """Second-order central-difference Laplacian (Dirichlet) plus diagonal potential."""
    if V.n_sites != grid.dim:
        raise ValueError(
            f"potential has {V.n_sites} sites but the grid dimension is {grid.dim}"
        )
    n = grid.n_grid
    dx2 = grid.spacing**2
    lap = (
        np.diag(np.full(n, 2.0))
        - np.diag(np.ones(n - 1), 1)
        - np.diag(np.ones(n - 1), -1)
    ) / dx2
    values = V.eval(grid.points())
    if np.any(values < -1e-12):
        raise ValueError("potential takes negative values on the grid")
    if grid.dim == 1:
        return lap + np.diag(values)
    eye = np.eye(n)
    H = np.kron(lap, eye)
    H += np.kron(eye, lap)
    H[np.diag_indices_from(H)] += values
    return H


@dataclass(frozen=True)
class GridSemigroup:
    """Matrix exponential exp(-t H) on the grid, with its spectral factors."""

    grid: Grid
    t: float
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def at(self, t: float) -> "GridSemigroup":
        """Re-exponentiate the cached eigenbasis at another time."""
        if not t > 0.0:
            raise ValueError("t must be positive")
        M = (self.eigenvectors * np.exp(-t * self.eigenvalues)) @ self.eigenvectors.T
        return GridSemigroup(self.grid, float(t), 0.5 * (M + M.T),
                             self.eigenvalues, self.eigenvectors)


def semigroup(H: np.ndarray, t: float, grid: Grid) -> GridSemigroup:
    """Spectral decomposition of H and the matrix exp(-t H)."""
    if not t > 0.0:
        raise ValueError("t must be positive")
    H = np.asarray(H, dtype=float)
    scale = np.abs(H).max() or 1.0
    if not np.allclose(H, H.T, rtol=0.0, atol=1e-12 * scale):
        raise ValueError("H is not symmetric")
    w, Q = np.linalg.eigh(H)
    M = (Q * np.exp(-t * w)) @ Q.T
    return GridSemigroup(grid, float(t), 0.5 * (M + M.T), w, Q)


@dataclass(frozen=True)
class PhaseSpaceTable:
    """Values on a (centers x frequencies) product grid, one axis pair per dimension."""

    grid: Grid
    t: Optional[float]
    center_indices: tuple  # per-axis integer indices into the grid
    x_axes: tuple          # per-axis center coordinates
    xi_axes: tuple         # per-axis frequency coordinates
    values: np.ndarray     # shape (*n_centers, *n_frequencies)
    antidiag: Optional[np.ndarray] = None  # 1-d only, for off-grid frequencies
    max_imag: float = 0.0

    @property
    def x(self) -> np.ndarray:
        (ax,) = self.x_axes
        return ax

    @property
    def xi(self) -> np.ndarray:
        (ax,) = self.xi_axes
        return ax

    @property
    def cell_volume(self) -> float:
        return self.grid.spacing**self.grid.dim

    @property
    def xi_cell_volume(self) -> float:
        return (math.pi / (self.grid.n_grid * self.grid.spacing)) ** self.grid.dim

    def value_at(self, x: float, xi):
        """Band-limited value at a stored center and arbitrary frequencies (1-d)."""
        if self.antidiag is None:
            raise ValueError("off-grid evaluation requires a 1-d table")
        (ax,) = self.x_axes
        rows = np.nonzero(np.isclose(ax, x, rtol=0.0, atol=1e-9))[0]
        if rows.size != 1:
            raise ValueError(f"x={x!r} is not one of the stored centers")
        n = self.grid.n_grid
        msigned = np.arange(n) - n // 2
        xi = np.asarray(xi, dtype=float)
        phases = np.exp(-2j * self.grid.spacing * np.multiply.outer(msigned, xi))
        out = 2.0 * np.tensordot(self.antidiag[rows[0]], phases, axes=(0, 0))
        if np.iscomplexobj(self.values):
            return out
        return np.real(out)


def _center_window(grid: Grid, region, margin):
    xs = grid.axis()
    if region == "full":
        mask = np.ones(grid.n_grid, dtype=bool)
    elif region == "auto":
        if margin is None:
            raise ValueError("auto region needs a margin")
        mask = np.abs(xs) <= grid.half_width - margin
    else:
        mask = np.abs(xs) <= float(region)
    centers = np.nonzero(mask)[0]
    if centers.size == 0:
        raise DecayError(
            "no usable centers: the grid is too small for this time horizon"
        )
    return centers


def matrix_weyl_symbol(matrix: np.ndarray, grid: Grid, region="full",
                       decay_tol=1e-12, margin=None, check_decay=None) -> PhaseSpaceTable:
    """Phase-space symbol of a kernel matrix via antidiagonal Fourier transform.

    Returns complex values; take the real part through
    :func:`weyl_symbol_from_kernel` when the matrix is a semigroup.
    """
    if check_decay is None:
        check_decay = region != "full"
    n = grid.n_grid
    if matrix.shape != (grid.n_points, grid.n_points):
        raise ValueError("matrix does not match the grid")
    centers = _center_window(grid, region, margin)
    msigned = np.arange(n) - n // 2
    xi = grid.xi_axis()
    if grid.dim == 1:
        a = centers[:, None] + msigned[None, :]
        b = centers[:, None] - msigned[None, :]
        valid = (a >= 0) & (a < n) & (b >= 0) & (b < n)
        A = np.where(valid, matrix[a.clip(0, n - 1), b.clip(0, n - 1)], 0.0)
        if check_decay:
            _check_antidiagonal_decay(A, centers, grid, np.abs(matrix).max(), decay_tol)
        U = 2.0 * np.fft.fftshift(np.fft.fft(np.fft.ifftshift(A, axes=1), axis=1), axes=1)
        return PhaseSpaceTable(
            grid, None, (centers,), (grid.axis()[centers],), (xi,), U, antidiag=A
        )
    # dim 2: one small transform per center
    max_abs = np.abs(matrix).max()
    nc = centers.size
    values = np.empty((nc, nc, n, n), dtype=complex)
    half = n // 2
    for p, i0 in enumerate(centers):
        a0 = i0 + msigned
        b0 = i0 - msigned
        valid0 = (a0 >= 0) & (a0 < n) & (b0 >= 0) & (b0 < n)
        for q, i1 in enumerate(centers):
            a1 = i1 + msigned
            b1 = i1 - msigned
            valid1 = (a1 >= 0) & (a1 < n) & (b1 >= 0) & (b1 < n)
            rows = a0.clip(0, n - 1)[:, None] * n + a1.clip(0, n - 1)[None, :]
            cols = b0.clip(0, n - 1)[:, None] * n + b1.clip(0, n - 1)[None, :]
            block = np.where(
                valid0[:, None] & valid1[None, :], matrix[rows, cols], 0.0
            )
            if check_decay:
                mm0 = min(i0, n - 1 - i0, half - 1)
                mm1 = min(i1, n - 1 - i1, half - 1)
                edge = max(
                    np.abs(block[half - mm0, :]).max(),
                    np.abs(block[half + mm0, :]).max(),
                    np.abs(block[:, half - mm1]).max(),
                    np.abs(block[:, half + mm1]).max(),
                )
                if edge > decay_tol * max_abs:
                    raise DecayError(
                        f"kernel mass {edge / max_abs:.3e} at the truncation edge of "
                        f"center index ({i0}, {i1}) exceeds {decay_tol:g}"
                    )
            values[p, q] = 4.0 * np.fft.fftshift(
                np.fft.fft2(np.fft.ifftshift(block))
            )
    ax = grid.axis()[centers]
    return PhaseSpaceTable(
        grid, None, (centers, centers), (ax, ax), (xi, xi), values
    )


def _check_antidiagonal_decay(A, centers, grid, max_abs, decay_tol):
    n = grid.n_grid
    half = n // 2
    worst = -1.0
    worst_center = None
    for row, i in enumerate(centers):
        mm = min(i, n - 1 - i, half - 1)
        edge = max(abs(A[row, half - mm]), abs(A[row, half + mm]))
        if edge > worst:
            worst = edge
            worst_center = i
    if max_abs > 0 and worst > decay_tol * max_abs:
        x_bad = grid.axis()[worst_center]
        raise DecayError(
            f"kernel mass {worst / max_abs:.3e} at the truncation edge of center "
            f"x={x_bad:.4g} exceeds {decay_tol:g}; enlarge the grid for this t"
        )


def default_margin(t: float, spacing: float, decay_tol=1e-12) -> float:
    """Boundary distance at which the discrete kernel envelope has dropped
    below the decay tolerance along the antidiagonal.

    The continuum Gaussian scale governs t >> spacing^2; for smaller t the
    matrix exponential decays per cell (hopping rate t/spacing^2) and a short
    Poisson-tail solve gives the required number of cells.  The decay check
    still hard-errors if either estimate proves too thin for a given kernel.
    """
    continuum = 1.1 * math.sqrt(ORACLE_VARIANCE * t * math.log(1.0 / decay_tol))
    rate = ORACLE_VARIANCE * t / spacing**2
    if rate > 4.0:
        return continuum  # Gaussian regime; the Poisson tail bound is looser here
    term, hops = 1.0, 0
    while term > decay_tol and hops < 80:
        hops += 1
        term *= rate / hops
    lattice = (hops / 2.0 + 1.0) * spacing
    return max(continuum, lattice)


def weyl_symbol_from_kernel(S: GridSemigroup, region="auto",
                            decay_tol=1e-12) -> PhaseSpaceTable:
    """Real phase-space symbol of a semigroup, on the decay-checked window.

    The default window keeps centers far enough from the boundary that the
    kernel envelope puts the antidiagonal truncation below the decay
    tolerance; nonnegative potentials only shrink the kernel further.
    """
    margin = (
        default_margin(S.t, S.grid.spacing, decay_tol) if region == "auto" else None
    )
    table = matrix_weyl_symbol(S.matrix, S.grid, region=region,
                               decay_tol=decay_tol, margin=margin)
    max_imag = float(np.abs(table.values.imag).max())
    return PhaseSpaceTable(
        table.grid, S.t, table.center_indices, table.x_axes, table.xi_axes,
        table.values.real.copy(), antidiag=table.antidiag, max_imag=max_imag,
    )


def semigroup_symbol_at(S: GridSemigroup, x: float, xi) -> np.ndarray:
    """Symbol of a 1-d semigroup at one half-grid-aligned center, any frequencies.

    Centers midway between grid points use the odd antidiagonals of the
    kernel, so the usable x set has half the grid spacing and nests across
    grid refinement.
    """
    grid = S.grid
    if grid.dim != 1:
        raise ValueError("pointwise symbol evaluation is 1-d only")
    n = grid.n_grid
    dx = grid.spacing
    j = round((x + grid.half_width) / (dx / 2.0))
    if not 1 <= j <= 2 * n - 1 or abs(-grid.half_width + j * dx / 2.0 - x) > 1e-9:
        raise ValueError(f"x={x!r} is not on the half-grid of centers")
    index_sum = j - 1  # a + b for contributing kernel entries
    parity = index_sum % 2
    d = np.arange(-(n - 1), n)
    d = d[(np.abs(d) % 2) == parity]
    a = (index_sum + d) // 2
    b = (index_sum - d) // 2
    keep = (a >= 0) & (a < n) & (b >= 0) & (b < n)
    a, b, d = a[keep], b[keep], d[keep]
    xi = np.asarray(xi, dtype=float)
    phases = np.exp(-1j * dx * np.multiply.outer(d.astype(float), xi))
    values = 2.0 * np.tensordot(S.matrix[a, b], phases, axes=(0, 0))
    return np.real(values)


def _check_support(values, grid, tol=1e-10):
    flat = np.abs(np.asarray(values).reshape(grid.n_points))
    peak = flat.max()
    if peak == 0.0:
        return
    if grid.dim == 1:
        edge = max(flat[0], flat[-1])
    else:
        square = flat.reshape(grid.n_grid, grid.n_grid)
        edge = max(
            square[0, :].max(), square[-1, :].max(),
            square[:, 0].max(), square[:, -1].max(),
        )
    if edge > tol * peak:
        raise SupportError(
            f"grid function carries {edge / peak:.3e} of its peak at the boundary"
        )


def wigner(f, g, grid: Grid) -> PhaseSpaceTable:
    """Phase-space transform of a pair of grid functions, on the full window."""
    f = np.asarray(f, dtype=complex).reshape(grid.n_points)
    g = np.asarray(g, dtype=complex).reshape(grid.n_points)
    _check_support(f, grid)
    _check_support(g, grid)
    n = grid.n_grid
    msigned = np.arange(n) - n // 2
    centers = np.arange(n)
    xi = grid.xi_axis()
    scale_1d = grid.spacing / math.pi
    if grid.dim == 1:
        f_idx = centers[:, None] - msigned[None, :]
        g_idx = centers[:, None] + msigned[None, :]
        valid = (f_idx >= 0) & (f_idx < n) & (g_idx >= 0) & (g_idx < n)
        arr = np.where(
            valid, f[f_idx.clip(0, n - 1)] * np.conj(g[g_idx.clip(0, n - 1)]), 0.0
        )
        W = scale_1d * n * np.fft.fftshift(
            np.fft.ifft(np.fft.ifftshift(arr, axes=1), axis=1), axes=1
        )
        return PhaseSpaceTable(
            grid, None, (centers,), (grid.axis(),), (xi,), W
        )
    f2 = f.reshape(n, n)
    g2 = g.reshape(n, n)
    values = np.empty((n, n, n, n), dtype=complex)
    for i0 in range(n):
        lo0 = i0 - msigned
        hi0 = i0 + msigned
        valid0 = (lo0 >= 0) & (lo0 < n) & (hi0 >= 0) & (hi0 < n)
        for i1 in range(n):
            lo1 = i1 - msigned
            hi1 = i1 + msigned
            valid1 = (lo1 >= 0) & (lo1 < n) & (hi1 >= 0) & (hi1 < n)
            block = np.where(
                valid0[:, None] & valid1[None, :],
                f2[lo0.clip(0, n - 1)[:, None], lo1.clip(0, n - 1)[None, :]]
                * np.conj(
                    g2[hi0.clip(0, n - 1)[:, None], hi1.clip(0, n - 1)[None, :]]
                ),
                0.0,
            )
            values[i0, i1] = scale_1d**2 * n**2 * np.fft.fftshift(
                np.fft.ifft2(np.fft.ifftshift(block))
            )
    ax = grid.axis()
    return PhaseSpaceTable(grid, None, (centers, centers), (ax, ax), (xi, xi), values)


def pairing_check(S: GridSemigroup, f, g) -> float:
    """Residual of the quadratic-form identity between operator and symbol sides.

    Left side: the grid inner product of exp(-tH) f against g.  Right side:
    the symbol integrated against the phase-space transform of (f, g) on
    matching full-window tables, where zero-padding cancels identically.
    """
    grid = S.grid
    f = np.asarray(f, dtype=complex).reshape(grid.n_points)
    g = np.asarray(g, dtype=complex).reshape(grid.n_points)
    lhs = grid.spacing**grid.dim * np.vdot(g, S.matrix @ f)  # vdot conjugates g
    U = matrix_weyl_symbol(S.matrix, grid, region="full")
    W = wigner(f, g, grid)
    rhs = (U.values * W.values).sum() * U.cell_volume * U.xi_cell_volume
    return float(abs(lhs - rhs))


def free_symbol(xi, t, variance_scale=ORACLE_VARIANCE) -> float:
    """Exact symbol with no potential: the characteristic function of the endpoint."""
    if not t > 0.0:
        raise ValueError("t must be positive")
    sigma2, _ = resolve_variance(variance_scale)
    xi = np.asarray(xi, dtype=float)
    return float(np.exp(-0.5 * sigma2 * t * np.sum(np.square(xi))))


class GridOracle:
    """Hamiltonian, cached spectral factors, and symbol tables for one potential."""

    def __init__(self, V: PotentialSpec, grid: Grid):
        self.grid = grid
        self.potential = V
        self.hamiltonian = build_hamiltonian(V, grid)
        self._eigenvalues, self._eigenvectors = np.linalg.eigh(self.hamiltonian)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eigenvalues

    def semigroup(self, t: float) -> GridSemigroup:
        if not t > 0.0:
            raise ValueError("t must be positive")
        M = (self._eigenvectors * np.exp(-t * self._eigenvalues)) @ self._eigenvectors.T
        return GridSemigroup(self.grid, float(t), 0.5 * (M + M.T),
                             self._eigenvalues, self._eigenvectors)

    def symbol(self, t: float, region="auto", decay_tol=1e-12) -> PhaseSpaceTable:
        return weyl_symbol_from_kernel(self.semigroup(t), region=region,
                                       decay_tol=decay_tol)
