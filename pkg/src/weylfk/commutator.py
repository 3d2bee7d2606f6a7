"""Trace of observable commutators against quantized phase-space states.

The experiment quantizes a nonnegative, trace-one phase-space Gaussian,
commutes the semigroup with a polynomial multiplication operator, and takes
the trace two independent ways: as a matrix trace, and as the phase-space
integral of the commutator's symbol against the state.  A commutator of
self-adjoint factors is anti-self-adjoint, so the trace lies on the imaginary
axis; the scalar reported is its imaginary part, and the residual off the
axis is tracked as a consistency check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .oracle import (
    Grid,
    GridOracle,
    SupportError,
    default_margin,
    matrix_weyl_symbol,
)
from .potentials import PotentialSpec


class AliasingError(RuntimeError):
    """The state's symbol does not decay within the frequency grid."""


@dataclass(frozen=True)
class GaussianAxisFactor:
    center_x: float
    center_xi: float
    width_x: float
    width_xi: float

    def x_profile(self, x):
        return np.exp(-0.5 * ((np.asarray(x) - self.center_x) / self.width_x) ** 2)

    def xi_profile(self, xi):
        return np.exp(-0.5 * ((np.asarray(xi) - self.center_xi) / self.width_xi) ** 2)


@dataclass(frozen=True)
class WeylObservable:
    """Separable Gaussian symbol p >= 0 on the oracle grid, normalized to trace one."""

    grid: Grid
    axes: tuple  # one GaussianAxisFactor per dimension
    norm_const: float

    @cached_property
    def table(self) -> np.ndarray:
        """p sampled on the (centers x frequencies) grid, matching symbol tables."""
        ax = self.grid.axis()
        xi = self.grid.xi_axis()
        profiles = [(f.x_profile(ax), f.xi_profile(xi)) for f in self.axes]
        if self.grid.dim == 1:
            (px, pxi), = profiles
            return self.norm_const * np.outer(px, pxi)
        (px0, pxi0), (px1, pxi1) = profiles
        return self.norm_const * np.einsum("a,b,c,d->abcd", px0, px1, pxi0, pxi1)

    def value(self, x, xi):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        out = self.norm_const
        for d, factor in enumerate(self.axes):
            out = out * factor.x_profile(x[..., d]) * factor.xi_profile(xi[..., d])
        return out

    def trace_quadrature(self) -> float:
        table = self.table
        dxi = math.pi / (self.grid.n_grid * self.grid.spacing)
        return float(
            table.sum()
            * (self.grid.spacing * dxi / (2.0 * math.pi)) ** self.grid.dim
        )


def gaussian_state_symbol(grid: Grid, center_x, center_xi, width_x, width_xi,
                          support_tol=1e-10) -> WeylObservable:
    """Gaussian phase-space state, normalized to trace one by grid quadrature."""
    center_x = np.atleast_1d(np.asarray(center_x, dtype=float))
    center_xi = np.atleast_1d(np.asarray(center_xi, dtype=float))
    width_x = np.broadcast_to(np.asarray(width_x, dtype=float), center_x.shape)
    width_xi = np.broadcast_to(np.asarray(width_xi, dtype=float), center_xi.shape)
    if center_x.shape != (grid.dim,) or center_xi.shape != (grid.dim,):
        raise ValueError(f"centers must have {grid.dim} coordinates")
    if np.any(width_x <= 0) or np.any(width_xi <= 0):
        raise ValueError("widths must be positive")
    axes = tuple(
        GaussianAxisFactor(float(cx), float(ck), float(wx), float(wk))
        for cx, ck, wx, wk in zip(center_x, center_xi, width_x, width_xi)
    )
    ax = grid.axis()
    xi = grid.xi_axis()
    raw_integral = 1.0
    dxi = math.pi / (grid.n_grid * grid.spacing)
    for factor in axes:
        px = factor.x_profile(ax)
        pxi = factor.xi_profile(xi)
        if max(px[0], px[-1]) > support_tol * px.max():
            raise SupportError("state leaks outside the position grid")
        if max(pxi[0], pxi[-1]) > support_tol * pxi.max():
            raise SupportError("state leaks outside the frequency grid")
        raw_integral *= px.sum() * grid.spacing * pxi.sum() * dxi / (2.0 * math.pi)
    return WeylObservable(grid, axes, 1.0 / raw_integral)


def op_weyl_matrix(p: WeylObservable, grid: Grid = None,
                   aliasing_tol=1e-10) -> np.ndarray:
    """Quantize the symbol into a Hermitian kernel matrix by discrete Fourier transform.

    The frequency quadrature spans the full band conjugate to the grid
    spacing (twice the symbol table's band), so a symbol flat in frequency
    quantizes to a multiple of the identity.  The aliasing check requires the
    symbol to decay within the table band; for admissible symbols the matrix
    trace then equals the quadrature of p, which is one by construction.
    """
    grid = grid or p.grid
    if grid != p.grid:
        raise ValueError("observable was built on a different grid")
    n = grid.n_grid
    dx = grid.spacing
    dxi = math.pi / (n * dx)
    xi_table = grid.xi_axis()
    xi_band = (np.arange(2 * n) - n) * dxi  # covers +-pi/spacing
    blocks = []
    for factor in p.axes:
        pxi_table = factor.xi_profile(xi_table)
        if max(pxi_table[0], pxi_table[-1]) > aliasing_tol * pxi_table.max():
            raise AliasingError(
                "insufficient frequency decay for quantization on this grid"
            )
        pxi = factor.xi_profile(xi_band)
        half_centers = (np.arange(2 * n - 1) + 1.0) * dx / 2.0 - grid.half_width
        px = factor.x_profile(half_centers)  # (2n-1,)
        diffs = np.arange(-(n - 1), n) * dx  # (2n-1,)
        phases = np.exp(1j * np.outer(xi_band, diffs)) * dxi / (2.0 * math.pi)
        M = (px[:, None] * pxi[None, :]) @ phases  # (2n-1, 2n-1) over (sum, diff)
        a = np.arange(n)
        block = dx * M[a[:, None] + a[None, :], a[:, None] - a[None, :] + (n - 1)]
        blocks.append(block)
    out = blocks[0]
    for block in blocks[1:]:
        out = np.kron(out, block)
    return p.norm_const * out


@dataclass(frozen=True)
class CommutatorTraceResult:
    """Both trace routes for one time, plus consistency diagnostics."""

    t: float
    trace_matrix: float        # imaginary part of the matrix-route trace
    trace_symbol: float        # imaginary part of the symbol-route trace
    symbol_sup: float          # sup of |commutator symbol| on the checked window
    axis_residual: float       # largest real part seen on either route
    state_trace: float         # quadrature trace of the state, should be 1

    @property
    def route_gap(self) -> float:
        return abs(self.trace_matrix - self.trace_symbol)


def commutator_trace(poly_coeffs, site_axis: int, V: PotentialSpec, t: float,
                     p: WeylObservable, grid: Grid, oracle: GridOracle = None,
                     op_matrix: np.ndarray = None) -> CommutatorTraceResult:
    """Trace of [A, exp(-tH)] composed with the quantized state, both routes.

    A is the multiplication operator by a polynomial (degree at most four) of
    the coordinate along ``site_axis``.  Pass a prebuilt oracle and quantized
    matrix to amortize the spectral factorization over a sweep of times.
    """
    poly_coeffs = list(poly_coeffs)
    if len(poly_coeffs) > 5:
        raise ValueError("observable polynomial degree is limited to four")
    if not 0 <= site_axis < grid.dim:
        raise ValueError("site_axis out of range")
    if oracle is None:
        oracle = GridOracle(V, grid)
    if op_matrix is None:
        op_matrix = op_weyl_matrix(p, grid)
    S = oracle.semigroup(t).matrix
    coords = grid.points()[:, site_axis]
    a_vals = np.polynomial.polynomial.polyval(coords, poly_coeffs)
    C = a_vals[:, None] * S - S * a_vals[None, :]

    tr_matrix = complex((C * op_matrix.T).sum())

    F_full = matrix_weyl_symbol(C, grid, region="full")
    dxi = math.pi / (grid.n_grid * grid.spacing)
    tr_symbol = complex(
        (F_full.values * p.table).sum()
        * (grid.spacing * dxi / (2.0 * math.pi)) ** grid.dim
    )

    F_window = matrix_weyl_symbol(C, grid, region="auto",
                                  margin=default_margin(t, grid.spacing),
                                  check_decay=True)
    symbol_sup = float(np.abs(F_window.values).max())

    axis_residual = max(abs(tr_matrix.real), abs(tr_symbol.real))
    return CommutatorTraceResult(
        t=float(t),
        trace_matrix=tr_matrix.imag,
        trace_symbol=tr_symbol.imag,
        symbol_sup=symbol_sup,
        axis_residual=axis_residual,
        state_trace=p.trace_quadrature(),
    )


@dataclass(frozen=True)
class ScalingFit:
    """Log-log slope of |trace| against time, and the implied sqrt-time constant."""

    slope: float
    coefficient: float  # max over points of |trace| / sqrt(t)
    n_points: int


def scaling_fit(points) -> ScalingFit:
    """Least-squares slope of log|trace| against log t.

    Requires at least five points with nonzero traces spanning two decades of
    time; the coefficient makes |trace| <= coefficient * sqrt(t) tight on the
    supplied sweep.
    """
    cleaned = [(float(t), abs(float(v))) for t, v in points if float(v) != 0.0]
    if len(cleaned) < 5:
        raise ValueError("need at least five nonzero points")
    ts = np.array([t for t, _ in cleaned])
    vs = np.array([v for _, v in cleaned])
    if ts.max() / ts.min() < 100.0:
        raise ValueError("time values must span at least two decades")
    slope, _ = np.polyfit(np.log(ts), np.log(vs), 1)
    coefficient = float((vs / np.sqrt(ts)).max())
    return ScalingFit(float(slope), coefficient, len(cleaned))
