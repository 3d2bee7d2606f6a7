import math

import numpy as np
import pytest

from weylfk.commutator import (
    AliasingError,
    commutator_trace,
    gaussian_state_symbol,
    op_weyl_matrix,
    scaling_fit,
)
from weylfk.oracle import Grid, GridOracle, SupportError
from weylfk.potentials import (
    NearestNeighborPotential,
    ZeroPotential,
    harmonic_function,
    zero_function,
)


@pytest.fixture(scope="module")
def harmonic_setup():
    grid = Grid(10.0, 512, 1)
    V = NearestNeighborPotential(1, [(0,)], harmonic_function(), zero_function())
    oracle = GridOracle(V, grid)
    state = gaussian_state_symbol(grid, [0.6], [0.6], [1.0], [1.0])
    op = op_weyl_matrix(state, grid)
    return grid, V, oracle, state, op


class TestState:
    def test_trace_one(self, harmonic_setup):
        grid, V, oracle, state, op = harmonic_setup
        assert state.trace_quadrature() == pytest.approx(1.0, abs=1e-12)
        assert abs(np.trace(op).real - 1.0) <= 1e-8
        assert abs(np.trace(op).imag) <= 1e-12

    def test_nonnegative(self, harmonic_setup):
        grid, V, oracle, state, op = harmonic_setup
        assert state.table.min() >= 0.0

    def test_peak_scales_with_width(self):
        grid = Grid(10.0, 256, 1)
        wide = gaussian_state_symbol(grid, [0.0], [0.0], [1.0], [1.0])
        narrow = gaussian_state_symbol(grid, [0.0], [0.0], [0.5], [0.5])
        # trace-one normalization: halving both widths quadruples the peak
        ratio = narrow.value([0.0], [0.0]) / wide.value([0.0], [0.0])
        assert ratio == pytest.approx(4.0, rel=1e-6)

    def test_support_violations(self):
        grid = Grid(4.0, 64, 1)
        with pytest.raises(SupportError):
            gaussian_state_symbol(grid, [3.9], [0.0], [1.0], [1.0])
        with pytest.raises(SupportError):
            gaussian_state_symbol(grid, [0.0], [0.0], [1.0], [50.0])


class TestQuantization:
    def test_hermitian(self, harmonic_setup):
        grid, V, oracle, state, op = harmonic_setup
        assert np.abs(op - op.conj().T).max() <= 1e-10

    def test_constant_symbol_is_identity(self):
        # a symbol flat across phase space quantizes to a multiple of the identity
        grid = Grid(10.0, 128, 1)
        state = gaussian_state_symbol(grid, [0.0], [0.0], [1e6], [1e6],
                                      support_tol=1.0)
        op = op_weyl_matrix(state, grid, aliasing_tol=1.0)
        c = state.norm_const  # the (tiny) constant symbol value
        assert np.abs(op - c * np.eye(grid.n_grid)).max() <= 1e-9 * c

    def test_aliasing_detected(self):
        grid = Grid(10.0, 64, 1)
        with pytest.raises(AliasingError):
            state = gaussian_state_symbol(grid, [0.0], [0.0], [1.0], [40.0],
                                          support_tol=1.0)
            op_weyl_matrix(state, grid)


class TestTrace:
    def test_small_time_limit(self, harmonic_setup):
        grid, V, oracle, state, op = harmonic_setup
        r = commutator_trace([0.0, 1.0], 0, V, 1e-4, state, grid,
                             oracle=oracle, op_matrix=op)
        assert abs(r.trace_matrix) <= 0.1 * math.sqrt(1e-4) * 10.0

    def test_parity_zero_for_free_centered_state(self):
        grid = Grid(8.0, 256, 1)
        V = ZeroPotential([(0,)])
        oracle = GridOracle(V, grid)
        state = gaussian_state_symbol(grid, [0.0], [0.0], [1.0], [1.0])
        r = commutator_trace([0.0, 1.0], 0, V, 0.5, state, grid, oracle=oracle)
        assert abs(r.trace_matrix) <= 1e-8
        assert abs(r.trace_symbol) <= 1e-8

    def test_routes_agree(self, harmonic_setup):
        grid, V, oracle, state, op = harmonic_setup
        for t in (0.01, 0.1, 1.0):
            r = commutator_trace([0.0, 1.0], 0, V, t, state, grid,
                                 oracle=oracle, op_matrix=op)
            assert r.route_gap <= 1e-6 * max(1e-30, abs(r.trace_matrix))
            assert r.axis_residual <= 1e-10

    def test_sqrt_scaling(self, harmonic_setup):
        grid, V, oracle, state, op = harmonic_setup
        ts = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0]
        values = []
        for t in ts:
            r = commutator_trace([0.0, 1.0], 0, V, t, state, grid,
                                 oracle=oracle, op_matrix=op)
            values.append((t, r.trace_matrix))
            # the symbol sup itself obeys the square-root envelope
            assert r.symbol_sup <= 2.0 * math.sqrt(t)
        fit = scaling_fit(values)
        assert fit.slope >= 0.4
        for t, v in values:
            assert abs(v) <= fit.coefficient * math.sqrt(t) * (1 + 1e-12)

    def test_degree_cap(self, harmonic_setup):
        grid, V, oracle, state, op = harmonic_setup
        with pytest.raises(ValueError):
            commutator_trace([0.0] * 6, 0, V, 0.1, state, grid,
                             oracle=oracle, op_matrix=op)


class TestScalingFit:
    def test_exact_sqrt_data(self):
        points = [(t, 2.0 * math.sqrt(t)) for t in (0.01, 0.03, 0.1, 0.3, 1.0)]
        fit = scaling_fit(points)
        assert fit.slope == pytest.approx(0.5, abs=1e-12)
        assert fit.coefficient == pytest.approx(2.0, rel=1e-12)

    def test_linear_data(self):
        points = [(t, 3.0 * t) for t in (0.01, 0.03, 0.1, 0.3, 1.0)]
        fit = scaling_fit(points)
        assert fit.slope == pytest.approx(1.0, abs=1e-12)
        # linear decay is consistent with a square-root envelope on (0, 1]
        for t, v in points:
            assert v <= fit.coefficient * math.sqrt(t) * (1 + 1e-12)

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            scaling_fit([(0.1, 0.0), (1.0, 0.0)])
        with pytest.raises(ValueError):
            scaling_fit([(t, 1.0) for t in (0.1, 0.2, 0.3, 0.4, 0.5)])
