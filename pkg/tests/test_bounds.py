import math

import numpy as np
import pytest

from weylfk.bounds import (
    BoundReport,
    DivergentIntegralError,
    SymbolClassParams,
    check_l1_bound,
    check_linf,
    check_mixed_derivative_bound,
    check_xi_derivative_bounds,
    class_membership,
)
from weylfk.brownian import VariancePreset, abs_moment_max
from weylfk.multiindex import MultiIndex
from weylfk.oracle import Grid
from weylfk.potentials import (
    NearestNeighborPotential,
    ZeroPotential,
    harmonic_function,
    lorentzian_function,
    mean_field_family,
    nearest_neighbor_chain_family,
    zero_function,
)
from weylfk.symbol_estimator import PhasePoint, SymbolEstimate, estimate_u

mi = MultiIndex.of


def fake_estimate(value, stderr=0.01, t=1.0):
    return SymbolEstimate(complex(value), stderr, 1000, 10, "generator_laplacian", t)


class TestLinf:
    def test_free_sweep_clean(self):
        V = ZeroPotential([0])
        rng = np.random.default_rng(1)
        estimates = [
            estimate_u(
                V, PhasePoint([0.0], [float(rng.uniform(-2, 2))]),
                0.5, 4000, 1, seed=k,
            )
            for k in range(20)
        ]
        report = check_linf(estimates)
        assert not report.violation
        assert report.n_samples == 20

    def test_adversarial_flagged(self):
        report = check_linf([fake_estimate(1.5, stderr=0.01)])
        assert report.violation
        assert report.worst_margin == pytest.approx(-0.5)

    def test_slack_tolerates_noise(self):
        report = check_linf([fake_estimate(1.02, stderr=0.01)])
        assert not report.violation  # within three standard errors

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            check_linf([])


class TestXiDerivativeBounds:
    def test_empty_index_reduces_to_unit_bound(self):
        product, coarse = check_xi_derivative_bounds(
            [fake_estimate(0.7)], mi({}), 1.0, 1.0
        )
        assert product.extra["bound"] == 1.0
        assert coarse.extra["bound"] == 1.0
        assert not product.violation

    def test_second_order_unit_time(self):
        product, _ = check_xi_derivative_bounds(
            [fake_estimate(0.2)], mi({1: 2}), 1.0, 1.0
        )
        assert product.extra["bound"] == pytest.approx(1.0, rel=1e-14)

    def test_cross_order_quarter_time(self):
        product, _ = check_xi_derivative_bounds(
            [fake_estimate(0.01)], mi({1: 1, 2: 1}), 0.25, 1.0
        )
        assert product.extra["bound"] == pytest.approx(0.25 * 2 / math.pi, rel=1e-14)

    def test_coarse_never_tighter(self):
        for beta in (mi({1: 1}), mi({1: 2}), mi({1: 2, 2: 1}), mi({1: 3, 2: 3})):
            for t in (0.25, 1.0, 2.0):
                product, coarse = check_xi_derivative_bounds(
                    [fake_estimate(0.0)], beta, t, 1.0
                )
                assert coarse.extra["bound"] >= product.extra["bound"] * (1 - 1e-12)

    def test_violation_flagged(self):
        product, _ = check_xi_derivative_bounds(
            [fake_estimate(5.0, stderr=0.001)], mi({1: 1}), 1.0, 1.0
        )
        assert product.violation


class TestL1Bound:
    def test_harmonic_right_side_is_sqrt_pi(self):
        V = NearestNeighborPotential(1, [(0,)], harmonic_function(), zero_function())
        report = check_l1_bound(V, 1.0, [0.0, 1.0], Grid(14.0, 1024, 1))
        assert report.extra["right_side"] == pytest.approx(math.sqrt(math.pi), rel=1e-9)
        assert not report.violation
        assert report.worst_margin >= 0.0

    def test_zero_potential_divergent(self):
        V = ZeroPotential([(0,)])
        with pytest.raises(DivergentIntegralError):
            check_l1_bound(V, 1.0, [0.0], Grid(8.0, 256, 1))

    def test_two_site_bound(self):
        V = NearestNeighborPotential(
            1, [(0,), (1,)], harmonic_function(), zero_function()
        )
        report = check_l1_bound(
            V, 0.25, [[0.0, 0.0], [1.0, -0.5]], Grid(10.0, 64, 2)
        )
        assert report.extra["right_side"] == pytest.approx(4 * math.pi, rel=1e-9)
        assert not report.violation


class TestMixedDerivativeBoundCheck:
    def test_mean_field_sweep(self):
        family = mean_field_family(lorentzian_function())
        reports = check_mixed_derivative_bound(
            family, 1, 0.5, mi({0: 1}), mi({}), [2, 4], 2000, 8, seed=5
        )
        assert len(reports) == 2
        assert not any(r.violation for r in reports)
        bounds = {r.extra["bound"] for r in reports}
        assert len(bounds) == 1  # literally size-independent

    def test_nearest_neighbor_sweep(self):
        family = nearest_neighbor_chain_family(zero_function(), lorentzian_function())
        reports = check_mixed_derivative_bound(
            family, 1, 0.5, mi({0: 1}), mi({1: 1}), [2, 4], 2000, 8, seed=6
        )
        assert not any(r.violation for r in reports)

    def test_margins_do_not_degrade_with_size(self):
        family = mean_field_family(lorentzian_function())
        reports = check_mixed_derivative_bound(
            family, 1, 0.5, mi({0: 1}), mi({}), [2, 4, 8], 2000, 8, seed=7
        )
        margins = [r.worst_margin for r in reports]
        slack = max(r.worst_slack for r in reports)
        assert margins[1] >= margins[0] - 2 * slack
        assert margins[2] >= margins[0] - 2 * slack


class TestClassMembership:
    def test_parameters_formula(self):
        family = mean_field_family(lorentzian_function())
        c1 = family.certified_cm(1)
        params, reports = class_membership(
            family, 1, 0.5, 2000, 8, seed=3, lambda_size=3,
            variance=VariancePreset.STANDARD_WIENER,
        )
        assert params.max_norm == 1.0
        assert np.allclose(params.rho, 1.0 * math.exp(0.5 * c1))
        assert np.allclose(params.delta, abs_moment_max(1) * math.sqrt(0.5))
        assert len(set(params.rho)) == 1 and len(set(params.delta)) == 1
        assert not any(r.violation for r in reports)

    def test_bound_for_expansion(self):
        params = SymbolClassParams(1.0, [2.0, 2.0], [0.5, 0.5], 1)
        value = params.bound_for(mi({0: 1}), mi({1: 1}), (0, 1))
        assert value == pytest.approx(2.0 * 0.5)

    def test_zero_budget_params(self):
        # a constant interaction has a zero derivative budget: unit position
        # growth factors, frequency factors B_m * sqrt(sigma2 * t)
        from weylfk.potentials import constant_function

        family = mean_field_family(constant_function(0.7))
        params, reports = class_membership(
            family, 1, 1.0, 1000, 4, seed=1, lambda_size=2,
            variance=VariancePreset.STANDARD_WIENER,
        )
        assert np.allclose(params.rho, 1.0)
        assert np.allclose(params.delta, abs_moment_max(1) * 1.0)
        assert not any(r.violation for r in reports)

    def test_negative_params_rejected(self):
        with pytest.raises(ValueError):
            SymbolClassParams(-1.0, [1.0], [1.0], 1)
