import itertools
import math

import numpy as np
import pytest

from weylfk.multiindex import MultiIndex, sub_multiindices
from weylfk.potentials import (
    CustomPotential,
    MeanFieldPotential,
    MissingSupBoundError,
    NearestNeighborPotential,
    ZeroPotential,
    constant_function,
    cosine_function,
    gaussian_bump_function,
    harmonic_function,
    lorentzian_function,
    mean_field_family,
    nearest_neighbor_chain_family,
    potential_from_json,
    scalar_from_json,
    zero_function,
)

mi = MultiIndex.of


def finite_difference(fn, x, alpha, h=1e-4):
    """Central finite differences of a scalar callable, one site order at a time."""
    site, order = alpha.entries[0]
    rest = MultiIndex.of(dict(alpha.entries[1:]))

    def reduced(y):
        if rest.is_zero():
            return fn(y)
        return finite_difference(fn, y, rest, h)

    idx = site

    def shifted(delta):
        y = np.array(x, dtype=float)
        y[idx] += delta
        return reduced(y)

    if order == 1:
        return (shifted(h) - shifted(-h)) / (2 * h)
    if order == 2:
        return (shifted(h) - 2 * reduced(np.array(x, float)) + shifted(-h)) / h**2
    raise NotImplementedError


class TestScalarFunctions:
    @pytest.mark.parametrize("builder", [
        gaussian_bump_function, lorentzian_function, cosine_function,
    ])
    def test_derivatives_match_finite_differences(self, builder):
        f = builder(1.3, 0.9)
        ys = np.linspace(-3, 3, 11)
        h = 1e-5
        for k in range(4):
            numeric = (f.derivative(k, ys + h) - f.derivative(k, ys - h)) / (2 * h)
            exact = f.derivative(k + 1, ys)
            assert np.allclose(numeric, exact, rtol=1e-6, atol=1e-7), (builder, k)

    @pytest.mark.parametrize("builder", [
        gaussian_bump_function, lorentzian_function, cosine_function,
    ])
    def test_sup_bounds_hold_on_samples(self, builder):
        f = builder(2.0, 1.5)
        ys = np.linspace(-20, 20, 4001)
        for k in range(7):
            assert np.abs(f.derivative(k, ys)).max() <= f.sup_bound(k) * (1 + 1e-12)

    def test_nonnegative_values(self):
        ys = np.linspace(-10, 10, 201)
        for builder in (gaussian_bump_function, lorentzian_function, cosine_function):
            assert np.all(builder().value(ys) >= 0)

    def test_harmonic_missing_sup(self):
        f = harmonic_function()
        assert f.sup_bound(1) is None
        with pytest.raises(MissingSupBoundError):
            f.max_sup(1, 2)

    def test_json_roundtrip(self):
        f = scalar_from_json({"name": "lorentzian", "amplitude": 2.0, "width": 3.0})
        assert f.to_json() == {"name": "lorentzian", "amplitude": 2.0, "width": 3.0}
        with pytest.raises(ValueError):
            scalar_from_json({"name": "nope"})


class TestEval:
    def test_zero(self):
        V = ZeroPotential([0, 1])
        assert V.eval([1.0, -2.0]) == 0.0

    def test_mean_field_constant(self):
        # all-pairs average of a constant c over n sites gives c*n
        n, c = 5, 0.7
        V = MeanFieldPotential(range(n), constant_function(c))
        assert V.eval(np.zeros(n)) == pytest.approx(c * n, rel=1e-14)

    def test_nearest_neighbor_square_pair(self):
        G = scalar_from_json({"name": "harmonic"})
        chain = NearestNeighborPotential(1, [(0,), (1,)], zero_function(), G)
        # both ordered pairs contribute: G(-1) + G(1) = 2
        assert chain.eval([0.0, 1.0]) == pytest.approx(2.0, rel=1e-14)

    def test_dimension_mismatch(self):
        V = ZeroPotential([0, 1])
        with pytest.raises(ValueError):
            V.eval([1.0])

    def test_mean_field_permutation_invariance(self):
        rng = np.random.default_rng(5)
        V = MeanFieldPotential(range(4), lorentzian_function())
        x = rng.normal(size=4)
        base = V.eval(x)
        for perm in itertools.permutations(range(4)):
            assert V.eval(x[list(perm)]) == pytest.approx(base, rel=1e-13)

    def test_mean_field_diagonal_flag(self):
        G = gaussian_bump_function()
        x = np.array([0.3, -0.5, 1.1])
        with_diag = MeanFieldPotential(range(3), G, include_diagonal=True)
        without = MeanFieldPotential(range(3), G, include_diagonal=False)
        # the diagonal contributes exactly G(0) overall
        assert with_diag.eval(x) - without.eval(x) == pytest.approx(
            float(G.value(0.0)), rel=1e-13
        )

    def test_vectorized_eval(self):
        V = MeanFieldPotential(range(3), lorentzian_function())
        xs = np.random.default_rng(0).normal(size=(10, 7, 3))
        out = V.eval(xs)
        assert out.shape == (10, 7)
        assert out[2, 3] == pytest.approx(float(V.eval(xs[2, 3])), rel=1e-14)


class TestPartial:
    def test_zeroth_is_eval(self):
        V = MeanFieldPotential(range(3), lorentzian_function())
        x = np.array([0.1, 0.2, -0.3])
        assert V.partial(mi({}), x) == pytest.approx(float(V.eval(x)))

    def test_zero_potential_derivatives_vanish(self):
        V = ZeroPotential([0, 1])
        assert V.partial(mi({0: 1}), [0.5, 0.5]) == 0.0

    def test_nearest_neighbor_hand_value(self):
        # d/dx0 of (x0-x1)^2 + (x1-x0)^2 = 4 (x0 - x1); at (0, 1) this is -4
        G = scalar_from_json({"name": "harmonic"})
        chain = NearestNeighborPotential(1, [(0,), (1,)], zero_function(), G)
        value = chain.partial(mi({(0,): 1}), [0.0, 1.0])
        assert value == pytest.approx(-4.0, rel=1e-13)

    @pytest.mark.parametrize("make", [
        lambda: NearestNeighborPotential(
            1, [(0,), (1,), (2,)], gaussian_bump_function(1.1, 0.8),
            lorentzian_function(0.9, 1.2),
        ),
        lambda: MeanFieldPotential(range(3), gaussian_bump_function(1.5, 1.1)),
    ])
    def test_partials_match_finite_differences(self, make):
        V = make()
        rng = np.random.default_rng(11)
        sites = V.sites
        alphas = [
            mi({sites[0]: 1}),
            mi({sites[1]: 1}),
            mi({sites[0]: 2}),
            mi({sites[0]: 1, sites[2]: 1}),
        ]
        pos = {s: i for i, s in enumerate(sites)}
        for _ in range(4):
            x = rng.uniform(-2, 2, len(sites))
            for alpha in alphas:
                alpha_idx = MultiIndex.of({pos[s]: o for s, o in alpha.entries})
                fd = finite_difference(lambda y: float(V.eval(y)), x, alpha_idx)
                exact = float(V.partial(alpha, x))
                assert exact == pytest.approx(fd, rel=1e-6, abs=5e-7), (alpha, x)

    def test_unsupported_site_rejected(self):
        V = MeanFieldPotential(range(2), lorentzian_function())
        with pytest.raises(ValueError):
            V.partial(mi({9: 1}), [0.0, 0.0])

    def test_custom_needs_declared_order(self):
        V = CustomPotential([0], lambda x: x[..., 0] ** 2)
        with pytest.raises(ValueError):
            V.partial(mi({0: 1}), [1.0])


class TestDerivativeSum:
    def test_zero(self):
        V = ZeroPotential([0])
        assert V.derivative_sum(mi({0: 2}), [0.3]) == 0.0

    def test_single_order_one(self):
        V = MeanFieldPotential(range(2), gaussian_bump_function())
        x = np.array([0.4, -0.2])
        alpha = mi({0: 1})
        assert V.derivative_sum(alpha, x) == pytest.approx(
            abs(float(V.partial(alpha, x)))
        )

    def test_matches_explicit_sum(self):
        V = MeanFieldPotential(range(3), lorentzian_function())
        x = np.array([0.1, -0.7, 1.3])
        alpha = mi({0: 2, 1: 1})
        explicit = sum(abs(float(V.partial(b, x))) for b in sub_multiindices(alpha))
        assert V.derivative_sum(alpha, x) == pytest.approx(explicit, rel=1e-13)


class TestCertifiedBudget:
    def test_zero_functions_give_zero(self):
        V = NearestNeighborPotential(1, [(0,), (1,)], zero_function(), zero_function())
        assert V.certified_cm(2) == 0.0

    def test_constant_pair_function(self):
        V = MeanFieldPotential(range(3), constant_function(0.7))
        assert V.certified_cm(1) == 0.0
        assert float(V.derivative_sum(mi({0: 1}), np.zeros(3))) == 0.0

    def test_missing_sup_bound_raises(self):
        V = NearestNeighborPotential(1, [(0,)], harmonic_function(), zero_function())
        with pytest.raises(MissingSupBoundError):
            V.certified_cm(1)

    @pytest.mark.parametrize("family,m", [
        (nearest_neighbor_chain_family(zero_function(), lorentzian_function()), 1),
        (nearest_neighbor_chain_family(
            gaussian_bump_function(), lorentzian_function()), 2),
        (mean_field_family(lorentzian_function()), 1),
        (mean_field_family(gaussian_bump_function(0.8, 1.3)), 2),
    ])
    def test_budget_inequality_random_sweep(self, family, m):
        rng = np.random.default_rng(99)
        c_m = family.certified_cm(m)
        for n_sites in (3, 8):
            V = family.build(n_sites)
            sites = V.sites
            for _ in range(125):
                x = rng.uniform(-4, 4, n_sites)
                k = rng.integers(1, 4)
                chosen = rng.choice(n_sites, size=min(k, n_sites), replace=False)
                alpha = mi({sites[i]: int(rng.integers(1, m + 1)) for i in chosen})
                lhs = float(V.derivative_sum(alpha, x))
                assert lhs <= c_m * len(alpha.support) * (1 + 1e-12), (alpha, x)

    @pytest.mark.parametrize("family", [
        nearest_neighbor_chain_family(gaussian_bump_function(), lorentzian_function()),
        mean_field_family(lorentzian_function()),
    ])
    def test_budget_independent_of_size(self, family):
        # the substance of the hypothesis: enlarging the site set cannot grow
        # the per-active-site derivative budget (matched draws per size)
        sups = {}
        for n_sites in (4, 16):
            rng = np.random.default_rng(17)
            V = family.build(n_sites)
            alpha = mi({V.sites[0]: 1, V.sites[1]: 1})
            worst = 0.0
            for _ in range(1000):
                x = rng.uniform(-3, 3, n_sites)
                worst = max(worst, float(V.derivative_sum(alpha, x)))
            sups[n_sites] = worst
        assert sups[16] <= sups[4] * 1.01

    def test_family_budget_same_at_all_sizes(self):
        family = mean_field_family(lorentzian_function())
        assert family.build(2).certified_cm(2) == family.build(8).certified_cm(2)


class TestJson:
    def test_roundtrip_variants(self):
        specs = [
            {"variant": "zero", "sites": [0, 1]},
            {
                "variant": "nearest_neighbor",
                "d": 1,
                "sites": [[0], [1]],
                "F": {"name": "gaussian_bump", "amplitude": 1.0, "width": 1.0},
                "G": {"name": "lorentzian", "amplitude": 1.0, "width": 1.0},
            },
            {
                "variant": "mean_field",
                "sites": [0, 1, 2],
                "G": {"name": "cosine", "amplitude": 1.0, "width": 1.0},
                "include_diagonal": False,
            },
        ]
        for spec in specs:
            V = potential_from_json(spec)
            assert potential_from_json(V.to_json()).to_json() == V.to_json()

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            potential_from_json({"variant": "magic", "sites": []})
