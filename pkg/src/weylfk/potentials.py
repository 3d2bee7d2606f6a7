"""Nonnegative interaction potentials on finite site sets.

Four variants: identically zero, user-supplied callables, nearest-neighbor
pair interactions on a lattice, and all-pairs mean-field interactions.  The
structured variants evaluate exact partial derivatives from the chain rule on
their defining sums and certify a site-uniform budget for summed derivative
magnitudes that does not grow with the number of sites.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .multiindex import MultiIndex, sub_multiindices

# sup_y |He_k(y)| exp(-y^2/4) <= CRAMER_CONSTANT * sqrt(k!)
CRAMER_CONSTANT = 1.086435


class MissingSupBoundError(ValueError):
    """A certified sup-norm was requested beyond what the function declares."""


@dataclass(frozen=True)
class ScalarFunction:
    """Smooth scalar function with vectorized derivatives and certified sup-norms.

    deriv_fn(k, y) returns the k-th derivative at y (any array shape);
    sup_fn(k) returns a valid upper bound for sup |f^(k)|, or None when no
    finite certified bound is available at that order.
    """

    name: str
    deriv_fn: Callable
    sup_fn: Callable
    params: Optional[dict] = None

    def derivative(self, k: int, y):
        if k < 0:
            raise ValueError("derivative order must be >= 0")
        return self.deriv_fn(k, np.asarray(y, dtype=float))

    def value(self, y):
        return self.derivative(0, y)

    def sup_bound(self, k: int):
        if k < 0:
            raise ValueError("derivative order must be >= 0")
        return self.sup_fn(k)

    def max_sup(self, k_min: int, k_max: int) -> float:
        """Largest certified sup-norm over derivative orders k_min..k_max."""
        worst = 0.0
        for k in range(k_min, k_max + 1):
            bound = self.sup_fn(k)
            if bound is None:
                raise MissingSupBoundError(
                    f"{self.name!r} has no certified sup bound at order {k}"
                )
            worst = max(worst, bound)
        return worst

    def to_json(self) -> dict:
        if self.params is None:
            raise ValueError(f"scalar function {self.name!r} is not serializable")
        return {"name": self.name, **self.params}


def _validate_amp_width(amplitude, width):
    if amplitude < 0:
        raise ValueError("amplitude must be >= 0")
    if not width > 0:
        raise ValueError("width must be positive")
    return float(amplitude), float(width)


def zero_function() -> ScalarFunction:
    return ScalarFunction(
        "zero",
        lambda k, y: np.zeros_like(y),
        lambda k: 0.0,
        params={},
    )


def constant_function(amplitude=1.0) -> ScalarFunction:
    a = float(amplitude)
    if a < 0:
        raise ValueError("amplitude must be >= 0")

    def deriv(k, y):
        return np.full_like(y, a) if k == 0 else np.zeros_like(y)

    return ScalarFunction(
        "constant", deriv, lambda k: a if k == 0 else 0.0, params={"amplitude": a}
    )


def harmonic_function(amplitude=1.0) -> ScalarFunction:
    """a*y^2; unbounded, so only orders >= 2 carry certified sup bounds."""
    a = float(amplitude)
    if a < 0:
        raise ValueError("amplitude must be >= 0")

    def deriv(k, y):
        if k == 0:
            return a * y * y
        if k == 1:
            return 2.0 * a * y
        if k == 2:
            return np.full_like(y, 2.0 * a)
        return np.zeros_like(y)

    def sup(k):
        if k <= 1:
            return None
        return 2.0 * a if k == 2 else 0.0

    return ScalarFunction("harmonic", deriv, sup, params={"amplitude": a})


def _hermite_e(k, u):
    # probabilists' Hermite polynomials by recurrence
    h_prev = np.ones_like(u)
    if k == 0:
        return h_prev
    h = u.copy()
    for n in range(1, k):
        h, h_prev = u * h - n * h_prev, h
    return h


def gaussian_bump_function(amplitude=1.0, width=1.0) -> ScalarFunction:
    """a*exp(-(y/w)^2/2) with closed-form derivatives via Hermite polynomials."""
    a, w = _validate_amp_width(amplitude, width)

    def deriv(k, y):
        u = y / w
        sign = -1.0 if k % 2 else 1.0
        return a * w ** (-k) * sign * _hermite_e(k, u) * np.exp(-0.5 * u * u)

    def sup(k):
        if k == 0:
            return a
        return a * w ** (-k) * CRAMER_CONSTANT * math.sqrt(math.factorial(k))

    return ScalarFunction(
        "gaussian_bump", deriv, sup, params={"amplitude": a, "width": w}
    )


def lorentzian_function(amplitude=1.0, width=1.0) -> ScalarFunction:
    """a/(1+(y/w)^2); derivatives from the partial-fraction form over y +- i*w."""
    a, w = _validate_amp_width(amplitude, width)

    def deriv(k, y):
        u = y / w
        sign = -1.0 if k % 2 == 0 else 1.0
        # d^k/du^k 1/(1+u^2) = (-1)^(k+1) k! Im((u+i)^(-k-1))
        return a * w ** (-k) * sign * math.factorial(k) * np.imag(
            (u + 1j) ** (-(k + 1))
        )

    def sup(k):
        # |(u+i)^(-k-1)| <= 1 on the real line
        return a * w ** (-k) * math.factorial(k)

    return ScalarFunction(
        "lorentzian", deriv, sup, params={"amplitude": a, "width": w}
    )


def cosine_function(amplitude=1.0, width=1.0) -> ScalarFunction:
    """a*(1+cos(y/w))/2, a nonnegative bounded oscillation."""
    a, w = _validate_amp_width(amplitude, width)

    def deriv(k, y):
        u = y / w
        if k == 0:
            return a * 0.5 * (1.0 + np.cos(u))
        return a * 0.5 * w ** (-k) * np.cos(u + k * math.pi / 2.0)

    def sup(k):
        return a if k == 0 else a * 0.5 * w ** (-k)

    return ScalarFunction("cosine", deriv, sup, params={"amplitude": a, "width": w})


_BUILTIN_SCALARS = {
    "zero": zero_function,
    "constant": constant_function,
    "harmonic": harmonic_function,
    "gaussian_bump": gaussian_bump_function,
    "lorentzian": lorentzian_function,
    "cosine": cosine_function,
}


def scalar_from_json(obj: dict) -> ScalarFunction:
    if not isinstance(obj, dict) or "name" not in obj:
        raise ValueError("scalar function description must be an object with 'name'")
    name = obj["name"]
    if name not in _BUILTIN_SCALARS:
        raise ValueError(
            f"unknown scalar function {name!r}; known: {sorted(_BUILTIN_SCALARS)}"
        )
    kwargs = {k: v for k, v in obj.items() if k != "name"}
    return _BUILTIN_SCALARS[name](**kwargs)


class PotentialSpec:
    """Base class for a nonnegative potential over an ordered finite site list."""

    variant = "abstract"

    def __init__(self, sites):
        self.sites = tuple(sites)
        self._site_pos = {site: i for i, site in enumerate(self.sites)}
        if len(self._site_pos) != len(self.sites):
            raise ValueError("duplicate sites")

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    def _as_points(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] != self.n_sites:
            raise ValueError(
                f"point has trailing dimension {x.shape[-1] if x.ndim else 0}, "
                f"expected {self.n_sites}"
            )
        return x

    def _check_alpha(self, alpha: MultiIndex):
        for site in alpha.support:
            if site not in self._site_pos:
                raise ValueError(f"multi-index site {site!r} is not in the site list")

    def eval(self, x):
        raise NotImplementedError

    def partial(self, alpha: MultiIndex, x):
        raise NotImplementedError

    def derivative_sum(self, alpha: MultiIndex, x):
        """Sum of |partial derivative| over all nonzero beta <= alpha."""
        self._check_alpha(alpha)
        x = self._as_points(x)
        if alpha.is_zero():
            return np.zeros(x.shape[:-1])
        total = np.zeros(x.shape[:-1])
        for beta in sub_multiindices(alpha):
            total += np.abs(self.partial(beta, x))
        return total

    def certified_cm(self, m: int) -> float:
        raise ValueError(
            f"no certified derivative budget for the {self.variant!r} variant"
        )

    def to_json(self) -> dict:
        raise ValueError(f"the {self.variant!r} variant is not serializable")


class ZeroPotential(PotentialSpec):
    variant = "zero"

    def eval(self, x):
        return np.zeros(self._as_points(x).shape[:-1])

    def partial(self, alpha, x):
        self._check_alpha(alpha)
        return np.zeros(self._as_points(x).shape[:-1])

    def to_json(self):
        return {"variant": "zero", "sites": list(self.sites)}


class CustomPotential(PotentialSpec):
    """Caller-supplied potential; derivatives only up to the declared order.

    eval_fn takes an array of shape (..., n_sites) and returns (...);
    partial_fn, when given, takes (alpha, x) and must honor the same shapes.
    """

    variant = "custom"

    def __init__(self, sites, eval_fn, partial_fn=None, smoothness_order=0, name="custom"):
        super().__init__(sites)
        self.eval_fn = eval_fn
        self.partial_fn = partial_fn
        self.smoothness_order = int(smoothness_order)
        self.name = name

    def eval(self, x):
        return np.asarray(self.eval_fn(self._as_points(x)), dtype=float)

    def partial(self, alpha, x):
        self._check_alpha(alpha)
        x = self._as_points(x)
        if alpha.is_zero():
            return self.eval(x)
        if self.partial_fn is None or alpha.order > self.smoothness_order:
            raise ValueError(
                f"custom potential {self.name!r} provides derivatives only up to "
                f"order {self.smoothness_order if self.partial_fn else 0}"
            )
        return np.asarray(self.partial_fn(alpha, x), dtype=float)


class NearestNeighborPotential(PotentialSpec):
    """On-site terms F(x_j) plus pair terms G(x_j - x_k) over adjacent lattice sites.

    Sites carry integer lattice coordinates; two sites are adjacent when the
    sup-norm of their coordinate difference is one, and both ordered pairs of
    an adjacent couple contribute.
    """

    variant = "nearest_neighbor"

    def __init__(self, dim, sites, on_site: ScalarFunction, pair: ScalarFunction):
        sites = tuple(tuple(s) for s in sites)
        for s in sites:
            if len(s) != dim:
                raise ValueError(f"site {s!r} does not have {dim} coordinates")
        super().__init__(sites)
        self.dim = int(dim)
        self.on_site = on_site
        self.pair = pair
        self._pairs = [
            (j, k)
            for j in range(len(sites))
            for k in range(len(sites))
            if j != k and max(abs(a - b) for a, b in zip(sites[j], sites[k])) == 1
        ]

    def eval(self, x):
        x = self._as_points(x)
        total = self.on_site.value(x).sum(axis=-1)
        for j, k in self._pairs:
            total = total + self.pair.value(x[..., j] - x[..., k])
        return total

    def partial(self, alpha, x):
        self._check_alpha(alpha)
        x = self._as_points(x)
        if alpha.is_zero():
            return self.eval(x)
        support = [self._site_pos[s] for s in alpha.support]
        total = np.zeros(x.shape[:-1])
        if len(support) == 1:
            j = support[0]
            total = total + self.on_site.derivative(alpha.order, x[..., j])
        if len(support) <= 2:
            support_set = set(support)
            for j, k in self._pairs:
                if support_set <= {j, k}:
                    order_k = alpha.get(self.sites[k])
                    sign = -1.0 if order_k % 2 else 1.0
                    total = total + sign * self.pair.derivative(
                        alpha.order, x[..., j] - x[..., k]
                    )
        return total

    def certified_cm(self, m: int) -> float:
        """Site-uniform budget for summed derivative magnitudes, valid for any site count.

        Each active site meets at most one on-site term and at most 2*3^d
        ordered adjacent pairs; 2^m and 4^m dominate the number of sub-indices
        a term can absorb through one site or one pair.
        """
        if m < 1:
            raise ValueError("m must be >= 1")
        on_site_part = 2.0**m * self.on_site.max_sup(1, m)
        pair_part = 2.0 * 3.0**self.dim * 4.0**m * self.pair.max_sup(1, 2 * m)
        return on_site_part + pair_part

    def to_json(self):
        return {
            "variant": "nearest_neighbor",
            "d": self.dim,
            "sites": [list(s) for s in self.sites],
            "F": self.on_site.to_json(),
            "G": self.pair.to_json(),
        }


class MeanFieldPotential(PotentialSpec):
    """All-ordered-pairs interaction averaged by the site count.

    The diagonal pairs contribute the constant G(0) per site and are included
    by default; excluding them only shifts the potential by that constant.
    """

    variant = "mean_field"

    def __init__(self, sites, pair: ScalarFunction, include_diagonal=True):
        super().__init__(sites)
        self.pair = pair
        self.include_diagonal = bool(include_diagonal)
        n = len(self.sites)
        self._pairs = [
            (j, k) for j in range(n) for k in range(n)
            if include_diagonal or j != k
        ]

    def eval(self, x):
        x = self._as_points(x)
        n = self.n_sites
        diffs = x[..., :, None] - x[..., None, :]
        vals = self.pair.value(diffs)
        if not self.include_diagonal:
            idx = np.arange(n)
            vals = vals.copy()
            vals[..., idx, idx] = 0.0
        return vals.sum(axis=(-2, -1)) / n

    def partial(self, alpha, x):
        self._check_alpha(alpha)
        x = self._as_points(x)
        if alpha.is_zero():
            return self.eval(x)
        support = [self._site_pos[s] for s in alpha.support]
        total = np.zeros(x.shape[:-1])
        if len(support) > 2:
            return total
        support_set = set(support)
        n = self.n_sites
        for j in range(n):
            for k in range(n):
                if j == k or not support_set <= {j, k}:
                    continue
                order_k = alpha.get(self.sites[k])
                sign = -1.0 if order_k % 2 else 1.0
                total = total + sign * self.pair.derivative(
                    alpha.order, x[..., j] - x[..., k]
                )
        return total / n

    def certified_cm(self, m: int) -> float:
        """Site-uniform budget for summed derivative magnitudes; the 1/n averaging
        makes the all-pairs sum an O(1) aggregate per active site."""
        if m < 1:
            raise ValueError("m must be >= 1")
        return 2.0 * 4.0**m * self.pair.max_sup(1, 2 * m)

    def to_json(self):
        return {
            "variant": "mean_field",
            "sites": list(self.sites),
            "G": self.pair.to_json(),
            "include_diagonal": self.include_diagonal,
        }


def potential_from_json(obj: dict) -> PotentialSpec:
    """Build a potential from its JSON description."""
    if not isinstance(obj, dict) or "variant" not in obj:
        raise ValueError("potential description must be an object with 'variant'")
    variant = obj["variant"]
    if variant == "zero":
        return ZeroPotential([_site_from_json(s) for s in obj["sites"]])
    if variant == "nearest_neighbor":
        return NearestNeighborPotential(
            obj["d"],
            [tuple(s) for s in obj["sites"]],
            scalar_from_json(obj["F"]),
            scalar_from_json(obj["G"]),
        )
    if variant == "mean_field":
        return MeanFieldPotential(
            [_site_from_json(s) for s in obj["sites"]],
            scalar_from_json(obj["G"]),
            include_diagonal=obj.get("include_diagonal", True),
        )
    raise ValueError(f"unknown potential variant {variant!r}")


def _site_from_json(s):
    return tuple(s) if isinstance(s, list) else s


@dataclass(frozen=True)
class PotentialFamily:
    """A potential for every site count, sharing the same interaction functions."""

    name: str
    build: Callable  # site count -> PotentialSpec

    def certified_cm(self, m: int) -> float:
        # the budget depends only on the interaction functions, not the size
        return self.build(2).certified_cm(m)


def nearest_neighbor_chain_family(on_site, pair, name="nearest_neighbor_chain"):
    """One-dimensional chains 0..n-1 with the given on-site and pair functions."""

    def build(n_sites: int) -> NearestNeighborPotential:
        if n_sites < 1:
            raise ValueError("need at least one site")
        return NearestNeighborPotential(
            1, [(i,) for i in range(n_sites)], on_site, pair
        )

    return PotentialFamily(name, build)


def mean_field_family(pair, include_diagonal=True, name="mean_field"):
    def build(n_sites: int) -> MeanFieldPotential:
        if n_sites < 1:
            raise ValueError("need at least one site")
        return MeanFieldPotential(range(n_sites), pair, include_diagonal)

    return PotentialFamily(name, build)


def family_from_json(obj: dict) -> PotentialFamily:
    """Families for the size sweeps: same description as potentials, minus sites."""
    if not isinstance(obj, dict) or "family" not in obj:
        raise ValueError("family description must be an object with 'family'")
    kind = obj["family"]
    if kind == "nearest_neighbor_chain":
        return nearest_neighbor_chain_family(
            scalar_from_json(obj.get("F", {"name": "zero"})),
            scalar_from_json(obj["G"]),
        )
    if kind == "mean_field":
        return mean_field_family(
            scalar_from_json(obj["G"]),
            include_diagonal=obj.get("include_diagonal", True),
        )
    raise ValueError(f"unknown potential family {kind!r}")
