"""Command-line entry point: estimation, oracle, verification, experiments.

One JSON document (inline or a file path) configures each subcommand.  All
defaults are materialized into the config echoed next to the results, numeric
output is serialized with 17 significant digits, files are written atomically,
and reruns of the same config are byte-identical at any worker count;
timestamps live in an optional metadata block.

Exit codes: 0 success, 1 configuration error, 2 numerical failure (decay,
divergence, aliasing, support), 3 bound violation from the verify suites.
"""

from __future__ import annotations

import argparse
import copy
import datetime
import json
import math
import os
import sys

import jsonschema
import numpy as np

from . import __version__
from .bounds import (
    DivergentIntegralError,
    check_l1_bound,
    check_linf,
    check_mixed_derivative_bound,
    check_xi_derivative_bounds,
    class_membership,
)
from .brownian import (
    VariancePreset,
    abs_moment_constant,
    absolute_moment_product,
    sample_path_batch,
)
from .commutator import (
    AliasingError,
    commutator_trace,
    gaussian_state_symbol,
    op_weyl_matrix,
    scaling_fit,
)
from .faadibruno import mixed_derivative_bound
from .multiindex import MultiIndex, from_text
from .oracle import (
    DecayError,
    Grid,
    GridOracle,
    SupportError,
    matrix_weyl_symbol,
    pairing_check,
)
from .potentials import (
    family_from_json,
    harmonic_function,
    lorentzian_function,
    gaussian_bump_function,
    NearestNeighborPotential,
    potential_from_json,
    zero_function,
)
from .symbol_estimator import (
    PhasePoint,
    estimate_mixed_derivative,
    estimate_u,
    estimate_xi_derivative,
)

WORKERS_ENV = "WEYLFK_WORKERS"


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# deterministic serialization

def format_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        raise ValueError("NaN in output")
    if math.isinf(x):
        return "1e999" if x > 0 else "-1e999"  # round-trips to infinity
    return format(x, ".17g")


def dumps(obj, indent=0) -> str:
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, float, np.integer, np.floating)):
        return format_number(obj)
    if isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            return "[]"
        body = ",\n".join(inner + dumps(v, indent + 2) for v in items)
        return "[\n" + body + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(
            f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 2)}"
            for k, v in obj.items()
        )
        return "{\n" + body + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_atomic(path: str, text: str):
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_csv(path: str, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_number(v) for v in row))
    write_atomic(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# schemas

_SCALAR_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "amplitude": {"type": "number"},
        "width": {"type": "number"},
    },
    "required": ["name"],
    "additionalProperties": False,
}

_POTENTIAL_SCHEMA = {
    "type": "object",
    "properties": {
        "variant": {"enum": ["zero", "nearest_neighbor", "mean_field"]},
        "sites": {"type": "array"},
        "d": {"type": "integer", "minimum": 1},
        "F": _SCALAR_SCHEMA,
        "G": _SCALAR_SCHEMA,
        "include_diagonal": {"type": "boolean"},
    },
    "required": ["variant", "sites"],
    "additionalProperties": False,
}

_FAMILY_SCHEMA = {
    "type": "object",
    "properties": {
        "family": {"enum": ["nearest_neighbor_chain", "mean_field"]},
        "F": _SCALAR_SCHEMA,
        "G": _SCALAR_SCHEMA,
        "include_diagonal": {"type": "boolean"},
    },
    "required": ["family", "G"],
    "additionalProperties": False,
}

_GRID_SCHEMA = {
    "type": "object",
    "properties": {
        "half_width": {"type": "number", "exclusiveMinimum": 0, "default": 10.0},
        "n_grid": {"type": "integer", "minimum": 16, "default": 512},
        "dim": {"enum": [1, 2], "default": 1},
    },
    "additionalProperties": False,
    "default": {},
}

_PRESET_SCHEMA = {
    "enum": ["standard_wiener", "generator_laplacian"],
    "default": "generator_laplacian",
}

_OUTPUT_PROPS = {
    "output": {"type": ["string", "null"], "default": None},
    "csv_output": {"type": ["string", "null"], "default": None},
    "emit_metadata": {"type": "boolean", "default": True},
}

SCHEMAS = {
    "estimate": {
        "type": "object",
        "properties": {
            "potential": _POTENTIAL_SCHEMA,
            "x": {"type": "array", "items": {"type": "number"}},
            "xi": {"type": "array", "items": {"type": "number"}},
            "t": {"type": "number", "exclusiveMinimum": 0},
            "alpha": {"type": "string", "default": ""},
            "beta": {"type": "string", "default": ""},
            "h": {"type": ["number", "null"], "default": None},
            "n_paths": {"type": "integer", "minimum": 2, "default": 20000},
            "n_steps": {"type": "integer", "minimum": 1, "default": 32},
            "seed": {"type": "integer"},
            "preset": _PRESET_SCHEMA,
            "chunk_size": {"type": "integer", "minimum": 1, "default": 4096},
            "xi_sweep": {
                "type": ["object", "null"],
                "default": None,
                "properties": {
                    "site_index": {"type": "integer", "minimum": 0},
                    "start": {"type": "number"},
                    "stop": {"type": "number"},
                    "count": {"type": "integer", "minimum": 2},
                },
                "required": ["site_index", "start", "stop", "count"],
                "additionalProperties": False,
            },
            **_OUTPUT_PROPS,
        },
        "required": ["potential", "x", "xi", "t", "seed"],
        "additionalProperties": False,
    },
    "moments": {
        "type": "object",
        "properties": {
            "beta": {"type": "string"},
            "t": {"type": "number", "exclusiveMinimum": 0},
            "preset": _PRESET_SCHEMA,
            "n_paths": {"type": "integer", "minimum": 2, "default": 100000},
            "seed": {"type": "integer"},
            **_OUTPUT_PROPS,
        },
        "required": ["beta", "t", "seed"],
        "additionalProperties": False,
    },
    "oracle": {
        "type": "object",
        "properties": {
            "potential": _POTENTIAL_SCHEMA,
            "grid": _GRID_SCHEMA,
            "t": {"type": "number", "exclusiveMinimum": 0},
            "region": {
                "type": ["string", "number"],
                "default": "auto",
            },
            **_OUTPUT_PROPS,
        },
        "required": ["potential", "t"],
        "additionalProperties": False,
    },
    "bound": {
        "type": "object",
        "properties": {
            "alpha": {"type": "string", "default": ""},
            "beta": {"type": "string", "default": ""},
            "m": {"type": "integer", "minimum": 0},
            "t": {"type": "number", "exclusiveMinimum": 0},
            "c_m": {"type": "number", "minimum": 0},
            "preset": _PRESET_SCHEMA,
            **_OUTPUT_PROPS,
        },
        "required": ["m", "t", "c_m"],
        "additionalProperties": False,
    },
    "verify": {
        "type": "object",
        "properties": {
            "suite": {"enum": ["linf", "xi-deriv", "l1", "mixed-deriv", "class"]},
            "seed": {"type": "integer"},
            "preset": _PRESET_SCHEMA,
            "n_points": {"type": "integer", "minimum": 1, "default": 40},
            "n_paths": {"type": "integer", "minimum": 2, "default": 4096},
            "n_steps": {"type": "integer", "minimum": 1, "default": 24},
            "t": {"type": "number", "exclusiveMinimum": 0, "default": 0.5},
            "betas": {
                "type": "array",
                "items": {"type": "string"},
                "default": ["0:1", "0:2"],
            },
            "potential": {**_POTENTIAL_SCHEMA, "required": []},
            "family": _FAMILY_SCHEMA,
            "m": {"type": "integer", "minimum": 1, "default": 1},
            "alpha": {"type": "string", "default": "0:1"},
            "beta": {"type": "string", "default": ""},
            "lambda_sizes": {
                "type": "array",
                "items": {"type": "integer", "minimum": 1},
                "default": [2, 4, 8],
            },
            "lambda_size": {"type": "integer", "minimum": 2, "default": 4},
            "xi": {"type": "array", "items": {"type": "number"},
                   "default": [-2.0, -1.0, 0.0, 1.0, 2.0]},
            "grid": _GRID_SCHEMA,
            **_OUTPUT_PROPS,
        },
        "required": ["suite", "seed"],
        "additionalProperties": False,
    },
    "commutator": {
        "type": "object",
        "properties": {
            "potential": _POTENTIAL_SCHEMA,
            "grid": _GRID_SCHEMA,
            "poly": {
                "type": "array",
                "items": {"type": "number"},
                "maxItems": 5,
                "default": [0.0, 1.0],
            },
            "site_axis": {"type": "integer", "minimum": 0, "default": 0},
            "state": {
                "type": "object",
                "properties": {
                    "center_x": {"type": "array", "items": {"type": "number"}},
                    "center_xi": {"type": "array", "items": {"type": "number"}},
                    "width_x": {"type": "array", "items": {"type": "number"}},
                    "width_xi": {"type": "array", "items": {"type": "number"}},
                },
                "required": ["center_x", "center_xi", "width_x", "width_xi"],
                "additionalProperties": False,
            },
            "t_list": {
                "type": "array",
                "items": {"type": "number", "exclusiveMinimum": 0},
                "minItems": 1,
                "default": [0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0],
            },
            **_OUTPUT_PROPS,
        },
        "required": ["potential", "state"],
        "additionalProperties": False,
    },
}


def apply_defaults(schema: dict, config):
    """Materialize schema defaults into a copy of the config."""
    if schema.get("type") == "object" and isinstance(config, dict):
        out = dict(config)
        for key, sub in schema.get("properties", {}).items():
            if key in out:
                out[key] = apply_defaults(sub, out[key])
            elif "default" in sub:
                out[key] = apply_defaults(sub, copy.deepcopy(sub["default"]))
        return out
    return config


def load_config(text_or_path: str) -> dict:
    text = text_or_path.strip()
    if not text.startswith("{"):
        if not os.path.exists(text):
            raise ConfigError(f"config file not found: {text}")
        with open(text) as fh:
            text = fh.read()
    try:
        config = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}") from err
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    return config


def validate_config(subcommand: str, config: dict) -> dict:
    schema = SCHEMAS[subcommand]
    resolved = apply_defaults(schema, config)
    try:
        jsonschema.validate(resolved, schema)
    except jsonschema.ValidationError as err:
        field = err.json_path if err.json_path != "$" else "$ (top level)"
        raise ConfigError(f"invalid config at {field}: {err.message}") from err
    return resolved


def _preset(config) -> VariancePreset:
    return VariancePreset[config["preset"].upper()]


def _parse_index(text: str, what: str) -> MultiIndex:
    try:
        return from_text(text)
    except (ValueError, TypeError) as err:
        raise ConfigError(f"invalid {what} multi-index {text!r}: {err}") from err


def _build_potential(obj) -> "PotentialSpec":
    try:
        return potential_from_json(obj)
    except (ValueError, TypeError, KeyError) as err:
        raise ConfigError(f"invalid potential: {err}") from err


def _grid(config) -> Grid:
    g = config["grid"]
    try:
        return Grid(g["half_width"], g["n_grid"], g["dim"])
    except ValueError as err:
        raise ConfigError(f"invalid grid: {err}") from err


# ---------------------------------------------------------------------------
# subcommands

def cmd_estimate(config, n_workers):
    V = _build_potential(config["potential"])
    alpha = _parse_index(config["alpha"], "alpha")
    beta = _parse_index(config["beta"], "beta")
    point = PhasePoint(np.array(config["x"]), np.array(config["xi"]))
    preset = _preset(config)
    kwargs = dict(
        n_paths=config["n_paths"], n_steps=config["n_steps"],
        seed=config["seed"], variance=preset,
        chunk_size=config["chunk_size"], n_workers=n_workers,
    )
    est = estimate_mixed_derivative(
        V, point, config["t"], alpha, beta, h=config["h"], **kwargs
    )
    results = {
        "value_re": est.value.real,
        "value_im": est.value.imag,
        "stderr": est.stderr,
        "n_paths": est.n_paths,
        "n_steps": est.n_steps,
        "preset": est.variance_preset,
        "t": est.t,
    }
    csv = None
    sweep = config["xi_sweep"]
    if sweep is not None:
        if sweep["site_index"] >= V.n_sites:
            raise ConfigError("xi_sweep.site_index out of range")
        rows = []
        grid_vals = np.linspace(sweep["start"], sweep["stop"], sweep["count"])
        for v in grid_vals:
            xi = np.array(config["xi"], dtype=float)
            xi[sweep["site_index"]] = v
            e = estimate_mixed_derivative(
                V, PhasePoint(np.array(config["x"]), xi), config["t"],
                alpha, beta, h=config["h"], **kwargs
            )
            rows.append((v, e.value.real, e.value.imag, e.stderr))
        csv = (["xi", "value_re", "value_im", "stderr"], rows)
    return results, csv, 0


def cmd_moments(config, n_workers):
    beta = _parse_index(config["beta"], "beta")
    preset = _preset(config)
    t = config["t"]
    exact = absolute_moment_product(beta, t, preset)
    sites = beta.support
    rng = np.random.default_rng(np.random.SeedSequence(config["seed"]))
    n = config["n_paths"]
    paths = sample_path_batch(rng, n, t, 1, max(len(sites), 1), preset)
    endpoint = paths[:, -1, :]
    orders = np.array([beta.get(s) for s in sites], dtype=int)
    if sites:
        samples = np.prod(np.abs(endpoint[:, : len(sites)]) ** orders, axis=1)
    else:
        samples = np.ones(n)
    mean = float(samples.mean())
    stderr = float(samples.std(ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    results = {
        "beta": beta.to_text(),
        "exact": exact,
        "sample_mean": mean,
        "sample_stderr": stderr,
        "deviation_in_stderr": abs(mean - exact) / stderr if stderr else 0.0,
        "per_order_constants": {
            str(order): abs_moment_constant(order) for order in sorted(set(orders))
        },
        "preset": preset.tag,
    }
    return results, None, 0


def cmd_oracle(config, n_workers):
    V = _build_potential(config["potential"])
    grid = _grid(config)
    oracle = GridOracle(V, grid)
    t = config["t"]
    S = oracle.semigroup(t)
    table = oracle.symbol(t) if config["region"] == "auto" else (
        oracle.symbol(t, region=config["region"])
    )
    full = matrix_weyl_symbol(S.matrix, grid, region="full")
    dxi = table.xi_cell_volume
    symbol_integral = float(
        (full.values.real.sum()) * table.cell_volume * dxi / (2 * math.pi) ** grid.dim
    )
    # normalized Gaussian test functions for the pairing identity
    pts = grid.points()
    f = np.exp(-0.5 * (pts**2).sum(axis=1))
    f /= math.sqrt((np.abs(f) ** 2).sum() * table.cell_volume)
    g = np.exp(-0.5 * ((pts - 0.3) ** 2).sum(axis=1))
    g /= math.sqrt((np.abs(g) ** 2).sum() * table.cell_volume)
    residual = pairing_check(S, f, g)
    results = {
        "t": t,
        "trace": float(np.trace(S.matrix)),
        "symbol_integral": symbol_integral,
        "max_abs_symbol": float(np.abs(table.values).max()),
        "max_imag_symbol": table.max_imag,
        "pairing_residual": residual,
        "n_centers": int(table.values.shape[0]),
    }
    csv = None
    if grid.dim == 1:
        rows = [
            (x, xi, table.values[i, k])
            for i, x in enumerate(table.x)
            for k, xi in enumerate(table.xi)
        ]
        csv = (["x", "xi", "u"], rows)
    return results, csv, 0


def cmd_bound(config, n_workers):
    alpha = _parse_index(config["alpha"], "alpha")
    beta = _parse_index(config["beta"], "beta")
    preset = _preset(config)
    value = mixed_derivative_bound(
        alpha, beta, config["m"], config["t"], config["c_m"], preset
    )
    results = {
        "bound": value,
        "alpha": alpha.to_text(),
        "beta": beta.to_text(),
        "m": config["m"],
        "t": config["t"],
        "c_m": config["c_m"],
        "preset": preset.tag,
    }
    return results, None, 0


def _default_sweep_potentials():
    harmonic = NearestNeighborPotential(
        1, [(0,)], harmonic_function(), zero_function()
    )
    lorentz = NearestNeighborPotential(
        1, [(0,)], lorentzian_function(), zero_function()
    )
    chain2 = NearestNeighborPotential(
        1, [(0,), (1,)], gaussian_bump_function(), lorentzian_function(2.0, 2.0)
    )
    return [("harmonic", harmonic), ("lorentzian", lorentz), ("chain2", chain2)]


def cmd_verify(config, n_workers):
    suite = config["suite"]
    preset = _preset(config)
    seed = config["seed"]
    reports = []
    extra_results = {}
    if suite == "linf":
        estimates = []
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        potentials = _default_sweep_potentials()
        for k in range(config["n_points"]):
            _, V = potentials[k % len(potentials)]
            point = PhasePoint(
                rng.uniform(-2, 2, V.n_sites), rng.uniform(-2, 2, V.n_sites)
            )
            t = float(rng.uniform(0.1, 1.0))
            estimates.append(estimate_u(
                V, point, t, config["n_paths"], config["n_steps"],
                seed + k, variance=preset, n_workers=n_workers,
            ))
        reports.append(check_linf(estimates))
    elif suite == "xi-deriv":
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        t = config["t"]
        if "potential" in config:
            V = _build_potential(config["potential"])
        else:
            V = NearestNeighborPotential(
                1, [(0,)], lorentzian_function(), zero_function()
            )
        for text in config["betas"]:
            beta_slots = _parse_index(text, "beta")
            beta = MultiIndex.of(
                {V.sites[s]: k for s, k in beta_slots.entries}
            )
            estimates = []
            for k in range(config["n_points"]):
                point = PhasePoint(
                    rng.uniform(-2, 2, V.n_sites), rng.uniform(-2, 2, V.n_sites)
                )
                estimates.append(estimate_xi_derivative(
                    V, point, t, beta, config["n_paths"], config["n_steps"],
                    seed + 31 * k, variance=preset, n_workers=n_workers,
                ))
            reports.extend(check_xi_derivative_bounds(estimates, beta, t, preset))
    elif suite == "l1":
        if "potential" in config:
            V = _build_potential(config["potential"])
        else:
            V = NearestNeighborPotential(
                1, [(0,)], harmonic_function(), zero_function()
            )
        reports.append(check_l1_bound(V, config["t"], config["xi"], _grid(config)))
    elif suite == "mixed-deriv":
        family = _family(config)
        reports.extend(check_mixed_derivative_bound(
            family, config["m"], config["t"],
            _parse_index(config["alpha"], "alpha"),
            _parse_index(config["beta"], "beta"),
            config["lambda_sizes"], config["n_paths"], config["n_steps"],
            seed, variance=preset, n_workers=n_workers,
        ))
        bound_values = [r.extra["bound"] for r in reports]
        extra_results["bound_values"] = bound_values
        extra_results["bound_is_size_independent"] = bool(
            max(bound_values) == min(bound_values)
        )
    elif suite == "class":
        family = _family(config)
        params, class_reports = class_membership(
            family, config["m"], config["t"], config["n_paths"],
            config["n_steps"], seed, variance=preset,
            lambda_size=config["lambda_size"], n_workers=n_workers,
        )
        reports.extend(class_reports)
        extra_results["class_params"] = {
            "max_norm": params.max_norm,
            "rho": list(params.rho),
            "delta": list(params.delta),
            "m": params.m,
        }
    results = {
        "suite": suite,
        "reports": [r.to_json() for r in reports],
        "violations": sum(r.violation for r in reports),
        **extra_results,
    }
    code = 3 if any(r.violation for r in reports) else 0
    return results, None, code


def _family(config):
    if "family" not in config:
        raise ConfigError("this suite requires a 'family' entry")
    try:
        return family_from_json(config["family"])
    except (ValueError, TypeError, KeyError) as err:
        raise ConfigError(f"invalid family: {err}") from err


def cmd_commutator(config, n_workers):
    V = _build_potential(config["potential"])
    grid = _grid(config)
    state_cfg = config["state"]
    state = gaussian_state_symbol(
        grid, state_cfg["center_x"], state_cfg["center_xi"],
        state_cfg["width_x"], state_cfg["width_xi"],
    )
    oracle = GridOracle(V, grid)
    op = op_weyl_matrix(state, grid)
    rows = []
    traces = []
    for t in config["t_list"]:
        r = commutator_trace(
            config["poly"], config["site_axis"], V, t, state, grid,
            oracle=oracle, op_matrix=op,
        )
        traces.append(r)
        rows.append((t, r.trace_matrix, r.trace_symbol, r.symbol_sup))
    fit = None
    values = [(r.t, r.trace_matrix) for r in traces]
    try:
        fit_result = scaling_fit(values)
        fit = {
            "slope": fit_result.slope,
            "coefficient": fit_result.coefficient,
            "n_points": fit_result.n_points,
        }
    except ValueError:
        pass
    results = {
        "state_trace": traces[0].state_trace if traces else None,
        "points": [
            {
                "t": r.t,
                "trace_matrix": r.trace_matrix,
                "trace_symbol": r.trace_symbol,
                "route_gap": r.route_gap,
                "symbol_sup": r.symbol_sup,
                "axis_residual": r.axis_residual,
            }
            for r in traces
        ],
        "fit": fit,
    }
    csv_rows = [
        (t, tm, ts, sup, (fit["coefficient"] * math.sqrt(t)) if fit else 0.0)
        for (t, tm, ts, sup) in rows
    ]
    csv = (["t", "trace_matrix", "trace_symbol", "symbol_sup", "sqrt_bound"], csv_rows)
    return results, csv, 0


COMMANDS = {
    "estimate": cmd_estimate,
    "moments": cmd_moments,
    "oracle": cmd_oracle,
    "bound": cmd_bound,
    "verify": cmd_verify,
    "commutator": cmd_commutator,
}


def run_config(subcommand: str, config: dict, n_workers: int = 1):
    """Validate, dispatch, and write artifacts; returns (exit code, output doc)."""
    resolved = validate_config(subcommand, config)
    # the resolved echo must itself validate
    jsonschema.validate(resolved, SCHEMAS[subcommand])
    results, csv, code = COMMANDS[subcommand](resolved, n_workers)
    doc = {"subcommand": subcommand, "config": resolved, "results": results}
    if resolved.get("emit_metadata", True):
        doc["metadata"] = {
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "version": __version__,
        }
    text = dumps(doc) + "\n"
    if resolved.get("output"):
        write_atomic(resolved["output"], text)
    if csv is not None and resolved.get("csv_output"):
        write_csv(resolved["csv_output"], csv[0], csv[1])
    return code, doc


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="weylfk",
        description="Path-integral phase-space symbols of semigroups, "
                    "with oracle checks and bound verification",
    )
    parser.add_argument(
        "--workers", type=int,
        default=int(os.environ.get(WORKERS_ENV, "1")),
        help="worker threads for chunked estimation (results do not depend on this)",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", help="JSON config: inline document or file path")
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        code, doc = run_config(args.subcommand, config, max(1, args.workers))
        print(dumps(doc))
        return code
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    except (DecayError, DivergentIntegralError, AliasingError, SupportError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
