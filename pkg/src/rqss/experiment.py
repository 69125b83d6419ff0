"""JSON experiment configs and sweep execution."""
from __future__ import annotations

import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional, Union

import jsonschema

from .analytic import alpha_recursion
from .engine import SearchParams, run_search
from .gqsa import GqsaSpectrum, gqsa_performance
from .noise import ErrorConfig

RECORD_COLUMNS = ("n", "N", "epsilon", "delta", "nu", "seed", "omega_n_sim", "omega_n_model", "alpha_n_real",
                  "alpha_n_imag", "amp_iters", "success_prob", "total_steps", "max_orthogonality_residual",
                  "wall_ms")
GQSA_COLUMNS = ("N", "epsilon", "phi", "lambda1", "lambda2", "A", "B", "eta", "P_m", "q_m", "T_AKR")
SWEEP_NAMES = ("n", "epsilon", "delta", "Delta", "nu", "seed")

_number = {"type": "number"}
CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["mode"],
    "properties": {
        "mode": {"enum": ["recursive", "gqsa", "verify"]},
        "n": {"type": "integer", "minimum": 1},
        "target": {"type": ["array", "null"], "items": {"type": "integer", "minimum": 0},
                   "minItems": 2, "maxItems": 2},
        "errors": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"epsilon": _number, "delta": _number, "nu": {"type": "number", "minimum": 0},
                           "seed": {"type": "integer"}, "straddle": {"type": "boolean"},
                           "phase_errors": {"type": "boolean"}, "local_errors": {"type": "boolean"}},
        },
        "sweep": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["name", "values"],
                "properties": {"name": {"enum": list(SWEEP_NAMES)},
                               "values": {"type": "array", "minItems": 1, "items": _number}},
            },
        },
        "amplification": {"oneOf": [{"enum": ["auto", "scan"]}, {"type": "integer", "minimum": 0}]},
        "output": {"type": "string"},
        "fastpath": {"type": "boolean"},
        "workers": {"type": "integer", "minimum": 1},
        "level": {"enum": ["quick", "full"]},
        "spectrum": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {"kind": {"enum": ["grover", "synthetic", "csv"]},
                           "N": {"type": "number", "exclusiveMinimum": 1},
                           "lambda2": {"type": "number", "minimum": 0},
                           "lambda2_per_lnN": {"type": "number", "minimum": 0},
                           "asymmetry": {"type": "number", "minimum": -1, "maximum": 1},
                           "path": {"type": "string"}},
        },
    },
}


class ConfigError(ValueError):
    pass


@dataclass
class SweepAxis:
    name: str
    values: list


@dataclass
class ExperimentConfig:
    mode: str
    n: int = 2
    target: Optional[tuple[int, int]] = None
    errors: ErrorConfig = field(default_factory=ErrorConfig)
    sweep: list[SweepAxis] = field(default_factory=list)
    amplification: Union[str, int] = "auto"
    output: Optional[str] = None
    fastpath: bool = True
    workers: int = 1
    level: str = "quick"
    spectrum: Optional[dict] = None


def _check_finite(obj: Any, path: str = "$") -> None:
    if isinstance(obj, float) and not math.isfinite(obj):
        raise ConfigError(f"{path}: value must be finite, got {obj}")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _check_finite(v, f"{path}.{k}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _check_finite(v, f"{path}[{i}]")


def parse_config(doc: dict) -> ExperimentConfig:
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA)
    except jsonschema.ValidationError as err:
        raise ConfigError(f"{err.json_path}: {err.message}") from None
    _check_finite(doc)
    errors = ErrorConfig.from_json(doc.get("errors", {}))
    sweep = [SweepAxis(a["name"], list(a["values"])) for a in doc.get("sweep", [])]
    for i, ax in enumerate(sweep):
        if ax.name in ("n", "seed") and any(float(v) != int(v) for v in ax.values):
            raise ConfigError(f"$.sweep[{i}].values: {ax.name} values must be integers")
    target = doc.get("target")
    return ExperimentConfig(
        mode=doc["mode"], n=doc.get("n", 2), target=tuple(target) if target else None, errors=errors,
        sweep=sweep, amplification=doc.get("amplification", "auto"), output=doc.get("output"),
        fastpath=doc.get("fastpath", True), workers=doc.get("workers", 1), level=doc.get("level", "quick"),
        spectrum=doc.get("spectrum"),
    )


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: invalid JSON ({err})") from None
    return parse_config(doc)


def sweep_points(config: ExperimentConfig) -> list[dict]:
    """Cartesian product of the sweep axes, first axis slowest, in config order."""
    if not config.sweep:
        return [{}]
    names = [a.name for a in config.sweep]
    return [dict(zip(names, combo)) for combo in itertools.product(*(a.values for a in config.sweep))]


def _point_params(config: ExperimentConfig, point: dict) -> SearchParams:
    n = int(point.get("n", config.n))
    err = config.errors
    updates = {}
    for k in ("epsilon", "delta", "nu"):
        if k in point:
            updates[k] = float(point[k])
    if "Delta" in point:
        updates["epsilon"] = updates["delta"] = float(point["Delta"])
    if "seed" in point:
        updates["seed"] = int(point["seed"])
    err = replace(err, **updates)
    return SearchParams(n, config.target if "n" not in point else None, err, config.amplification, config.fastpath)


def run_point(config: ExperimentConfig, point: dict) -> dict:
    start = time.perf_counter()
    params = _point_params(config, point)
    res = run_search(params)
    wall_ms = (time.perf_counter() - start) * 1e3
    e = params.errors
    alpha_n = res.trace.alpha[params.n - 1]
    model = alpha_recursion(params.n, e.epsilon, e.delta)
    return {
        "n": params.n, "N": params.geometry.N, "epsilon": e.epsilon, "delta": e.delta, "nu": e.nu, "seed": e.seed,
        "omega_n_sim": abs(alpha_n) ** 2, "omega_n_model": float(model.omega[-1]),
        "alpha_n_real": alpha_n.real, "alpha_n_imag": alpha_n.imag, "amp_iters": res.iterations,
        "success_prob": res.success_probability, "total_steps": res.total_steps,
        "max_orthogonality_residual": res.trace.max_residual, "wall_ms": wall_ms,
    }


def build_spectrum(spec: dict) -> tuple[GqsaSpectrum, float]:
    kind = spec["kind"]
    if kind == "csv":
        if "path" not in spec:
            raise ConfigError("$.spectrum.path: required for kind 'csv'")
        sp = GqsaSpectrum.from_csv(spec["path"])
        return sp, spec.get("N", 1 / sp.weight[sp.s_index])
    if "N" not in spec:
        raise ConfigError(f"$.spectrum.N: required for kind {kind!r}")
    N = spec["N"]
    if kind == "grover":
        return GqsaSpectrum.grover(N), N
    lam2 = spec.get("lambda2")
    if lam2 is None:
        lam2 = spec.get("lambda2_per_lnN", 1.0) * math.log(N)
    return GqsaSpectrum.synthetic(N, lam2, spec.get("asymmetry", 0.0)), N


def run_gqsa(config: ExperimentConfig, spectrum: Optional[GqsaSpectrum] = None, N: Optional[float] = None) -> list[dict]:
    if spectrum is None:
        if config.spectrum is None:
            raise ConfigError("$.spectrum: required for mode 'gqsa' without --spectrum")
        spectrum, N = build_spectrum(config.spectrum)
    N = N if N is not None else 1 / spectrum.weight[spectrum.s_index]
    eps_values = [0.0]
    for ax in config.sweep:
        if ax.name != "epsilon":
            raise ConfigError(f"gqsa mode sweeps only 'epsilon', got {ax.name!r}")
        eps_values = ax.values
    rows = []
    for eps in eps_values:
        rep = gqsa_performance(spectrum, math.pi + float(eps), N)
        rows.append({"N": N, "epsilon": float(eps), "phi": rep.phi, "lambda1": rep.lambda1, "lambda2": rep.lambda2,
                     "A": rep.A, "B": rep.B, "eta": rep.eta, "P_m": rep.P_m, "q_m": rep.q_m, "T_AKR": rep.T})
    return rows


def run_experiment(config: ExperimentConfig, output: Optional[Union[str, Path]] = None) -> list[dict]:
    """Run every sweep point; rows are written to ``output`` in config order."""
    from .report import CsvAppender

    if config.mode == "gqsa":
        rows = run_gqsa(config)
        if output:
            with CsvAppender(output, GQSA_COLUMNS) as out:
                for r in rows:
                    out.append(r)
        return rows
    if config.mode != "recursive":
        raise ConfigError(f"$.mode: run_experiment handles 'recursive' and 'gqsa', got {config.mode!r}")
    points = sweep_points(config)
    for p in points:  # fail fast on guard/validation errors before any work
        _point_params(config, p)
    out = CsvAppender(output, RECORD_COLUMNS) if output else None
    records = []
    try:
        if config.workers > 1 and len(points) > 1:
            with ProcessPoolExecutor(config.workers) as pool:
                results = pool.map(run_point, itertools.repeat(config), points)
                for rec in results:
                    records.append(rec)
                    if out:
                        out.append(rec)
        else:
            for p in points:
                rec = run_point(config, p)
                records.append(rec)
                if out:
                    out.append(rec)
    finally:
        if out:
            out.close()
    return records
