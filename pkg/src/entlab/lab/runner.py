"""Run experiments and persist their results.

Each run writes ``<out>/<experiment>-<seed>.csv`` (data) and
``<out>/<experiment>-<seed>.meta.json`` (config echo, references, timing).
The CSV depends only on the configuration and the seed; timing and
environment details go to the metadata file.
"""

import csv
import json
import math
import os
import time
from pathlib import Path

import numpy as np

from .. import __version__, kernels
from ..errors import CapabilityError, ConvergenceError, InvalidInputError
from ..rng import GENERATOR_INFO, SUBSTREAM_VERSION
from .config import ConfigError, ExperimentConfig, parse_config
from .experiments import REGISTRY

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CAPABILITY = 3
EXIT_NONCONVERGED = 4

# closed-form reference columns, recorded in metadata
REFERENCE_COLUMNS = {"closed_form", "page_formula", "lower_bound", "mp_density", "bound", "chain_purity",
                     "mp_quantile", "formula_value", "formula_density"}


def _as_config(config):
    if isinstance(config, ExperimentConfig):
        return config
    return parse_config(config)


def validate(config, seed=None, samples=None):
    """Schema diagnostics for a config (text or parsed); never raises."""
    try:
        cfg = _as_config(config)
    except ConfigError as exc:
        return [str(exc)]
    diags = []
    exp = REGISTRY.get(cfg.experiment)
    if exp is None:
        return [f"experiment: unknown {cfg.experiment!r}; known: {', '.join(sorted(REGISTRY))}"]
    if cfg.seed is None and seed is None:
        diags.append("seed: missing")
    n = samples if samples is not None else cfg.n_samples
    if n is None:
        diags.append("n_samples: missing")
    elif n < 2:
        diags.append("n_samples: must be >= 2")
    for name in sorted(set(cfg.params) - set(exp.params)):
        diags.append(f"{name}: unknown parameter")
    for name, spec in exp.params.items():
        if name in cfg.params:
            try:
                spec.parse(name, cfg.params[name])
            except InvalidInputError as exc:
                diags.append(str(exc))
        elif spec.required:
            diags.append(f"{name}: missing")
    return diags


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    return obj


def write_csv(path, columns, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def resolve_threads(threads=None):
    if threads is None:
        env = os.environ.get("LAB_THREADS", "")
        threads = int(env) if env.strip() else 1
    return max(1, int(threads))


def run(config, seed=None, samples=None, out=None, threads=None):
    """Execute a config; returns ``(exit_code, message, paths)``.

    ``seed``, ``samples`` and ``out`` override the config file. Nothing is
    written on a usage error.
    """
    try:
        cfg = _as_config(config)
    except ConfigError as exc:
        return EXIT_USAGE, str(exc), []
    diags = validate(cfg, seed=seed, samples=samples)
    if diags:
        return EXIT_USAGE, "; ".join(diags), []
    exp = REGISTRY[cfg.experiment]
    params = exp.resolve(cfg.params)
    seed = cfg.seed if seed is None else int(seed)
    n_samples = cfg.n_samples if samples is None else int(samples)
    out_dir = Path(out if out is not None else cfg.output_path)
    threads = resolve_threads(threads)

    start = time.perf_counter()
    try:
        table = exp.fn(params, n_samples, seed, threads)
    except InvalidInputError as exc:
        return EXIT_USAGE, str(exc), []
    except CapabilityError as exc:
        return EXIT_CAPABILITY, str(exc), []
    except ConvergenceError as exc:
        return EXIT_NONCONVERGED, str(exc), []
    wall = time.perf_counter() - start

    out_dir.mkdir(parents=True, exist_ok=True)
    stem = out_dir / f"{cfg.experiment}-{seed}"
    csv_path, meta_path = Path(f"{stem}.csv"), Path(f"{stem}.meta.json")
    write_csv(csv_path, table.columns, table.rows)
    meta = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "experiment": cfg.experiment,
        "config_text": cfg.text,
        "config": {"params": cfg.params, "seed": cfg.seed, "n_samples": cfg.n_samples,
                   "output_path": cfg.output_path},
        "overrides": {"seed": seed if seed != cfg.seed else None,
                      "n_samples": n_samples if n_samples != cfg.n_samples else None,
                      "out": str(out) if out is not None else None},
        "resolved_params": params,
        "seed": seed,
        "n_samples": n_samples,
        "threads": threads,
        "rng": dict(GENERATOR_INFO, substream_version=SUBSTREAM_VERSION),
        "kernel_backend": kernels.BACKEND,
        "columns": table.columns,
        "closed_form_reference_columns": [c for c in table.columns if c in REFERENCE_COLUMNS],
        "results": table.meta,
        "status": table.status,
        "partial": table.status != "ok",
        "wall_time_s": wall,
    }
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(meta), fh, indent=2)
        fh.write("\n")
    code = EXIT_OK if table.status == "ok" else EXIT_NONCONVERGED
    return code, table.status, [csv_path, meta_path]
