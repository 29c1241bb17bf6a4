"""Config-driven experiment runner.

    gecmv list-models
    gecmv validate --config cfg.json
    gecmv run --config cfg.json --out results/ [--threads N] [--seed S]

Exit codes: 0 success, 2 config error, 3 numeric failure, 4 resource cap.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .analysis import (GroupElement, delta_estimate, ipr_diagnostics, js_criterion, lyapunov_grid,
                       reflectivity_scan, spectral_grid, uamo_group)
from .cocycle import CocycleError, appendix_identity_check, propagate, wronskian_drift
from .models import MODEL_SCHEMAS, ModelError, sequence_from_spec
from .operator import MAX_DENSE_SITES, WindowError, truncate_unitary

log = logging.getLogger("gecmv")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CAP = 0, 2, 3, 4
MAX_STEPS = 10**7
MAX_GRID = 1 << 16
MAX_DELTA_N = 10**7

_num = {"type": "number"}
_int = {"type": "integer"}
_cplx = {"oneOf": [_num, {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}]}
_window = {"type": "array", "items": _int, "minItems": 2, "maxItems": 2}
_group = {"type": "object", "additionalProperties": False, "required": ["torus"],
          "properties": {"torus": {"type": "array", "items": {"type": ["number", "string"]}},
                         "cyclic": _int, "q": {"type": "integer", "minimum": 1}}}


def _obj(props, required=()):
    return {"type": "object", "additionalProperties": False, "properties": props, "required": list(required)}


MODEL_SCHEMA = _obj({
    "model": {"enum": sorted(MODEL_SCHEMAS)},
    "params": {"type": "object"},
    "rho_convention": {"enum": ["standard", "complex"]},
    "window": _window,
}, ["model"])

TASK_SCHEMAS = {
    "lyapunov": _obj({"grid": {"type": "integer", "minimum": 1}, "n": {"type": "integer", "minimum": 1},
                      "samples": {"type": "integer", "minimum": 1}, "start": _int}, ["grid", "n"]),
    "reflectivity": _obj({"B": {"type": "array", "items": _num, "minItems": 1},
                          "zetas": {"type": "array", "items": _num, "minItems": 1},
                          "data_window": _window}, ["B", "zetas"]),
    "delta": _obj({"beta": _group, "omega": _group, "nmax": {"type": "integer", "minimum": 1},
                   "nmin": {"type": "integer", "minimum": 1}, "dps": {"type": "integer", "minimum": 15}},
                  ["nmax"]),
    "criterion": _obj({"B": _num, "B_err": _num, "n": {"type": "integer", "minimum": 1},
                       "grid": {"type": "integer", "minimum": 1}, "samples": {"type": "integer", "minimum": 1},
                       "spectral_window": _window}, ["B", "n", "grid"]),
    "ipr": _obj({"window": _window}, ["window"]),
    "spectrum": _obj({"window": _window}, ["window"]),
    "wronskian-drift": _obj({"z": _cplx, "m": {"type": "integer", "minimum": 1}, "B": _num,
                             "radius": {"type": "integer", "minimum": 1}}, ["z", "m", "B"]),
    "identity-check": _obj({"trials": {"type": "integer", "minimum": 1},
                            "m_max": {"type": "integer", "minimum": 1},
                            "n_max": {"type": "integer", "minimum": 1}}, ["trials"]),
}

CONFIG_SCHEMA = _obj({
    "model": MODEL_SCHEMA,
    "task": {"enum": sorted(TASK_SCHEMAS)},
    "params": {"type": "object"},
    "output": _obj({"path": {"type": "string", "minLength": 1}, "format": {"enum": ["csv", "json"]}}, ["path"]),
    "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
}, ["model", "task", "params", "output"])

RANDOMIZED_TASKS = {"identity-check"}


class ConfigError(Exception):
    pass


class ResourceCap(Exception):
    pass


def validate_config(cfg) -> list[str]:
    """Schema errors as 'path: message' strings (empty when valid)."""
    errors = []
    v = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    for e in sorted(v.iter_errors(cfg), key=lambda e: list(e.path)):
        errors.append(f"{'/'.join(map(str, e.path)) or '<root>'}: {e.message}")
    if errors:
        return errors
    tv = jsonschema.Draft202012Validator(TASK_SCHEMAS[cfg["task"]])
    for e in sorted(tv.iter_errors(cfg["params"]), key=lambda e: list(e.path)):
        errors.append(f"params/{'/'.join(map(str, e.path))}: {e.message}".replace("params/: ", "params: "))
    if errors:
        return errors
    try:
        sequence_from_spec(cfg["model"])
    except (ModelError, TypeError, KeyError, ValueError) as exc:
        errors.append(f"model: {exc}")
    return errors


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    errors = validate_config(cfg)
    if errors:
        raise ConfigError("; ".join(errors))
    return cfg


# ---------------------------------------------------------------- tasks

def _cap(cond, msg):
    if cond:
        raise ResourceCap(msg)


def _chunks(zs, threads):
    k = max(1, min(threads, len(zs)))
    return [c for c in np.array_split(zs, k) if len(c)]


def _lyap(seq, zs, n, samples, start, threads):
    chunks = _chunks(zs, threads)
    if len(chunks) == 1:
        return lyapunov_grid(seq, zs, n, samples, start)
    with ThreadPoolExecutor(len(chunks)) as ex:
        parts = ex.map(lambda c: lyapunov_grid(seq, c, n, samples, start), chunks)
    return [e for part in parts for e in part]


def _unit_grid(count):
    return np.exp(2j * np.pi * np.arange(count) / count)


def task_lyapunov(seq, p, threads, rng):
    _cap(p["n"] * p.get("samples", 1) > MAX_STEPS, f"n * samples exceeds {MAX_STEPS}")
    _cap(p["grid"] > MAX_GRID, f"grid exceeds {MAX_GRID}")
    est = _lyap(seq, _unit_grid(p["grid"]), p["n"], p.get("samples", 1), p.get("start", 0), threads)
    return ["z_re", "z_im", "L", "n", "stderr"], [[e.z.real, e.z.imag, e.value, e.n, e.stderr] for e in est]


def task_reflectivity(seq, p, threads, rng):
    dw = tuple(p["data_window"]) if "data_window" in p else None
    certs = reflectivity_scan(seq, p["B"], p["zetas"], dw)
    header = ["B", "zeta", "window", "dev_alpha", "dev_rho", "pass"]
    return header, [[c.as_row()[h] for h in header] for c in certs]


def _group(d):
    import mpmath
    return GroupElement(tuple(mpmath.mpf(x) if isinstance(x, str) else float(x) for x in d["torus"]),
                        d.get("cyclic", 0), d.get("q", 1))


def task_delta(seq, p, threads, rng, model=None):
    import mpmath
    _cap(p["nmax"] > MAX_DELTA_N, f"nmax exceeds {MAX_DELTA_N}")
    with mpmath.workdps(p.get("dps", 30)):
        if "beta" in p and "omega" in p:
            beta, omega = _group(p["beta"]), _group(p["omega"])
        elif model and model["model"] in ("uamo", "mosaic"):
            prm = model["params"]
            beta, omega = uamo_group(prm["Phi"], prm["theta"])
        else:
            raise ConfigError("params: beta and omega are required for this model")
        est = delta_estimate(beta, omega, p["nmax"], p.get("nmin", 1))
    return ["nmin", "nmax", "delta", "witness", "infinite"], [[est.nmin, est.nmax, est.value, est.witness,
                                                               int(est.infinite)]]


def _spectral_window(seq, p):
    if "spectral_window" in p:
        return tuple(p["spectral_window"])
    lo = seq.window[0] + (seq.window[0] % 2)
    hi = min(seq.window[1], lo + 1023)
    return lo, hi - (1 - hi % 2)


def task_criterion(seq, p, threads, rng):
    _cap(p["n"] * p.get("samples", 1) > MAX_STEPS, f"n * samples exceeds {MAX_STEPS}")
    win = _spectral_window(seq, p)
    _cap(win[1] - win[0] + 1 > MAX_DENSE_SITES, "spectral window too large")
    zs = spectral_grid(seq, win, p["grid"])
    est = _lyap(seq, zs, p["n"], p.get("samples", 1), 0, threads)
    rows = []
    for e in est:
        v = js_criterion(e, p["B"], B_err=p.get("B_err", 0.0))
        r = v.as_row()
        rows.append([r["z_re"], r["z_im"], r["L"], r["B"], r["verdict"]])
    return ["z_re", "z_im", "L", "B", "verdict"], rows


def task_ipr(seq, p, threads, rng):
    evals, ipr = ipr_diagnostics(seq, tuple(p["window"]))
    return ["eig_re", "eig_im", "ipr"], [[z.real, z.imag, v] for z, v in zip(evals, ipr)]


def task_spectrum(seq, p, threads, rng):
    a, b = p["window"]
    _cap(b - a + 1 > MAX_DENSE_SITES, "window too large")
    ev = np.linalg.eigvals(truncate_unitary(seq, (a, b)).matrix)
    ev = ev[np.argsort(np.angle(ev), kind="stable")]
    return ["eig_re", "eig_im"], [[z.real, z.imag] for z in ev]


def task_drift(seq, p, threads, rng):
    z = p["z"]
    z = complex(z[0], z[1]) if isinstance(z, list) else complex(z)
    table = wronskian_drift(seq, z, p["m"], p["B"], radius=p.get("radius", 64))
    return ["n", "drift"], [[int(n), d] for n, d in zip(table.n, table.drift)]


def task_identity(seq, p, threads, rng):
    rows = []
    m_max, n_max = p.get("m_max", 4), p.get("n_max", 6)
    span = 4 * m_max + 2 * n_max + 4
    for t in range(p["trials"]):
        z = np.exp(2j * np.pi * rng.random())
        u0 = tuple(rng.normal(size=2) + 1j * rng.normal(size=2))
        m, n = int(rng.integers(1, m_max + 1)), int(rng.integers(1, n_max + 1))
        u = propagate(seq, z, u0, (-span, span))
        q = 4 * m - 2 * n
        used = u(np.arange(min(2 * n - 3, q - 4), max(2 * n + 2, q) + 1))
        u = u.scaled(1.0 / np.max(np.abs(used)))
        rows.append([t, m, n, appendix_identity_check(seq, z, u, m, n)])
    return ["trial", "m", "n", "residual"], rows


TASKS = {"lyapunov": task_lyapunov, "reflectivity": task_reflectivity, "delta": task_delta,
         "criterion": task_criterion, "ipr": task_ipr, "spectrum": task_spectrum,
         "wronskian-drift": task_drift, "identity-check": task_identity}


# ---------------------------------------------------------------- output

def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_table(path: Path, header, rows, fmt, manifest_name):
    with open(path, "w", newline="\n") as fh:
        if fmt == "csv":
            fh.write(f"# manifest: {manifest_name}\n")
            fh.write(",".join(header) + "\n")
            for r in rows:
                fh.write(",".join(_fmt(v) for v in r) + "\n")
        else:
            for r in rows:
                obj = {h: (float(v) if isinstance(v, (float, np.floating)) else
                           int(v) if isinstance(v, (int, np.integer)) else v) for h, v in zip(header, r)}
                obj["manifest"] = manifest_name
                fh.write(json.dumps(obj, allow_nan=True) + "\n")


def run(cfg, out_dir, threads=1, seed=None) -> int:
    t0 = time.perf_counter()
    task = cfg["task"]
    seed = cfg.get("seed") if seed is None else seed
    if task in RANDOMIZED_TASKS and seed is None:
        raise ConfigError(f"task {task} needs a seed (--seed or config 'seed')")
    rng = np.random.default_rng(seed)
    seq = sequence_from_spec(cfg["model"])
    fn = TASKS[task]
    if task == "delta":
        header, rows = fn(seq, cfg["params"], threads, rng, cfg["model"])
    else:
        header, rows = fn(seq, cfg["params"], threads, rng)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fmt = cfg["output"].get("format", "csv")
    name = cfg["output"]["path"]
    manifest_name = f"{name}.manifest.json"
    write_table(out_dir / name, header, rows, fmt, manifest_name)
    manifest = {"config": cfg, "version": __version__, "seed": seed, "threads": threads,
                "wall_time_s": time.perf_counter() - t0, "outputs": [name], "rows": len(rows)}
    with open(out_dir / manifest_name, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


def list_models():
    return {name: schema for name, schema in MODEL_SCHEMAS.items()}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="gecmv", description=__doc__.splitlines()[0])
    ap.add_argument("--log-level", default="WARNING")
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--threads", type=int, default=1)
    r.add_argument("--seed", type=int, default=None)
    v = sub.add_parser("validate", help="check a config without running it")
    v.add_argument("--config", required=True)
    sub.add_parser("list-models", help="print model names and parameter schemas")
    args = ap.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(message)s")

    if args.cmd == "list-models":
        print(json.dumps(list_models(), indent=2))
        return EXIT_OK
    try:
        cfg = load_config(args.config)
        if args.cmd == "validate":
            print("ok")
            return EXIT_OK
        if args.threads < 1:
            raise ConfigError("--threads must be positive")
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        return run(cfg, args.out, args.threads, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResourceCap, WindowError) as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (CocycleError, ArithmeticError, ValueError, OverflowError) as exc:
        if isinstance(exc, ModelError):
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
