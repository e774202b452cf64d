"""Command-line front end: spectrum scans, protocol runs, comparisons and sweeps.

All rates are given in units of ``g`` and all times in units of ``1/g``
(``--g`` defaults to 1).  Options can come from a TOML config file
(``--config``); command-line flags override file values.  Output is CSV with
``#`` metadata lines, or JSON for ``compare``.

Exit status: 0 on success, 2 on configuration errors, 3 on numerical failures.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from importlib import resources

import numpy as np

from . import __version__
from .hilbert import ModelParams
from .integrator import IntegrationError
from .liouvillian import DegenerateNullSpaceError, GeneratorError
from .protocol import AXES, WORKERS_ENV, Axis, ProtocolKind, ProtocolSpec, compare_protocols, \
    half_rabi_time, run_protocol, sweep_phase_diagram
from .spectral import closed_form_eigenvalues

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

SCHEMA_VERSION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    pass


def fmt(value) -> str:
    """12 significant digits; no negative zero."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if value == 0.0:
        value = 0.0
    return f"{value:.12g}"


MODEL_KEYS = {
    "g": float, "kappa": float, "kappa1": float, "gamma": float, "delta": float,
    "n_th": float, "n_th_atom": float, "N": int,
}
PROTOCOL_KEYS = {
    "protocol": str, "tau": float, "tau_ratio": float, "t_max": float, "samples": int,
    "reference": str, "generator": str,
}
COMMAND_KEYS = {
    "spectrum": {"g": float, "kappa_min": float, "kappa_max": float, "steps": int, "out": str},
    "simulate": {**MODEL_KEYS, **PROTOCOL_KEYS, "out": str},
    "compare": {**MODEL_KEYS, **PROTOCOL_KEYS, "t_star": float, "tie_epsilon": float, "out": str,
                "single_csv": str, "two_csv": str},
    "phase-diagram": {**MODEL_KEYS, **PROTOCOL_KEYS, "t_star": float, "tie_epsilon": float,
                      "x": str, "y": str, "workers": int, "out": str},
}
DEFAULTS = {
    "g": 1.0, "kappa": 8.0, "kappa1": 0.0, "gamma": 0.0, "delta": 0.0, "n_th": 0.0, "n_th_atom": 0.0,
    "N": 1, "protocol": "two", "t_max": 10.0, "samples": 2001, "reference": "stationary",
    "t_star": 8.0, "tie_epsilon": 1e-9, "kappa_min": 0.0, "kappa_max": 12.0, "steps": 241,
    "x": "tau:0:2:21", "y": "delta:-1:1:21",
}


def _flatten(table: dict, prefix: str = "") -> dict:
    flat = {}
    for key, value in table.items():
        if isinstance(value, dict):
            for k, v in _flatten(value, f"{prefix}{key}.").items():
                if k in flat:
                    raise ConfigError(f"key {k!r} given more than once in the config file")
                flat[k] = v
        else:
            if key in flat:
                raise ConfigError(f"key {key!r} given more than once in the config file")
            flat[key.replace("-", "_")] = value
    return flat


def load_config_file(path: str) -> dict:
    """Read a TOML file; tables only group keys and are flattened."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid config file {path}: {exc}") from exc
    return _flatten(data)


def resolve_config(command: str, file_values: dict, flag_values: dict) -> dict:
    allowed = COMMAND_KEYS[command]
    unknown = sorted(set(file_values) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown keys for '{command}': {', '.join(unknown)}")
    merged = {k: v for k, v in DEFAULTS.items() if k in allowed}
    merged.update(file_values)
    merged.update({k: v for k, v in flag_values.items() if v is not None and k in allowed})
    resolved = {}
    for key, value in merged.items():
        kind = allowed[key]
        if isinstance(value, list) and key in ("x", "y"):
            value = ":".join(str(v) for v in value)
        try:
            if kind is int and isinstance(value, float) and not value.is_integer():
                raise ValueError
            resolved[key] = kind(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key}={value!r} is not a valid {kind.__name__}") from None
    for key, value in resolved.items():
        if isinstance(value, float) and not math.isfinite(value):
            raise ConfigError(f"{key} must be finite")
    return resolved


def model_from(cfg: dict) -> ModelParams:
    g = cfg["g"]
    try:
        return ModelParams(
            g=g, kappa=cfg["kappa"] * g, kappa1=cfg["kappa1"] * g, gamma=cfg["gamma"] * g,
            delta=cfg["delta"] * g, n_th=cfg["n_th"], n_th_atom=cfg["n_th_atom"], N=cfg["N"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def spec_from(cfg: dict) -> ProtocolSpec:
    model = model_from(cfg)
    if model.g <= 0:
        raise ConfigError("g must be positive")
    if cfg["protocol"] not in ("single", "two"):
        raise ConfigError(f"protocol must be 'single' or 'two', got {cfg['protocol']!r}")
    if "tau" in cfg and "tau_ratio" in cfg:
        raise ConfigError("give either tau or tau_ratio, not both")
    if "tau" in cfg:
        tau = cfg["tau"] / model.g
    else:
        tau = cfg.get("tau_ratio", 1.0) * half_rabi_time(model.g, model.N)
    try:
        return ProtocolSpec(
            kind=ProtocolKind(cfg["protocol"]), model=model,
            tau=tau if cfg["protocol"] == "two" else None,
            t_max=cfg["t_max"] / model.g, generator=cfg.get("generator"), reference=cfg["reference"],
        )
    except (ValueError, GeneratorError) as exc:
        raise ConfigError(str(exc)) from exc


def parse_axis(text: str) -> Axis:
    parts = text.split(":")
    if len(parts) != 4:
        raise ConfigError(f"axis {text!r} must look like name:lo:hi:steps")
    name = parts[0]
    if name not in AXES:
        raise ConfigError(f"unknown axis {name!r}; choose from {', '.join(AXES)}")
    try:
        return Axis(name, float(parts[1]), float(parts[2]), int(parts[3]))
    except ValueError as exc:
        raise ConfigError(f"bad axis {text!r}: {exc}") from exc


# where the output goes does not change it, so these stay out of the header
OUTPUT_KEYS = ("out", "single_csv", "two_csv")


def metadata_lines(command: str, cfg: dict, extra: dict | None = None) -> list[str]:
    lines = [f"# jcmpemba {__version__} {command}"]
    for key in sorted(set(cfg) - set(OUTPUT_KEYS)):
        value = cfg[key]
        lines.append(f"# {key} = {value if isinstance(value, str) else fmt(value)}")
    for key, value in (extra or {}).items():
        lines.append(f"# {key} = {value}")
    return lines


def write_csv(path: str, meta: list[str], columns: list[str], rows) -> None:
    body = meta + [",".join(columns)]
    body += [",".join(fmt(v) for v in row) for row in rows]
    text = "\n".join(body) + "\n"
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


def spectrum_rows(g: float, kappa_min: float, kappa_max: float, steps: int):
    """Rows of kappa/g, four real parts, four imaginary parts.

    Eigenvalues are ordered by real part (descending), ties by imaginary part
    (descending).
    """
    for ratio in np.linspace(kappa_min, kappa_max, steps):
        lam = closed_form_eigenvalues(g, ratio * g) / g
        lam = sorted(lam, key=lambda z: (-round(z.real, 12), -round(z.imag, 12)))
        yield [ratio] + [z.real for z in lam] + [z.imag for z in lam]


def cmd_spectrum(cfg: dict) -> int:
    if cfg["g"] <= 0:
        raise ConfigError("g must be positive")
    if cfg["steps"] < 2 or cfg["kappa_min"] < 0 or cfg["kappa_max"] <= cfg["kappa_min"]:
        raise ConfigError("need 0 <= kappa_min < kappa_max and steps >= 2")
    columns = ["kappa_over_g"] + [f"re_l{i}" for i in range(1, 5)] + [f"im_l{i}" for i in range(1, 5)]
    rows = spectrum_rows(cfg["g"], cfg["kappa_min"], cfg["kappa_max"], cfg["steps"])
    write_csv(cfg.get("out", "-"), metadata_lines("spectrum", cfg), columns, rows)
    return 0


def record_rows(record):
    g = record.spec.model.g
    for t, pe, nph, dtr, dhs, seg in zip(record.times, record.p_e, record.n_ph, record.d_tr,
                                         record.d_hs, record.segment):
        yield [t * g, pe, nph, dtr, dhs, int(seg)]


RECORD_COLUMNS = ["t", "p_e", "n_ph", "d_tr", "d_hs", "segment"]


def cmd_simulate(cfg: dict) -> int:
    spec = spec_from(cfg)
    if cfg["samples"] < 2:
        raise ConfigError("samples must be >= 2")
    record = run_protocol(spec, cfg["samples"])
    write_csv(cfg.get("out", "-"), metadata_lines("simulate", cfg), RECORD_COLUMNS, record_rows(record))
    return 0


def cmd_compare(cfg: dict) -> int:
    cfg = {**cfg, "protocol": "two"}
    spec = spec_from(cfg)
    if cfg["samples"] < 2:
        raise ConfigError("samples must be >= 2")
    t_star = cfg["t_star"] / spec.model.g
    if not spec.tau < t_star <= spec.t_max:
        raise ConfigError(f"t_star must satisfy tau < t_star <= t_max (got {cfg['t_star']})")
    verdict, single, two = compare_protocols(spec, t_star, cfg["samples"], cfg["tie_epsilon"])
    params = {k: cfg[k] for k in sorted(cfg) if k in MODEL_KEYS or k in PROTOCOL_KEYS}
    params["tau"] = spec.tau * spec.model.g
    summary = {
        "schema_version": SCHEMA_VERSION,
        "effect": verdict.effect,
        "t_star": verdict.t_star * spec.model.g,
        "d_tr_single": verdict.d_tr_single,
        "d_tr_two": verdict.d_tr_two,
        "margin": verdict.margin,
        "params": params,
    }
    text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    out = cfg.get("out", "-")
    if out == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {out}: {exc}") from exc
    for key, record in (("single_csv", single), ("two_csv", two)):
        if key in cfg:
            write_csv(cfg[key], metadata_lines("compare", cfg, {"record": key[:-4]}), RECORD_COLUMNS,
                      record_rows(record))
    return 0


def cmd_phase_diagram(cfg: dict) -> int:
    x_axis, y_axis = parse_axis(cfg["x"]), parse_axis(cfg["y"])
    if x_axis.name == y_axis.name:
        raise ConfigError(f"x and y both sweep {x_axis.name!r}")
    spec = spec_from({**cfg, "protocol": "two"})
    workers = cfg.get("workers")
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else (os.cpu_count() or 1)
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    t_star = cfg["t_star"] / spec.model.g
    if not t_star <= spec.t_max:
        raise ConfigError("t_star must not exceed t_max")
    diagram = sweep_phase_diagram(spec, x_axis, y_axis, t_star, workers=workers,
                                  tie_epsilon=cfg["tie_epsilon"])
    units = {"tau": "tau/tau0", "delta": "delta/g", "gamma": "gamma/g", "kappa1": "kappa1/g"}
    meta = metadata_lines("phase-diagram", cfg, {"x_axis": units[x_axis.name], "y_axis": units[y_axis.name],
                                                 "order": "row-major, y outer, x inner"})
    write_csv(cfg.get("out", "-"), meta, ["x", "y", "effect", "margin"], diagram.cells())
    return 0


COMMANDS = {
    "spectrum": cmd_spectrum,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "phase-diagram": cmd_phase_diagram,
}


def _model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--g", type=float, help="coupling rate (default 1)")
    p.add_argument("--kappa", type=float, help="high cavity loss, units of g (default 8)")
    p.add_argument("--kappa1", type=float, help="low cavity loss during the first stage, units of g")
    p.add_argument("--gamma", type=float, help="atomic spontaneous emission, units of g")
    p.add_argument("--delta", type=float, help="atom-cavity detuning, units of g")
    p.add_argument("--n-th", dest="n_th", type=float, help="mean thermal photon number")
    p.add_argument("--n-th-atom", dest="n_th_atom", type=float, help="mean thermal atomic excitation")
    p.add_argument("--N", dest="N", type=int, help="excitation number of the initial state")
    p.add_argument("--tau", type=float, help="switching time, units of 1/g")
    p.add_argument("--tau-ratio", dest="tau_ratio", type=float,
                   help="switching time in units of the half Rabi period pi/(2 g sqrt(N))")
    p.add_argument("--t-max", dest="t_max", type=float, help="time horizon, units of 1/g (default 10)")
    p.add_argument("--samples", type=int, help="uniform samples on [0, t_max] (default 2001)")
    p.add_argument("--reference", choices=["stationary", "ground"],
                   help="equilibrium for distances (default: stationary state)")
    p.add_argument("--generator", choices=["single", "n-manifold", "thermal"],
                   help="override the model family inferred from the parameters")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jcmpemba", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="eigenvalues of the 4x4 dynamical matrix versus kappa/g")
    p.add_argument("--config")
    p.add_argument("--g", type=float)
    p.add_argument("--kappa-min", dest="kappa_min", type=float)
    p.add_argument("--kappa-max", dest="kappa_max", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--out", help="output CSV (default stdout)")

    p = sub.add_parser("simulate", help="time series of one protocol run")
    p.add_argument("--config")
    _model_flags(p)
    p.add_argument("--protocol", choices=["single", "two"])
    p.add_argument("--out")

    p = sub.add_parser("compare", help="single- versus two-step verdict as JSON")
    p.add_argument("--config")
    _model_flags(p)
    p.add_argument("--t-star", dest="t_star", type=float, help="observation time, units of 1/g (default 8)")
    p.add_argument("--tie-epsilon", dest="tie_epsilon", type=float)
    p.add_argument("--out")
    p.add_argument("--single-csv", dest="single_csv")
    p.add_argument("--two-csv", dest="two_csv")

    p = sub.add_parser("phase-diagram", help="effect/no-effect grid over two parameters")
    p.add_argument("--config")
    _model_flags(p)
    p.add_argument("--x", help=f"axis spec name:lo:hi:steps, name in {AXES}")
    p.add_argument("--y")
    p.add_argument("--t-star", dest="t_star", type=float)
    p.add_argument("--tie-epsilon", dest="tie_epsilon", type=float)
    p.add_argument("--workers", type=int, help=f"worker processes (default ${WORKERS_ENV} or all cores)")
    p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        file_values = load_config_file(args.config) if args.config else {}
        cfg = resolve_config(args.command, file_values, flags)
        return COMMANDS[args.command](cfg)
    except (IntegrationError, DegenerateNullSpaceError, ArithmeticError) as exc:
        print(f"jcmpemba: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"jcmpemba: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def load_schema() -> dict:
    return json.loads(resources.files("jcmpemba").joinpath("schemas/compare.schema.json").read_text())


if __name__ == "__main__":
    sys.exit(main())
