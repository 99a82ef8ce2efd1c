"""Command-line front end: ``optospring {analyze,susceptibility,sweep,preset-list}``.

Exit codes: 0 stable (or success), 2 unstable (``analyze`` only), 1 error.
User-facing frequencies are in Hz.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import io
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from optospring import meanfield
from optospring.dynamics import characteristic_polynomial, derive_coefficients, susceptibility
from optospring.errors import ConfigError, OptoSpringError, PerturbationError
from optospring.params import (
    PRESET_NAMES,
    TWO_PI,
    describe,
    hz_to_rad,
    load_config,
    parse_config_text,
    preset,
    preset_table,
    rad_to_hz,
)
from optospring.stability import min_detuning, perturbative_roots, solve_roots, tune_delta_w

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNSTABLE = 2

SWEEP_PARAMS = {
    "delta_hz": ("delta_arm", TWO_PI),
    "gamma_w_hz": ("gamma_w", TWO_PI),
    "gamma_s_hz": ("gamma_s", TWO_PI),
    "delta_w_hz": ("delta_w", TWO_PI),
    "delta_s_hz": ("delta_s", TWO_PI),
    "circulating_power_w": ("circ_power", 1.0),
}


class UsageError(OptoSpringError):
    pass


class _Parser(argparse.ArgumentParser):
    # exit code 2 is reserved for "unstable"
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# --- input resolution --------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class Source:
    params: object
    physical: object = None  # PhysicalConfig when the config described hardware


def load_source(args):
    if args.preset is not None:
        return Source(preset(args.preset))
    text = Path(args.config).read_text()
    doc = parse_config_text(text)
    if any(key in doc for key in meanfield.PHYSICAL_KEYS):
        cfg = meanfield.physical_config(doc)
        topology = doc.get("topology", "aligo")
        return Source(meanfield.mode_params_from_physical(cfg, topology), cfg)
    return Source(load_config(doc))


def resolve_params(args):
    """Apply --delta-hz and the delta_w tuning options to the loaded source."""
    src = load_source(args)
    params = src.params
    if getattr(args, "delta_hz", None) is not None:
        params = params.replace(delta_arm=hz_to_rad(args.delta_hz))
    offset = getattr(args, "delta_offset_hz", None)
    if offset is not None or getattr(args, "tune", False):
        params = tune_delta_w(params, hz_to_rad(offset or 0.0))
    return dataclasses.replace(src, params=params)


# --- analysis report -----------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class AnalysisReport:
    params: dict
    coefficients: dict
    roots: dict
    perturbative: dict
    delta_min_hz: float | None
    i_out_w: float | None
    stable: bool

    def to_json(self):
        return json.dumps(dataclasses.asdict(self), indent=2, allow_nan=False) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        buf.write("quantity,value\n")
        for key, value in _flatten(dataclasses.asdict(self)):
            buf.write(f"{key},{value}\n")
        return buf.getvalue()


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for key, value in obj.items():
            yield from _flatten(value, f"{prefix}{key}.")
    elif isinstance(obj, list):
        for i, value in enumerate(obj):
            yield from _flatten(value, f"{prefix}{i}.")
    else:
        value = "" if obj is None else (repr(obj) if isinstance(obj, float) else str(obj).lower() if isinstance(obj, bool) else obj)
        yield prefix.rstrip("."), value


def perturbative_status(coefs):
    """(flag, PerturbativeRoots or None); flag is stable/unstable or why unavailable."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            pert = perturbative_roots(coefs)
    except PerturbationError as exc:
        return exc.flag, None
    except OptoSpringError:
        return "unavailable", None
    return ("stable" if pert.first_order_stable else "unstable"), pert


def analyze(source):
    params = source.params
    coefs = derive_coefficients(params)
    report = solve_roots(characteristic_polynomial(coefs))
    flag, pert = perturbative_status(coefs)
    pert_json = {"status": flag}
    if pert is not None:
        pert_json.update(pert.to_json())
        pert_json.pop("first_order_stable", None)
        pert_json["b_im_over_re"] = abs(pert.b.imag) / abs(pert.b.real) if pert.b.real else None
    try:
        delta_min = rad_to_hz(min_detuning(coefs, params))
    except OptoSpringError:
        delta_min = None
    i_out = None
    if source.physical is not None:
        i_out = meanfield.mean_fields(source.physical, params).i_out
    return AnalysisReport(
        params=describe(params),
        coefficients=coefs.summary(),
        roots=report.to_json(),
        perturbative=pert_json,
        delta_min_hz=delta_min,
        i_out_w=i_out,
        stable=report.stable,
    )


# --- sweep -----------------------------------------------------------------------------


SWEEP_HEADER = "value,max_real_hz,stable,rh_stable,perturbative"


def sweep_row(params, name, value):
    field, scale = SWEEP_PARAMS[name]
    trial = params.replace(**{field: scale * value})
    coefs = derive_coefficients(trial)
    rep = solve_roots(characteristic_polynomial(coefs))
    flag, _ = perturbative_status(coefs)
    return f"{value!r},{rad_to_hz(rep.max_real)!r},{str(rep.stable).lower()},{str(rep.rh_stable).lower()},{flag}"


def sweep_values(start, stop, steps):
    if steps < 1:
        raise ConfigError("steps", "must be >= 1")
    if steps == 1:
        return [float(start)]
    return [float(v) for v in np.linspace(start, stop, steps)]


def run_sweep(params, name, values, jobs=1):
    if name not in SWEEP_PARAMS:
        raise ConfigError("param", f"unknown sweep parameter {name!r}; choose from {', '.join(SWEEP_PARAMS)}")
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(sweep_row, [params] * len(values), [name] * len(values), values))
    else:
        rows = [sweep_row(params, name, v) for v in values]
    return SWEEP_HEADER + "\n" + "".join(r + "\n" for r in rows)


# --- commands --------------------------------------------------------------------------


def _emit(text, output):
    if output in (None, "-", "stdout"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def cmd_analyze(args):
    report = analyze(resolve_params(args))
    _emit(report.to_json() if args.format == "json" else report.to_csv(), args.output)
    return EXIT_OK if report.stable else EXIT_UNSTABLE


def cmd_susceptibility(args):
    if not 0 < args.omega_min_hz < args.omega_max_hz:
        raise ConfigError("omega-min-hz", "need 0 < omega-min-hz < omega-max-hz")
    if args.points < 2:
        raise ConfigError("points", "must be >= 2")
    params = resolve_params(args).params
    grid = TWO_PI * np.linspace(args.omega_min_hz, args.omega_max_hz, args.points)
    curve = susceptibility(derive_coefficients(params), params, grid)
    _emit(curve.to_csv(), args.output)
    return EXIT_OK


def cmd_sweep(args):
    params = resolve_params(args).params
    values = sweep_values(getattr(args, "from"), args.to, args.steps)
    _emit(run_sweep(params, args.param, values, args.jobs), args.output)
    return EXIT_OK


def cmd_preset_list(args):
    lines = []
    for name in PRESET_NAMES:
        table = preset_table(name)
        body = " ".join(f"{k}={v!r}" for k, v in table.items() if k != "topology")
        lines.append(f"{name} ({table['topology']}): {body}")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="optospring", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, formats=False):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--preset", choices=PRESET_NAMES)
        src.add_argument("--config", help="flat key = value config file")
        p.add_argument("--delta-hz", type=float, help="override the arm detuning [Hz]")
        p.add_argument("--delta-offset-hz", type=float,
                       help="retune delta_w so the effective symmetric detuning is -delta_1 + offset [Hz]")
        p.add_argument("--tune", action="store_true", help="same as --delta-offset-hz 0")
        p.add_argument("--output", default="-", help="output path, '-' for stdout")
        if formats:
            p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("analyze", help="roots, perturbative comparison and verdict")
    common(p, formats=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("susceptibility", help="chi(Omega) on a linear grid, CSV")
    common(p)
    p.add_argument("--omega-min-hz", type=float, default=1.0)
    p.add_argument("--omega-max-hz", type=float, default=100.0)
    p.add_argument("--points", type=int, default=1000)
    p.set_defaults(func=cmd_susceptibility)

    p = sub.add_parser("sweep", help="stability verdict along one parameter, CSV")
    common(p)
    p.add_argument("--param", required=True, help=", ".join(SWEEP_PARAMS))
    p.add_argument("--from", type=float, required=True)
    p.add_argument("--to", type=float, required=True)
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("preset-list", help="list built-in presets")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_preset_list)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: config key {exc}", file=sys.stderr)
    except (OptoSpringError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
