"""Stability verdicts for the four presets, literal and with delta_w tuned.

Prints one row per preset: max Re(lambda) of the exact roots, the Routh-Hurwitz
verdict, the first-order perturbative root, the detuning estimate and the
numerically located boundary.  ``--json`` writes the same data as JSON.

    python scripts/reproduce_tables.py [--json out.json]
"""

import argparse
import json
import time

from optospring import (
    PRESET_NAMES,
    OptoSpringError,
    characteristic_polynomial,
    derive_coefficients,
    first_stability_change,
    min_detuning,
    perturbative_roots,
    preset,
    solve_roots,
    tune_delta_w,
)
from optospring.params import TWO_PI, preset_table

SEARCH_HZ = {"aligo": 10.0, "aligo-equal": 15.0, "msi": 1e5, "msi-equal": 2e5}


def row(name, params, label):
    t0 = time.perf_counter()
    coefs = derive_coefficients(params)
    rep = solve_roots(characteristic_polynomial(coefs))
    elapsed = time.perf_counter() - t0
    out = {
        "preset": name,
        "variant": label,
        "delta_w_hz": params.delta_w / TWO_PI,
        "max_real_rad_s": rep.max_real,
        "stable": rep.stable,
        "rh_stable": rep.rh_stable,
        "runtime_ms": elapsed * 1e3,
    }
    try:
        first = perturbative_roots(coefs).first_order[0]
        out["first_order_re"] = first.real
        out["delta_min_hz"] = min_detuning(coefs, params) / TWO_PI
    except OptoSpringError as exc:
        out["first_order_re"] = None
        out["delta_min_hz"] = None
        out["note"] = str(exc)
    try:
        out["boundary_hz"] = first_stability_change(params, TWO_PI * SEARCH_HZ[name]) / TWO_PI
    except OptoSpringError:
        out["boundary_hz"] = None
    return out


def fmt(x, spec=".4g"):
    return "-" if x is None else format(x, spec)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--json", help="also write rows to this path")
    args = parser.parse_args()

    rows = []
    for name in PRESET_NAMES:
        literal = preset(name)
        rows.append(row(name, literal, "table"))
        rows.append(row(name, tune_delta_w(literal), "tuned"))

    head = f"{'preset':<12}{'variant':<8}{'delta_w Hz':>12}{'max Re':>12}{'stable':>8}{'RH':>6}" \
           f"{'1st-order Re':>14}{'dmin Hz':>10}{'d* Hz':>10}{'table d Hz':>12}{'ms':>7}"
    print(head)
    for r in rows:
        table = preset_table(r["preset"])["delta_hz"]
        print(
            f"{r['preset']:<12}{r['variant']:<8}{r['delta_w_hz']:>12.4g}{r['max_real_rad_s']:>12.4g}"
            f"{str(r['stable']):>8}{str(r['rh_stable']):>6}{fmt(r['first_order_re']):>14}"
            f"{fmt(r['delta_min_hz']):>10}{fmt(r['boundary_hz']):>10}{table:>12.4g}{r['runtime_ms']:>7.2f}"
        )
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
