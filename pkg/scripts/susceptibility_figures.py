"""|chi(Omega)| curves for the presets and the delta_w steering family.

Writes CSV files (always) and PNG plots (if matplotlib is installed) into
``--out`` (default ``figures/``):

* ``chi_<preset>.csv``: each preset as tabulated, plus the tuned variant;
* ``chi_steering_<offset>.csv``: aligo with delta_w tuned to -delta_1 + offset.

    python scripts/susceptibility_figures.py [--out figures] [--points 4000]
"""

import argparse
from pathlib import Path

import numpy as np

from optospring import PRESET_NAMES, derive_coefficients, preset, susceptibility, tune_delta_w
from optospring.dynamics import local_maxima
from optospring.params import TWO_PI

BAND_HZ = {"aligo": (1, 100), "aligo-equal": (1, 100), "msi": (1e3, 3e5), "msi-equal": (1e3, 3e5)}
OFFSETS_HZ = (-0.5, 0.0, 0.5)


def curve_for(params, band, points):
    grid = TWO_PI * np.linspace(band[0], band[1], points)
    return susceptibility(derive_coefficients(params), params, grid)


def peaks_hz(curve):
    idx = local_maxima(curve.chi_abs)
    return ", ".join(f"{curve.omega[i] / TWO_PI:.4g} Hz ({curve.chi_abs[i]:.3g})" for i in idx)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="figures")
    parser.add_argument("--points", type=int, default=4000)
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    curves = {}
    for name in PRESET_NAMES:
        for label, params in (("table", preset(name)), ("tuned", tune_delta_w(preset(name)))):
            c = curve_for(params, BAND_HZ[name], args.points)
            curves[(name, label)] = c
            (out / f"chi_{name}_{label}.csv").write_text(c.to_csv())
            print(f"{name:<12}{label:<6} maxima: {peaks_hz(c)}")

    steering = {}
    for offset in OFFSETS_HZ:
        params = tune_delta_w(preset("aligo"), TWO_PI * offset)
        c = curve_for(params, BAND_HZ["aligo"], args.points)
        steering[offset] = c
        (out / f"chi_steering_{offset:+.1f}.csv").write_text(c.to_csv())
        print(f"steering {offset:+.1f} Hz maxima: {peaks_hz(c)}")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; CSV only")
        return

    fig, axes = plt.subplots(2, 2, figsize=(10, 7))
    for ax, name in zip(axes.flat, PRESET_NAMES):
        for label in ("table", "tuned"):
            c = curves[(name, label)]
            ax.semilogy(c.omega / TWO_PI, c.chi_abs, label=label)
        ax.set_title(name)
        ax.set_xlabel("frequency [Hz]")
        ax.set_ylabel("|chi| [m/N]")
        ax.legend()
    fig.tight_layout()
    fig.savefig(out / "chi_presets.png", dpi=120)

    fig, ax = plt.subplots(figsize=(6, 4))
    for offset, c in steering.items():
        ax.semilogy(c.omega / TWO_PI, c.chi_abs, label=f"offset {offset:+.1f} Hz")
    ax.set_xlabel("frequency [Hz]")
    ax.set_ylabel("|chi| [m/N]")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "chi_steering.png", dpi=120)
    print(f"plots written to {out}/")


if __name__ == "__main__":
    main()
