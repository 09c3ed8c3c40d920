#!/usr/bin/env python3
"""Reproduce the data behind the purity/fidelity deficit figures: sweep
the mode frequency for a couple of regularization lengths and tabulate
1 - eta and 1 - F.  Writes deficit_sweep.csv next to this script and, if
matplotlib is importable, a log-log plot deficit_sweep.png.
"""
import pathlib

from gravmode.cli import SweepConfig, render_sweep, run_sweep

here = pathlib.Path(__file__).resolve().parent

config = SweepConfig(omega_min=1e-3, omega_max=1.0, points=31,
                     lc_values=(0.5, 1.0),
                     out=str(here / "deficit_sweep.csv"))
rows = run_sweep(config)

with open(config.out, "w", encoding="utf-8") as fh:
    fh.write(render_sweep(config, rows))
print(f"wrote {len(rows)} rows to {config.out}")

print("\n  omega        lc    log10(1-eta)  log10(1-F)")
for row in rows[::5]:
    print(f"{row['omega_over_planck']:9.2e}  {row['lc_over_planck']:5.2f}  "
          f"{row['log10_one_minus_eta']:12.4f}  {row['log10_one_minus_fidelity']:10.4f}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib not available; skipping the plot")
else:
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6), sharex=True)
    for lc in config.lc_values:
        series = [r for r in rows if r["lc_over_planck"] == lc]
        om = [r["omega_over_planck"] for r in series]
        axes[0].loglog(om, [r["one_minus_eta"] for r in series], label=f"lc = {lc}")
        axes[1].loglog(om, [r["one_minus_fidelity"] for r in series], label=f"lc = {lc}")
    axes[0].set_ylabel(r"$1-\eta$")
    axes[1].set_ylabel(r"$1-F$")
    for ax in axes:
        ax.set_xlabel(r"$\omega/\Omega_P$")
        ax.legend()
        ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    out = here / "deficit_sweep.png"
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")
