#!/usr/bin/env python3
"""Sector spectra vs coupling, computed two independent ways.

Sweeps the two-photon coupling for a detuned qubit with a weak Stark term
and solves every symmetry sector twice: once by truncated diagonalization
and once as zeros of the spectral series.  The two routes must agree to
root-finder accuracy; the script prints the worst discrepancy and, with
--plot, draws the scaled spectrum against x = -log10(1 - g/g_c) together
with the pole lines the levels organize around.
"""

import argparse

import numpy as np

from tpstark import ed, gfunction, model
from tpstark.model import ModelParams, all_sectors

parser = argparse.ArgumentParser()
parser.add_argument("--delta", type=float, default=0.5)
parser.add_argument("--u", type=float, default=0.1)
parser.add_argument("--steps", type=int, default=25)
parser.add_argument("--levels", type=int, default=6)
parser.add_argument("--plot", action="store_true")
args = parser.parse_args()

gc = model.g_critical(args.u)
print(f"delta = {args.delta}, U = {args.u}, g_c = {gc:.6f}")

g_grid = np.linspace(0.05, 0.92 * gc, args.steps)
worst = 0.0
curves = {sector: [] for sector in all_sectors()}
for g in g_grid:
    params = ModelParams(delta=args.delta, stark=args.u, coupling=float(g))
    for sector in all_sectors():
        spec = ed.converge(params, sectors=sector, count=args.levels + 1,
                           tol=1e-10)
        e = spec.energies
        zeros = gfunction.find_zeros(params, sector, float(e[0]) - 0.2,
                                     0.5 * float(e[args.levels - 1] + e[args.levels]))
        m = min(args.levels, len(zeros.energies))
        worst = max(worst, float(np.max(np.abs(zeros.energies[:m] - e[:m]))))
        curves[sector].append([model.scaled_energy(float(x), params, sector)
                               for x in e[:args.levels]])

print(f"worst |series zero - eigenvalue| over the sweep: {worst:.3e}")

x_grid = [model.x_from_coupling(float(g), args.u) for g in g_grid]
sector = list(all_sectors())[0]
print(f"\nscaled levels, sector q={sector.q} parity={sector.parity:+d}:")
print("    g        x      " + "  ".join(f"E'_{k}" for k in range(4)))
for g, x, row in zip(g_grid, x_grid, curves[sector]):
    vals = "  ".join(f"{v:7.3f}" for v in row[:4])
    print(f"  {g:.4f}  {x:6.3f}  {vals}")

if args.plot:
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for sector, rows in curves.items():
        arr = np.array(rows)
        style = "-" if sector.parity == 1 else "--"
        for k in range(args.levels):
            ax.plot(x_grid, arr[:, k], style, lw=0.8,
                    color="C0" if sector.q == 0.25 else "C3")
    for n in range(1, args.levels + 1):
        ax.axhline(n, color="k", lw=0.4, alpha=0.4)
    ax.set_xlabel(r"$x = -\log_{10}(1 - g/g_c)$")
    ax.set_ylabel(r"scaled energy $E'$")
    ax.set_ylim(-1, args.levels + 1)
    fig.tight_layout()
    fig.savefig("spectrum_vs_coupling.png", dpi=150)
    print("\nwrote spectrum_vs_coupling.png")
