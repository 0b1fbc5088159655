#!/usr/bin/env python3
"""Power law of the gap closing toward the collapse coupling.

With delta = U the excitation gap closes as epsilon ~ (g_c - g)^(3/4).
On the logarithmic axis x = -log10(1 - g/g_c) that is a straight line of
slope -3/4.  The script computes the gap from converged diagonalization
along x, fits the exponent, and prints the curve.
"""

import argparse

from tpstark import criticality

parser = argparse.ArgumentParser()
parser.add_argument("--u", type=float, default=0.2)
parser.add_argument("--x-min", type=float, default=1.5)
parser.add_argument("--x-max", type=float, default=4.0)
parser.add_argument("--points", type=int, default=11)
parser.add_argument("--plot", action="store_true")
args = parser.parse_args()

fit = criticality.gap_exponent(args.u, x_min=args.x_min, x_max=args.x_max,
                               n_points=args.points)
curve = fit.curve

print(f"U = {args.u}, fit window x in [{args.x_min}, {args.x_max}]")
print("    x       gap")
for x, gap in zip(curve.x, curve.gaps):
    print(f"  {x:5.2f}   {gap:.6e}")
print(f"\nexponent  = {fit.exponent:.5f}   (expected 0.75)")
print(f"r squared = {fit.r_squared:.8f}")

if args.plot:
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogy(curve.x, curve.gaps, "o", ms=4)
    ax.semilogy(curve.x, 10.0 ** (fit.intercept + fit.slope * curve.x), "-",
                lw=1, label=f"slope {fit.slope:.4f}")
    ax.set_xlabel(r"$x = -\log_{10}(1 - g/g_c)$")
    ax.set_ylabel("gap")
    ax.legend()
    fig.tight_layout()
    fig.savefig("gap_exponent.png", dpi=150)
    print("wrote gap_exponent.png")
