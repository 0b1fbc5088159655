#!/usr/bin/env python3
"""Nondegenerate level crossings on the pole lines.

A pole line usually carries no eigenvalue: the series diverges there and
the adjacent levels only touch it pairwise at isolated degenerate
couplings.  With a reseeded (truncated) series one can detect the other
special case, where a single level rides through the pole line without a
partner.  The script scans one pole line over a coupling window, lists the
special points, and verifies each against diagonalization.
"""

import argparse

import numpy as np

from tpstark import ed, gfunction
from tpstark.model import ModelParams, SectorLabel

parser = argparse.ArgumentParser()
parser.add_argument("--delta", type=float, default=5.0)
parser.add_argument("--u", type=float, default=0.25)
parser.add_argument("--pole-index", type=int, default=1)
parser.add_argument("--x-min", type=float, default=1.0)
parser.add_argument("--x-max", type=float, default=3.0)
args = parser.parse_args()

sector = SectorLabel(q=0.25, parity=1)
points = gfunction.find_nondegenerate_points(
    args.delta, args.u, args.pole_index, sector,
    x_min=args.x_min, x_max=args.x_max, grid_points=200)

print(f"delta = {args.delta}, U = {args.u}, pole line {args.pole_index}, "
      f"x in [{args.x_min}, {args.x_max}]: {len(points)} special point(s)")
for pt in points:
    params = ModelParams(delta=args.delta, stark=args.u, coupling=pt.coupling)
    spec = ed.converge(params, sectors=sector, count=30, tol=1e-11)
    nearest = float(np.min(np.abs(spec.energies - pt.energy)))
    print(f"  x = {pt.x:.6f}  g = {pt.coupling:.8f}  E = {pt.energy:.8f}"
          f"  |E - nearest eigenvalue| = {nearest:.2e}")
