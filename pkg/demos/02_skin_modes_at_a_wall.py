"""Eigenstates of a domain wall between bulks with GBZ radii on opposite sides of 1.

Left bulk has r > 1, right bulk r < 1, so every skin mode is pushed towards
x = 0 from both sides.
"""

import numpy as np

from nbwalk import gbz_radius, load_preset, localization_report, realspace_eigensystem

cfg = load_preset("skin-wall")
print(f"left r = {gbz_radius(cfg.left.theta2, cfg.gamma):.5f}, right r = {gbz_radius(cfg.right.theta2, cfg.gamma):.5f}")

eig = realspace_eigensystem(cfg)
rep = localization_report(eig, cfg)
print(f"{len(rep.eigenvalues)} modes kept out of {cfg.dim} ({int(eig.defective.sum())} flagged defective)")

for d in (2, 5, 10, 15):
    w = rep.weight_within(d)
    print(f"weight within {d:2d} sites of the wall: min {w.min():.4f}  median {np.median(w):.4f}")

# average site profile, folded onto distance from the wall
prof = rep.site_weights.mean(axis=0)
print("\n  x    mean weight")
for x, w in zip(cfg.positions, prof):
    if -6 <= x <= 5:
        print(f"{x:4d}   {w:.4f}  " + "#" * int(60 * w))
