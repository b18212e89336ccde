"""
Corrected probabilities for the two detection schemes
=====================================================

The walk is run with loss only (no gain).  Multiplying the surviving
probability by e^{2 gamma t} gives the norm of the balanced gain/loss walk,
whose growth or decay reveals the PT phase after a handful of steps.
"""

import numpy as np

from nbwalk import (CoinParams, SchemeSpec, corrected_site, corrected_total, evolve, fit_exponential,
                    lattice_for, load_preset, locate_ep)

base = load_preset("wall-start-a")
gamma = base.gamma

print("walker starts at the wall, seven steps: P(t)")
print("theta2_R/pi  " + "  ".join(f"t={t}" for t in range(8)))
for t2 in (0.38, 0.40, 0.41, 0.42, 0.45, 0.50):
    right = CoinParams.from_pi(0.5625, t2)
    spec = SchemeSpec.domain_wall(steps=7)
    p = corrected_total(evolve(lattice_for(base.left, right, gamma, spec), spec))
    print(f"   {t2:.2f}     " + " ".join(f"{v:5.3f}" for v in p))

print("\nwalker starts in the bulk at x0 = 6: fitted exponent of P_6(t), t = 1..7")
for t2 in (0.38, 0.40, 0.41, 0.42, 0.45, 0.50):
    right = CoinParams.from_pi(0.5625, t2)
    spec = SchemeSpec.bulk(x0=6, steps=7)
    alpha = fit_exponential(corrected_site(evolve(lattice_for(base.left, right, gamma, spec), spec))).param
    print(f"   {t2:.2f}   alpha = {alpha:+.4f}")

# where the sign flips, located by bisection
for criterion, preset in [("probability-unity", "wall-start-a"), ("zero-exponent", "bulk-start"),
                          ("spectral-zero", "wall-start-a"), ("analytic", "wall-start-a")]:
    cfg = load_preset(preset)
    est = locate_ep(gamma, cfg.left, cfg.right.theta1, criterion, (0.40, 0.43))
    print(f"{criterion:>18}: theta2* = {est.theta2_star_pi:.5f} pi")
