"""
Pole trajectories of a Gaussian well
====================================

Six f-wave bound states of V(r) = -lambda exp(-r^2) are followed toward
weaker potentials.  Each one reaches k = 0, where a bifurcation is detected
and two mirror-image resonance branches are launched.  Takes about a minute.
"""

import numpy as np

from resonance_tracer import RadialGrid, RadialPotential, Seed, StudyDefinition, run_study
from resonance_tracer.tracer import iter_branches

study = StudyDefinition(
    potential=RadialPotential("gaussian"),
    l=3,
    grid=RadialGrid(4.8, 8192),
    lambda_range=(0.0, 200.0),
    seeds=[Seed(lam, bracket=(0.1, 2.0)) for lam in (25, 46, 72, 104, 142, 188)],
)
branches = run_study(study, threads=0)

for b in branches:
    ev = b.events[0]
    print(f"branch {b.label}: seed Im k = {b.points[0].x[1]:.10f}, "
          f"threshold at lambda = {ev.x_t[2]:.5f}, |k| = {np.hypot(*ev.x_t[:2]):.1e}")
    for t in ev.tangents_out:
        print("    departing tangent", np.round(t, 6) + 0.0)

# the two resonance branches of a pair are complex conjugate poles
for b in branches:
    left, right = b.children
    gap = np.max(np.abs(left.xs - right.xs * [-1, 1, 1]))
    end = left.xs[-1]
    print(f"pair {b.label}: mirror gap {gap:.1e}, ends at k = {end[0]:.3f}{end[1]:+.3f}i, "
          f"lambda = {end[2]:.2f} ({left.termination.value})")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for root in branches:
        for b in iter_branches(root):
            ax1.plot(b.xs[:, 0], b.xs[:, 1], lw=1)
            ax2.plot(b.xs[:, 2], b.xs[:, 1], lw=1)
    ax1.set_xlabel("Re k"); ax1.set_ylabel("Im k")
    ax2.set_xlabel("lambda"); ax2.set_ylabel("Im k")
    fig.savefig("gaussian_poles.png", dpi=120)
    print("wrote gaussian_poles.png")
