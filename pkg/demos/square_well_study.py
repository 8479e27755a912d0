"""
Pole trajectories of an s-wave square well
==========================================

The ground state passes through k = 0 into a virtual state without any
bifurcation.  The excited states also turn virtual, then meet a second
virtual pole and leave the imaginary axis at k = -i.
"""

import math

import numpy as np

from resonance_tracer import RadialGrid, RadialPotential, Seed, StudyDefinition, run_study
from resonance_tracer.tracer import classify

study = StudyDefinition(
    potential=RadialPotential("square_well", {"a": 1.0}),
    l=0,
    grid=RadialGrid(1.1, 2048),
    lambda_range=(0.05, 40.0),
    seeds=[Seed(lam, bracket=(0.1, 3.0)) for lam in (5.0, 15.0, 32.0)],
    # deep resonances: let the branches go further down than the default -3
    im_k_floor=-4.5,
)
branches = run_study(study)

for n, b in enumerate(branches):
    classes = [classify(p.x).value for p in b.points]
    changes = [c for i, c in enumerate(classes) if i == 0 or c != classes[i - 1]]
    print(f"branch {n}: {' -> '.join(changes)}; events at",
          [f"{e.x_t[0]:.1e}{e.x_t[1]:+.6f}i (lambda {e.x_t[2]:.3f})" for e in b.events])
    for child in b.children:
        re_k, im_k, lam = child.xs[-1]
        print(f"    {child.label}: ends at k = {re_k:.3f}{im_k:+.3f}i, lambda = {lam:.3f}, "
              f"|Re k| - {n}pi = {abs(re_k) - n * math.pi:+.3f}")
