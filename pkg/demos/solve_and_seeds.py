"""
Scattering amplitudes and bound-state seeds
===========================================

One solver call at a time: the S-matrix on the real axis, a pole on the
imaginary axis, and the bound-state search that produces continuation seeds.
"""

import numpy as np

from resonance_tracer import RadialGrid, RadialPotential, RadialProblem, StudyDefinition
from resonance_tracer.tracer import find_bound_state

# s waves in a square well of radius 1, matched at R = 1.1
well = RadialPotential("square_well", {"a": 1.0})
problem = RadialProblem(well, 0, RadialGrid(1.1, 2048))

# on the real axis the S-matrix of a real potential is a pure phase
for k in (0.5, 1.0, 2.0):
    s = problem.amplitudes(k, 5.0).s
    print(f"k = {k:.1f}  S = {s:.6f}  |S| - 1 = {abs(s) - 1:.1e}")

# F = k^(2l+1) / (S - 1) vanishes at a pole of S
x = np.array([0.0, 2.15040, 5.0])
print("|F| at the ground state, lambda = 5:", np.linalg.norm(problem(x)))

# seeds are found on the positive imaginary axis
study = StudyDefinition(well, 0, RadialGrid(1.1, 2048), (0.05, 40.0), [])
for lam in (5.0, 15.0, 32.0):
    print(f"lambda = {lam:4.1f}  Im k = {find_bound_state(study, lam, (0.1, 3.0)):.8f}")
