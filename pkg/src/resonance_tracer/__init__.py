"""Trajectories of S-matrix poles of the radial Schroedinger equation by pseudo-arclength continuation."""

from .continuation import (
    BifurcationEvent,
    Branch,
    ContinuationPoint,
    StepControl,
    StopRules,
    Termination,
    run_branch,
    solve_abe,
)
from .potentials import RadialPotential
from .solver import RadialGrid, RadialProblem, extract_amplitudes, integrate_numerov, residual_F
from .tracer import Seed, StateClass, StudyDefinition, classify, find_bound_state, run_study

__version__ = "0.1.0"
