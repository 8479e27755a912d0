"""Pole trajectories of S_l(k, lam): seeds, classification and full studies.

A study starts from bound states on the positive imaginary k axis and
continues each one toward decreasing lam.  When a branch passes a simple
bifurcation (a bound state turning into a resonance pair) the departing
branches are followed as children of the incoming branch.
"""

from __future__ import annotations

import enum
import logging
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .continuation import (
    Branch,
    StepControl,
    StopRules,
    Termination,
    correct,
    run_branch,
    solve_abe,
)
from .errors import (
    ConvergenceError,
    DomainError,
    EvaluationError,
    ResonanceTracerError,
    SeedNotFoundError,
    SingularSystemError,
)
from .potentials import RadialPotential
from .solver import RadialGrid, RadialProblem

__all__ = [
    "Seed",
    "StudyDefinition",
    "StateClass",
    "make_residual",
    "find_bound_state",
    "classify",
    "run_study",
    "iter_branches",
    "resolve_threads",
]

log = logging.getLogger(__name__)

SEED_TOL = 1e-8
AXIS_TOL = 1e-6
THRESHOLD_RADIUS = 1e-4
SWITCH_DOT = 0.9


class StateClass(str, enum.Enum):
    BOUND = "bound"
    VIRTUAL = "virtual"
    RESONANCE = "resonance"
    THRESHOLD = "threshold"


@dataclass(frozen=True)
class Seed:
    """A start point ``k = i im_k`` at ``lam``; with ``im_k=None`` it is searched in ``bracket``."""

    lam: float
    im_k: Optional[float] = None
    bracket: Optional[tuple] = None

    def __post_init__(self):
        if self.im_k is None and self.bracket is None:
            raise DomainError("a seed needs either im_k or a search bracket")
        if self.im_k is not None and not self.im_k > 0:
            raise DomainError(f"bound-state seeds need Im k > 0, got {self.im_k}")
        if self.bracket is not None:
            lo, hi = self.bracket
            if not 0 < lo < hi:
                raise DomainError(f"seed bracket must satisfy 0 < lo < hi, got {self.bracket}")


@dataclass
class StudyDefinition:
    potential: RadialPotential
    l: int
    grid: RadialGrid
    lambda_range: tuple
    seeds: list
    step: StepControl = field(default_factory=StepControl)
    max_steps: int = 2000
    im_k_floor: float = -3.0
    # tighter than the engine default: at a bracket of 1e-6 the located point
    # can sit far enough off the singular point for the rank test to see rank 2
    tol_s: float = 1e-8
    threads: int = 1

    def __post_init__(self):
        lo, hi = self.lambda_range
        if lo > hi:
            raise DomainError(f"lambda range is empty: {self.lambda_range}")
        for seed in self.seeds:
            if not lo <= seed.lam <= hi:
                raise DomainError(f"seed lambda {seed.lam} outside range {self.lambda_range}")

    def problem(self):
        return make_residual(self)


def make_residual(study):
    """The map ``(Re k, Im k, lam) -> (Re F_l, Im F_l)`` of a study, with its scale."""
    return RadialProblem(study.potential, study.l, study.grid)


def resolve_threads(threads=None):
    """Thread count from the argument or ``RESONANCE_TRACER_THREADS``; 0 means all CPUs."""
    if threads is None:
        threads = int(os.environ.get("RESONANCE_TRACER_THREADS", "1") or 1)
    if threads < 0:
        raise DomainError("thread count must be >= 0")
    return threads or (os.cpu_count() or 1)


def _axis_values(problem, lam, ys):
    out = np.full(len(ys), complex(np.nan, np.nan))
    for i, y in enumerate(ys):
        try:
            out[i] = problem.regularized(complex(0.0, y), lam)
        except (EvaluationError, ArithmeticError):
            pass
    return out


def find_bound_state(study, lam, im_k_bracket, n_scan=200):
    """Im k of a bound state at ``lam`` with ``k = i Im k`` inside ``im_k_bracket``.

    On the positive imaginary axis F_l has a constant phase for a real
    potential, so after checking that, the zero is bracketed by a sign scan of
    the projected real function and refined with Brent's method.  Sign changes
    through poles of F are discarded by checking ``|F|`` at the root.  If the
    phase check fails, Newton in (Re k, Im k) at fixed lam is used instead.
    """
    lo, hi = (float(v) for v in im_k_bracket)
    if not 0 < lo < hi:
        raise DomainError(f"bracket must satisfy 0 < lo < hi, got {im_k_bracket}")
    problem = make_residual(study)
    ys = np.linspace(lo, hi, n_scan)
    vals = _axis_values(problem, lam, ys)
    finite = np.isfinite(vals)
    if not finite.any():
        raise SeedNotFoundError(f"F could not be evaluated anywhere in {im_k_bracket}")

    # common phase of F on the axis: F = |F| e^{i phi} up to sign
    big = vals[finite][np.argmax(np.abs(vals[finite]))]
    phase = big / abs(big)
    projected = (vals / phase).real
    leak = np.abs((vals[finite] / phase).imag) / np.maximum(np.abs(vals[finite]), 1e-300)
    if leak.max() > 1e-6:
        log.info("F is not of constant phase on the imaginary axis; using 2D Newton")
        return _newton_seed(study, problem, lam, ys, vals)

    def g(y):
        return (problem.regularized(complex(0.0, y), lam) / phase).real

    roots = []
    for i in range(n_scan - 1):
        a, b = projected[i], projected[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)):
            continue
        if a == 0:
            cand = ys[i]
        elif a * b < 0:
            try:
                cand = brentq(g, ys[i], ys[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
            except (EvaluationError, ArithmeticError, ValueError):
                continue
        else:
            continue
        x = np.array([0.0, cand, lam])
        try:
            if np.linalg.norm(problem(x)) <= SEED_TOL * problem.scale(x):
                roots.append(cand)
        except (EvaluationError, ArithmeticError):
            continue
    if not roots:
        raise SeedNotFoundError(f"no bound state with Im k in {im_k_bracket} at lambda={lam}")
    if len(roots) > 1:
        warnings.warn(
            f"{len(roots)} bound states in {im_k_bracket} at lambda={lam}; "
            f"returning the one closest to {hi}",
            stacklevel=2,
        )
    return max(roots)


def _newton_seed(study, problem, lam, ys, vals):
    mags = np.where(np.isfinite(vals), np.abs(vals), np.inf)
    start = np.array([0.0, ys[int(np.argmin(mags))], lam])
    ctl = StepControl(newton_tol=SEED_TOL, newton_max_iter=20)
    try:
        x, _, _ = correct(problem, start, np.array([0.0, 0.0, 1.0]), ctl, problem.scale)
    except (ConvergenceError, SingularSystemError, EvaluationError) as exc:
        raise SeedNotFoundError(f"2D Newton seed search failed at lambda={lam}: {exc}") from exc
    if abs(x[0]) > AXIS_TOL or x[1] <= 0:
        raise SeedNotFoundError(f"Newton converged off the positive imaginary axis: {x[:2]}")
    return float(x[1])


def classify(x, axis_tol=AXIS_TOL, threshold_radius=THRESHOLD_RADIUS):
    """State class of a pole at ``x = (Re k, Im k, lam)``.

    >>> classify((0.0, 0.93, 25.0)).value
    'bound'
    """
    re_k, im_k = float(x[0]), float(x[1])
    if math.hypot(re_k, im_k) < threshold_radius:
        return StateClass.THRESHOLD
    if abs(re_k) <= axis_tol:
        return StateClass.BOUND if im_k > 0 else StateClass.VIRTUAL
    # off-axis poles of a real potential lie in the lower half plane
    return StateClass.RESONANCE


def iter_branches(branch):
    """Depth-first iteration over a branch and its switched children."""
    yield branch
    for child in branch.children:
        yield from iter_branches(child)


def _seed_point(study, problem, seed):
    if seed.im_k is None:
        im_k = find_bound_state(study, seed.lam, seed.bracket)
    else:
        im_k = seed.im_k
        x = np.array([0.0, im_k, seed.lam])
        if np.linalg.norm(problem(x)) > SEED_TOL * problem.scale(x):
            width = max(0.05 * im_k, 1e-3)
            im_k = find_bound_state(
                study, seed.lam, (max(im_k - width, 0.5 * im_k), im_k + width)
            )
    return np.array([0.0, im_k, seed.lam])


def _trace_seed(study, index, seed, executor):
    problem = make_residual(study)
    lam_min, lam_max = study.lambda_range
    floor = study.im_k_floor
    stop = StopRules(
        lambda_min=lam_min,
        lambda_max=lam_max,
        max_steps=study.max_steps,
        predicate=lambda x: x[1] < floor,
        # land on the threshold when a pole crosses the origin without bifurcating (l = 0)
        landmark=lambda x: x[1],
        landmark_tol=0.5 * THRESHOLD_RADIUS,
    )
    label = str(index)
    try:
        x0 = _seed_point(study, problem, seed)
        branch = run_branch(
            problem, x0, [0.0, 0.0, -1.0], study.step, stop, problem.scale,
            tol_s=study.tol_s, executor=executor, label=label,
        )
    except ResonanceTracerError as exc:
        log.warning("seed %d failed: %s", index, exc)
        return Branch(
            label=label, termination=Termination.SOLVER_FAILURE,
            error=f"{type(exc).__name__}: {exc}",
        )

    child_id = 0
    for event in branch.events:
        try:
            event.tangents_out = solve_abe(problem, event.x_t, executor=executor)
        except ResonanceTracerError as exc:
            log.warning("branch %s: branch switching failed: %s", label, exc)
            event.switch_error = f"{type(exc).__name__}: {exc}"
            continue
        for t in event.tangents_out:
            if abs(float(t @ event.tangent_in)) >= SWITCH_DOT:
                continue
            for sgn in (1.0, -1.0):
                child_id += 1
                child_label = f"{label}.{child_id}"
                try:
                    child = run_branch(
                        problem, event.x_t, sgn * t, study.step, stop, problem.scale,
                        exact_tangent=True, tol_s=study.tol_s, executor=executor,
                        label=child_label,
                    )
                except ResonanceTracerError as exc:
                    child = Branch(
                        label=child_label, termination=Termination.SOLVER_FAILURE,
                        error=f"{type(exc).__name__}: {exc}",
                    )
                branch.children.append(child)
    return branch


def run_study(study, threads=None):
    """Trace every seed of ``study``; returns one Branch per seed (children attached).

    A seed that cannot be polished or started yields an empty branch with
    ``termination == solver_failure`` and its diagnostic in ``branch.error``.
    """
    n_threads = resolve_threads(study.threads if threads is None else threads)
    if n_threads <= 1:
        return [_trace_seed(study, i, s, None) for i, s in enumerate(study.seeds)]
    # separate pools: seed tasks block on evaluator tasks
    with ThreadPoolExecutor(n_threads) as evaluators, ThreadPoolExecutor(n_threads) as seeds:
        futures = [
            seeds.submit(_trace_seed, study, i, s, evaluators) for i, s in enumerate(study.seeds)
        ]
        return [f.result() for f in futures]
