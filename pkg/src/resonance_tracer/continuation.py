"""Pseudo-arclength continuation with simple-bifurcation detection and branch switching.

The engine follows the solution curve of a black-box map ``F: R^(n+1) -> R^n``.
Points are written ``x = (u, lam)`` with the continuation parameter last.  Each
step is an Euler prediction along the unit tangent followed by Newton
correction on the augmented system

    F(x) = 0,    (x - x_pred) . t_prev = 0,

with central-difference Jacobians.  Simple bifurcation points are detected by
a sign change of ``det [F_x; t^T]`` between consecutive points, located by
bisection in arclength, and the departing directions are obtained from the
algebraic bifurcation equation.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    ConvergenceError,
    DomainError,
    EvaluationError,
    LocalizationError,
    NoRealBranchError,
    NotSimpleBifurcationError,
    SingularSystemError,
)

__all__ = [
    "EPS0",
    "StepControl",
    "StopRules",
    "ContinuationPoint",
    "BifurcationEvent",
    "Branch",
    "Termination",
    "JacobianEvaluationError",
    "fd_jacobian",
    "predict",
    "correct",
    "next_tangent",
    "augmented_det",
    "detect_and_locate_bifurcation",
    "abe_directions",
    "solve_abe",
    "run_branch",
]

log = logging.getLogger(__name__)

EPS0 = np.finfo(float).eps ** (1.0 / 3.0)
ORTHO_TOL = 1e-12
SIGMA_TOL = 1e-6
MAX_BISECTIONS = 60
# conditioning limit of the bordered systems
_COND_LIMIT = 1e13

# failures that shrink the step instead of aborting the branch
_STEP_FAILURES = (EvaluationError, ConvergenceError, SingularSystemError, ArithmeticError, DomainError)


class JacobianEvaluationError(EvaluationError):
    """Evaluation of F failed while forming one Jacobian column."""

    def __init__(self, column, cause):
        super().__init__(f"evaluation failed in Jacobian column {column}: {cause}")
        self.column = column


class Termination(str, enum.Enum):
    LAMBDA_BOUND = "lambda_bound"
    MAX_STEPS = "max_steps"
    SOLVER_FAILURE = "solver_failure"
    USER_STOP = "user_stop"
    CLOSED_LOOP = "closed_loop"


@dataclass
class StepControl:
    """Step-size and Newton settings; defaults follow the Gaussian-well experiment."""

    ds: float = 1e-2
    ds_min: float = 1e-4
    ds_max: float = 5e-2
    newton_tol: float = 1e-10
    newton_max_iter: int = 8

    def __post_init__(self):
        if not (0 < self.ds_min <= self.ds <= self.ds_max):
            raise DomainError(
                f"step control needs 0 < ds_min <= ds <= ds_max, got "
                f"{self.ds_min}, {self.ds}, {self.ds_max}"
            )
        if self.newton_tol <= 0 or self.newton_max_iter < 1:
            raise DomainError("newton_tol must be positive and newton_max_iter >= 1")


@dataclass
class StopRules:
    lambda_min: float = -math.inf
    lambda_max: float = math.inf
    max_steps: int = 10_000
    # extra stop condition on an accepted point, e.g. a floor on Im k
    predicate: Optional[Callable[[np.ndarray], bool]] = None
    # stop when the curve returns to its starting point
    close_loop: bool = False
    # reject steps that turn the tangent by more than acos(min_tangent_cos)
    min_tangent_cos: float = 0.8
    # scalar function of x whose zeros are landed on: a step that changes its
    # sign (without bracketing a bifurcation) is shortened to |landmark| <= landmark_tol
    landmark: Optional[Callable[[np.ndarray], float]] = None
    landmark_tol: float = 5e-5


@dataclass
class ContinuationPoint:
    x: np.ndarray
    tangent: np.ndarray
    residual_norm: float
    arclength: float
    det: float = math.nan
    predicted: Optional[np.ndarray] = None
    iterations: int = 0


@dataclass
class BifurcationEvent:
    x_t: np.ndarray
    tangents_out: list
    det_before: float
    det_after: float
    tangent_in: Optional[np.ndarray] = None
    index: int = -1  # the event lies between points[index] and points[index + 1]
    switch_error: Optional[str] = None


@dataclass
class Branch:
    points: list = field(default_factory=list)
    events: list = field(default_factory=list)
    termination: Termination = Termination.MAX_STEPS
    children: list = field(default_factory=list)
    label: str = ""
    error: Optional[str] = None

    @property
    def xs(self):
        return np.array([p.x for p in self.points])


def _unit(v):
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0 or not np.isfinite(norm):
        raise DomainError("direction vector must be nonzero and finite")
    return v / norm


def _scale_of(scale, x):
    return 1.0 if scale is None else float(scale(x))


def fd_jacobian(F, x, eps0=None, executor=None):
    """Central-difference Jacobian ``n x (n+1)`` of ``F`` at ``x``.

    Column j uses the step ``eps0 * max(1, |x_j|)``.  With an ``executor`` the
    ``2(n+1)`` evaluations are submitted concurrently, so ``F`` must be pure.
    """
    x = np.asarray(x, dtype=float)
    eps0 = EPS0 if eps0 is None else eps0
    m = x.size
    args = []
    steps = np.empty(m)
    for j in range(m):
        step = eps0 * max(1.0, abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] += step
        xm[j] -= step
        steps[j] = xp[j] - xm[j]
        args += [xp, xm]

    def call(i):
        try:
            return np.asarray(F(args[i]), dtype=float)
        except Exception as exc:  # reported with its column
            raise JacobianEvaluationError(i // 2, exc) from exc

    if executor is None:
        values = [call(i) for i in range(2 * m)]
    else:
        values = list(executor.map(call, range(2 * m)))
    cols = [(values[2 * j] - values[2 * j + 1]) / steps[j] for j in range(m)]
    return np.column_stack(cols)


def predict(point, ds):
    """Euler predictor ``x + ds * tangent``."""
    return np.asarray(point.x, dtype=float) + ds * np.asarray(point.tangent, dtype=float)


def _bordered_solve(J, row, rhs):
    A = np.vstack([J, row])
    if not np.all(np.isfinite(A)):
        raise SingularSystemError("bordered matrix contains non-finite entries")
    if np.linalg.cond(A) > _COND_LIMIT:
        raise SingularSystemError("bordered matrix is numerically singular")
    return np.linalg.solve(A, rhs)


def correct(F, x_pred, tangent_prev, ctl, scale=None, eps0=None, executor=None):
    """Newton correction onto the hyperplane through ``x_pred`` orthogonal to ``tangent_prev``.

    Returns ``(x_new, residual_norm, iterations)``; iterations counts Newton
    updates, so an exact ``x_pred`` returns 0.
    """
    x_pred = np.asarray(x_pred, dtype=float)
    t = np.asarray(tangent_prev, dtype=float)
    x = x_pred.copy()
    for it in range(ctl.newton_max_iter + 1):
        f = np.asarray(F(x), dtype=float)
        ortho = float((x - x_pred) @ t)
        res = float(np.linalg.norm(f))
        if not np.isfinite(res):
            raise EvaluationError(f"non-finite residual at {x}")
        if res <= ctl.newton_tol * _scale_of(scale, x) and abs(ortho) <= ORTHO_TOL:
            return x, res, it
        if it == ctl.newton_max_iter:
            break
        J = fd_jacobian(F, x, eps0, executor)
        x = x + _bordered_solve(J, t, -np.append(f, ortho))
    raise ConvergenceError(
        f"Newton did not converge in {ctl.newton_max_iter} iterations (|F| = {res:.3e})"
    )


def next_tangent(J, tangent_prev):
    """Unit tangent from ``[J; t_prev^T] t = e_{n+1}``; oriented so ``t . t_prev > 0``."""
    J = np.asarray(J, dtype=float)
    rhs = np.zeros(J.shape[0] + 1)
    rhs[-1] = 1.0
    return _unit(_bordered_solve(J, np.asarray(tangent_prev, dtype=float), rhs))


def augmented_det(J, tangent):
    """``det [J; tangent^T]``."""
    return float(np.linalg.det(np.vstack([np.asarray(J, dtype=float), tangent])))


def _sign(v):
    return 1.0 if v >= 0 else -1.0


def _step_to(F, base, target_s, ctl, scale, eps0, executor):
    """Predict from ``base`` by arclength ``target_s`` (may be negative) and correct."""
    x_pred = predict(base, target_s)
    x, res, its = correct(F, x_pred, base.tangent, ctl, scale, eps0, executor)
    J = fd_jacobian(F, x, eps0, executor)
    t = next_tangent(J, base.tangent)
    return ContinuationPoint(
        x, t, res, base.arclength + target_s, augmented_det(J, t), x_pred, its
    )


def detect_and_locate_bifurcation(
    F, a, b, tol_s=1e-6, ctl=None, scale=None, eps0=None, executor=None
):
    """Locate a simple bifurcation between consecutive points ``a`` and ``b``.

    Returns None when ``det`` has the same sign at both points.  Otherwise the
    arclength interval is bisected (each trial point predicted from the nearer
    converged end and corrected) until it is shorter than ``tol_s``; the
    midpoint of the final bracket is returned as ``x_t``.
    """
    if _sign(a.det) == _sign(b.det):
        return None
    ctl = ctl or StepControl()
    left, right = a, b
    sign_left = _sign(a.det)
    lo, hi = a.arclength, b.arclength
    for _ in range(MAX_BISECTIONS):
        if hi - lo < tol_s:
            x_t = 0.5 * (left.x + right.x)
            return BifurcationEvent(
                x_t=x_t, tangents_out=[], det_before=a.det, det_after=b.det,
                tangent_in=left.tangent.copy(),
            )
        mid = 0.5 * (lo + hi)
        try:
            trial = _step_to(F, left, mid - lo, ctl, scale, eps0, executor)
        except _STEP_FAILURES:
            try:
                trial = _step_to(F, right, mid - hi, ctl, scale, eps0, executor)
            except _STEP_FAILURES as exc:
                raise LocalizationError(f"trial point at s={mid} failed: {exc}") from exc
        trial.arclength = mid
        if _sign(trial.det) == sign_left:
            left, lo = trial, mid
        else:
            right, hi = trial, mid
    raise LocalizationError(f"bisection exceeded {MAX_BISECTIONS} iterations")


def _land_on_zero(F, cur, new, g, tol, ctl, scale, eps0, executor):
    """Shorten the step ``cur -> new`` so that it ends on a zero of ``g``.

    Illinois-modified regula falsi in arclength; any failure keeps ``new``.
    """
    g_lo, g_hi = float(g(cur.x)), float(g(new.x))
    if g_lo == 0 or g_hi == 0 or (g_lo > 0) == (g_hi > 0) or abs(g_hi) <= tol:
        return new
    lo, hi = 0.0, new.arclength - cur.arclength
    side = 0
    for _ in range(MAX_BISECTIONS):
        s = lo - g_lo * (hi - lo) / (g_hi - g_lo)
        try:
            trial = _step_to(F, cur, s, ctl, scale, eps0, executor)
        except _STEP_FAILURES:
            return new
        g_t = float(g(trial.x))
        if abs(g_t) <= tol:
            return trial
        if (g_t > 0) == (g_lo > 0):
            lo, g_lo = s, g_t
            if side == -1:
                g_hi *= 0.5
            side = -1
        else:
            hi, g_hi = s, g_t
            if side == 1:
                g_lo *= 0.5
            side = 1
    return new


def abe_directions(c11, c12, c22, tol=1e-10):
    """Real unit roots ``(alpha, beta)`` of ``c11 a^2 + 2 c12 a b + c22 b^2 = 0``.

    >>> [tuple(float(abs(v)) for v in d) for d in abe_directions(0.0, 2.0, 0.0)]
    [(1.0, 0.0), (0.0, 1.0)]
    """
    size = max(abs(c11), abs(c12), abs(c22))
    if size == 0:
        raise NoRealBranchError("all coefficients of the bifurcation equation vanish")
    c11, c12, c22 = c11 / size, c12 / size, c22 / size
    disc = c12 * c12 - c11 * c22
    if disc < -tol:
        raise NoRealBranchError(f"bifurcation equation has complex roots (disc = {disc:.3e})")
    root = math.sqrt(max(disc, 0.0))
    q = -(c12 + math.copysign(root, c12))
    first = np.array([q, c11]) if q != 0 else np.array([-c12, c11])
    second = np.array([c22, q]) if q != 0 else np.array([c22, -c12])
    out = []
    for v in (first, second):
        v = _unit(v)
        # fix the arbitrary sign: largest component positive
        if v[np.argmax(np.abs(v))] < 0:
            v = -v
        out.append(v)
    return out


def solve_abe(F, x_t, sigma_tol=SIGMA_TOL, eps0=None, hess_step=None, executor=None):
    """Tangents of the two branches crossing at the simple bifurcation point ``x_t``.

    The kernel ``{t1, t2}`` and left null vector ``n1`` come from an SVD of the
    finite-difference Jacobian.  The ABE coefficients ``n1 . F_xx[ti, tj]`` are
    formed from three directional second differences along ``t1``, ``t2`` and
    ``t1 + t2``; the full Hessian tensor is never built.
    """
    x_t = np.asarray(x_t, dtype=float)
    eps0 = EPS0 if eps0 is None else eps0
    J = fd_jacobian(F, x_t, eps0, executor)
    n = J.shape[0]
    U, sing, Vt = np.linalg.svd(J, full_matrices=True)
    # relative to the Jacobian size, but never below an absolute sigma_tol
    sigma_ref = max(1.0, sing[0] if sing.size else 0.0)
    rank = int(np.sum(sing > sigma_tol * sigma_ref))
    nullity = J.shape[1] - rank
    if nullity != 2:
        raise NotSimpleBifurcationError(
            f"Jacobian kernel has dimension {nullity}, expected 2 "
            f"(singular values {sing}, sigma_tol={sigma_tol})"
        )
    t1, t2 = Vt[-2], Vt[-1]
    n1 = U[:, n - 1]
    h = math.sqrt(eps0) if hess_step is None else hess_step
    f0 = np.asarray(F(x_t), dtype=float)

    def second(u):
        fp = np.asarray(F(x_t + h * u), dtype=float)
        fm = np.asarray(F(x_t - h * u), dtype=float)
        return float(n1 @ (fp - 2.0 * f0 + fm)) / (h * h)

    c11 = second(t1)
    c22 = second(t2)
    c12 = 0.5 * (second(t1 + t2) - c11 - c22)
    log.debug("ABE at %s: C11=%.6g C12=%.6g C22=%.6g", x_t, c11, c12, c22)
    out = []
    for alpha, beta in abe_directions(c11, c12, c22):
        t = _unit(alpha * t1 + beta * t2)
        out.append(-t if t[np.argmax(np.abs(t))] < 0 else t)
    return out


def run_branch(
    F,
    start,
    initial_direction_hint,
    ctl=None,
    stop=None,
    scale=None,
    *,
    exact_tangent=False,
    tol_s=1e-6,
    eps0=None,
    executor=None,
    label="",
):
    """Continue the solution curve of ``F`` from ``start``.

    ``start`` is first Newton-corrected with the hint as hyperplane normal.
    The first tangent solves the bordered system seeded with the normalized
    hint (or is the hint itself with ``exact_tangent``, as needed when
    starting on a bifurcation point where that system is singular).  Newton
    success in at most 3 iterations grows the step by 1.3, failure halves it;
    a failure at ``ds_min`` ends the branch.  After every accepted step a sign
    change of the augmented determinant triggers localization of a simple
    bifurcation, which is recorded and passed through.
    """
    ctl = ctl or StepControl()
    stop = stop or StopRules()
    hint = _unit(initial_direction_hint)
    # polish the start on the hyperplane through it orthogonal to the hint
    try:
        x0, res0, _ = correct(F, np.asarray(start, dtype=float), hint, ctl, scale, eps0, executor)
    except _STEP_FAILURES as exc:
        raise DomainError(f"start point {start} does not converge to a solution: {exc}") from exc
    J0 = fd_jacobian(F, x0, eps0, executor)
    t0 = hint if exact_tangent else next_tangent(J0, hint)
    # on a bifurcation point det is ~0 and carries no sign information
    det0 = math.nan if exact_tangent else augmented_det(J0, t0)
    branch = Branch(points=[ContinuationPoint(x0, t0, res0, 0.0, det0)], label=label)

    ds = ctl.ds
    steps = 0
    while True:
        if steps >= stop.max_steps:
            branch.termination = Termination.MAX_STEPS
            break
        cur = branch.points[-1]
        x_pred = predict(cur, ds)
        closing = False
        if stop.close_loop and cur.arclength > 4 * ctl.ds_max:
            gap = x0 - cur.x
            ahead = float(gap @ cur.tangent)
            if 0 < ahead <= ds and np.linalg.norm(gap) <= 1.5 * ds:
                x_pred, closing = x0.copy(), True
        try:
            x_new, res, its = correct(F, x_pred, cur.tangent, ctl, scale, eps0, executor)
            if np.linalg.norm(x_new - x_pred) > max(ds, ctl.ds_min):
                raise ConvergenceError("corrector moved further than the step")
            J = fd_jacobian(F, x_new, eps0, executor)
            t_new = next_tangent(J, cur.tangent)
            if float(t_new @ cur.tangent) < stop.min_tangent_cos:
                raise ConvergenceError("tangent turned too sharply")
        except _STEP_FAILURES as exc:
            if ds <= ctl.ds_min:
                log.info("branch %s: giving up at ds_min: %s", label, exc)
                branch.termination = Termination.SOLVER_FAILURE
                break
            ds = max(0.5 * ds, ctl.ds_min)
            continue
        step_len = float((x_pred - cur.x) @ cur.tangent)
        new = ContinuationPoint(
            x_new, t_new, res, cur.arclength + step_len, augmented_det(J, t_new), x_pred, its
        )
        lam = x_new[-1]
        if lam < stop.lambda_min or lam > stop.lambda_max:
            branch.termination = Termination.LAMBDA_BOUND
            break
        if stop.predicate is not None and stop.predicate(x_new):
            branch.termination = Termination.USER_STOP
            break
        brackets_event = math.isnan(cur.det) or _sign(cur.det) != _sign(new.det)
        if stop.landmark is not None and not closing and not brackets_event:
            new = _land_on_zero(
                F, cur, new, stop.landmark, stop.landmark_tol, ctl, scale, eps0, executor
            )
        branch.points.append(new)
        steps += 1
        if not math.isnan(cur.det):
            event = detect_and_locate_bifurcation(
                F, cur, new, tol_s, ctl, scale, eps0, executor
            )
            if event is not None:
                event.index = len(branch.points) - 2
                branch.events.append(event)
                log.info("branch %s: bifurcation near %s", label, event.x_t)
        if closing:
            branch.termination = Termination.CLOSED_LOOP
            break
        if its <= 3:
            ds = min(1.3 * ds, ctl.ds_max)
    return branch
