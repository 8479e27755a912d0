"""Renormalized Numerov integration and S-matrix extraction at complex momentum.

The radial equation ``psi'' = g(r) psi`` with ``g = 2 V_eff - k^2`` is
integrated outward from ``psi(0) = 0``.  Instead of wave-function values the
recursion carries the ratios ``R_n = F_{n+1} / F_n`` of the Numerov-transformed
values ``F_n = (1 - T_n) psi_n``, ``T_n = h^2 g_n / 12``::

    R_n = U_n - 1 / R_{n-1},      U_n = (2 + 10 T_n) / (1 - T_n)

so growth like ``exp(|Im k| r)`` never overflows.  The endpoint derivative
uses the fourth-order three-point formula

    psi'_N = [(1/2 - T_{N+1}) psi_{N+1} - (1/2 - T_{N-1}) psi_{N-1}] / h

which needs one grid point beyond ``r_end``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from .errors import DomainError, NumericOverflowError, UndefinedRegularizedFunction
from .specfun import (
    _bessel_and_derivative,
    _check_l,
    _hankel_and_derivative,
    wronskian,
)

__all__ = [
    "RadialGrid",
    "EndpointSolution",
    "ScatteringAmplitudes",
    "RadialProblem",
    "integrate_numerov",
    "extract_amplitudes",
    "residual_F",
    "residual_scale",
]

# relative size of W(psi, j_l) below which psi is the free regular solution and S = 1
S_EQUALS_ONE_TOL = 1e-10
K_MIN = 1e-12


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid ``r_n = n h`` on ``[0, r_end]`` with ``h = r_end / n_points``."""

    r_end: float
    n_points: int

    def __post_init__(self):
        if not self.r_end > 0:
            raise DomainError("r_end must be positive")
        if int(self.n_points) != self.n_points or self.n_points < 16:
            raise DomainError("n_points must be an integer >= 16")
        object.__setattr__(self, "r_end", float(self.r_end))
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def h(self):
        return self.r_end / self.n_points

    def radii(self):
        """Grid radii r_0 .. r_{N+1} (one point past ``r_end`` for the endpoint derivative)."""
        return self.h * np.arange(self.n_points + 2, dtype=float)


@dataclass(frozen=True)
class EndpointSolution:
    """psi(R) and psi'(R) in an arbitrary common normalization."""

    psi: complex
    psi_prime: complex

    def __post_init__(self):
        if self.psi == 0 and self.psi_prime == 0:
            raise DomainError("endpoint solution is identically zero")


@dataclass(frozen=True)
class ScatteringAmplitudes:
    """A_l, B_l, S_l and the regularized function F_l = k^(2l+1) / (S_l - 1).

    ``f`` is None when S is numerically 1 (no scattering).
    """

    a: complex
    b: complex
    s: complex
    f: complex | None


@njit(cache=True, nogil=True)
def _numerov_kernel(profile, centrifugal, lam, k2, h, inv_r0_num):
    # carries D_n = R_n - 1 = 12 T_n / (1 - T_n) + D_{n-1} / (1 + D_{n-1});
    # R_n itself sits within O(h) of 1 and would lose digits in 2 - 1/R
    n_total = profile.shape[0]  # N + 2 points, index 0 is the origin
    h2_12 = h * h / 12.0
    t_cur = h2_12 * (2.0 * lam * profile[1] + centrifugal[1] - k2)
    d = (1.0 + 12.0 * t_cur / (1.0 - t_cur)) - inv_r0_num / (1.0 - t_cur)
    t_prev = t_cur
    d_prev = d
    for n in range(2, n_total - 1):
        t_prev = t_cur
        t_cur = h2_12 * (2.0 * lam * profile[n] + centrifugal[n] - k2)
        d_prev = d
        d = 12.0 * t_cur / (1.0 - t_cur) + d / (1.0 + d)
        if not (np.isfinite(d.real) and np.isfinite(d.imag)) or d == -1.0:
            return 0j, 0j, n
    t_next = h2_12 * (2.0 * lam * profile[n_total - 1] + centrifugal[n_total - 1] - k2)
    # F_N = 1, F_{N+1} = R_N, F_{N-1} = 1 / R_{N-1}
    # (1/2 - T) psi = c (1 + D) with c = 1/2 - e, e = T / (2 (1 - T)); expanded so
    # that the O(1) parts cancel analytically instead of in floating point
    psi = 1.0 / (1.0 - t_cur)
    e_next = 0.5 * t_next / (1.0 - t_next)
    e_prev = 0.5 * t_prev / (1.0 - t_prev)
    dpsi = ((e_prev - e_next) + (0.5 - e_next) * d + (0.5 - e_prev) * d_prev / (1.0 + d_prev)) / h
    return psi, dpsi, -1


@lru_cache(maxsize=64)
def _tabulate(potential, grid, l):
    r = grid.radii()
    profile = np.zeros_like(r)
    profile[1:] = potential.grid_profile(r[1:], grid.h)
    centrifugal = np.zeros_like(r)
    centrifugal[1:] = l * (l + 1) / r[1:] ** 2
    profile.setflags(write=False)
    centrifugal.setflags(write=False)
    return profile, centrifugal


def integrate_numerov(p, grid, l, k, lam):
    """Integrate the radial equation at momentum ``k`` and return psi, psi' at ``grid.r_end``.

    The regular solution is seeded with ``psi(h) = h^(l+1)``; the Numerov value at
    the origin ``F_0 = -(h^2/12) lim g psi`` is nonzero only for l = 1 (centrifugal
    term) and for l = 0 with a 1/r core.
    """
    l = _check_l(l)
    k = complex(k)
    if k == 0:
        raise DomainError("momentum k = 0 is not allowed")
    h = grid.h
    profile, centrifugal = _tabulate(p, grid, l)
    # inv_r0_num = (F_0 / F_1) * (1 - T_1), seed psi_1 = h^(l+1)
    if l == 0:
        inv_r0_num = -(h / 6.0) * p.coulomb_strength(lam)
    elif l == 1:
        inv_r0_num = -1.0 / 6.0
    else:
        inv_r0_num = 0.0
    psi, dpsi, failed = _numerov_kernel(
        profile, centrifugal, float(lam), k * k, h, complex(inv_r0_num)
    )
    if failed >= 0 or not (np.isfinite(psi) and np.isfinite(dpsi)):
        index = failed if failed >= 0 else grid.n_points
        raise NumericOverflowError(
            f"Numerov ratio recursion overflowed at grid index {index} (k={k}, lam={lam})",
            index=index,
        )
    return EndpointSolution(complex(psi), complex(dpsi))


def extract_amplitudes(sol, l, k, r_end):
    """Project the endpoint solution on the outgoing/incoming Riccati-Hankel pair.

    All Wronskians are taken in r, i.e. ``d/dr h(kr) = k h'(kr)``.  The regularized
    function is evaluated as ``k^(2l+1) W(psi, h+) / W(psi, h- - h+)`` with
    ``h- - h+ = -2i j_l`` computed from the series for small ``kR``; this is the
    same quantity as ``k^(2l+1) / (S - 1)`` without the cancellation in ``S - 1``
    that would otherwise destroy it near k = 0.
    """
    l = _check_l(l)
    k = complex(k)
    if k == 0:
        raise DomainError("momentum k = 0 is not allowed")
    z = k * r_end
    hp, dhp = _hankel_and_derivative(1, l, z)
    hm, dhm = _hankel_and_derivative(-1, l, z)
    jv, djv = _bessel_and_derivative(l, z)
    psi, dpsi = sol.psi, sol.psi_prime

    # exact W(h+, h-) in r; computing it would cancel catastrophically for small kR
    w_pm = -2j * k
    w_psi_m = wronskian(psi, dpsi, hm, k * dhm)
    w_psi_p = wronskian(psi, dpsi, hp, k * dhp)
    a = w_psi_m / w_pm
    b = -w_psi_p / w_pm
    s = w_psi_m / w_psi_p if w_psi_p != 0 else complex(math.inf, 0.0)

    w_psi_j = wronskian(psi, dpsi, jv, k * djv)
    size = abs(psi * k * djv) + abs(dpsi * jv)
    if size == 0 or abs(w_psi_j) <= S_EQUALS_ONE_TOL * size:
        f = None
    else:
        f = k ** (2 * l + 1) * w_psi_p / (-2j * w_psi_j)
    return ScatteringAmplitudes(a=a, b=b, s=s, f=f)


def residual_scale(l, x):
    """Tolerance scale ``max(1, |k|^(2l+1))`` at ``x = (Re k, Im k, lam)``."""
    return max(1.0, math.hypot(x[0], x[1]) ** (2 * l + 1))


def residual_F(p, grid, l, x):
    """(Re F_l, Im F_l) at ``x = (Re k, Im k, lam)``; zeros are poles of S_l."""
    re_k, im_k, lam = (float(v) for v in x)
    if math.hypot(re_k, im_k) < K_MIN:
        raise DomainError("residual evaluation at the origin k = 0 is forbidden")
    k = complex(re_k, im_k)
    amps = extract_amplitudes(integrate_numerov(p, grid, l, k, lam), l, k, grid.r_end)
    if amps.f is None:
        raise UndefinedRegularizedFunction(f"S = 1 at k={k}, lam={lam}; F is undefined")
    return amps.f.real, amps.f.imag


class RadialProblem:
    """A potential family, angular momentum and grid bundled as a residual evaluator.

    Instances are callable: ``problem(x)`` returns ``np.array([Re F, Im F])``.
    """

    def __init__(self, potential, l, grid):
        self.potential = potential
        self.l = _check_l(l)
        self.grid = grid

    def __repr__(self):
        return f"RadialProblem({self.potential!r}, l={self.l}, {self.grid!r})"

    def __call__(self, x):
        return np.array(residual_F(self.potential, self.grid, self.l, x))

    def scale(self, x):
        return residual_scale(self.l, x)

    def amplitudes(self, k, lam):
        sol = integrate_numerov(self.potential, self.grid, self.l, k, lam)
        return extract_amplitudes(sol, self.l, k, self.grid.r_end)

    def regularized(self, k, lam):
        """Complex F_l(k, lam)."""
        re, im = residual_F(self.potential, self.grid, self.l, (k.real, k.imag, lam))
        return complex(re, im)
