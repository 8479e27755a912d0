"""Short-range radial potentials V(r, lam) = lam * V0(r)."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from .errors import DomainError, SingularityError

__all__ = ["KINDS", "DEFAULT_PARAMS", "RadialPotential", "evaluate", "effective_potential"]

# shape constants; the strength is always the call-time lam
DEFAULT_PARAMS = {
    "gaussian": {"width": 1.0},
    "square_well": {"a": 1.0},
    "morse": {"alpha": 1.0, "r0": 1.0},
    "yukawa": {"g": 1.0},
    "lennard_jones": {"sigma": 1.0},
    "none": {},
}
KINDS = tuple(DEFAULT_PARAMS)

NEGLIGIBLE = 1e-7


def _gaussian(r, width):
    return -np.exp(-((r / width) ** 2))


def _square_well(r, a):
    return np.where(r < a, -1.0, 0.0)


def _morse(r, alpha, r0):
    e = np.exp(-alpha * (r - r0))
    return e * e - 2.0 * e


def _yukawa(r, g):
    with np.errstate(divide="ignore"):
        return -np.exp(-r / g) / r


def _lennard_jones(r, sigma):
    with np.errstate(divide="ignore", over="ignore"):
        s6 = (sigma / r) ** 6
        return 4.0 * (s6 * s6 - s6)


def _none(r):
    return np.zeros_like(r)


_PROFILES = {
    "gaussian": _gaussian,
    "square_well": _square_well,
    "morse": _morse,
    "yukawa": _yukawa,
    "lennard_jones": _lennard_jones,
    "none": _none,
}


@dataclass(frozen=True)
class RadialPotential:
    """A potential family ``V(r, lam) = lam * V0(r)``.

    ``kind`` selects the radial profile and ``params`` its shape constants;
    missing constants fall back to :data:`DEFAULT_PARAMS`.

    >>> RadialPotential("square_well", {"a": 1.0}).evaluate(0.5, 5.0)
    -5.0
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _PROFILES:
            raise DomainError(f"unknown potential kind {self.kind!r}; choose from {KINDS}")
        unknown = set(self.params) - set(DEFAULT_PARAMS[self.kind])
        if unknown:
            raise DomainError(f"unknown shape parameter(s) {sorted(unknown)} for {self.kind}")
        merged = {**DEFAULT_PARAMS[self.kind], **{k: float(v) for k, v in self.params.items()}}
        object.__setattr__(self, "params", MappingProxyType(merged))

    def __hash__(self):
        return hash((self.kind, tuple(sorted(self.params.items()))))

    def __eq__(self, other):
        if not isinstance(other, RadialPotential):
            return NotImplemented
        return self.kind == other.kind and dict(self.params) == dict(other.params)

    def profile(self, r):
        """Unit-strength profile V0(r); accepts scalars or arrays."""
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr < 0):
            raise DomainError("radial coordinate must be non-negative")
        out = _PROFILES[self.kind](r_arr, **self.params)
        return float(out) if np.ndim(out) == 0 else out

    def grid_profile(self, r, h):
        """V0 at the nodes of a uniform grid ``r = n h``.

        Smooth profiles are sampled pointwise.  For the square well the wall
        at ``a`` generally falls between nodes ``x_n < a <= x_{n+1}``; sampling
        pointwise there moves the effective wall by up to h/2 and the Numerov
        result drops to first order.  The two nodes adjacent to the wall get
        jump corrections ``(1-u)^2/2 - 1/12`` and ``1/12 - u^2/2`` (``u = (a -
        x_n)/h``), which cancel the zeroth and first moments of the Numerov
        defect caused by the jump.  V0 itself stays exactly discontinuous.
        """
        r = np.asarray(r, dtype=float)
        out = np.asarray(self.profile(r), dtype=float).copy()
        if self.kind == "square_well":
            a = self.params["a"]
            n = int(np.ceil(a / h)) - 1  # largest n with n h < a
            u = (a - n * h) / h
            jump = 0.0 - (-1.0)
            idx = np.rint(r / h).astype(int)
            out[idx == n] += jump * ((1.0 - u) ** 2 / 2.0 - 1.0 / 12.0)
            out[idx == n + 1] += jump * (1.0 / 12.0 - u**2 / 2.0)
        return out

    def evaluate(self, r, lam):
        """V(r, lam)."""
        out = lam * np.asarray(self.profile(r))
        return float(out) if np.ndim(out) == 0 else out

    def coulomb_strength(self, lam):
        """lim_{r->0} r V(r, lam); nonzero only for 1/r-type cores (Yukawa)."""
        if self.kind == "yukawa":
            return -float(lam)
        return 0.0

    def check_short_range(self, r_end, lam_max, threshold=NEGLIGIBLE):
        """Raise if |V(r_end, lam_max)| exceeds ``threshold``."""
        tail = abs(self.evaluate(r_end, lam_max))
        if tail > threshold:
            raise DomainError(
                f"{self.kind} potential is not negligible at r_end={r_end}: "
                f"|V| = {tail:.3e} > {threshold:.1e}"
            )
        return tail


def evaluate(p, r, lam):
    """Functional alias of :meth:`RadialPotential.evaluate`."""
    return p.evaluate(r, lam)


def effective_potential(p, l, r, lam):
    """V(r, lam) + l(l+1) / (2 r^2)."""
    if np.any(np.asarray(r) <= 0):
        if l > 0:
            raise SingularityError("centrifugal term is singular at r = 0")
        if np.any(np.asarray(r) < 0):
            raise DomainError("radial coordinate must be positive")
    r_arr = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        cent = np.where(r_arr > 0, l * (l + 1) / (2.0 * r_arr**2), 0.0)
    out = p.evaluate(r_arr, lam) + cent
    return float(out) if np.ndim(out) == 0 else out
