"""Riccati-Bessel and Riccati-Hankel functions of complex argument.

Conventions (free radial equation u'' + (1 - l(l+1)/z^2) u = 0)::

    j_l(z)   = z j_l(z)                        regular,   j_0 = sin z
    n_l(z)   = -z y_l(z)                       irregular, n_0 = cos z
    h+_l(z)  = n_l(z) + i j_l(z)   ~ exp(+iz)  outgoing
    h-_l(z)  = n_l(z) - i j_l(z)   ~ exp(-iz)  incoming

so that ``j_l = (h+_l - h-_l) / (2i)`` and a free regular solution has S = 1.

The Hankel functions are evaluated from their terminating expansion
``h+_l(z) = (-i)^l e^{iz} sum_m a_{lm} (i/z)^m`` with exact rational
coefficients ``a_{lm} = (l+m)! / (m! (l-m)! 2^m)``; no recurrence is used, so
the lower half plane is as well conditioned as the upper one.
"""

from __future__ import annotations

import cmath
import operator
from fractions import Fraction
from math import factorial

from .errors import DomainError, SingularityError

__all__ = [
    "L_MAX",
    "riccati_bessel_j",
    "riccati_bessel_j_prime",
    "riccati_hankel",
    "riccati_hankel_prime",
    "wronskian",
]

L_MAX = 8

_HANKEL_COEFFS = tuple(
    tuple(Fraction(factorial(l + m), factorial(m) * factorial(l - m) * 2**m) for m in range(l + 1))
    for l in range(L_MAX + 1)
)

# P(w) coefficients c_m = a_lm (±i)^m, stored highest power first for Horner
_HANKEL_POLY = {
    sign: tuple(
        tuple(complex(float(a)) * (sign * 1j) ** m for m, a in reversed(list(enumerate(row))))
        for row in _HANKEL_COEFFS
    )
    for sign in (1, -1)
}

# series j_l(z) = z^(l+1) sum_k c_k (z^2)^k, c_k = (-1/2)^k / (k! (2l+2k+1)!!)
_SERIES_TERMS = 40


def _double_factorial(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


_BESSEL_SERIES = tuple(
    tuple(
        float(Fraction((-1) ** k, 2**k * factorial(k) * _double_factorial(2 * l + 2 * k + 1)))
        for k in range(_SERIES_TERMS)
    )
    for l in range(L_MAX + 1)
)


def _check_l(l):
    try:
        l = operator.index(l)
    except TypeError:
        raise DomainError(f"angular momentum must be an integer, got {l!r}") from None
    if l < 0 or l > L_MAX:
        raise DomainError(f"angular momentum l={l} outside supported range 0..{L_MAX}")
    return l


def _sign(kind):
    if kind in ("plus", "+", +1):
        return 1
    if kind in ("minus", "-", -1):
        return -1
    raise DomainError(f"unknown Hankel kind {kind!r}; expected 'plus' or 'minus'")


def _hankel_and_derivative(sign, l, z):
    z = complex(z)
    if z == 0:
        raise SingularityError("Riccati-Hankel functions are singular at z = 0")
    w = 1.0 / z
    unit = sign * 1j
    poly = 0j
    dpoly = 0j
    # Horner in w for P(w) = sum c_m w^m, c_m = a_lm (±i)^m, and P'(w)
    for c in _HANKEL_POLY[sign][l]:
        dpoly = dpoly * w + poly
        poly = poly * w + c
    pref = (-unit) ** l * cmath.exp(unit * z)
    value = pref * poly
    deriv = pref * (unit * poly - w * w * dpoly)
    return value, deriv


def riccati_hankel(kind, l, z):
    """Riccati-Hankel function h+_l(z) (``kind='plus'``) or h-_l(z) (``kind='minus'``)."""
    l = _check_l(l)
    return _hankel_and_derivative(_sign(kind), l, z)[0]


def riccati_hankel_prime(kind, l, z):
    """Derivative d/dz of :func:`riccati_hankel`."""
    l = _check_l(l)
    return _hankel_and_derivative(_sign(kind), l, z)[1]


def _use_series(l, z):
    return abs(z) <= 1.0 + 0.75 * l


def _bessel_series(l, z):
    z2 = z * z
    value = 0j
    deriv = 0j
    zpow = 1.0 + 0j
    for k, c in enumerate(_BESSEL_SERIES[l]):
        term = c * zpow
        value += term
        deriv += (l + 1 + 2 * k) * term
        if k > 2 and abs(term) <= 1e-18 * abs(value):
            break
        zpow *= z2
    zl = z**l
    return z * zl * value, zl * deriv


def _bessel_and_derivative(l, z):
    z = complex(z)
    if _use_series(l, z):
        return _bessel_series(l, z)
    hp, dhp = _hankel_and_derivative(1, l, z)
    hm, dhm = _hankel_and_derivative(-1, l, z)
    return (hp - hm) / 2j, (dhp - dhm) / 2j


def riccati_bessel_j(l, z):
    """Regular Riccati-Bessel function z j_l(z); exact 0 at z = 0."""
    l = _check_l(l)
    if z == 0:
        return 0j
    return _bessel_and_derivative(l, z)[0]


def riccati_bessel_j_prime(l, z):
    """Derivative d/dz of :func:`riccati_bessel_j`."""
    l = _check_l(l)
    if z == 0:
        return 1.0 + 0j if l == 0 else 0j
    return _bessel_and_derivative(l, z)[1]


def wronskian(f, f_prime, g, g_prime):
    """Return ``f g' - f' g``."""
    return f * g_prime - f_prime * g
