import cmath
import math

import mpmath as mp
import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from resonance_tracer.errors import DomainError, SingularityError
from resonance_tracer.specfun import (
    L_MAX,
    _bessel_series,
    _hankel_and_derivative,
    riccati_bessel_j,
    riccati_bessel_j_prime,
    riccati_hankel,
    riccati_hankel_prime,
    wronskian,
)

# |Im z| up to 50 cancels ~43 digits when h+ or h- is formed from j and n
mp.mp.dps = 80


def mp_riccati(l, z):
    """(j_l, n_l) from half-integer Bessel functions in 80-digit arithmetic."""
    z = mp.mpc(z)
    pref = mp.sqrt(mp.pi * z / 2)
    return pref * mp.besselj(l + 0.5, z), -pref * mp.bessely(l + 0.5, z)


def polar(r, phi):
    return complex(r * math.cos(phi), r * math.sin(phi))


moduli = st.floats(0.1, 50.0)
angles = st.floats(-math.pi, math.pi)


def test_j0_at_pi_is_zero():
    assert abs(riccati_bessel_j(0, math.pi)) < 1e-15


def test_j1_at_one():
    expected = math.sin(1.0) - math.cos(1.0)
    assert riccati_bessel_j(1, 1.0) == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(0.301169, abs=1e-6)


def test_j3_at_2i_matches_hankel_combination():
    z = 2j
    combo = (riccati_hankel("plus", 3, z) - riccati_hankel("minus", 3, z)) / 2j
    assert abs(riccati_bessel_j(3, z) - combo) <= 1e-13 * abs(combo)
    ref = complex(mp_riccati(3, z)[0])
    assert abs(riccati_bessel_j(3, z) - ref) <= 1e-14 * abs(ref)


def test_hankel_l0_closed_forms():
    for x in (0.3, 1.0, 7.5):
        assert riccati_hankel("plus", 0, x) == pytest.approx(cmath.exp(1j * x), abs=1e-15)
    # h-_0(z) = e^{-iz}, so h-_0(i) = e
    assert riccati_hankel("minus", 0, 1j) == pytest.approx(math.e, rel=1e-15)


def test_hankel_l1_at_one_plus_i():
    z = 1 + 1j
    expected = -1j * cmath.exp(1j * z) * (1 + 1j / z)
    assert riccati_hankel("plus", 1, z) == pytest.approx(expected, rel=1e-14)
    j, n = mp_riccati(1, z)
    assert riccati_hankel("plus", 1, z) == pytest.approx(complex(n + 1j * j), rel=1e-14)


@pytest.mark.parametrize("l", range(L_MAX + 1))
def test_closed_forms_match_sympy(l):
    z = sp.Symbol("z")
    jl = sp.expand_func(z * sp.jn(l, z))
    nl = sp.expand_func(-z * sp.yn(l, z))
    for zv in (0.7 + 0.2j, 3.0 - 1.5j, -2.0 + 4.0j, 12.0 - 0.5j):
        # exact decimal input; a float substitution would cancel at double precision
        zs = sp.Float(repr(zv.real), 40) + sp.I * sp.Float(repr(zv.imag), 40)
        j_ref = complex(sp.N(jl.subs(z, zs), 30))
        n_ref = complex(sp.N(nl.subs(z, zs), 30))
        assert riccati_bessel_j(l, zv) == pytest.approx(j_ref, rel=1e-12, abs=1e-300)
        assert riccati_hankel("plus", l, zv) == pytest.approx(n_ref + 1j * j_ref, rel=1e-12)
        assert riccati_hankel("minus", l, zv) == pytest.approx(n_ref - 1j * j_ref, rel=1e-12)


def test_wronskian_of_fundamental_pair_symbolic():
    z = sp.Symbol("z")
    hp, hm = sp.exp(sp.I * z), sp.exp(-sp.I * z)
    w = sp.simplify(hp * sp.diff(hm, z) - sp.diff(hp, z) * hm)
    assert w == -2 * sp.I
    z0 = 2.0
    num = wronskian(
        riccati_hankel("plus", 0, z0), riccati_hankel_prime("plus", 0, z0),
        riccati_hankel("minus", 0, z0), riccati_hankel_prime("minus", 0, z0),
    )
    assert num == pytest.approx(-2j, abs=1e-15)


def test_wronskian_trivial_pairs():
    assert wronskian(1.3 + 2j, 0.5, 1.3 + 2j, 0.5) == 0
    z = 0.83
    assert wronskian(math.sin(z), math.cos(z), math.cos(z), -math.sin(z)) == pytest.approx(-1.0)


@settings(max_examples=200, deadline=None)
@given(l=st.integers(0, 5), r=moduli, phi=angles)
def test_combination_identity(l, r, phi):
    z = polar(r, phi)
    hp = riccati_hankel("plus", l, z)
    hm = riccati_hankel("minus", l, z)
    j = riccati_bessel_j(l, z)
    assert abs(j - (hp - hm) / 2j) <= 1e-10 * max(1.0, abs(hp))


@settings(max_examples=100, deadline=None)
@given(l=st.integers(0, 5), r=moduli, phi=angles)
def test_against_mpmath(l, r, phi):
    z = polar(r, phi)
    j_mp, n_mp = mp_riccati(l, z)
    # combine before rounding: h+ can be a tiny difference of large n and j
    hp_ref = complex(n_mp + 1j * j_mp)
    j_ref, n_ref = complex(j_mp), complex(n_mp)
    assert abs(riccati_hankel("plus", l, z) - hp_ref) <= 1e-12 * abs(hp_ref)
    # j_l is a small difference of large terms off the real axis
    size = max(abs(j_ref), abs(n_ref))
    assert abs(riccati_bessel_j(l, z) - j_ref) <= 1e-12 * size


@settings(max_examples=100, deadline=None)
@given(l=st.integers(0, 5), r=moduli, phi=angles)
def test_derivatives_by_finite_difference(l, r, phi):
    z = polar(r, phi)
    h = 1e-5 * max(1.0, r)
    for f, fp in (
        (lambda w: riccati_hankel("plus", l, w), riccati_hankel_prime("plus", l, z)),
        (lambda w: riccati_bessel_j(l, w), riccati_bessel_j_prime(l, z)),
    ):
        fd = (f(z + h) - f(z - h)) / (2 * h)
        scale = max(abs(f(z + h)), abs(f(z - h)), abs(fp), 1.0) / min(1.0, r) ** 2
        assert abs(fd - fp) <= 1e-7 * scale


@settings(max_examples=200, deadline=None)
@given(l=st.integers(0, 5), r=moduli, phi=angles)
def test_wronskian_is_constant(l, r, phi):
    z = polar(r, phi)
    hp, dhp = riccati_hankel("plus", l, z), riccati_hankel_prime("plus", l, z)
    hm, dhm = riccati_hankel("minus", l, z), riccati_hankel_prime("minus", l, z)
    w = wronskian(hp, dhp, hm, dhm)
    # the two products are ~|z|^(-2l-1) near the origin; W = -2i is their difference
    terms = abs(hp * dhm) + abs(dhp * hm)
    assert abs(w + 2j) / 2 <= 1e-10 * max(1.0, terms)
    if r >= 2.0:
        assert abs(w + 2j) / 2 <= 1e-10


@settings(max_examples=200, deadline=None)
@given(l=st.integers(0, 5), x=st.floats(0.1, 50.0), sign=st.sampled_from([1.0, -1.0]))
def test_real_axis_conjugation(l, x, sign):
    z = sign * x
    hp = riccati_hankel("plus", l, z)
    hm = riccati_hankel("minus", l, z)
    assert abs(hm - hp.conjugate()) <= 1e-12 * abs(hp)


@settings(max_examples=100, deadline=None)
@given(l=st.integers(0, L_MAX), r=moduli, phi=angles)
def test_conjugate_argument_symmetry(l, r, phi):
    z = polar(r, phi)
    hm = riccati_hankel("minus", l, z)
    hp_bar = riccati_hankel("plus", l, z.conjugate()).conjugate()
    assert abs(hm - hp_bar) <= 1e-13 * abs(hm)


@pytest.mark.parametrize("l", range(L_MAX + 1))
def test_series_and_hankel_branches_agree_at_switch(l):
    # the series is used for |z| <= 1 + 0.75 l; both forms must agree there
    r0 = 1.0 + 0.75 * l
    for phi in (0.0, 0.8, -1.3, 2.9, math.pi / 2):
        z = polar(r0, phi)
        series = _bessel_series(l, z)[0]
        hp = _hankel_and_derivative(1, l, z)[0]
        hm = _hankel_and_derivative(-1, l, z)[0]
        assert abs(series - (hp - hm) / 2j) <= 1e-12 * max(abs(hp), abs(hm))


def test_bessel_near_zero_uses_limit():
    assert riccati_bessel_j(0, 0) == 0
    assert riccati_bessel_j(3, 0) == 0
    assert riccati_bessel_j_prime(0, 0) == 1
    assert riccati_bessel_j_prime(2, 0) == 0
    z = 1e-5 + 1e-6j
    # leading term z^(l+1) / (2l+1)!!
    assert riccati_bessel_j(3, z) == pytest.approx(z**4 / 105, rel=1e-9)


@pytest.mark.parametrize("l", [-1, 9, 1.5, "2"])
def test_unsupported_l(l):
    with pytest.raises(DomainError):
        riccati_bessel_j(l, 1.0)
    with pytest.raises(DomainError):
        riccati_hankel("plus", l, 1.0)


def test_hankel_singular_at_origin():
    with pytest.raises(SingularityError):
        riccati_hankel("plus", 0, 0)
    with pytest.raises(SingularityError):
        riccati_hankel_prime("minus", 2, 0j)


def test_unknown_kind():
    with pytest.raises(DomainError):
        riccati_hankel("up", 0, 1.0)


def test_lower_half_plane_is_accurate():
    # recurrences lose everything here; the closed forms stay at machine precision
    z = 30.0 - 25.0j
    for l in (0, 3, 5, 8):
        j_mp, n_mp = mp_riccati(l, z)
        assert riccati_hankel("plus", l, z) == pytest.approx(complex(n_mp + 1j * j_mp), rel=1e-13)
        assert np.isfinite(riccati_hankel("minus", l, z))
