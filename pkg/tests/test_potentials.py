import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resonance_tracer.errors import DomainError, SingularityError
from resonance_tracer.potentials import KINDS, RadialPotential, effective_potential, evaluate


def test_gaussian_at_origin():
    assert evaluate(RadialPotential("gaussian"), 0.0, 25.0) == -25.0


def test_square_well_inside_and_outside():
    well = RadialPotential("square_well", {"a": 1.0})
    assert evaluate(well, 0.5, 5.0) == -5.0
    assert evaluate(well, 1.5, 5.0) == 0.0


def test_yukawa_closed_form():
    yuk = RadialPotential("yukawa", {"g": 1.0})
    assert evaluate(yuk, 1.0, 2.0) == pytest.approx(-2.0 * math.exp(-1.0), rel=1e-15)
    assert evaluate(yuk, 1.0, 2.0) == pytest.approx(-0.735759, abs=1e-6)


def test_morse_and_lennard_jones_minima():
    morse = RadialPotential("morse", {"alpha": 1.3, "r0": 2.0})
    assert evaluate(morse, 2.0, 1.0) == pytest.approx(-1.0)
    lj = RadialPotential("lennard_jones", {"sigma": 1.0})
    assert evaluate(lj, 2 ** (1 / 6), 1.0) == pytest.approx(-1.0)
    assert evaluate(lj, 1.0, 3.0) == 0.0


def test_effective_potential_examples():
    gauss = RadialPotential("gaussian")
    assert effective_potential(gauss, 0, 0.7, 25.0) == evaluate(gauss, 0.7, 25.0)
    assert effective_potential(gauss, 3, 1.0, 25.0) == pytest.approx(-25 * math.exp(-1) + 6.0)
    assert effective_potential(gauss, 3, 1.0, 25.0) == pytest.approx(-3.197, abs=1e-3)
    well = RadialPotential("square_well", {"a": 1.0})
    assert effective_potential(well, 1, 2.0, 5.0) == pytest.approx(0.25)


def test_effective_potential_singular_at_origin():
    with pytest.raises(SingularityError):
        effective_potential(RadialPotential("gaussian"), 2, 0.0, 1.0)
    assert effective_potential(RadialPotential("gaussian"), 0, 0.0, 1.0) == -1.0


@settings(max_examples=100, deadline=None)
@given(
    kind=st.sampled_from(["gaussian", "square_well", "yukawa"]),
    r=st.floats(1e-3, 20.0),
    lam=st.floats(-100.0, 100.0).filter(lambda v: v == 0 or abs(v) > 1e-100),
)
def test_lambda_linearity(kind, r, lam):
    p = RadialPotential(kind)
    assert evaluate(p, r, 2 * lam) == pytest.approx(2 * evaluate(p, r, lam), rel=1e-15, abs=0)


@pytest.mark.parametrize("kind", KINDS)
def test_finite_for_positive_r(kind):
    r = np.linspace(1e-3, 30.0, 500)
    assert np.all(np.isfinite(RadialPotential(kind).evaluate(r, 50.0)))


def test_short_range_check():
    gauss = RadialPotential("gaussian")
    # 200 exp(-4.8^2) = 2e-8
    assert gauss.check_short_range(4.8, 200.0) < 1e-7
    with pytest.raises(DomainError):
        gauss.check_short_range(3.0, 200.0)
    assert RadialPotential("square_well", {"a": 1.0}).check_short_range(1.1, 40.0) == 0.0


def test_validation():
    with pytest.raises(DomainError):
        RadialPotential("coulomb")
    with pytest.raises(DomainError):
        RadialPotential("gaussian", {"a": 1.0})
    with pytest.raises(DomainError):
        RadialPotential("gaussian").evaluate(-1.0, 1.0)


def test_defaults_and_immutability():
    p = RadialPotential("morse", {"alpha": 2.0})
    assert dict(p.params) == {"alpha": 2.0, "r0": 1.0}
    with pytest.raises(TypeError):
        p.params["alpha"] = 3.0
    assert p == RadialPotential("morse", {"alpha": 2, "r0": 1.0})
    assert hash(p) == hash(RadialPotential("morse", {"alpha": 2.0}))


def test_coulomb_strength():
    assert RadialPotential("yukawa").coulomb_strength(3.0) == -3.0
    assert RadialPotential("gaussian").coulomb_strength(3.0) == 0.0


@pytest.mark.parametrize("a", [1.0, 0.7, 1.0 + 1e-3, 0.51])
def test_square_well_grid_correction_restores_integral(a):
    # trapezoid rule on the corrected samples integrates V0 exactly, wherever
    # the wall falls between nodes (node 0 at r = 0 has weight 1/2)
    h = 1.0 / 64
    r = h * np.arange(1, 200)
    well = RadialPotential("square_well", {"a": a})
    corrected = well.grid_profile(r, h)
    assert h * (-0.5 + corrected.sum()) == pytest.approx(-a, abs=1e-13)
    raw = well.profile(r)
    assert h * (-0.5 + raw.sum()) != pytest.approx(-a, abs=1e-3 * h)
    # only the two nodes next to the wall change
    changed = np.flatnonzero(corrected != raw)
    assert len(changed) <= 2
    assert np.all(np.abs(r[changed] - a) <= h)


def test_smooth_grid_profile_is_pointwise():
    r = np.linspace(0.01, 4.8, 100)
    gauss = RadialPotential("gaussian")
    assert np.array_equal(gauss.grid_profile(r, r[1] - r[0]), gauss.profile(r))
