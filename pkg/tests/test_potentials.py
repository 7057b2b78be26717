import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from qcf1d.potentials import Coefficients, is_admissible, lennard_jones

LJ = lennard_jones()


def test_minimum_at_one():
    assert LJ.eval(1.0) == -1.0
    assert LJ.deriv1(1.0) == 0.0


def test_second_derivative_values():
    # analytic differentiation: 156 r^-14 - 84 r^-8
    assert LJ.deriv2(1.0) == 72.0
    assert_allclose(LJ.deriv2(2.0), 156.0 * 2.0**-14 - 84.0 * 2.0**-8, rtol=1e-15)
    assert_allclose(LJ.deriv2(2.0), -0.318603515625, rtol=1e-15)


@settings(max_examples=60, deadline=None)
@given(r=st.floats(min_value=0.5, max_value=3.0))
def test_derivatives_match_finite_differences(r):
    h = 1e-5
    # atol covers stationary points, where the relative error is undefined
    fd1 = (LJ.eval(r + h) - LJ.eval(r - h)) / (2.0 * h)
    assert_allclose(LJ.deriv1(r), fd1, rtol=1e-6, atol=1e-6)
    fd2 = (LJ.deriv1(r + h) - LJ.deriv1(r - h)) / (2.0 * h)
    assert_allclose(LJ.deriv2(r), fd2, rtol=1e-6, atol=1e-6)


def test_domain_error_at_nonpositive_separation():
    for fn in (LJ.eval, LJ.deriv1, LJ.deriv2):
        with pytest.raises(ValueError):
            fn(0.0)
        with pytest.raises(ValueError):
            fn(-1.3)
        with pytest.raises(ValueError):
            fn(np.array([1.0, -0.5]))


def test_vectorized_evaluation():
    r = np.array([0.8, 1.0, 1.5])
    assert LJ.eval(r).shape == (3,)
    assert_allclose(LJ.eval(r)[1], -1.0)


@pytest.mark.parametrize("F", [0.9, 1.0, 1.05, 1.1])
def test_admissible_strains_have_the_right_curvatures(F):
    assert is_admissible(LJ, F)
    assert LJ.deriv2(F) > 0.0
    assert LJ.deriv2(2.0 * F) < 0.0


def test_inadmissible_strain():
    # nearest-neighbor curvature goes negative past r ~ 1.109
    assert not is_admissible(LJ, 1.2)


def test_coefficients_from_potential():
    c = Coefficients.from_potential(LJ, 1.0)
    assert c.phiF == 72.0
    assert_allclose(c.phi2F, -0.318603515625, rtol=1e-15)


def test_coefficients_require_positive_phiF():
    with pytest.raises(ValueError):
        Coefficients(-1.0, -0.1)
    with pytest.raises(ValueError):
        Coefficients(0.0, -0.1)
    # phi2F = 0 is the pure nearest-neighbor model and stays allowed
    Coefficients(1.0, 0.0)
