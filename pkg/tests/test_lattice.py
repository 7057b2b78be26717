import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from qcf1d.lattice import (
    DomainSpec,
    Field,
    diff,
    diff3,
    diff4_centered,
    displacement,
    inner,
    lp_norm,
    uniform_positions,
)


def test_domain_spec_validation():
    DomainSpec(16, 8)
    DomainSpec(16, 2, M=64)
    with pytest.raises(ValueError, match="K out of range"):
        DomainSpec(16, 9)
    with pytest.raises(ValueError, match="K out of range"):
        DomainSpec(16, 1)
    with pytest.raises(ValueError, match="M must exceed N"):
        DomainSpec(16, 4, M=16)


def test_domain_spec_regions():
    spec = DomainSpec(8, 2)
    assert spec.eps == 0.125
    assert list(spec.atomistic_sites()) == [-2, -1, 0, 1, 2]
    cont = list(spec.continuum_sites())
    assert cont == [-7, -6, -5, -4, -3, 3, 4, 5, 6, 7]
    bonds = list(spec.extended_continuum_bonds())
    assert bonds == [-6, -5, -4, -3, -2, -1, 4, 5, 6, 7, 8, 9]


def test_field_ranges_are_enforced():
    f = Field(np.arange(5.0), -2)
    g = Field(np.arange(5.0), -1)
    assert f.hi == 2
    assert f.at(-2) == 0.0
    with pytest.raises(ValueError, match="mismatch"):
        f + g
    with pytest.raises(ValueError, match="mismatch"):
        inner(f, g, 0.1)
    with pytest.raises(IndexError):
        f.at(3)
    with pytest.raises(ValueError):
        f.restrict(-2, 4)


def test_displacement_infers_centered_range():
    d = displacement([1.0, 2.0, 3.0])
    assert d.lo == -1 and d.hi == 1
    with pytest.raises(ValueError):
        displacement([1.0, 2.0])


def test_homogeneous_membership_is_exact():
    assert Field(np.array([0.0, 1.0, 0.0]), -1).is_homogeneous
    assert not Field(np.array([1e-300, 1.0, 0.0]), -1).is_homogeneous


def test_lp_norms():
    f = Field(np.array([3.0, -4.0]), 0)
    assert lp_norm(f, 0.5, 1) == 3.5
    assert lp_norm(f, 0.5, np.inf) == 4.0
    assert_allclose(lp_norm(f, 0.5, 2), np.sqrt(0.5 * 25.0))
    with pytest.raises(ValueError):
        lp_norm(f, 0.5, 0.5)


def test_diff_of_constant_and_affine():
    eps = 0.25
    const = Field(np.full(9, 2.5), -4)
    assert np.all(diff(const, eps).values == 0.0)
    j = np.arange(-4, 5)
    affine = Field(1.0 + 2.0 * j * eps, -4)
    assert_allclose(diff(affine, eps).values, 2.0, rtol=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=3, max_size=21))
def test_diff_telescopes_to_zero_mean_for_homogeneous_fields(vals):
    v = np.asarray(vals, dtype=float)
    v[0] = 0.0
    v[-1] = 0.0
    eps = 1.0 / len(v)
    d = diff(Field(v, 0), eps)
    assert abs(eps * d.values.sum()) <= 1e-12 * max(1.0, np.abs(d.values).sum() * eps)


def test_diff3_and_diff4_on_polynomials():
    n = 8
    eps = 1.0 / n
    x = np.arange(-n, n + 1) * eps
    cubic = Field(x**3, -n)
    d3 = diff3(cubic, eps)
    assert_allclose(d3.values, 6.0, rtol=1e-10)
    assert d3.lo == -n + 3 and d3.hi == n
    d4 = diff4_centered(cubic, eps)
    assert np.max(np.abs(d4.values)) <= 1e-9
    assert d4.lo == -n + 2 and d4.hi == n - 2
    quartic = Field(x**4, -n)
    assert_allclose(diff4_centered(quartic, eps).values, 24.0, rtol=1e-9)


def test_uniform_positions_snap_makes_bonds_exact():
    eps = 1.0 / 48
    y = uniform_positions(0.9, 48, eps, snap=True)
    bonds = np.diff(y.values)
    assert np.all(bonds == bonds[0])
    assert_allclose(bonds[0] / eps, 0.9, rtol=1e-12)
    plain = uniform_positions(0.9, 48, eps)
    assert_allclose(plain.values, y.values, rtol=1e-12, atol=1e-14)
