import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import wedgeflow as wf
from wedgeflow import eval_family, eval_hermite, eval_hierarchic

ALL_FAMILIES = [wf.hermite_family(p) for p in (3, 4, 5)] + [
    wf.hierarchic_family(p) for p in (1, 2, 3, 4, 5)
]


def test_hermite_kronecker_property():
    s = eval_hermite(3, [0.0, 1.0])
    np.testing.assert_allclose(s.values[:, 0], [1, 0, 0, 0], atol=1e-15)
    np.testing.assert_allclose(s.first_derivs[:, 0], [0, 1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(s.values[:, 1], [0, 0, 1, 0], atol=1e-15)
    np.testing.assert_allclose(s.first_derivs[:, 1], [0, 0, 0, 1], atol=1e-15)


def test_hermite_midpoint_values():
    s = eval_hermite(3, 0.5)
    np.testing.assert_allclose(s.values[:, 0], [0.5, 0.125, 0.5, -0.125], atol=1e-15)


def test_hermite_quartic_bubble_midpoint():
    s = eval_hermite(4, 0.5)
    assert s.values[4, 0] == pytest.approx(0.0625, abs=1e-15)


def test_hermite_bubbles_vanish_to_first_order():
    for p in (4, 5):
        s = eval_hermite(p, [0.0, 1.0])
        np.testing.assert_allclose(s.values[4:], 0.0, atol=1e-15)
        np.testing.assert_allclose(s.first_derivs[4:], 0.0, atol=1e-15)


def test_hierarchic_hats():
    s = eval_hierarchic(1, 0.3)
    np.testing.assert_allclose(s.values[:, 0], [0.7, 0.3], atol=1e-15)
    assert s.second_derivs is None


def test_hierarchic_quadratic_bubble_peaks_at_midpoint():
    t = np.linspace(0.0, 1.0, 1001)
    bub = eval_hierarchic(2, t).values[2]
    assert np.argmax(bub) == 500
    assert bub[500] > 0.0
    assert abs(bub[0]) < 1e-15 and abs(bub[-1]) < 1e-15


def test_hierarchic_bubbles_vanish_at_endpoints():
    s = eval_hierarchic(5, [0.0, 1.0])
    np.testing.assert_allclose(s.values[2:], 0.0, atol=1e-14)


def test_function_counts():
    for fam in ALL_FAMILIES:
        s = eval_family(fam, np.linspace(0, 1, 7))
        assert s.values.shape == (fam.degree + 1, 7)
        assert s.first_derivs.shape == (fam.degree + 1, 7)
        assert fam.n_funcs == fam.degree + 1


def test_span_completeness():
    # monomials 1, t, ..., t^p are reproduced from each family's span
    t = np.linspace(0.0, 1.0, 50)
    for fam in ALL_FAMILIES:
        vals = eval_family(fam, t).values
        for k in range(fam.degree + 1):
            target = t**k
            c = np.linalg.lstsq(vals.T, target, rcond=None)[0]
            assert np.max(np.abs(vals.T @ c - target)) < 1e-12


def test_derivative_consistency():
    t = np.linspace(0.01, 0.99, 23)
    step = 1e-6
    for fam in ALL_FAMILIES:
        s = eval_family(fam, t)
        up = eval_family(fam, t + step)
        dn = eval_family(fam, t - step)
        fd1 = (up.values - dn.values) / (2 * step)
        assert np.max(np.abs(fd1 - s.first_derivs)) < 1e-6
        if s.second_derivs is not None:
            fd2 = (up.first_derivs - dn.first_derivs) / (2 * step)
            assert np.max(np.abs(fd2 - s.second_derivs)) < 1e-6


def test_unsupported_degrees():
    with pytest.raises(ValueError):
        eval_hermite(2, 0.5)
    with pytest.raises(ValueError):
        eval_hermite(6, 0.5)
    with pytest.raises(ValueError):
        eval_hierarchic(0, 0.5)
    with pytest.raises(ValueError):
        eval_hierarchic(6, 0.5)
    with pytest.raises(ValueError):
        wf.ElementFamily("lagrange", 2)
    with pytest.raises(ValueError):
        wf.hermite_family(1)


def test_c1_gluing_shared_dofs():
    # adjacent Hermite elements share the interface (value, slope) DOF pair,
    # so value and first derivative are continuous by construction
    dm = wf.build_dofmap(wf.build_mesh(3), wf.hermite_family(4))
    ele = dm.element_dofs
    for e in range(2):
        assert ele[e, 2] == ele[e + 1, 0]
        assert ele[e, 3] == ele[e + 1, 1]


@settings(deadline=None, max_examples=60)
@given(st.floats(0.0, 1.0), st.sampled_from([3, 4, 5]))
def test_hermite_value_functions_partition_unity(t, p):
    s = eval_hermite(p, t)
    assert s.values[0, 0] + s.values[2, 0] == pytest.approx(1.0, abs=1e-12)
