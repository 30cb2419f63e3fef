import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scatverify.errors import AccuracyError, DomainError, PreconditionError
from scatverify.numerics import (box_quadrature, composite_gauss_legendre, finite_difference_residual,
                                 gauss_legendre, hemisphere_quadrature, nascent_delta,
                                 nascent_delta_integrate, orthonormal_frame, powerlaw_fit,
                                 richardson, schrodinger_operator, seeded_stream, sphere_quadrature)


def test_gauss_legendre_polynomial_exactness():
    x, w = gauss_legendre(-1.0, 2.0, 5)
    assert np.sum(w * x ** 9) == pytest.approx((2 ** 10 - 1) / 10, rel=1e-13)


def test_composite_rule():
    x, w = composite_gauss_legendre([0, 1, 3], order=8, panels=[2, 3])
    assert np.sum(w * np.exp(x)) == pytest.approx(math.e ** 3 - 1, rel=1e-13)


def test_box_quadrature():
    pts, w = box_quadrature([(0, 1), (0, 2)], order=6, panels=2)
    assert np.sum(w * pts[:, 0] * pts[:, 1] ** 2) == pytest.approx(0.5 * 8 / 3, rel=1e-13)


def test_sphere_quadrature():
    nodes, w = sphere_quadrature(16, axis=(1, 1, 0))
    assert np.sum(w) == pytest.approx(4 * math.pi, rel=1e-13)
    assert np.sum(w * nodes[:, 2] ** 2) == pytest.approx(4 * math.pi / 3, rel=1e-13)
    with pytest.raises(PreconditionError):
        sphere_quadrature(2)
    nodes, w = hemisphere_quadrature(12)
    assert np.sum(w) == pytest.approx(2 * math.pi, rel=1e-13)
    assert np.all(nodes[:, 2] > 0)


@settings(max_examples=50)
@given(st.tuples(*[st.floats(-5, 5)] * 3))
def test_orthonormal_frame(v):
    if np.linalg.norm(v) < 1e-3:
        return
    e1, e2, e3 = orthonormal_frame(v)
    m = np.stack([e1, e2, e3])
    np.testing.assert_allclose(m @ m.T, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(e3, np.asarray(v) / np.linalg.norm(v), atol=1e-12)


def test_nascent_delta_normalised():
    x, w = gauss_legendre(-1, 1, 200)
    assert np.sum(w * nascent_delta(x, 0.05)) == pytest.approx(1.0, rel=1e-12)


def test_richardson_removes_quadratic_error():
    h = np.array([0.4, 0.2, 0.1])
    val, err = richardson(h, 3.0 + 2 * h + 5 * h ** 2)
    assert val == pytest.approx(3.0, abs=1e-12)
    with pytest.raises(PreconditionError):
        richardson([0.1], [1.0])


def test_nascent_delta_integrate_point_evaluation():
    dom = composite_gauss_legendre(np.linspace(-2, 2, 41), order=16)
    val, _ = nascent_delta_integrate(np.cos, lambda x: 2 * (x - 0.3), [0.1, 0.07, 0.05, 0.035], dom,
                                     rtol=1e-6)
    # delta(2(x - a)) = delta(x - a)/2
    assert val == pytest.approx(math.cos(0.3) / 2, rel=1e-7)
    with pytest.raises(PreconditionError):
        nascent_delta_integrate(np.cos, lambda x: x, [0.1, 0.2, 0.05], dom)


def test_nascent_delta_integrate_reports_nonconvergence():
    dom = composite_gauss_legendre(np.linspace(-2, 2, 41), order=16)
    # a 1/|x| factor at the root makes the sequence blow up
    with pytest.raises(AccuracyError):
        nascent_delta_integrate(lambda x: 1 / np.abs(x), lambda x: x, [0.1, 0.05, 0.025], dom)


def test_seeded_stream_reproducible():
    a = seeded_stream(0x5EEDCAFE, 3).normal(size=5)
    b = seeded_stream(0x5EEDCAFE, 3).normal(size=5)
    c = seeded_stream(0x5EEDCAFE, 4).normal(size=5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_fd_residual_second_order():
    k = np.array([0.3, -0.2, 0.5])
    w = 0.5 * k @ k
    exact = lambda x, t: np.exp(1j * (x @ k - w * t))
    op = schrodinger_operator(3)
    pts = np.array([[0.1, 0.2, 0.3], [1.0, -1.0, 2.0]])
    assert finite_difference_residual(exact, op, 1e-2, pts) < 1e-5
    wrong = lambda x, t: np.exp(1j * (x @ k - 2 * w * t))
    assert finite_difference_residual(wrong, op, 1e-2, pts) == pytest.approx(w, rel=1e-3)
    with pytest.raises(PreconditionError):
        finite_difference_residual(exact, op, 0.0, pts)


def test_powerlaw_fit():
    x = np.geomspace(1, 10, 8)
    slope, err = powerlaw_fit(x, 3 * x ** 1.5)
    assert slope == pytest.approx(1.5, abs=1e-12)
    with pytest.raises(DomainError):
        powerlaw_fit(x, -x)
    with pytest.raises(PreconditionError):
        powerlaw_fit(x[:3], x[:3])
