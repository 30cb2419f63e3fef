import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scatverify.errors import DivergenceWarning, NotFoundError, SingularJacobianError
from scatverify.kinematics import (CollisionConfig, delta_argument, direction, discriminant,
                                   final_momentum_roots)
from scatverify.lfpath import (divergence_probe, lf_amplitude_density, lf_density_from_transfer,
                               lf_probability_density, lf_total_probability, singular_cone,
                               tangent_boundary_pair)
from scatverify.numerics import composite_gauss_legendre, nascent_delta_integrate


def _oracle_density(cfg, n):
    """Nascent-delta oracle.

    The LF amplitude per steradian is (i b/2 pi) times 2 * int k^2 delta(g(k)) dk,
    g being the energy mismatch along n.  Evaluate that radial integral with
    Gaussian deltas of shrinking width and extrapolate.
    """
    breaks = np.linspace(1e-6, 6.0, 301)
    dom = composite_gauss_legendre(breaks, order=16)
    g = lambda k: np.array([delta_argument(cfg, kk * n) for kk in k])
    gk = g(dom.points)
    # one branch at a time, each isolated by a window around its root
    total = 0.0
    for br in final_momentum_roots(cfg, n):
        sel = np.abs(dom.points - br.k_f) < 0.3 * br.k_f
        sub = (dom.points[sel], dom.weights[sel])
        val, _ = nascent_delta_integrate(lambda k: k ** 2, lambda k, s=sel: gk[s],
                                         [0.02, 0.014, 0.01, 0.007], sub, rtol=1e-6)
        total += abs(cfg.b / (2 * math.pi)) ** 2 * (2 * val) ** 2
    return total


@pytest.mark.parametrize("mu,p_i,theta", [(1.0, (0, 0, 0), 0.7), (0.5, (0.1, 0.2, 0.0), 1.9),
                                          (0.2, (0, 0, 0.3), 2.8), (2.0, (0.4, 0, 0.3), 0.4)])
def test_density_matches_nascent_delta_oracle(mu, p_i, theta):
    cfg = CollisionConfig.make(k_i=(0, 0, 1), p_i=p_i, mu=mu, b=0.8)
    n = direction(theta, 0.3)
    assert lf_probability_density(cfg, n) == pytest.approx(_oracle_density(cfg, n), rel=1e-5)


def test_amplitude_phase_and_modulus():
    cfg = CollisionConfig.make(mu=1.0, b=2.0)
    (amp,) = lf_amplitude_density(cfg, direction(math.radians(60)))
    assert amp.real == pytest.approx(0.0, abs=1e-15)
    assert amp.imag > 0
    assert abs(amp) ** 2 == pytest.approx(lf_probability_density(cfg, direction(math.radians(60))))


@settings(max_examples=150, deadline=None)
@given(st.floats(0.0, 3.0), st.tuples(*[st.floats(-0.8, 0.8)] * 3),
       st.floats(0, math.pi), st.floats(0, 2 * math.pi))
def test_transfer_form_matches_direct_form(mu, p, th, ph):
    cfg = CollisionConfig.make(k_i=(0.1, 0.0, 1.0), p_i=p, mu=mu, b=1.3)
    n = direction(th, ph)
    brs = final_momentum_roots(cfg, n)
    if not brs or brs[-1].discriminant < 1e-6:
        return
    direct = lf_probability_density(cfg, n)
    rebuilt = sum(lf_density_from_transfer(cfg.k_i, br.k_f * n, cfg.p_i, mu, cfg.b) for br in brs)
    assert rebuilt == pytest.approx(direct, rel=1e-8)


def test_closed_direction_is_zero():
    cfg = CollisionConfig.make(mu=1.0)
    assert lf_probability_density(cfg, direction(2.5)) == 0.0


def test_singular_direction_raises():
    probe = divergence_probe((0, 0, 1), 0.5)
    cfg = CollisionConfig.make(k_i=(0, 0, 1), p_i=probe.p_i, mu=0.5)
    with pytest.raises(SingularJacobianError) as info:
        lf_probability_density(cfg, probe.n)
    assert info.value.direction is not None


def test_total_warns_on_singular_cone():
    probe = divergence_probe((0, 0, 1), 0.5)
    cfg = CollisionConfig.make(k_i=(0, 0, 1), p_i=probe.p_i, mu=0.5)
    with pytest.warns(DivergenceWarning):
        lf_total_probability(cfg, 32)


def test_total_no_warning_for_rest_atom():
    cfg = CollisionConfig.make(mu=0.7)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        lf_total_probability(cfg, 32)


def test_total_converges_with_order():
    cfg = CollisionConfig.make(k_i=(0, 0, 1), p_i=(0.2, 0, -0.1), mu=0.6)
    a, b = lf_total_probability(cfg, 96), lf_total_probability(cfg, 192)
    assert a == pytest.approx(b, rel=1e-6)


def test_singular_cone_geometry():
    for mu in (0.25, 0.5, 0.75, 1.0, 3.0):
        probe = divergence_probe((0, 0, 2), mu)
        assert probe.cone_half_angle == pytest.approx(math.pi / 6)
        cfg = CollisionConfig.make(k_i=(0, 0, 2), p_i=probe.p_i, mu=mu)
        assert cfg.q / (mu * np.linalg.norm(cfg.P)) == pytest.approx(0.5)
        assert abs(probe.discriminant) <= 1e-12 * probe.q ** 2
    assert singular_cone(CollisionConfig.make(mu=0.5)) is None


def test_probe_errors():
    with pytest.raises(NotFoundError):
        divergence_probe((0, 0, 1), 0.0)
    with pytest.raises(NotFoundError):
        tangent_boundary_pair((0, 0, 1), 1.0)


def test_tangent_boundary_density_vanishes():
    p_i, n, disc = tangent_boundary_pair((0, 0, 1), 0.5)
    assert disc == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(p_i, [0, 0, 0.5])
    cfg = CollisionConfig.make(k_i=(0, 0, 1), p_i=p_i, mu=0.5)
    assert discriminant(cfg, n) == pytest.approx(0.0, abs=1e-12)
    near = [lf_probability_density(cfg, direction(math.pi / 2 - d)) for d in (1e-2, 1e-3, 1e-4)]
    assert near[0] > near[1] > near[2]
