import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scatverify.errors import PreconditionError, SingularPointError
from scatverify.kinematics import CollisionConfig, direction, final_momentum_roots
from scatverify.twobody import (final_amplitude_kernel, incident_wave, is_on_shell, pde_residual,
                                scattered_wave_closed)

PROBES = np.array([[1.0, 0.5, -0.3, -0.4, 0.2, 0.6],
                   [0.2, -1.1, 0.7, 0.9, 0.3, -0.5],
                   [2.0, 0.0, 1.0, 0.0, -0.8, 0.0]])


def _cfg():
    return CollisionConfig.make(k_i=(0.1, 0.2, 0.6), p_i=(-0.2, 0.3, 0.1), mu=0.7, b=0.4 - 0.2j)


def test_consistent_wave_converges_second_order():
    cfg = _cfg()
    r = [pde_residual(cfg, h, PROBES, include_incident=False) for h in (0.02, 0.01, 0.005)]
    assert r[0] / r[1] == pytest.approx(4.0, rel=0.1)
    assert r[1] / r[2] == pytest.approx(4.0, rel=0.1)


def test_printed_convention_stalls_when_P_nonzero():
    cfg = _cfg()
    r = [pde_residual(cfg, h, PROBES, include_incident=False, convention="printed")
         for h in (0.02, 0.01, 0.005)]
    assert r[2] > 0.5 * r[0]
    assert r[2] > 1e3 * pde_residual(cfg, 0.005, PROBES, include_incident=False)


def test_conventions_agree_when_P_zero():
    cfg = CollisionConfig.make(k_i=(0, 0, 0.5), p_i=(0, 0, -0.5), mu=0.6)
    a = scattered_wave_closed(cfg, PROBES[:, :3], PROBES[:, 3:], 0.3)
    b = scattered_wave_closed(cfg, PROBES[:, :3], PROBES[:, 3:], 0.3, convention="printed")
    np.testing.assert_allclose(a, b, rtol=1e-14)


def test_plane_wave_residual_small():
    cfg = _cfg()
    assert pde_residual(cfg, 1e-3, PROBES, include_scattered=False) < 1e-7


def test_scattered_wave_modulus_and_translation():
    cfg = _cfg()
    rn, ra = np.array([1.0, 2.0, 3.0]), np.array([0.0, 0.0, 1.0])
    v = scattered_wave_closed(cfg, rn, ra, 0.0)
    assert abs(v) == pytest.approx(abs(cfg.b) / (1 + cfg.mu) / 3.0)
    # shifting both particles by d multiplies the wave by exp(i P.d)
    d = np.array([0.3, -0.7, 0.2])
    w = scattered_wave_closed(cfg, rn + d, ra + d, 0.0)
    assert w == pytest.approx(v * np.exp(1j * cfg.P @ d), rel=1e-12)
    u = incident_wave(cfg, rn + d, ra + d, 0.0)
    assert u == pytest.approx(incident_wave(cfg, rn, ra, 0.0) * np.exp(1j * cfg.P @ d), rel=1e-12)


def test_errors():
    cfg = _cfg()
    with pytest.raises(SingularPointError):
        scattered_wave_closed(cfg, (1, 1, 1), (1, 1, 1), 0.0)
    with pytest.raises(PreconditionError):
        scattered_wave_closed(cfg, (1, 1, 1), (0, 1, 1), 0.0, convention="other")
    with pytest.raises(PreconditionError):
        pde_residual(cfg, 0.1, [[0, 0, 0, 0.2, 0, 0]])
    with pytest.raises(PreconditionError):
        pde_residual(cfg, 0.1, [[0, 0, 0]])


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0, np.pi), st.floats(0, 2 * np.pi))
def test_kernel_on_shell_for_kinematic_roots(mu, th, ph):
    cfg = CollisionConfig.make(k_i=(0, 0, 1), p_i=(0.1, -0.2, 0.3), mu=mu, b=2.0)
    n = direction(th, ph)
    for br in final_momentum_roots(cfg, n):
        kf = br.k_f * n
        pf = cfg.P - kf
        coeff, dp, de = final_amplitude_kernel(cfg, kf, pf)
        assert coeff == pytest.approx(2j / np.pi)
        assert np.linalg.norm(dp) < 1e-12 and abs(de) < 1e-10
        assert is_on_shell(cfg, kf, pf)
    assert not is_on_shell(cfg, (0, 0, 5), (0, 0, 0))
