import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scatverify.cmpath import backmapped_lf_density, cm_solid_angle_jacobian
from scatverify.errors import PreconditionError
from scatverify.kinematics import CollisionConfig, final_momentum_roots
from scatverify.quantization import (quantize_cm, square_order_invariance, transport_to_lf,
                                     window_probability, zonal_partition)


@settings(max_examples=40, deadline=None)
@given(st.integers(8, 3000))
def test_partition_counts_and_area(N):
    dirs, area = zonal_partition(N)
    assert len(dirs) == N
    assert np.sum(area) == pytest.approx(4 * math.pi, rel=1e-13)
    np.testing.assert_allclose(np.linalg.norm(dirs, axis=1), 1.0, atol=1e-14)


@pytest.mark.parametrize("N", [200, 2000, 20000])
def test_partition_is_equal_area(N):
    """Oracle: the fraction of centres in any polar cap tracks its area."""
    dirs, _ = zonal_partition(N)
    for c in (0.9, 0.3, -0.4):
        frac = np.mean(dirs[:, 2] >= c)
        assert abs(frac - (1 - c) / 2) <= 3 / math.sqrt(N)


def test_partition_too_small():
    with pytest.raises(PreconditionError):
        zonal_partition(7)


@pytest.mark.parametrize("mu,p_i", [(1.0, (0, 0, 0)), (0.4, (0.2, 0.1, 0.0)), (2.0, (0, 0, 0.1))])
def test_lf_solid_angles_match_jacobian(mu, p_i):
    cfg = CollisionConfig.make(k_i=(0, 0, 1), p_i=p_i, mu=mu)
    cm = quantize_cm(cfg, 300)
    lf = transport_to_lf(cm)
    for j in range(0, 300, 7):
        if j in lf.flags:
            continue
        n = lf.directions[j]
        br = min(final_momentum_roots(cfg, n),
                 key=lambda b: abs(b.k_f * n - (cfg.q * cm.directions[j] + mu * cfg.P) / (1 + mu)).sum())
        expected = cm.d_omega[j] / cm_solid_angle_jacobian(cfg, br.k_f, br.discriminant)
        assert lf.d_omega[j] == pytest.approx(expected, rel=1e-9)


def test_window_converges_to_backmapped_integral():
    """Sum of squared elements over a cone, per CM cell solid angle, tends to the
    integral of the back-mapped LF density over the same cone."""
    cfg = CollisionConfig.make(k_i=(0, 0, 1), p_i=(0.1, 0, 0), mu=0.5, b=1.0)
    axis, half = np.array([0.0, 0.0, 1.0]), math.radians(40)
    c, wc = np.polynomial.legendre.leggauss(64)
    c = math.cos(half) + 0.5 * (1 - math.cos(half)) * (c + 1)
    wc = 0.5 * (1 - math.cos(half)) * wc
    phi = 2 * math.pi * np.arange(128) / 128
    oracle = 0.0
    for ci, wi in zip(c, wc):
        si = math.sqrt(1 - ci * ci)
        oracle += wi * (2 * math.pi / 128) * sum(
            backmapped_lf_density(cfg, np.array([si * math.cos(f), si * math.sin(f), ci]))
            for f in phi)
    N = 40000
    lf = transport_to_lf(quantize_cm(cfg, N))
    scaled = window_probability(lf, axis, half) * N / (4 * math.pi)
    assert scaled == pytest.approx(oracle, rel=2e-2)


def test_transport_preserves_amplitudes_and_flags_degenerate():
    cfg = CollisionConfig.make(k_i=(0, 0, 1), mu=1.0)
    cm = quantize_cm(cfg, 100)
    lf = transport_to_lf(cm)
    np.testing.assert_array_equal(lf.d_f, cm.d_f)
    # omega_c = -z maps to k_f = 0 for equal masses at rest
    assert len(lf.flags) == 1 and np.isnan(lf.d_omega[list(lf.flags)[0]])
    with pytest.raises(PreconditionError):
        transport_to_lf(lf)


def test_cm_total_probability():
    cfg = CollisionConfig.make(k_i=(0, 0, 2), mu=0.3, b=0.5)
    cm = quantize_cm(cfg, 500)
    total = window_probability(cm, (0, 0, 1), math.pi)
    # sum of |F'_c 4pi/N|^2 over N cells
    F2 = abs(0.5 * 2 / (2 * math.pi * 1.3 ** 2)) ** 2
    assert total == pytest.approx(F2 * (4 * math.pi) ** 2 / 500, rel=1e-12)


def test_square_order_rejects_bad_angle():
    cfg = CollisionConfig.make()
    with pytest.raises(PreconditionError):
        square_order_invariance(cfg, 100, (0, 0, 1), 0.0)
