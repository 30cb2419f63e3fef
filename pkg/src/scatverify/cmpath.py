"""The center-of-mass route.

The amplitude is isotropic in the CM frame.  Directions there are unit
vectors along the relative momentum k_c, never scalar angles, so there is
no azimuth ambiguity when mapping back to the laboratory frame.
"""
from __future__ import annotations

import numpy as np

from .errors import DegenerateEncounterError, SingularJacobianError
from .kinematics import CollisionConfig, check_unit, final_momentum_roots, vec3


def _require_motion(cfg: CollisionConfig) -> float:
    q = cfg.q
    if q == 0.0:
        raise DegenerateEncounterError("q = 0: no relative motion between neutron and atom")
    return q


def cm_amplitude_density(cfg: CollisionConfig) -> complex:
    """i b q / (2 pi (1+mu)^2), the same for every CM direction."""
    q = _require_motion(cfg)
    return 1j * cfg.b * q / (2 * np.pi * (1 + cfg.mu) ** 2)


def cm_probability_density(cfg: CollisionConfig) -> float:
    """|b q / (2 pi (1+mu)^2)|^2 per steradian of CM solid angle."""
    return abs(cm_amplitude_density(cfg)) ** 2


def map_cm_to_lf(cfg: CollisionConfig, omega_c) -> tuple[np.ndarray, float]:
    """LF direction and magnitude of k_f = q omega_c/(1+mu) + mu P/(1+mu)."""
    omega_c = check_unit(omega_c)
    kf_vec = (cfg.q * omega_c + cfg.mu * cfg.P) / (1 + cfg.mu)
    kf = float(np.linalg.norm(kf_vec))
    if kf == 0.0:
        raise DegenerateEncounterError("mapped final momentum has zero length")
    return kf_vec / kf, kf


def map_lf_to_cm(cfg: CollisionConfig, n, k_f: float) -> np.ndarray:
    """Inverse change of variables: omega_c = ((1+mu) k_f n - mu P) / q."""
    q = _require_motion(cfg)
    n = vec3(n)
    return ((1 + cfg.mu) * k_f * n - cfg.mu * cfg.P) / q


def cm_solid_angle_jacobian(cfg: CollisionConfig, k_f: float, disc: float) -> float:
    """dOmega_c / dOmega_f = (1+mu)^2 k_f^2 / (q sqrt(D)) on one branch."""
    q = _require_motion(cfg)
    return (1 + cfg.mu) ** 2 * k_f * k_f / (q * np.sqrt(disc))


def _branches(cfg, n):
    branches = final_momentum_roots(cfg, n)
    for br in branches:
        if br.discriminant == 0.0:
            raise SingularJacobianError("zero discriminant: CM to LF Jacobian is unbounded",
                                        direction=np.asarray(n, float))
    return branches


def backmapped_lf_density(cfg: CollisionConfig, n) -> float:
    """Isotropic CM density pushed forward to LF solid angle, summed over branches.

    Equals |b/(2 pi (1+mu))|^2 k_f^2 q / sqrt(D) per branch, and 0 where the
    direction is kinematically closed.
    """
    n = check_unit(n)
    q = cfg.q
    pref = abs(cfg.b / (2 * np.pi * (1 + cfg.mu))) ** 2
    return float(sum(pref * br.k_f ** 2 * q / np.sqrt(br.discriminant)
                     for br in _branches(cfg, n)))


def standard_cross_section_density(cfg: CollisionConfig, n) -> float:
    """Front area A = (2 pi (1+mu))^2 / q^2 times :func:`backmapped_lf_density`.

    Reduces to |b|^2 k_f^2 / (q sqrt(D)) per branch; an area per LF steradian.
    """
    q = _require_motion(cfg)
    area = (2 * np.pi * (1 + cfg.mu)) ** 2 / q ** 2
    return area * backmapped_lf_density(cfg, n)
